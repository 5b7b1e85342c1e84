"""Command-line interface.

Commands:
  deblur           blind kernel estimation + non-blind finish
  deblur-gaussian  accelerated path for Gaussian-like blur
  eval             benchmark a run against ground truth (JSON report)
  analyze          CSV emitters for curves, histograms and spectra
  learn-a          calibrate the Gaussian surrogate strength from pairs

All commands are deterministic.  The environment variable RGTV_THREADS
caps internal (BLAS/FFT) parallelism; it must be honored before numeric
libraries load, which is why the heavy imports live inside the command
handlers.  Exit codes: 0 success, 2 bad usage, 3 unreadable file, then
one distinct code per error category (see errors.py).
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import time

from .errors import RgtvError

_THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def _apply_thread_cap() -> None:
    cap = os.environ.get("RGTV_THREADS")
    if cap:
        for var in _THREAD_ENV_VARS:
            os.environ.setdefault(var, cap)


def _luminance(channels):
    if len(channels) == 1:
        return channels[0]
    return 0.299 * channels[0] + 0.587 * channels[1] + 0.114 * channels[2]


def _config_from_args(args):
    from .pipeline import DeblurConfig

    kwargs = {"kernel_side": args.kernel_size}
    if getattr(args, "beta", None) is not None:
        kwargs["beta0"] = args.beta
    if getattr(args, "mu", None) is not None:
        kwargs["mu"] = args.mu
    if getattr(args, "sigma", None) is not None:
        kwargs["sigma"] = args.sigma
    if getattr(args, "epsilon", None) is not None:
        kwargs["epsilon"] = args.epsilon
    if getattr(args, "scales_factor", None) is not None:
        kwargs["pyramid_factor"] = args.scales_factor
    return DeblurConfig(**kwargs)


def _default_output(input_path: str, suffix: str) -> str:
    stem = os.path.splitext(os.path.basename(input_path))[0]
    return stem + suffix


def _run_deblur(args, gaussian: bool) -> int:
    import numpy as np

    from . import fileio
    from .fourier import edge_taper, gaussian_kernel
    from .pipeline import blind_deblur, blind_deblur_gaussian, nonblind_finish

    cfg = _config_from_args(args)
    channels = fileio.load_image_channels(args.input)
    luma = _luminance(channels)
    work = luma
    if getattr(args, "edge_taper", False):
        taper_kernel = gaussian_kernel(cfg.kernel_side, max(cfg.kernel_side / 4.0, 0.5))
        work = edge_taper(luma, taper_kernel)

    t0 = time.perf_counter()
    if gaussian:
        kernel, skeleton = blind_deblur_gaussian(work, cfg)
    else:
        kernel, skeleton = blind_deblur(work, cfg)
    t_estimate = time.perf_counter() - t0

    t0 = time.perf_counter()
    restored = [nonblind_finish(c, kernel) for c in channels]
    t_finish = time.perf_counter() - t0

    out_image = args.out_image or _default_output(args.input, "_deblurred.png")
    out_kernel = args.out_kernel or _default_output(args.input, "_kernel.txt")
    if len(restored) == 1:
        written = fileio.save_image_both(out_image, restored[0])
    else:
        fileio.save_image_channels(out_image, restored)
        written = [out_image]
    fileio.save_kernel(out_kernel, kernel)
    written.append(out_kernel)
    if args.skeleton:
        fileio.save_image_both(args.skeleton, np.clip(skeleton, 0.0, 1.0))
        written.append(args.skeleton)

    print(f"kernel side: {kernel.side}")
    print(f"estimation: {t_estimate:.2f} s, finish: {t_finish:.2f} s")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_deblur(args) -> int:
    return _run_deblur(args, gaussian=False)


def _cmd_deblur_gaussian(args) -> int:
    return _run_deblur(args, gaussian=True)


def _cmd_eval(args) -> int:
    from . import fileio
    from .metrics import EvalReport, error_ratio, kernel_ncc, psnr
    from .pipeline import blind_deblur, nonblind_finish

    truth = fileio.load_image(args.truth)
    blurred = fileio.load_image(args.blurred)
    kernel_truth = fileio.load_kernel(args.kernel_truth)

    times = {}
    if args.kernel_est:
        kernel_est = fileio.load_kernel(args.kernel_est)
        times["kernel_estimation"] = 0.0
        cfg = None
    else:
        from .pipeline import DeblurConfig

        if args.kernel_size is None:
            args.kernel_size = kernel_truth.side
        cfg = _config_from_args(args)
        t0 = time.perf_counter()
        kernel_est, _ = blind_deblur(blurred, cfg)
        times["kernel_estimation"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    restored_est = nonblind_finish(blurred, kernel_est)
    times["restore_estimated"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    restored_ref = nonblind_finish(blurred, kernel_truth)
    times["restore_truth"] = time.perf_counter() - t0

    report = EvalReport.from_metrics(
        error_ratio(truth, restored_est, restored_ref),
        psnr(truth, restored_est),
        kernel_ncc(kernel_est, kernel_truth),
        wall_time_seconds=times,
        config=None if cfg is None else {
            "kernel_side": cfg.kernel_side, "sigma": cfg.sigma,
            "epsilon": cfg.epsilon, "beta0": cfg.beta0, "mu": cfg.mu,
            "pyramid_factor": cfg.pyramid_factor,
        })
    text = report.to_json()
    print(text)
    if args.report:
        with open(args.report, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    return 0


CURVES_HEADER = ["d", "gl", "gl_deriv", "gtv", "gtv_deriv",
                 "rgl", "rgl_deriv", "rgtv", "rgtv_deriv"]
HISTOGRAM_HEADER = ["bin_left", "bin_right", "fraction"]
SPECTRUM_HEADER = ["variant", "index", "signal", "eigenvalue_w",
                   "eigenvalue_gamma", "relative_w", "relative_gamma",
                   "second_eigvec_w", "second_eigvec_gamma"]
RGTV_ITER_HEADER = ["iteration", "index", "signal", "second_eigvec",
                    "relative_eigenvalue"]


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}")


def _cmd_analyze_curves(args) -> int:
    import numpy as np

    from .priors import pairwise_curve

    d = np.linspace(0.0, 1.0, args.points)
    sigmas = {"gl": args.sigma, "gtv": args.sigma, "rgl": args.sigma,
              "rgtv": args.rgtv_sigma if args.rgtv_sigma else args.sigma}
    columns = [d]
    for kind in ("gl", "gtv", "rgl", "rgtv"):
        value, deriv = pairwise_curve(kind, d, w_fixed=args.weight,
                                      sigma=sigmas[kind])
        columns.extend([value, deriv])
    rows = np.column_stack(columns)
    _write_csv(args.csv, CURVES_HEADER, rows.tolist())
    return 0


def _cmd_analyze_histogram(args) -> int:
    from . import fileio
    from .imagegraph import WeightParams
    from .metrics import weight_histogram

    img = fileio.load_image(args.input)
    if args.size:
        img = img[args.row:args.row + args.size, args.col:args.col + args.size]
    fractions, edges = weight_histogram(
        img, WeightParams(args.sigma, args.epsilon), bins=args.bins)
    rows = [[edges[i], edges[i + 1], fractions[i]] for i in range(len(fractions))]
    _write_csv(args.csv, HISTOGRAM_HEADER, rows)
    return 0


def _spectrum_signal(args, variant: str):
    from .synthetic import add_noise, gaussian_blur_1d, step_signal

    x = step_signal(args.length)
    if variant == "noisy":
        return add_noise(x, args.noise_sigma, seed=0)
    if variant == "blurred":
        return gaussian_blur_1d(x, args.blur_sigma)
    return x


def _cmd_analyze_spectrum(args) -> int:
    from .imagegraph import WeightParams
    from .spectral import (
        dense_laplacian,
        eigendecompose,
        line_adjacency,
        line_gamma_adjacency,
        relative_eigenvalues,
    )

    params = WeightParams(args.sigma)
    rows = []
    for variant in ("ideal", "noisy", "blurred"):
        x = _spectrum_signal(args, variant)
        dec_w = eigendecompose(dense_laplacian(line_adjacency(x, args.sigma)))
        dec_g = eigendecompose(dense_laplacian(line_gamma_adjacency(x, params)))
        rel_w = relative_eigenvalues(dec_w)
        rel_g = relative_eigenvalues(dec_g)
        for i in range(x.size):
            rows.append([variant, i, x[i],
                         dec_w.eigenvalues[i], dec_g.eigenvalues[i],
                         rel_w[i], rel_g[i],
                         dec_w.eigenvectors[i, 1], dec_g.eigenvectors[i, 1]])
    _write_csv(args.csv, SPECTRUM_HEADER, rows)
    return 0


def _cmd_analyze_rgtv_iter(args) -> int:
    from .imagegraph import WeightParams
    from .spectral import (
        dense_laplacian,
        eigendecompose,
        iterative_rgtv_filter,
        line_gamma_adjacency,
        relative_eigenvalues,
    )
    from .synthetic import add_noise, gaussian_blur_1d, step_signal

    params = WeightParams(args.sigma)
    y = add_noise(gaussian_blur_1d(step_signal(args.length), args.blur_sigma),
                  args.noise_sigma, seed=0)
    _, iterates = iterative_rgtv_filter(y, params, mu=args.mu,
                                        max_iters=args.iters, keep_iterates=True)
    rows = []
    for it, x in enumerate(iterates):
        dec = eigendecompose(dense_laplacian(line_gamma_adjacency(x, params)))
        rel = relative_eigenvalues(dec)
        for i in range(x.size):
            rows.append([it, i, x[i], dec.eigenvectors[i, 1], rel[i]])
    _write_csv(args.csv, RGTV_ITER_HEADER, rows)
    return 0


def _cmd_learn_a(args) -> int:
    from . import fileio
    from .pipeline import learn_a

    pairs = []
    for name in sorted(os.listdir(args.pairs)):
        stem, suffix = os.path.splitext(name)
        if suffix.lower() not in (".png", ".pgm") or not stem.endswith("_sharp"):
            continue
        base = stem[:-len("_sharp")]
        for twin_suffix in (".png", ".pgm"):
            twin = os.path.join(args.pairs, base + "_blurred" + twin_suffix)
            if os.path.exists(twin):
                pairs.append((fileio.load_image(os.path.join(args.pairs, name)),
                              fileio.load_image(twin)))
                break
    if not pairs:
        from .errors import InvalidInput

        raise InvalidInput(f"no *_sharp/*_blurred pairs found in {args.pairs}")
    a = learn_a(pairs)
    print(f"pairs: {len(pairs)}")
    print(f"a = {a:.6f}")
    return 0


def _add_deblur_options(sub, pyramid: bool):
    sub.add_argument("input", help="blurry image (.png or .pgm)")
    sub.add_argument("--kernel-size", type=int, required=True,
                     help="odd kernel side, at least 3")
    sub.add_argument("--beta", type=float, help="prior weight (default 0.01)")
    sub.add_argument("--mu", type=float, help="kernel ridge weight (default 0.05)")
    sub.add_argument("--sigma", type=float, help="edge-weight bandwidth (default 0.1)")
    sub.add_argument("--epsilon", type=float, help="l1 stabilization (default 0.01)")
    if pyramid:
        sub.add_argument("--scales-factor", type=float,
                         help="pyramid down-sampling ratio (default log2(3))")
        sub.add_argument("--edge-taper", action=argparse.BooleanOptionalAction,
                         default=True,
                         help="soften borders before estimation (default on)")
    else:
        sub.add_argument("--edge-taper", action=argparse.BooleanOptionalAction,
                         default=False, help=argparse.SUPPRESS)
    sub.add_argument("--out-kernel", help="kernel text file to write")
    sub.add_argument("--out-image", help="restored image to write (.png or .pgm)")
    sub.add_argument("--skeleton", help="also write the skeleton image here")
    sub.add_argument("--seed", type=int, default=0,
                     help="accepted for interface stability; the pipeline is "
                          "deterministic, so this flag has no effect")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgtv",
        description="Blind image deblurring with a reweighted graph "
                    "total variation prior.")
    commands = parser.add_subparsers(dest="command", required=True)

    deblur = commands.add_parser("deblur", help="coarse-to-fine blind deblurring")
    _add_deblur_options(deblur, pyramid=True)
    deblur.set_defaults(func=_cmd_deblur)

    fast = commands.add_parser("deblur-gaussian",
                               help="accelerated path for Gaussian-like blur")
    _add_deblur_options(fast, pyramid=False)
    fast.set_defaults(func=_cmd_deblur_gaussian)

    ev = commands.add_parser("eval", help="benchmark against ground truth")
    ev.add_argument("--truth", required=True, help="ground-truth sharp image")
    ev.add_argument("--blurred", required=True, help="blurry observation")
    ev.add_argument("--kernel-truth", required=True, help="ground-truth kernel file")
    ev.add_argument("--kernel-est",
                    help="skip estimation and evaluate this kernel file instead")
    ev.add_argument("--kernel-size", type=int,
                    help="kernel side for estimation (default: truth kernel side)")
    ev.add_argument("--beta", type=float)
    ev.add_argument("--mu", type=float)
    ev.add_argument("--sigma", type=float)
    ev.add_argument("--epsilon", type=float)
    ev.add_argument("--scales-factor", type=float)
    ev.add_argument("--report", help="also write the JSON report here")
    ev.set_defaults(func=_cmd_eval)

    analyze = commands.add_parser("analyze", help="emit analysis data as CSV")
    analyses = analyze.add_subparsers(dest="analysis", required=True)

    curves = analyses.add_parser("curves", help="pairwise regularizer curves")
    curves.add_argument("--csv", required=True)
    curves.add_argument("--sigma", type=float, default=0.1)
    curves.add_argument("--rgtv-sigma", type=float, default=None,
                        help="separate bandwidth for the rgtv curve; pass "
                             "sigma*sqrt(2) to align its peak with rgl's")
    curves.add_argument("--weight", type=float, default=0.1,
                        help="fixed weight for the non-reweighted curves")
    curves.add_argument("--points", type=int, default=1001)
    curves.set_defaults(func=_cmd_analyze_curves)

    hist = analyses.add_parser("histogram", help="pairwise-difference histogram")
    hist.add_argument("--csv", required=True)
    hist.add_argument("--input", required=True, help="image to analyze")
    hist.add_argument("--row", type=int, default=0, help="patch top row")
    hist.add_argument("--col", type=int, default=0, help="patch left column")
    hist.add_argument("--size", type=int, default=0,
                      help="patch side (0 = whole image, capped at 32x32)")
    hist.add_argument("--bins", type=int, default=50)
    hist.add_argument("--sigma", type=float, default=0.1)
    hist.add_argument("--epsilon", type=float, default=0.01)
    hist.set_defaults(func=_cmd_analyze_histogram)

    spectrum = analyses.add_parser("spectrum",
                                   help="chain-graph spectra of a step signal")
    spectrum.add_argument("--csv", required=True)
    spectrum.add_argument("--length", type=int, default=50)
    spectrum.add_argument("--sigma", type=float, default=0.3)
    spectrum.add_argument("--noise-sigma", type=float, default=0.02)
    spectrum.add_argument("--blur-sigma", type=float, default=1.0)
    spectrum.set_defaults(func=_cmd_analyze_spectrum)

    rgtv_iter = analyses.add_parser("rgtv-iter",
                                    help="iterated spectral filter diagnostics")
    rgtv_iter.add_argument("--csv", required=True)
    rgtv_iter.add_argument("--length", type=int, default=50)
    rgtv_iter.add_argument("--sigma", type=float, default=0.3)
    rgtv_iter.add_argument("--mu", type=float, default=0.5)
    rgtv_iter.add_argument("--noise-sigma", type=float, default=1e-4)
    rgtv_iter.add_argument("--blur-sigma", type=float, default=1.0)
    rgtv_iter.add_argument("--iters", type=int, default=10)
    rgtv_iter.set_defaults(func=_cmd_analyze_rgtv_iter)

    learn = commands.add_parser("learn-a", help="calibrate the Gaussian surrogate")
    learn.add_argument("--pairs", required=True,
                       help="directory of NAME_sharp.* / NAME_blurred.* images")
    learn.set_defaults(func=_cmd_learn_a)

    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RgtvError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error [unreadable-file]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
