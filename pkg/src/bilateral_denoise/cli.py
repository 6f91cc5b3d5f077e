"""Command-line front end: denoise, corrupt, measure, and rerun the experiments.

Exit codes are 0 on success, 1 when a file cannot be read or written and 2 for
usage errors and unmet preconditions (for example ``--variant oracle`` without
``--reference``).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import asdict
from typing import Iterable, Optional, Sequence

import numpy as np

from . import experiments
from .bilateral import DEFAULT_KERNEL_TOLERANCE, FilterParams, Variant
from .fast import KernelBreakdownError, fast_improved_bilateral
from .fixtures import FIXTURES, make_fixture
from .image import check_same_shape
from .metrics import NoiseSpec, add_gaussian_noise, evaluate
from .pgm import PgmError, load_pgm, quantize, save_pgm

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _db(x: float) -> str:
    return f"{x:.4f}"


def _ssim(x: float) -> str:
    return f"{x:.6f}"


class Report:
    """Resolved configuration followed by a table, as aligned text or CSV."""

    def __init__(self, fmt: str, config: dict):
        self.fmt = fmt
        self.config = config

    def render(self, header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
        rows = [list(r) for r in rows]
        buf = io.StringIO()
        for k, v in self.config.items():
            buf.write(f"# {k}={v}\n" if self.fmt == "csv" else f"{k}: {v}\n")
        if self.fmt == "csv":
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
            return buf.getvalue()
        buf.write("\n")
        widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
        for line in [list(header)] + rows:
            buf.write("  ".join(str(c).rjust(w) for c, w in zip(line, widths)).rstrip() + "\n")
        return buf.getvalue()


def _add_filter_args(sp: argparse.ArgumentParser, sigma_s=None, sigma_r=None) -> None:
    g = sp.add_argument_group("filter")
    g.add_argument("--sigma-s", type=float, default=sigma_s, required=sigma_s is None, help="spatial Gaussian width")
    g.add_argument("--sigma-r", type=float, default=sigma_r, required=sigma_r is None, help="range Gaussian width")
    g.add_argument("--w", type=int, default=None, help="window half-width (default ceil(3 sigma_s))")
    g.add_argument("--l", type=int, default=1, dest="L", help="box half-width of the improved guide (default 1)")
    g.add_argument("--epsilon", type=float, default=None, help="truncation tolerance of the fast engine")
    k = g.add_mutually_exclusive_group()
    k.add_argument(
        "--kernel-tolerance",
        type=float,
        default=DEFAULT_KERNEL_TOLERANCE,
        help=f"sup-norm accuracy target of the range-kernel expansion (default {DEFAULT_KERNEL_TOLERANCE})",
    )
    k.add_argument(
        "--minimal-order",
        action="store_const",
        const=None,
        dest="kernel_tolerance",
        help="use the smallest positive, monotone expansion order instead of an accuracy target",
    )


def _add_source_args(sp: argparse.ArgumentParser, default_fixture: str) -> None:
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--input", help="clean PGM image")
    src.add_argument(
        "--fixture", choices=sorted(FIXTURES), default=default_fixture, help=f"synthetic image (default {default_fixture})"
    )


def _add_report_arg(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--report", choices=("text", "csv"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilateral-denoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("denoise", help="filter a noisy PGM")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--variant", choices=[v.value for v in Variant], default="ibf")
    sp.add_argument("--engine", choices=("direct", "fast"), default="direct")
    sp.add_argument("--reference", help="clean PGM; enables metrics and is the oracle guide")
    _add_filter_args(sp)
    _add_report_arg(sp)

    sp = sub.add_parser("add-noise", help="corrupt a PGM with white Gaussian noise")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    _add_report_arg(sp)

    sp = sub.add_parser("metrics", help="MSE, PSNR and SSIM of an estimate against a reference")
    sp.add_argument("estimate")
    sp.add_argument("reference")
    _add_report_arg(sp)

    sp = sub.add_parser("sweep-l", help="PSNR of the improved filter across box widths and noise levels")
    _add_source_args(sp, "checkerboard")
    sp.add_argument("--l-values", type=_ints, default=[0, 1, 2, 3, 4, 5])
    sp.add_argument("--sigmas", type=_floats, default=[20.0, 30.0])
    sp.add_argument("--sigma-s", type=float, default=experiments.SWEEP_L_SIGMA_S)
    sp.add_argument("--sigma-r", type=float, default=experiments.SWEEP_L_SIGMA_R)
    sp.add_argument("--engine", choices=("direct", "fast"), default="direct")
    sp.add_argument("--seed", type=int, required=True)
    _add_report_arg(sp)

    sp = sub.add_parser("sweep-sigma", help="best PSNR/SSIM per variant over a (sigma_s, sigma_r) grid")
    _add_source_args(sp, "checkerboard")
    sp.add_argument("--sigmas", type=_floats, default=[10.0, 20.0, 30.0, 40.0])
    sp.add_argument("--variants", default="sbf,ibf", help="comma-separated variants")
    sp.add_argument("--sigma-s-values", type=_floats, default=list(experiments.TUNING_SIGMA_S))
    sp.add_argument("--sigma-r-values", type=_floats, default=list(experiments.TUNING_SIGMA_R))
    sp.add_argument("--l", type=int, default=1, dest="L")
    sp.add_argument("--engine", choices=("direct", "fast"), default="direct", help="engine for the ibf variant")
    sp.add_argument("--seed", type=int, required=True)
    _add_report_arg(sp)

    sp = sub.add_parser("bench", help="wall time of the direct and fast improved filters")
    _add_source_args(sp, "bench")
    sp.add_argument("--sigma", type=float, default=20.0, help="noise level of the timed input")
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--seed", type=int, required=True)
    _add_report_arg(sp)
    return parser


def _params(args, variant: Variant) -> FilterParams:
    return FilterParams(
        args.sigma_s,
        args.sigma_r,
        W=args.w,
        L=args.L,
        variant=variant,
        epsilon=args.epsilon,
        kernel_tolerance=args.kernel_tolerance,
    )


def _param_config(p: FilterParams) -> dict:
    cfg = asdict(p)
    cfg["variant"] = p.variant.value
    return cfg


def _source(args) -> np.ndarray:
    return load_pgm(args.input) if args.input else make_fixture(args.fixture)


def _source_name(args) -> str:
    return args.input if args.input else f"fixture:{args.fixture}"


def cmd_denoise(args) -> str:
    variant = Variant(args.variant)
    if variant is Variant.ORACLE and not args.reference:
        raise UsageError("--variant oracle needs --reference")
    if args.engine == "fast" and variant is not Variant.IMPROVED:
        raise UsageError("--engine fast supports --variant ibf only")
    p = _params(args, variant)
    noisy = load_pgm(args.input)
    clean = load_pgm(args.reference) if args.reference else None
    if clean is not None:
        check_same_shape(noisy, clean, "input and reference")

    config = {"command": "denoise", "input": args.input, "output": args.output, "reference": args.reference}
    config.update(_param_config(p))
    config["engine"] = args.engine
    if args.engine == "fast":
        res = fast_improved_bilateral(noisy, p, details=True)
        out = res.image
        config.update(T=f"{res.T:g}", N=res.approx.N, M=res.approx.M, terms=res.approx.n_terms)
    else:
        out = experiments.denoise(noisy, p, "direct", clean)
    save_pgm(args.output, quantize(out))

    report = Report(args.report, config)
    if clean is None:
        return report.render(["output", "height", "width"], [[args.output, *out.shape]])
    # metrics use the real-valued estimate, before quantization
    m = evaluate(out, clean)
    return report.render(["mse", "psnr_db", "ssim"], [[f"{m.mse:.4f}", _db(m.psnr_db), _ssim(m.ssim)]])


def cmd_add_noise(args) -> str:
    spec = NoiseSpec(args.sigma, args.seed)
    clean = load_pgm(args.input)
    noisy = add_gaussian_noise(clean, spec)
    save_pgm(args.output, quantize(noisy))
    m = evaluate(noisy, clean)
    config = {"command": "add-noise", "input": args.input, "output": args.output, "sigma": spec.sigma, "seed": spec.seed}
    return Report(args.report, config).render(["mse", "psnr_db", "ssim"], [[f"{m.mse:.4f}", _db(m.psnr_db), _ssim(m.ssim)]])


def cmd_metrics(args) -> str:
    m = evaluate(load_pgm(args.estimate), load_pgm(args.reference))
    config = {"command": "metrics", "estimate": args.estimate, "reference": args.reference}
    return Report(args.report, config).render(["mse", "psnr_db", "ssim"], [[f"{m.mse:.4f}", _db(m.psnr_db), _ssim(m.ssim)]])


def cmd_sweep_l(args) -> str:
    if not args.l_values:
        raise UsageError("--l-values is empty")
    rows = experiments.sweep_l(
        _source(args), args.l_values, args.sigmas, args.seed, args.sigma_s, args.sigma_r, args.engine
    )
    config = {
        "command": "sweep-l",
        "source": _source_name(args),
        "l_values": args.l_values,
        "sigmas": args.sigmas,
        "sigma_s": args.sigma_s,
        "sigma_r": args.sigma_r,
        "engine": args.engine,
        "seed": args.seed,
    }
    return Report(args.report, config).render(["L", "sigma", "psnr_db"], [[r.L, f"{r.sigma:g}", _db(r.psnr_db)] for r in rows])


def cmd_sweep_sigma(args) -> str:
    try:
        variants = [Variant(v.strip()) for v in args.variants.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = experiments.sweep_sigma(
        _source(args), args.sigmas, args.seed, variants, args.L, args.engine, args.sigma_s_values, args.sigma_r_values
    )
    config = {
        "command": "sweep-sigma",
        "source": _source_name(args),
        "sigmas": args.sigmas,
        "variants": [v.value for v in variants],
        "sigma_s_values": args.sigma_s_values,
        "sigma_r_values": args.sigma_r_values,
        "L": args.L,
        "engine": args.engine,
        "seed": args.seed,
    }
    table = [
        [f"{r.sigma:g}", r.variant.value, f"{r.sigma_s:g}", f"{r.sigma_r:g}", _db(r.psnr_db), _ssim(r.ssim)] for r in rows
    ]
    return Report(args.report, config).render(["sigma", "variant", "sigma_s", "sigma_r", "psnr_db", "ssim"], table)


def cmd_bench(args) -> str:
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    clean = _source(args)
    noisy = add_gaussian_noise(clean, NoiseSpec(args.sigma, args.seed))
    rows = experiments.bench(noisy, repeats=args.repeats)
    config = {
        "command": "bench",
        "source": _source_name(args),
        "shape": "x".join(map(str, clean.shape)),
        "sigma": args.sigma,
        "seed": args.seed,
        "repeats": args.repeats,
        "grid": list(experiments.BENCH_GRID),
        "L": 1,
        "kernel_tolerance": DEFAULT_KERNEL_TOLERANCE,
    }
    table = [
        [f"{r.sigma_s:g}", f"{r.sigma_r:g}", f"{r.direct_seconds:.4f}", f"{r.fast_seconds:.4f}", f"{r.ratio:.4f}", f"{r.max_abs_diff:.4f}"]
        for r in rows
    ]
    header = ["sigma_s", "sigma_r", "direct_s", "fast_s", "ratio", "max_abs_diff"]
    return Report(args.report, config).render(header, table)


COMMANDS = {
    "denoise": cmd_denoise,
    "add-noise": cmd_add_noise,
    "metrics": cmd_metrics,
    "sweep-l": cmd_sweep_l,
    "sweep-sigma": cmd_sweep_sigma,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except (OSError, PgmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, KernelBreakdownError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
