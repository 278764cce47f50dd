"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O or format error.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .denoise import (PGMError, add_noise, basis_tiles, denoise_image, psnr,
                      read_pgm, write_pgm)
from .oracles import OracleConfig
from .regularizer import RegParams
from .solvers import ORACLES, SolverOptions, alternating_optimization, boosted_coding

EXIT_USAGE = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return v


class CSVFormatError(ValueError):
    def __init__(self, msg, line):
        super().__init__(f"{msg} (line {line})")
        self.line = line


def read_csv_matrix(path):
    """Comma-separated reals, no header; rows are dimensions."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                raise CSVFormatError("non-numeric field", lineno)
            if not all(np.isfinite(vals)):
                raise CSVFormatError("non-finite value", lineno)
            if rows and len(vals) != len(rows[0]):
                raise CSVFormatError(
                    f"expected {len(rows[0])} fields, got {len(vals)}", lineno)
            rows.append(vals)
    if not rows:
        raise CSVFormatError("no data", 1)
    return np.array(rows)


def write_csv_matrix(path, M):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in np.atleast_2d(M):
            w.writerow([repr(float(v)) for v in row])


def _add_coding_args(p):
    p.add_argument("--method", choices=("boosted", "alternating"), default="boosted",
                   help="coding algorithm (default: %(default)s)")
    p.add_argument("--oracle", choices=ORACLES, default="heuristic",
                   help="basis oracle for boosted coding (default: %(default)s)")
    p.add_argument("--lambda", dest="lam", type=_positive(float), default=1e-4,
                   help="regularization weight (default: %(default)s)")
    p.add_argument("--gamma", type=_positive(float), default=1.0,
                   help="L1-squared share for boosted coding (default: %(default)s)")
    p.add_argument("--d", type=_positive(int), default=16,
                   help="basis budget / size (default: %(default)s)")
    p.add_argument("--seed", type=_nonneg_int, default=0,
                   help="random seed for the alternating baseline (default: %(default)s)")
    p.add_argument("--alt-iters", type=_positive(int), default=SolverOptions.alt_iters,
                   help="alternations for the baseline (default: %(default)s)")
    p.add_argument("--w-max-iters", type=_positive(int), default=SolverOptions.w_max_iters,
                   help="weight-optimizer iteration cap (default: %(default)s)")


def build_parser():
    parser = _Parser(prog="convex-coding",
                     description="Boosted convex sparse coding and patch denoising.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("denoise", help="denoise a PGM image",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--in", dest="input", required=True, help="noisy PGM image")
    p.add_argument("--clean", help="clean reference PGM for PSNR reporting")
    p.add_argument("--out", required=True, help="denoised PGM output")
    p.add_argument("--report", help="JSON report output")
    p.add_argument("--basis", help="tiled basis PGM output")
    p.add_argument("--patch-size", type=_positive(int), default=8)
    p.add_argument("--stride", type=_positive(int), default=4)
    p.add_argument("--tau", type=_positive(float), default=1e-8,
                   help="support threshold for the refit")
    _add_coding_args(p)

    p = sub.add_parser("noise", help="add Gaussian noise to a PGM image",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sigma", type=_positive(float), default=0.1)
    p.add_argument("--seed", type=_nonneg_int, default=0)

    p = sub.add_parser("psnr", help="PSNR between two PGM images")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("train", help="code a raw CSV matrix (rows = dimensions)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="basis CSV output")
    p.add_argument("--weights", help="weights CSV output")
    p.add_argument("--report", help="JSON summary output")
    _add_coding_args(p)
    return parser


def _opts(args, **extra):
    return SolverOptions(alt_iters=args.alt_iters, w_max_iters=args.w_max_iters,
                         seed=args.seed, **extra)


def _cmd_denoise(args):
    noisy = read_pgm(args.input)
    clean = read_pgm(args.clean) if args.clean else None
    if clean is not None and clean.shape != noisy.shape:
        raise UsageError("--clean image size differs from --in")
    if args.patch_size > min(noisy.shape):
        raise UsageError("--patch-size exceeds the image size")
    params = RegParams(args.lam, args.gamma)
    out, report, result = denoise_image(
        noisy, args.method, params, args.d, _opts(args), args.oracle, clean=clean,
        patch_size=args.patch_size, stride=args.stride, tau=args.tau)
    write_pgm(args.out, out)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    if args.basis:
        write_pgm(args.basis, basis_tiles(result.basis, args.patch_size))
    if report.psnr_denoised is not None:
        print(f"{report.psnr_denoised:.2f}")


def _cmd_noise(args):
    write_pgm(args.out, add_noise(read_pgm(args.input), args.sigma, args.seed))


def _cmd_psnr(args):
    a, b = read_pgm(args.a), read_pgm(args.b)
    if a.shape != b.shape:
        raise UsageError("images differ in size")
    print(f"{psnr(a, b):.2f}")


def _cmd_train(args):
    X = read_csv_matrix(args.input)
    if args.method == "boosted":
        res = boosted_coding(X, RegParams(args.lam, args.gamma), args.oracle,
                             _opts(args, max_basis=args.d), OracleConfig())
    else:
        res = alternating_optimization(X, args.d, args.lam, _opts(args))
    if res.basis.shape[1]:
        write_csv_matrix(args.out, res.basis)
    else:
        open(args.out, "w").close()
    if args.weights and res.weights.shape[0]:
        write_csv_matrix(args.weights, res.weights)
    elif args.weights:
        open(args.weights, "w").close()
    if args.report:
        summary = {
            "method": args.method,
            "oracle": args.oracle if args.method == "boosted" else None,
            "lam": args.lam,
            "gamma": args.gamma if args.method == "boosted" else None,
            "d": args.d,
            "seed": args.seed,
            "basis_size": int(res.basis.shape[1]),
            "steps_taken": res.steps_taken,
            "stopped_early": res.stopped_early,
            "objective_trace": res.objective_trace,
            "provenance": res.provenance,
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    print(res.basis.shape[1])


COMMANDS = {"denoise": _cmd_denoise, "noise": _cmd_noise,
            "psnr": _cmd_psnr, "train": _cmd_train}


def run_cli(argv=None):
    """Run one command; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except SystemExit as e:  # --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except UsageError as e:
        print(str(e).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except (PGMError, CSVFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
