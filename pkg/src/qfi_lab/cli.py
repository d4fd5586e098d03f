"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 domain error or divergent QFI,
4 convergence failure.
"""

import argparse
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__, bitflip, depol, io, states
from .channels import VectorEncoding, assemble, bit_flip, depolarizing
from .errors import BracketError, ContractViolation, ConvergenceError, DomainError
from .qfi import check_continuous_commutativity, qfi

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def parse_grid(text):
    """``"0.3"`` -> [0.3]; ``"start:end:step"`` -> inclusive grid."""
    parts = text.split(":")
    try:
        vals = [float(x) for x in parts]
    except ValueError:
        raise UsageError(f"cannot parse p specification {text!r}") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise UsageError(f"p grid must be start:end:step, got {text!r}")
    start, end, step = vals
    if not step > 0:
        raise UsageError(f"grid step must be positive, got {step!r}")
    if end < start:
        raise UsageError(f"grid end {end!r} is below start {start!r}")
    n = int(math.floor((end - start) / step + 1e-9)) + 1
    # rounding keeps grid points such as 0.1 + 2*0.1 at their decimal value
    return np.round(start + step * np.arange(n), 12)


def single_p(text):
    grid = parse_grid(text)
    if grid.size != 1:
        raise UsageError("this command takes a single --p value")
    return float(grid[0])


def build_channel(args):
    if args.channel_json:
        src = args.channel_json
        path = Path(src)
        text = path.read_text() if path.exists() else src
        try:
            return VectorEncoding.from_json(text)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"bad channel JSON: {exc}") from None
    if args.channel == "bitflip":
        return bit_flip()
    if args.d is None or args.d < 2:
        raise UsageError("depolarizing channel needs --d >= 2")
    return depolarizing(args.d)


def parse_probe(spec, n, d):
    """Probe from a short specification string (see ``--help``)."""
    name, _, arg = spec.partition(":")
    dims = (d,) * n
    try:
        if name == "opt":
            key, _, val = arg.partition("=")
            if key != "theta" or (n, d) != (2, 2):
                raise UsageError("opt probe is opt:theta=<value> on two qubits")
            return bitflip.optimal_probe_state(float(val))
        if name == "schmidt":
            key, _, val = arg.partition("=")
            if key != "m" or n != 2:
                raise UsageError("schmidt probe is schmidt:m=<rank> on two parties")
            m = int(val)
            if not 1 <= m <= d:
                raise UsageError(f"Schmidt rank must lie in 1..{d}")
            return states.schmidt_probe(m, d)
        if name == "schmidt-coeffs":
            if n != 2:
                raise UsageError("schmidt-coeffs probe needs two parties")
            coeffs = [float(x) for x in arg.split(",")]
            if len(coeffs) > d or min(coeffs) < 0 or sum(coeffs) <= 0:
                raise UsageError("need at most d non-negative Schmidt coefficients")
            return states.schmidt_state(coeffs, d)
        if name == "basis":
            idx = int(arg)
            if not 0 <= idx < d**n:
                raise UsageError(f"basis index must lie in 0..{d**n - 1}")
            return states.basis_state(dims, idx)
        if name == "product":
            return states.product_zero(n, d)
        if name == "ghz":
            return states.ghz(n, d)
        if name == "w":
            return states.w_state(n, d)
        if name == "biprod":
            if d != 2 or n < 2:
                raise UsageError("biprod probe is defined for n >= 2 qubits")
            return states.bell_pairs(1, extra=n - 2)
    except ValueError as exc:
        if isinstance(exc, (ContractViolation, DomainError)):
            raise
        raise UsageError(f"bad probe specification {spec!r}: {exc}") from None
    raise UsageError(f"unknown probe {spec!r}")


def _emit(text, out):
    if io.write_text(out, text) is None:
        sys.stdout.write(text)


def _command_line(argv):
    return " ".join(argv) if argv else ""


# -- commands ------------------------------------------------------------------

def cmd_staircase(args, cmdline):
    if args.d is None or args.d < 2:
        raise UsageError("staircase needs --d >= 2")
    grid = parse_grid(args.p or "0.001:0.749:0.0005")
    if grid.size < 1 or grid[0] <= 0 or grid[-1] >= depol.P_MAX:
        raise UsageError("staircase grid must lie inside (0, 0.75)")
    pts = depol.staircase(args.d, grid)
    summary = depol.summarize(pts, args.d)
    if args.format == "json":
        doc = {
            "d": args.d,
            "attained": list(summary.attained),
            "m_star": summary.m_star,
            "non_increasing": summary.non_increasing,
            "transitions": [list(t) for t in summary.transitions],
            "points": [[pt.p, pt.m_opt, pt.qfi_opt, pt.entanglement] for pt in pts],
        }
        _emit(io.json_text(doc), args.out)
        return EXIT_OK
    cols = ["p", "m_opt", "qfi_opt", "entanglement"]
    rows = [(pt.p, pt.m_opt, pt.qfi_opt, pt.entanglement) for pt in pts]
    _emit(io.csv_text(cols, rows, cmdline, args.seed), args.out)
    if args.out and args.out != "-":
        gp = Path(args.out).with_suffix(".gp")
        io.write_text(gp, io.gnuplot_script(args.out, cols, "p", ["m_opt"], title=f"d = {args.d}",
                                             ylabel="optimal Schmidt rank"))
    return EXIT_OK


def cmd_qfi(args, cmdline):
    ch = build_channel(args)
    n = args.n or 1
    probe = parse_probe(args.probe or "product", n, ch.local_dim)
    p = single_p(args.p)
    rep = qfi(assemble(ch, n), probe, p, method=args.method)
    doc = dict(rep.to_dict(), p=p, channel=ch.name, n=n)
    _emit(io.json_text(doc), args.out)
    return EXIT_OK


def cmd_thresholds3q(args, cmdline):
    th = depol.three_qubit_thresholds()
    names = ("ghz_w", "w_biprod", "biprod_prod")
    if args.format == "json":
        doc = dict(zip(names, th.roots()))
        doc["intervals"] = [list(iv) for iv in th.intervals()]
        _emit(io.json_text(doc), args.out)
    else:
        rows = [(name, root) for name, root in zip(names, th.roots())]
        _emit(io.csv_text(["crossover", "p"], rows, cmdline, args.seed), args.out)
    return EXIT_OK


def cmd_bitflip(args, cmdline):
    p = single_p(args.p or "0.5")
    rows = bitflip.theta_sweep(p, args.n_theta)
    bound = 2.0 / (p * (1 - p))
    if args.format == "json":
        doc = {"p": p, "ceiling": bound, "rows": [list(r) for r in rows]}
        _emit(io.json_text(doc), args.out)
        return EXIT_OK
    cols = ["theta", "entanglement", "qfi"]
    _emit(io.csv_text(cols, rows, cmdline, args.seed), args.out)
    if args.out and args.out != "-":
        gp = Path(args.out).with_suffix(".gp")
        io.write_text(gp, io.gnuplot_script(args.out, cols, "theta", ["entanglement", "qfi"],
                                             title=f"p = {p:g}"))
    return EXIT_OK


def cmd_check_commute(args, cmdline):
    ch = build_channel(args)
    n = args.n or 2
    probe = parse_probe(args.probe or "product", n, ch.local_dim)
    grid = parse_grid(args.p or "0.3")
    for p in grid:
        ch.check_p(float(p))
    rep = check_continuous_commutativity(assemble(ch, n), probe, grid, tol=args.tol)
    _emit(io.json_text(rep.to_dict()), args.out)
    return EXIT_OK


def cmd_optimize(args, cmdline):
    from .optimizer import classify_probe, maximize_qfi

    ch = build_channel(args)
    n = args.n or 2
    p = single_p(args.p)
    res = maximize_qfi(assemble(ch, n), p, restarts=args.restarts, budget=args.budget, seed=args.seed)
    family = None
    if ch.local_dim == 2:
        family, score = classify_probe(res.best_state)
    else:
        score = None
    doc = {
        "p": p,
        "best_qfi": res.best_qfi,
        "family": family,
        "family_score": score,
        "amplitudes": io.amplitudes_json(res.best_state.amplitudes),
        "restarts_used": res.restarts_used,
        "converged": res.converged,
        "shortfall": res.shortfall,
        "seed": args.seed,
    }
    _emit(io.json_text(doc), args.out)
    return EXIT_OK if res.converged else EXIT_CONVERGENCE


COMMANDS = {
    "staircase": cmd_staircase,
    "qfi": cmd_qfi,
    "thresholds3q": cmd_thresholds3q,
    "bitflip": cmd_bitflip,
    "check-commute": cmd_check_commute,
    "optimize": cmd_optimize,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qfi-lab", description="Quantum Fisher information for noise estimation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomised steps")
    chan = argparse.ArgumentParser(add_help=False)
    chan.add_argument("--channel", choices=("depolarizing", "bitflip"), default="depolarizing")
    chan.add_argument("--channel-json", default=None, help="channel description (file or inline JSON)")
    chan.add_argument("--d", type=int, default=None, help="local dimension")
    chan.add_argument("--n", type=int, default=None, help="number of parties")
    probe_help = ("probe: product, ghz, w, biprod, basis:<i>, schmidt:m=<k>, "
                  "schmidt-coeffs:<a,b,...>, opt:theta=<t>")

    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("staircase", parents=[common], help="optimal Schmidt rank versus p")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--p", default=None, help="start:end:step")

    s = sub.add_parser("qfi", parents=[common, chan], help="QFI of a probe")
    s.add_argument("--probe", default=None, help=probe_help)
    s.add_argument("--p", required=True)
    s.add_argument("--method", choices=("spectral", "fidelity_fd", "commuting"), default="spectral")

    sub.add_parser("thresholds3q", parents=[common], help="three-qubit family crossovers")

    s = sub.add_parser("bitflip", parents=[common], help="theta sweep of the optimal bit-flip probe")
    s.add_argument("--p", default=None)
    s.add_argument("--n-theta", type=int, default=64)

    s = sub.add_parser("check-commute", parents=[common, chan], help="continuous-commutativity test")
    s.add_argument("--probe", default=None, help=probe_help)
    s.add_argument("--p", default=None, help="value or start:end:step")
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("optimize", parents=[common, chan], help="maximise QFI over pure probes")
    s.add_argument("--p", required=True)
    s.add_argument("--restarts", type=int, default=32)
    s.add_argument("--budget", type=int, default=20000, help="function evaluations per restart")
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    # these commands have no CSV form
    if args.command in ("qfi", "check-commute", "optimize"):
        args.format = "json"
    try:
        return COMMANDS[args.command](args, _command_line(argv))
    except UsageError as exc:
        print(f"qfi-lab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"qfi-lab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ContractViolation as exc:
        print(f"qfi-lab: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, BracketError) as exc:
        print(f"qfi-lab: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
