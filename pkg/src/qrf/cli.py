"""Command-line driver: every module as a subcommand with JSON/CSV output.

Exit codes: 2 for usage or input errors, 1 when a check fails, 0 otherwise.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, align, bounded, comm, resources, ssr_lift, twirl
from .group_rep import FIDELITY_PAYOFF, CyclicRep, couple_qubits, multiplicity
from .quantum_core import DensityOperator, StateVector, from_json, random_channel, random_state, to_json

SIG_DIGITS = 12


class UsageError(Exception):
    pass


def _round(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def jsonable(obj):
    """Convert numpy and package objects into plain JSON values with 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return _round(float(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not math.isfinite(x) else _round(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _round(obj.real), "im": _round(obj.imag)}
    if isinstance(obj, (StateVector, DensityOperator)):
        return json.loads(to_json(obj))
    return obj


def _dump_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([jsonable(x) for x in r])
    return buf.getvalue()


def _emit(args, summary: dict, series=None):
    """Print the JSON summary; the CSV series goes to --out, or to stdout with --format csv."""
    out = args.out
    fmt = args.format
    if out in ("csv", "json"):  # bare format word given to --out
        fmt, out = out, None
    if series is not None and out:
        Path(out).write_text(_csv_text(*series))
        summary = dict(summary, series_file=out)
    elif out:
        Path(out).write_text(_dump_json(summary) + "\n")
    if fmt == "csv" and series is not None and not out:
        sys.stdout.write(_csv_text(*series))
    else:
        sys.stdout.write(_dump_json(summary) + "\n")


def _load_state(path: str):
    try:
        return from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc


# ----------------------------------------------------------------------------
# subcommands


def cmd_twirl(args) -> int:
    state = _load_state(args.state)
    rho = state.density() if isinstance(state, StateVector) else state
    if args.group == "su2":
        n = args.n_qubits if args.n_qubits is not None else int(round(math.log2(rho.dim)))
        if 2 ** n != rho.dim:
            raise UsageError("state dimension is not a power of two")
        out = twirl.su2_twirl_qubits(rho, n)
        sectors = {str(b.label): float(np.real(np.trace(couple_qubits(n).to_coupled(rho.matrix)[b.start:b.stop,
                                                                                                 b.start:b.stop])))
                   for b in couple_qubits(n).blocks}
    else:
        out = twirl.u1_twirl(rho, np.diag(np.arange(rho.dim)))
        sectors = {str(n): float(np.real(rho.matrix[n, n])) for n in range(rho.dim)}
    _emit(args, {"group": args.group, "purity_in": rho.purity(), "purity_out": out.purity(),
                 "sector_weights": sectors, "twirled": out})
    return 0


def cmd_comm(args) -> int:
    if args.action == "capacity":
        rep = comm.dfs_report(args.n)
        rep["private_capacities"] = comm.private_capacities(args.n)
        rep["multiplicity_formula"] = {str(r["j"]): multiplicity(args.n, r["j"]) for r in rep["sectors"]}
        _emit(args, rep)
        return 0
    scheme = args.scheme
    if scheme == "bit2":
        states = [comm.encode_singlet_triplet_bit(b) for b in (0, 1)]
    elif scheme == "qubit3":
        states = [comm.encode_logical_qubit_3(StateVector(np.array([1, 0])), gauge="pure"),
                  comm.encode_logical_qubit_3(StateVector(np.array([0, 1])), gauge="pure")]
    elif scheme == "tetra":
        states = comm.tetrahedron_states()
    elif scheme == "eight":
        states = comm.eight_states_3qubits()
    else:
        states = comm.qkd_states()["four_qubit"]
    payload = {"scheme": scheme, "states": states}
    _emit(args, payload)
    return 0


def _signal_and_measurement(frame: str, n: int):
    if frame == "phase":
        opt = align.phase_fidelity_optimum(n)
        dec = align.phase_decomposition(n)
        return StateVector(opt.coefficients), align.fiducial_povm(dec), align.phase_payoff, opt.fbar
    if frame == "direction":
        opt = align.direction_fidelity_optimum(n)
        state, meas = align.direction_state(n, opt.coefficients)
        return state, meas, align.direction_payoff, opt.fbar
    opt = align.cartesian_fidelity_optimum(n)
    state, meas = align.cartesian_state(n, opt.coefficients)
    return state, meas, FIDELITY_PAYOFF, opt.fbar


def cmd_align(args) -> int:
    if args.action == "optimize":
        n = args.n
        if args.merit == "ml":
            dec = align.phase_decomposition(n) if args.frame == "phase" else couple_qubits(n)
            if args.frame == "direction":
                raise UsageError("maximum-likelihood optimization covers the phase and Cartesian frames")
            opt = align.max_likelihood_optimum(dec)
            ref = n + 1 if args.frame == "phase" else align.cartesian_mu_max_formula(n)
            _emit(args, {"frame": args.frame, "n": n, "merit": "ml", "mu_max": opt.mu_max, "analytic": ref,
                         "twirled_rank": align.twirled_rank(opt.state, dec)})
            return 0
        if args.frame == "phase":
            opt, ref = align.phase_fidelity_optimum(n), align.phase_fidelity_closed_form(n)
        elif args.frame == "direction":
            opt, ref = align.direction_fidelity_optimum(n), align.direction_fidelity_closed_form(n)
        else:
            opt, ref = align.cartesian_fidelity_optimum(n), None
        summary = {"frame": args.frame, "n": n, "merit": "fidelity", "fbar": opt.fbar,
                   "coefficients": opt.coefficients, "labels": opt.labels}
        if ref is not None:
            summary["analytic"] = ref
        _emit(args, summary)
        return 0
    if args.action == "simulate":
        state, meas, payoff, fbar = _signal_and_measurement(args.frame, args.n)
        run = align.simulate_alignment(state, meas, payoff, args.trials, rng_seed=args.seed)
        summary = {"frame": args.frame, "n": args.n, "trials": run.trials, "seed": run.seed,
                   "mean": run.mean, "stderr": run.stderr, "analytic": fbar}
        _emit(args, summary, (["trial", "payoff"], enumerate(run.payoffs)))
        return 0
    r = align.bitwise_phase_protocol(args.k, args.eps, args.theta, rng_seed=args.seed)
    _emit(args, {"k": args.k, "eps": args.eps, "theta": args.theta, "theta_estimate": r.theta_estimate,
                 "bits": r.bits, "repetitions_per_bit": r.repetitions, "qubit_count": r.qubit_count,
                 "analytic_qubit_count": align.repetitions_per_bit(args.k, args.eps) * (2 ** args.k - 1),
                 "success": r.success})
    return 0


def _parse_j(text: str) -> float:
    try:
        j = float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad spin value {text!r}") from exc
    if j <= 0 or (2 * j) != int(2 * j):
        raise UsageError("spin must be a positive half-integer")
    return j


def cmd_bounded(args) -> int:
    if args.action == "discriminate":
        j = _parse_j(args.j)
        r = bounded.discriminate_aligned(j)
        r.pop("povm")
        r.update(j=j, projector_form=bounded.p_success_projector_form(j),
                 target_form=bounded.p_success_closed_form(j))
        _emit(args, r)
        return 0
    if args.action == "degrade":
        j = _parse_j(args.j)
        c = bounded.degradation_curve(j, args.steps)
        err = float(np.max(np.abs(c["simulated"] - c["closed_form"])))
        _emit(args, {"j": j, "steps": args.steps, "max_error": err, "rate": bounded.degradation_rate(j)},
              (["n", "simulated", "closed_form"], zip(c["n"], c["simulated"], c["closed_form"])))
        return 0
    r = bounded.jc_gate_fidelity(math.sqrt(args.alpha2))
    _emit(args, {"alpha2": args.alpha2, "F_quantized": r["F_quantized"], "F_approx": r["F_approx"],
                 "difference": abs(r["F_quantized"] - r["F_approx"]), "leak": r["leak"], "n_cut": r["n_cut"],
                 "t": r["t"]})
    return 0


def cmd_lift(args) -> int:
    if args.d < 1 or args.d > 64:
        raise UsageError("d must lie in 1..64")
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        dim = int(rng.integers(2, 4))
        rep = CyclicRep(args.d, rng.integers(0, args.d, dim))
        rho = random_state([dim], rng)
        e = random_state([dim], rng).matrix
        e = e / np.max(np.linalg.eigvalsh(e))
        r = ssr_lift.invariant_born_check(rho, e, rep, random_channel(dim, 2, rng))
        worst = max(worst, abs(r["lhs"] - r["rhs"]))
    ok = worst < 1e-12
    _emit(args, {"group": f"Z_{args.d}", "trials": args.trials, "seed": args.seed, "max_error": worst,
                 "tolerance": 1e-12, "passed": ok})
    return 0 if ok else 1


def _local_numbers(state: StateVector, encoding: str):
    if len(state.dims) != 2:
        raise UsageError("resource measures need a bipartite state with dims [d_A, d_B]")
    out = []
    for d in state.dims:
        if encoding == "fock":
            out.append(np.arange(d))
        else:
            k = int(round(math.log2(d)))
            if 2 ** k != d:
                raise UsageError("mode encoding needs power-of-two local dimensions")
            out.append(resources.mode_numbers(k))
    return out


def cmd_resources(args) -> int:
    if args.action in ("siv", "essr"):
        state = _load_state(args.state)
        if not isinstance(state, StateVector):
            raise UsageError("resource measures need a pure state")
        na, nb = _local_numbers(state, args.encoding)
        if args.action == "siv":
            _emit(args, {"siv": resources.siv(state, na, nb)})
        else:
            _emit(args, {"e_ssr": resources.e_ssr_pure(state, na, nb)})
        return 0
    if args.protocol == "bitcommit":
        r = resources.bit_commitment_tokens()
        _emit(args, {"fidelity": r["fidelity"], "ssr_distinguishable": r["ssr_distinguishable"],
                     "pinch_difference": float(np.max(np.abs(r["pinched0"] - r["pinched1"]))),
                     "rho0": r["rho0"], "rho1": r["rho1"]})
        return 0
    r = resources.activate_refbit() if args.protocol == "activate" else resources.two_copy_distill()
    _emit(args, {"protocol": args.protocol, "success_probability": r["success_probability"],
                 "e_ssr_post": resources.e_ssr_pure(r["post_state"], r["number_a"], r["number_b"]),
                 "post_state": r["post_state"]})
    return 0


def cmd_suite(args) -> int:
    rows = acceptance.run_all(fast=args.fast)
    for r in rows:
        sys.stderr.write(r.line() + "\n")
    report = {"fast": args.fast, "passed": sum(r.passed for r in rows), "total": len(rows),
              "rows": [{"id": r.id, "name": r.name, "passed": r.passed, "measured": r.measured,
                        "expected": r.expected} for r in rows]}
    # wall-clock entries are excluded so identical runs give identical output
    for row in report["rows"]:
        row["measured"].pop("runtime_s", None)
    _emit(args, report)
    return 0 if all(r.passed for r in rows) else 1


# ----------------------------------------------------------------------------
# argument grammar


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=10000)
    common.add_argument("--out", default=None, help="output path (CSV series or JSON summary)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="qrf", description="Quantum reference frame toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("twirl", parents=[common], help="twirl a state over a group")
    t.add_argument("--group", choices=("su2", "u1"), default="su2")
    t.add_argument("--n-qubits", type=int, default=None)
    t.add_argument("--state", required=True)
    t.set_defaults(func=cmd_twirl)

    c = sub.add_parser("comm", help="frame-free communication codes")
    cs = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cc = cs.add_parser("capacity", parents=[common])
    cc.add_argument("--n", type=int, required=True)
    ce = cs.add_parser("encode", parents=[common])
    ce.add_argument("--scheme", choices=("bit2", "qubit3", "tetra", "eight", "qkd"), required=True)
    c.set_defaults(func=cmd_comm)

    a = sub.add_parser("align", help="reference-frame alignment")
    as_ = a.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ao = as_.add_parser("optimize", parents=[common])
    ao.add_argument("--frame", choices=("phase", "direction", "cartesian"), required=True)
    ao.add_argument("--n", type=int, required=True)
    ao.add_argument("--merit", choices=("ml", "fidelity"), default="fidelity")
    asim = as_.add_parser("simulate", parents=[common])
    asim.add_argument("--frame", choices=("phase", "direction", "cartesian"), default="phase")
    asim.add_argument("--n", type=int, default=2)
    ab = as_.add_parser("bitwise", parents=[common])
    ab.add_argument("--k", type=int, default=4)
    ab.add_argument("--eps", type=float, default=0.1)
    ab.add_argument("--theta", type=float, default=1.0)
    a.set_defaults(func=cmd_align)

    b = sub.add_parser("bounded", help="bounded reference frames")
    bs = b.add_subparsers(dest="action", required=True, parser_class=_Parser)
    bd = bs.add_parser("discriminate", parents=[common])
    bd.add_argument("--j", required=True)
    bg = bs.add_parser("degrade", parents=[common])
    bg.add_argument("--j", required=True)
    bg.add_argument("--steps", type=int, default=50)
    bj = bs.add_parser("jc", parents=[common])
    bj.add_argument("--alpha2", type=float, required=True)
    b.set_defaults(func=cmd_bounded)

    lf = sub.add_parser("lift", help="lifting a superselection rule")
    ls = lf.add_subparsers(dest="action", required=True, parser_class=_Parser)
    lb = ls.add_parser("born-check", parents=[common])
    lb.add_argument("--group", choices=("zd",), default="zd")
    lb.add_argument("--d", type=int, default=8)
    lb.set_defaults(trials=1000)
    lf.set_defaults(func=cmd_lift)

    r = sub.add_parser("resources", help="superselection-aware resources")
    rs = r.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("siv", "essr"):
        rp = rs.add_parser(name, parents=[common])
        rp.add_argument("--state", required=True)
        rp.add_argument("--encoding", choices=("fock", "modes"), default="fock",
                        help="fock: index is the photon number; modes: log2(d) modes with 0/1 photons")
    rd = rs.add_parser("demo", parents=[common])
    rd.add_argument("--protocol", choices=("activate", "distill", "bitcommit"), required=True)
    r.set_defaults(func=cmd_resources)

    s = sub.add_parser("suite", parents=[common], help="run all acceptance checks")
    s.add_argument("--fast", action="store_true")
    s.set_defaults(func=cmd_suite)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
