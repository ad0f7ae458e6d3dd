"""Command-line front end.

    qcollide thermalize    --phi 0.3 --theta 0.1 --p 0.8 --d 0 --n 50
    qcollide channel-info  --phi 0.01 --theta 0.005 --p 0.7 --tau0 1e-4
    qcollide entangle      --c1 1 --phi 0.6 --n-max 6 --brute-force
    qcollide scramble      --method closed --c0 0 --phi 0.3 --n 10..100
    qcollide verify        --filter entanglement

Every command writes one table (CSV by default, JSON with ``--format json``)
to stdout or ``--output``. Exit codes: 0 success, 1 verification failure,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__, channel, entanglement, irreversibility, verify
from .bathsim import simulate_sparse_T0
from .channel import BathSpec, CanonicalChannelParams, QubitState

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NORM_TOL = 1e-9


class UsageError(Exception):
    """Invalid flags or physically invalid inputs; exit code 2."""


class VerificationFailure(Exception):
    """An internal consistency check failed; exit code 1."""


@dataclass
class ResultTable:
    columns: dict[str, list] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged table: column lengths {lengths}")

    @property
    def num_rows(self) -> int:
        return len(next(iter(self.columns.values()), []))

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("# " + json.dumps(self.meta, sort_keys=True) + "\n")
        out.write(",".join(self.columns) + "\n")
        cols = list(self.columns.values())
        for i in range(self.num_rows):
            out.write(",".join(_fmt(col[i]) for col in cols) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "columns": self.columns}, sort_keys=False) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def read_csv(text: str) -> ResultTable:
    """Parse a table written by :meth:`ResultTable.to_csv`."""
    lines = text.splitlines()
    meta = json.loads(lines[0][2:])
    names = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:] if line]
    columns = {}
    for j, name in enumerate(names):
        raw = [r[j] for r in rows]
        try:
            columns[name] = [float(v) for v in raw]
        except ValueError:
            columns[name] = raw
    return ResultTable(columns, meta)


# -- argument handling ------------------------------------------------------


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _n_range(text: str) -> list[int]:
    """``"6"``, ``"10..100"`` or ``"10..100:5"`` (inclusive)."""
    try:
        if ".." not in text:
            return [int(text)]
        lo, rest = text.split("..", 1)
        hi, _, step = rest.partition(":")
        values = list(range(int(lo), int(hi) + 1, int(step or 1)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty n range {text!r}")
    return values


def _resolve_bath(args) -> BathSpec:
    if args.beta_e is not None:
        return BathSpec.from_beta_e(args.beta_e)
    try:
        return BathSpec(1.0 if args.p is None else args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _resolve_amplitudes(args) -> tuple[complex, complex]:
    c0, c1 = args.c0, args.c1
    if c0 is None and c1 is None:
        c0, c1 = 0j, 1 + 0j
    elif c0 is None or c1 is None:
        given = c1 if c0 is None else c0
        if abs(given) > 1 + NORM_TOL:
            raise UsageError(f"amplitude {given} has modulus above 1")
        other = math.sqrt(max(1 - abs(given) ** 2, 0.0))
        c0, c1 = (other, given) if c0 is None else (given, other)
    norm2 = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm2 - 1) > NORM_TOL:
        raise UsageError(f"|c0|^2 + |c1|^2 = {norm2!r}, expected 1 within {NORM_TOL}")
    scale = 1 / math.sqrt(norm2)
    return complex(c0) * scale, complex(c1) * scale


def _params(args) -> CanonicalChannelParams:
    try:
        return CanonicalChannelParams(args.phi, args.theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _jsonable(value):
    return str(value) if isinstance(value, complex) else value


def _base_meta(args, **resolved) -> dict:
    skip = {"func", "output", "format", "command", "n_values"}
    raw = {k: _jsonable(v) for k, v in vars(args).items() if k not in skip and v is not None}
    return {
        "tool": "qcollide",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "args": raw,
        "resolved": {k: _jsonable(v) for k, v in resolved.items()},
    }


# -- commands ---------------------------------------------------------------


def cmd_thermalize(args) -> ResultTable:
    bath = _resolve_bath(args)
    params = _params(args)
    try:
        state = QubitState(args.d, complex(args.k_re, args.k_im))
    except ValueError as exc:
        raise UsageError(f"invalid initial state: {exc}") from None
    if args.n < 0:
        raise UsageError("n must be non-negative")
    try:
        traj = channel.iterate_channel(state, params, bath, args.n, check_tol=1e-12)
    except RuntimeError as exc:
        raise VerificationFailure(str(exc)) from None
    cols = {"n": [], "d": [], "re_k": [], "im_k": [], "abs_k": [], "dist_to_xi": []}
    for n, st in traj:
        cols["n"].append(n)
        cols["d"].append(st.d)
        cols["re_k"].append(st.k.real)
        cols["im_k"].append(st.k.imag)
        cols["abs_k"].append(abs(st.k))
        cols["dist_to_xi"].append(st.distance_to(bath))
    return ResultTable(cols, _base_meta(args, p=bath.p))


def cmd_channel_info(args) -> ResultTable:
    bath = _resolve_bath(args)
    params = _params(args)
    if not args.tau0 > 0:
        raise UsageError("tau0 must be positive")
    lam = channel.lambda_of(params, bath)
    t1 = args.tau0 / params.phi**2 if params.phi else math.inf
    t_pf = args.tau0 / (2 * params.theta**2) if params.theta else math.inf
    rates = channel.continuous_time(t1, t_pf, bath, args.tau0)
    inv_t2 = 1 / (2 * t1) + bath.p * bath.q / t_pf
    prod_res, comm_res = channel.decomposition_residuals(params)
    row = {
        "lambda_re": lam.real,
        "lambda_im": lam.imag,
        "lambda_abs": abs(lam),
        "coherence_factor": abs(lam) * math.cos(params.phi),
        "T1": t1,
        "T_pf": t_pf,
        "T2": rates.T2,
        "inv_T2_residual": (1 / rates.T2 if rates.T2 else math.inf) - inv_t2,
        "cos_phi_bound": math.cos(params.phi),
        "decomposition_residual": prod_res,
        "commutation_residual": comm_res,
        "fixed_point_deviation": channel.verify_fixed_point(channel.build_canonical(params), bath),
    }
    return ResultTable({k: [v] for k, v in row.items()}, _base_meta(args, p=bath.p))


def cmd_entangle(args) -> ResultTable:
    if args.beta_e is not None or (args.p is not None and args.p != 1.0):
        raise UsageError("entangle is defined at zero temperature only (p = 1)")
    c0, c1 = _resolve_amplitudes(args)
    params = _params(args)
    if args.n_min < 1 or args.n_max < args.n_min:
        raise UsageError("need 1 <= n-min <= n-max")
    if args.brute_force and args.n_max + 1 > entanglement.BRUTE_FORCE_LIMIT:
        raise UsageError(
            f"brute force limited to {entanglement.BRUTE_FORCE_LIMIT} qubits (n-max <= {entanglement.BRUTE_FORCE_LIMIT - 1})"
        )
    c = math.cos(params.phi)
    cols = {"n": [], "E_closed": [], "E_no_overlap": []}
    if args.brute_force:
        cols["E_bruteforce"] = []
    cols["ghz_reference"] = []
    for n in range(args.n_min, args.n_max + 1):
        cols["n"].append(n)
        cols["E_closed"].append(entanglement.entanglement_closed_form(abs(c1), c, n).value)
        cols["E_no_overlap"].append(entanglement.entanglement_no_overlap_form(abs(c1), c, n).value)
        if args.brute_force:
            psi = simulate_sparse_T0(c0, c1, params, n).to_dense()
            cols["E_bruteforce"].append(entanglement.entanglement_bruteforce(psi).value)
        cols["ghz_reference"].append(entanglement.ghz_reference(n))
    if args.brute_force:
        gap = max(abs(a - b) for a, b in zip(cols["E_closed"], cols["E_bruteforce"]))
        if gap > verify.ENTANGLEMENT_TOL:
            raise VerificationFailure(f"closed form and brute force differ by {gap:.3g}")
    return ResultTable(cols, _base_meta(args, c0=c0, c1=c1))


def _scramble_point(args, method, c0, c1, params, n) -> irreversibility.AverageFidelity:
    c = math.cos(params.phi)
    ir = irreversibility
    if method in ("exact", "closed", "asymptotic") and params.theta != 0:
        raise UsageError(f"method {method!r} requires theta = 0; use montecarlo or simulate")
    if method == "exact":
        if n > ir.ENUMERATION_LIMIT:
            raise UsageError(f"exact enumeration limited to n <= {ir.ENUMERATION_LIMIT}")
        return ir.average_fidelity_exact(c0, c1, c, n)
    if method == "closed":
        return ir.average_fidelity_closed(c0, c1, c, n)
    if method == "asymptotic":
        if abs(c0) > 0 or n < 2 or c >= 1:
            raise UsageError("asymptotic form needs c0 = 0, n >= 2 and phi > 0")
        return ir.average_fidelity_asymptotic(c, n)
    route = "simulate" if method == "simulate" else "auto"
    try:
        return ir.average_fidelity_montecarlo(
            c0, c1, params, n, args.samples, args.seed, workers=args.workers, route=route
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_scramble(args) -> ResultTable:
    c0, c1 = _resolve_amplitudes(args)
    params = _params(args)
    if min(args.n_values, default=0) < 1:
        raise UsageError("n must be at least 1")
    if args.samples < 1:
        raise UsageError("samples must be at least 1")
    cols = {"n": [], "F_mean": [], "std_error": [], "method": []}
    for n in args.n_values:
        res = _scramble_point(args, args.method, c0, c1, params, n)
        cols["n"].append(n)
        cols["F_mean"].append(res.mean)
        cols["std_error"].append(res.std_error)
        cols["method"].append(res.method)
    return ResultTable(cols, _base_meta(args, c0=c0, c1=c1, n=args.n_values))


def _worst_ratio(result: verify.CheckResult) -> float:
    """Largest measured/tolerance ratio; inf when the check crashed."""
    if not result.measurements:
        return math.inf
    return max(v / t if t else float(v > 0) for _, v, t in result.measurements)


def cmd_verify(args) -> tuple[ResultTable, bool]:
    checks = verify.select(args.filter)
    if not checks:
        raise UsageError(f"no checks match filter {args.filter!r}")
    try:
        results = verify.run_all(args.filter, seed=args.seed, full=args.full, perturbation=args.perturb)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for r in results:
        print(r.line(), file=sys.stderr)
    cols = {
        "check": [r.name for r in results],
        "passed": [r.passed for r in results],
        "worst_ratio": [_worst_ratio(r) for r in results],
    }
    return ResultTable(cols, _base_meta(args)), all(r.passed for r in results)


# -- parser -----------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", metavar="PATH", help="write the table here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, default=0, help="random seed (unsigned 64-bit)")
    return common


def _add_temperature(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p", type=float, help="ground-state weight of the bath qubit (default 1)")
    g.add_argument("--beta-e", type=float, help="beta*E; p = (1 + tanh(beta*E)) / 2")


def _add_angles(p: argparse.ArgumentParser, phi_required=True):
    p.add_argument("--phi", type=float, required=phi_required, help="swap angle in [0, pi/2]")
    p.add_argument("--theta", type=float, default=0.0, help="dephasing angle")


def _add_amplitudes(p: argparse.ArgumentParser):
    p.add_argument("--c0", type=_complex, help="amplitude of |0>, e.g. 0.6 or 0.6+0.2j")
    p.add_argument("--c1", type=_complex, help="amplitude of |1>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcollide", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"qcollide {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("thermalize", parents=[common], help="closed-form relaxation trajectory")
    _add_angles(p)
    _add_temperature(p)
    p.add_argument("--d", type=float, default=0.0, help="initial population of |0>")
    p.add_argument("--k-re", type=float, default=0.0)
    p.add_argument("--k-im", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True, help="number of collisions")
    p.set_defaults(func=cmd_thermalize)

    p = sub.add_parser("channel-info", parents=[common], help="lambda, relaxation times, self-checks")
    _add_angles(p)
    _add_temperature(p)
    p.add_argument("--tau0", type=float, default=1.0, help="duration of one collision")
    p.set_defaults(func=cmd_channel_info)

    p = sub.add_parser("entangle", parents=[common], help="multipartite entanglement growth at T=0")
    _add_angles(p)
    _add_temperature(p)
    _add_amplitudes(p)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--brute-force", action="store_true", help="add the bipartition-sum column")
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("scramble", parents=[common], help="reconstruction fidelity after relabelling the bath")
    _add_angles(p)
    _add_amplitudes(p)
    p.add_argument("--method", choices=["exact", "closed", "asymptotic", "montecarlo", "simulate"], default="closed")
    p.add_argument("--n", dest="n_text", required=True, help="N, LO..HI or LO..HI:STEP")
    p.add_argument("--samples", type=int, default=10_000, help="Monte Carlo samples per n")
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo (result is unchanged)")
    p.set_defaults(func=cmd_scramble)

    p = sub.add_parser("verify", parents=[common], help="run the cross-check suite")
    p.add_argument("--filter", help="suite name or substring of check names")
    p.add_argument("--full", action="store_true", help="acceptance-scale sample sizes")
    p.add_argument(
        "--perturb",
        choices=sorted(verify.PERTURBATIONS),
        help="testing hook: inject a known error so that checks must fail",
    )
    p.set_defaults(func=cmd_verify)
    return parser


def argv_from_meta(meta: dict) -> list[str]:
    """Command line that reproduces a table from its metadata block."""
    parser = build_parser()
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    flags = {a.dest: a.option_strings[0] for a in sub.choices[meta["command"]]._actions if a.option_strings}
    argv = [meta["command"]]
    for dest, value in meta["args"].items():
        if value is False:
            continue
        argv.append(flags[dest])
        if value is not True:
            argv.append(str(value))
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n_text", None) is not None:
        try:
            args.n_values = _n_range(args.n_text)
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    status = EXIT_OK
    try:
        result = args.func(args)
        if isinstance(result, tuple):
            table, ok = result
            status = EXIT_OK if ok else EXIT_FAIL
        else:
            table = result
    except UsageError as exc:
        print(f"qcollide {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailure as exc:
        print(f"qcollide {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = table.to_json() if args.format == "json" else table.to_csv()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
