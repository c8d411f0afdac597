"""Command-line front end.

Every command reads one JSON document (``--in``, ``-`` for stdin) unless it
is a generator, and writes one JSON document to stdout. Exit codes: 0 on
success, 1 when an input violates a mathematical invariant, 2 on usage
errors and malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import jacobi, qstate, sc, separable
from .errors import PosParamError
from .matcore import Tolerances
from .serialize import (
    SchemaError,
    dumps,
    jacobi_from_json,
    jacobi_to_json,
    matrix_from_json,
    matrix_to_json,
    moments_from_json,
    moments_to_json,
    qubit_coords_from_json,
    qubit_coords_to_json,
    sc_from_json,
    sc_to_json,
    state_from_json,
    state_to_json,
    verdict_to_json,
)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would call sys.exit; route everything through run()
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--tol-psd", type=float, default=S, help="PSD eigenvalue tolerance")
    p.add_argument("--tol-rank", type=float, default=S, help="numerical rank tolerance")
    p.add_argument("--tol-recon", type=float, default=S, help="reconstruction tolerance")
    p.add_argument("--seed", type=int, default=S, help="random seed (default 0)")
    p.add_argument("--out", choices=("json", "csv"), default=S, help="output format")
    p.add_argument("--in", dest="inp", metavar="PATH", default=S, help="input file, '-' for stdin")
    return p


def _dims(text: str):
    try:
        m, n = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected M,N, got {text!r}")
    return m, n


def _index_set(text: str):
    try:
        return frozenset(int(x) - 1 for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = _Parser(prog="posparam", description="Parametrize PSD matrices and test separability of states.",
                  parents=[common])
    groups = top.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(sub, name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    g = groups.add_parser("sc", help="Schur-complement parametrization")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    leaf(sub, "extract", "matrix -> SC parameters")
    leaf(sub, "reconstruct", "SC parameters -> matrix")
    leaf(sub, "cholesky", "upper factor from SC parameters (or a matrix)")
    leaf(sub, "det", "determinant from SC parameters (or a matrix)")
    leaf(sub, "rank1", "rank-one test on SC parameters (or a matrix)")

    g = groups.add_parser("jacobi", help="near tri-diagonal parametrization")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    leaf(sub, "extract", "matrix -> Jacobi parameters")
    leaf(sub, "reconstruct", "Jacobi parameters -> matrix")
    leaf(sub, "cholesky", "factor from Jacobi parameters (or a matrix)")
    leaf(sub, "det", "determinant from Jacobi parameters (or a matrix)")
    leaf(sub, "hankel-to-j", "moments -> tri-diagonal J and s0")
    p = leaf(sub, "j-to-hankel", "tri-diagonal J and s0 -> moments")
    p.add_argument("--m", type=int, default=None, help="highest moment index (even)")

    g = groups.add_parser("state", help="density matrices")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, help_ in (("ppt", "partial transpose test"), ("kraus", "Kraus operators from SC Cholesky rows")):
        p = leaf(sub, name, help_)
        p.add_argument("--dims", type=_dims, default=None, help="M,N (overrides dim_a/dim_b)")
    leaf(sub, "qubit-coords", "qubit density matrix -> (s0, a1, b0)")
    leaf(sub, "qubit-from-coords", "(s0, a1, b0) -> qubit density matrix")

    g = groups.add_parser("sep", help="separable families and detectors")
    sub = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    kinds = [k.value for k in separable.PatternKind]
    for name, help_ in (("pattern", "pattern matrix"), ("gen-pattern", "random patterned state")):
        p = leaf(sub, name, help_)
        p.add_argument("--kind", choices=kinds, default="S1")
        p.add_argument("--n", type=int, default=None, help="size for GENERAL")
        p.add_argument("--i-s", type=_index_set, default=None, help="1-based I_s for GENERAL, e.g. 1,2")
        if name == "pattern":
            p.add_argument("--a", type=float, default=1.0)
            p.add_argument("--b", type=float, default=1.0)
            p.add_argument("--c", type=complex, default=1.0 + 0j, help="complex, e.g. 0.5+0.1j")
        else:
            p.add_argument("--k", type=int, default=2)
    p = leaf(sub, "gen-hankel", "random PSD Hankel state")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--points", type=int, default=3)
    for name, help_ in (("rank1-test", "rank-one Kraus test"), ("checklist", "3x3 parameter checklist")):
        p = leaf(sub, name, help_)
        p.add_argument("--dims", type=_dims, default=None)
    leaf(sub, "battery", "all detectors on a list of states")
    return top


def _tolerances(ns) -> Tolerances:
    base = Tolerances.from_env()
    return Tolerances(
        getattr(ns, "tol_psd", base.psd_eig_tol),
        getattr(ns, "tol_rank", base.rank_tol),
        getattr(ns, "tol_recon", base.recon_tol),
    )


def _read_json(ns, stdin):
    path = getattr(ns, "inp", "-")
    if path == "-":
        text = stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _family(ns) -> separable.PatternFamily:
    kind = separable.PatternKind(ns.kind)
    if kind is separable.PatternKind.GENERAL:
        if ns.n is None or ns.i_s is None:
            raise UsageError("GENERAL patterns need --n and --i-s")
        return separable.PatternFamily.general(ns.n, ns.i_s)
    return {
        separable.PatternKind.S1: separable.PatternFamily.s1,
        separable.PatternKind.S2: separable.PatternFamily.s2,
        separable.PatternKind.S3: separable.PatternFamily.s3,
        separable.PatternKind.SYMMETRIC_BLOCK: separable.PatternFamily.symmetric_block,
        separable.PatternKind.HANKEL: separable.PatternFamily.hankel,
    }[kind]()


def _sc_params(obj, tol):
    if isinstance(obj, dict) and "gammas" in obj:
        return sc_from_json(obj)
    return sc.sc_extract(matrix_from_json(obj), tol)


def _jacobi_params(obj, tol):
    if isinstance(obj, dict) and "s0" in obj and "a" in obj:
        return jacobi_from_json(obj)
    return jacobi.jacobi_extract(matrix_from_json(obj), tol)


def _state(obj, ns, tol):
    return state_from_json(obj, getattr(ns, "dims", None), tol)


def _dispatch(ns, tol, stdin):
    key = (ns.group, ns.cmd)
    seed = getattr(ns, "seed", 0)

    # generators take no input
    if key == ("sep", "pattern"):
        return matrix_to_json(separable.pattern_matrix(_family(ns), ns.a, ns.b, ns.c))
    if key == ("sep", "gen-pattern"):
        return state_to_json(separable.gen_pattern_state(_family(ns), ns.k, seed))
    if key == ("sep", "gen-hankel"):
        return state_to_json(separable.gen_hankel_state(ns.m, ns.points, seed))

    obj = _read_json(ns, stdin)
    if key == ("sc", "extract"):
        return sc_to_json(sc.sc_extract(matrix_from_json(obj), tol))
    if key == ("sc", "reconstruct"):
        return matrix_to_json(sc.sc_reconstruct(sc_from_json(obj)))
    if key == ("sc", "cholesky"):
        return matrix_to_json(sc.sc_cholesky(_sc_params(obj, tol)))
    if key == ("sc", "det"):
        return sc.sc_determinant(_sc_params(obj, tol)) + 0.0
    if key == ("sc", "rank1"):
        return sc.sc_is_rank_one(_sc_params(obj, tol), tol)

    if key == ("jacobi", "extract"):
        return jacobi_to_json(jacobi.jacobi_extract(matrix_from_json(obj), tol))
    if key == ("jacobi", "reconstruct"):
        return matrix_to_json(jacobi.jacobi_reconstruct(jacobi_from_json(obj)))
    if key == ("jacobi", "cholesky"):
        return matrix_to_json(jacobi.jacobi_cholesky(_jacobi_params(obj, tol)))
    if key == ("jacobi", "det"):
        return jacobi.jacobi_determinant(_jacobi_params(obj, tol)) + 0.0
    if key == ("jacobi", "hankel-to-j"):
        h = moments_from_json(obj)
        J, s0 = jacobi.tridiagonal_from_hankel(h, tol)
        return {"J": matrix_to_json(J), "s0": s0 + 0.0, "m": h.s.size - 1}
    if key == ("jacobi", "j-to-hankel"):
        if not isinstance(obj, dict) or "J" not in obj or "s0" not in obj:
            raise SchemaError("expected {\"J\": matrix, \"s0\": number}")
        J = matrix_from_json(obj["J"])
        m = ns.m if ns.m is not None else obj.get("m", 2 * (J.shape[0] - 1))
        if not isinstance(m, int) or m < 0 or m % 2:
            raise UsageError(f"--m must be a nonnegative even integer, got {m!r}")
        return moments_to_json(jacobi.hankel_from_tridiagonal(J, float(obj["s0"]), m))

    if key == ("state", "ppt"):
        s = _state(obj, ns, tol)
        out = verdict_to_json(qstate.ppt_verdict(s, tol))
        out["min_pt_eigenvalue"] = qstate.min_pt_eigenvalue(s) + 0.0
        return out
    if key == ("state", "kraus"):
        return [matrix_to_json(K) for K in qstate.kraus_from_state(_state(obj, ns, tol), tol).ops]
    if key == ("state", "qubit-coords"):
        return qubit_coords_to_json(qstate.qubit_to_jacobi(qstate.DensityMatrix(matrix_from_json(obj), tol), tol))
    if key == ("state", "qubit-from-coords"):
        return matrix_to_json(qstate.jacobi_to_qubit(qubit_coords_from_json(obj), tol).mat)

    if key == ("sep", "rank1-test"):
        return verdict_to_json(separable.rank1_kraus_test(_state(obj, ns, tol), tol))
    if key == ("sep", "checklist"):
        passed, detail = separable.checklist_3x3(_state(obj, ns, tol), tol)
        return {"passed": passed, "items": detail}
    if key == ("sep", "battery"):
        items = obj.get("states") if isinstance(obj, dict) else obj
        if not isinstance(items, list):
            raise SchemaError("expected a list of states or {\"states\": [...]}")
        return separable.run_detector_battery([state_from_json(x, None, tol) for x in items], tol)
    raise UsageError(f"unknown command {ns.group} {ns.cmd}")  # pragma: no cover


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        if any(a in ("-h", "--help") for a in argv):
            # help is the one path that may print and exit cleanly
            try:
                parser.parse_args(argv)
            except SystemExit:
                pass
            return EXIT_OK
        ns = parser.parse_args(argv)
        try:
            tol = _tolerances(ns)
        except (PosParamError, ValueError) as exc:
            raise UsageError(f"invalid tolerance: {exc}")
        out_fmt = getattr(ns, "out", "json")
        if out_fmt == "csv" and (ns.group, ns.cmd) != ("sep", "battery"):
            raise UsageError("--out csv is only available for 'sep battery'")
        result = _dispatch(ns, tol, stdin)
    except (UsageError, SchemaError) as exc:
        print(f"posparam: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except PosParamError as exc:
        print(f"posparam: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_DOMAIN
    if out_fmt == "csv":
        stdout.write(separable.report_to_csv(result))
    else:
        stdout.write(dumps(result) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
