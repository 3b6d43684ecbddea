"""Command-line front end.

Every command reads JSON files, prints a report, and exits 0 when the check
or search fully succeeds, 1 when it fails with a report, and 2 on usage or
input errors. ``--json`` switches the report to sorted, deterministic JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bridge, fdrel, lincode, matroid, netgraph, solver
from .galois import FieldMatrix, matrix_from_json
from .netgraph import EdgeRef, NetworkProblem
from .reports import Report
from .tables import BudgetExceeded


class InputError(click.ClickException):
    exit_code = 2


def _load(path: str, what: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{what} {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} {path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _parse(path: str, what: str, parser):
    obj = _load(path, what)
    try:
        return parser(obj)
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        raise InputError(f"{what} {path}: {msg}") from None


def _problem(path: str, normalize: bool = True) -> NetworkProblem:
    P = _parse(path, "problem", netgraph.problem_from_json)
    if normalize:
        bad = [v for v in netgraph.validate(P) if v.kind != "MultiDemand"]
        if bad:
            raise InputError(f"problem {path}: invalid ({bad[0].kind}: {bad[0].detail}); run 'validate'")
        P = netgraph.normalize_multi_demand(P)
    return P


def _matrix_or_matroid(path: str) -> FieldMatrix:
    """A matrix literal, or a vector matroid wrapping one."""

    def parse(obj):
        if isinstance(obj, dict) and obj.get("kind") == "vector":
            if "matrix" not in obj:
                raise ValueError("matroid: missing field 'matrix'")
            return matrix_from_json(obj["matrix"])
        return matrix_from_json(obj)

    return _parse(path, "matrix", parse)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _finish(ok: bool, as_json: bool, payload: dict, text: str):
    click.echo(_dump(payload) if as_json else text)
    sys.exit(0 if ok else 1)


def _emit_report(rep: Report, as_json: bool, extra: dict | None = None):
    payload = rep.to_json()
    if extra:
        payload.update(extra)
    _finish(rep.passed, as_json, payload, rep.render())


json_flag = click.option("--json", "as_json", is_flag=True, help="Emit a JSON report.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Network computation problems, codes, matroids and FD-relations."""


@main.command()
@click.argument("problem", type=click.Path())
@json_flag
def validate(problem, as_json):
    """Check the structure of a problem file."""
    P = _problem(problem, normalize=False)
    viol = netgraph.validate(P)
    payload = {"subject": "problem", "passed": not viol,
               "violations": [{"kind": v.kind, "detail": v.detail} for v in viol]}
    text = "\n".join([f"problem: {'PASS' if not viol else 'FAIL'}"] + [f"  {v.kind}: {v.detail}" for v in viol])
    _finish(not viol, as_json, payload, text)


def _code_for(P: NetworkProblem, path: str):
    """Parse a linear code file; the problem is returned over the code's field."""

    def parse(obj):
        if isinstance(obj, dict) and isinstance(obj.get("q"), int):
            return lincode.code_from_json(obj, P.with_q(obj["q"]))
        return lincode.code_from_json(obj, P)

    code = _parse(path, "code", parse)
    return P.with_q(code.q), code


def _fill_decoders(P: NetworkProblem, code):
    missing = [j for j in range(1, len(P.sinks) + 1) if j not in code.decoders]
    if not missing:
        return code
    try:
        solved = lincode.solve_decoders(P, code)
    except ValueError:
        return code
    if solved is None:
        return code
    return code.with_decoders({**solved, **code.decoders})


@main.command("check-code")
@click.argument("problem", type=click.Path())
@click.argument("code", type=click.Path())
@json_flag
def check_code(problem, code, as_json):
    """Verify a scalar linear code, solving for missing decoders first."""
    P = _problem(problem)
    P, c = _code_for(P, code)
    try:
        c = _fill_decoders(P, c)
        rep = lincode.verify_code(P, c)
    except lincode.CodeError as exc:
        raise InputError(f"code {code}: {exc}") from None
    _emit_report(rep, as_json)


@main.command()
@click.argument("problem", type=click.Path())
@click.option("--q", "q", type=int, default=None, help="Alphabet size (default: the problem's).")
@click.option("--nonlinear", is_flag=True, help="Search arbitrary kernel tables instead of linear ones.")
@click.option("--budget-candidates", type=int, default=10_000_000, show_default=True)
@click.option("--budget-seconds", type=float, default=60.0, show_default=True)
@click.option("--mode", type=click.Choice(["exhaustive", "randomized"]), default="exhaustive", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@json_flag
def solve(problem, q, nonlinear, budget_candidates, budget_seconds, mode, seed, as_json):
    """Search for a scalar solution."""
    P = _problem(problem)
    budget = solver.SolveBudget(budget_candidates, budget_seconds, mode, seed)
    try:
        if nonlinear:
            if mode != "exhaustive":
                raise InputError("--nonlinear supports only --mode exhaustive")
            out = solver.solve_scalar_nonlinear_exhaustive(P, q, budget)
        else:
            out = solver.solve_scalar_linear(P, budget, q)
    except (solver.BudgetError, BudgetExceeded) as exc:
        raise InputError(f"budget: {exc}") from None
    except (lincode.CodeError, ValueError) as exc:
        raise InputError(f"problem {problem}: {exc}") from None
    if isinstance(out, solver.Solution):
        code = (fdrel.nonlinear_code_to_json(out.code) if nonlinear else lincode.code_to_json(out.code))
        payload = {**code, "provenance": out.provenance()}
        click.echo(_dump(payload))
        sys.exit(0)
    status = "unsolvable" if isinstance(out, solver.Unsolvable) else "unknown"
    payload = {"status": status, "q": out.q, "reason": out.reason,
               "provenance": {"mode": mode, "candidates_examined": out.candidates_examined,
                              "elapsed": round(out.elapsed, 6)}}
    _finish(False, as_json, payload, f"{status} over alphabet {out.q}: {out.reason} "
                                     f"({out.candidates_examined} candidates)")


@main.command("extract-matroid")
@click.argument("problem", type=click.Path())
@click.argument("code", type=click.Path())
@click.option("-o", "outputs", multiple=True, type=click.Path(),
              help="Write the matroid, then the map, to these files.")
@click.option("--merge-unit-demands", is_flag=True, help="Share message elements with unit demands.")
@json_flag
def extract_matroid(problem, code, outputs, merge_unit_demands, as_json):
    """Build the vector matroid and network-matroid map of a solving code."""
    P = _problem(problem)
    P, c = _code_for(P, code)
    try:
        c = _fill_decoders(P, c)
        M, f = bridge.matroid_from_code(P, c, merge_unit_demands)
    except lincode.CodeError as exc:
        click.echo(str(exc))
        sys.exit(1)
    if len(outputs) > 2:
        raise InputError("-o given more than twice (matroid, map)")
    payload = {"matroid": M.to_json(), "map": f.to_json()}
    for path, key in zip(outputs, ("matroid", "map")):
        Path(path).write_text(_dump(payload[key]) + "\n")
    click.echo(_dump(payload) if as_json or not outputs else f"wrote {', '.join(outputs)}")
    sys.exit(0)


@main.command("check-matroidal")
@click.argument("problem", type=click.Path())
@click.argument("matroid_file", metavar="MATROID", type=click.Path())
@click.argument("map_file", metavar="MAP", type=click.Path())
@json_flag
def check_matroidal(problem, matroid_file, map_file, as_json):
    """Check M1-M3, plus C1/C2 when the matroid is a vector matroid."""
    P = _problem(problem)
    M = _parse(matroid_file, "matroid", matroid.matroid_from_json)
    f = _parse(map_file, "map", bridge.NetworkMatroidMap.from_json)
    try:
        rep = bridge.check_matroidal(P, M, f)
    except IndexError as exc:
        raise InputError(f"map {map_file}: {exc}") from None
    if isinstance(M, matroid.VectorMatroid) and rep.passed:
        try:
            cv = bridge.check_representation_constraints(M.matrix, P.with_q(M.matrix.p), f)
        except (ValueError, lincode.CodeError) as exc:
            rep.fail("C1", "representation", str(exc))
        else:
            for msg in cv.failures:
                cond, _, detail = msg.partition(": ")
                rep.fail(cond, "representation", detail)
    _emit_report(rep, as_json)


@main.command("code-from-matroid")
@click.argument("problem", type=click.Path())
@click.argument("matrix_file", metavar="MATRIX", type=click.Path())
@click.argument("map_file", metavar="MAP", type=click.Path())
@click.option("-o", "output", type=click.Path(), help="Write the code here.")
@json_flag
def code_from_matroid(problem, matrix_file, map_file, output, as_json):
    """Derive a scalar linear code from a constrained representation."""
    P = _problem(problem)
    A = _matrix_or_matroid(matrix_file)
    f = _parse(map_file, "map", bridge.NetworkMatroidMap.from_json)
    try:
        code = bridge.code_from_representation(A, P.with_q(A.p), f)
    except (lincode.CodeError, ValueError, IndexError) as exc:
        click.echo(f"code-from-matroid: FAIL\n  {exc}")
        sys.exit(1)
    text = _dump(lincode.code_to_json(code))
    if output:
        Path(output).write_text(text + "\n")
        click.echo(text if as_json else f"wrote {output}")
    else:
        click.echo(text)
    sys.exit(0)


@main.command("fd-generators")
@click.argument("problem", type=click.Path())
@json_flag
def fd_generators(problem, as_json):
    """List the generator pairs (In(v), Out'(v)) and (In(t), {t})."""
    P = _problem(problem)
    G = fdrel.build_QE(P)
    rows = [{"label": p.label, "I": [str(e) for e in netgraph.canonical(p.I)],
             "J": [str(e) for e in netgraph.canonical(p.J)]} for p in G.pairs]
    if as_json:
        click.echo(_dump({"ground": [str(e) for e in G.ground], "generators": rows}))
    else:
        for r in rows:
            click.echo(f"{r['label']}: {{{', '.join(r['I'])}}} -> {{{', '.join(r['J'])}}}")


def _edge_list(text: str) -> list[EdgeRef]:
    out = []
    for part in filter(None, (s.strip() for s in text.split(","))):
        try:
            out.append(EdgeRef.parse(part))
        except ValueError as exc:
            raise InputError(f"--of: {exc}") from None
    return out


orientation_opt = click.option("--fd1-orientation", "orientation", type=click.Choice(fdrel.ORIENTATIONS),
                               default="consistent", show_default=True)


@main.command("fd-closure")
@click.argument("problem", type=click.Path())
@click.option("--of", "of", required=True, help="Comma-separated edges, e.g. x1,e2,e3.")
@orientation_opt
@json_flag
def fd_closure(problem, of, orientation, as_json):
    """Attribute closure of a set of edges under the network's FD-relation."""
    P = _problem(problem)
    G = fdrel.build_QE(P)
    I = _edge_list(of)
    unknown = [str(e) for e in I if e not in set(G.ground)]
    if unknown:
        raise InputError(f"--of: edges not in the network: {', '.join(unknown)}")
    cl = netgraph.canonical(fdrel.attr_closure(G, I, orientation))
    names = [str(e) for e in cl]
    if as_json:
        click.echo(_dump({"of": [str(e) for e in netgraph.canonical(I)], "closure": names,
                          "orientation": orientation}))
    else:
        click.echo(", ".join(names))


@main.command("check-fd-rep")
@click.argument("problem", type=click.Path())
@click.argument("phi_file", metavar="PHI", type=click.Path())
@click.option("--q", "q", type=int, default=None, help="Alphabet size (default: the phi file's).")
@json_flag
def check_fd_rep(problem, phi_file, q, as_json):
    """Check a functional representation exhaustively over all message tuples."""
    P = _problem(problem)
    q_file, K, phi = _parse(phi_file, "phi", fdrel.phi_from_json)
    if K != P.K:
        raise InputError(f"phi {phi_file}: K = {K} but the problem has {P.K} messages")
    try:
        rep = fdrel.check_functional_representation(P, phi, q or q_file)
    except BudgetExceeded as exc:
        raise InputError(f"budget: {exc}") from None
    _emit_report(rep, as_json)


@main.command("check-fd-axioms")
@click.argument("problem", type=click.Path())
@orientation_opt
@json_flag
def check_fd_axioms(problem, orientation, as_json):
    """Build the explicit closure of the generators and re-check FD1-FD3 on it."""
    P = _problem(problem)
    G = fdrel.build_QE(P)
    n = len(G.ground)
    if n > fdrel.MAX_EXPLICIT_GROUND:
        raise InputError(f"explicit closure limited to {fdrel.MAX_EXPLICIT_GROUND} edges, network has {n}")
    masks, _ = fdrel.generators_to_masks(G)
    Q = fdrel.explicit_closure(masks, n, orientation)
    viol = fdrel.check_fd_axioms(Q, n, orientation)
    rep = Report("FD-relation")
    for v in viol:
        rep.fail(v.axiom, "closure", str(v))
    rep.info = {"pairs": len(Q), "ground": n, "orientation": orientation}
    _emit_report(rep, as_json)


@main.command("check-matroid-axioms")
@click.argument("matroid_file", metavar="MATROID", type=click.Path())
@click.option("--limit", type=int, default=100, show_default=True)
@json_flag
def check_matroid_axioms(matroid_file, limit, as_json):
    """Exhaustively check R1-R3 on a matroid's rank function."""
    M = _parse(matroid_file, "matroid", matroid.matroid_from_json)
    try:
        viol = matroid.check_rank_axioms(M, limit)
    except matroid.GroundTooLarge as exc:
        raise InputError(f"matroid {matroid_file}: {exc}") from None
    rep = Report("rank axioms")
    for v in viol:
        rep.fail(v.axiom, "rank function", str(v),
                 {"A": list(v.A), "B": None if v.B is None else list(v.B)})
    _emit_report(rep, as_json)


def _phi_map(obj) -> dict[int, int]:
    if isinstance(obj, dict) and "phi" in obj:
        obj = obj["phi"]
    if not isinstance(obj, dict):
        raise ValueError("map: expected an object of element -> column")
    try:
        return {int(k): int(v) for k, v in obj.items()}
    except (TypeError, ValueError):
        raise ValueError("map: keys and values must be integers") from None


@main.command("check-representation")
@click.argument("matroid_file", metavar="MATROID", type=click.Path())
@click.argument("matrix_file", metavar="MATRIX", type=click.Path())
@click.argument("map_file", metavar="MAP", type=click.Path(), required=False)
@json_flag
def check_representation(matroid_file, matrix_file, map_file, as_json):
    """Compare matroid rank with column rank on every subset.

    MAP sends ground elements to column indices; identity when omitted.
    """
    M = _parse(matroid_file, "matroid", matroid.matroid_from_json)
    A = _matrix_or_matroid(matrix_file)
    phi = _parse(map_file, "map", _phi_map) if map_file else {i: i for i in range(1, M.n + 1)}
    try:
        claim = matroid.RepresentationClaim(M, A, phi)
        verdict = matroid.is_representation(claim)
    except (ValueError, matroid.GroundTooLarge) as exc:
        raise InputError(str(exc)) from None
    rep = Report("representation")
    if not verdict.ok:
        rep.fail("rank", f"subset {list(verdict.witness)}",
                 f"matroid rank {verdict.expected}, column rank {verdict.got}", list(verdict.witness))
    _emit_report(rep, as_json)


if __name__ == "__main__":  # pragma: no cover
    main()
