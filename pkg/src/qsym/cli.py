"""Command-line surface: one subcommand per pipeline, stable exit codes.

Exit codes: 0 verdict positive or success, 1 verdict negative, 2 usage or
format error, 3 internal check failure.  Human text goes to stdout; with
``--json`` a machine report goes to stdout and the human text moves to
stderr.  Artifact texts (graphs, systems, configurations) go to stdout when
no ``--out`` path is given and no JSON was requested.

The only environment knob is QSYM_THREADS, capping the worker count of the
sampling pipeline; output is deterministic regardless of its value.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import coherent, construct, graphs, lbcs, qcert, symmetry

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _worker_count() -> int:
    raw = os.environ.get("QSYM_THREADS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            raise SystemExit(f"QSYM_THREADS must be an integer, got {raw!r}")
    return os.cpu_count() or 1


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_graph(path: str) -> graphs.Graph:
    return graphs.read_graph(_read_file(path))


class _Emitter:
    """Routes the three output streams per the --json / --out conventions."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.human: list[str] = []
        self.report: dict = {}
        self.artifacts: list[str] = []

    def say(self, line: str):
        self.human.append(line)

    def artifact(self, text: str, out_path: str | None, report_key: str):
        if out_path:
            Path(out_path).write_text(text)
            self.report[report_key + "_file"] = out_path
        else:
            self.report[report_key] = text
            if not self.as_json:
                self.artifacts.append(text)

    def finish(self, code: int) -> int:
        if self.as_json:
            print(json.dumps(self.report, sort_keys=True, separators=(",", ":")))
            for line in self.human:
                print(line, file=sys.stderr)
        else:
            if self.artifacts:
                for text in self.artifacts:
                    sys.stdout.write(text)
                for line in self.human:
                    print(line, file=sys.stderr)
            else:
                for line in self.human:
                    print(line)
        return code


# ---------------------------------------------------------------------------
# subcommands

def _cmd_wl(args) -> int:
    g = _load_graph(args.graph)
    config = coherent.wl_closure(g)
    check = coherent.verify_configuration(config)
    if not check.ok:
        print(f"internal check failure: {check.failure}", file=sys.stderr)
        return EXIT_INTERNAL
    em = _Emitter(args.json)
    em.report.update({
        "n": config.n, "classes": config.r,
        "discrete": coherent.is_discrete(config),
        "class_sizes": sorted(config.class_sizes),
    })
    em.say(f"n={config.n} classes={config.r} discrete={'yes' if coherent.is_discrete(config) else 'no'}")
    em.say("class sizes: " + " ".join(str(s) for s in sorted(config.class_sizes)))
    em.artifact(coherent.write_configuration(config), args.out, "configuration")
    return em.finish(EXIT_POSITIVE)


def _cmd_equiv(args) -> int:
    x, y = _load_graph(args.first), _load_graph(args.second)
    comp = coherent.wl_comparison(x, y)
    em = _Emitter(args.json)
    em.report["equivalent"] = comp.equivalent
    if comp.equivalent:
        cert = comp.certificate
        em.report.update({"classes": cert.r, "maps_edge_classes": cert.maps_edge_classes})
        em.say(f"equivalent: {cert.r} shared classes, adjacency classes "
               f"{'matched' if cert.maps_edge_classes else 'NOT matched'}")
        em.artifact(coherent.write_certificate(cert), args.out, "certificate")
        return em.finish(EXIT_POSITIVE)
    em.report["distinguished_round"] = comp.distinguished_round
    em.say(f"distinguished at round {comp.distinguished_round}")
    return em.finish(EXIT_NEGATIVE)


def _cmd_aut(args) -> int:
    g = _load_graph(args.graph)
    group = symmetry.automorphism_group(g)
    part = symmetry.orbitals(group)
    em = _Emitter(args.json)
    em.report.update({
        "order": group.order,
        "generators": [list(p.images) for p in group.generators],
        "orbits": [list(o) for o in part.orbits],
        "orbital_classes": part.orbital_count,
        "orbital_sizes": sorted(part.configuration.class_sizes),
    })
    em.say(f"order={group.order} generators={len(group.generators)} "
           f"orbits={len(part.orbits)} orbitals={part.orbital_count}")
    if args.haar:
        values = symmetry.haar_values(g, group=group)
        em.report["haar"] = {
            "orbital_values": {str(i): str(v) for i, v in sorted(values.orbital_values.items())},
            "orbit_values": {str(i): str(v) for i, v in sorted(values.orbit_values.items())},
            "averaging_checked": values.averaging_checked,
        }
        em.say("haar per orbital: " + " ".join(
            f"{i}:{v}" for i, v in sorted(values.orbital_values.items())))
        em.say("haar per orbit: " + " ".join(
            f"{i}:{v}" for i, v in sorted(values.orbit_values.items())))
        if not values.averaging_checked:
            em.say(f"averaging cross-check skipped (order {values.group_order} exceeds bound)")
    em.artifact(symmetry.write_generators(group), args.out, "generators")
    return em.finish(EXIT_POSITIVE)


def _cmd_gap(args) -> int:
    g = _load_graph(args.graph)
    gap = symmetry.configuration_gap(g)
    if not gap.refines:
        print("internal check failure: orbital partition does not refine the "
              "pair-refinement partition", file=sys.stderr)
        return EXIT_INTERNAL
    em = _Emitter(args.json)
    em.report.update({
        "wl_classes": gap.wl_classes,
        "orbital_classes": gap.orbital_classes,
        "tight": gap.tight,
        "split_classes": {str(k): list(v) for k, v in gap.split_classes.items()},
    })
    em.say(("tight" if gap.tight else "gap") +
           f": refinement classes={gap.wl_classes} orbital classes={gap.orbital_classes}")
    for k, os_ in gap.split_classes.items():
        em.say(f"  class {k} splits into orbitals {' '.join(str(o) for o in os_)}")
    return em.finish(EXIT_POSITIVE)


def _cmd_lbcs_sat(args) -> int:
    system = lbcs.read_lbcs(_read_file(args.file))
    result = lbcs.classical_solve(system)
    em = _Emitter(args.json)
    em.report["satisfiable"] = result.satisfiable
    if result.satisfiable:
        em.report["assignment"] = list(result.assignment)
        em.say("satisfiable: " + " ".join(str(b) for b in result.assignment))
        return em.finish(EXIT_POSITIVE)
    em.report["inconsistent_rows"] = list(result.inconsistent_rows)
    em.say("unsatisfiable: constraints " +
           " ".join(str(i) for i in result.inconsistent_rows) + " sum to 0 = 1")
    return em.finish(EXIT_NEGATIVE)


def _cmd_game_graph(args) -> int:
    system = lbcs.read_lbcs(_read_file(args.file))
    g = lbcs.game_graph(system, include_clique_edges=not args.no_cliques)
    em = _Emitter(args.json)
    em.report.update({"n": g.n, "m": g.m})
    em.say(f"game graph: {g.n} vertices, {g.m} edges"
           + (" (constraint cliques omitted)" if args.no_cliques else ""))
    em.artifact(graphs.write_graph(g), args.out, "graph")
    return em.finish(EXIT_POSITIVE)


def _cmd_arkhipov(args) -> int:
    z = _load_graph(args.graph)
    try:
        system = lbcs.arkhipov_lbcs(z, args.marked)
        verdict = lbcs.quantum_satisfiable_verdict(z)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    classical = lbcs.classical_solve(system)
    em = _Emitter(args.json)
    em.report.update({
        "n_vars": system.n_vars,
        "n_constraints": system.n_constraints,
        "classical_satisfiable": classical.satisfiable,
        "quantum_satisfiable": verdict.satisfiable,
        "note": verdict.note,
    })
    if not classical.satisfiable:
        em.report["inconsistent_rows"] = list(classical.inconsistent_rows)
    em.say(f"classical: {'SAT' if classical.satisfiable else 'UNSAT'}; "
           f"quantum: {'SAT' if verdict.satisfiable else 'UNSAT'} ({verdict.note})")
    em.artifact(lbcs.write_lbcs(system), args.out, "lbcs")
    return em.finish(EXIT_POSITIVE if verdict.satisfiable else EXIT_NEGATIVE)


def _cmd_construct(args) -> int:
    z = _load_graph(args.graph)
    try:
        report = construct.witness_pair(z, marked=args.marked, complemented=args.complement)
    except ValueError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    em = _Emitter(args.json)
    em.report.update(report.to_dict())
    for name, value in report.to_dict()["checks"].items():
        em.say(f"{name}: {'pass' if value else 'FAIL'}")
    em.say(f"all checks {'pass' if report.all_pass else 'FAIL'}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "first.graph").write_text(graphs.write_graph(report.first))
        (outdir / "second.graph").write_text(graphs.write_graph(report.second))
        (outdir / "union.graph").write_text(graphs.write_graph(report.union))
        (outdir / "first.labels").write_text(
            construct.write_parity_labels(report.first, report.base))
        (outdir / "second.labels").write_text(
            construct.write_parity_labels(report.second, report.base))
        if report.comparison.certificate is not None:
            (outdir / "equivalence.cert").write_text(
                coherent.write_certificate(report.comparison.certificate))
        (outdir / "report.json").write_text(
            json.dumps(report.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")
        em.report["output_dir"] = str(outdir)
    return em.finish(EXIT_POSITIVE if report.all_pass else EXIT_INTERNAL)


def _cmd_verify_mu(args) -> int:
    u = qcert.read_magic_unitary(_read_file(args.certificate))
    x, y = _load_graph(args.first), _load_graph(args.second)
    mu = qcert.check_magic_unitary(u, args.tol)
    em = _Emitter(args.json)
    em.report["magic_unitary"] = mu.residuals()
    em.report["magic_unitary_passed"] = mu.passed
    em.say("magic unitary residuals: " +
           " ".join(f"{k}={v:.3g}" for k, v in mu.residuals().items()))
    if not mu.passed:
        em.say("candidate is not a magic unitary")
        return em.finish(EXIT_NEGATIVE)
    iso = qcert.check_quantum_isomorphism(x, y, u, args.tol)
    em.report.update({
        "commutation": iso.commutation,
        "orthogonality": iso.orthogonality,
        "passed": iso.passed,
        "inconsistent": iso.inconsistent,
    })
    em.say(f"AU=UB residual {iso.commutation:.3g}; orthogonality residual {iso.orthogonality:.3g}")
    if iso.inconsistent:
        em.say("internal check failure: the two formulations disagree")
        return em.finish(EXIT_INTERNAL)
    em.say("verdict: " + ("pass" if iso.passed else "fail"))
    return em.finish(EXIT_POSITIVE if iso.passed else EXIT_NEGATIVE)


def _cmd_verify_opsol(args) -> int:
    sol = qcert.read_operator_solution(_read_file(args.certificate))
    system = lbcs.read_lbcs(_read_file(args.lbcs))
    if sol.n_vars != system.n_vars:
        print(f"error: solution has {sol.n_vars} operators, system has "
              f"{system.n_vars} variables", file=sys.stderr)
        return EXIT_USAGE
    report = qcert.check_operator_solution(system, sol, args.tol)
    em = _Emitter(args.json)
    em.report.update({
        "self_adjoint": report.self_adjoint,
        "involution": report.involution,
        "commutation": report.commutation,
        "product": report.product,
        "per_constraint_product": list(report.per_constraint_product),
        "passed": report.passed,
    })
    em.say(f"self-adjoint {report.self_adjoint:.3g}; involution {report.involution:.3g}; "
           f"commutation {report.commutation:.3g}; product {report.product:.3g}")
    em.say("verdict: " + ("pass" if report.passed else "fail"))
    return em.finish(EXIT_POSITIVE if report.passed else EXIT_NEGATIVE)


def _discrete_sample(task: tuple[int, int]) -> bool:
    n, seed = task
    return coherent.is_discrete(coherent.wl_closure(graphs.random_graph(n, seed)))


def _cmd_random_trivial(args) -> int:
    tasks = [(args.n, args.seed + i) for i in range(args.samples)]
    workers = min(_worker_count(), len(tasks)) or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(_discrete_sample, tasks, chunksize=8))
    else:
        flags = [_discrete_sample(t) for t in tasks]
    discrete = sum(flags)
    em = _Emitter(args.json)
    em.report.update({
        "n": args.n, "samples": args.samples, "seed": args.seed,
        "discrete": discrete,
        "fraction": discrete / args.samples,
    })
    em.say(f"{discrete}/{args.samples} samples have a discrete configuration "
           f"(fraction {discrete / args.samples})")
    return em.finish(EXIT_POSITIVE)


def _cmd_circulant_check(args) -> int:
    try:
        conn = {int(tok) for tok in args.set.replace(",", " ").split()}
        result = coherent.circulant_no_quantum_symmetry(args.n, conn)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    em = _Emitter(args.json)
    em.report.update({
        "n": args.n,
        "verdict": result.verdict.value,
        "classes": result.class_count,
        "expected_classes": result.expected_count,
    })
    em.say(f"{result.verdict.value}: {result.class_count} classes "
           f"(criterion needs {result.expected_count}, n != 4)")
    return em.finish(EXIT_POSITIVE if result.holds else EXIT_NEGATIVE)


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsym",
        description="Classical certificates for quantum symmetries of graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true",
                       help="machine report to stdout, human text to stderr")
        return p

    p = add("wl", _cmd_wl, "stable pair-refinement configuration of a graph")
    p.add_argument("graph")
    p.add_argument("--out", help="write the configuration file here")

    p = add("equiv", _cmd_equiv, "refinement equivalence of two graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--out", help="write the class-map certificate here")

    p = add("aut", _cmd_aut, "automorphism group, orbits and orbitals")
    p.add_argument("graph")
    p.add_argument("--haar", action="store_true", help="add exact invariant-state tables")
    p.add_argument("--out", help="write the generator file here")

    p = add("gap", _cmd_gap, "compare refinement classes with orbital classes")
    p.add_argument("graph")

    p = add("lbcs-sat", _cmd_lbcs_sat, "solve a binary constraint system over GF(2)")
    p.add_argument("file")

    p = add("game-graph", _cmd_game_graph, "graph of locally-satisfying assignments")
    p.add_argument("file")
    p.add_argument("--no-cliques", action="store_true",
                   help="omit edges inside each constraint's vertex set")
    p.add_argument("--out", help="write the graph file here")

    p = add("arkhipov", _cmd_arkhipov, "edge-variable parity system of a graph")
    p.add_argument("graph")
    p.add_argument("--marked", type=int, default=0, help="vertex with odd parity (default 0)")
    p.add_argument("--out", help="write the system file here")

    p = add("construct", _cmd_construct, "build and certify the parity game graph pair")
    p.add_argument("graph")
    p.add_argument("--marked", type=int, default=0)
    p.add_argument("--complement", action="store_true",
                   help="emit complements (connected witnesses)")
    p.add_argument("--out", help="directory for graphs, labels, certificates, report")

    p = add("verify-mu", _cmd_verify_mu, "check a magic unitary certificate for two graphs")
    p.add_argument("certificate")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--tol", type=float, default=qcert.DEFAULT_TOL)

    p = add("verify-opsol", _cmd_verify_opsol, "check an operator solution for a system")
    p.add_argument("certificate")
    p.add_argument("lbcs")
    p.add_argument("--tol", type=float, default=qcert.DEFAULT_TOL)

    p = add("random-trivial", _cmd_random_trivial,
            "fraction of G(n,1/2) samples with a discrete configuration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("circulant-check", _cmd_circulant_check,
            "class-count criterion for circulant graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--set", required=True, help="connection set, e.g. '1,6'")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except graphs.FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
