"""Command-line front end.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 on usage, parse or construction errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import structfile
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _settings(args, data: dict | None = None):
    data = data or {}
    seed = args.seed if args.seed is not None else int(data.get("seed", 0))
    samples = args.samples if args.samples is not None else int(data.get("samples", 200))
    return seed, samples


def _dgca(args, data: dict):
    from .current_algebra import DGCA

    preset = args.dgca or data.get("dgca")
    if not preset:
        raise UsageError("no dgca given (use --dgca laurent:k,N or derham:m, or a 'dgca' field)")
    try:
        return DGCA.parse(preset, window=args.window)
    except ValueError as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# commands; each returns a list of reports (and may print extra output)


def cmd_check(args, out):
    from .courant_dorfman import check_axioms
    from .lambda_bracket import check_lca, check_pva, weak_cd_from_lca

    data = structfile.load(args.file)
    seed, samples = _settings(args, data)
    if args.kind == "cd":
        cd = structfile.to_cd(data)
        rep = check_axioms(cd, samples=samples, seed=seed)
        for issue in cd.issues:
            rep.data.setdefault("issues", []).append(issue)
        return [rep]
    W = structfile.to_lca(data)
    if args.kind == "pva":
        return [check_pva(W, samples=samples, seed=seed)]
    if args.kind == "lca":
        return [check_lca(W, samples=samples, seed=seed)]
    return [weak_cd_from_lca(W, samples=samples, seed=seed)]


def cmd_build(args, out):
    from .courant_dorfman import roundtrip_report, to_theta
    from .symplectic import check_master_equation

    data = structfile.load(args.file)
    cd = structfile.to_cd(data)
    chart, theta = to_theta(cd)
    emitted = structfile.dumps(structfile.from_chart(chart, theta, name=data.get("name", "")))
    reports = [roundtrip_report(cd)] if args.roundtrip else [check_master_equation(chart, theta)]
    reports[0].data["theta"] = str(theta)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(emitted)
    else:
        # the chart file owns stdout; reports go to stderr
        sys.stdout.write(emitted)
        out.stream = sys.stderr
    return reports


def cmd_from_theta(args, out):
    from .courant_dorfman import check_axioms, from_symplectic, roundtrip_report
    from .symplectic import check_master_equation

    data = structfile.load(args.file)
    seed, samples = _settings(args, data)
    chart, theta = structfile.to_chart(data)
    rep = check_master_equation(chart, theta)
    reports = [rep]
    if not rep.passed:
        return reports
    cd = from_symplectic(chart, theta, name=data.get("name", ""))
    emitted = structfile.dumps(structfile.from_cd(cd))
    if args.roundtrip:
        reports.append(roundtrip_report(cd))
    else:
        reports.append(check_axioms(cd, samples=samples, seed=seed))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(emitted)
    else:
        sys.stdout.write(emitted)
        out.stream = sys.stderr
    return reports


def cmd_bracket(args, out):
    data = structfile.load(args.file)
    cd = structfile.to_cd(data)
    a = structfile.parse_expression(args.e1, cd.table)
    b = structfile.parse_expression(args.e2, cd.table)
    rep = Report("bracket")
    rep.data["bracket"] = str(cd.bracket(a, b))
    rep.data["pairing"] = str(cd.pair(a, b))
    if not args.machine:
        print(f"[{a}, {b}] = {rep.data['bracket']}")
        print(f"<{a}, {b}> = {rep.data['pairing']}")
        out.quiet = True
    return [rep]


def cmd_lambda(args, out):
    data = structfile.load(args.file)
    W = structfile.to_lca(data)
    a = structfile.parse_expression(args.e1, W.table)
    b = structfile.parse_expression(args.e2, W.table)
    lb = W.lambda_bracket(a, b)
    rep = Report("lambda bracket")
    rep.data["lambda"] = str(lb)
    rep.data["coefficients"] = [str(lb.coefficient(j, W.table)) for j in range(2)]
    if not args.machine:
        print(f"{{{a} _L {b}}} = {lb}")
        out.quiet = True
    return [rep]


def cmd_current(args, out):
    from .current_algebra import (
        check_lie_quotient,
        check_poisson_quotient,
        formal_bracket_identity,
        lie_quotient,
        physical_subalgebra_report,
        poisson_quotient,
        tensor_lca,
        tensor_sampler,
    )
    from .lambda_bracket import check_lca

    data = structfile.load(args.file)
    seed, samples = _settings(args, data)
    E = _dgca(args, data)
    C = structfile.to_lca(data)
    W = tensor_lca(C, E)
    tt = W.tensor
    if not args.check:
        rep = Report(f"current algebra {W.name}")
        rep.data["generators"] = [f"{g.name}:{g.degree}" for g in tt.table]
        rep.data["dgca"] = E.name
        return [rep]
    reports = [E.check()]
    reports.append(check_lca(W, samples=samples, seed=seed, sampler=tensor_sampler(W), admissible=tt.admissible))
    reports.append(check_lie_quotient(lie_quotient(W), samples=min(samples, 100), seed=seed))
    reports.append(check_poisson_quotient(poisson_quotient(W), samples=min(samples, 100), seed=seed))
    if E.kind == "laurent" and E.k == 1 and C.n == 2 and "lambda" not in data:
        reports.append(physical_subalgebra_report(structfile.to_cd(data), N=E.window))
    if E.kind == "laurent" and E.k == 1 and C.n == 2:
        reports.append(formal_bracket_identity(C, N=min(E.window, 5), k=1))
    return reports


def cmd_reduce(args, out):
    from .courant_dorfman import to_theta
    from .current_algebra import (
        ZeroLocusError,
        bfv_differential,
        check_zero_locus,
        poisson_tensor,
        zero_locus_physical_report,
        zero_locus_reduce,
    )
    from .graded_algebra import Derivation

    data = structfile.load(args.file)
    seed, samples = _settings(args, data)
    if not args.dgca and "dgca" not in data:
        args.dgca = "laurent:1,6"
    E = _dgca(args, data)
    cd = structfile.to_cd(data)
    chart, theta = to_theta(cd)
    P, tt = poisson_tensor(chart, E)
    if args.z == "bfv":
        Z = bfv_differential(P, theta)
    elif args.z == "zero":
        Z = Derivation(tt.table, 1, {})
    else:
        raise UsageError(f"unknown differential {args.z!r}; choose bfv or zero")
    try:
        Zl = zero_locus_reduce(P, Z, samples=min(samples, 50), seed=seed)
    except ZeroLocusError as e:
        return [e.report]
    reports = [check_zero_locus(Zl, samples=samples, seed=seed)]
    if args.z == "bfv" and cd.n == 2 and E.kind == "laurent" and E.k == 1:
        reports.append(zero_locus_physical_report(cd, N=E.window))
    return reports


def cmd_rothstein(args, out):
    from .rothstein import (
        RothsteinAlgebra,
        check_bianchi,
        check_rothstein,
        compare_with_darboux,
        curvature_report,
        metric_report,
        metricize,
    )

    data = structfile.load(args.file)
    seed, samples = _settings(args, data)
    conn = structfile.to_connection(data)
    if args.metricize:
        conn = metricize(conn)
    met = metric_report(conn)
    if not met.passed:
        return [met]
    ra = RothsteinAlgebra(conn)
    reports = [met, curvature_report(conn), check_rothstein(ra, samples=samples, seed=seed)]
    if args.check_bianchi:
        reports.append(check_bianchi(ra, seed=seed))
    if all(not v for v in conn.grad.values()):
        reports.append(compare_with_darboux(ra, samples=samples, seed=seed))
    reports[1].data["r"] = {f"{ra.D_names[i]},{ra.D_names[j]}": str(v) for (i, j), v in ra.r.items()}
    return reports


def cmd_example(args, out):
    from .corpus import example_data, example_names

    if args.name in (None, "list"):
        print("\n".join(example_names()))
        out.quiet = True
        return []
    try:
        data = example_data(args.name)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    sys.stdout.write(structfile.dumps(data))
    out.quiet = True
    return []


# ---------------------------------------------------------------------------


class _Output:
    def __init__(self):
        self.stream = sys.stdout
        self.quiet = False


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="sampling seed (default: file 'seed' or 0)")
    common.add_argument("--samples", type=int, default=None, help="random instances (default: file 'samples' or 200)")
    common.add_argument("--window", type=int, default=None, help="Laurent exponent window N")
    common.add_argument("--roundtrip", action="store_true", help="round-trip through the Hamiltonian")
    common.add_argument("--machine", action="store_true", help="print the machine-readable JSON block only")

    p = argparse.ArgumentParser(prog="hcd", description="Exact checks for higher Courant-Dorfman structures.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="axiom checks")
    c.add_argument("kind", choices=["cd", "pva", "lca", "weak"])
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("build", parents=[common], help="build the Hamiltonian of a structure")
    b.add_argument("what", choices=["theta"])
    b.add_argument("file")
    b.add_argument("-o", "--output", default=None)
    b.set_defaults(func=cmd_build)

    f = sub.add_parser("from-theta", parents=[common], help="derived structure of a chart file")
    f.add_argument("file")
    f.add_argument("-o", "--output", default=None)
    f.set_defaults(func=cmd_from_theta)

    for name, func in (("bracket", cmd_bracket), ("lambda", cmd_lambda)):
        q = sub.add_parser(name, parents=[common], help=f"evaluate a {name}")
        q.add_argument("e1")
        q.add_argument("e2")
        q.add_argument("file")
        q.set_defaults(func=func)

    cu = sub.add_parser("current", parents=[common], help="tensor with a dgca and check the current algebras")
    cu.add_argument("file")
    cu.add_argument("--dgca", default=None, help="laurent:k,N or derham:m")
    cu.add_argument("--check", action="store_true")
    cu.set_defaults(func=cmd_current)

    r = sub.add_parser("reduce", parents=[common], help="zero-locus reduction")
    r.add_argument("file")
    r.add_argument("--z", default="bfv", help="bfv (Z = {Theta,-} + D) or zero")
    r.add_argument("--dgca", default=None)
    r.set_defaults(func=cmd_reduce)

    ro = sub.add_parser("rothstein", parents=[common], help="Rothstein bracket of a metric connection")
    ro.add_argument("file")
    ro.add_argument("--check-bianchi", action="store_true")
    ro.add_argument("--metricize", action="store_true", help="replace the connection by its metric average")
    ro.set_defaults(func=cmd_rothstein)

    e = sub.add_parser("example", parents=[common], help="print a built-in structure file")
    e.add_argument("name", nargs="?", default=None)
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Output()
    try:
        reports = args.func(args, out)
    except (structfile.ParseError, UsageError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    passed = all(r.passed for r in reports)
    if args.machine:
        block = {"command": args.command, "passed": passed, "reports": [r.machine() for r in reports]}
        print(json.dumps(block, sort_keys=True, indent=2), file=out.stream)
    elif not out.quiet:
        print("\n\n".join(r.text() for r in reports), file=out.stream)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
