"""Command-line entry point.

Exit codes: 0 yes / polynomial / pass, 1 no / NP-complete / counterexample,
2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, field

from . import clones, congruences, enumerators, homs, instances, rewrite, solvers, width
from .errors import BudgetExceeded, FincspError
from .finstr import load_structure, serialize_structure
from .structure import Congruence, graph_of
from .terms import load_identities

YES, NO, ERROR, BUDGET = 0, 1, 2, 3


@dataclass
class CommandOutcome:
    exit_code: int
    report: list = field(default_factory=list)  # human-readable lines
    fields: list = field(default_factory=list)  # (key, value) pairs for --porcelain
    porcelain: bool = False

    def add(self, key, value, line=None):
        self.fields.append((key, value))
        self.report.append(line if line is not None else f"{key}: {value}")

    def text(self, porcelain=False):
        if porcelain:
            return "".join(f"{k}={v}\n" for k, v in self.fields)
        return "".join(f"{line}\n" for line in self.report)


def _values(h):
    return " ".join(map(str, h)) if h is not None else "-"


def parse_partition(text, size):
    """``{0,1}{2}`` -> Congruence; ``0`` and ``1`` name the identity and full relation."""
    text = text.strip()
    if text == "0":
        return Congruence.identity(size)
    if text == "1":
        return Congruence.full(size)
    blocks = re.findall(r"\{([^}]*)\}", text)
    if not blocks:
        raise FincspError(f"cannot parse partition {text!r}")
    parsed = [[int(v) for v in b.replace(",", " ").split()] for b in blocks]
    return Congruence.from_blocks(size, parsed)


# -- handlers --------------------------------------------------------------------------------


def cmd_hom(args):
    X, A = load_structure(args.source), load_structure(args.target)
    out = CommandOutcome(YES)
    if args.mode == "count":
        count = homs.count_homs(X, A, surjective=args.surjective)
        out.add("count", count, str(count))
        out.exit_code = YES if count else NO
    elif args.mode == "exists":
        h = homs.find_hom(X, A, surjective=args.surjective)
        out.add("exists", "yes" if h else "no", "yes" if h else "no")
        if h:
            out.add("witness", _values(h))
        out.exit_code = YES if h else NO
    else:
        found = homs.enumerate_homs(X, A, surjective=args.surjective)
        for h in found:
            out.add("hom", _values(h), _values(h))
        out.fields.append(("count", len(found)))
        out.exit_code = YES if found else NO
    return out


def _render_verdict(out, verdict):
    out.add("verdict", verdict.name)
    if isinstance(verdict, enumerators.InKsurjEff):
        out.add("strategy", verdict.strategy)
        for line in enumerators.render_certificate(verdict.certificate).splitlines():
            out.report.append("  " + line)
        out.exit_code = YES
    elif isinstance(verdict, enumerators.NotInKsurj):
        lo, hi = verdict.cover
        out.add("cover", f"{lo.render()} < {hi.render()}")
        out.add("reason", verdict.reason)
        if verdict.probe is not None:
            for line in verdict.probe.render().splitlines():
                out.report.append("  " + line)
            out.fields.append(("probe", ";".join(f"{c[0]}:{c[2]}" for c in verdict.probe.counts)))
        out.exit_code = NO
    else:
        out.add("reason", verdict.reason)
        out.exit_code = ERROR


def cmd_classify(args):
    A = load_structure(args.structure)
    out = CommandOutcome(YES)
    if args.kind == "boolean":
        verdict = solvers.classify_boolean(A)
        out.add("complexity", verdict.complexity, verdict.render())
        if verdict.polynomial:
            out.fields.append(("reason", str(verdict.reason)))
        else:
            for name, (rel, rows) in verdict.refutations.items():
                out.fields.append((f"refuted.{name}", f"{rel}:{list(rows)}"))
        out.exit_code = YES if verdict.polynomial else NO
    elif args.kind == "simple":
        _render_verdict(out, enumerators.classify_simple_ksurj(A.algebraic_reduct(), args.budget))
    else:
        _render_verdict(out, enumerators.derive_certificate(A.algebraic_reduct(), args.budget))
    return out


def cmd_congruences(args):
    A = load_structure(args.structure)
    L = congruences.all_congruences(A)
    out = CommandOutcome(YES)
    for i, theta in enumerate(L.congruences):
        covers = ",".join(str(j) for j in L.upper_covers(i))
        out.add(f"congruence.{i}", theta.render(), f"{i}: {theta.render()}  covered by [{covers}]")
    out.add("count", len(L))
    return out


def _covers(A, args, L):
    if args.alpha is not None or args.beta is not None:
        lo = parse_partition(args.alpha or "0", A.size)
        hi = parse_partition(args.beta or "1", A.size)
        return [(lo, hi)]
    return [(L.congruences[i], L.congruences[j]) for i in range(len(L)) for j in L.upper_covers(i)]


def cmd_tct(args):
    A = load_structure(args.structure).algebraic_reduct()
    L = congruences.all_congruences(A)
    out = CommandOutcome(YES)
    if args.action == "chain":
        chain = congruences.find_type1free_chain(A, args.budget, L)
        if chain:
            types = congruences.chain_types(A, chain, args.budget)
            out.add("chain", " < ".join(t.render() for t in chain))
            out.add("types", " ".join(map(str, types)))
        else:
            lo, hi = chain.cover
            out.add("chain", "none", "no maximal chain avoids type 1")
            out.add("type1_cover", f"{lo.render()} < {hi.render()}")
            out.exit_code = NO
        return out
    for lo, hi in _covers(A, args, L):
        key = f"{lo.render()}<{hi.render()}"
        if args.action == "type":
            t = congruences.type_of_cover(A, lo, hi, args.budget)
            out.add(f"type[{key}]", t, f"typ({lo.render()}, {hi.render()}) = {t}")
        else:
            for U in congruences.minimal_sets(A, lo, hi, args.budget):
                Us = "{" + ",".join(map(str, sorted(U))) + "}"
                trs = congruences.traces(A, lo, hi, U)
                rendered = " ".join("{" + ",".join(map(str, sorted(N))) + "}" for N in trs)
                out.add(f"minset[{key}]", Us, f"minimal set {Us} for ({lo.render()}, {hi.render()}); traces {rendered}")
    return out


def cmd_rewrite(args):
    X = load_structure(args.structure)
    out = CommandOutcome(YES)
    if args.action == "enforce":
        ids = load_identities(args.identities)
        if args.rename:
            mapping = dict(pair.split("=") for pair in args.rename.split(","))
            ids = [i.renamed(mapping) for i in ids]
        Y, qmap, steps = rewrite.enforce_identities(X, ids)
        out.add("steps", steps)
        out.add("size", Y.size)
        out.add("map", _values(qmap))
    else:
        if args.spec == "sheffer":
            spec = instances.sheffer_spec()
            A, B = instances.nor_template(), instances.boolean_algebra()
        else:
            if not (args.source_template and args.target_template):
                raise FincspError("a .tspec file needs --source-template and --target-template")
            A, B = load_structure(args.source_template), load_structure(args.target_template)
            with open(args.spec, encoding="utf-8") as fh:
                spec = rewrite.parse_tspec(fh.read(), A.signature, B.signature)
        X1, qmap, steps = rewrite.enforce_identities(X, spec.compatibility_identities())
        Y = rewrite.qfpp_reduce(X1, spec, A, B)
        out.add("compatibility_steps", steps)
        out.add("map", _values(qmap))
        out.add("size", Y.size)
    text = serialize_structure(Y)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.report.extend(text.rstrip("\n").splitlines())
    return out


def cmd_free_algebra(args):
    A = load_structure(args.structure).algebraic_reduct()
    F, gens, _ = clones.free_algebra(A, args.n, args.budget)
    out = CommandOutcome(YES)
    out.add("size", F.size)
    out.add("generators", _values(gens))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(serialize_structure(F))
    return out


def cmd_probe(args):
    A = load_structure(args.structure).algebraic_reduct()
    alpha = parse_partition(args.alpha, A.size) if args.alpha else None
    probe = homs.counting_probe(A, args.family, args.n_max, alpha=alpha, budget=args.budget)
    out = CommandOutcome(YES)
    for n, (size, total, surj) in zip(probe.sizes, probe.counts):
        out.add(f"n{n}", f"{size},{total},{surj}", f"n={n} |X|={size} homs={total} surjective={surj}")
    return out


def cmd_solve(args):
    out = CommandOutcome(YES)
    if args.problem == "brute":
        X, A = load_structure(args.source), load_structure(args.target)
        result = solvers.brute_solve(X, A)
    else:
        if not args.structure:
            raise FincspError(f"solve {args.problem} needs an instance file")
        X = load_structure(args.structure)
        if args.problem == "sheffer":
            target = load_structure(args.target) if args.target else None
            result = solvers.sheffer_solve(X, target)
        elif args.problem == "z":
            result = solvers.z_solve(X)
        else:
            result = solvers.prop5_solve(X)
    out.add("answer", "yes" if result.answer else "no", "yes" if result.answer else "no")
    if result.answer:
        out.add("witness", _values(result.witness), _values(result.witness))
    out.fields.append(("method", result.method))
    out.exit_code = YES if result.answer else NO
    return out


def cmd_width(args):
    out = CommandOutcome(YES)
    if args.action == "minimality":
        X, A = load_structure(args.source), load_structure(args.target)
        P = width.kl_minimality(X, A, args.k, args.l)
        out.add("minimality", "nontrivial" if P.nontrivial() else "trivial")
        out.add("deletions", len(P.log))
        if args.dump:
            with open(args.dump, "w", encoding="utf-8") as fh:
                fh.write(P.dump())
        out.exit_code = YES if P.nontrivial() else NO
    elif args.action == "harness":
        A = load_structure(args.target)
        result = width.width_harness(A, args.k, args.l, args.max_n, args.samples, seed=args.seed)
        out.add("verdict", result.verdict)
        out.add("checked", result.checked)
        if isinstance(result, width.Counterexample):
            out.add("instance_size", result.instance.size)
            out.report.extend(serialize_structure(result.instance).rstrip("\n").splitlines())
            out.exit_code = NO
    else:
        return _paper_prop_6_1(args)
    return out


# -- built-in reproductions ---------------------------------------------------------------------


def _paper_example_4_12(args):
    A = instances.example_4_12()
    L = congruences.all_congruences(A)
    out = CommandOutcome(YES)
    out.add("congruences", " ".join(t.render() for t in L.congruences))
    for i in range(len(L)):
        for j in L.upper_covers(i):
            lo, hi = L.congruences[i], L.congruences[j]
            t = congruences.type_of_cover(A, lo, hi, args.budget)
            out.add(f"type[{lo.render()}<{hi.render()}]", t, f"typ({lo.render()}, {hi.render()}) = {t}")
    chain = congruences.find_type1free_chain(A, args.budget, L)
    out.add("type1_free_chain", "yes" if chain else "no")
    _render_verdict(out, enumerators.classify_3element(A, args.budget))
    return out


def _paper_prop_5_1(args):
    A = instances.prop_5_1()
    alg = A.algebraic_reduct()
    L = congruences.all_congruences(alg)
    out = CommandOutcome(YES)
    out.add("congruences", " ".join(t.render() for t in L.congruences))
    beta = L.minimal()[0]
    out.add("type[0<beta]", congruences.type_of_cover(alg, L.bottom, beta, args.budget))
    _render_verdict(out, enumerators.classify_3element(alg, args.budget))
    result = solvers.prop5_solve(A)
    out.add("self", f"{'yes' if result.answer else 'no'} {_values(result.witness)}")
    return out


def _paper_prop_6_1(args):
    X, A = instances.build_not23_instance(), instances.nor_template()
    count = homs.count_homs(X, A)
    P = width.kl_minimality(X, A, 2, 3)
    status = "nontrivial" if P.nontrivial() else "trivial"
    out = CommandOutcome(YES if count else NO)
    out.report.append(f"homomorphisms: {count}; (2,3)-minimality: {status}")
    out.fields += [("homomorphisms", count), ("minimality", status)]
    explicit = width.paper_p_system()
    ok = width.verify_system(X, A, explicit, 2, 3)
    out.add("explicit_system", "compatible" if ok else f"violated: {ok}")
    out.add("explicit_contained", "yes" if P.contains(explicit) else "no")
    return out


def _paper_sheffer(args):
    spec = instances.sheffer_spec()
    spec.validate(instances.nor_template(), instances.boolean_algebra())
    out = CommandOutcome(YES)
    out.add("translation", "valid")
    for ident in spec.compatibility_identities():
        out.add("compatibility", str(ident))
    verdict = solvers.classify_boolean(instances.nor_template())
    out.add("complexity", verdict.complexity)
    result = solvers.sheffer_solve(instances.build_not23_instance())
    out.add("ten_element_instance", "yes" if result.answer else "no")
    return out


def _paper_z_template(args):
    Z = instances.z_template()
    out = CommandOutcome(YES)
    admitted = solvers.schaefer_check(graph_of(Z))
    out.add("graph_polymorphisms", ",".join(sorted(admitted)))
    X = instances.build_z_counterexample()
    out.add("instance_homomorphisms", homs.count_homs(X, Z))
    P = width.kl_minimality(X, Z, 2, 3)
    out.add("minimality", "nontrivial" if P.nontrivial() else "trivial")
    out.add("z_solve", "yes" if solvers.z_solve(X).answer else "no")
    return out


PAPER = {
    "example-4-12": _paper_example_4_12,
    "prop-5-1": _paper_prop_5_1,
    "prop-6-1": _paper_prop_6_1,
    "sheffer": _paper_sheffer,
    "z-template": _paper_z_template,
}


def cmd_paper(args):
    return PAPER[args.name](args)


# -- parser ---------------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=clones.DEFAULT_BUDGET, help="closure size limit")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--porcelain", action="store_true", help="key=value output")

    parser = argparse.ArgumentParser(prog="fincsp", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    p = add("hom", cmd_hom, help="brute-force homomorphisms")
    p.add_argument("mode", choices=["exists", "count", "enumerate"])
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--surjective", action="store_true")

    p = add("classify", cmd_classify, help="classify a template")
    p.add_argument("kind", choices=["boolean", "ksurj", "simple"])
    p.add_argument("structure")

    p = add("congruences", cmd_congruences, help="congruence lattice")
    p.add_argument("structure")

    p = add("tct", cmd_tct, help="types, minimal sets and chains")
    p.add_argument("action", choices=["type", "minsets", "chain"])
    p.add_argument("structure")
    p.add_argument("--alpha", help="lower congruence, e.g. {0,1}{2} or 0")
    p.add_argument("--beta", help="upper congruence, e.g. 1")

    p = add("rewrite", cmd_rewrite, help="enforce identities or translate an instance")
    p.add_argument("action", choices=["enforce", "reduce"])
    p.add_argument("structure")
    p.add_argument("--identities", help="shipped name (semilattice, group, boolean-algebra) or .ids path")
    p.add_argument("--rename", help="symbol renaming for the identities, e.g. s=o")
    p.add_argument("--spec", default="sheffer", help="'sheffer' or a .tspec path")
    p.add_argument("--source-template")
    p.add_argument("--target-template")
    p.add_argument("--output")

    p = add("free-algebra", cmd_free_algebra, help="free algebra on n generators")
    p.add_argument("structure")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--output")

    p = add("probe", cmd_probe, help="homomorphism counts on growth families")
    p.add_argument("kind", choices=["counting"])
    p.add_argument("structure")
    p.add_argument("--family", choices=["free-algebra", "star-extension"], default="free-algebra")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--alpha")

    p = add("solve", cmd_solve, help="decide homomorphism existence")
    p.add_argument("problem", choices=["sheffer", "z", "prop5", "brute"])
    p.add_argument("structure", nargs="?")
    p.add_argument("--source")
    p.add_argument("--target")

    p = add("width", cmd_width, help="(k,l)-minimality experiments")
    p.add_argument("action", choices=["minimality", "harness", "paper"])
    p.add_argument("name", nargs="?", choices=["not23"])
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("-k", type=int, default=2)
    p.add_argument("-l", type=int, default=3)
    p.add_argument("--max-n", type=int, default=7)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--dump")

    p = add("paper", cmd_paper, help="reproduce a built-in instance")
    p.add_argument("name", choices=sorted(PAPER))
    return parser


def _validate(parser, args):
    if args.command == "rewrite" and args.action == "enforce" and not args.identities:
        parser.error("rewrite enforce needs --identities")
    if args.command == "solve" and args.problem == "brute" and not (args.source and args.target):
        parser.error("solve brute needs --source and --target")
    if args.command == "width":
        if args.action == "minimality" and not (args.source and args.target):
            parser.error("width minimality needs --source and --target")
        if args.action == "harness" and not args.target:
            parser.error("width harness needs --target")
        if args.action == "paper" and args.name != "not23":
            parser.error("width paper takes the name not23")


def run(argv):
    """Parse ``argv`` and execute; returns a CommandOutcome (never raises for input errors)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(parser, args)
    except SystemExit as exc:
        return CommandOutcome(ERROR if exc.code else YES, [parser.format_usage().rstrip()])
    try:
        outcome = args.func(args)
    except BudgetExceeded as exc:
        outcome = CommandOutcome(BUDGET, [f"budget exceeded: {exc}"], [("error", "budget")])
    except (FincspError, OSError, ValueError) as exc:
        outcome = CommandOutcome(ERROR, [f"error: {exc}"], [("error", str(exc))])
    outcome.porcelain = args.porcelain
    return outcome


def main(argv=None):
    outcome = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if outcome.exit_code in (YES, NO) else sys.stderr
    stream.write(outcome.text(outcome.porcelain))
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
