"""Command-line surface: validate, analyze, tensor, capped-free, freelat.

Lattice arguments are either a path to a lattice document or a catalog name
(chain<n>, boolean<n>, M3, M4, N5).  A lattice document is a JSON object with
"name", an "elements" array of unique labels, and a "covers" array of
[lower, upper] label pairs.

Exit codes: 0 ok, 1 IO/parse trouble, 2 not a lattice, 3 cap exceeded,
4 term-size guardrail hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bounded, catalog, core, freelat, tensor, transfer
from .adjust import one_step_adjustment, step_from_pairs
from .errors import (
    CapExceeded,
    CyclicCovers,
    LatticeError,
    NoBottom,
    NotALattice,
    SizeOverflow,
    TermSizeExceeded,
    TermSyntaxError,
    VariableOutOfRange,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_NOT_LATTICE = 2
EXIT_CAP = 3
EXIT_TERM_SIZE = 4


class DocumentError(Exception):
    pass


def load_document(path):
    """Read a lattice document; returns (name, FiniteLattice)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: top level must be an object")
    name = doc.get("name", os.path.basename(path))
    elements = doc.get("elements")
    covers = doc.get("covers")
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise DocumentError(f"{path}: 'elements' must be an array of labels")
    if len(set(elements)) != len(elements):
        raise DocumentError(f"{path}: element labels must be unique")
    if not isinstance(covers, list):
        raise DocumentError(f"{path}: 'covers' must be an array of pairs")
    index = {label: i for i, label in enumerate(elements)}
    pairs = []
    for entry in covers:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise DocumentError(f"{path}: bad cover entry {entry!r}")
        lo, hi = entry
        if lo not in index or hi not in index:
            raise DocumentError(f"{path}: cover {entry!r} uses undeclared labels")
        pairs.append((index[lo], index[hi]))
    lattice = core.FiniteLattice.from_covers(len(elements), pairs, elements)
    return name, lattice


def resolve_lattice(spec, catalog_name=None):
    """A lattice from --catalog NAME, a file path, or a bare catalog name."""
    if catalog_name is not None:
        return catalog_name, catalog.from_name(catalog_name)
    if spec is None:
        raise DocumentError("no lattice given")
    if os.path.exists(spec):
        return load_document(spec)
    try:
        return spec, catalog.from_name(spec)
    except KeyError as exc:
        raise DocumentError(
            f"{spec!r} is neither a readable file nor a catalog name ({exc})"
        ) from exc


def _classify(exc):
    if isinstance(exc, (NotALattice, CyclicCovers, NoBottom)):
        return EXIT_NOT_LATTICE
    if isinstance(exc, (CapExceeded, SizeOverflow)):
        return EXIT_CAP
    if isinstance(exc, TermSizeExceeded):
        return EXIT_TERM_SIZE
    return EXIT_IO


# -- analyze -----------------------------------------------------------------


def analysis_report(name, lattice):
    irr = lattice.join_irreducibles()
    pairs = transfer.minimal_pairs(lattice)
    graph = transfer.d_relation(lattice)
    verdict = transfer.tj_witness(lattice)
    amen = transfer.is_amenable_finite(lattice)
    report = {
        "lattice": name,
        "size": lattice.n,
        "join_irreducibles": [
            {"element": lattice.names[p], "lower_cover": lattice.names[s]}
            for p, s in irr
        ],
        "minimal_pairs": [
            {
                "p": lattice.names[mp.p],
                "cover": [lattice.names[q] for q in mp.sorted_members()],
            }
            for mp in pairs
        ],
        "d_edges": [
            [lattice.names[p], lattice.names[q]] for p, q in sorted(graph.edges)
        ],
        "t_join": (
            {"order": [lattice.names[p] for p in verdict.order]}
            if verdict.is_order
            else {"cycle": [lattice.names[p] for p in verdict.cycle]}
        ),
        "amenable": amen.amenable,
        "join_semidistributive": core.is_sd_join(lattice),
        "distributive": core.is_distributive(lattice),
    }
    return report, graph, verdict


def render_analysis(report, lattice):
    lines = [f"lattice: {report['lattice']}  ({report['size']} elements)"]
    ji = ", ".join(
        f"{d['element']} (covers {d['lower_cover']})"
        for d in report["join_irreducibles"]
    )
    lines.append(f"join-irreducibles: {ji if ji else '(none)'}")
    if report["minimal_pairs"]:
        lines.append("minimal pairs:")
        for d in report["minimal_pairs"]:
            lines.append(f"  <{d['p']}, {{{', '.join(d['cover'])}}}>")
    else:
        lines.append("minimal pairs: (none)")
    edges = " ".join(f"{p}->{q}" for p, q in report["d_edges"])
    lines.append(f"D-edges: {edges if edges else '(none)'}")
    tj = report["t_join"]
    if "order" in tj:
        lines.append("T-join: ORDER " + " <= ".join(tj["order"]))
        lines.append("amenable: YES")
    else:
        cyc = tj["cycle"]
        lines.append("T-join: CYCLE " + " -> ".join(cyc + [cyc[0]]))
        lines.append("amenable: NO")
    lines.append(f"join-semidistributive: {'yes' if report['join_semidistributive'] else 'no'}")
    lines.append(f"distributive: {'yes' if report['distributive'] else 'no'}")
    return "\n".join(lines)


def dgraph_dot(lattice, graph, verdict):
    """DOT text of the D-graph; edges on a witnessing cycle are highlighted."""
    cycle_edges = set()
    if verdict.cycle:
        cyc = verdict.cycle
        for i, p in enumerate(cyc):
            cycle_edges.add((p, cyc[(i + 1) % len(cyc)]))
    lines = ["digraph dependency {"]
    for p in graph.vertices:
        lines.append(f'  "{lattice.names[p]}";')
    for p, q in sorted(graph.edges):
        attr = " [color=red]" if (p, q) in cycle_edges else ""
        lines.append(f'  "{lattice.names[p]}" -> "{lattice.names[q]}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args):
    targets = []
    if args.batch:
        try:
            names = sorted(
                os.path.join(args.batch, f)
                for f in os.listdir(args.batch)
                if f.endswith(".json")
            )
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        targets = [(None, path) for path in names]
    else:
        targets = [(args.catalog, args.lattice)]
    code = EXIT_OK
    for catalog_name, spec in targets:
        try:
            name, lattice = resolve_lattice(spec, catalog_name)
            report, graph, verdict = analysis_report(name, lattice)
        except LatticeError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return _classify(exc)
        except DocumentError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        if args.json:
            print(json.dumps(report, indent=2, sort_keys=True))
        else:
            print(render_analysis(report, lattice))
        if args.dot:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(dgraph_dot(lattice, graph, verdict))
    return code


# -- validate ----------------------------------------------------------------


def cmd_validate(args):
    try:
        name, lattice = load_document(args.path)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LatticeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _classify(exc)
    print(f"ok: {name} is a lattice with {lattice.n} elements "
          f"(bottom {lattice.names[lattice.bottom_index]})")
    return EXIT_OK


# -- tensor ------------------------------------------------------------------


def cmd_tensor(args):
    try:
        name_a, A = resolve_lattice(args.lattice_a)
        name_b, B = resolve_lattice(args.lattice_b)
        bi_ideals = tensor.tensor_enumerate(A, B, cap=args.cap)
        maps = tensor.enumerate_antitone_maps(A, B)
    except LatticeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _classify(exc)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    meet_ok = join_ok = 0
    for a0 in range(A.n):
        for b0 in range(B.n):
            t0 = tensor.pure_tensor(A, B, a0, b0)
            for a1 in range(A.n):
                for b1 in range(B.n):
                    t1 = tensor.pure_tensor(A, B, a1, b1)
                    meet = tensor.bi_meet(t0, t1)
                    if meet == tensor.pure_tensor(A, B, A.meet(a0, a1), B.meet(b0, b1)):
                        meet_ok += 1
                    joined = tensor.bi_join(t0, t1)
                    four = tensor.union_of_pure_tensors(
                        A, B,
                        [(a0, b0), (a1, b1),
                         (A.join(a0, a1), B.meet(b0, b1)),
                         (A.meet(a0, a1), B.join(b0, b1))],
                    )
                    if joined == four:
                        join_ok += 1
    total = (A.n * B.n) ** 2
    roundtrip = all(
        tensor.from_map(tensor.to_map(h)) == h for h in bi_ideals
    )
    report = {
        "lattice_a": name_a,
        "lattice_b": name_b,
        "count": len(bi_ideals),
        "antitone_map_count": len(maps),
        "pure_tensor_meet_law": f"{meet_ok}/{total}",
        "pure_tensor_join_law": f"{join_ok}/{total}",
        "map_roundtrip_identity": roundtrip,
    }
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"tensor product {name_a} (x) {name_b}: {len(bi_ideals)} bi-ideals")
        agree = "agrees" if len(maps) == len(bi_ideals) else "DISAGREES"
        print(f"antitone-map enumeration: {len(maps)} ({agree})")
        print(f"pure-tensor meet law: {meet_ok}/{total} pairs")
        print(f"pure-tensor join law: {join_ok}/{total} pairs")
        print(f"map round-trip identity: {'ok' if roundtrip else 'BROKEN'}")
    if args.list:
        for h in bi_ideals:
            cells = ", ".join(
                f"({A.names[a]},{B.names[b]})" for a, b in h.pairs()
            )
            print(f"  {{{cells}}}")
    if len(maps) != len(bi_ideals) or not roundtrip:
        return EXIT_IO
    return EXIT_OK


# -- capped-free ---------------------------------------------------------------


def _resolve_generators(lattice, spec):
    if spec == "auto":
        gens = [p for p, _ in lattice.join_irreducibles()]
        if not gens:
            gens = [lattice.bottom_index]
        return gens
    by_name = {name: i for i, name in enumerate(lattice.names)}
    out = []
    for label in spec.split(","):
        label = label.strip()
        if label not in by_name:
            raise DocumentError(f"no element named {label!r}")
        out.append(by_name[label])
    return out


def cmd_capped_free(args):
    try:
        name, lattice = resolve_lattice(args.lattice, args.catalog)
        gens = _resolve_generators(lattice, args.generators)
    except LatticeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _classify(exc)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    n_max = args.n_max if args.n_max is not None else bounded.default_n_max(lattice)
    gen_names = ", ".join(lattice.names[g] for g in gens)
    print(f"lattice: {name}; generators: {gen_names}; n_max={n_max}")
    verdict = transfer.tj_witness(lattice)
    tj_ok = verdict.is_order
    results = {}
    code = EXIT_OK
    modes = ["beta", "adjust"] if args.mode == "both" else [args.mode]
    for mode in modes:
        if mode == "beta":
            rows = [bounded.beta_zero(lattice, gens)]
            stabilized_at = None
            failure = None
            for _ in range(n_max):
                try:
                    nxt = bounded.beta_step(lattice, gens, rows[-1])
                except TermSizeExceeded as exc:
                    failure = exc
                    break
                if bounded.row_equal(rows[-1], nxt):
                    stabilized_at = len(rows) - 1
                    break
                rows.append(nxt)
            for k, row in enumerate(rows):
                for a in range(lattice.n):
                    val = row[a]
                    text = "TOP" if val is bounded.TOP else freelat.term_to_str(val)
                    print(f"  beta[{k}][{lattice.names[a]}] = {text}")
            if failure is not None:
                print(f"beta: aborted after row {len(rows) - 1}: {failure}")
                print(f"beta: NOT-STABILIZED n_max={n_max} (partial)")
                return EXIT_TERM_SIZE
            if stabilized_at is not None:
                print(f"beta: STABILIZED n={stabilized_at}")
            else:
                print(f"beta: NOT-STABILIZED n_max={n_max}")
            results["beta"] = stabilized_at is not None
        elif mode == "adjust":
            codomain = freelat.FreeLatticeWithBottom(len(gens))
            steps = [step_from_pairs(
                lattice, codomain,
                [(g, freelat.var(i)) for i, g in enumerate(gens)],
            )]
            stabilized_at = None
            failure = None
            changed_log = [set()]
            for _ in range(n_max):
                try:
                    nxt = one_step_adjustment(steps[-1])
                except TermSizeExceeded as exc:
                    failure = exc
                    break
                changed = {
                    x for x, old, new in zip(
                        lattice.nonbottom(), steps[-1].values, nxt.values
                    ) if not codomain.eq(old, new)
                }
                if not changed:
                    stabilized_at = len(steps) - 1
                    break
                steps.append(nxt)
                changed_log.append(changed)
            for k, step in enumerate(steps):
                for x, v in step.items():
                    mark = " *" if x in changed_log[k] else ""
                    print(f"  xi[{k}][{lattice.names[x]}] = {codomain.format_element(v)}{mark}")
            if failure is not None:
                print(f"adjust: aborted after step {len(steps) - 1}: {failure}")
                print(f"adjust: NOT-STABILIZED n_max={n_max} (partial)")
                return EXIT_TERM_SIZE
            if stabilized_at is not None:
                print(f"adjust: STABILIZED n={stabilized_at}")
            else:
                print(f"adjust: NOT-STABILIZED n_max={n_max}")
            results["adjust"] = stabilized_at is not None
        elif mode == "lemma23":
            assignment = [(g, freelat.var(i)) for i, g in enumerate(gens)]
            try:
                witness = tensor.capped_join_witness(lattice, assignment, n_max)
            except CapExceeded as exc:
                print(f"error: CapExceeded: {exc}", file=sys.stderr)
                return EXIT_CAP
            codomain = freelat.FreeLatticeWithBottom(len(gens))
            for level, ((ai, bi), (aj, bj), clause) in enumerate(witness.level_witnesses):
                side = "first" if clause == "a-meet" else "second"
                print(
                    f"  level {level}: union of {witness.union_sizes[level]} pure tensors "
                    f"breaks at ({lattice.names[ai]}, {codomain.format_element(bi)}) vs "
                    f"({lattice.names[aj]}, {codomain.format_element(bj)}): "
                    f"unresolved {side}-coordinate meet"
                )
            print(f"lemma23: {witness.describe()}")
            results["lemma23"] = witness.capped
    expected = tj_ok
    consistent = all(v == expected for v in results.values())
    tj_text = "ORDER" if tj_ok else "CYCLE"
    print(f"analyze T-join verdict: {tj_text}; consistency: "
          + ("OK" if consistent else "MISMATCH"))
    if not consistent:
        code = EXIT_IO
    return code


# -- freelat -------------------------------------------------------------------


def _parse_cli_term(text, arity):
    m = arity if arity else 64
    return freelat.parse_term(text, m)


def cmd_freelat(args):
    try:
        if args.sub == "leq":
            s = _parse_cli_term(args.s, args.arity)
            t = _parse_cli_term(args.t, args.arity)
            print("true" if freelat.whitman_leq(s, t) else "false")
        elif args.sub == "canon":
            t = _parse_cli_term(args.t, args.arity)
            print(freelat.term_to_str(freelat.canonical_form(t)))
        elif args.sub == "dual":
            t = _parse_cli_term(args.t, args.arity)
            print(freelat.term_to_str(freelat.canonical_form(freelat.dual(t))))
        elif args.sub == "sn":
            level = freelat.generate_sn(args.m, args.n, element_cap=args.cap)
            print(f"S_{args.n}({args.m}): {len(level.elements)} elements")
            for t in level.elements:
                print(f"  {freelat.term_to_str(t)}")
    except (TermSyntaxError, VariableOutOfRange) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except CapExceeded as exc:
        print(f"error: CapExceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except TermSizeExceeded as exc:
        print(f"error: TermSizeExceeded: {exc}", file=sys.stderr)
        return EXIT_TERM_SIZE
    return EXIT_OK


# -- wiring --------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latticetensor",
        description="finite-lattice analysis: transferability, tensor products, "
                    "free-lattice tables",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a lattice document")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="minimal pairs, D-graph, amenability")
    p.add_argument("lattice", nargs="?", help="document path or catalog name")
    p.add_argument("--catalog", help="catalog name (chain<n>, boolean<n>, M3, M4, N5)")
    p.add_argument("--batch", help="analyze every .json document in a directory")
    p.add_argument("--dot", help="write the D-graph as DOT to this path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tensor", help="enumerate the tensor product of two lattices")
    p.add_argument("lattice_a")
    p.add_argument("lattice_b")
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--list", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser(
        "capped-free",
        help="lower limit table / adjustment sequence / union witness against the free lattice",
    )
    p.add_argument("lattice", nargs="?")
    p.add_argument("--catalog")
    p.add_argument("--generators", default="auto",
                   help="'auto' (join-irreducibles) or comma-separated labels")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--mode", choices=["beta", "adjust", "both", "lemma23"],
                   default="both")
    p.set_defaults(func=cmd_capped_free)

    p = sub.add_parser("freelat", help="free-lattice term utilities")
    fsub = p.add_subparsers(dest="sub", required=True)
    q = fsub.add_parser("leq")
    q.add_argument("s")
    q.add_argument("t")
    q.add_argument("-m", "--arity", type=int, default=0)
    q.set_defaults(func=cmd_freelat)
    q = fsub.add_parser("canon")
    q.add_argument("t")
    q.add_argument("-m", "--arity", type=int, default=0)
    q.set_defaults(func=cmd_freelat)
    q = fsub.add_parser("dual")
    q.add_argument("t")
    q.add_argument("-m", "--arity", type=int, default=0)
    q.set_defaults(func=cmd_freelat)
    q = fsub.add_parser("sn")
    q.add_argument("m", type=int)
    q.add_argument("n", type=int)
    q.add_argument("--cap", type=int, default=20_000)
    q.set_defaults(func=cmd_freelat)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
