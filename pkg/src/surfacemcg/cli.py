"""Command-line interface.  Exit status: 0 success or a true verdict, 1 a
negative verdict, 2 bad input."""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import covers, embedding, ends, mccool, torsion, whitehead
from .fixtures import F4_ALPHABET, F4_SET, EXAMPLE_SPECS, fixture_basis, fixture_spec
from .reports import SuiteReport
from .words import Alphabet, Endomorphism, Word, WordSyntaxError, tokenize

OK, NEGATIVE, BAD_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


# -- parsing helpers ----------------------------------------------------------


def infer_alphabet(texts: Sequence[str], g: int | None = None, p: int | None = None) -> Alphabet:
    """Surface alphabet when every name looks like ``x<i>``, ``y<i>`` or ``t<i>``,
    otherwise the sorted generic names; ``--g``/``--p`` override."""
    if g is not None or p is not None:
        return Alphabet.surface(g or 0, p or 0)
    names: set[str] = set()
    for text in texts:
        for body in re.findall(r"[A-Za-z][0-9]*", text):
            names.add(body[0].lower() + body[1:])
    if names and all(re.fullmatch(r"[xyt][0-9]+", n) for n in names):
        gg = max([int(n[1:]) for n in names if n[0] in "xy"], default=0)
        pp = max([int(n[1:]) for n in names if n[0] == "t"], default=0)
        return Alphabet.surface(gg, pp)
    if not names:
        raise InputError("cannot infer an alphabet from empty input")
    return Alphabet.free(sorted(names))


def parse_mapping(text: str, alphabet: Alphabet) -> Endomorphism:
    """``x1 -> Y1 x1, y1 -> y1`` (separators ``,`` or ``;``; ``=`` also accepted)."""
    mapping = {}
    for part in re.split(r"[;,\n]", text):
        if not part.strip():
            continue
        m = re.fullmatch(r"\s*([A-Za-z][0-9]*)\s*(?:->|=)\s*(.*?)\s*", part)
        if not m:
            raise InputError(f"cannot parse map entry {part!r}")
        mapping[m.group(1)] = m.group(2)
    return Endomorphism.from_mapping(alphabet, mapping)


def load_cover(args) -> tuple[covers.FiniteQuotientSpec, covers.AdaptedBasis | None]:
    if args.example:
        spec = fixture_spec(args.example, args.p_override)
        needs_basis = getattr(args, "basis", None) is None
        basis = fixture_basis(args.example, args.p_override) if needs_basis else None
    elif args.spec:
        spec = covers.FiniteQuotientSpec.parse(Path(args.spec).read_text())
        basis = None
    else:
        raise InputError("give --example NAME or --spec FILE")
    if getattr(args, "basis", None):
        basis = covers.AdaptedBasis.parse(Path(args.basis).read_text(), spec.alphabet)
    return spec, basis


def element_of(text: str, g: int, p: int) -> mccool.MCGElement:
    return mccool.element_from_word(g, p, mccool.parse_element_word(text))


# -- commands -----------------------------------------------------------------
# Each returns (exit code, text lines, json payload).

Result = tuple[int, list[str], dict]


def cmd_graph(args) -> Result:
    A = infer_alphabet([args.set], args.g, args.p)
    items = whitehead.parse_set(args.set, A)
    graph = whitehead.build_graph(items, A)
    lines = graph.lines()
    return OK, lines, {"edges": lines}


def _surface_check(text: str, A: Alphabet) -> Result:
    items = whitehead.parse_set(text, A)
    ok, failures = whitehead.is_surface_word_set(items, A)
    payload: dict = {"surface": ok, "failures": failures}
    if not ok:
        return NEGATIVE, ["not a surface word set: " + ", ".join(failures)], payload
    T = whitehead.parse_surface_set(text, A)
    seq = whitehead.associated_sequence(T)
    chain = " -> ".join(A.letter_name(a) for a in seq)
    payload |= {"chain": chain, "type": list(whitehead.surface_type(T))}
    return OK, ["surface word set", f"chain: {chain}", f"type: (g,p) = {whitehead.surface_type(T)}"], payload


def cmd_surface_check(args) -> Result:
    return _surface_check(args.set, infer_alphabet([args.set], args.g, args.p))


def cmd_sequence(args) -> Result:
    A = infer_alphabet([args.set], args.g, args.p)
    T = whitehead.parse_surface_set(args.set, A)
    seq = whitehead.format_sequence(whitehead.associated_sequence(T), A)
    return OK, [seq], {"sequence": seq, "type": list(whitehead.surface_type(T))}


def cmd_recover(args) -> Result:
    A = infer_alphabet([args.sequence], args.g, args.p)
    T = whitehead.recover_set(whitehead.parse_sequence(args.sequence, A), A)
    return OK, [str(T)], {"set": str(T), "type": list(whitehead.surface_type(T))}


def cmd_nielsen(args) -> Result:
    A = infer_alphabet([args.set], args.g, args.p)
    T = whitehead.parse_surface_set(args.set, A)
    if args.move is None:
        moves = [m.format(A) for m in mccool.enumerate_nielsen_moves(T)]
        return OK, moves, {"moves": moves}
    move = mccool.NielsenMove.parse(args.move, A)
    T2, seq = mccool.apply_nielsen(T, move)
    text = whitehead.format_sequence(seq, A)
    return OK, [str(T2), text], {"set": str(T2), "sequence": text}


def cmd_verify_mcg(args) -> Result:
    A = Alphabet.surface(args.g or 0, args.p or 0)
    e = parse_mapping(args.map, A)
    try:
        m = mccool.verify_mcg_membership(e, A.g, A.p)
    except mccool.MembershipError as exc:
        return NEGATIVE, [f"not a mapping class: {exc}"], {"member": False, "reason": exc.kind}
    lines = ["mapping class", f"puncture permutation: {list(m.perm)}"]
    payload: dict = {"member": True, "perm": list(m.perm)}
    if args.depth is not None:
        T = mccool.standard_surface_set(A.g, A.p)
        moves = mccool.factor_bfs(mccool.GroupoidMorphism(T, T, e), args.depth)
        if moves is None:
            lines.append(f"no Nielsen factorization within depth {args.depth}")
            payload["factorization"] = None
        else:
            found = [mv.format(A) for mv in moves]
            lines += ["factorization:", *(f"  {f}" for f in found)]
            payload["factorization"] = found
    return OK, lines, payload


def _table(e: Endomorphism) -> list[str]:
    return [f"{a} -> {w}" for a, w in e.table()]


def cmd_random(args) -> Result:
    g, p = args.g or 0, args.p or 0
    m = mccool.random_element(g, p, args.length, args.seed)
    word = " ".join(m.provenance) or "1"
    lines = [f"element: {word}", *_table(m.map)]
    return OK, lines, {"element": word, "images": dict(m.map.table())}


def cmd_project(args) -> Result:
    A = infer_alphabet([args.word], args.g, args.p)
    tw = torsion.project(Word.parse(args.word, A), args.d)
    return OK, [str(tw)], {"normal_form": str(tw)}


def cmd_psi_check(args) -> Result:
    g, p = args.g or 0, args.p or 0
    m = element_of(args.element, g, p)
    e = torsion.psi(m, args.d)
    lines = [f"{a} -> {w}" for a, w in e.table()]
    ident = e.is_identity()
    lines.append("psi is the identity" if ident else "psi is not the identity")
    return OK, lines, {"images": dict(e.table()), "identity": ident}


def cmd_cover_analyze(args) -> Result:
    spec, _ = load_cover(args)
    graph = covers.build_coset_graph(spec)
    data = covers.deck_data(graph)
    A = spec.alphabet
    invariant = all(covers.is_invariant(graph, m) for m in mccool.generator_catalog(A.g, A.p)) if (A.g, A.p) != (0, 0) else True
    summary = data.summary() | {"invariant": invariant}
    lines = [f"{k} = {v}" for k, v in summary.items()]
    lines.append(f"target: ({data.g_prime}, {data.b - 1})")
    return OK, lines, summary


def cmd_basis_verify(args) -> Result:
    spec, basis = load_cover(args)
    if basis is None:
        raise InputError("no adapted basis given")
    report = covers.verify_adapted_basis(covers.build_coset_graph(spec), basis)
    lines = [f"{'ok  ' if ok else 'FAIL'} {name}" for name, ok in report.checks.items()] + report.notes
    return (OK if report.ok else NEGATIVE), lines, {"ok": report.ok, "checks": report.checks, "notes": report.notes}


def cmd_rewrite(args) -> Result:
    spec, basis = load_cover(args)
    if basis is None:
        raise InputError("no adapted basis given")
    w = Word.parse(args.word, spec.alphabet)
    try:
        out = covers.rewrite_in_basis(basis, w)
    except covers.NotInSubgroup as exc:
        return NEGATIVE, [str(exc)], {"member": False}
    return OK, [str(out)], {"member": True, "rewritten": str(out)}


def cmd_embed(args) -> Result:
    spec, basis = load_cover(args)
    if basis is None:
        raise InputError("no adapted basis given")
    ctx = embedding.build_context(spec, basis)
    g, p = ctx.source
    m = element_of(args.element, g, p)
    image = embedding.embed(ctx, m)
    lines = _table(image.map)
    return OK, lines, {"target": [ctx.target.g, ctx.target.p], "images": dict(image.map.table())}


def cmd_ends_compare(args) -> Result:
    if args.set:
        A = infer_alphabet([args.set, args.e, args.f], args.g, args.p)
        ctx = ends.OrderContext.of(whitehead.parse_surface_set(args.set, A))
    else:
        A = infer_alphabet([args.e, args.f], args.g, args.p)
        ctx = ends.OrderContext.standard(A.g, A.p)
    e, f = ends.End.parse(args.e, A), ends.End.parse(args.f, A)
    verdict = ends.compare(e, f, ctx)
    return OK, [verdict], {"verdict": verdict, "e": str(e), "f": str(f)}


def _suite_table(
    samples: int | None, conjugator_length: int = 4
) -> dict[str, Callable[[int], list[SuiteReport]]]:
    def n(default: int) -> int:
        return samples if samples is not None else default

    def embed_suites(seed: int) -> list[SuiteReport]:
        out = []
        for name in ("paper-3a", "paper-3b"):
            ctx = embedding.build_context(fixture_spec(name), fixture_basis(name))
            g, p = ctx.source
            out.append(embedding.injectivity_suite(g, p, ctx.d, n(100), seed, ctx))
            out.append(embedding.homomorphism_suite(ctx, n(30), seed))
        return out

    def closure(seed: int) -> list[SuiteReport]:
        out = []
        for name in ("paper-1-odd", "paper-3a"):
            ctx = embedding.build_context(fixture_spec(name), fixture_basis(name))
            r = embedding.check_normal_closure_lemma(ctx, conjugator_length)
            rep = SuiteReport(f"normal closure {name}", r.samples, r.failures)
            out.append(rep)
        return out

    def injectivity(seed: int) -> list[SuiteReport]:
        return [
            embedding.injectivity_suite(g, p, d, n(100), seed)
            for g, p in ((0, 3), (1, 1), (1, 2))
            for d in (2, 3)
        ]

    def covers_suite(seed: int) -> list[SuiteReport]:
        out = []
        for name in EXAMPLE_SPECS:
            spec = fixture_spec(name)
            out.append(covers.membership_oracle_suite(spec, n(300), seed))
            graph = covers.build_coset_graph(spec)
            out.append(covers.rewrite_roundtrip_suite(graph, fixture_basis(name), n(300), seed))
        return out

    return {
        "sequence-rule": lambda s: [mccool.sequence_rule_suite(n(500), s)],
        "covers": covers_suite,
        "torsion-square": lambda s: [embedding.commutative_square_suite(g, p, 3, n(100), s) for g, p in ((0, 3), (1, 2))],
        "injectivity": injectivity,
        "embedding": embed_suites,
        "normal-closure": closure,
        "t-squarefree": lambda s: [ends.t_squarefree_theorem_suite(g, p, n(100), s) for g, p in ((0, 2), (0, 3), (1, 2))],
        "ends-minmax": lambda s: [ends.minmax_suite(g, p, n(1000), s) for g, p in ((1, 1), (0, 3))],
        "lemma-rep": lambda s: [ends.lemma_rep_suite(g, p, n(200), s) for g, p in ((0, 3), (1, 1))],
        "order-preservation": lambda s: [ends.order_preservation_suite(n(500), s)],
    }


SUITE_NAMES = tuple(_suite_table(None))


def cmd_suites(args) -> Result:
    table = _suite_table(args.samples, args.conjugator_length)
    chosen = list(table) if args.all or not args.names else args.names
    unknown = [c for c in chosen if c not in table]
    if unknown:
        raise InputError(f"unknown suites {unknown}; choose from {list(table)}")
    reports = [r for name in chosen for r in table[name](args.seed)]
    ok = all(r.ok for r in reports)
    lines = [r.line() for r in reports]
    for r in reports:
        lines += [f"  {f}" for f in r.failures]
    return (OK if ok else NEGATIVE), lines, {"ok": ok, "suites": [r.record() for r in reports]}


def cmd_examples(args) -> Result:
    names = sorted(EXAMPLE_SPECS)
    return OK, names + [f"F4 word set: {F4_SET} over {F4_ALPHABET}"], {"covers": names, "f4_set": F4_SET}


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surfacemcg", description=__doc__)
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.add_argument("--g", type=int, help="genus (overrides alphabet inference)")
        p.add_argument("--p", type=int, help="puncture count (overrides alphabet inference)")
        p.set_defaults(func=func)
        return p

    def cover_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--example", choices=sorted(EXAMPLE_SPECS), help="bundled cover")
        p.add_argument("--spec", help="quotient spec file")
        p.add_argument("--basis", help="adapted basis file")
        p.add_argument("--punctures", dest="p_override", type=int, help="p for the paper-1 fixtures")

    p = add("graph", cmd_graph, "Whitehead graph of a word set")
    p.add_argument("set")
    p = add("surface-check", cmd_surface_check, "decide whether a word set is a surface word set")
    p.add_argument("set")
    p = add("sequence", cmd_sequence, "associated sequence of a surface word set")
    p.add_argument("set")
    p = add("recover", cmd_recover, "surface word set of a sequence")
    p.add_argument("sequence")
    p = add("nielsen", cmd_nielsen, "apply a Nielsen move, or list the admissible ones")
    p.add_argument("set")
    p.add_argument("move", nargs="?")
    p = add("verify-mcg", cmd_verify_mcg, "certify a map as a mapping class")
    p.add_argument("map")
    p.add_argument("--depth", type=int, help="also search a Nielsen factorization up to this depth")
    p = add("random", cmd_random, "random catalog element")
    p.add_argument("--length", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p = add("project", cmd_project, "normal form in the torsion quotient")
    p.add_argument("word")
    p.add_argument("--d", type=int, required=True)
    p = add("psi-check", cmd_psi_check, "induced map on the torsion quotient")
    p.add_argument("--element", required=True)
    p.add_argument("--d", type=int, required=True)
    p = add("cover-analyze", cmd_cover_analyze, "deck data and invariance of a cover")
    cover_flags(p)
    p = add("basis-verify", cmd_basis_verify, "check an adapted basis")
    cover_flags(p)
    p = add("rewrite", cmd_rewrite, "rewrite a subgroup element in the adapted basis")
    cover_flags(p)
    p.add_argument("word")
    p = add("embed", cmd_embed, "image of a mapping class under the embedding")
    cover_flags(p)
    p.add_argument("--element", required=True)
    p = add("ends-compare", cmd_ends_compare, "compare two ends")
    p.add_argument("e")
    p.add_argument("f")
    p.add_argument("--set", help="surface word set defining the order (default: standard)")
    p = add("suites", cmd_suites, "run the randomized verification suites")
    p.add_argument("names", nargs="*", help=f"suites to run: {', '.join(SUITE_NAMES)}")
    p.add_argument("--all", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--conjugator-length", type=int, default=4, help="bound L for the normal-closure check")
    p = add("examples", cmd_examples, "list bundled fixtures")
    return parser


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        code, lines, payload = args.func(args)
    except (InputError, WordSyntaxError, ValueError, KeyError, OSError) as exc:
        if args.json:
            print(json.dumps({"error": str(exc)}), file=out)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    if args.json:
        print(json.dumps(payload | {"exit": code}, sort_keys=True), file=out)
    else:
        print("\n".join(lines), file=out)
    return code


def main() -> None:
    raise SystemExit(run())
