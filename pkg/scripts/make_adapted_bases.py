"""Build adapted bases for the bundled cover fixtures.

Run from the repository root:  python3 scripts/make_adapted_bases.py

The lifted surface word set of ``H`` (written over a Schreier basis) is
normalized with admissible sequence moves into standard shape: handle
blocks ``(a, b, a^-1, b^-1)`` followed by adjacent pairs ``(c, c^-1)``.
The inverse of the accumulated automorphism then sends the standard
generators to an adapted basis.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

from surfacemcg.covers import (
    AdaptedBasis,
    build_coset_graph,
    deck_data,
    schreier_basis,
    verify_adapted_basis,
)
from surfacemcg.fixtures import EXAMPLE1_BASIS_P, example1_spec, fixture_spec
from surfacemcg.folding import fold_wedge
from surfacemcg.whitehead import SurfaceWordSet, associated_sequence, recover_set
from surfacemcg.words import Alphabet, CyclicWord, Word, boundary_word, conjugate_eq, free_reduce, reduce

OUT = Path(__file__).resolve().parent.parent / "src" / "surfacemcg" / "data"


class Normalizer:
    """Sequence normalization with the inverse automorphism tracked alongside.

    ``inv[a-1]`` is the current preimage of letter ``a`` (as letters over the
    original alphabet).  A move ``a -> a b`` updates ``inv(a)`` to
    ``inv(a) inv(b)^-1``.
    """

    def __init__(self, seq: tuple[int, ...]):
        self.seq = list(seq)
        rank = len(seq) // 2
        self.inv = [(i,) for i in range(1, rank + 1)]
        self.moves = 0

    def preimage(self, a: int) -> tuple[int, ...]:
        w = self.inv[abs(a) - 1]
        return w if a > 0 else tuple(-b for b in reversed(w))

    def _apply(self, a: int, b: int) -> None:
        """Record the automorphism ``a -> a b`` and its inverse update."""
        image = free_reduce(self.preimage(a) + self.preimage(-b))
        if a > 0:
            self.inv[a - 1] = image
        else:
            self.inv[-a - 1] = tuple(-c for c in reversed(image))
        self.moves += 1

    def r1(self, i: int) -> None:
        """Entry ``e`` right of ``c`` jumps to just before ``c^-1``."""
        e, c = self.seq[i], self.seq[i - 1]
        self._apply(-e, -c)
        self.seq.pop(i)
        self.seq.insert(self.seq.index(-c), e)

    def r2(self, i: int) -> None:
        """Entry ``e`` left of ``c`` jumps to just after ``c^-1``."""
        e, c = self.seq[i], self.seq[i + 1]
        self._apply(-e, -c)
        self.seq.pop(i)
        self.seq.insert(self.seq.index(-c) + 1, e)

    def pos(self, a: int) -> int:
        return self.seq.index(a)

    def _crossing(self, start: int):
        n = len(self.seq)
        for i in range(start, n):
            j = self.pos(-self.seq[i])
            if j < i:
                continue
            for k in range(i + 1, j):
                l = self.pos(-self.seq[k])
                if l > j:
                    return self.seq[i], self.seq[k]
        return None

    def unnest(self, start: int) -> None:
        while True:
            for i in range(start, len(self.seq) - 2):
                j = self.pos(-self.seq[i])
                if j > i + 1 and self.seq[i + 2] == -self.seq[i + 1]:
                    self.r2(i)
                    break
            else:
                return

    def swap_pairs(self, i: int) -> None:
        """``(p, p^-1, q, q^-1)`` at ``i`` becomes ``(q, q^-1, p, p^-1)``."""
        self.r1(i + 2)
        self.r1(i + 3)


def commute_block(nz: Normalizer, a: int) -> None:
    """Move the entry left of block ``(a, b, a^-1, b^-1)`` to its right."""
    u = nz.seq[nz.pos(a) - 1]
    for _ in range(4):
        nz.r2(nz.pos(u))


def normalize_handles(nz: Normalizer) -> int:
    start = 0
    while (found := nz._crossing(start)) is not None:
        a, b = found
        while nz.pos(b) != nz.pos(a) + 1:
            nz.r1(nz.pos(a) + 1)
        while nz.pos(-a) != nz.pos(b) + 1:
            nz.r1(nz.pos(b) + 1)
        while nz.pos(-b) != nz.pos(-a) + 1:
            nz.r1(nz.pos(-a) + 1)
        while nz.pos(a) != start:
            commute_block(nz, a)
        start += 4
    return start // 4


def normalize(seq: tuple[int, ...], pair_key=None) -> tuple[Normalizer, int]:
    """Bring ``seq`` to standard shape; ``pair_key(nz, letter)`` orders the pairs."""
    nz = Normalizer(seq)
    g = normalize_handles(nz)
    nz.unnest(4 * g)
    if pair_key is not None:
        n = len(nz.seq)
        changed = True
        while changed:
            changed = False
            for i in range(4 * g, n - 2, 2):
                if pair_key(nz, nz.seq[i + 2]) < pair_key(nz, nz.seq[i]):
                    nz.swap_pairs(i)
                    changed = True
    return nz, g


def standard_shape(seq: list[int], g: int) -> bool:
    for h in range(g):
        a, b, c, d = seq[4 * h : 4 * h + 4]
        if c != -a or d != -b:
            return False
    rest = seq[4 * g :]
    return all(rest[i + 1] == -rest[i] for i in range(0, len(rest), 2))


# -- lifting the boundary and punctures ---------------------------------------


def lifted_set(graph) -> tuple[SurfaceWordSet, list[Word]]:
    """Surface word set of ``H`` over the Schreier basis letters."""
    A = graph.alphabet
    data = deck_data(graph)
    S = schreier_basis(graph)
    folded = fold_wedge([w.letters for w in S], A.rank)
    names = [f"s{i}" for i in range(1, len(S) + 1)]
    B = Alphabet.free(names)

    def loop(letters, start):
        end, label = folded.read(letters, start)
        assert end == start
        return label

    tree = [folded.read(u)[0] for u in graph.tree_words]
    zbar = boundary_word(A)
    plain = Word(B, loop(zbar.letters * data.c, folded.base))
    cyclic = []
    for w in data.boundary_reps:
        cyclic.append(CyclicWord.of(reduce(B, loop(zbar.letters * data.c, tree[graph.state_of(w)]))))
    for k, reps in enumerate(data.puncture_reps, start=1):
        tb = (-A.t(k),) * data.d[k - 1]
        for w in reps:
            cyclic.append(CyclicWord.of(reduce(B, loop(tb, tree[graph.state_of(w)]))))
    return SurfaceWordSet.build(plain, cyclic), S


def adapted_basis(graph) -> AdaptedBasis:
    A = graph.alphabet
    data = deck_data(graph)
    T, S = lifted_set(graph)
    seq = associated_sequence(T)
    zc = boundary_word(A) ** data.c

    def expand(letters) -> Word:
        out: list[int] = []
        for a in letters:
            w = S[abs(a) - 1]
            out.extend(w.letters if a > 0 else w.inverse().letters)
        return reduce(A, out)

    def role(nz: Normalizer, letter: int) -> tuple[int, int]:
        w = expand(nz.preimage(letter))
        if conjugate_eq(w, zc.inverse()):
            return (0, 0)
        for k in range(1, A.p + 1):
            if conjugate_eq(w, Word.generator(A, A.t(k)) ** data.d[k - 1]):
                return (1, k)
        raise AssertionError(f"pair letter {letter} has no recognised class")

    nz, g = normalize(seq, role)
    assert standard_shape(nz.seq, g) and g == data.g_prime
    names, words = [], []
    for h in range(g):
        names.append(f"x{h + 1}")
        words.append(expand(nz.preimage(-nz.seq[4 * h])))
    for h in range(g):
        names.append(f"y{h + 1}")
        words.append(expand(nz.preimage(nz.seq[4 * h + 1])))
    pairs = nz.seq[4 * g :: 2]
    for l, c in enumerate(pairs[: data.b - 1], start=1):
        names.append(f"z{l}")
        words.append(expand(nz.preimage(c)))
    for j, c in enumerate(pairs[data.b - 1 :], start=1):
        names.append(f"t{j}")
        words.append(expand(nz.preimage(c)))
    return AdaptedBasis(A, tuple(names), tuple(words))


def self_test(trials: int = 300, seed: int = 1) -> None:
    """Normalize random sequences and compare against the direct image."""
    rng = random.Random(seed)
    for _ in range(trials):
        rank = rng.randint(1, 7)
        A = Alphabet.free([f"s{i}" for i in range(1, rank + 1)])
        seq = [s * i for i in range(1, rank + 1) for s in (1, -1)]
        rng.shuffle(seq)
        T = recover_set(seq, A)
        nz, g = normalize(tuple(seq))
        assert standard_shape(nz.seq, g), nz.seq
        final = recover_set(nz.seq, A)
        # preimages of the final set's items must be the original items
        def pull(letters):
            out = []
            for a in letters:
                out.extend(nz.preimage(a))
            return reduce(A, out)
        assert pull(final.word.letters) == T.word
        got = sorted(str(CyclicWord.of(pull(c.letters))) for c in final.cyclic)
        assert got == sorted(str(c) for c in T.cyclic)


def main(argv: list[str]) -> int:
    self_test()
    OUT.mkdir(exist_ok=True)
    targets = {f"paper-1-p{p}": example1_spec(p) for p in EXAMPLE1_BASIS_P}
    targets |= {n: fixture_spec(n) for n in ("paper-3a", "paper-3b")}
    for name, spec in targets.items():
        if argv and name not in argv:
            continue
        graph = build_coset_graph(spec)
        basis = adapted_basis(graph)
        report = verify_adapted_basis(graph, basis)
        if not report.ok:
            print(name, report.notes, file=sys.stderr)
            return 1
        (OUT / f"{name}.basis").write_text(basis.format())
        longest = max(len(w) for w in basis.words)
        print(f"{name}: {len(basis.words)} words, longest {longest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
