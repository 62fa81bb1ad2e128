"""Stallings folding of a wedge of loops, with edge labels in the free
group on the loops.

Every edge carries a label, a reduced word over the wedge generators
``1..r``.  The labels are kept consistent through each fold so that the
product of labels along any closed path at the base vertex equals that
path's reading, rewritten in the wedge generators.  After folding, this
gives both membership (read a word from the base) and rewriting (multiply
the labels met along the way).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .words import free_reduce, invert_letters

Label = tuple[int, ...]


def _mul(*parts: Label) -> Label:
    return free_reduce(a for part in parts for a in part)


@dataclass
class FoldedGraph:
    """Deterministic labelled graph produced by :func:`fold_wedge`."""

    base: int
    out: dict[int, dict[int, tuple[int, Label]]]
    has_relation: bool = False
    vertices: list[int] = field(default_factory=list)

    def edge(self, v: int, letter: int) -> tuple[int, Label]:
        return self.out[v][letter]

    def read(self, letters, start: int | None = None) -> tuple[int, Label] | None:
        """Follow ``letters`` from ``start``; ``None`` if the path leaves the graph."""
        v = self.base if start is None else start
        label: list[int] = []
        for a in letters:
            step = self.out.get(v, {}).get(a)
            if step is None:
                return None
            v, lab = step
            for b in lab:
                if label and label[-1] == -b:
                    label.pop()
                else:
                    label.append(b)
        return v, tuple(label)

    def is_rose(self, rank: int) -> bool:
        """True when the graph is one vertex carrying a loop for each generator."""
        if len(self.vertices) != 1:
            return False
        loops = self.out.get(self.base, {})
        return all(i in loops and -i in loops for i in range(1, rank + 1))


def fold_wedge(words: list[tuple[int, ...]], rank: int) -> FoldedGraph:
    """Fold the wedge of loops spelling ``words`` (over a rank-``rank`` alphabet).

    The ``j``-th loop receives label ``(j+1,)`` on its first edge.
    """
    del rank  # the alphabet size is implicit in the letters
    edges: dict[int, list] = {}  # id -> [src, gen>0, dst, label]
    incident: dict[int, set[int]] = defaultdict(set)
    next_vertex = 1
    next_edge = 0
    base = 0
    incident[base]

    def add_edge(src: int, letter: int, dst: int, label: Label) -> None:
        nonlocal next_edge
        if letter < 0:
            src, dst, letter, label = dst, src, -letter, invert_letters(label)
        edges[next_edge] = [src, letter, dst, label]
        incident[src].add(next_edge)
        incident[dst].add(next_edge)
        next_edge += 1

    for j, word in enumerate(words):
        if not word:
            continue
        v = base
        for pos, a in enumerate(word):
            last = pos == len(word) - 1
            w = base if last else next_vertex
            if not last:
                next_vertex += 1
                incident[w]
            add_edge(v, a, w, (j + 1,) if pos == 0 else ())
            v = w

    has_relation = False

    def view(eid: int, v: int) -> list[tuple[int, int, Label]]:
        """Half-edges of ``eid`` leaving ``v`` as (signed letter, far end, label)."""
        src, a, dst, lab = edges[eid]
        out = []
        if src == v:
            out.append((a, dst, lab))
        if dst == v:
            out.append((-a, src, invert_letters(lab)))
        return out

    def remove(eid: int) -> None:
        src, _, dst, _ = edges.pop(eid)
        incident[src].discard(eid)
        incident[dst].discard(eid)

    def find_fold(v: int):
        seen: dict[int, tuple[int, int, Label]] = {}
        for eid in sorted(incident[v]):
            for letter, far, lab in view(eid, v):
                if letter in seen and seen[letter][0] != eid:
                    return seen[letter], (eid, far, lab)
                seen.setdefault(letter, (eid, far, lab))
        return None

    work = sorted(incident)
    while work:
        v = work.pop()
        if v not in incident:
            continue
        found = find_fold(v)
        if found is None:
            continue
        (e1, v1, l1), (e2, v2, l2) = found
        work.append(v)
        if v1 == v2:
            if l1 != l2:
                has_relation = True
            remove(e2)
            continue
        if v2 == base:
            e1, v1, l1, e2, v2, l2 = e2, v2, l2, e1, v1, l1
        # Eliminate v2 into v1.  Paths that entered v2 through e2 (label l2)
        # now enter v1 through e1 (label l1); delta re-bases v2's edges.
        delta = _mul(invert_letters(l1), l2)
        delta_inv = invert_letters(delta)
        for eid in list(incident[v2]):
            src, a, dst, lab = edges[eid]
            new_lab = _mul(delta if src == v2 else (), lab, delta_inv if dst == v2 else ())
            remove(eid)
            edges[eid] = [v1 if src == v2 else src, a, v1 if dst == v2 else dst, new_lab]
            incident[edges[eid][0]].add(eid)
            incident[edges[eid][2]].add(eid)
        del incident[v2]
        work.append(v1)

    out: dict[int, dict[int, tuple[int, Label]]] = {v: {} for v in incident}
    for src, a, dst, lab in edges.values():
        out[src][a] = (dst, lab)
        out[dst][-a] = (src, invert_letters(lab))
    return FoldedGraph(base, out, has_relation, sorted(incident))
