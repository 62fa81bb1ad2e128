"""Bundled covers and word sets used by the CLI, the tests and the suites."""

from __future__ import annotations

from importlib import resources

from .covers import AdaptedBasis, FiniteQuotientSpec
from .words import Alphabet, Word

EXAMPLE1_PARITY = {"paper-1-odd": 3, "paper-1-even": 4}
EXAMPLE1_BASIS_P = (2, 3, 4, 5, 6)

# F_4 word set whose smallest and largest ends are known in closed form.
F4_SET = "aDBc [Ab] [Cd]"
F4_ALPHABET = Alphabet.free("abcd")


def example1_spec(p: int) -> FiniteQuotientSpec:
    """Every puncture generator maps to the transposition generating C2."""
    A = Alphabet.surface(0, p)
    return FiniteQuotientSpec.from_cycles(A, 2, {f"t{k}": "(1 2)" for k in range(1, p + 1)})


def example2_spec() -> FiniteQuotientSpec:
    A = Alphabet.surface(1, 0)
    return FiniteQuotientSpec.from_cycles(A, 4, {"x1": "(1 2)(3 4)", "y1": "(1 3)(2 4)"})


_C2_CUBED = ("(1 2)", "(3 4)", "(5 6)")


def example3a_spec() -> FiniteQuotientSpec:
    A = Alphabet.surface(0, 3)
    return FiniteQuotientSpec.from_cycles(A, 6, dict(zip(("t1", "t2", "t3"), _C2_CUBED)))


def example3b_spec() -> FiniteQuotientSpec:
    A = Alphabet.surface(1, 1)
    return FiniteQuotientSpec.from_cycles(A, 6, dict(zip(("x1", "y1", "t1"), _C2_CUBED)))


EXAMPLE_SPECS = {
    "paper-1-odd": lambda: example1_spec(3),
    "paper-1-even": lambda: example1_spec(4),
    "paper-2": example2_spec,
    "paper-3a": example3a_spec,
    "paper-3b": example3b_spec,
}


def fixture_spec(name: str, p: int | None = None) -> FiniteQuotientSpec:
    """Quotient spec of a named fixture; ``p`` overrides the puncture count of
    the Example 1 fixtures (its parity must match the name)."""
    if name not in EXAMPLE_SPECS:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(EXAMPLE_SPECS)}")
    if p is not None:
        return example1_spec(_example1_p(name, p))
    return EXAMPLE_SPECS[name]()


def _example1_p(name: str, p: int) -> int:
    if name not in EXAMPLE1_PARITY:
        raise ValueError("--p only applies to the paper-1 fixtures")
    if p % 2 != EXAMPLE1_PARITY[name] % 2:
        raise ValueError(f"{name} needs p of the other parity")
    return p


def example2_basis() -> AdaptedBasis:
    """``x^2, y^2`` and three conjugates of ``[x, y]^-1`` (one per lifted boundary)."""
    A = Alphabet.surface(1, 0)
    core = Word.parse("Y1 X1 y1 x1", A)
    conjugators = ("X1 Y1 Y1 x1 x1 y1 y1", "y1", "x1 y1")
    words = [Word.parse("x1 x1", A), Word.parse("y1 y1", A)]
    words += [core.conjugate_by(Word.parse(c, A)) for c in conjugators]
    return AdaptedBasis(A, ("x1", "y1", "z1", "z2", "z3"), tuple(words))


def _load_basis(stem: str, spec: FiniteQuotientSpec) -> AdaptedBasis:
    text = resources.files(__package__).joinpath("data", f"{stem}.basis").read_text()
    return AdaptedBasis.parse(text, spec.alphabet)


def fixture_basis(name: str, p: int | None = None) -> AdaptedBasis:
    if name == "paper-2":
        return example2_basis()
    spec = fixture_spec(name, p)
    if name in EXAMPLE1_PARITY:
        p = spec.alphabet.p
        if p not in EXAMPLE1_BASIS_P:
            raise ValueError(f"no bundled basis for p = {p}; bundled: {EXAMPLE1_BASIS_P}")
        return _load_basis(f"paper-1-p{p}", spec)
    return _load_basis(name, spec)
