"""Torus algebra A(T^2) over F_2 and the extended grading group.

Half-integers are stored doubled so that every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

IDEMPOTENTS = ("i0", "i1")
CHORDS = ("1", "2", "3", "12", "23", "123")
BASIS = IDEMPOTENTS + CHORDS

# (left idempotent, right idempotent) with rho_I = iota_left * rho_I * iota_right
CHORD_IDEMPOTENTS = {
    "1": ("i0", "i1"),
    "2": ("i1", "i0"),
    "3": ("i0", "i1"),
    "12": ("i0", "i0"),
    "23": ("i1", "i1"),
    "123": ("i0", "i1"),
}

_CHORD_PRODUCTS = {
    ("1", "2"): "12",
    ("2", "3"): "23",
    ("12", "3"): "123",
    ("1", "23"): "123",
}


def chord_product(first: str, second: str) -> str | None:
    """Product rho_first * rho_second of two Reeb chords, or None when it vanishes."""
    return _CHORD_PRODUCTS.get((first, second))


def _basis_mul(x: str, y: str) -> str | None:
    if x in IDEMPOTENTS and y in IDEMPOTENTS:
        return x if x == y else None
    if x in IDEMPOTENTS:
        return y if CHORD_IDEMPOTENTS[y][0] == x else None
    if y in IDEMPOTENTS:
        return x if CHORD_IDEMPOTENTS[x][1] == y else None
    return chord_product(x, y)


@dataclass(frozen=True)
class AlgebraElement:
    """An F_2-linear combination of basis labels of A(T^2)."""

    support: frozenset = frozenset()

    def __post_init__(self):
        bad = set(self.support) - set(BASIS)
        if bad:
            raise ValueError(f"unknown algebra basis labels: {sorted(bad)}")

    @classmethod
    def of(cls, *labels: str) -> "AlgebraElement":
        acc: set[str] = set()
        for lab in labels:
            acc ^= {lab}
        return cls(frozenset(acc))

    @classmethod
    def unit(cls) -> "AlgebraElement":
        return cls.of("i0", "i1")

    @classmethod
    def chord(cls, label: str) -> "AlgebraElement":
        return cls.of(label)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.support ^ other.support)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return alg_mul(self, other)

    def is_zero(self) -> bool:
        return not self.support

    def __repr__(self) -> str:
        if not self.support:
            return "0"
        order = {lab: k for k, lab in enumerate(BASIS)}
        return " + ".join(
            lab if lab in IDEMPOTENTS else f"rho{lab}"
            for lab in sorted(self.support, key=order.__getitem__)
        )


def alg_mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    acc: set[str] = set()
    for a in x.support:
        for b in y.support:
            c = _basis_mul(a, b)
            if c is not None:
                acc ^= {c}
    return AlgebraElement(frozenset(acc))


# ---------------------------------------------------------------------------
# grading group


@dataclass(frozen=True, order=True)
class ExtendedGrading:
    """Element (m; i, j; n) of G x Z, stored as (2m, 2i, 2j, n)."""

    m2: int = 0
    i2: int = 0
    j2: int = 0
    n: int = 0

    def __post_init__(self):
        if (self.i2 + self.j2) % 2:
            raise ValueError("spin^c part must satisfy i + j in Z")

    @classmethod
    def from_halves(cls, m, i, j, n: int = 0) -> "ExtendedGrading":
        vals = [Fraction(v) * 2 for v in (m, i, j)]
        if any(v.denominator != 1 for v in vals):
            raise ValueError("grading components must be half-integers")
        return cls(int(vals[0]), int(vals[1]), int(vals[2]), int(n))

    @property
    def maslov(self) -> Fraction:
        return Fraction(self.m2, 2)

    @property
    def spinc(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.i2, 2), Fraction(self.j2, 2)

    def __mul__(self, other: "ExtendedGrading") -> "ExtendedGrading":
        return gr_compose(self, other)

    def inverse(self) -> "ExtendedGrading":
        return gr_invert(self)

    def __pow__(self, k: int) -> "ExtendedGrading":
        return gr_power(self, k)

    def __str__(self) -> str:
        return "({}; {}, {}; {})".format(
            _fmt_half(self.m2), _fmt_half(self.i2), _fmt_half(self.j2), self.n
        )


def _fmt_half(v2: int) -> str:
    return str(v2 // 2) if v2 % 2 == 0 else f"{v2}/2"


IDENTITY = ExtendedGrading()
LAMBDA = ExtendedGrading(2, 0, 0, 0)
U_GRADING = ExtendedGrading(0, 0, 0, -1)


def gr_compose(g1: ExtendedGrading, g2: ExtendedGrading) -> ExtendedGrading:
    # doubled: 2(i1 j2 - i2 j1) = (I1 J2 - I2 J1) / 2, always an integer
    cross = g1.i2 * g2.j2 - g2.i2 * g1.j2
    return ExtendedGrading(
        g1.m2 + g2.m2 + cross // 2, g1.i2 + g2.i2, g1.j2 + g2.j2, g1.n + g2.n
    )


def gr_invert(g: ExtendedGrading) -> ExtendedGrading:
    # the commutator term vanishes for g * g^{-1} since the spin^c parts are parallel
    return ExtendedGrading(-g.m2, -g.i2, -g.j2, -g.n)


def gr_power(g: ExtendedGrading, k: int) -> ExtendedGrading:
    # powers of one element commute, so the cross term is zero throughout
    return ExtendedGrading(k * g.m2, k * g.i2, k * g.j2, k * g.n)


def gr_product(items: Iterable[ExtendedGrading]) -> ExtendedGrading:
    acc = IDENTITY
    for g in items:
        acc = gr_compose(acc, g)
    return acc


def lam(k: int = 1) -> ExtendedGrading:
    return gr_power(LAMBDA, k)


def upow(k: int = 1) -> ExtendedGrading:
    return gr_power(U_GRADING, k)


_BASE_CHORD_GRADINGS = {
    "1": ExtendedGrading(-1, 1, -1, 0),
    "2": ExtendedGrading(-1, 1, 1, 0),
    "3": ExtendedGrading(-1, -1, 1, 0),
}


def gr_of_chord(label: str) -> ExtendedGrading:
    """Grading of rho_I; composites use gr(rho_IJ) = lambda gr(rho_J) gr(rho_I)."""
    label = str(label)
    if label in _BASE_CHORD_GRADINGS:
        return _BASE_CHORD_GRADINGS[label]
    if label not in CHORDS:
        raise ValueError(f"unknown chord label {label!r}")
    head, tail = label[:-1], label[-1]
    return gr_product([LAMBDA, gr_of_chord(tail), gr_of_chord(head)])


# ---------------------------------------------------------------------------
# double cosets


class CosetReductionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CanonicalGrading:
    """Normal form lambda^a u^b of a double coset; as a group element (a; 0, 0; -b)."""

    a: int
    b: int

    def element(self) -> ExtendedGrading:
        return gr_compose(lam(self.a), upow(self.b))

    def __str__(self) -> str:
        return f"({self.a};0,0;{self.b})"


def _solve_periods(x, g, h) -> tuple[int, int]:
    # s * spinc(g) + t * spinc(h) = -spinc(x)
    det = g.i2 * h.j2 - h.i2 * g.j2
    if det == 0:
        raise CosetReductionError("periods have dependent spin^c parts")
    rx, ry = -x.i2, -x.j2
    s_num = rx * h.j2 - h.i2 * ry
    t_num = g.i2 * ry - rx * g.j2
    if s_num % det or t_num % det:
        raise CosetReductionError(
            f"no integral period exponents kill the spin^c part of {x}"
        )
    return s_num // det, t_num // det


def coset_reduce(
    x: ExtendedGrading, g_period: ExtendedGrading, h_period: ExtendedGrading
) -> CanonicalGrading:
    """Reduce x in <g> \\ G~ / <h> to lambda^a u^b."""
    s, t = _solve_periods(x, g_period, h_period)
    red = gr_product([gr_power(g_period, s), x, gr_power(h_period, t)])
    assert red.i2 == 0 and red.j2 == 0
    if red.m2 % 2:
        raise CosetReductionError(f"reduced Maslov part of {x} is not integral")
    return CanonicalGrading(red.m2 // 2, -red.n)
