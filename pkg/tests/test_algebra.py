from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cablefloer.algebra import (
    CHORD_IDEMPOTENTS,
    CHORDS,
    IDENTITY,
    AlgebraElement,
    CanonicalGrading,
    CosetReductionError,
    ExtendedGrading,
    alg_mul,
    chord_product,
    coset_reduce,
    gr_compose,
    gr_invert,
    gr_of_chord,
    gr_power,
    lam,
    upow,
)
from cablefloer.cfd import h_period


def interval(label: str) -> tuple:
    """Chord rho_I as the arc [first, last + 1] on the boundary circle."""
    return int(label[0]), int(label[-1]) + 1


def test_chord_products_match_arc_concatenation():
    # oracle: rho_I rho_J is the concatenated arc when I ends where J starts
    for a, b in itertools.product(CHORDS, repeat=2):
        (s1, e1), (s2, e2) = interval(a), interval(b)
        want = "".join(str(k) for k in range(s1, e2)) if e1 == s2 else None
        assert chord_product(a, b) == want


def test_idempotents_compose_along_products():
    for a, b in itertools.product(CHORDS, repeat=2):
        prod = chord_product(a, b)
        if prod:
            assert CHORD_IDEMPOTENTS[a][1] == CHORD_IDEMPOTENTS[b][0]
            assert CHORD_IDEMPOTENTS[prod] == (CHORD_IDEMPOTENTS[a][0], CHORD_IDEMPOTENTS[b][1])


def test_algebra_is_associative_with_unit():
    basis = ["i0", "i1"] + list(CHORDS)
    unit = AlgebraElement.of("i0", "i1")
    for x in basis:
        ex = AlgebraElement.of(x)
        assert alg_mul(unit, ex) == ex == alg_mul(ex, unit)
    for x, y, z in itertools.product(basis, repeat=3):
        ex, ey, ez = (AlgebraElement.of(v) for v in (x, y, z))
        assert alg_mul(alg_mul(ex, ey), ez) == alg_mul(ex, alg_mul(ey, ez))


def test_rejects_unknown_labels():
    with pytest.raises(ValueError):
        AlgebraElement.of("13")
    with pytest.raises(ValueError):
        gr_of_chord("13")


def test_base_chord_gradings():
    assert gr_of_chord("1") == ExtendedGrading.from_halves("-1/2", "1/2", "-1/2")
    assert gr_of_chord("2") == ExtendedGrading.from_halves("-1/2", "1/2", "1/2")
    assert gr_of_chord("3") == ExtendedGrading.from_halves("-1/2", "-1/2", "1/2")


def test_composite_chords_are_lambda_times_pieces():
    for label in ("12", "23", "123"):
        head, tail = label[:-1], label[-1]
        assert gr_of_chord(label) == gr_compose(lam(), gr_compose(gr_of_chord(tail), gr_of_chord(head)))
    # rho_23 sits in the kernel of the spin^c projection up to sign: (-1/2; 0, 1; 0)
    assert gr_of_chord("23") == ExtendedGrading.from_halves("-1/2", 0, 1)


def test_half_integer_parity_is_enforced():
    with pytest.raises(ValueError):
        ExtendedGrading(0, 1, 0, 0)
    assert str(ExtendedGrading.from_halves("3/2", "1/2", "1/2", 2)) == "(3/2; 1/2, 1/2; 2)"


halves = st.integers(-12, 12)


@st.composite
def elements(draw):
    i2 = draw(halves)
    j2 = draw(halves.filter(lambda v: (v + i2) % 2 == 0))
    return ExtendedGrading(draw(halves), i2, j2, draw(st.integers(-6, 6)))


@given(elements(), elements(), elements())
def test_group_axioms(x, y, z):
    assert gr_compose(gr_compose(x, y), z) == gr_compose(x, gr_compose(y, z))
    assert gr_compose(x, gr_invert(x)) == IDENTITY
    assert gr_compose(IDENTITY, x) == x


@given(elements(), st.integers(-5, 5), st.integers(-5, 5))
def test_power_is_repeated_product(x, a, b):
    assert gr_power(x, a + b) == gr_compose(gr_power(x, a), gr_power(x, b))


@given(elements(), elements())
def test_commutator_is_central_lambda_power(x, y):
    comm = gr_compose(gr_compose(x, y), gr_invert(gr_compose(y, x)))
    assert comm.i2 == comm.j2 == comm.n == 0
    assert comm.m2 % 2 == 0


def test_lambda_and_u_are_central():
    for c in CHORDS:
        g = gr_of_chord(c)
        for z in (lam(), upow()):
            assert gr_compose(z, g) == gr_compose(g, z)


def test_canonical_grading_roundtrip():
    c = CanonicalGrading(-1, 2)
    assert str(c) == "(-1;0,0;2)"
    assert c.element() == gr_compose(lam(-1), upow(2))


def test_coset_reduce_identity_and_periods():
    g = gr_compose(upow(-3), gr_of_chord("23"))
    h = h_period(0)
    assert coset_reduce(IDENTITY, g, h) == CanonicalGrading(0, 0)
    assert coset_reduce(g, g, h) == CanonicalGrading(0, 0)
    # gr(rho_23) ~ u^3 modulo g = u^-3 gr(rho_23)
    assert coset_reduce(gr_of_chord("23"), g, h) == CanonicalGrading(0, 3)


def test_coset_reduce_rejects_dependent_periods():
    g = gr_of_chord("23")
    with pytest.raises(CosetReductionError):
        coset_reduce(IDENTITY, g, gr_power(g, 2))


@settings(max_examples=200)
@given(elements(), st.integers(-4, 4), st.integers(-4, 4), st.integers(-3, 3))
def test_coset_reduce_is_period_invariant(x, s, t, r):
    g = gr_compose(upow(-3), gr_of_chord("23"))
    h = h_period(r)
    try:
        base = coset_reduce(x, g, h)
    except CosetReductionError:
        return
    moved = gr_compose(gr_compose(gr_power(g, s), x), gr_power(h, t))
    assert coset_reduce(moved, g, h) == base
