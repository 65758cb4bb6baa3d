from __future__ import annotations

import pytest

from cablefloer.algebra import gr_compose, gr_invert, gr_of_chord, gr_power, lam
from cablefloer.cfd import DArrow, build_cfd, check_typeD, grade_cfd, h_period, right_period_exponent
from cablefloer.cfk import catalog, catalog_get, tau

CATALOG = sorted(catalog())
FRAMINGS = range(-3, 4)


def test_unknot_zero_framing_is_a_self_loop():
    D = build_cfd(catalog_get("unknot"), 0)
    assert [g.id for g in D.generators] == ["x0"]
    assert D.arrows == [DArrow("x0", "x0", "12")]
    assert D.t == 0


def test_unknot_negative_framing_unstable_chain():
    D = build_cfd(catalog_get("unknot"), -1)
    assert D.t == 1
    assert sorted(g.id for g in D.generators) == ["mu1", "x0"]
    assert sorted(D.arrows) == [DArrow("x0", "mu1", "1"), DArrow("x0", "mu1", "3")]


def test_trefoil_zero_framing_shape():
    D = build_cfd(catalog_get("trefoil_rh"), 0)
    roles = sorted(g.role.split("(")[0] for g in D.generators)
    assert roles == ["hchain", "kappa", "mu", "mu", "xi", "xi", "xi"]
    # vertical chain 2 arrows, horizontal chain 2, unstable chain of length t = 2 has 3
    assert len(D.arrows) == 7


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("r", FRAMINGS)
def test_type_d_condition_and_counts(name, r):
    C = catalog_get(name)
    D = build_cfd(C, r)
    assert check_typeD(D).ok
    assert D.t == 2 * tau(C) - r
    n_iota1 = sum(l for *_, l in D.vertical) + sum(k for *_, k in D.horizontal) + abs(D.t)
    assert sum(g.idempotent == "i1" for g in D.generators) == n_iota1
    assert sum(g.idempotent == "i0" for g in D.generators) == len(C.generators)


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("r", FRAMINGS)
def test_gradings_follow_the_arrow_rule(name, r):
    D = build_cfd(catalog_get(name), r)
    GD = grade_cfd(D)
    for a in D.arrows:
        want = gr_compose(gr_compose(lam(-1), gr_invert(gr_of_chord(a.chord))), GD.gradings[a.src])
        diff = gr_compose(gr_invert(GD.gradings[a.dst]), want)
        assert right_period_exponent(diff, GD.h) is not None


def test_iota0_grading_formula():
    C = catalog_get("trefoil_lh")
    GD = grade_cfd(build_cfd(C, 1))
    xi0 = build_cfd(C, 1).xi0
    assert GD.gradings[xi0] == gr_compose(lam(2), gr_of_chord("23"))


def test_eta0_of_epsilon_one_companion():
    C = catalog_get("trefoil_rh")
    D = build_cfd(C, 0)
    assert grade_cfd(D).gradings[D.eta0] == gr_power(gr_of_chord("23"), tau(C))


def test_kappa_grading_formula():
    C = catalog_get("trefoil_rh")
    D = build_cfd(C, 0)
    src, dst, _ = D.vertical[0]
    d, m = C.gen(dst).A, C.gen(dst).M
    want = gr_compose(
        gr_compose(lam(-1), gr_invert(gr_of_chord("123"))),
        gr_compose(lam(m - 2 * d), gr_power(gr_of_chord("23"), -d)),
    )
    assert grade_cfd(D).gradings["kappa1_1"] == want


def test_h_period_at_zero_framing():
    assert h_period(0) == gr_compose(lam(-1), gr_invert(gr_of_chord("12")))
