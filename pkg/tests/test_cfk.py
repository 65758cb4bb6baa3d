from __future__ import annotations

import pytest
import sympy

from cablefloer.cfk import (
    BasisError,
    ComplexSyntaxError,
    DanglingArrowError,
    DuplicateIdError,
    ModelComplex,
    catalog,
    catalog_get,
    d_squared,
    emit_complex,
    epsilon,
    euler_characteristic,
    genus,
    mirror,
    nu,
    parse_complex,
    simultaneous_basis,
    staircase_from_alexander,
    tau,
    tau_from_definition,
    torus_alexander,
    validate_complex,
)
from cablefloer.laurent import Laurent

t = sympy.symbols("t")


def sympy_torus_alexander(a: int, b: int) -> Laurent:
    """(t^ab - 1)(t - 1) / ((t^a - 1)(t^b - 1)), centred, computed by sympy."""
    q = sympy.cancel((t ** (a * b) - 1) * (t - 1) / ((t**a - 1) * (t**b - 1)))
    poly = sympy.Poly(sympy.expand(q), t)
    shift = poly.degree() // 2
    return Laurent.from_dict({e[0] - shift: int(c) for e, c in poly.terms()})


# (tau, epsilon, genus) are standard knot invariants of these knots
EXPECTED = {
    "unknot": (0, 0, 0),
    "trefoil_rh": (1, 1, 1),
    "trefoil_lh": (-1, -1, 1),
    "figure_eight": (0, 0, 1),
    "torus(2,5)": (2, 1, 2),
    "torus(3,4)": (3, 1, 3),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_catalog_invariants(name):
    C = catalog_get(name)
    assert validate_complex(C).ok
    assert d_squared(C) == []
    assert (tau(C), epsilon(C), genus(C)) == EXPECTED[name]
    assert tau(C) == tau_from_definition(C)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_mirror_negates_tau_and_epsilon(name):
    C = catalog_get(name)
    M = mirror(C)
    assert validate_complex(M).ok
    assert (tau(M), epsilon(M)) == (-tau(C), -epsilon(C))


def test_nu_values():
    assert nu(catalog_get("trefoil_rh")) == 1
    assert nu(catalog_get("trefoil_lh")) == 0  # tau + 1 signals epsilon = -1
    assert nu(catalog_get("figure_eight")) == 0


@pytest.mark.parametrize("ab", [(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)])
def test_torus_alexander_and_staircase(ab):
    delta = torus_alexander(*ab)
    assert delta == sympy_torus_alexander(*ab)
    S = staircase_from_alexander(delta)
    assert validate_complex(S).ok
    assert euler_characteristic(S) == delta
    assert tau(S) == genus(S) == (ab[0] - 1) * (ab[1] - 1) // 2


def test_figure_eight_euler():
    assert euler_characteristic(catalog_get("figure_eight")) == Laurent.parse("-t+3-t^-1")


def test_simultaneous_basis_of_figure_eight():
    D, v, h = simultaneous_basis(catalog_get("figure_eight"))
    assert v.distinguished == h.distinguished
    assert len(v.pairs) == len(h.pairs) == 2


def test_basis_failure_reports_obstruction():
    # a lone diagonal arrow from a three-generator complex is neither vertical nor horizontal
    C = ModelComplex.build([("a", 1, 1), ("b", -1, 0), ("c", 0, 0)], [("a", "b", 1)], "diag")
    with pytest.raises(BasisError):
        simultaneous_basis(C)


def test_validation_reports_each_violation():
    C = ModelComplex.build([("a", 0, 0), ("b", 0, 0)], [("a", "b", 0)], "bad")
    issues = validate_complex(C).issues
    assert any("Maslov" in s for s in issues)
    assert any("even number" in s for s in issues)


def test_text_format_roundtrip():
    for C in catalog().values():
        text = emit_complex(C)
        again = parse_complex(text, C.name)
        assert again == C
        assert emit_complex(again) == text


def test_parse_errors():
    with pytest.raises(ComplexSyntaxError):
        parse_complex("")
    with pytest.raises(ComplexSyntaxError) as exc:
        parse_complex("cfk v1\ngen a A=0 M=x\n")
    assert exc.value.line == 2
    with pytest.raises(DuplicateIdError):
        parse_complex("cfk v1\ngen a A=0 M=0\ngen a A=1 M=1\n")
    with pytest.raises(DanglingArrowError):
        parse_complex("cfk v1\ngen a A=0 M=0\narrow a b U=0\n")


def test_parse_accepts_comments():
    C = parse_complex("# trefoil\ncfk v1\ngen x1 A=1 M=0 # top\ngen x2 A=0 M=-1\n"
                      "gen x3 A=-1 M=-2\narrow x2 x3 U=0\narrow x2 x1 U=1\n", "trefoil_rh")
    assert C == catalog_get("trefoil_rh")
