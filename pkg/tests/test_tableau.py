from fractions import Fraction

import pytest
from hypothesis import given, settings

from strategies import vanishing_at_zero
from tsglm.methods import METHODS, make_order4
from tsglm.poly import Poly
from tsglm.tableau import (Tableau, TableauParseError, distinct_abscissae, dump, is_explicit,
                           is_one_step, load, parse, serialize, validate)

X = Poly.x()
ONE = Poly.const(1)


def euler(c2=Fraction(1, 2), **over):
    kw = dict(c=[0, c2], a=[[None, None], [X, None]], a_tilde=None, u=[ONE, ONE],
              b=[X, None], b_tilde=None, v=ONE, name="euler2")
    kw.update(over)
    return Tableau.build(**kw)


@pytest.mark.parametrize("name", sorted(METHODS))
def test_builtins_admissible_and_explicit(name):
    t = METHODS[name]()
    assert validate(t) == []
    assert is_explicit(t)


def test_validate_reports_violations():
    assert "v(0) ≠ 1" in validate(euler(v=Poly([2])))
    assert "c2 < 0" in validate(euler(c2=Fraction(-1, 2)))
    assert "u2(0) ≠ 1" in validate(euler(u=[ONE, Poly([0, 1])]))
    assert "a21(0) ≠ 0" in validate(euler(a=[[None, None], [X + 1, None]]))


def test_is_explicit_detects_diagonal():
    assert not is_explicit(euler(a=[[X, None], [X, None]]))


def test_is_one_step():
    t = euler()
    assert is_one_step(t)
    assert not is_one_step(make_order4())
    assert is_one_step(t.to_real(), tol=1e-14)


def test_distinct_abscissae_groups():
    from tsglm.methods import make_starter
    da = distinct_abscissae(make_starter())
    assert da.c_star == (0, Fraction(1, 2), 1)
    assert da.groups == ((0,), (1, 2), (3,))


def test_shape_and_kind_errors():
    with pytest.raises(ValueError):
        Tableau.build(c=[0], a=[[None, None]], a_tilde=None, u=[ONE], b=[X], b_tilde=None, v=ONE)
    with pytest.raises(TypeError, match="scalar-kind mismatch"):
        euler(b=[Poly([0.0, 1.0], "real"), None])


@pytest.mark.parametrize("name", sorted(METHODS))
def test_round_trip_builtins(name, tmp_path):
    t = METHODS[name]()
    path = tmp_path / f"{name}.tab"
    dump(t, path)
    back = load(path)
    assert back == t
    assert back.metadata == t.metadata


@settings(max_examples=30)
@given(vanishing_at_zero(), vanishing_at_zero())
def test_round_trip_random_free_parameters(p, q):
    t = make_order4(p, q)
    assert parse(serialize(t)) == t


def test_parse_errors_carry_line_numbers():
    text = serialize(make_order4())
    lines = text.splitlines()
    broken = "\n".join(lines[:5] + ["a[2][1] = [0, 1/0]"] + lines[6:])
    with pytest.raises(TableauParseError) as exc:
        parse(broken)
    assert exc.value.line is not None
    with pytest.raises(TableauParseError):
        parse("\n".join(ln for ln in lines if not ln.startswith("v ")))
    with pytest.raises(TableauParseError):
        parse("garbage")
