import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charclass.exact import QC
from charclass.filtration import (CoordSystem, FormSyntaxError, LogMeroForm,
                                  classify, parse_form)

CS = CoordSystem(("z", "w"), ())
CS3 = CoordSystem(("z", "w"), ("u",))


# ---------------------------------------------------------------------------
# coordinate systems


def test_coords_require_distinct_names():
    with pytest.raises(ValueError):
        CoordSystem(("z", "z"), ())
    with pytest.raises(ValueError):
        CoordSystem(("z",), ("z",))


def test_coords_require_identifiers():
    with pytest.raises(ValueError):
        CoordSystem(("2bad",), ())


def test_interior_exponents_nonnegative():
    with pytest.raises(ValueError):
        LogMeroForm(CS3, {((0, 0, -1), ()): QC(1)})


# ---------------------------------------------------------------------------
# parsing


def test_parse_division_sugar():
    f = parse_form("dz/w^2", CS)
    assert f.terms == {((0, -2), (0,)): QC(1)}


def test_parse_two_form():
    f = parse_form("dw^dz/w^2", CS)
    # canonical ordering flips dw^dz to -dz^dw
    assert f.terms == {((0, -2), (0, 1)): QC(-1)}


def test_parse_zero():
    assert parse_form("0", CS).is_zero()


def test_parse_coefficients():
    f = parse_form("3/4 z^-1 w^2 dw + 2 dz", CS)
    assert f.terms == {((-1, 2), (1,)): QC(Fraction(3, 4)),
                       ((0, 0), (0,)): QC(2)}


def test_parse_imaginary_and_signs():
    f = parse_form("i dz - dw", CS)
    assert f.terms == {((0, 0), (0,)): QC(0, 1), ((0, 0), (1,)): QC(-1)}


def test_parse_error_reports_position():
    with pytest.raises(FormSyntaxError) as exc:
        parse_form("dz + ", CS)
    assert exc.value.pos == 5


def test_parse_unknown_variable():
    with pytest.raises(FormSyntaxError, match="unknown variable"):
        parse_form("dz + q^2 dw", CS)


def test_parse_repeated_differential_cancels():
    assert parse_form("dz^dz", CS).is_zero()


def test_printer_roundtrip_corpus():
    corpus = ["dz/w^2", "dw^dz/w^2", "2 dz + 3/4 z^-1 w^2 dw", "i dz",
              "dz - dw", "z^2 w^-3 dz^dw + 5*i dw", "-3 dz", "z^2 w^3",
              "dz^dw + dw^dz"]
    for s in corpus:
        f = parse_form(s, CS)
        assert parse_form(str(f), CS) == f


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(
    st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 3)),
    st.sets(st.integers(0, 2), max_size=3),
    st.fractions(max_denominator=6),
    st.fractions(max_denominator=6)), min_size=1, max_size=4))
def test_printer_roundtrip_random(raw_terms):
    terms = {}
    for exps, wedge, re, im in raw_terms:
        key = (exps, tuple(sorted(wedge)))
        terms[key] = terms.get(key, QC(0)) + QC(re, im)
    f = LogMeroForm(CS3, terms)
    assert parse_form(str(f), CS3) == f


# ---------------------------------------------------------------------------
# exterior calculus


def test_d_log_form_closed():
    assert parse_form("dz/z", CS).d().is_zero()


def test_d_power_rule():
    assert parse_form("z^-1", CS).d() == parse_form("-dz/z^2", CS)


def test_d_squared_zero_corpus():
    for ez, ew, eu in itertools.product(range(-2, 3), range(-2, 3),
                                        range(0, 3)):
        f = LogMeroForm(CS3, {((ez, ew, eu), ()): QC(1, Fraction(1, 2))})
        assert f.d().d().is_zero()


def test_wedge_graded_commutative():
    a = parse_form("z^2 dz", CS3)
    b = parse_form("w^-1 dw", CS3)
    assert a.wedge(b) == -(b.wedge(a))
    c = parse_form("u^2", CS3)  # 0-form commutes
    assert c.wedge(a) == a.wedge(c)


def test_leibniz_rule():
    a = parse_form("z^2 w^-1", CS)
    b = parse_form("w^3 dz", CS)
    lhs = a.wedge(b).d()
    rhs = a.d().wedge(b) + a.wedge(b.d())
    assert lhs == rhs


# ---------------------------------------------------------------------------
# filtration levels: the disc and bidisc corpus


def test_q_level_mero_one_form():
    f = parse_form("dz/w^2", CS)
    assert f.q_level() == 1
    r = f.restrict_diagonal("z", "w", "t")
    assert r == parse_form("dt/t^2", CoordSystem(("t",), ()))
    assert r.q_level() == 0


def test_q_level_two_form_not_q2():
    f = parse_form("dw^dz/w^2", CS)
    assert f.q_level() == 1


def test_disc_cases():
    assert parse_form("dw", CS).q_level() == 1
    f = parse_form("dz/z", CS)
    assert f.q_level() == 1
    assert f.f_level() == 1
    assert f.is_log()


def test_not_log_cases():
    assert not parse_form("dz/z^3", CS).is_log()
    assert parse_form("dz/z^3", CS).f_level() == -1
    # pole of order one without its own differential is not log
    assert not parse_form("z^-1 dw", CS).is_log()
    assert parse_form("z^-1 dw", CS).q_level() == 1


def test_zero_form_levels():
    z = parse_form("0", CS)
    assert z.q_level() is None
    assert z.f_level() is None


def test_q_at_least_f_on_log_corpus():
    for ez, ew in itertools.product(range(-1, 3), range(-1, 3)):
        for wedge in [(), (0,), (1,), (0, 1)]:
            f = LogMeroForm(CS, {((ez, ew), wedge): QC(1)})
            if f.is_log():
                assert f.q_level() >= f.f_level()


def test_d_preserves_q_exhaustive():
    for ez, ew, eu in itertools.product(range(-3, 4), range(-3, 4),
                                        range(0, 4)):
        for r in range(4):
            for wedge in itertools.combinations(range(3), r):
                f = LogMeroForm(CS3, {((ez, ew, eu), wedge): QC(1)})
                df = f.d()
                if not df.is_zero():
                    assert df.q_level() >= f.q_level()


def test_q_not_multiplicative():
    a = parse_form("dw", CS)
    b = parse_form("dz/w^2", CS)
    assert a.q_level() + b.q_level() == 2
    assert a.wedge(b).q_level() == 1


def test_diagonal_restriction_not_q_functorial():
    f = parse_form("dz/w^2", CS)
    assert f.restrict_diagonal("z", "w", "t").q_level() < f.q_level()


# ---------------------------------------------------------------------------
# diagonal restriction


def test_restrict_merges_differentials():
    f = parse_form("dz + dw", CS)
    r = f.restrict_diagonal("z", "w", "t")
    assert r == parse_form("2 dt", CoordSystem(("t",), ()))


def test_restrict_kills_two_form():
    f = parse_form("dz^dw", CS)
    assert f.restrict_diagonal("z", "w", "t").is_zero()


def test_restrict_free_form_is_renaming():
    cs = CoordSystem(("z", "w", "v"), ())
    f = parse_form("v^-1 dv", cs)
    r = f.restrict_diagonal("z", "w", "t")
    assert r == parse_form("dv/v", CoordSystem(("t", "v"), ()))


def test_restrict_name_clash():
    cs = CoordSystem(("z", "w", "v"), ())
    with pytest.raises(ValueError, match="name clash"):
        parse_form("dz", cs).restrict_diagonal("z", "w", "v")


def test_restrict_requires_boundary_vars():
    with pytest.raises(ValueError):
        parse_form("du", CS3).restrict_diagonal("z", "u", "t")


# ---------------------------------------------------------------------------
# classification line


def test_classify_lines():
    assert classify(parse_form("dz/w^2", CS)) == \
        "form ∈ Q^1 \\ Q^2, F-level -1, log: no"
    assert classify(parse_form("dz/z", CS)) == \
        "form ∈ Q^1 \\ Q^2, F-level 1, log: yes"
    assert "Q^0" in classify(parse_form("dz/z^3", CS))
