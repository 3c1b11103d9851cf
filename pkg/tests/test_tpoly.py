import pytest
from hypothesis import given, strategies as st

from degmaps.errors import NegativeValuation
from degmaps.scalars import GaussRat, INF, gr, rat
from degmaps.tpoly import TPoly, series_quotient, tp


def tpolys(max_terms=4):
    exponents = st.builds(rat, st.integers(-6, 6), st.integers(1, 4))
    coeffs = st.builds(
        GaussRat,
        st.builds(rat, st.integers(-20, 20), st.integers(1, 6)),
        st.builds(rat, st.integers(-20, 20), st.integers(1, 6)),
    )
    return st.lists(st.tuples(exponents, coeffs), max_size=max_terms).map(
        lambda pairs: TPoly(dict(pairs))
    )


def test_val_examples():
    assert TPoly({2: 1, 5: 3}).val() == 2
    assert TPoly().val() == INF
    assert TPoly({rat(-1, 2): gr("1+i"), 1: 1}).val() == rat(-1, 2)


def test_reduce0_examples():
    assert TPoly({0: 1, 1: 1}).reduce0() == gr(1)
    assert TPoly({rat(1, 2): 1}).reduce0() == gr(0)
    assert TPoly({0: gr("2+i"), 3: 1}).reduce0() == gr("2+i")
    with pytest.raises(NegativeValuation):
        TPoly({-1: 1}).reduce0()


def test_mul_examples():
    one_plus_t = TPoly({0: 1, 1: 1})
    one_minus_t = TPoly({0: 1, 1: -1})
    assert one_plus_t * one_minus_t == TPoly({0: 1, 2: -1})
    half = TPoly({rat(1, 2): 1})
    assert half * half == TPoly({1: 1})
    assert TPoly() * one_plus_t == TPoly()


def test_rescale_examples():
    assert TPoly({rat(1, 2): 1}).rescale_exponents(2) == TPoly({1: 1})
    assert TPoly({0: 1, 1: 1}).rescale_exponents(3) == TPoly({0: 1, 3: 1})
    assert TPoly({rat(-1, 3): 1}).rescale_exponents(3) == TPoly({-1: 1})


@given(tpolys(), tpolys())
def test_val_multiplicative(x, y):
    if x.is_zero() or y.is_zero():
        assert (x * y).is_zero()
    else:
        assert (x * y).val() == x.val() + y.val()


@given(tpolys(), tpolys())
def test_ultrametric(x, y):
    s = x + y
    if s.is_zero():
        return
    lo = min(x.val(), y.val())
    assert s.val() >= lo
    if x.val() != y.val():
        assert s.val() == lo


@given(tpolys(), tpolys())
def test_reduce0_multiplicative(x, y):
    if x.val() >= 0 and y.val() >= 0:
        assert (x * y).reduce0() == x.reduce0() * y.reduce0()


@given(tpolys(), tpolys(), tpolys())
def test_ring_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * (y * z) == (x * y) * z
    assert x + y == y + x


def test_series_quotient_exact():
    num = TPoly({0: 1, 2: -1})  # 1 - t^2
    den = TPoly({0: 1, 1: -1})  # 1 - t
    q = series_quotient(num, den, 10)
    assert q == TPoly({0: 1, 1: 1})


def test_series_quotient_truncated():
    num = TPoly({0: 1})
    den = TPoly({0: 1, 1: -1})
    q = series_quotient(num, den, 4)
    assert q == TPoly({0: 1, 1: 1, 2: 1, 3: 1})
    # remainder has valuation >= bound
    assert (num - q * den).val() >= 4


def test_truncate_below():
    x = TPoly({0: 1, 1: 2, 3: 1})
    assert x.truncate_below(2) == TPoly({0: 1, 1: 2})
