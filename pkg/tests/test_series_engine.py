import pytest
from hypothesis import given, strategies as st

from src.errors import BadUnit, NotInvertible, NotRevertible, OutOfTruncation
from src.exact_core import Poly, rational
from src.gen_tables import KERNEL
from src.series_engine import (LaurentSeries2, Series1, compose, inv_sqrt, invert, revert,
                               series_power)

C = ('c',)


def c_poly(text):
    return Poly.parse(text, C)


unit_series = st.dictionaries(
    keys=st.tuples(st.integers(1, 4), st.integers(-1, 1)),
    values=st.integers(-3, 3),
    max_size=5,
).map(lambda terms: LaurentSeries2.from_terms({(0, 0): 1, **terms}, z_order=4, w_band=4))


def test_coefficient_access_and_truncation():
    a = LaurentSeries2.from_terms({(0, 0): 1, (1, 1): c_poly('c')}, z_order=3, w_band=2)
    assert a.coefficient(1, 1) == c_poly('c')
    assert a.coefficient(2, -2).is_zero
    assert a.ct_zw() == 1
    assert a.ct_z() == {0: Poly.one(C)}
    assert a.row(1) == {1: c_poly('c')}
    with pytest.raises(OutOfTruncation):
        a.coefficient(4, 0)
    with pytest.raises(OutOfTruncation):
        a.coefficient(1, 3)


def test_product_keeps_smallest_truncation():
    a = LaurentSeries2.one(z_order=5, w_band=5)
    b = LaurentSeries2.one(z_order=3, w_band=4)
    product = a * b
    assert (product.z_order, product.w_band) == (3, 4)


def test_invert_geometric():
    a = LaurentSeries2.from_terms({(0, 0): 1, (1, 0): -1}, z_order=6, w_band=6)
    inverse = invert(a)
    assert all(inverse.coefficient(n, 0) == 1 for n in range(7))


@given(unit_series)
def test_invert_is_a_right_inverse(a):
    assert a * invert(a) == LaurentSeries2.one(a.z_order, a.w_band)


def test_invert_requires_unit():
    a = LaurentSeries2.from_terms({(0, 1): 1, (1, 0): 1}, z_order=3, w_band=3)
    with pytest.raises(NotInvertible):
        invert(a)
    b = LaurentSeries2.from_terms({(0, 0): c_poly('c')}, z_order=3, w_band=3)
    with pytest.raises(NotInvertible):
        invert(b)


def test_inv_sqrt_of_square():
    # (1 - z)^2 tiene raíz inversa 1/(1 - z)
    a = LaurentSeries2.from_terms({(0, 0): 1, (1, 0): -2, (2, 0): 1}, z_order=6, w_band=6)
    root = inv_sqrt(a)
    assert all(root.coefficient(n, 0) == 1 for n in range(7))


@pytest.mark.parametrize('method', ['binomial', 'newton', 'miller'])
def test_inv_sqrt_methods_agree_on_kernel(method):
    q = KERNEL.series(6)
    reference = inv_sqrt(q, 'binomial')
    assert inv_sqrt(q, method) == reference
    assert reference * reference * q == LaurentSeries2.one(6, 6)


@given(unit_series)
def test_inv_sqrt_squares_to_inverse(a):
    root = inv_sqrt(a)
    assert root * root == invert(a)


def test_inv_sqrt_requires_exact_unit():
    a = LaurentSeries2.from_terms({(0, 0): 4, (1, 0): 1}, z_order=3, w_band=3)
    with pytest.raises(BadUnit):
        inv_sqrt(a)
    with pytest.raises(ValueError):
        inv_sqrt(KERNEL.series(2), method='halley')


def test_series_power_matches_invert():
    q = KERNEL.series(5)
    assert series_power(q, -1) == invert(q)
    assert series_power(q, 1) == q


def test_kernel_w_symmetry():
    assert inv_sqrt(KERNEL.series(8)).is_w_symmetric()
    a = LaurentSeries2.from_terms({(0, 0): 1, (1, 1): 1}, z_order=2, w_band=2)
    assert not a.is_w_symmetric()


def test_evaluate_w_at_one():
    # en w = 1 el núcleo es (1 - z)^2
    root = inv_sqrt(KERNEL.series(6)).evaluate_w(1)
    assert all(root.coefficient(n) == 1 for n in range(7))


def test_derivatives():
    a = LaurentSeries2.from_terms({(2, 1): 3, (1, -1): 1}, z_order=4, w_band=2)
    assert a.derivative_z().coefficient(1, 1) == 6
    assert a.derivative_z().z_order == 3
    assert a.derivative_w().coefficient(1, -2) == -1


def test_series1_product_order():
    a = Series1.from_list([1, 1], order=3)
    b = Series1({1: 1}, 2, C)
    assert (a * b).order == 2
    with pytest.raises(OutOfTruncation):
        (a * b).coefficient(3)


def test_series1_invert_and_reflection():
    a = Series1.from_list([1, -1], order=5)
    assert a.invert() == Series1.from_list([1] * 6, order=5)
    laurent = Series1({1: 2, 2: 3}, None, C)
    assert laurent.subs_z(-1).coeffs == {-1: c_poly('2'), -2: c_poly('3')}
    with pytest.raises(NotInvertible):
        Series1({-1: 1, 0: 1}, 3, C).invert()


def test_revert_koebe_fixture():
    koebe = Series1({n: n for n in range(1, 6)}, 5, C)
    inverse = revert(koebe)
    assert [inverse.coefficient(m) for m in (1, 2, 3)] == [1, -2, 5]
    assert compose(koebe, inverse) == Series1.identity(5)
    assert compose(inverse, koebe) == Series1.identity(5)


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_revert_is_a_compositional_inverse(tail):
    s = Series1({1: 1, **{e + 2: v for e, v in enumerate(tail)}}, 5, C)
    assert compose(s, revert(s)) == Series1.identity(5)


def test_revert_rejects_bad_series():
    with pytest.raises(NotRevertible):
        revert(Series1({0: 1, 1: 1}, 4, C))
    with pytest.raises(NotRevertible):
        revert(Series1({1: c_poly('c')}, 4, C))
    with pytest.raises(NotRevertible):
        revert(Series1({1: 1}, None, C))


def test_compose_with_polynomial_coefficients():
    outer = Series1({0: 1, 1: 1, 2: 1}, None, C)
    inner = Series1({1: c_poly('c')}, 3, C)
    result = compose(outer, inner)
    assert result.coefficient(2) == c_poly('c^2')
    assert result.ct() == rational(1)


laurent_polys = st.dictionaries(keys=st.integers(-3, 3), values=st.integers(-4, 4), max_size=5)

truncated_series = st.builds(
    lambda terms, order: Series1({e: v for e, v in terms.items()}, order, C),
    st.dictionaries(keys=st.integers(0, 4), values=st.integers(-3, 3).filter(bool), min_size=1,
                    max_size=4),
    st.integers(4, 6),
)

banded_series = st.dictionaries(
    keys=st.tuples(st.integers(0, 4), st.integers(-1, 1)),
    values=st.integers(-3, 3),
    max_size=5,
).map(lambda terms: LaurentSeries2.from_terms(terms, z_order=4, w_band=4))


def _agree(left, right):
    order = min(left.order, right.order)
    return left.truncate(order) == right.truncate(order)


def test_telescoping_constant_term_example():
    f = Series1({-1: 1, 0: 3, 2: 1}, None, C)
    assert f.derivative().shift(1).ct().is_zero


@given(laurent_polys, st.one_of(st.none(), st.integers(0, 5)))
def test_telescoping_constant_term(terms, order):
    f = Series1({e: v for e, v in terms.items()}, order, C)
    assert f.derivative().shift(1).ct().is_zero


@given(banded_series)
def test_telescoping_constant_term_in_w(a):
    w = LaurentSeries2.from_terms({(0, 1): 1}, z_order=4, w_band=4)
    assert (w * a.derivative_w()).ct_zw() == 0


@given(truncated_series, truncated_series, truncated_series)
def test_series1_ring_axioms(a, b, c):
    assert _agree((a * b) * c, a * (b * c))
    assert _agree(a * (b + c), a * b + a * c)
    assert a * b == b * a


@given(banded_series, banded_series, banded_series)
def test_laurent_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
