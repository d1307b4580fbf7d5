import pytest
from hypothesis import assume, given, strategies as st

from src.errors import InexactDivision, PolyParseError
from src.exact_core import (Poly, RatFn, clear_denominators, format_rational, gcd, lcm,
                            primitive_vector, rational, rational_gcd, solve_inhomogeneous,
                            solve_linear)

XY = ('x', 'y')
C = ('c',)

polys = st.dictionaries(
    keys=st.tuples(st.integers(0, 2), st.integers(0, 2)),
    values=st.integers(-5, 5),
    max_size=4,
).map(lambda terms: Poly.from_terms(XY, terms))

points = st.fixed_dictionaries({
    'x': st.fractions(min_value=-3, max_value=3, max_denominator=5),
    'y': st.fractions(min_value=-3, max_value=3, max_denominator=5),
})


def c_poly(text):
    return Poly.parse(text, C)


def test_rational_parsing_and_format():
    assert rational('3/6') == rational(1) / 2
    assert format_rational(rational('-4/2')) == '-2'
    assert format_rational(rational('2/-4')) == '-1/2'
    with pytest.raises(PolyParseError):
        rational('1/0')


def test_rational_gcd():
    assert rational_gcd(rational('2/3'), rational('4/9')) == rational('2/9')
    assert rational_gcd(0, rational(-3)) == 3


def test_text_form():
    p = c_poly('3/2*c^2 - c + 1')
    assert p.to_text() == '3/2*c^2 - c + 1'
    assert Poly.parse(p.to_text(), C) == p
    assert Poly.zero(C).to_text() == '0'
    assert c_poly('-c').to_text() == '-c'


@pytest.mark.parametrize('text', ['c + * 2', 'c^', '1/0', 'c + d', ''])
def test_parse_errors_carry_position(text):
    with pytest.raises(PolyParseError) as info:
        c_poly(text)
    assert info.value.position is not None


def test_parse_error_location():
    with pytest.raises(PolyParseError) as info:
        c_poly('c + d')
    assert info.value.position == 4


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly.zero(XY)


@given(polys, polys, points)
def test_evaluate_is_a_ring_homomorphism(a, b, point):
    assert (a * b).evaluate(point) == a.evaluate(point) * b.evaluate(point)
    assert (a + b).evaluate(point) == a.evaluate(point) + b.evaluate(point)


@given(polys, polys)
def test_leibniz_rule(a, b):
    assert (a * b).derivative('x') == a.derivative('x') * b + a * b.derivative('x')


@given(polys, polys, polys)
def test_gcd_divides_and_keeps_common_factor(a, b, h):
    assume(not h.is_zero)
    assume(not (a.is_zero and b.is_zero))
    g = gcd(a * h, b * h)
    (a * h).exact_div(g)
    (b * h).exact_div(g)
    g.exact_div(h)


def test_gcd_content_convention():
    c = Poly.variable(C, 'c')
    assert gcd(c.scale(6), (c * c).scale(4)) == c.scale(2)
    assert gcd(c.scale(-3), Poly.zero(C)) == c.scale(3)
    assert lcm(c, c + 1) == c * c + c


def test_exact_div():
    c = Poly.variable(C, 'c')
    assert (c * c - 1).exact_div(c - 1) == c + 1
    with pytest.raises(InexactDivision):
        (c * c + 1).exact_div(c - 1)
    with pytest.raises(ZeroDivisionError):
        c.exact_div(Poly.zero(C))


def test_primitive_and_content():
    p = c_poly('-4/3*c + 2/3')
    content, primitive = p.primitive()
    assert content == rational('-2/3')
    assert primitive == c_poly('2*c - 1')
    assert p.content() == rational('2/3')


def test_substitution_shift_and_specialize():
    x, y = Poly.variable(XY, 'x'), Poly.variable(XY, 'y')
    p = x * x + y
    assert p.shift('x') == x * x + 2 * x + 1 + y
    assert p.subs('y', x) == x * x + x
    assert p.specialize({'x': 2, 'y': rational('1/2')}) == rational('9/2')
    with pytest.raises(KeyError):
        p.evaluate({'x': 1})


def test_convert_and_collect():
    p = Poly.parse('x^2*y + 3*y + 1', XY)
    assert p.convert(('y', 'x', 'z')).evaluate({'x': 2, 'y': 1}) == 8
    with pytest.raises(ValueError):
        p.convert(('x',))
    groups = p.collect(('y',))
    assert groups[(1,)] == Poly.parse('x^2 + 3', ('x',))
    assert groups[(0,)] == Poly.one(('x',))


def test_ratfn_is_reduced():
    c = Poly.variable(C, 'c')
    r = RatFn(c * c - 1, (c - 1).scale(2))
    assert r == RatFn((c + 1).scale(rational('1/2')))
    assert r.den == 1
    assert (RatFn(c, c + 1) + RatFn(Poly.one(C), c + 1)).to_poly() == 1
    assert RatFn(c, c + 1).evaluate({'c': 1}) == rational('1/2')
    with pytest.raises(ZeroDivisionError):
        RatFn(c, Poly.zero(C))


def test_ratfn_derivative_and_shift():
    c = Poly.variable(C, 'c')
    r = RatFn(Poly.one(C), c)
    assert r.derivative('c') == RatFn(-Poly.one(C), c * c)
    assert r.shift('c') == RatFn(Poly.one(C), c + 1)


def test_clear_denominators_and_primitive_vector():
    c = Poly.variable(C, 'c')
    cleared = clear_denominators([RatFn(Poly.one(C), c), RatFn(Poly.one(C), c + 1)])
    assert cleared == [c + 1, c]
    assert primitive_vector([c.scale(-2), c * c.scale(4)]) == [Poly.one(C), c.scale(-2)]


def test_solve_linear_rational():
    basis = solve_linear([[1, 1, 0], [0, 1, -1]], 3, C)
    assert len(basis) == 1
    assert [v.constant_value() for v in basis[0]] == [1, -1, -1]


def test_solve_linear_parametric():
    c = Poly.variable(C, 'c')
    basis = solve_linear([[c, -1]], 2, C)
    assert basis == [(Poly.one(C), c)]


def test_solve_linear_full_rank():
    assert solve_linear([[1, 0], [0, 1]], 2, C) == []


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=3))
def test_nullspace_vectors_annihilate(rows):
    basis = solve_linear(rows, 4, C)
    assert len(basis) >= 4 - len(rows)
    for vec in basis:
        for row in rows:
            assert sum((v * a for v, a in zip(vec, row)), Poly.zero(C)).is_zero


def test_solve_inhomogeneous():
    particular, homogeneous = solve_inhomogeneous([[1, 1], [1, -1]], [2, 0], C)
    assert [p.to_poly() for p in particular] == [1, 1]
    assert homogeneous == []
    assert solve_inhomogeneous([[1], [1]], [1, 2], C) is None


def test_solve_inhomogeneous_column_order():
    c = Poly.variable(C, 'c')
    rows = [[c, 1, 0], [0, 1, -1]]
    particular, homogeneous = solve_inhomogeneous(rows, [1, c], C, column_order=[2, 1, 0])
    assert particular == (RatFn(Poly.zero(C)), RatFn(Poly.one(C)), RatFn(1 - c))
    assert homogeneous == [(Poly.one(C), -c, -c)]
    with pytest.raises(ValueError):
        solve_inhomogeneous(rows, [1, c], C, column_order=[0, 0, 1])


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3),
       st.permutations([0, 1, 2]))
def test_solve_inhomogeneous_solves_consistent_systems(rows, x, order):
    rhs = [sum(a * v for a, v in zip(row, x)) for row in rows]
    particular, homogeneous = solve_inhomogeneous(rows, rhs, C, column_order=order)
    for row, b in zip(rows, rhs):
        assert sum((v * a for v, a in zip(particular, row)), RatFn(Poly.zero(C))) == b
        for vec in homogeneous:
            assert sum((v * a for v, a in zip(vec, row)), Poly.zero(C)).is_zero
