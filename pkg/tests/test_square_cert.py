import pytest
from hypothesis import given, strategies as st

from src.errors import NotASquare, NotCertifiable
from src.exact_core import Poly, RatFn, rational
from src.holonomic import REC_VARIABLES
from src.square_cert import (SquareCertificate, extract, extract_table, poly_sqrt, rational_sqrt,
                             root_column, root_gauge_ratio, root_to_entry)

C = ('c',)

small_polys = st.lists(st.integers(-4, 4), min_size=1, max_size=4).map(
    lambda coeffs: Poly.from_terms(C, {(i,): v for i, v in enumerate(coeffs)}))


def c_poly(text):
    return Poly.parse(text, C)


def test_rational_sqrt():
    assert rational_sqrt(rational('9/4')) == rational('3/2')
    assert rational_sqrt(2) is None
    assert rational_sqrt(-1) is None


def test_poly_sqrt():
    assert poly_sqrt(c_poly('c^2 - 2*c + 1')) == c_poly('c - 1')
    assert poly_sqrt(c_poly('9/4*c^2 - 3/2*c + 1/4')) == c_poly('3/2*c - 1/2')
    with pytest.raises(NotASquare):
        poly_sqrt(c_poly('c^2 + 1'))
    with pytest.raises(NotASquare):
        poly_sqrt(c_poly('c^3'))


@given(small_polys)
def test_poly_sqrt_of_squares(p):
    root = poly_sqrt(p * p)
    assert root * root == p * p
    assert root.is_zero or root.leading_coefficient() > 0


def test_extract_b_entries(b_table):
    cert = extract(b_table.entry(1, 1))
    assert (cert.rho, cert.e_c, cert.e_1mc) == (rational('1/2'), 0, 1)
    assert cert.L == 1
    cert = extract(b_table.entry(1, 2))
    assert (cert.rho, cert.e_c, cert.e_1mc, cert.L) == (rational('3/2'), 1, 1, Poly.one(C))
    cert = extract(b_table.entry(0, 2))
    assert cert.rho == rational('1/4')
    assert cert.L == c_poly('3*c - 1')


def test_extract_zero_and_failures():
    assert extract(Poly.zero(C)).is_zero
    assert SquareCertificate.zero().reconstruct().is_zero
    with pytest.raises(NotCertifiable) as info:
        extract(c_poly('c^2 + 1'))
    assert info.value.remainder == c_poly('c^2 + 1')
    with pytest.raises(NotCertifiable):
        extract(c_poly('-c^2'))


def test_extract_table_certifies_everything(b_table):
    certs = extract_table(b_table, n_jobs=2)
    assert len(certs.certificates) == len(b_table.entries)
    for (k, n), cert in certs.certificates.items():
        assert cert.reconstruct() == b_table.entry(k, n)
        assert cert.is_zero or cert.rho > 0
    assert set(certs.patterns) == {'e_1mc_equals_k', 'e_c_equals_parity', 'zero_entries'}
    first = certs.to_list()[0]
    assert first == {'k': 0, 'n': 0, 'rho': '1', 'e_c': 0, 'e_1mc': 0, 'L': '1', 'zero': False}


def test_root_column_values(b_table):
    column = root_column(b_table, 0, 2).column(0)
    assert column == {0: c_poly('1'), 1: c_poly('c'), 2: c_poly('3/2*c^2 - 1/2*c')}
    assert root_column(b_table, 1, 2).column(1) == {1: c_poly('1'), 2: c_poly('3*c')}


def test_root_to_entry_inverts_root_column(b_table):
    for k in range(4):
        transform = root_to_entry(k)
        for n, s in root_column(b_table, k, 8).column(k).items():
            assert transform(n, s) == b_table.entry(k, n)


def test_root_gauge_ratio():
    assert root_gauge_ratio(1) == RatFn(Poly.parse('n*c + 2*c', REC_VARIABLES),
                                        Poly.parse('n', REC_VARIABLES))
    symbolic = root_gauge_ratio()
    assert symbolic.evaluate({'n': 2, 'k': 1, 'c': 1}) == 2
