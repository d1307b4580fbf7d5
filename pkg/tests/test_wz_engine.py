import dataclasses

import pytest

from src.errors import EmptySolutionSpace
from src.exact_core import Poly, solve_linear
from src.gen_tables import KERNEL
from src.holonomic import nonnegative_integer_roots, unroll
from src.wz_engine import (PARAMS, PRINTED_DIVISORS, SUPPORT_SCHEDULE, WZ_VARIABLES, Certificate,
                           assemble_identity, cleared_residual, find_certificate, gauge_columns,
                           rec2_from_certificate, rec2_window_failures, verify_certificate)

BOX = SUPPORT_SCHEDULE[-1]


@pytest.fixture(scope='module')
def box_identity():
    return assemble_identity(BOX.deg_z, BOX.deg_w, BOX.divisors)


def _gauge_pair(alpha, beta):
    # phi = z^alpha w^beta en la caja con divisor z^4 w^3
    v = WZ_VARIABLES
    z, w, n, k = (Poly.variable(v, name) for name in ('z', 'w', 'n', 'k'))
    qt = KERNEL.q_tilde(v)
    shift = z ** (alpha + 4) * w ** (beta + 2)
    G1 = shift * ((k.scale(-1) + beta) * qt + (w * qt.derivative('w') - qt).scale('1/2'))
    G2 = -(shift * ((n.scale(-1) + alpha) * qt + (z * qt.derivative('z')).scale('1/2')))
    values = {}
    for group, g in (('G1', G1), ('G2', G2)):
        for (a, b), coeff in g.collect(('z', 'w')).items():
            values[f"{group}_{a}_{b}"] = coeff
    return values


def test_certificate_shape(certificate):
    assert certificate.divisors == ((4, 3), (4, 3))
    assert certificate.degree_bounds_ok(5, 5)
    assert certificate.solution_dimension == 17
    assert not certificate.p[3].is_zero
    assert certificate.p[3].leading_coefficient() > 0
    assert cleared_residual(certificate).is_zero


def test_search_records_printed_ansatz(certificate):
    printed, box = certificate.attempts
    assert printed['unknowns'] == 22
    assert printed['solution_dimension'] == 0
    assert 'z^3 w^1' in printed['support']
    assert box['unknowns'] == 76
    assert box['result'] == 'certificado'


def test_printed_ansatz_has_only_trivial_solution():
    identity = assemble_identity()
    _, rows = identity.rows()
    assert solve_linear(rows, identity.unknowns, PARAMS) == []
    with pytest.raises(EmptySolutionSpace):
        find_certificate(identity, spot_checks=2)


def test_certificate_verifies(certificate):
    result = verify_certificate(certificate, seed=3, spot_checks=5)
    assert result
    assert result.spot_checks == 5


def test_perturbed_p_is_rejected(certificate):
    p = list(certificate.p)
    p[0] = p[0] + Poly.one(PARAMS)
    tampered = dataclasses.replace(certificate, p=tuple(p))
    result = verify_certificate(tampered)
    assert not result
    assert 'monomio' in result.detail


def test_perturbed_g_is_rejected(certificate):
    z = Poly.variable(WZ_VARIABLES, 'z')
    tampered = dataclasses.replace(certificate, G1=certificate.G1 + z)
    assert not verify_certificate(tampered)


def test_wrong_divisors_are_rejected(certificate):
    assert not verify_certificate(dataclasses.replace(certificate, divisors=PRINTED_DIVISORS))


def test_zero_certificate_is_rejected():
    zero = Certificate(tuple(Poly.zero(PARAMS) for _ in range(4)),
                       Poly.zero(WZ_VARIABLES), Poly.zero(WZ_VARIABLES))
    assert not verify_certificate(zero)


def test_invalid_divisors():
    with pytest.raises(ValueError):
        assemble_identity(divisors=((3, 1),))
    with pytest.raises(ValueError):
        Certificate(tuple(Poly.zero(PARAMS) for _ in range(4)), Poly.zero(WZ_VARIABLES),
                    Poly.zero(WZ_VARIABLES), divisors=((3, -1), (1, 3)))


def test_identity_layout(box_identity):
    identity = assemble_identity()
    assert identity.unknowns == 2 * 9 + 4
    assert identity.columns[-4:] == ['p0', 'p1', 'p2', 'p3']
    assert box_identity.unknowns == BOX.unknowns == 2 * 36 + 4
    assert box_identity.divisors == ((4, 3), (4, 3))


def test_gauge_columns(box_identity):
    assert gauge_columns(assemble_identity()) == []
    columns = gauge_columns(box_identity)
    assert len(columns) == 16
    assert {int(name.split('_')[1]) for name in columns} == {0, 1, 4, 5}
    assert all(name.startswith('G2_') for name in columns)


@pytest.mark.parametrize('alpha, beta', [(-4, -2), (-3, 1), (-1, 0)])
def test_gauge_pairs_add_nothing(box_identity, alpha, beta):
    values = _gauge_pair(alpha, beta)
    assert set(values) <= set(box_identity.columns)
    assert box_identity.evaluate(values).is_zero


def test_row_order_does_not_change_certificate(certificate, box_identity):
    monomials, _ = box_identity.rows()
    reversed_rows = list(range(len(monomials)))[::-1]
    assert find_certificate(box_identity, row_permutation=reversed_rows, spot_checks=2) == certificate


def test_row_permutation_needs_identity():
    with pytest.raises(ValueError):
        find_certificate(row_permutation=[0])


def test_rec2_outer_coefficients(certificate):
    v = PARAMS
    n, k = Poly.variable(v, 'n'), Poly.variable(v, 'k')
    p0 = -(((n + 1) ** 2 - k ** 2) * (n.scale(2) + 5))
    p3 = ((n + 3) ** 2 - k ** 2) * (n.scale(2) + 3)
    rec = rec2_from_certificate(certificate)
    assert rec.coeffs[0] * p3 == rec.coeffs[3] * p0
    assert 'c' not in rec.coeffs[3].free_variables()
    assert all(rec.coeffs[i].degree('c') == 1 for i in (1, 2))


def test_rec2_annihilates_b_table(certificate, b_table):
    rec = rec2_from_certificate(certificate)
    assert rec.order == 3
    assert rec.status == 'proved'
    assert rec2_window_failures(rec, b_table) == []


@pytest.mark.parametrize('k', [0, 1, 2])
def test_rec2_unrolls_b_columns(certificate, b_table, k):
    rec = rec2_from_certificate(certificate)
    roots = nonnegative_integer_roots(rec, {'k': k}, start=k)
    start = max(roots) + 1 if roots else k
    initials = [b_table.entry(k, n) for n in range(start, start + rec.order)]
    table = unroll(rec, initials, b_table.n_max, {'k': k}, start=start)
    for n in range(start, b_table.n_max + 1):
        assert table[(k, n)] == b_table.entry(k, n)


def test_window_failures_detects_broken_entry(certificate, b_table):
    rec = rec2_from_certificate(certificate)
    entries = dict(b_table.entries)
    entries[(0, 5)] = entries[(0, 5)] + 1
    broken = dataclasses.replace(b_table, entries=entries)
    failures = rec2_window_failures(rec, broken, ks=[0])
    assert failures
    assert all(n <= 5 <= n + 3 for _, n in failures)
