import pandas as pd
import pytest

from src.exact_core import Poly, rational
from src.gen_tables import (KERNEL, CoeffTable, c_zero_value, check_A_from_B, check_c_one,
                            check_c_zero, check_row_sums, expand_A, expand_B, kernel_series,
                            row_sums, sample_nonneg, structural_checks)

C = ('c',)


def c_poly(text):
    return Poly.parse(text, C)


def test_kernel_forms_agree():
    qt = KERNEL.q_tilde()
    point = {'z': rational('1/3'), 'w': rational(2), 'c': rational('1/5')}
    assert qt.evaluate(point) == point['w'] * KERNEL.evaluate(point['z'], point['w'], point['c'])
    assert qt.degree('z') == 2 and qt.degree('w') == 2
    assert KERNEL.series(4).evaluate_w(1).coefficient(1) == -2


@pytest.mark.parametrize('k, n, text', [
    (0, 0, '1'),
    (0, 1, 'c'),
    (1, 1, '-1/2*c + 1/2'),
    (0, 2, '9/4*c^2 - 3/2*c + 1/4'),
    (1, 2, '-3/2*c^2 + 3/2*c'),
])
def test_b_hand_values(b_table, k, n, text):
    assert b_table.entry(k, n) == c_poly(text)


def test_a_hand_values(a_table):
    assert a_table.entry(0, 0) == 1
    assert a_table.entry(1, 1) == c_poly('1 - c')


def test_entry_outside_triangle(b_table):
    assert b_table.entry(3, 2).is_zero
    with pytest.raises(KeyError):
        b_table.entry(0, 13)


def test_row_sums(a_table, b_table):
    assert check_row_sums(b_table)
    assert check_row_sums(a_table)
    assert row_sums(a_table)[5] == 6


def test_c_collapse_and_c_zero(a_table, b_table):
    for table in (a_table, b_table):
        assert check_c_one(table)
        assert check_c_zero(table)
    assert c_zero_value('-1/2', 0, 2) == rational('1/4')
    assert c_zero_value('-1/2', 2, 2) == rational('3/8')
    assert c_zero_value('-1/2', 1, 2) == 0


def test_structural_checks_all_pass(b_table):
    assert all(structural_checks(b_table).values())


def test_a_from_b_convolution():
    assert check_A_from_B(12)


def test_a_from_b_detects_mismatch():
    b_series = kernel_series(4, '-1/2')
    wrong = b_series.scale(rational('1/2'))
    assert not check_A_from_B(4, b_series=wrong)


def test_sampling_finds_no_negatives(a_table, b_table):
    grid = [rational(i) / 10 for i in range(11)]
    report = sample_nonneg(a_table, grid, n_jobs=2)
    assert report.ok
    assert report.checked == len(a_table.entries) * 11
    assert sample_nonneg(b_table, grid).ok


def test_sampling_reports_negatives():
    table = CoeffTable('-1/2', 1, {(0, 0): c_poly('1'), (0, 1): c_poly('c - 1/2'), (1, 1): c_poly('c')})
    report = sample_nonneg(table, [0, rational('1/4'), 1])
    assert not report.ok
    assert report.to_dict()['negatives'] == [
        {'k': 0, 'n': 1, 'c': '0', 'value': '-1/2'},
        {'k': 0, 'n': 1, 'c': '1/4', 'value': '-1/4'},
    ]


def test_frame_layout():
    table = expand_B(2)
    frame = table.to_frame()
    assert isinstance(frame, pd.DataFrame)
    assert list(frame.index) == [0, 1, 2]
    assert frame.loc[0, 1] == ''
    assert frame.loc[1, 1] == '-1/2*c + 1/2'
    assert CoeffTable.from_frame(frame, '-1/2').entries == table.entries


def test_invalid_requests():
    with pytest.raises(ValueError):
        kernel_series(-1, '-1/2')
    with pytest.raises(ValueError):
        kernel_series(3, '1/2')


def test_small_tables_have_expected_shape():
    table = expand_A(3)
    assert table.n_max == 3
    assert len(table.entries) == 10
    assert [k for (k, _), _ in table.items()][:3] == [0, 0, 1]
