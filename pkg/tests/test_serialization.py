import dataclasses
import json

import pytest

from main import main
from src.errors import PolyParseError, SchemaError
from src.exact_core import Poly
from src.gen_tables import expand_B
from src.holonomic import make_recurrence
from src.serialization import (certificate_from_json, certificate_to_json, dumps, poly_from_json,
                               poly_to_json, read_json, recurrence_from_json, recurrence_to_json,
                               table_from_csv, table_from_json, table_to_csv, table_to_json,
                               write_json)
from src.wz_engine import PARAMS, WZ_VARIABLES

C = ('c',)


def test_poly_json_layout():
    p = Poly.parse('3/2*c^2 - 1', C)
    assert poly_to_json(p) == [{'coeff': '3/2', 'exps': [2]}, {'coeff': '-1', 'exps': [0]}]
    assert poly_from_json(poly_to_json(p), C) == p


def test_poly_json_errors():
    with pytest.raises(SchemaError):
        poly_from_json({'coeff': '1'}, C)
    with pytest.raises(SchemaError):
        poly_from_json([{'coeff': '1', 'exps': [0, 1]}], C)
    with pytest.raises(SchemaError):
        poly_from_json([{'exps': [0]}], C)
    with pytest.raises(PolyParseError):
        poly_from_json([{'coeff': '1/x', 'exps': [0]}], C)


def test_certificate_roundtrip_is_byte_stable(certificate):
    data = certificate_to_json(certificate)
    assert data['schema'] == 1
    assert data['divisors'] == [[4, 3], [4, 3]]
    restored = certificate_from_json(json.loads(dumps(data)))
    assert restored == certificate
    assert restored.attempts == certificate.attempts
    assert dumps(certificate_to_json(restored)) == dumps(data)


def test_certificate_schema_checks(certificate):
    data = certificate_to_json(certificate)
    z = Poly.variable(WZ_VARIABLES, 'z')
    with pytest.raises(SchemaError):
        certificate_from_json({**data, 'schema': 2})
    with pytest.raises(SchemaError):
        certificate_from_json({**data, 'exponent': '-1'})
    with pytest.raises(SchemaError):
        certificate_from_json({**data, 'p': data['p'][:3]})
    with pytest.raises(SchemaError):
        certificate_from_json({**data, 'p': [poly_to_json(z)] + data['p'][1:]})
    without_divisors = {key: value for key, value in data.items() if key != 'divisors'}
    with pytest.raises(SchemaError):
        certificate_from_json(without_divisors)
    with pytest.raises(SchemaError):
        certificate_from_json({**data, 'divisors': [[4, 3], [4, -1]]})


def test_recurrence_roundtrip():
    rec = make_recurrence([Poly.parse('-n - k', PARAMS), Poly.parse('c', PARAMS)])
    data = recurrence_to_json(rec)
    assert data['order'] == 1
    assert recurrence_from_json(data) == rec
    with pytest.raises(SchemaError):
        recurrence_from_json({**data, 'order': 2})


def test_table_json_and_csv(tmp_path):
    table = expand_B(3)
    assert table_from_json(table_to_json(table)).entries == table.entries
    path = table_to_csv(table, tmp_path / 'tables' / 'table_B.csv')
    restored = table_from_csv(path, '-1/2')
    assert restored.entries == table.entries
    assert restored.n_max == 3


def test_read_json_reports_malformed_files(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"schema": 1,', encoding='utf-8')
    with pytest.raises(SchemaError) as info:
        read_json(path)
    assert 'broken.json' in str(info.value)


def test_verify_cert_command(certificate, tmp_path, capsys):
    good = write_json(tmp_path / 'certificate.json', certificate_to_json(certificate))
    assert main(['--out', str(tmp_path), 'verify-cert', str(good)]) == 0

    p = list(certificate.p)
    p[2] = p[2] + Poly.one(PARAMS)
    tampered = dataclasses.replace(certificate, p=tuple(p))
    bad = write_json(tmp_path / 'tampered.json', certificate_to_json(tampered))
    assert main(['--out', str(tmp_path), 'verify-cert', str(bad)]) == 1
    assert 'RECHAZADO' in capsys.readouterr().out


def test_schema_error_in_command_exits_with_one(tmp_path, capsys):
    path = tmp_path / 'old.json'
    path.write_text('{"schema": 0}', encoding='utf-8')
    assert main(['--out', str(tmp_path), 'verify-cert', str(path)]) == 1
    assert 'SchemaError' in capsys.readouterr().out


def test_symsquare_and_unroll_commands(tmp_path, capsys):
    rec_path = write_json(tmp_path / 'fib.json', recurrence_to_json(make_recurrence([-1, -1, 1])))
    assert main(['--out', str(tmp_path), 'symsquare', '--rec', str(rec_path)]) == 0
    sym = recurrence_from_json(read_json(tmp_path / 'symsquare.json'))
    assert [p.constant_value() for p in sym.coeffs] == [1, -2, -2, 1]
    capsys.readouterr()
    assert main(['--out', str(tmp_path), 'unroll', '--rec', str(rec_path),
                 '--initials', '1', '1', '--until', '6']) == 0
    assert 'n=6: 13' in capsys.readouterr().out
