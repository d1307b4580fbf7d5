"""
Importación y exportación de artefactos: polinomios, certificados WZ,
recurrencias y tablas de coeficientes.

Los polinomios se guardan como listas {"coeff": "a/b", "exps": [...]} en orden
grlex descendente, de modo que dos exportaciones del mismo valor son
idénticas byte a byte. Los JSON llevan ``schema`` y se rechazan con
``SchemaError`` si la versión no coincide.
"""

import json
import logging
from pathlib import Path

import pandas as pd

from src.errors import PolyParseError, SchemaError
from src.exact_core import Poly, format_rational, rational
from src.gen_tables import C_VARS, K0_CONVENTION, KERNEL, CoeffTable
from src.holonomic import REC_VARIABLES, make_recurrence
from src.wz_engine import PARAMS, WZ_VARIABLES, Certificate

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Polinomios
# ---------------------------------------------------------------------------

def poly_to_json(p):
    return [{'coeff': format_rational(c), 'exps': list(e)} for e, c in p.terms()]


def poly_from_json(data, variables):
    """
    Lee un polinomio exportado con ``poly_to_json``.

    Raises:
        SchemaError: si la estructura o la aridad de los exponentes no coinciden.
        PolyParseError: si algún coeficiente está mal formado.
    """
    variables = tuple(variables)
    if not isinstance(data, list):
        raise SchemaError(f"se esperaba una lista de términos, no {type(data).__name__}")
    terms = {}
    for i, term in enumerate(data):
        try:
            exps = tuple(int(e) for e in term['exps'])
            coeff = term['coeff']
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"término {i} mal formado: {term!r}") from e
        if len(exps) != len(variables):
            raise SchemaError(f"término {i}: {len(exps)} exponentes para {len(variables)} variables")
        try:
            terms[exps] = rational(coeff)
        except PolyParseError as e:
            raise PolyParseError(f"término {i}: {e}") from e
    return Poly.from_terms(variables, terms)


def _check_schema(data, kind):
    if not isinstance(data, dict):
        raise SchemaError(f"{kind}: se esperaba un objeto JSON")
    if data.get('schema') != SCHEMA_VERSION:
        raise SchemaError(f"{kind}: versión de esquema {data.get('schema')!r}, se esperaba {SCHEMA_VERSION}")


# ---------------------------------------------------------------------------
# Certificados y recurrencias
# ---------------------------------------------------------------------------

def certificate_to_json(cert):
    return {
        'schema': SCHEMA_VERSION,
        'variables': list(WZ_VARIABLES),
        'p': [poly_to_json(q.convert(WZ_VARIABLES)) for q in cert.p],
        'G1': poly_to_json(cert.G1),
        'G2': poly_to_json(cert.G2),
        'divisors': [list(pair) for pair in cert.divisors],
        'kernel': poly_to_json(KERNEL.q_tilde(WZ_VARIABLES)),
        'exponent': '-1/2',
        'normalization': cert.normalization,
        'solution_dimension': cert.solution_dimension,
        'attempts': cert.attempts,
    }


def _divisors_from_json(raw):
    if not isinstance(raw, list) or len(raw) != 2:
        raise SchemaError("se esperaban dos divisores [[a1, b1], [a2, b2]]")
    for pair in raw:
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(e, int) and e >= 0 for e in pair)):
            raise SchemaError(f"divisor no válido: {pair!r}")
    return tuple(tuple(pair) for pair in raw)


def certificate_from_json(data):
    _check_schema(data, 'certificado')
    if tuple(data.get('variables', ())) != WZ_VARIABLES:
        raise SchemaError(f"variables {data.get('variables')} distintas de {list(WZ_VARIABLES)}")
    if data.get('exponent') != '-1/2':
        raise SchemaError(f"exponente {data.get('exponent')!r} no soportado")
    if len(data.get('p', [])) != 4:
        raise SchemaError("se esperaban cuatro polinomios p")
    p = []
    for i, raw in enumerate(data['p']):
        q = poly_from_json(raw, WZ_VARIABLES)
        if {'z', 'w'} & set(q.free_variables()):
            raise SchemaError(f"p{i} depende de z o w")
        p.append(q.convert(PARAMS))
    return Certificate(tuple(p), poly_from_json(data['G1'], WZ_VARIABLES),
                       poly_from_json(data['G2'], WZ_VARIABLES),
                       divisors=_divisors_from_json(data.get('divisors')),
                       normalization=data.get('normalization') or {},
                       solution_dimension=data.get('solution_dimension'),
                       attempts=data.get('attempts') or [])


def recurrence_to_json(rec):
    return {
        'schema': SCHEMA_VERSION,
        'order': rec.order,
        'vars': list(REC_VARIABLES),
        'coeffs': [poly_to_json(p) for p in rec.coeffs],
        'status': rec.status,
    }


def recurrence_from_json(data):
    _check_schema(data, 'recurrencia')
    if tuple(data.get('vars', ())) != REC_VARIABLES:
        raise SchemaError(f"variables {data.get('vars')} distintas de {list(REC_VARIABLES)}")
    coeffs = [poly_from_json(raw, REC_VARIABLES) for raw in data.get('coeffs', [])]
    if len(coeffs) != data.get('order', -1) + 1:
        raise SchemaError("el orden no coincide con el número de coeficientes")
    return make_recurrence(coeffs, data.get('status', 'conjectured'))


# ---------------------------------------------------------------------------
# Tablas
# ---------------------------------------------------------------------------

def table_to_json(table):
    return {
        'schema': SCHEMA_VERSION,
        'exponent': table.exponent,
        'n_max': table.n_max,
        'k0_convention': table.k0_convention,
        'variables': list(C_VARS),
        'entries': [{'k': k, 'n': n, 'poly': poly_to_json(p)} for (k, n), p in table.items()],
    }


def table_from_json(data):
    _check_schema(data, 'tabla')
    entries = {}
    for item in data.get('entries', []):
        entries[(int(item['k']), int(item['n']))] = poly_from_json(item['poly'], C_VARS)
    return CoeffTable(exponent=data['exponent'], n_max=int(data['n_max']), entries=entries,
                      k0_convention=data.get('k0_convention', K0_CONVENTION))


def table_to_csv(table, path):
    """Escribe la tabla como CSV (filas n, columnas k, celdas en forma textual)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_frame().to_csv(path)
    logger.info(f"Tabla guardada en {path}")
    return path


def table_from_csv(path, exponent):
    frame = pd.read_csv(path, index_col='n', dtype=str, keep_default_na=False)
    frame.index = frame.index.astype(int)
    return CoeffTable.from_frame(frame, exponent)


# ---------------------------------------------------------------------------
# Ficheros
# ---------------------------------------------------------------------------

def dumps(data):
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding='utf-8')
    logger.info(f"Guardado {path}")
    return path


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: JSON mal formado en la línea {e.lineno}, columna {e.colno}") from e
