"""
Tablas de coeficientes A_{k,n}(c) y B_{k,n}(c) del Fact 2.

Ambas salen de la expansión del núcleo

    Q(z, w, c) = 1 - z(2c + (1-c)(w + 1/w)) + z^2

con exponente -1 (tabla A) y -1/2 (tabla B). Solo se guardan k >= 0 y la
entrada k = 0 es el coeficiente completo de w^0, contado una sola vez.

Además de la expansión, el módulo implementa las comprobaciones estructurales
que usa el pipeline: sumas por filas en w = 1, colapso en c = 1, fórmula en
c = 0, simetría en w y la convolución A = B^2.
"""

import logging
from dataclasses import dataclass, field
from math import comb

import pandas as pd
from joblib import Parallel, delayed

from src.exact_core import Poly, format_rational, rational
from src.series_engine import LaurentSeries2, inv_sqrt, invert

logger = logging.getLogger(__name__)

EXPONENTS = ('-1', '-1/2')
K0_CONVENTION = 'single'
C_VARS = ('c',)


class KernelQ:
    """
    Núcleo Q y su versión sin denominadores Q~ = w Q.

    Q~ = w - z(2cw + (1-c)(w^2 + 1)) + z^2 w, de grado 2 en z y en w.
    """

    variables = ('z', 'w', 'c')

    def q_tilde(self, variables=None):
        """Q~ como Poly sobre ``variables`` (por defecto z, w, c)."""
        variables = tuple(variables or self.variables)
        z = Poly.variable(variables, 'z')
        w = Poly.variable(variables, 'w')
        c = Poly.variable(variables, 'c')
        return w - z * (2 * c * w + (1 - c) * (w * w + 1)) + z * z * w

    def evaluate(self, z, w, c):
        """Q evaluado exactamente a partir de su definición."""
        z, w, c = rational(z), rational(w), rational(c)
        return 1 - z * (2 * c + (1 - c) * (w + 1 / w)) + z * z

    def series(self, z_order, w_band=None):
        """Q como ``LaurentSeries2`` con coeficientes en c."""
        w_band = z_order if w_band is None else w_band
        c = Poly.variable(C_VARS, 'c')
        one_minus_c = 1 - c
        terms = {
            (0, 0): 1,
            (1, 0): c.scale(-2),
            (1, 1): -one_minus_c,
            (1, -1): -one_minus_c,
            (2, 0): 1,
        }
        return LaurentSeries2.from_terms(terms, z_order, w_band, C_VARS)


KERNEL = KernelQ()


@dataclass
class CoeffTable:
    """
    Tabla (k, n) -> Poly en c con 0 <= k <= n <= n_max.

    ``entry`` devuelve el cero para k > n, donde el núcleo no tiene masa.
    """
    exponent: str
    n_max: int
    entries: dict = field(default_factory=dict, repr=False)
    k0_convention: str = K0_CONVENTION

    def entry(self, k, n):
        if n < 0 or n > self.n_max or k < 0:
            raise KeyError(f"(k={k}, n={n}) fuera de la tabla (n_max={self.n_max})")
        if k > n:
            return Poly.zero(C_VARS)
        return self.entries[(k, n)]

    def column(self, k):
        """Valores de la columna k para n = k..n_max."""
        return {n: self.entries[(k, n)] for n in range(k, self.n_max + 1)}

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def to_frame(self):
        """DataFrame con filas n, columnas k y celdas en forma textual."""
        data = {
            k: [self.entries[(k, n)].to_text() if k <= n else '' for n in range(self.n_max + 1)]
            for k in range(self.n_max + 1)
        }
        frame = pd.DataFrame(data, index=pd.Index(range(self.n_max + 1), name='n'))
        frame.columns = pd.Index(range(self.n_max + 1), name='k')
        return frame

    @classmethod
    def from_frame(cls, frame, exponent, k0_convention=K0_CONVENTION):
        """Reconstruye la tabla desde un DataFrame como el de ``to_frame``."""
        entries = {}
        n_max = int(max(frame.index))
        for n in frame.index:
            for k in frame.columns:
                k_i, n_i = int(k), int(n)
                if k_i <= n_i:
                    entries[(k_i, n_i)] = Poly.parse(str(frame.loc[n, k]), C_VARS)
        return cls(exponent=exponent, n_max=n_max, entries=entries, k0_convention=k0_convention)


def kernel_series(n_max, exponent):
    """
    Expansión del núcleo con el exponente pedido como ``LaurentSeries2``.

    Args:
        n_max (int): última potencia de z.
        exponent (str): '-1' o '-1/2'.
    """
    if n_max < 0:
        raise ValueError("n_max debe ser >= 0")
    if exponent not in EXPONENTS:
        raise ValueError(f"exponente no soportado: {exponent}")
    q = KERNEL.series(n_max)
    return invert(q) if exponent == '-1' else inv_sqrt(q)


def table_from_series(series, exponent, n_max):
    entries = {(k, n): series.coefficient(n, k) for n in range(n_max + 1) for k in range(n + 1)}
    return CoeffTable(exponent=exponent, n_max=n_max, entries=entries)


def expand_B(n_max):
    """Tabla B_{k,n}(c) = [z^n w^k] Q^{-1/2}."""
    logger.info(f"Expandiendo Q^(-1/2) hasta n = {n_max}")
    return table_from_series(kernel_series(n_max, '-1/2'), '-1/2', n_max)


def expand_A(n_max):
    """Tabla A_{k,n}(c) = [z^n w^k] Q^{-1}."""
    logger.info(f"Expandiendo Q^(-1) hasta n = {n_max}")
    return table_from_series(kernel_series(n_max, '-1'), '-1', n_max)


def check_A_from_B(n_max, a_series=None, b_series=None):
    """
    Comprueba [z^n w^k] Q^{-1} = [z^n w^k] (Q^{-1/2})^2 en toda la rejilla.

    Returns:
        bool: True si todas las entradas coinciden exactamente.
    """
    a_series = kernel_series(n_max, '-1') if a_series is None else a_series
    b_series = kernel_series(n_max, '-1/2') if b_series is None else b_series
    squared = b_series * b_series
    for n in range(n_max + 1):
        for k in range(n + 1):
            if a_series.coefficient(n, k) != squared.coefficient(n, k):
                logger.warning(f"A != B^2 en (k={k}, n={n})")
                return False
    return True


@dataclass
class NonnegReport:
    """Resultado del muestreo de signo."""
    checked: int
    negatives: list

    @property
    def ok(self):
        return not self.negatives

    def to_dict(self):
        return {
            'checked': self.checked,
            'negatives': [
                {'k': k, 'n': n, 'c': format_rational(c), 'value': format_rational(v)} for k, n, c, v in self.negatives
            ],
        }


def _sample_entry(k, n, poly, grid):
    found = []
    for c in grid:
        value = poly.evaluate({'c': c})
        if value < 0:
            found.append((k, n, c, value))
    return found


def sample_nonneg(table, grid, n_jobs=1):
    """
    Evalúa cada entrada en cada punto de la malla con aritmética exacta.

    Args:
        table (CoeffTable): tabla a muestrear.
        grid (Iterable): racionales de [0, 1].
        n_jobs (int): hilos de joblib.

    Returns:
        NonnegReport: número de evaluaciones y negativos encontrados (k, n, c, valor).
    """
    grid = [rational(c) for c in grid]
    chunks = Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(_sample_entry)(k, n, p, grid) for (k, n), p in table.items())
    negatives = [hit for chunk in chunks for hit in chunk]
    report = NonnegReport(checked=len(table.entries) * len(grid), negatives=negatives)
    if negatives:
        logger.warning(f"Tabla {table.exponent}: {len(negatives)} valores negativos")
    return report


# ---------------------------------------------------------------------------
# Comprobaciones estructurales
# ---------------------------------------------------------------------------

def row_sums(table):
    """sum_k (2 - delta_{k0}) T_{k,n}(c) por fila n (la serie en w = 1)."""
    sums = {}
    for n in range(table.n_max + 1):
        total = Poly.zero(C_VARS)
        for k in range(n + 1):
            weight = 1 if k == 0 else 2
            total = total + table.entry(k, n).scale(weight)
        sums[n] = total
    return sums


def check_row_sums(table):
    """B suma 1 y A suma n+1 en cada fila, idénticamente en c."""
    expected = (lambda n: 1) if table.exponent == '-1/2' else (lambda n: n + 1)
    return all(total == expected(n) for n, total in row_sums(table).items())


def check_c_one(table):
    """En c = 1 el núcleo es (1 - z)^2: B_{k,n}(1) = delta_{k0}, A_{0,n}(1) = n + 1."""
    for (k, n), p in table.items():
        value = p.evaluate({'c': 1})
        if k > 0:
            expected = 0
        else:
            expected = 1 if table.exponent == '-1/2' else n + 1
        if value != expected:
            logger.warning(f"Colapso en c=1 falla en (k={k}, n={n}): {value}")
            return False
    return True


def c_zero_value(exponent, k, n):
    """Valor exacto en c = 0, donde Q = (1 - zw)(1 - z/w)."""
    if (n - k) % 2:
        return rational(0)
    if exponent == '-1':
        return rational(1)
    a, b = (n + k) // 2, (n - k) // 2
    return rational(comb(2 * a, a) * comb(2 * b, b)) / rational(4 ** n)


def check_c_zero(table):
    for (k, n), p in table.items():
        if p.evaluate({'c': 0}) != c_zero_value(table.exponent, k, n):
            logger.warning(f"Fórmula en c=0 falla en (k={k}, n={n})")
            return False
    return True


def structural_checks(table, series=None):
    """
    Ejecuta todas las comprobaciones estructurales de una tabla.

    Returns:
        dict[str, bool]: nombre de la comprobación -> resultado.
    """
    series = kernel_series(table.n_max, table.exponent) if series is None else series
    results = {
        'row_sums': check_row_sums(table),
        'c_one': check_c_one(table),
        'c_zero': check_c_zero(table),
        'w_symmetry': series.is_w_symmetric(),
    }
    logger.info(f"Comprobaciones estructurales (exponente {table.exponent}): {results}")
    return results
