"""
Certificados de estructura cuadrada para las entradas B_{k,n}(c).

Cada entrada no nula se escribe como rho * c^a * (1-c)^b * L(c)^2 con rho
racional positivo y L entero primitivo de coeficiente principal positivo, lo
que hace evidente su no negatividad en [0, 1]. Las entradas no son cuadrados
literales (B_{1,1} = (1-c)/2), de ahí el lenguaje de átomos {c, 1-c, rho}.

El módulo también construye la columna raíz normalizada

    s_{k,n} = sqrt((n+k)!/(n-k)! * c^(n-k) * B_{k,n} / (1-c)^k),   n >= k,

que es la sucesión sobre la que se adivina la recurrencia de orden 2.
"""

import logging
from dataclasses import dataclass
from math import factorial

from joblib import Parallel, delayed
from sympy import integer_nthroot

from src.errors import InexactDivision, NotASquare, NotCertifiable
from src.exact_core import Poly, RatFn, format_rational, rational
from src.holonomic import REC_VARIABLES, SequenceTable

logger = logging.getLogger(__name__)

C_VARS = ('c',)


def rational_sqrt(q):
    """Raíz cuadrada racional exacta o None."""
    q = rational(q)
    if q < 0:
        return None
    num, num_exact = integer_nthroot(int(q.numerator), 2)
    den, den_exact = integer_nthroot(int(q.denominator), 2)
    if not (num_exact and den_exact):
        return None
    return rational(num) / rational(den)


def poly_sqrt(p):
    """
    Raíz cuadrada exacta de un polinomio en una variable.

    Los coeficientes de L se obtienen de arriba abajo igualando los de L^2 con
    los de p; el resultado se comprueba multiplicando.

    Returns:
        Poly: L con L^2 = p y coeficiente principal positivo.

    Raises:
        NotASquare: si p no es un cuadrado perfecto.
    """
    if p.is_zero:
        return p
    (name,) = p.variables if len(p.variables) == 1 else (None,)
    if name is None:
        raise ValueError("poly_sqrt solo admite polinomios en una variable")
    degree = p.degree(name)
    if degree % 2:
        raise NotASquare(f"grado impar: {p}")
    half = degree // 2
    coeffs = {e[0]: c for e, c in p.terms()}
    top = rational_sqrt(coeffs[degree])
    if top is None:
        raise NotASquare(f"el coeficiente principal de {p} no es un cuadrado")
    root = {half: top}
    for i in range(1, half + 1):
        target = coeffs.get(degree - i, rational(0))
        cross = rational(0)
        for j in range(1, i):
            cross += root[half - j] * root[half - i + j]
        root[half - i] = (target - cross) / (2 * top)
    L = Poly.from_terms(p.variables, {(e,): c for e, c in root.items()})
    if L * L != p:
        raise NotASquare(f"{p} no es un cuadrado perfecto")
    return L


@dataclass(frozen=True)
class SquareCertificate:
    """B = rho * c^e_c * (1-c)^e_1mc * L^2 (o el caso distinguido cero)."""
    rho: object
    e_c: int
    e_1mc: int
    L: Poly
    is_zero: bool = False

    @classmethod
    def zero(cls):
        return cls(rational(0), 0, 0, Poly.zero(C_VARS), True)

    def reconstruct(self):
        if self.is_zero:
            return Poly.zero(C_VARS)
        c = Poly.variable(C_VARS, 'c')
        return (c ** self.e_c * (1 - c) ** self.e_1mc * self.L * self.L).scale(self.rho)

    def to_dict(self, k=None, n=None):
        data = {'rho': format_rational(self.rho), 'e_c': self.e_c, 'e_1mc': self.e_1mc,
                'L': self.L.to_text(), 'zero': self.is_zero}
        if k is not None:
            data = {'k': k, 'n': n, **data}
        return data


def extract(p):
    """
    Certificado rho * c^a * (1-c)^b * L^2 de un polinomio en c.

    Raises:
        NotCertifiable: si rho <= 0 o el resto primitivo no es un cuadrado; la
            excepción lleva el resto en ``remainder``.
    """
    p = p.convert(C_VARS)
    if p.is_zero:
        return SquareCertificate.zero()
    c = Poly.variable(C_VARS, 'c')
    one_minus_c = 1 - c
    rest, e_c, e_1mc = p, 0, 0
    while rest.evaluate({'c': 0}) == 0:
        rest = rest.exact_div(c)
        e_c += 1
    while rest.evaluate({'c': 1}) == 0:
        rest = rest.exact_div(one_minus_c)
        e_1mc += 1
    rho, primitive = rest.primitive()
    if rho <= 0:
        raise NotCertifiable(f"contenido no positivo {format_rational(rho)} en {p}", remainder=rest)
    try:
        L = poly_sqrt(primitive)
    except NotASquare as e:
        raise NotCertifiable(f"resto no cuadrado: {primitive}", remainder=primitive) from e
    cert = SquareCertificate(rho, e_c, e_1mc, L)
    if cert.reconstruct() != p:
        raise NotCertifiable(f"la reconstrucción no coincide para {p}", remainder=rest)
    return cert


@dataclass
class TableCertificates:
    """Certificados de una tabla B, tabla de raíces L y patrones observados."""
    certificates: dict
    l_table: SequenceTable
    patterns: dict

    def to_list(self):
        return [cert.to_dict(k, n) for (k, n), cert in sorted(self.certificates.items(),
                                                              key=lambda kv: (kv[0][1], kv[0][0]))]


def _extract_at(k, n, p):
    try:
        return (k, n), extract(p)
    except NotCertifiable as e:
        raise NotCertifiable(f"(k={k}, n={n}): {e}", remainder=e.remainder) from e


def extract_table(table, n_jobs=1):
    """
    Certifica todas las entradas de una tabla B.

    Los patrones e_1mc = k y e_c = (n - k) mod 2 se registran como metadatos
    empíricos, sin exigirlos.
    """
    results = Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(_extract_at)(k, n, p) for (k, n), p in table.items())
    certificates = dict(results)
    l_values = {key: cert.L for key, cert in certificates.items() if not cert.is_zero}
    nonzero = [(key, cert) for key, cert in certificates.items() if not cert.is_zero]
    patterns = {
        'e_1mc_equals_k': all(cert.e_1mc == k for (k, _), cert in nonzero),
        'e_c_equals_parity': all(cert.e_c == (n - k) % 2 for (k, n), cert in nonzero),
        'zero_entries': sorted([list(key) for key, cert in certificates.items() if cert.is_zero]),
    }
    logger.info(f"Certificadas {len(certificates)} entradas; patrones: "
                f"e_1mc=k {patterns['e_1mc_equals_k']}, e_c=paridad {patterns['e_c_equals_parity']}")
    return TableCertificates(certificates, SequenceTable(l_values, 'extracted'), patterns)


# ---------------------------------------------------------------------------
# Columna raíz normalizada
# ---------------------------------------------------------------------------

def _root_weight(k, n):
    return rational(factorial(n + k)) / rational(factorial(n - k))


def root_column(table, k, n_max=None):
    """
    Sucesión s_{k,n} para n = k..n_max como ``SequenceTable``.

    Raises:
        NotASquare / InexactDivision: si alguna entrada no tiene la forma esperada.
    """
    n_max = table.n_max if n_max is None else n_max
    c = Poly.variable(C_VARS, 'c')
    one_minus_c_k = (1 - c) ** k
    values = {}
    for n in range(k, n_max + 1):
        square = (table.entry(k, n) * c ** (n - k)).scale(_root_weight(k, n))
        try:
            values[(k, n)] = poly_sqrt(square.exact_div(one_minus_c_k))
        except InexactDivision as e:
            raise InexactDivision(f"(1-c)^{k} no divide B_({k},{n})") from e
    return SequenceTable(values, 'extracted')


def root_gauge_ratio(k=None):
    """mu_{n+1}/mu_n = (n+k+1) c / (n-k+1) con s^2 = mu_n B_n."""
    n = Poly.variable(REC_VARIABLES, 'n')
    kk = Poly.variable(REC_VARIABLES, 'k') if k is None else Poly.constant(REC_VARIABLES, k)
    c = Poly.variable(REC_VARIABLES, 'c')
    return RatFn((n + kk + 1) * c, n - kk + 1)


def root_to_entry(k):
    """Transformación s_{k,n} -> B_{k,n} = s^2 (n-k)!/(n+k)! (1-c)^k / c^(n-k)."""
    c = Poly.variable(C_VARS, 'c')

    def transform(n, s):
        value = (s * s * (1 - c) ** k).scale(1 / _root_weight(k, n))
        return value.exact_div(c ** (n - k)) if n > k else value

    return transform
