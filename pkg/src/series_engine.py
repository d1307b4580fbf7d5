"""
Series formales truncadas con coeficientes polinómicos exactos.

- ``LaurentSeries2``: serie de potencias en z y de Laurent acotada en w,
  guardada como mapa (n, k) -> Poly con 0 <= n <= z_order y |k| <= w_band.
- ``Series1``: serie en una sola variable (z), con exponentes negativos
  permitidos, usada para la reversión y para las series del Fact 1.

El truncamiento es estado explícito: un coeficiente ausente dentro de los
límites es un cero verdadero; fuera de ellos es desconocido y se lanza
``OutOfTruncation``. La banda en w es un límite de almacenamiento: los
productos que caen fuera de ella se descartan, lo que es exacto para núcleos
cuyo grado en w crece como mucho una unidad por potencia de z y
``w_band >= z_order``.
"""

import logging
from collections import defaultdict
from math import ceil, comb, log2

from src.errors import BadUnit, NotInvertible, NotRevertible, OutOfTruncation
from src.exact_core import Poly, rational

logger = logging.getLogger(__name__)

DEFAULT_Z_ORDER = 12
DEFAULT_W_BAND = 12


# ---------------------------------------------------------------------------
# Filas: polinomios de Laurent en w como dict k -> Poly
# ---------------------------------------------------------------------------

def _row_add(acc, row, factor=None):
    for k, p in row.items():
        term = p if factor is None else p * factor
        if k in acc:
            s = acc[k] + term
            if s.is_zero:
                del acc[k]
            else:
                acc[k] = s
        elif not term.is_zero:
            acc[k] = term
    return acc


def _row_mul(r1, r2, band):
    out = {}
    for k1, p1 in r1.items():
        for k2, p2 in r2.items():
            k = k1 + k2
            if abs(k) > band:
                continue
            _row_add(out, {k: p1 * p2})
    return out


class LaurentSeries2:
    """
    Serie sum a_{n,k} z^n w^k truncada en z^{z_order} y en |k| <= w_band.

    Los valores son inmutables; la aritmética lleva el mínimo de los
    truncamientos de los operandos.
    """

    __slots__ = ('z_order', 'w_band', 'variables', '_rows')

    def __init__(self, rows, z_order, w_band, variables):
        self.z_order = int(z_order)
        self.w_band = int(w_band)
        self.variables = tuple(variables)
        clean = {}
        for n, row in rows.items():
            if n < 0 or n > self.z_order:
                continue
            kept = {k: p for k, p in row.items() if abs(k) <= self.w_band and not p.is_zero}
            if kept:
                clean[n] = kept
        self._rows = clean

    # -- construcción ----------------------------------------------------------

    @classmethod
    def from_terms(cls, terms, z_order=DEFAULT_Z_ORDER, w_band=DEFAULT_W_BAND, variables=('c',)):
        """
        Construye la serie a partir de un mapa (n, k) -> coeficiente.

        Args:
            terms (Mapping[tuple[int, int], Poly | racional]): coeficientes.
            z_order (int): último exponente de z conservado.
            w_band (int): banda |k| <= w_band.
            variables (Sequence[str]): variables de los coeficientes.
        """
        rows = defaultdict(dict)
        for (n, k), value in terms.items():
            p = value.convert(variables) if isinstance(value, Poly) else Poly.constant(variables, value)
            _row_add(rows[n], {k: p})
        return cls(rows, z_order, w_band, variables)

    @classmethod
    def one(cls, z_order=DEFAULT_Z_ORDER, w_band=DEFAULT_W_BAND, variables=('c',)):
        return cls.from_terms({(0, 0): 1}, z_order, w_band, variables)

    def _like(self, rows, z_order=None, w_band=None):
        return LaurentSeries2(rows,
                              self.z_order if z_order is None else z_order,
                              self.w_band if w_band is None else w_band,
                              self.variables)

    # -- acceso -------------------------------------------------------------------

    def items(self):
        """Pares ((n, k), Poly) en orden creciente de n y k."""
        for n in sorted(self._rows):
            for k in sorted(self._rows[n]):
                yield (n, k), self._rows[n][k]

    def row(self, n):
        """Coeficiente de z^n como dict k -> Poly."""
        if n < 0 or n > self.z_order:
            raise OutOfTruncation(f"z^{n} fuera del truncamiento z^{self.z_order}")
        return dict(self._rows.get(n, {}))

    def coefficient(self, n, k):
        """
        Coeficiente de z^n w^k.

        Raises:
            OutOfTruncation: si (n, k) cae fuera de los límites guardados.
        """
        if n < 0 or n > self.z_order or abs(k) > self.w_band:
            raise OutOfTruncation(
                f"(z^{n}, w^{k}) fuera de los límites z<={self.z_order}, |w|<={self.w_band}")
        return self._rows.get(n, {}).get(k, Poly.zero(self.variables))

    def ct_z(self):
        """Término constante en z: dict k -> Poly."""
        return self.row(0)

    def ct_zw(self):
        return self.coefficient(0, 0)

    def __len__(self):
        return sum(len(r) for r in self._rows.values())

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries2):
            return NotImplemented
        return (self.z_order, self.w_band, self._rows) == (other.z_order, other.w_band, other._rows)

    def __repr__(self):
        return f"LaurentSeries2(z_order={self.z_order}, w_band={self.w_band}, terms={len(self)})"

    # -- aritmética -----------------------------------------------------------------

    def _bounds(self, other):
        if self.variables != other.variables:
            raise ValueError("series con anillos de coeficientes distintos")
        return min(self.z_order, other.z_order), min(self.w_band, other.w_band)

    def __add__(self, other):
        z_order, band = self._bounds(other)
        rows = defaultdict(dict)
        for src in (self._rows, other._rows):
            for n, row in src.items():
                _row_add(rows[n], row)
        return self._like(rows, z_order, band)

    def __neg__(self):
        return self._like({n: {k: -p for k, p in row.items()} for n, row in self._rows.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries2):
            return self.scale(other)
        z_order, band = self._bounds(other)
        rows = defaultdict(dict)
        for n1, r1 in self._rows.items():
            for n2, r2 in other._rows.items():
                if n1 + n2 > z_order:
                    continue
                _row_add(rows[n1 + n2], _row_mul(r1, r2, band))
        return self._like(rows, z_order, band)

    def scale(self, factor):
        """Multiplica todos los coeficientes por un racional o un Poly."""
        if not isinstance(factor, Poly):
            factor = Poly.constant(self.variables, rational(factor))
        return self._like({n: {k: p * factor for k, p in row.items()} for n, row in self._rows.items()})

    def __rmul__(self, other):
        return self.scale(other)

    def map_coefficients(self, fn, variables=None):
        """Aplica ``fn`` a cada coeficiente (por ejemplo, especializar c)."""
        variables = self.variables if variables is None else tuple(variables)
        rows = {n: {k: fn(p) for k, p in row.items()} for n, row in self._rows.items()}
        return LaurentSeries2(rows, self.z_order, self.w_band, variables)

    def derivative_z(self):
        rows = {n - 1: {k: p.scale(n) for k, p in row.items()} for n, row in self._rows.items() if n}
        return self._like(rows, z_order=self.z_order - 1)

    def derivative_w(self):
        rows = {n: {k - 1: p.scale(k) for k, p in row.items() if k} for n, row in self._rows.items()}
        return self._like(rows)

    def truncate(self, z_order=None, w_band=None):
        z_order = self.z_order if z_order is None else min(z_order, self.z_order)
        w_band = self.w_band if w_band is None else min(w_band, self.w_band)
        return self._like(self._rows, z_order, w_band)

    def evaluate_w(self, value):
        """Sustituye w por un racional no nulo y devuelve una ``Series1`` en z."""
        value = rational(value)
        if not value:
            raise ZeroDivisionError("w = 0 no es evaluable en una serie de Laurent")
        coeffs = {}
        for n, row in self._rows.items():
            total = Poly.zero(self.variables)
            for k, p in row.items():
                total = total + p.scale(value ** k)
            coeffs[n] = total
        return Series1(coeffs, self.z_order, self.variables)

    def is_w_symmetric(self):
        """True si coefficient(n, k) == coefficient(n, -k) para todo término guardado."""
        return all(row.get(-k) == p for row in self._rows.values() for k, p in row.items())


# ---------------------------------------------------------------------------
# Inversa, raíz cuadrada inversa y potencias racionales
# ---------------------------------------------------------------------------

def _constant_unit(a, error):
    row0 = a._rows.get(0, {})
    if set(row0) != {0} or not row0[0].is_constant:
        raise error(f"el término z^0 debe ser una constante racional no nula, no {row0}")
    return row0[0].constant_value()


def invert(a):
    """
    Inversa multiplicativa por división larga en z.

    Raises:
        NotInvertible: si el término z^0 no es una constante racional no nula.
    """
    a0 = _constant_unit(a, NotInvertible)
    inv0 = 1 / a0
    N, band = a.z_order, a.w_band
    b = {0: {0: Poly.constant(a.variables, inv0)}}
    for n in range(1, N + 1):
        acc = {}
        for j in range(1, n + 1):
            if j in a._rows and (n - j) in b:
                _row_add(acc, _row_mul(a._rows[j], b[n - j], band))
        b[n] = {k: p.scale(-inv0) for k, p in acc.items()}
    return a._like(b)


def _sqrt_unit(a):
    row0 = a._rows.get(0, {})
    if set(row0) != {0} or row0[0] != 1:
        raise BadUnit(f"inv_sqrt necesita término constante exactamente 1, no {row0}")


def inv_sqrt(a, method='binomial'):
    """
    Serie a^(-1/2) de una serie con término constante 1.

    Args:
        a (LaurentSeries2): serie con z^0 igual a 1.
        method (str): 'binomial' (Horner sobre sum C(2j,j)/4^j X^j con X = 1 - a),
            'newton' (iteración y <- y(3 - a y^2)/2) o 'miller' (recurrencia de potencias).

    Raises:
        BadUnit: si el término constante no es exactamente 1.
    """
    _sqrt_unit(a)
    N = a.z_order
    if method == 'binomial':
        x = a.one(a.z_order, a.w_band, a.variables) - a
        result = a.one(a.z_order, a.w_band, a.variables).scale(rational(f"{comb(2 * N, N)}/{4 ** N}"))
        for j in range(N - 1, -1, -1):
            coeff = a.one(a.z_order, a.w_band, a.variables).scale(rational(f"{comb(2 * j, j)}/{4 ** j}"))
            result = coeff + x * result
        return result
    if method == 'newton':
        y = a.one(a.z_order, a.w_band, a.variables)
        three = y.scale(3)
        for _ in range(ceil(log2(N + 1)) + 1):
            y = (y * (three - a * y * y)).scale(rational('1/2'))
        return y
    if method == 'miller':
        return series_power(a, rational('-1/2'))
    raise ValueError(f"método desconocido: {method}")


def series_power(a, alpha):
    """
    Potencia racional a^alpha de una serie con término constante 1.

    Usa la recurrencia m f_m = sum_{j=1}^{m} (alpha j - (m - j)) a_j f_{m-j}.
    """
    _sqrt_unit(a)
    alpha = rational(alpha)
    band = a.w_band
    f = {0: {0: Poly.one(a.variables)}}
    for m in range(1, a.z_order + 1):
        acc = {}
        for j in range(1, m + 1):
            if j in a._rows and (m - j) in f:
                weight = alpha * j - (m - j)
                if weight:
                    _row_add(acc, _row_mul(a._rows[j], f[m - j], band), weight)
        f[m] = {k: p.scale(rational(1) / m) for k, p in acc.items()}
    return a._like(f)


# ---------------------------------------------------------------------------
# Series en una variable
# ---------------------------------------------------------------------------

class Series1:
    """
    Serie en z con coeficientes Poly, exponentes enteros (se admiten negativos).

    ``order`` es el último exponente conocido; ``None`` indica un polinomio de
    Laurent exacto (sin truncamiento).
    """

    __slots__ = ('coeffs', 'order', 'variables')

    def __init__(self, coeffs, order, variables):
        self.variables = tuple(variables)
        self.order = None if order is None else int(order)
        clean = {}
        for e, p in coeffs.items():
            if self.order is not None and e > self.order:
                continue
            if not isinstance(p, Poly):
                p = Poly.constant(self.variables, p)
            if not p.is_zero:
                clean[int(e)] = p
        self.coeffs = clean

    @classmethod
    def from_list(cls, values, order=None, variables=('c',), start=0):
        return cls({start + i: v for i, v in enumerate(values)}, order, variables)

    @classmethod
    def identity(cls, order=None, variables=('c',)):
        return cls({1: 1}, order, variables)

    def _like(self, coeffs, order):
        return Series1(coeffs, order, self.variables)

    def valuation(self):
        """Menor exponente con coeficiente no nulo (None para la serie cero)."""
        return min(self.coeffs) if self.coeffs else None

    def coefficient(self, e):
        if self.order is not None and e > self.order:
            raise OutOfTruncation(f"z^{e} fuera del truncamiento z^{self.order}")
        return self.coeffs.get(e, Poly.zero(self.variables))

    def ct(self):
        return self.coefficient(0)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, Series1):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self):
        terms = ' + '.join(f"({p})*z^{e}" for e, p in sorted(self.coeffs.items())) or '0'
        tail = '' if self.order is None else f" + O(z^{self.order + 1})"
        return terms + tail

    def truncate(self, order):
        order = order if self.order is None else min(order, self.order)
        return self._like(self.coeffs, order)

    # -- aritmética -------------------------------------------------------------------

    @staticmethod
    def _min_order(*orders):
        known = [o for o in orders if o is not None]
        return min(known) if known else None

    def _lift(self, other):
        if isinstance(other, Series1):
            if other.variables != self.variables:
                raise ValueError("series con anillos de coeficientes distintos")
            return other
        return Series1({0: other if isinstance(other, Poly) else rational(other)}, None, self.variables)

    def __add__(self, other):
        other = self._lift(other)
        coeffs = dict(self.coeffs)
        for e, p in other.coeffs.items():
            coeffs[e] = coeffs[e] + p if e in coeffs else p
        return self._like(coeffs, self._min_order(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -p for e, p in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def _product_order(self, other):
        orders = []
        if self.order is not None:
            low = other.valuation()
            if low is not None:
                orders.append(self.order + low)
        if other.order is not None:
            low = self.valuation()
            if low is not None:
                orders.append(other.order + low)
        if not orders:
            if self.order is None and other.order is None:
                return None
            # producto con la serie cero
            return self._min_order(self.order, other.order)
        return min(orders)

    def __mul__(self, other):
        other = self._lift(other)
        order = self._product_order(other)
        coeffs = {}
        for e1, p1 in self.coeffs.items():
            for e2, p2 in other.coeffs.items():
                e = e1 + e2
                if order is not None and e > order:
                    continue
                coeffs[e] = coeffs[e] + p1 * p2 if e in coeffs else p1 * p2
        return self._like(coeffs, order)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        result = Series1({0: 1}, None, self.variables)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor):
        return self._like({e: p * factor for e, p in self.coeffs.items()}, self.order)

    def shift(self, m):
        """Multiplica por z^m."""
        order = None if self.order is None else self.order + m
        return self._like({e + m: p for e, p in self.coeffs.items()}, order)

    def derivative(self):
        order = None if self.order is None else self.order - 1
        return self._like({e - 1: p.scale(e) for e, p in self.coeffs.items() if e}, order)

    def map_coefficients(self, fn, variables=None):
        variables = self.variables if variables is None else tuple(variables)
        return Series1({e: fn(p) for e, p in self.coeffs.items()}, self.order, variables)

    def subs_z(self, value):
        """Sustituye z por 1/z cuando value == -1 (reflexión de exponentes)."""
        if value != -1:
            raise ValueError("solo se admite la reflexión z -> 1/z")
        if self.order is not None:
            raise ValueError("la reflexión solo está definida para polinomios de Laurent exactos")
        return self._like({-e: p for e, p in self.coeffs.items()}, None)

    def invert(self, order=None):
        """
        Inversa multiplicativa hasta z^order.

        Raises:
            NotInvertible: si el término constante no es un racional no nulo o hay exponentes negativos.
        """
        order = self.order if order is None else order
        if order is None:
            raise ValueError("invert necesita un orden de truncamiento")
        if self.order is not None:
            order = min(order, self.order)
        if self.valuation() is None or self.valuation() < 0:
            raise NotInvertible("la serie debe empezar en z^0")
        a0 = self.coeffs.get(0)
        if a0 is None or not a0.is_constant:
            raise NotInvertible(f"término constante no unidad: {a0}")
        inv0 = 1 / a0.constant_value()
        b = {0: Poly.constant(self.variables, inv0)}
        for n in range(1, order + 1):
            acc = Poly.zero(self.variables)
            for j in range(1, n + 1):
                if j in self.coeffs and (n - j) in b:
                    acc = acc + self.coeffs[j] * b[n - j]
            b[n] = acc.scale(-inv0)
        return self._like(b, order)


def compose(r, s):
    """
    Composición r(s(z)) por Horner.

    Args:
        r (Series1): serie exterior sin exponentes negativos.
        s (Series1): serie interior con s_0 = 0.
    """
    if r.valuation() is not None and r.valuation() < 0:
        raise ValueError("la serie exterior no puede tener exponentes negativos")
    if s.valuation() is not None and s.valuation() < 1:
        raise ValueError("la serie interior debe tener término constante nulo")
    order = Series1._min_order(r.order, s.order)
    if order is None:
        order_bound = None
    else:
        order_bound = order
    top = max(r.coeffs) if r.coeffs else 0
    if r.order is not None:
        top = max(top, 0)
    result = Series1({}, order_bound, r.variables)
    for e in range(top, -1, -1):
        result = result * s
        if e in r.coeffs:
            result = result + Series1({0: r.coeffs[e]}, None, r.variables)
        if order_bound is not None:
            result = result.truncate(order_bound)
    return result


def revert(s, order=None):
    """
    Inversa composicional por inversión de Lagrange: r_m = (1/m) [z^{m-1}] (z/s)^m.

    Raises:
        NotRevertible: si s_0 != 0 o s_1 no es un racional no nulo.
    """
    order = s.order if order is None else (order if s.order is None else min(order, s.order))
    if order is None:
        raise NotRevertible("revert necesita un orden de truncamiento")
    low = s.valuation()
    if low is None or low < 1:
        raise NotRevertible("la serie debe tener término constante nulo")
    s1 = s.coeffs.get(1)
    if s1 is None or not s1.is_constant:
        raise NotRevertible(f"coeficiente lineal no unidad: {s1}")
    quotient = s.shift(-1).truncate(order - 1).invert(order - 1)
    power = Series1({0: 1}, order - 1, s.variables)
    coeffs = {}
    for m in range(1, order + 1):
        power = (power * quotient).truncate(order - 1)
        coeffs[m] = power.coefficient(m - 1).scale(rational(1) / m)
    logger.debug(f"Reversión calculada hasta z^{order}")
    return Series1(coeffs, order, s.variables)
