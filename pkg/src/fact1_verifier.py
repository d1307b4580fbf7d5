"""
Verificación formal de la identidad de Löwner (Fact 1) a un orden dado.

Se trabaja en el anillo de símbolos de ``LoewnerSymbols``: c_j, sus
conjugados cb_j, sus derivadas en t cd_j / cbd_j y u = e^{-t}. La conjugación
es una involución de exponentes y d/dt una derivación; no hay números
complejos ni segundas derivadas.

Con f_t(z) = e^t z exp(sum_{j>=1} c_j(t) z^j) se tiene

    df/dt = f * (1 + sum cd_j z^j),   z df/dz = f * (1 + sum j c_j z^j),

así que el cociente del lado derecho no depende de los factores e^t ni de la
exponencial: ``build_ratio`` solo necesita los dos factores lineales.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

from joblib import Parallel, delayed

from src.errors import SecondDerivativeError
from src.exact_core import Poly, rational
from src.series_engine import Series1, compose, revert

logger = logging.getLogger(__name__)

MODES = ('partial', 'total')


class LoewnerSymbols:
    """
    Anillo de símbolos de orden N.

    Variables, en este orden: c1..cN, cb1..cbN, cd1..cdN, cbd1..cbdN, u.
    Solo aparecen potencias no negativas de u, así que u^{-1} no se materializa.
    """

    def __init__(self, order):
        if order < 1:
            raise ValueError("el orden debe ser >= 1")
        self.order = order
        r = range(1, order + 1)
        self.variables = (tuple(f"c{j}" for j in r) + tuple(f"cb{j}" for j in r)
                          + tuple(f"cd{j}" for j in r) + tuple(f"cbd{j}" for j in r) + ('u',))
        n = order
        # c <-> cb, cd <-> cbd, u fijo
        self._perm = list(range(n, 2 * n)) + list(range(0, n)) + \
            list(range(3 * n, 4 * n)) + list(range(2 * n, 3 * n)) + [4 * n]

    def symbol(self, name):
        return Poly.variable(self.variables, name)

    def c(self, j):
        return self.symbol(f"c{j}")

    def cb(self, j):
        return self.symbol(f"cb{j}")

    def cd(self, j):
        return self.symbol(f"cd{j}")

    def cbd(self, j):
        return self.symbol(f"cbd{j}")

    @cached_property
    def u(self):
        return self.symbol('u')

    def const(self, value):
        return Poly.constant(self.variables, value)

    def conj(self, p):
        """Involución c_j <-> cb_j, cd_j <-> cbd_j; fija racionales y u."""
        perm = self._perm
        terms = {}
        for monom, coeff in p.terms():
            image = [0] * len(monom)
            for i, e in enumerate(monom):
                image[perm[i]] = e
            terms[tuple(image)] = coeff
        return Poly.from_terms(self.variables, terms)

    def re(self, p):
        """Parte real formal (X + conj X)/2."""
        return (p + self.conj(p)).scale(rational('1/2'))

    def ddt(self, p):
        """
        Derivación en t: c_j -> cd_j, cb_j -> cbd_j, u -> -u.

        Raises:
            SecondDerivativeError: si p ya contiene derivadas cd_j o cbd_j.
        """
        used = set(p.free_variables())
        second = sorted(v for v in used if v.startswith('cd') or v.startswith('cbd'))
        if second:
            raise SecondDerivativeError(f"no hay segundas derivadas en el anillo: {second}")
        result = Poly.zero(self.variables)
        for j in range(1, self.order + 1):
            if f"c{j}" in used:
                result = result + p.derivative(f"c{j}") * self.cd(j)
            if f"cb{j}" in used:
                result = result + p.derivative(f"cb{j}") * self.cbd(j)
        if 'u' in used:
            result = result - p.derivative('u') * self.u
        return result

    def zero_symbols(self, p):
        """Especializa todos los símbolos c, cb, cd, cbd a 0."""
        return p.specialize({v: 0 for v in self.variables if v != 'u'})


@dataclass
class Fact1Report:
    """Resultado de ``verify_fact1``."""
    mode: str
    sign: int
    order: int
    residual: Series1 = field(repr=False)
    first_nonzero_order: int = None

    @property
    def vanishes(self):
        return self.first_nonzero_order is None

    def to_dict(self):
        return {
            'mode': self.mode,
            'sign': self.sign,
            'order': self.order,
            'first_nonzero_order': self.first_nonzero_order,
            'residual_terms': [
                {'order': e, 'poly': p.to_text()}
                for e, p in sorted(self.residual.coeffs.items())
            ],
        }


def build_ratio(order, symbols=None):
    """
    Cociente (df/dt) / (z df/dz) hasta z^order.

    Returns:
        Series1: (1 + sum cd_j z^j) * (1 + sum j c_j z^j)^{-1} mod z^{order+1}.
    """
    symbols = symbols or LoewnerSymbols(order)
    numerator = {0: symbols.const(1)}
    denominator = {0: symbols.const(1)}
    for j in range(1, order + 1):
        numerator[j] = symbols.cd(j)
        denominator[j] = symbols.c(j).scale(j)
    num = Series1(numerator, None, symbols.variables)
    den = Series1(denominator, None, symbols.variables)
    return (num * den.invert(order)).truncate(order)


def brackets(k, symbols):
    """
    Factores P_k (en z) y Q_k (en 1/z) del lado derecho.

    Returns:
        tuple[Series1, Series1]: P_k = 2(1 + sum_{j<=k} j c_j z^j) - k c_k z^k y Q_k = conj(P_k)(1/z).
    """
    if not 1 <= k <= symbols.order:
        raise ValueError(f"k = {k} fuera de 1..{symbols.order}")
    coeffs = {0: symbols.const(2)}
    for j in range(1, k + 1):
        coeffs[j] = symbols.c(j).scale(2 * j)
    coeffs[k] = coeffs[k] - symbols.c(k).scale(k)
    p_k = Series1(coeffs, None, symbols.variables)
    q_k = Series1({-e: symbols.conj(p) for e, p in p_k.coeffs.items()}, None, symbols.variables)
    return p_k, q_k


def rhs_coefficient(k, ratio, symbols):
    """R_k = Re ct_z(ratio * P_k * Q_k)."""
    p_k, q_k = brackets(k, symbols)
    return symbols.re((ratio * p_k * q_k).ct())


def _w_series(coeffs, order, symbols):
    return Series1(coeffs, order, symbols.variables)


def rhs_series(order, symbols=None, n_jobs=1):
    """(1 - w) * sum_{k=1}^{N} R_k w^k truncada en w^N."""
    symbols = symbols or LoewnerSymbols(order)
    ratio = build_ratio(order, symbols)
    values = Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(rhs_coefficient)(k, ratio, symbols) for k in range(1, order + 1))
    total = _w_series(dict(zip(range(1, order + 1), values)), order, symbols)
    one_minus_w = _w_series({0: 1, 1: -1}, None, symbols)
    return one_minus_w * total


def lambda_k(k, symbols):
    """Lambda_k = 4/k - k c_k cb_k."""
    return symbols.const(rational(f"4/{k}")) - (symbols.c(k) * symbols.cb(k)).scale(k)


def lhs_series(order, mode='total', symbols=None):
    """
    Lado izquierdo en la interpretación ``mode``.

    - partial: w fijo, (1 + w) sum dLambda_k w^k.
    - total: w = w(z, t) sobre la relación de Koebe, con dw/dt = -w(1-w)/(1+w);
      se resta (1 - w) sum k Lambda_k w^k.
    """
    if mode not in MODES:
        raise ValueError(f"modo desconocido: {mode}")
    symbols = symbols or LoewnerSymbols(order)
    lambdas = {k: lambda_k(k, symbols) for k in range(1, order + 1)}
    dots = {k: symbols.ddt(v) for k, v in lambdas.items()}
    one_plus_w = _w_series({0: 1, 1: 1}, None, symbols)
    result = one_plus_w * _w_series(dots, order, symbols)
    if mode == 'total':
        one_minus_w = _w_series({0: 1, 1: -1}, None, symbols)
        weighted = {k: v.scale(k) for k, v in lambdas.items()}
        result = result - one_minus_w * _w_series(weighted, order, symbols)
    return result


def _report(mode, sign, order, lhs, rhs):
    residual = lhs - rhs.scale(sign)
    return Fact1Report(mode=mode, sign=sign, order=order, residual=residual,
                       first_nonzero_order=residual.valuation())


def verify_fact1(order, mode='total', sign='auto', n_jobs=1):
    """
    Residuo lhs - sign * rhs de la identidad hasta w^order.

    Args:
        order (int): orden de truncamiento N >= 1.
        mode (str): 'partial' o 'total'.
        sign (int | str): +1, -1 o 'auto' (elige el signo con anulación más profunda; empate -> +1).

    Returns:
        Fact1Report: informe determinista.
    """
    if order < 1:
        raise ValueError("el orden debe ser >= 1")
    symbols = LoewnerSymbols(order)
    lhs = lhs_series(order, mode, symbols)
    rhs = rhs_series(order, symbols, n_jobs=n_jobs)
    if sign == 'auto':
        reports = [_report(mode, s, order, lhs, rhs) for s in (1, -1)]

        def depth(r):
            return float('inf') if r.first_nonzero_order is None else r.first_nonzero_order

        best = reports[0] if depth(reports[0]) >= depth(reports[1]) else reports[1]
        logger.info(f"Fact 1 ({mode}, N={order}): signo detectado {best.sign:+d}")
        return best
    sign = int(sign)
    if sign not in (1, -1):
        raise ValueError("el signo debe ser +1, -1 o 'auto'")
    return _report(mode, sign, order, lhs, rhs)


def koebe_series(order, symbols):
    """K(z) = z/(1-z)^2 = sum n z^n hasta z^order."""
    return Series1({n: n for n in range(1, order + 1)}, order, symbols.variables)


def koebe_w(order, symbols=None):
    """w(z, t) = K^{-1}(u K(z)) hasta z^order."""
    symbols = symbols or LoewnerSymbols(max(order, 1))
    k = koebe_series(order, symbols)
    return compose(revert(k), k.scale(symbols.u))


def koebe_wdot_check(order):
    """
    Comprueba (1 + w) dw/dt + w(1 - w) = 0 mod z^{order+1} sobre la relación de Koebe.

    d/dt actúa solo a través de u = e^{-t}.
    """
    if order < 2:
        raise ValueError("el orden debe ser >= 2")
    symbols = LoewnerSymbols(1)
    w = koebe_w(order, symbols)
    w_dot = w.map_coefficients(symbols.ddt)
    expr = (1 + w) * w_dot + w * (1 - w)
    ok = all(expr.coefficient(e).is_zero for e in range(0, order + 1))
    logger.info(f"Relación de Koebe hasta z^{order}: {'OK' if ok else 'FALLA'}")
    return ok
