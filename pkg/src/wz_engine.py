"""
Certificado WZ para F(z, w, c, k, n) = Q^{-1/2} / (z^n w^k).

Se busca p_0..p_3 en (n, k, c) y G1, G2 polinómicos en z y w tales que

    sum_i p_i F(n+i) = z d/dz (G1 F / (z^d1 w^e1)) + w d/dw (G2 F / (z^d2 w^e2)).

Dividiendo por F y usando las derivadas logarítmicas de F la identidad pasa
a ser racional; tras multiplicar por el mcm de los denominadores queda una
identidad polinómica lineal en las incógnitas, cuyos coeficientes en cada
monomio z^i w^j forman el sistema lineal.

La búsqueda recorre ``SUPPORT_SCHEDULE``. El primer soporte es el ansatz de
grado (2, 2) con divisores z^3 w y z w^3; su sistema de 22 incógnitas tiene
rango completo y el intento queda registrado como vacío. El segundo es la
caja de Laurent z^-4..z^1, w^-3..w^2 para G1 y G2 (divisor común z^4 w^3,
grado 5): ahí el espacio de soluciones contiene una familia de gauge
(pares (G1, G2) que suman cero) que se fija anulando parte de G2 antes de
resolver con p_3 = 1.

El término constante en z y w del lado derecho es nulo (CT(z f') = 0), de
modo que sum_i p_i B_{k,n+i} = 0: la recurrencia de orden 3 de las B.

La verificación (``verify_certificate``) no reutiliza el ensamblado: usa la
identidad ya despejada a mano y una batería de puntos racionales aleatorios
sobre la identidad original.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.errors import DegenerateLeading, EmptySolutionSpace
from src.exact_core import (Poly, RatFn, clear_denominators, format_rational, lcm,
                            primitive_vector, rational, solve_inhomogeneous, solve_linear)
from src.gen_tables import KERNEL
from src.holonomic import REC_VARIABLES, make_recurrence

logger = logging.getLogger(__name__)

WZ_VARIABLES = ('n', 'k', 'c', 'z', 'w')
PARAMS = REC_VARIABLES
SPOT_CHECKS = 20
PRINTED_DIVISORS = ((3, 1), (1, 3))


@dataclass(frozen=True)
class Support:
    """Ansatz de (G1, G2): grados del numerador y divisores z^a w^b de cada uno."""
    deg_z: int
    deg_w: int
    divisors: tuple = PRINTED_DIVISORS

    @property
    def unknowns(self):
        return 2 * (self.deg_z + 1) * (self.deg_w + 1) + 4

    def describe(self):
        (dz, dw), (ez, ew) = self.divisors
        return f"grado ({self.deg_z}, {self.deg_w}), G1/(z^{dz} w^{dw}), G2/(z^{ez} w^{ew})"


SUPPORT_SCHEDULE = (
    Support(2, 2, PRINTED_DIVISORS),
    Support(5, 5, ((4, 3), (4, 3))),
)


def _check_divisors(divisors):
    divisors = tuple(tuple(int(e) for e in pair) for pair in divisors)
    if len(divisors) != 2 or any(len(pair) != 2 or min(pair) < 0 for pair in divisors):
        raise ValueError(f"divisores no válidos: {divisors}")
    return divisors


@dataclass
class Certificate:
    """Datos (p, G1, G2) del certificado WZ y los divisores de G1 y G2."""
    p: tuple
    G1: Poly
    G2: Poly
    divisors: tuple = PRINTED_DIVISORS
    normalization: dict = field(default_factory=dict)
    solution_dimension: int = None
    attempts: list = field(default_factory=list)

    def __post_init__(self):
        self.p = tuple(q.convert(PARAMS) for q in self.p)
        self.G1 = self.G1.convert(WZ_VARIABLES)
        self.G2 = self.G2.convert(WZ_VARIABLES)
        self.divisors = _check_divisors(self.divisors)

    def degree_bounds_ok(self, deg_z=2, deg_w=2):
        return all(g.degree('z') <= deg_z and g.degree('w') <= deg_w for g in (self.G1, self.G2))

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return ((self.p, self.G1, self.G2, self.divisors)
                == (other.p, other.G1, other.G2, other.divisors))


@dataclass
class VerificationResult:
    ok: bool
    detail: str = ''
    spot_checks: int = 0

    def __bool__(self):
        return self.ok


@dataclass
class TelescopedIdentity:
    """
    Identidad WZ dividida por F y sin denominadores.

    ``slots`` son los polinomios (en n, k, c, z, w) que multiplican a cada
    incógnita; la identidad es sum_j x_j * slots[j] = 0.
    """
    clearing_factor: Poly
    columns: list
    slots: list
    deg_z: int = 2
    deg_w: int = 2
    divisors: tuple = PRINTED_DIVISORS

    @property
    def unknowns(self):
        return len(self.columns)

    @property
    def support(self):
        return Support(self.deg_z, self.deg_w, self.divisors)

    def rows(self):
        """Sistema lineal: una fila por monomio z^i w^j, entradas en (n, k, c)."""
        collected = [slot.collect(('z', 'w')) for slot in self.slots]
        monomials = sorted({m for group in collected for m in group})
        zero = Poly.zero(PARAMS)
        return monomials, [[group.get(m, zero) for group in collected] for m in monomials]

    def evaluate(self, values):
        """
        Sustituye las incógnitas y devuelve el polinomio residual.

        Args:
            values (Mapping[str, Poly]): valor (en n, k, c) de cada columna; las ausentes valen 0.
        """
        total = Poly.zero(WZ_VARIABLES)
        for name, slot in zip(self.columns, self.slots):
            if name in values:
                total = total + values[name].convert(WZ_VARIABLES) * slot
        return total


def _unknown_columns(deg_z, deg_w):
    g1 = [f"G1_{a}_{b}" for a in range(deg_z + 1) for b in range(deg_w + 1)]
    g2 = [f"G2_{a}_{b}" for a in range(deg_z + 1) for b in range(deg_w + 1)]
    return g1 + g2 + [f"p{i}" for i in range(4)]


def assemble_identity(deg_z=2, deg_w=2, divisors=PRINTED_DIVISORS):
    """
    Construye la identidad telescópica lineal en las 2(deg_z+1)(deg_w+1) + 4 incógnitas.

    Con dlogF_z = -dQ~/dz / (2 Q~) - n/z y dlogF_w = -dQ~/dw / (2 Q~) + 1/(2w) - k/w
    (Q = Q~/w), cada incógnita aporta una función racional; el factor de
    limpieza es el mcm de sus denominadores.

    Args:
        deg_z (int): grado de G1 y G2 en z.
        deg_w (int): grado de G1 y G2 en w.
        divisors (tuple): ((a1, b1), (a2, b2)), G1 se divide por z^a1 w^b1 y G2 por z^a2 w^b2.
    """
    (dz, dw), (ez, ew) = divisors = _check_divisors(divisors)
    v = WZ_VARIABLES
    z, w = Poly.variable(v, 'z'), Poly.variable(v, 'w')
    n, k = Poly.variable(v, 'n'), Poly.variable(v, 'k')
    qt = KERNEL.q_tilde(v)
    two_qt = qt.scale(2)
    dlog_z = RatFn(-qt.derivative('z'), two_qt) - RatFn(n, z)
    dlog_w = RatFn(-qt.derivative('w'), two_qt) + RatFn(Poly.one(v), w.scale(2)) - RatFn(k, w)

    columns = _unknown_columns(deg_z, deg_w)
    terms = []
    for name in columns:
        if name.startswith('p'):
            i = int(name[1:])
            terms.append(RatFn(Poly.one(v), z ** i))
            continue
        group, a, b = name.split('_')
        monomial = z ** int(a) * w ** int(b)
        if group == 'G1':
            h = RatFn(monomial, z ** dz * w ** dw)
            term = RatFn(z) * h.derivative('z') + h * RatFn(z) * dlog_z
        else:
            h = RatFn(monomial, z ** ez * w ** ew)
            term = RatFn(w) * h.derivative('w') + h * RatFn(w) * dlog_w
        terms.append(-term)

    factor = Poly.one(v)
    for t in terms:
        factor = lcm(factor, t.den)
    slots = [t.num * factor.exact_div(t.den) for t in terms]
    logger.info(f"Identidad ensamblada: {len(columns)} incógnitas, factor de limpieza {factor}")
    return TelescopedIdentity(factor, columns, slots, deg_z, deg_w, divisors)


def _selection_key(vector, columns):
    idx = {name: i for i, name in enumerate(columns)}
    key = []
    for name in ('p3', 'p2', 'p1', 'p0'):
        p = vector[idx[name]]
        lead = p.terms()[0][0] if not p.is_zero else ()
        key.append((p.total_degree(), lead))
    return tuple(key)


def _certificate_from_vector(vector, identity):
    v = WZ_VARIABLES
    z, w = Poly.variable(v, 'z'), Poly.variable(v, 'w')
    values = dict(zip(identity.columns, vector))
    G1, G2 = Poly.zero(v), Poly.zero(v)
    for name, value in values.items():
        if name.startswith('G'):
            group, a, b = name.split('_')
            term = value.convert(v) * z ** int(a) * w ** int(b)
            if group == 'G1':
                G1 = G1 + term
            else:
                G2 = G2 + term
    p = tuple(values[f"p{i}"] for i in range(4))
    return Certificate(p, G1, G2, identity.divisors)


def _leading_positive(vector, p3):
    if vector[p3].leading_coefficient() < 0:
        return [-x for x in vector]
    return list(vector)


def gauge_columns(identity):
    """
    Columnas de G2 que se anulan para fijar el gauge.

    Con divisor común, cada phi = z^a w^b da el par (G1, G2) =
    (phi ((b - k) Q + w Q_w / 2), -phi ((a - n) Q + z Q_z / 2)) (salvo el
    monomio común), que aporta cero al lado derecho. En G2 ocupa los niveles
    a y a + 2 de z con b en el interior de la caja. Se anulan las entradas
    interiores de G2 en los niveles inferiores para la mitad baja de los phi
    y en los superiores para la alta; quedan libres los dos niveles centrales.

    Returns:
        list[str]: vacía si los divisores difieren o la caja no deja sitio.
    """
    (dz, dw), (ez, ew) = identity.divisors
    levels = identity.deg_z - 1
    if (dz, dw) != (ez, ew) or levels < 1 or identity.deg_w < 2:
        return []
    half = levels // 2
    fixed = list(range(half)) + list(range(half + 2, identity.deg_z + 1))
    return [f"G2_{a}_{b}" for a in fixed for b in range(1, identity.deg_w)]


def _elimination_key(name, deg_z):
    # de los bordes de la caja hacia el centro; las p al final
    if name.startswith('p'):
        return (1, int(name[1:]), 0, 0, '')
    group, a, b = name.split('_')
    a, b = int(a), int(b)
    return (0, min(a, deg_z - a), -a, b, group)


def _solve_nullspace(identity, rows):
    basis = solve_linear(rows, identity.unknowns, PARAMS)
    if not basis:
        raise EmptySolutionSpace(f"el ansatz de {identity.support.describe()} solo admite la solución trivial")
    p3 = identity.columns.index('p3')
    candidates = [vec for vec in basis if not vec[p3].is_zero]
    if not candidates:
        raise DegenerateLeading(f"p_3 = 0 en las {len(basis)} soluciones")
    best = min(candidates, key=lambda vec: _selection_key(vec, identity.columns))
    cert = _certificate_from_vector(_leading_positive(primitive_vector(list(best)), p3), identity)
    cert.solution_dimension = len(basis)
    cert.normalization = {'content': 1, 'sign': 'p3 leading coefficient positive',
                          'selection': 'graded-lex smallest (p3, p2, p1, p0)'}
    return cert


def _solve_gauge_fixed(identity, rows, gauge):
    p3 = identity.columns.index('p3')
    dropped = {identity.columns.index(name) for name in gauge} | {p3}
    kept = [j for j in range(identity.unknowns) if j not in dropped]
    system = [[row[j] for j in kept] for row in rows]
    rhs = [-row[p3] for row in rows]
    order = sorted(range(len(kept)),
                   key=lambda i: _elimination_key(identity.columns[kept[i]], identity.deg_z))
    solved = solve_inhomogeneous(system, rhs, PARAMS, column_order=order)
    if solved is None:
        raise EmptySolutionSpace(f"el ansatz de {identity.support.describe()} no tiene solución con p_3 = 1")
    particular, homogeneous = solved
    values = [RatFn(Poly.zero(PARAMS))] * identity.unknowns
    values[p3] = RatFn(Poly.one(PARAMS))
    for j, value in zip(kept, particular):
        values[j] = value
    vector = _leading_positive(primitive_vector(clear_denominators(values)), p3)
    cert = _certificate_from_vector(vector, identity)
    cert.solution_dimension = len(gauge) + 1 + len(homogeneous)
    cert.normalization = {'content': 1, 'sign': 'p3 leading coefficient positive',
                          'gauge': f"{len(gauge)} interior G2 columns set to 0",
                          'selection': 'p3 = 1, free columns set to 0'}
    return cert


def _solve_identity(identity, row_permutation=None):
    monomials, rows = identity.rows()
    if row_permutation is not None:
        rows = [rows[i] for i in row_permutation]
    logger.info(f"Sistema WZ ({identity.support.describe()}): "
                f"{len(rows)} filas x {identity.unknowns} incógnitas")
    gauge = gauge_columns(identity)
    if gauge:
        return _solve_gauge_fixed(identity, rows, gauge)
    return _solve_nullspace(identity, rows)


def find_certificate(identity=None, row_permutation=None, seed=0, spot_checks=SPOT_CHECKS,
                     schedule=SUPPORT_SCHEDULE):
    """
    Resuelve el sistema del ansatz y devuelve un certificado verificado.

    Sin ``identity`` se recorren los soportes de ``schedule`` hasta el primero
    con solución; cada intento queda en ``cert.attempts``. Con ``identity`` se
    resuelve solo esa identidad, con las filas en el orden ``row_permutation``.

    Raises:
        EmptySolutionSpace: si ningún soporte admite solución no trivial.
        DegenerateLeading: si todas las soluciones tienen p_3 = 0.
    """
    if identity is not None:
        supports = [identity.support]
    elif row_permutation is not None:
        raise ValueError("row_permutation requiere una identidad concreta")
    else:
        supports = list(schedule)

    attempts = []
    cert = None
    for i, support in enumerate(supports):
        current = identity if identity is not None else assemble_identity(
            support.deg_z, support.deg_w, support.divisors)
        try:
            cert = _solve_identity(current, row_permutation)
        except (EmptySolutionSpace, DegenerateLeading) as e:
            logger.warning(f"Soporte {support.describe()} sin certificado: {e}")
            attempts.append({'support': support.describe(), 'unknowns': current.unknowns,
                             'solution_dimension': 0 if isinstance(e, EmptySolutionSpace) else None,
                             'result': str(e)})
            if identity is not None or i == len(supports) - 1:
                raise
            continue
        attempts.append({'support': support.describe(), 'unknowns': current.unknowns,
                         'solution_dimension': cert.solution_dimension, 'result': 'certificado'})
        break

    cert.attempts = attempts
    logger.info(f"Certificado encontrado (dimensión del espacio de soluciones: {cert.solution_dimension})")
    result = verify_certificate(cert, seed=seed, spot_checks=spot_checks)
    if not result:
        raise EmptySolutionSpace(f"la solución no supera la verificación: {result.detail}")
    return cert


# ---------------------------------------------------------------------------
# Verificación independiente
# ---------------------------------------------------------------------------

def _clearing_exponents(divisors):
    (dz, dw), (ez, ew) = divisors
    return max(3, dz, ez), max(dw, ew)


def cleared_residual(cert):
    """
    Identidad despejada a mano, multiplicada por 2 Q~ z^Z w^W con
    Z = max(3, d1, d2) y W = max(e1, e2):

        2 Q~ w^W (p0 z^Z + p1 z^(Z-1) + p2 z^(Z-2) + p3 z^(Z-3))
          - z^(Z-d1) w^(W-e1) [2 Q~ (z G1_z - (d1 + n) G1) - G1 z Q~_z]
          - z^(Z-d2) w^(W-e2) [2 Q~ w G2_w - (2 e2 - 1 + 2k) Q~ G2 - G2 w Q~_w]

    Con los divisores z^3 w y z w^3 es Z = W = 3.
    """
    (dz, dw), (ez, ew) = cert.divisors
    top_z, top_w = _clearing_exponents(cert.divisors)
    v = WZ_VARIABLES
    z, w = Poly.variable(v, 'z'), Poly.variable(v, 'w')
    n, k = Poly.variable(v, 'n'), Poly.variable(v, 'k')
    qt = KERNEL.q_tilde(v)
    p = [q.convert(v) for q in cert.p]
    G1, G2 = cert.G1, cert.G2
    lhs = Poly.zero(v)
    for i in range(4):
        lhs = lhs + p[i] * z ** (top_z - i)
    lhs = (qt * w ** top_w * lhs).scale(2)
    g1_part = z ** (top_z - dz) * w ** (top_w - dw) * (
        (qt * (z * G1.derivative('z') - (n + dz) * G1)).scale(2) - G1 * z * qt.derivative('z'))
    g2_part = z ** (top_z - ez) * w ** (top_w - ew) * (
        (qt * w * G2.derivative('w')).scale(2) - (2 * k + (2 * ew - 1)) * qt * G2
        - G2 * w * qt.derivative('w'))
    return lhs - g1_part - g2_part


def _random_rational(rng, low=-9, high=9):
    num = int(rng.integers(low, high + 1))
    den = int(rng.integers(1, 10))
    return rational(num) / rational(den)


def _uncleared_difference(cert, point):
    """sum p_i z^{-i} - [G1 y G2] en un punto, con Q tomado de su definición."""
    (dz, dw), (ez, ew) = cert.divisors
    n, k, c, z, w = (point[name] for name in WZ_VARIABLES)
    q = KERNEL.evaluate(z, w, c)
    dq_z = -(2 * c + (1 - c) * (w + 1 / w)) + 2 * z
    dq_w = -z * (1 - c) * (1 - 1 / (w * w))
    dlog_z = -dq_z / (2 * q) - n / z
    dlog_w = -dq_w / (2 * q) - k / w
    lhs = sum((cert.p[i].evaluate({'n': n, 'k': k, 'c': c}) / z ** i for i in range(4)), rational(0))
    g1 = cert.G1.evaluate(point)
    g1_z = cert.G1.derivative('z').evaluate(point)
    g2 = cert.G2.evaluate(point)
    g2_w = cert.G2.derivative('w').evaluate(point)
    rhs = (z * g1_z - dz * g1 + g1 * z * dlog_z) / (z ** dz * w ** dw) \
        + (w * g2_w - ew * g2 + g2 * w * dlog_w) / (z ** ez * w ** ew)
    return lhs - rhs


def verify_certificate(cert, seed=0, spot_checks=SPOT_CHECKS):
    """
    Verifica un certificado sin pasar por el ensamblado.

    Primero la igualdad polinómica exacta de la identidad despejada; después
    ``spot_checks`` puntos racionales aleatorios (semilla fija) sobre la
    identidad sin despejar, evitando z = 0, w = 0 y Q = 0.

    Returns:
        VerificationResult: ok y, si falla, el primer monomio distinto.
    """
    if all(p.is_zero for p in cert.p):
        return VerificationResult(False, "todos los p_i son nulos")
    residual = cleared_residual(cert)
    if not residual.is_zero:
        monom, coeff = residual.terms()[0]
        detail = ' * '.join(f"{name}^{e}" for name, e in zip(WZ_VARIABLES, monom) if e) or '1'
        return VerificationResult(False, f"monomio {detail} con coeficiente {format_rational(coeff)}")
    rng = np.random.default_rng(seed)
    done = 0
    while done < spot_checks:
        point = {name: _random_rational(rng) for name in WZ_VARIABLES}
        if not point['z'] or not point['w'] or not KERNEL.evaluate(point['z'], point['w'], point['c']):
            continue
        diff = _uncleared_difference(cert, point)
        if diff:
            return VerificationResult(False, f"falla en el punto {point}", done)
        done += 1
    return VerificationResult(True, '', done)


def rec2_from_certificate(cert):
    """Recurrencia de orden 3 p_0 B_n + p_1 B_{n+1} + p_2 B_{n+2} + p_3 B_{n+3} = 0."""
    rec = make_recurrence(list(cert.p), 'proved', {'source': 'wz_certificate'})
    if rec.order != 3:
        raise DegenerateLeading("la recurrencia del certificado no es de orden 3")
    return rec


def rec2_window_failures(rec, table, ks=None):
    """
    Ventanas (k, n) de la tabla B donde la recurrencia no se anula.

    Usa B_{k,n} = 0 para n < k, de modo que se recorren todos los n >= 0.
    """
    ks = range(table.n_max + 1) if ks is None else ks
    failures = []
    for k in ks:
        for n in range(0, table.n_max - rec.order + 1):
            total = Poly.zero(('c',))
            for i in range(rec.order + 1):
                total = total + rec.coefficient_at(i, n, {'k': k}) * table.entry(k, n + i)
            if not total.is_zero:
                failures.append((k, n))
    return failures
