"""
Sucesiones P-recursivas: recurrencias con coeficientes polinómicos en (n, k, c).

Incluye el desenrollado hacia delante de una recurrencia, la adivinación
exacta de recurrencias a partir de tablas (con datos reservados para la
validación), el cuadrado simétrico de una recurrencia de orden 2, el cambio
de gauge hipergeométrico y la comparación de operadores salvo factor.
"""

import logging
from dataclasses import dataclass, field
from itertools import product

from src.errors import (DegenerateInput, InsufficientData, LeadingCoeffVanishes,
                        NoRecurrenceFound)
from src.exact_core import (Poly, RatFn, clear_denominators, gcd, rational,
                            solve_linear)

logger = logging.getLogger(__name__)

REC_VARIABLES = ('n', 'k', 'c')
VALUE_VARIABLES = ('c',)
HOLDOUT_FRACTION = 0.25
STATUSES = ('proved', 'conjectured')


def _as_value(value):
    if isinstance(value, Poly):
        return value.convert(VALUE_VARIABLES)
    return Poly.constant(VALUE_VARIABLES, value)


@dataclass(frozen=True)
class Recurrence:
    """
    Recurrencia sum_i coeffs[i](n, k, c) * a_{n+i} = 0.

    Se construye normalmente con ``make_recurrence``, que deja el coeficiente
    principal no nulo, elimina el mcd común y fija el signo.
    """
    coeffs: tuple
    status: str = 'conjectured'
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def trailing(self):
        return self.coeffs[0]

    def specialize(self, **params):
        """Sustituye parámetros (por ejemplo k=2) y renormaliza."""
        coeffs = [p.specialize(params) for p in self.coeffs]
        return make_recurrence(coeffs, self.status, dict(self.meta, specialized=dict(params)))

    def coefficient_at(self, i, n, params=None):
        """coeffs[i] evaluado en n (y params) como Poly en c."""
        assignment = dict(params or {})
        assignment['n'] = n
        return self.coeffs[i].specialize(assignment).convert(VALUE_VARIABLES)

    def apply(self, values, n, params=None):
        """sum_i coeffs[i](n) * values[n+i]."""
        total = Poly.zero(VALUE_VARIABLES)
        for i in range(self.order + 1):
            total = total + self.coefficient_at(i, n, params) * values[n + i]
        return total

    def __str__(self):
        return ' + '.join(f"({p})*a(n+{i})" for i, p in enumerate(self.coeffs)) + ' = 0'


def make_recurrence(coeffs, status='conjectured', meta=None):
    """
    Normaliza una lista de coeficientes y devuelve una ``Recurrence``.

    Se quitan los coeficientes principales nulos, se divide por el mcd de
    todos los coeficientes y el coeficiente principal queda con término
    director positivo.
    """
    coeffs = [p.convert(REC_VARIABLES) if isinstance(p, Poly) else Poly.constant(REC_VARIABLES, p)
              for p in coeffs]
    while coeffs and coeffs[-1].is_zero:
        coeffs.pop()
    if not coeffs:
        raise DegenerateInput("recurrencia con todos los coeficientes nulos")
    g = None
    for p in coeffs:
        if not p.is_zero:
            g = p.normalized() if g is None else gcd(g, p)
    coeffs = [p.exact_div(g) for p in coeffs]
    if coeffs[-1].leading_coefficient() < 0:
        coeffs = [-p for p in coeffs]
    if status not in STATUSES:
        raise ValueError(f"estado desconocido: {status}")
    return Recurrence(tuple(coeffs), status, dict(meta or {}))


@dataclass
class SequenceTable:
    """Valores (k, n) -> Poly en c con un rango contiguo de n por columna."""
    values: dict = field(default_factory=dict)
    provenance: str = 'expanded'

    def column(self, k):
        return {n: v for (kk, n), v in sorted(self.values.items(), key=lambda kv: kv[0][1]) if kk == k}

    def ks(self):
        return sorted({k for k, _ in self.values})

    def n_range(self, k):
        ns = [n for kk, n in self.values if kk == k]
        return (min(ns), max(ns)) if ns else None

    def __contains__(self, key):
        return key in self.values

    def __getitem__(self, key):
        return self.values[key]

    @classmethod
    def from_coeff_table(cls, table, ks=None, provenance='expanded'):
        ks = range(table.n_max + 1) if ks is None else ks
        values = {(k, n): v for (k, n), v in table.entries.items() if k in set(ks)}
        return cls(values, provenance)

    @classmethod
    def from_list(cls, seq, k=0, start=0, provenance='expanded'):
        return cls({(k, start + i): _as_value(v) for i, v in enumerate(seq)}, provenance)


# ---------------------------------------------------------------------------
# Desenrollado
# ---------------------------------------------------------------------------

def check_leading(rec, n_first, n_last, params=None):
    """
    Comprueba que el coeficiente principal no se anula en n_first..n_last.

    Raises:
        LeadingCoeffVanishes: con el primer n donde se anula idénticamente en c.
    """
    for n in range(n_first, n_last + 1):
        if rec.coefficient_at(rec.order, n, params).is_zero:
            raise LeadingCoeffVanishes(n)


def unroll(rec, initials, n_max, params=None, start=0, provenance='unrolled'):
    """
    Genera a_start..a_{n_max} a partir de ``rec.order`` valores iniciales.

    Args:
        rec (Recurrence): recurrencia a desenrollar.
        initials (Sequence): a_start, ..., a_{start+order-1} (Poly en c o racionales).
        n_max (int): último índice generado.
        params (dict | None): parámetros sustituidos (por ejemplo {'k': 1}).
        start (int): índice del primer valor inicial.

    Returns:
        SequenceTable: valores en la columna params['k'] (0 si no hay k).

    Raises:
        LeadingCoeffVanishes: antes de generar nada si el coeficiente principal se
            anula en algún n necesario.
    """
    r = rec.order
    if len(initials) != r:
        raise ValueError(f"se necesitan {r} valores iniciales, no {len(initials)}")
    check_leading(rec, start, n_max - r, params)
    values = {start + i: _as_value(v) for i, v in enumerate(initials)}
    for n in range(start, n_max - r + 1):
        acc = Poly.zero(VALUE_VARIABLES)
        for i in range(r):
            acc = acc + rec.coefficient_at(i, n, params) * values[n + i]
        values[n + r] = (-acc).exact_div(rec.coefficient_at(r, n, params))
    k = (params or {}).get('k', 0)
    logger.debug(f"Desenrollados {len(values)} términos (k={k})")
    return SequenceTable({(k, n): v for n, v in values.items()}, provenance)


def failing_windows(rec, table, k, params=None):
    """Índices n cuya ventana n..n+order de la columna k no se anula."""
    params = dict(params or {})
    params.setdefault('k', k)
    column = table.column(k)
    bad = []
    for n in sorted(column):
        if all(n + i in column for i in range(rec.order + 1)):
            if not rec.apply(column, n, params).is_zero:
                bad.append(n)
    return bad


def annihilates(rec, table, ks=None, params=None):
    """True si todas las ventanas de las columnas ``ks`` se anulan exactamente."""
    ks = table.ks() if ks is None else ks
    return all(not failing_windows(rec, table, k, params) for k in ks)


# ---------------------------------------------------------------------------
# Adivinación
# ---------------------------------------------------------------------------

def _windows(table, k, order):
    column = table.column(k)
    return [n for n in sorted(column) if all(n + i in column for i in range(order + 1))]


def _split_windows(windows):
    hold = round(HOLDOUT_FRACTION * len(windows)) if len(windows) > 1 else 0
    if len(windows) > 1:
        hold = max(hold, 1)
    cut = len(windows) - hold
    return windows[:cut], windows[cut:]


def _window_rows(table, k, n, order, monomials):
    """Filas (una por potencia de c) de la ecuación de la ventana (k, n)."""
    column = table.column(k)
    by_power = {}
    for col, (i, a, b, e) in enumerate(monomials):
        scale = rational(n) ** a * rational(k) ** e
        if not scale:
            continue
        for (deg,), coeff in column[n + i].terms():
            row = by_power.setdefault(deg + b, {})
            row[col] = row.get(col, 0) + scale * coeff
    rows = []
    for power in sorted(by_power):
        row = [by_power[power].get(col, 0) for col in range(len(monomials))]
        if any(row):
            rows.append(row)
    return rows


def guess(table, order, deg_n, deg_c, deg_k=0, ks=None):
    """
    Ajusta una recurrencia exacta de orden ``order`` a los datos de la tabla.

    El ansatz es q_i(n, k, c) = sum x_{i,a,b,e} n^a c^b k^e con a <= deg_n,
    b <= deg_c y e <= deg_k. Se resuelve con el 75% inicial de las ventanas de
    cada columna y toda solución candidata se verifica después sobre todas
    las ventanas, incluidas las reservadas.

    Returns:
        Recurrence: recurrencia normalizada con estado 'conjectured'.

    Raises:
        InsufficientData: si las filas de entrenamiento no duplican las incógnitas.
        NoRecurrenceFound: si ningún candidato aniquila todas las ventanas.
    """
    ks = table.ks() if ks is None else list(ks)
    if len(ks) == 1:
        deg_k = 0
    monomials = [(i, a, b, e) for i, a, b, e in product(range(order + 1), range(deg_n + 1),
                                                         range(deg_c + 1), range(deg_k + 1))]
    training_rows = []
    held = 0
    for k in ks:
        train, holdout = _split_windows(_windows(table, k, order))
        held += len(holdout)
        for n in train:
            training_rows.extend(_window_rows(table, k, n, order, monomials))
    unknowns = len(monomials)
    if len(training_rows) < 2 * unknowns:
        raise InsufficientData(
            f"{len(training_rows)} filas para {unknowns} incógnitas (se necesitan {2 * unknowns})")
    logger.info(f"Adivinando orden {order}, grados (n={deg_n}, c={deg_c}, k={deg_k}): "
                f"{len(training_rows)} filas, {unknowns} incógnitas, {held} ventanas reservadas")

    basis = solve_linear(training_rows, unknowns, REC_VARIABLES)
    n_var = Poly.variable(REC_VARIABLES, 'n')
    k_var = Poly.variable(REC_VARIABLES, 'k')
    c_var = Poly.variable(REC_VARIABLES, 'c')
    meta = {'degrees': {'n': deg_n, 'c': deg_c, 'k': deg_k}, 'ks': ks, 'heldout_windows': held,
            'solution_dimension': len(basis)}
    for vector in basis:
        coeffs = [Poly.zero(REC_VARIABLES) for _ in range(order + 1)]
        for x, (i, a, b, e) in zip(vector, monomials):
            if not x.is_zero:
                coeffs[i] = coeffs[i] + x * n_var ** a * c_var ** b * k_var ** e
        if coeffs[-1].is_zero:
            continue
        rec = make_recurrence(coeffs, 'conjectured', meta)
        if annihilates(rec, table, ks):
            logger.info(f"Recurrencia encontrada y validada: {rec}")
            return rec
    raise NoRecurrenceFound(
        f"sin recurrencia de orden {order} con grados (n={deg_n}, c={deg_c}, k={deg_k})")


def guess_with_schedule(table, order, schedule, ks=None):
    """
    Recorre la escalada de grados hasta el primer éxito.

    Un ``InsufficientData`` en el primer escalón se propaga; en escalones
    posteriores se detiene la escalada.
    """
    last_error = None
    for step, (deg_n, deg_c, deg_k) in enumerate(schedule):
        try:
            return guess(table, order, deg_n, deg_c, deg_k, ks)
        except NoRecurrenceFound as e:
            last_error = e
        except InsufficientData:
            if step == 0:
                raise
            break
    raise NoRecurrenceFound(f"ningún escalón de {list(schedule)} funcionó: {last_error}")


# ---------------------------------------------------------------------------
# Cuadrado simétrico y gauge
# ---------------------------------------------------------------------------

def symmetric_square(rec):
    """
    Recurrencia de orden <= 3 para los cuadrados de las soluciones de ``rec``.

    Con L_{n+2} = alpha(n) L_{n+1} + beta(n) L_n se escriben L_{n+i}^2 en la base
    (L_n^2, L_n L_{n+1}, L_{n+1}^2) y se busca la dependencia lineal.

    Raises:
        DegenerateInput: si rec no es de orden 2 o alpha = beta = 0.
    """
    if rec.order != 2:
        raise DegenerateInput(f"se esperaba orden 2, no {rec.order}")
    q0, q1, q2 = rec.coeffs
    if q2.is_zero:
        raise DegenerateInput("coeficiente principal nulo")
    alpha = RatFn(-q1, q2)
    beta = RatFn(-q0, q2)
    if alpha.is_zero and beta.is_zero:
        raise DegenerateInput("alpha y beta son ambos nulos")
    one = RatFn(Poly.one(REC_VARIABLES))
    zero = RatFn(Poly.zero(REC_VARIABLES))
    shifted_alpha = alpha.shift('n')
    pairs = [
        (one, zero),
        (zero, one),
        (beta, alpha),
        (shifted_alpha * beta, shifted_alpha * alpha + beta.shift('n')),
    ]
    coords = [(a * a, (a * b) * 2, b * b) for a, b in pairs]
    rows = [[coords[i][j] for i in range(4)] for j in range(3)]
    basis = solve_linear(rows, 4, REC_VARIABLES)
    if not basis:
        raise DegenerateInput("los cuadrados no satisfacen ninguna relación de orden <= 3")

    def top(vec):
        return max(i for i, v in enumerate(vec) if not v.is_zero)

    best = min(basis, key=top)
    return make_recurrence(best, rec.status, {'derived_from': 'symmetric_square'})


def gauge_transform(rec, ratio):
    """
    Transporta ``rec`` de C_n = mu_n B_n a B_n, con ratio = mu_{n+1}/mu_n.

    El coeficiente i pasa a ser c_i * prod_{j<i} ratio(n + j), y se eliminan
    denominadores.
    """
    if not isinstance(ratio, RatFn):
        ratio = RatFn(ratio)
    factor = RatFn(Poly.one(REC_VARIABLES))
    entries = []
    for i, c in enumerate(rec.coeffs):
        entries.append(RatFn(c) * factor)
        factor = factor * ratio.shift('n', i)
    return make_recurrence(clear_denominators(entries), rec.status,
                           dict(rec.meta, gauge=str(ratio)))


def operator_equal_up_to_scalar(rec_a, rec_b):
    """True si los coeficientes son proporcionales sobre Q(n, k, c)."""
    if rec_a.order != rec_b.order:
        return False
    a, b = rec_a.coeffs, rec_b.coeffs
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if a[i] * b[j] != a[j] * b[i]:
                return False
    return any(not p.is_zero for p in a) and any(not p.is_zero for p in b)


def match_initials(rec, initials, reference, params, count=3, transform=None):
    """
    Desenrolla ``rec`` desde los primeros valores de ``initials`` y compara con ``reference``.

    Args:
        rec (Recurrence): recurrencia que define la sucesión candidata.
        initials (SequenceTable): fuente de los rec.order valores iniciales.
        reference (SequenceTable): valores esperados.
        params (dict): debe incluir 'k'.
        count (int): número de valores comparados.
        transform (Callable[[int, Poly], Poly] | None): aplicado a cada valor desenrollado.

    Raises:
        InsufficientData: si los rangos no se solapan en ``count`` índices.
    """
    k = params['k']
    source = initials.column(k)
    expected = reference.column(k)
    if len(source) < rec.order or not expected:
        raise InsufficientData(f"columna k={k} sin datos suficientes")
    start = min(source)
    first = [source[start + i] for i in range(rec.order)]
    targets = [n for n in range(start, start + count) if n in expected]
    if len(targets) < count:
        raise InsufficientData(f"los rangos no se solapan en {count} índices para k={k}")
    generated = unroll(rec, first, max(targets), params, start=start).column(k)
    for n in targets:
        value = generated[n] if transform is None else transform(n, generated[n])
        if value != expected[n]:
            logger.warning(f"Valor inicial distinto en (k={k}, n={n})")
            return False
    return True


def nonnegative_integer_roots(rec, params=None, start=0):
    """
    Enteros n >= start donde el coeficiente principal se anula idénticamente en c.

    Se toma el mcd de los coeficientes en c (polinomios en n) y se leen sus
    factores lineales.
    """
    lead = rec.leading.specialize(params or {})
    if lead.is_zero:
        raise DegenerateInput("coeficiente principal idénticamente nulo")
    parts = lead.collect(('c', 'k')).values()
    g = None
    for p in parts:
        g = p if g is None else gcd(g, p)
    if g.is_constant:
        return []
    _, factors = g.element.factor_list()
    roots = []
    for factor, _mult in factors:
        f = Poly(factor)
        if f.total_degree() != 1:
            continue
        slope = f.derivative('n')
        if not slope.is_constant or slope.is_zero or (f - slope * Poly.variable(f.variables, 'n')).free_variables():
            continue
        root = -(f - slope * Poly.variable(f.variables, 'n')).constant_value() / slope.constant_value()
        if root.denominator == 1 and int(root.numerator) >= start:
            roots.append(int(root.numerator))
    return sorted(set(roots))
