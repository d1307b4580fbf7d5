"""
Núcleo de aritmética exacta del proyecto.

Este módulo contiene los racionales de precisión arbitraria, los polinomios
dispersos multivariados (``Poly``), las funciones racionales (``RatFn``), el
máximo común divisor con convención de contenido y la eliminación libre de
fracciones que resuelve sistemas lineales sobre Q(n, k, c).

Los polinomios se apoyan en los anillos dispersos de ``sympy.polys.rings``
sobre QQ con orden graduado lexicográfico, de modo que la forma canónica y la
serialización son reproducibles.
"""

import logging
import re
from collections import defaultdict
from functools import lru_cache, reduce
from math import gcd as igcd, lcm as ilcm

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyRing

from src.errors import InexactDivision, PolyParseError

logger = logging.getLogger(__name__)

Rational = QQ.dtype


# ---------------------------------------------------------------------------
# Racionales
# ---------------------------------------------------------------------------

def rational(value):
    """
    Convierte enteros, cadenas 'a/b', fracciones o elementos de QQ en un racional exacto.

    Args:
        value: valor a convertir.

    Returns:
        Rational: elemento de QQ con denominador positivo y fracción reducida.
    """
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if '/' in text:
                num, den = text.split('/', 1)
                return QQ(int(num), int(den))
            return QQ(int(text))
        except (ValueError, ZeroDivisionError) as e:
            raise PolyParseError(f"racional mal formado: {value!r}") from e
    if hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return QQ(int(value.numerator), int(value.denominator))
    raise TypeError(f"no se puede convertir {value!r} a racional")


def format_rational(q):
    """Texto 'a' o 'a/b' de un racional."""
    q = rational(q)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def rational_gcd(a, b):
    """mcd de racionales: mcd de numeradores entre mcm de denominadores (siempre >= 0)."""
    a, b = rational(a), rational(b)
    if not a:
        return abs(b)
    if not b:
        return abs(a)
    return QQ(igcd(int(a.numerator), int(b.numerator)),
              ilcm(int(a.denominator), int(b.denominator)))


# ---------------------------------------------------------------------------
# Polinomios dispersos
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def poly_ring(variables):
    """Anillo QQ[variables] con orden grlex; se cachea por lista de variables."""
    variables = tuple(variables)
    if not variables:
        raise ValueError("un anillo de polinomios necesita al menos una variable")
    return PolyRing(variables, QQ, grlex)


class Poly:
    """
    Polinomio disperso exacto sobre una lista ordenada de indeterminadas.

    Es inmutable: todas las operaciones devuelven valores nuevos. Dos ``Poly``
    sobre la misma lista de variables son iguales si y solo si coinciden sus
    mapas de términos.
    """

    __slots__ = ('_p',)

    def __init__(self, element):
        self._p = element

    # -- construcción -------------------------------------------------------

    @classmethod
    def zero(cls, variables):
        return cls(poly_ring(tuple(variables)).zero)

    @classmethod
    def one(cls, variables):
        return cls(poly_ring(tuple(variables)).one)

    @classmethod
    def constant(cls, variables, value):
        ring = poly_ring(tuple(variables))
        return cls(ring.from_dict({ring.zero_monom: rational(value)}))

    @classmethod
    def variable(cls, variables, name):
        variables = tuple(variables)
        return cls(poly_ring(variables).gens[variables.index(name)])

    @classmethod
    def from_terms(cls, variables, terms):
        """
        Construye un polinomio a partir de un mapa exponentes -> coeficiente.

        Args:
            variables (Sequence[str]): variables declaradas.
            terms (Mapping[tuple, value]): vectores de exponentes y coeficientes.
        """
        variables = tuple(variables)
        ring = poly_ring(variables)
        clean = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables) or min(exps, default=0) < 0:
                raise ValueError(f"vector de exponentes {exps} incompatible con {variables}")
            coeff = rational(coeff)
            if coeff:
                clean[exps] = clean.get(exps, QQ.zero) + coeff
        return cls(ring.from_dict({e: c for e, c in clean.items() if c}))

    @classmethod
    def parse(cls, text, variables):
        """Lee la forma textual del proyecto (coeficientes a/b, ``^`` y ``*`` explícitos)."""
        return _PolyParser(text, tuple(variables)).parse()

    # -- acceso --------------------------------------------------------------

    @property
    def ring(self):
        return self._p.ring

    @property
    def element(self):
        return self._p

    @property
    def variables(self):
        return tuple(str(s) for s in self._p.ring.symbols)

    @property
    def is_zero(self):
        return not self._p

    @property
    def is_constant(self):
        return self._p.is_ground

    def terms(self):
        """Lista (exponentes, coeficiente) en orden grlex descendente."""
        return list(self._p.terms())

    def constant_value(self):
        """Valor racional de un polinomio constante."""
        if not self._p.is_ground:
            raise ValueError(f"{self} no es constante")
        return dict.get(self._p, self._p.ring.zero_monom, QQ.zero)

    def leading_coefficient(self):
        return self._p.LC if self._p else QQ.zero

    def degree(self, name):
        if not self._p:
            return -1
        i = self.variables.index(name)
        return max(m[i] for m in self._p.keys())

    def total_degree(self):
        if not self._p:
            return -1
        return max(sum(m) for m in self._p.keys())

    def __len__(self):
        return len(self._p)

    def free_variables(self):
        names = self.variables
        used = set()
        for monom in self._p.keys():
            used.update(names[i] for i, e in enumerate(monom) if e)
        return tuple(n for n in names if n in used)

    # -- aritmética -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other._p.ring is not self._p.ring:
                raise ValueError(f"variables incompatibles: {self.variables} frente a {other.variables}")
            return other._p
        if isinstance(other, RatFn):
            return NotImplemented
        try:
            return self._p.ring.ground_new(rational(other))
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Poly(self._p + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Poly(self._p - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Poly(o - self._p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Poly(self._p * o)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly(-self._p)

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("solo se admiten potencias enteras no negativas")
        return Poly(self._p ** exponent)

    def scale(self, q):
        """Multiplica por un racional."""
        return Poly(self._p * rational(q))

    def exact_div(self, other):
        """
        División exacta; lanza InexactDivision si queda resto.

        Args:
            other (Poly | racional): divisor no nulo.
        """
        if not isinstance(other, Poly):
            q = rational(other)
            if not q:
                raise ZeroDivisionError("división por cero")
            return Poly(self._p * (QQ.one / q))
        o = self._coerce(other)
        if not o:
            raise ZeroDivisionError("división por el polinomio cero")
        if o.is_ground:
            return Poly(self._p * (QQ.one / dict.get(o, o.ring.zero_monom)))
        try:
            return Poly(self._p.exquo(o))
        except ExactQuotientFailed as e:
            raise InexactDivision(f"{other} no divide a {self}") from e

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and dict.__eq__(self._p, other._p)
        try:
            q = rational(other)
        except TypeError:
            return NotImplemented
        return self._p.is_ground and self.constant_value() == q if self._p else not q

    def __hash__(self):
        return hash((self.variables, frozenset(self._p.items())))

    # -- contenido ---------------------------------------------------------------

    def content(self):
        """Contenido racional positivo: mcd de numeradores / mcm de denominadores."""
        if not self._p:
            return QQ.zero
        coeffs = list(self._p.values())
        num = reduce(igcd, (int(c.numerator) for c in coeffs))
        den = reduce(ilcm, (int(c.denominator) for c in coeffs))
        return QQ(num, den)

    def primitive(self):
        """
        Separa contenido con signo y parte primitiva.

        Returns:
            tuple: (contenido, parte primitiva) con la parte primitiva de coeficientes
            enteros coprimos y coeficiente principal positivo.
        """
        if not self._p:
            return QQ.zero, self
        content = self.content()
        if self.leading_coefficient() < 0:
            content = -content
        return content, Poly(self._p * (QQ.one / content))

    def normalized(self):
        """Mismo polinomio con coeficiente principal positivo."""
        return -self if self._p and self.leading_coefficient() < 0 else self

    def gcd(self, other):
        return gcd(self, other)

    # -- cálculo --------------------------------------------------------------------

    def _gen(self, name):
        return self._p.ring.gens[self.variables.index(name)]

    def derivative(self, name):
        return Poly(self._p.diff(self._gen(name)))

    def subs(self, name, value):
        """Sustituye una variable por un racional o por otro polinomio del mismo anillo."""
        ring = self._p.ring
        if isinstance(value, Poly):
            replacement = self._coerce(value)
        else:
            replacement = ring.ground_new(rational(value))
        return Poly(self._p.compose(self._gen(name), replacement))

    def shift(self, name, amount=1):
        """p(name + amount)."""
        return self.subs(name, Poly(self._gen(name)) + amount)

    def specialize(self, assignment):
        """Sustituye varias variables por racionales manteniendo el anillo."""
        result = self
        for name, value in assignment.items():
            if name in self.variables:
                result = result.subs(name, value)
        return result

    def evaluate(self, point):
        """
        Evalúa en un punto racional.

        Args:
            point (Mapping[str, value]): valores de todas las variables que aparecen.

        Returns:
            Rational: valor exacto.
        """
        names = self.variables
        values = [rational(point[name]) if name in point else None for name in names]
        total = QQ.zero
        for monom, coeff in self._p.items():
            term = coeff
            for i, e in enumerate(monom):
                if e:
                    if values[i] is None:
                        raise KeyError(f"falta el valor de {names[i]}")
                    term *= values[i] ** e
            total += term
        return total

    def convert(self, variables):
        """Reexpresa el polinomio sobre otra lista de variables (por nombre)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        mine = self.variables
        used = set(self.free_variables())
        missing = [v for v in used if v not in variables]
        if missing:
            raise ValueError(f"las variables {missing} no existen en {variables}")
        target = [variables.index(v) if v in variables else None for v in mine]
        ring = poly_ring(variables)
        terms = {}
        for monom, coeff in self._p.items():
            exps = [0] * len(variables)
            for i, e in enumerate(monom):
                if e:
                    exps[target[i]] = e
            terms[tuple(exps)] = coeff
        return Poly(ring.from_dict(terms))

    def collect(self, names):
        """
        Agrupa por potencias de ``names``.

        Returns:
            dict: exponentes de ``names`` -> Poly sobre el resto de variables.
        """
        mine = self.variables
        idx = [mine.index(n) for n in names]
        rest = [i for i in range(len(mine)) if i not in idx]
        ring = poly_ring(tuple(mine[i] for i in rest))
        groups = defaultdict(dict)
        for monom, coeff in self._p.items():
            key = tuple(monom[i] for i in idx)
            groups[key][tuple(monom[i] for i in rest)] = coeff
        return {key: Poly(ring.from_dict(d)) for key, d in groups.items()}

    # -- texto ----------------------------------------------------------------------

    def to_text(self):
        if not self._p:
            return '0'
        names = self.variables
        pieces = []
        for monom, coeff in self._p.terms():
            factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(names, monom) if e]
            magnitude = abs(coeff)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = '*'.join(factors)
            else:
                body = '*'.join([format_rational(magnitude)] + factors)
            sign = '-' if coeff < 0 else '+'
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ('-' if first_sign == '-' else '') + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Poly({self.to_text()!r}, {self.variables})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class _PolyParser:
    """Analizador descendente de la forma textual de ``Poly``."""

    def __init__(self, text, variables):
        self.text = text
        self.variables = variables
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            kind = 'num' if m.group(1) else 'name' if m.group(2) else 'op'
            self.tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise PolyParseError("polinomio vacío", 0)
        result = Poly.zero(self.variables)
        sign = 1
        kind, value, pos = self._peek()
        if kind == 'op' and value in '+-':
            self._take()
            sign = -1 if value == '-' else 1
        result = result + self._term().scale(sign)
        while self.i < len(self.tokens):
            kind, value, pos = self._take()
            if kind != 'op' or value not in '+-':
                raise PolyParseError(f"se esperaba '+' o '-', no {value!r}", pos)
            term = self._term()
            result = result + term if value == '+' else result - term
        return result

    def _term(self):
        value = self._factor()
        while self._peek()[0] == 'op' and self._peek()[1] == '*':
            self._take()
            value = value * self._factor()
        return value

    def _factor(self):
        kind, value, pos = self._take()
        if kind == 'num':
            num = int(value)
            if self._peek()[0] == 'op' and self._peek()[1] == '/':
                self._take()
                kind, den, dpos = self._take()
                if kind != 'num' or int(den) == 0:
                    raise PolyParseError("denominador inválido", dpos)
                return Poly.constant(self.variables, QQ(num, int(den)))
            return Poly.constant(self.variables, num)
        if kind == 'name':
            if value not in self.variables:
                raise PolyParseError(f"variable desconocida {value!r}", pos)
            var = Poly.variable(self.variables, value)
            if self._peek()[0] == 'op' and self._peek()[1] == '^':
                self._take()
                kind, exp, epos = self._take()
                if kind != 'num':
                    raise PolyParseError("exponente inválido", epos)
                return var ** int(exp)
            return var
        raise PolyParseError(f"token inesperado {value!r}", pos)


# ---------------------------------------------------------------------------
# mcd y funciones racionales
# ---------------------------------------------------------------------------

def gcd(a, b):
    """
    Máximo común divisor con convención de contenido.

    El resultado conserva el mcd racional de los contenidos y tiene coeficiente
    principal positivo: gcd(6c, 4c^2) = 2c y gcd(p, 0) = p normalizado.
    """
    if a.variables != b.variables:
        raise ValueError("gcd de polinomios con variables distintas")
    if b.is_zero:
        return a.normalized()
    if a.is_zero:
        return b.normalized()
    content = rational_gcd(a.content(), b.content())
    if a.is_constant or b.is_constant:
        return Poly.constant(a.variables, content)
    g = Poly(a.element.gcd(b.element))
    return g.primitive()[1].scale(content)


def lcm(a, b):
    """Mínimo común múltiplo normalizado."""
    if a.is_zero or b.is_zero:
        return Poly.zero(a.variables)
    return (a * b).exact_div(gcd(a, b)).normalized()


class RatFn:
    """
    Función racional num/den reducida.

    El denominador tiene contenido 1 y coeficiente principal positivo; numerador
    y denominador son coprimos, así que la igualdad es igualdad de forma canónica.
    """

    __slots__ = ('num', 'den')

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            if den is None:
                raise TypeError("RatFn necesita al menos un Poly")
            num = Poly.constant(den.variables, num)
        if den is None:
            den = Poly.one(num.variables)
        elif not isinstance(den, Poly):
            den = Poly.constant(num.variables, den)
        if den.is_zero:
            raise ZeroDivisionError("denominador nulo")
        if num.is_zero:
            den = Poly.one(num.variables)
        elif not den.is_constant:
            g = gcd(num, den)
            if not g.is_constant:
                num, den = num.exact_div(g), den.exact_div(g)
        content, den = den.primitive()
        self.num = num.exact_div(content) if content != 1 else num
        self.den = den

    @property
    def variables(self):
        return self.num.variables

    @property
    def is_zero(self):
        return self.num.is_zero

    def _lift(self, other):
        if isinstance(other, RatFn):
            return other
        if isinstance(other, Poly):
            return RatFn(other)
        return RatFn(Poly.constant(self.variables, rational(other)))

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RatFn(self.num + o.num, self.den)
        return RatFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RatFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.is_zero:
            raise ZeroDivisionError("división por la función racional cero")
        return RatFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, exponent):
        return RatFn(self.num ** exponent, self.den ** exponent)

    def __eq__(self, other):
        if not isinstance(other, (RatFn, Poly)):
            try:
                other = self._lift(other)
            except TypeError:
                return NotImplemented
        o = self._lift(other)
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def subs(self, name, value):
        return RatFn(self.num.subs(name, value), self.den.subs(name, value))

    def shift(self, name, amount=1):
        return RatFn(self.num.shift(name, amount), self.den.shift(name, amount))

    def derivative(self, name):
        return RatFn(self.num.derivative(name) * self.den - self.num * self.den.derivative(name),
                     self.den * self.den)

    def evaluate(self, point):
        den = self.den.evaluate(point)
        if not den:
            raise ZeroDivisionError("polo de la función racional")
        return self.num.evaluate(point) / den

    def to_poly(self):
        """Devuelve el numerador si el denominador es 1."""
        if self.den != 1:
            raise InexactDivision(f"{self} no es un polinomio")
        return self.num

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def clear_denominators(entries):
    """
    Multiplica un vector de RatFn por el mcm de sus denominadores.

    Returns:
        list[Poly]: vector polinómico proporcional a ``entries``.
    """
    denominator = None
    for e in entries:
        if not e.is_zero:
            denominator = e.den if denominator is None else lcm(denominator, e.den)
    if denominator is None:
        return [e.num for e in entries]
    return [e.num * denominator.exact_div(e.den) for e in entries]


def primitive_vector(vector):
    """
    Divide un vector de Poly por el mcd de sus entradas y fija el signo.

    La primera entrada no nula queda con coeficiente principal positivo y el
    vector con contenido 1.
    """
    g = None
    for e in vector:
        if not e.is_zero:
            g = e.normalized() if g is None else gcd(g, e)
    if g is None:
        return list(vector)
    out = [e.exact_div(g) for e in vector]
    first = next(e for e in out if not e.is_zero)
    if first.leading_coefficient() < 0:
        out = [-e for e in out]
    return out


# ---------------------------------------------------------------------------
# Sistemas lineales
# ---------------------------------------------------------------------------

def _as_ratfn(e, variables):
    if isinstance(e, RatFn):
        return RatFn(e.num.convert(variables), e.den.convert(variables))
    if isinstance(e, Poly):
        return RatFn(e.convert(variables))
    return RatFn(Poly.constant(variables, e))


def _as_poly_row(row, variables):
    return clear_denominators([_as_ratfn(e, variables) for e in row])


def _size(p):
    return (p.total_degree(), len(p))


def _row_primitive(row):
    g = None
    for e in row:
        if not e.is_zero:
            g = e.normalized() if g is None else gcd(g, e)
            if g == 1:
                return row
    if g is None or g == 1:
        return row
    return [e.exact_div(g) for e in row]


def _infer_variables(rows):
    for row in rows:
        for e in row:
            if isinstance(e, (Poly, RatFn)):
                return e.variables
    raise ValueError("no se pueden deducir las variables: indique 'variables'")


def solve_linear(rows, num_unknowns=None, variables=None):
    """
    Base del espacio nulo de un sistema lineal homogéneo sobre Q(variables).

    La eliminación es libre de fracciones (multiplicación cruzada por los
    cofactores del mcd del pivote) y cada fila se divide por el mcd de sus
    entradas tras cada paso, de modo que todas las entradas siguen siendo
    polinomios pequeños. La base devuelta es la de la forma escalonada
    reducida (una columna libre por vector), con denominadores eliminados y
    normalización determinista.

    Args:
        rows (list[list[Poly | RatFn | racional]]): filas del sistema.
        num_unknowns (int | None): número de incógnitas (por defecto, longitud de fila).
        variables (Sequence[str] | None): anillo de coeficientes.

    Returns:
        list[tuple[Poly, ...]]: base del espacio de soluciones (posiblemente vacía).
    """
    rows = list(rows)
    if num_unknowns is None:
        if not rows:
            raise ValueError("sistema vacío sin número de incógnitas")
        num_unknowns = len(rows[0])
    if variables is None:
        variables = _infer_variables(rows)
    variables = tuple(variables)
    matrix = []
    for row in rows:
        if len(row) != num_unknowns:
            raise ValueError("todas las filas deben tener la misma longitud")
        prow = _as_poly_row(row, variables)
        if any(not e.is_zero for e in prow):
            matrix.append(_row_primitive(prow))
    logger.debug(f"Eliminando sistema {len(matrix)}x{num_unknowns}")

    pivots = {}
    used = set()
    for col in range(num_unknowns):
        candidates = [i for i in range(len(matrix)) if i not in used and not matrix[i][col].is_zero]
        if not candidates:
            continue
        piv = min(candidates, key=lambda i: (_size(matrix[i][col]), sum(len(e) for e in matrix[i]), i))
        used.add(piv)
        pivots[col] = piv
        d = matrix[piv][col]
        for i in range(len(matrix)):
            if i == piv or matrix[i][col].is_zero:
                continue
            a = matrix[i][col]
            g = gcd(d, a)
            dd, aa = d.exact_div(g), a.exact_div(g)
            matrix[i] = _row_primitive([dd * x - aa * y for x, y in zip(matrix[i], matrix[piv])])

    zero = Poly.zero(variables)
    basis = []
    for free in range(num_unknowns):
        if free in pivots:
            continue
        entries = [RatFn(zero) for _ in range(num_unknowns)]
        entries[free] = RatFn(Poly.one(variables))
        for col, r in pivots.items():
            if not matrix[r][free].is_zero:
                entries[col] = RatFn(-matrix[r][free], matrix[r][col])
        basis.append(tuple(primitive_vector(clear_denominators(entries))))
    logger.debug(f"Rango {len(pivots)}, dimensión del espacio nulo {len(basis)}")
    return basis


def solve_inhomogeneous(rows, rhs, variables=None, column_order=None):
    """
    Resuelve A x = b sobre Q(variables) por eliminación en el cuerpo de fracciones.

    Pensada para sistemas dispersos: cada fila es un diccionario columna -> RatFn
    y las entradas se mantienen reducidas, sin acumular menores. Las columnas se
    eliminan en el orden ``column_order``; para cada una, el pivote es la fila
    con menos columnas pendientes (regla de Markowitz), luego la de entrada más
    pequeña y luego la de menor índice.

    Args:
        rows (list[list[Poly | RatFn | racional]]): filas de A.
        rhs (list[Poly | RatFn | racional]): término independiente b.
        variables (Sequence[str] | None): anillo de coeficientes.
        column_order (Sequence[int] | None): permutación de las columnas.

    Returns:
        tuple | None: (solución particular con las columnas libres a cero, como
        tupla de RatFn; base homogénea como en ``solve_linear``) o None si el
        sistema es incompatible.
    """
    rows = [list(r) for r in rows]
    if len(rows) != len(rhs):
        raise ValueError("rhs y filas con longitudes distintas")
    if variables is None:
        variables = _infer_variables(rows + [list(rhs)])
    variables = tuple(variables)
    m = len(rows[0]) if rows else 0
    order = list(range(m)) if column_order is None else list(column_order)
    if sorted(order) != list(range(m)):
        raise ValueError("column_order debe ser una permutación de las columnas")

    constant = m
    matrix = []
    for row, b in zip(rows, rhs):
        if len(row) != m:
            raise ValueError("todas las filas deben tener la misma longitud")
        entries = {}
        for col, e in enumerate(list(row) + [b]):
            e = _as_ratfn(e, variables)
            if not e.is_zero:
                entries[col] = e
        if entries:
            matrix.append(entries)
    logger.debug(f"Eliminando sistema disperso {len(matrix)}x{m}")

    pending = set(range(m))
    pivots = {}
    used = set()
    for col in order:
        candidates = [i for i, r in enumerate(matrix) if i not in used and col in r]
        pending.discard(col)
        if not candidates:
            continue
        piv = min(candidates, key=lambda i: (sum(1 for j in matrix[i] if j in pending),
                                             _size(matrix[i][col].num), i))
        used.add(piv)
        pivots[col] = piv
        d = matrix[piv][col]
        prow = {j: e / d for j, e in matrix[piv].items()}
        matrix[piv] = prow
        for i, r in enumerate(matrix):
            if i == piv or col not in r:
                continue
            factor = r[col]
            for j, e in prow.items():
                value = r[j] - factor * e if j in r else -(factor * e)
                if value.is_zero:
                    r.pop(j, None)
                else:
                    r[j] = value

    if any(i not in used and constant in r for i, r in enumerate(matrix)):
        return None

    zero = RatFn(Poly.zero(variables))
    particular = [zero] * m
    for col, r in pivots.items():
        particular[col] = matrix[r].get(constant, zero)
    basis = []
    for free in range(m):
        if free in pivots:
            continue
        entries = [zero] * m
        entries[free] = RatFn(Poly.one(variables))
        for col, r in pivots.items():
            if free in matrix[r]:
                entries[col] = -matrix[r][free]
        basis.append(tuple(primitive_vector(clear_denominators(entries))))
    logger.debug(f"Rango {len(pivots)}, dimensión homogénea {len(basis)}")
    return tuple(particular), basis
