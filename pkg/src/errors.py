"""
Jerarquía de excepciones del proyecto.

Todas las operaciones de la librería lanzan subclases de ``BieberbachError``;
el pipeline las captura paso a paso y las registra en el informe.
"""


class BieberbachError(Exception):
    """Error base de todo el proyecto."""


class InexactDivision(BieberbachError, ArithmeticError):
    """La división exacta de polinomios dejó resto."""


class NotInvertible(BieberbachError, ArithmeticError):
    """La serie no tiene término constante unidad."""


class BadUnit(BieberbachError, ArithmeticError):
    """inv_sqrt exige término constante exactamente igual a 1."""


class OutOfTruncation(BieberbachError, KeyError):
    """Se pidió un coeficiente fuera de los límites de truncamiento."""

    def __str__(self):
        return str(self.args[0]) if self.args else "fuera de truncamiento"


class NotRevertible(BieberbachError, ArithmeticError):
    """La serie no admite inversa composicional."""


class SecondDerivativeError(BieberbachError):
    """El anillo de símbolos no contiene segundas derivadas en t."""


class EmptySolutionSpace(BieberbachError):
    """El ansatz del certificado WZ no tiene solución no trivial."""


class DegenerateLeading(BieberbachError):
    """Todas las soluciones tienen p_3 = 0."""


class LeadingCoeffVanishes(BieberbachError):
    """El coeficiente principal de la recurrencia se anula en n*."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"el coeficiente principal se anula en n = {n}")


class NoRecurrenceFound(BieberbachError):
    """Ninguna recurrencia del ansatz aniquila los datos."""


class InsufficientData(BieberbachError):
    """No hay datos suficientes para la operación pedida."""


class DegenerateInput(BieberbachError):
    """Recurrencia de entrada degenerada (coeficientes principales nulos)."""


class NotASquare(BieberbachError):
    """El polinomio no es un cuadrado perfecto."""


class NotCertifiable(BieberbachError):
    """El polinomio no admite certificado rho * c^a * (1-c)^b * L^2."""

    def __init__(self, message, remainder=None):
        self.remainder = remainder
        super().__init__(message)


class SchemaError(BieberbachError):
    """Artefacto JSON/CSV con esquema incompatible."""


class PolyParseError(BieberbachError, ValueError):
    """Texto de polinomio mal formado."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (posición {position})"
        super().__init__(message)
