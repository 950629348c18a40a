"""Jerarquía de errores de latpoly y su traducción a códigos de salida."""

EXIT_OK = 0
EXIT_CRITERION_FAILED = 1
EXIT_CONFIG_ERROR = 2


class LatpolyError(Exception):
    exit_code = EXIT_CRITERION_FAILED


class PrecisionExhausted(LatpolyError):
    """Se alcanzó el tope de precisión sin separar el intervalo ni certificar igualdad."""


class ScalarSyntaxError(LatpolyError, ValueError):
    exit_code = EXIT_CONFIG_ERROR


class ConfigError(LatpolyError, ValueError):
    exit_code = EXIT_CONFIG_ERROR


class DegenerateSimplex(LatpolyError, ValueError):
    pass


class PoleCollision(LatpolyError):
    pass


class NotConverged(LatpolyError):
    pass


class DenominatorZero(LatpolyError, ZeroDivisionError):
    pass


class RationalAlpha(LatpolyError, ValueError):
    pass


class NotCoprime(LatpolyError, ValueError):
    pass


class NotPairwiseCoprime(LatpolyError, ValueError):
    pass


class InterpolationInconsistent(LatpolyError):
    pass


class InsufficientData(LatpolyError, ValueError):
    pass


class CriterionFailed(LatpolyError):
    pass
