#!/usr/bin/env python3

# exception hierarchy of the moment library


class LMomentError(Exception):
    """
    General exception type for the moment library.
    """


class ModulusError(LMomentError, ValueError):
    """
    Modulus has a shape that is not supported (only primes and products of two
    distinct odd primes are).
    """


class CharacterError(LMomentError, ValueError):
    """
    Character does not satisfy the parity / primitivity required by the
    operation (e.g. odd or imprimitive character passed to the joint AFE).
    """


class CoprimalityError(LMomentError, ValueError):
    """
    Arguments of a family identity are not coprime to the modulus.
    """


class PoleError(LMomentError, ValueError):
    """
    Gamma function argument lies on (or within the guard radius of) a pole.
    """
    def __init__(self, message: str, z: complex = None):
        """
        :param message: error message to show
        :param z: offending argument
        """
        super().__init__(message)
        self.z = z


class DomainError(LMomentError, ValueError):
    """
    Argument outside of the domain of the operation (y <= 0, gcd(c, d) != 1,
    invalid contour plan, ...).
    """


class DivergenceError(LMomentError, ArithmeticError):
    """
    Requested value is divergent (L(1, f) of the t = 0 Eisenstein series).
    """


class CoefficientFileError(LMomentError, ValueError):
    """
    Coefficient file does not follow the expected grammar.
    """
    def __init__(self, message: str, path: str = None, line_number: int = None):
        """
        :param message: error message to show
        :param path: path of the offending file
        :param line_number: 1-based number of the offending line
        """
        if path is not None and line_number is not None:
            message = f'{path}:{line_number}: {message}'
        elif path is not None:
            message = f'{path}: {message}'
        super().__init__(message)
        self.path = path
        self.line_number = line_number


class MissingCoefficientError(LMomentError, KeyError):
    """
    Hecke eigenvalue of a prime needed for the extension is not available.
    """
    def __init__(self, message: str, prime: int = None):
        """
        :param message: error message to show
        :param prime: prime whose eigenvalue is missing
        """
        super().__init__(message)
        self.prime = prime

    def __str__(self):
        # KeyError quotes its argument otherwise
        return str(self.args[0])


class TruncationError(LMomentError, RuntimeError):
    """
    Approximate functional equation horizon exceeds the configured cap.
    """


class ConfigError(LMomentError, ValueError):
    """
    Bad command line flag or configuration file value.
    """
