"""Exception hierarchy shared by all detbal modules."""


class DetbalError(Exception):
    """Base class for every error raised by this package."""


class ThresholdProximity(DetbalError, ValueError):
    """Total energy sits within the guard distance of a channel threshold."""

    def __init__(self, energy, channel_energy, guard):
        self.energy = energy
        self.channel_energy = channel_energy
        self.guard = guard
        super().__init__(
            f"E={energy!r} is within {guard:.3g} of channel threshold {channel_energy!r}"
        )


class SingularSystem(DetbalError, ArithmeticError):
    """The Lippmann-Schwinger linear system is numerically singular."""

    def __init__(self, energy, condition):
        self.energy = energy
        self.condition = condition
        super().__init__(f"LSE matrix at E={energy!r} has condition number {condition:.3e}")


class ResonancePole(DetbalError, ArithmeticError):
    """|1/N_psi| vanishes: the closed-form amplitudes hit a pole."""

    def __init__(self, energy, inverse_norm):
        self.energy = energy
        self.inverse_norm = inverse_norm
        super().__init__(f"resonance pole at E={energy!r} (|1/N_psi|={abs(inverse_norm):.3e})")


class QuadratureFailure(DetbalError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance within the interval budget."""

    def __init__(self, message, estimate=None, error=None):
        self.estimate = estimate
        self.error = error
        super().__init__(message)


class UndefinedRatio(DetbalError, ArithmeticError):
    """I(k, l) requested where one of the thermal integrals underflows."""


class IncompleteTable(DetbalError, ValueError):
    """A rate table is missing off-diagonal entries."""


class NonErgodic(DetbalError, ArithmeticError):
    """The Pauli generator has more than one stationary state."""

    def __init__(self, message, classes=()):
        self.classes = [tuple(c) for c in classes]
        super().__init__(message)


class DomainError(DetbalError, ValueError):
    """Logarithm of a vanishing population with nonzero probability flow."""


class DegenerateSpectrum(DetbalError, ValueError):
    """Two system levels coincide within the degeneracy guard."""


class NonUnitaryBasis(DetbalError, ValueError):
    """Eigenbasis overlaps do not form a unitary matrix."""


class ConfigError(DetbalError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """The configuration file is not valid YAML."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class ValidationError(ConfigError, ValueError):
    """The configuration parsed but violates the schema; lists every violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))
