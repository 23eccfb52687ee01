"""Exception types shared across the package."""


class CmlvError(Exception):
    """Base class for all package-specific failures."""


class DivergentSeries(CmlvError):
    """Hypergeometric series does not converge at the requested argument."""


class InadmissibleArgument(CmlvError):
    """A transformation was sampled outside its admissible argument set."""


class InadmissibleSample(CmlvError):
    """An identity was sampled at a point where evaluation is not certified."""


class DomainError(CmlvError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedFunction(CmlvError):
    """Requested q-expansion is not in the catalog."""


class SlowConvergence(CmlvError):
    """Im(tau) too small for any feasible truncation order."""


class PoleAtCusp(CmlvError):
    """Evaluation hit a pole (vanishing j-denominator)."""


class BadReduction(CmlvError):
    """Prime divides a denominator, the discriminant or the level."""


class InertPrime(CmlvError):
    """Prime does not split, so the requested Jacobi sum does not exist."""


class UnsupportedParameter(CmlvError):
    """Finite-field datum needs arithmetic beyond the implemented range."""


class UnsupportedDiscriminant(CmlvError):
    """Discriminant outside the embedded Chowla-Selberg table."""


class NoDecomposition(CmlvError):
    """Form has no embedded Eisenstein decomposition for the requested s."""


class RootNumberAmbiguous(CmlvError):
    """Neither root-number sign gives cutoff-stable L-values."""
