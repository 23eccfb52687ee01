"""cmlv: hypergeometric / modular identities and CM L-values at high precision."""

__version__ = "0.1.0"

from .precision import PrecisionContext, DEFAULT_CTX

__all__ = ["PrecisionContext", "DEFAULT_CTX", "__version__"]
