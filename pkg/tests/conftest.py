import mpmath
import pytest

from cmlv.precision import PrecisionContext


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext()


def assert_close(a, b, tol=1e-30):
    # compare at high precision; global mpmath state must not truncate this
    with mpmath.mp.workprec(320):
        err = abs(mpmath.mpmathify(a) - mpmath.mpmathify(b))
        assert err < tol, f"|{a} - {b}| = {err} >= {tol}"
