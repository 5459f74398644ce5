import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st
from hypothesis.extra.numpy import arrays

# Matrix sizes vary per example, so per-example deadlines misfire; the suite
# bounds total runtime instead.
settings.register_profile(
    "kronspin",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("kronspin")

dims = st.integers(min_value=1, max_value=6)
unit_floats = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@st.composite
def complex_matrices(draw, rows=dims, cols=dims):
    """Complex matrices with entries in the unit square [-1, 1]^2."""
    m = draw(rows) if not isinstance(rows, int) else rows
    n = draw(cols) if not isinstance(cols, int) else cols
    re = draw(arrays(np.float64, (m, n), elements=unit_floats))
    im = draw(arrays(np.float64, (m, n), elements=unit_floats))
    return re + 1j * im


@st.composite
def square_pairs(draw, max_dim=6):
    """Two square matrices of one shared dimension."""
    n = draw(st.integers(min_value=1, max_value=max_dim))
    return (
        draw(complex_matrices(rows=n, cols=n)),
        draw(complex_matrices(rows=n, cols=n)),
    )


@st.composite
def hermitian_matrices(draw, max_dim=6):
    n = draw(st.integers(min_value=1, max_value=max_dim))
    a = draw(complex_matrices(rows=n, cols=n))
    return 0.5 * (a + a.conj().T)


def diagonally_dominant(a):
    """Shift the diagonal to make a strictly diagonally dominant (invertible,
    moderately conditioned) copy."""
    b = np.array(a, dtype=np.complex128, copy=True)
    n = b.shape[0]
    for i in range(n):
        b[i, i] = b[i, i] + np.sum(np.abs(b[i])) + 1.0
    return b


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
