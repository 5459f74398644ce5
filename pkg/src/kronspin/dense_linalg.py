"""Dense complex matrix arithmetic and a Hermitian eigensolver.

The eigensolver is a cyclic Jacobi iteration on the (complex) Hermitian
matrix: each rotation annihilates one off-diagonal pair through a unitary
2 x 2 similarity, sweeps repeat until the off-diagonal Frobenius mass falls
below 1e-12 of the input norm.  Small off-diagonal entries are skipped per
sweep at a threshold that still forces global convergence.  Purely real
symmetric inputs (common here: isotropic spin Hamiltonians are real) run the
same kernel in float64, which roughly halves the work.

Accuracy over speed: this is a desk-scale solver (dimension up to ~2^10),
deliberately dependency-free so the Kronecker and spin layers sit on code
whose every rotation is inspectable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._common import DEFAULT_TOL, as_matrix, as_square, frobenius
from .errors import ContractError, ConvergenceError, ShapeError, SingularityError

# Pivot magnitude below which elimination refuses to divide.
PIVOT_TOL = 1e-12
# Relative Hermiticity tolerance for eigh input checking.
HERMITICITY_RTOL = 1e-10
# Off-diagonal Frobenius mass relative to the input norm at which sweeps stop.
JACOBI_RTOL = 1e-12
MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted real eigenvalues, optionally paired with eigenvector columns.

    ``dimension`` is the dimension of the operator the values came from; a
    full dense solve carries exactly ``dimension`` eigenvalues, a partial
    (extremal) solve carries fewer.  When eigenvectors are present, column k
    pairs with eigenvalue k and each column's phase is fixed so that its
    first largest-magnitude component is real nonnegative.
    """

    eigenvalues: np.ndarray
    dimension: int
    eigenvectors: np.ndarray | None = None


def identity(n: int) -> np.ndarray:
    if n < 1:
        raise ShapeError(f"identity dimension must be >= 1, got {n}")
    return np.eye(n, dtype=np.complex128)


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dimensions differ: {a.shape} x {b.shape}")
    return a @ b


def add(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"shapes differ: {a.shape} vs {b.shape}")
    return a + b


def scale(s: complex, a) -> np.ndarray:
    return complex(s) * as_matrix(a)


def conj_transpose(a) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def inverse(a) -> np.ndarray:
    """Matrix inverse by Gauss-Jordan elimination with partial pivoting."""
    a = as_square(a)
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n, dtype=np.complex128)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[piv, col]) < PIVOT_TOL:
            raise SingularityError(
                f"pivot magnitude {abs(aug[piv, col]):.3e} below {PIVOT_TOL} at column {col}"
            )
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] / aug[col, col]
        rest = np.arange(n) != col
        aug[rest] -= np.outer(aug[rest, col], aug[col])
    return aug[:, n:].copy()


def _offdiag_norm(w: np.ndarray) -> float:
    # summed directly over the off-diagonal entries; the subtraction form
    # sqrt(|W|_F^2 - |diag|^2) cancels catastrophically near convergence
    a2 = np.abs(w) ** 2
    np.fill_diagonal(a2, 0.0)
    return float(np.sqrt(a2.sum()))


def _jacobi_sweeps(w: np.ndarray, vt: np.ndarray | None, stop: float):
    """Cyclic Jacobi on the Hermitian working matrix ``w`` (modified in place).

    ``w`` may be float64 (symmetric) or complex128 (Hermitian); the rotation
    algebra is written dtype-generically.  Since w stays Hermitian, each
    similarity U^H w U only needs rows p and q recomputed, with columns
    mirrored by conjugation; this also stops Hermiticity drift.  ``vt``
    accumulates the transposed unitary (row k is eigenvector candidate k) so
    its updates are contiguous as well.  Returns the number of sweeps used or
    raises ConvergenceError.
    """
    n = w.shape[0]
    if n == 1:
        return 0
    for sweep in range(MAX_SWEEPS):
        off = _offdiag_norm(w)
        if off <= stop:
            return sweep
        # Skipping everything below stop/n still leaves the total off-mass
        # under stop, so a sweep that rotates nothing has already converged.
        thresh = stop / n
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = w[p, q]
                ab = abs(beta)
                if ab <= thresh:
                    continue
                alpha = w[p, p].real
                gamma = w[q, q].real
                tau = (gamma - alpha) / (2.0 * ab)
                # smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
                if tau >= 0:
                    t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                phase = beta / ab
                pc = np.conj(phase)
                # similarity by U = [[c, -s*phase], [s*conj(phase), c]] on (p, q)
                rp = w[p, :].copy()
                rq = w[q, :].copy()
                new_p = c * rp + (s * phase) * rq
                new_q = (-s * pc) * rp + c * rq
                w[p, :] = new_p
                w[q, :] = new_q
                w[:, p] = np.conj(new_p)
                w[:, q] = np.conj(new_q)
                w[p, q] = 0.0
                w[q, p] = 0.0
                w[p, p] = alpha + t * ab
                w[q, q] = gamma - t * ab
                if vt is not None:
                    vp = vt[p, :].copy()
                    vq = vt[q, :].copy()
                    vt[p, :] = c * vp + (s * pc) * vq
                    vt[q, :] = (-s * phase) * vp + c * vq
    off = _offdiag_norm(w)
    if off <= stop:
        return MAX_SWEEPS
    raise ConvergenceError(
        f"Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal {off:.3e}, target {stop:.3e})",
        estimates=[(float(x), off) for x in np.sort(np.diag(w).real)],
    )


def _canonical_order(values: np.ndarray, vectors: np.ndarray | None):
    """Sort eigenvalues ascending; fix each vector's phase so its first
    largest-magnitude component is real nonnegative; break exact eigenvalue
    ties by that component's index."""
    if vectors is None:
        return np.sort(values), None
    anchors = np.empty(len(values), dtype=np.int64)
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        j = int(np.argmax(np.abs(col)))
        anchors[k] = j
        mag = abs(col[j])
        if mag > 0:
            vectors[:, k] = col * (np.conj(col[j]) / mag)
    order = np.lexsort((anchors, values))
    return values[order], vectors[:, order]


def eigh(a, want_vectors: bool = True) -> Spectrum:
    """Full spectrum of a Hermitian matrix via cyclic Jacobi rotations."""
    a = as_square(a)
    n = a.shape[0]
    norm = frobenius(a)
    if frobenius(a - a.conj().T) > HERMITICITY_RTOL * max(norm, 1.0):
        raise ContractError(
            f"input is not Hermitian to {HERMITICITY_RTOL} relative tolerance"
        )
    herm = 0.5 * (a + a.conj().T)
    if np.count_nonzero(herm.imag) == 0:
        w = np.ascontiguousarray(herm.real)
    else:
        w = herm.copy()
    vt = None
    if want_vectors:
        vt = np.eye(n, dtype=w.dtype)
    _jacobi_sweeps(w, vt, stop=JACOBI_RTOL * max(norm, 1e-300))
    values = np.diag(w).real.copy()
    v = None if vt is None else vt.T.copy()
    values, v = _canonical_order(values, v)
    if v is not None:
        v = np.ascontiguousarray(v.astype(np.complex128))
    return Spectrum(eigenvalues=values, dimension=n, eigenvectors=v)


def spectrum_multiset_equal(s1: Spectrum, s2: Spectrum, tol: float = DEFAULT_TOL) -> bool:
    """True iff both spectra have the same dimension and their sorted
    eigenvalue sequences agree pairwise within ``tol``."""
    if s1.dimension != s2.dimension or len(s1.eigenvalues) != len(s2.eigenvalues):
        return False
    return bool(np.max(np.abs(np.sort(s1.eigenvalues) - np.sort(s2.eigenvalues)), initial=0.0) <= tol)
