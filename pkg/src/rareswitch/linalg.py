"""Dense symmetric-matrix kernels backing the switching rules.

All matrices here are small and dense, so every routine uses one direct
factorization instead of anything iterative.  Positive definiteness is
certified by Cholesky alone: if the factorization succeeds the matrix is
accepted, otherwise :class:`FactorizationError` is raised.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "FactorizationError",
    "SymMatrix",
    "SpdMatrix",
    "rank_one_update",
    "spectral_norm",
    "gen_rayleigh_max",
    "log_det",
    "loewner_dominates",
    "default_loewner_tol",
    "mahalanobis_inv_norm",
    "mahalanobis_inv_norms",
    "as_vector",
]


class FactorizationError(ValueError):
    """A matrix that was expected to be positive definite is not."""


def _square_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    return arr


def as_vector(x, dim: int) -> np.ndarray:
    """Validate ``x`` as a 1-d float vector of length ``dim`` and return it."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (dim,):
        raise ValueError(f"expected a vector of length {dim}, got shape {arr.shape}")
    return arr


class SymMatrix:
    """Real symmetric matrix with bitwise-exact symmetry.

    The constructor rejects inputs that are only approximately symmetric;
    use :meth:`symmetrized` to fold numerical dust first.  The stored array
    is read-only, so instances are safe to share across threads.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        if isinstance(values, SymMatrix):
            self.values = values.values
            return
        arr = _square_array(values)
        if not np.array_equal(arr, arr.T):
            raise ValueError("matrix is not exactly symmetric (see SymMatrix.symmetrized)")
        arr.setflags(write=False)
        self.values = arr

    @classmethod
    def symmetrized(cls, values) -> "SymMatrix":
        """Build from a nearly-symmetric array by averaging with its transpose."""
        arr = _square_array(values)
        return cls(0.5 * (arr + arr.T))

    @classmethod
    def zeros(cls, dim: int) -> "SymMatrix":
        return cls(np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"SymMatrix({self.values!r})"


class SpdMatrix:
    """Symmetric positive-definite matrix with a cached lower Cholesky factor.

    Accepts a :class:`SymMatrix` or anything convertible to one.  The factor
    satisfies ``L @ L.T == values`` up to a relative spectral error of about
    1e-12, which downstream solves rely on.
    """

    __slots__ = ("values", "chol_lower")

    def __init__(self, values):
        sym = values if isinstance(values, SymMatrix) else SymMatrix(values)
        try:
            factor = np.linalg.cholesky(sym.values)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError("matrix is not positive definite") from exc
        factor.setflags(write=False)
        self.values = sym.values
        self.chol_lower = factor

    @classmethod
    def identity(cls, dim: int, scale: float = 1.0) -> "SpdMatrix":
        if scale <= 0:
            raise ValueError("identity scale must be positive")
        return cls(scale * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def as_sym(self) -> SymMatrix:
        return SymMatrix(self.values)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``values @ y = rhs`` through the cached factor."""
        z = solve_triangular(self.chol_lower, rhs, lower=True)
        return solve_triangular(self.chol_lower.T, z, lower=False)

    def __repr__(self) -> str:
        return f"SpdMatrix({self.values!r})"


def _check_same_dim(a, b) -> None:
    if a.values.shape != b.values.shape:
        raise ValueError(
            f"dimension mismatch: {a.values.shape[0]} vs {b.values.shape[0]}"
        )


def rank_one_update(V: SpdMatrix, x: np.ndarray) -> SpdMatrix:
    """Return ``V + x x^T`` as a freshly factored SPD matrix."""
    vec = as_vector(x, V.dim)
    return SpdMatrix(V.values + np.outer(vec, vec))


def spectral_norm(M: SymMatrix | SpdMatrix) -> float:
    """Largest absolute eigenvalue (the operator 2-norm for symmetric input)."""
    eigs = np.linalg.eigvalsh(M.values)
    return float(max(eigs[-1], -eigs[0], 0.0))


def log_det(M: SpdMatrix) -> float:
    """log det via the Cholesky diagonal; all determinant comparisons stay in
    log space to avoid overflow on long streams."""
    return float(2.0 * np.sum(np.log(np.diag(M.chol_lower))))


def gen_rayleigh_max(A: SpdMatrix, B: SpdMatrix) -> float:
    """Largest generalized eigenvalue of the pencil ``(A, B)``.

    Equals ``sup_{x != 0} (x^T A x) / (x^T B x)``.  Computed by reducing with
    the Cholesky factor of ``B`` (two triangular solves) followed by a full
    symmetric eigendecomposition of the reduced d-by-d matrix; for the small
    dimensions used here the direct solve is more robust than any iterative
    scheme.
    """
    _check_same_dim(A, B)
    L = B.chol_lower
    half = solve_triangular(L, A.values, lower=True)
    reduced = solve_triangular(L, half.T, lower=True)
    reduced = 0.5 * (reduced + reduced.T)
    return float(np.linalg.eigvalsh(reduced)[-1])


def default_loewner_tol(A: SymMatrix | SpdMatrix, B: SymMatrix | SpdMatrix) -> float:
    """Scale-relative slack for semidefinite-order tests."""
    return 1e-10 * (1.0 + spectral_norm(A) + spectral_norm(B))


def loewner_dominates(
    A: SymMatrix | SpdMatrix,
    B: SymMatrix | SpdMatrix,
    tol: float | None = None,
) -> bool:
    """True iff ``A - B`` is positive semidefinite up to ``tol``.

    ``tol=None`` selects :func:`default_loewner_tol`, which avoids false
    negatives on well-conditioned inputs without hiding genuine order
    violations.
    """
    _check_same_dim(A, B)
    if tol is None:
        tol = default_loewner_tol(A, B)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    smallest = float(np.linalg.eigvalsh(A.values - B.values)[0])
    return smallest >= -tol


def mahalanobis_inv_norm(x: np.ndarray, M: SpdMatrix) -> float:
    """``sqrt(x^T M^{-1} x)`` via one triangular solve; never forms the inverse."""
    vec = as_vector(x, M.dim)
    z = solve_triangular(M.chol_lower, vec, lower=True)
    return float(np.linalg.norm(z))


def mahalanobis_inv_norms(xs: np.ndarray, M: SpdMatrix) -> np.ndarray:
    """Row-wise version of :func:`mahalanobis_inv_norm` for an (n, d) batch."""
    arr = np.asarray(xs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != M.dim:
        raise ValueError(f"expected an (n, {M.dim}) batch, got shape {arr.shape}")
    Z = solve_triangular(M.chol_lower, arr.T, lower=True)
    return np.sqrt(np.sum(Z * Z, axis=0))
