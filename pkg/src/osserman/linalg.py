"""Dense symmetric spectral kernel and tolerance-aware rank utilities.

Everything here is a pure function over small dense matrices (n up to ~64).
Eigendecompositions go through LAPACK's symmetric drivers, which are
deterministic for identical input bits, so downstream gauge choices and
reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousClustering,
    DimensionMismatch,
    NonFinite,
    NonSymmetric,
    ShapeMismatch,
)

#: absolute tolerance for accepting a matrix as symmetric
SYM_ABS_TOL = 1e-12
#: default relative tolerance for eigenvalue clustering
CLUSTER_REL_TOL = 1e-9
#: default relative tolerance for rank cutoffs
RANK_REL_TOL = 1e-8
#: clusters separated by less than this multiple of the clustering threshold
#: cannot be told apart reliably and raise AmbiguousClustering
AMBIGUITY_FACTOR = 10.0


def _as_matrix(a) -> np.ndarray:
    if isinstance(a, SymOperator):
        return a.entries
    return np.asarray(a, dtype=float)


@dataclass(frozen=True)
class SymOperator:
    """Real symmetric operator stored as a dense square matrix."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NonFinite("operator entries must be finite")
        if m.size:
            resid = float(np.max(np.abs(m - m.T)))
            if resid > SYM_ABS_TOL:
                raise NonSymmetric(
                    f"symmetry residual {resid:.3e} exceeds {SYM_ABS_TOL:.1e}"
                )
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SpectrumProfile:
    """Clustered eigenvalue/multiplicity multiset, ascending by eigenvalue.

    For a Jacobi operator restricted to the orthogonal complement of a unit
    vector the multiplicities sum to n - 1; that is the caller's contract,
    not enforced here.
    """

    pairs: tuple[tuple[float, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", tuple((float(v), int(m)) for v, m in self.pairs)
        )

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.pairs)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.pairs)

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    @property
    def max_multiplicity(self) -> int:
        return max(self.multiplicities) if self.pairs else 0

    def expanded(self) -> np.ndarray:
        """All eigenvalues with repetition, ascending."""
        return np.repeat(self.values, self.multiplicities)


def sym_eigen(a) -> SpectralDecomposition:
    """Full spectral decomposition of a symmetric operator.

    Raises NonSymmetric / NonFinite if the input fails the SymOperator
    entry requirements.
    """
    if not isinstance(a, SymOperator):
        a = SymOperator(_as_matrix(a))
    w, v = np.linalg.eigh(a.entries)
    return SpectralDecomposition(w, v)


def cluster_spectrum(eigenvalues, rel_tol: float = CLUSTER_REL_TOL) -> SpectrumProfile:
    """Group ascending eigenvalues into clusters separated by relative gaps.

    Cluster value is the mean of its members; multiplicities sum to the
    input length.  Raises AmbiguousClustering when two clusters sit closer
    than AMBIGUITY_FACTOR times the clustering threshold, since multiplicity
    profiles extracted from such spectra are not trustworthy.
    """
    w = np.asarray(eigenvalues, dtype=float).ravel()
    if w.size == 0:
        return SpectrumProfile(())
    if not np.all(np.isfinite(w)):
        raise NonFinite("eigenvalues must be finite")
    if np.any(np.diff(w) < 0):
        raise ValueError("eigenvalues must be sorted ascending")
    scale = float(np.max(np.abs(w)))
    if scale == 0.0:
        return SpectrumProfile(((0.0, int(w.size)),))
    thresh = rel_tol * scale
    cuts = np.nonzero(np.diff(w) > thresh)[0]
    bounds = [0, *(cuts + 1), w.size]
    pairs = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        pairs.append((float(np.mean(w[lo:hi])), hi - lo))
    for nxt in bounds[1:-1]:
        gap = w[nxt] - w[nxt - 1]
        if gap < AMBIGUITY_FACTOR * thresh:
            raise AmbiguousClustering(
                f"clusters separated by {gap:.3e} < "
                f"{AMBIGUITY_FACTOR * thresh:.3e}; spectrum too degenerate "
                f"for rel_tol={rel_tol:.1e}"
            )
    return SpectrumProfile(tuple(pairs))


def numeric_rank(a, tol: float = RANK_REL_TOL) -> int:
    """Count singular values above tol times the largest one."""
    m = _as_matrix(a)
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix entries must be finite")
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def image_basis(a, tol: float = RANK_REL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical image of a matrix."""
    m = _as_matrix(a)
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix entries must be finite")
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return u[:, :0]
    return u[:, s > tol * s[0]]


def image_sum_dim(ops, tol: float = RANK_REL_TOL) -> int:
    """Dimension of Im(op_1) + ... + Im(op_k)."""
    mats = [_as_matrix(op) for op in ops]
    if not mats:
        return 0
    n = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != n:
            raise DimensionMismatch("operators must share their dimension")
    stacked = np.hstack([image_basis(m, tol) for m in mats])
    if stacked.shape[1] == 0:
        return 0
    return numeric_rank(stacked, tol)


def sample_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform point on the unit sphere via normalized Gaussian coordinates."""
    while True:
        x = rng.standard_normal(n)
        nrm = np.linalg.norm(x)
        if nrm > 1e-8:
            return x / nrm


def orthonormal_complement(x) -> np.ndarray:
    """Columns form an orthonormal basis of the hyperplane orthogonal to x."""
    x = np.asarray(x, dtype=float)
    n = x.size
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ValueError("cannot complement the zero vector")
    q, _ = np.linalg.qr(np.column_stack([x / nrm, np.eye(n)]))
    return q[:, 1:n]


def subspace_gap(u: np.ndarray, v: np.ndarray) -> float:
    """Sine of the largest principal angle by which span(v) leaves span(u).

    Both arguments must have orthonormal columns.  Zero columns in v give 0.
    """
    if v.shape[1] == 0:
        return 0.0
    resid = v - u @ (u.T @ v)
    return float(np.linalg.norm(resid, 2))
