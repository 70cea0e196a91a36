"""Sampling-based Osserman verification, duality checks, and classification.

A tensor is reported Osserman when the sorted Jacobi spectrum on the
orthogonal complement of X agrees across many random unit vectors X.  This
is numerical evidence, not a proof: the sample budget and tolerance are part
of the report.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .clifford import radon_number
from .curvature import CurvatureTensor, jacobi, validate_tensor
from .errors import InvalidTensor
from .linalg import (
    CLUSTER_REL_TOL,
    SpectrumProfile,
    cluster_spectrum,
    orthonormal_complement,
    sample_unit_vector,
)


class Classification(enum.Enum):
    """Outcome of the two-point-homogeneity lookup for a pair (n, nu)."""

    TWO_POINT_HOMOGENEOUS = "TwoPointHomogeneous"
    UNDETERMINED = "Undetermined"


def classify(n: int, nu: int) -> Classification:
    """Two-point homogeneity lookup by dimension and Clifford rank.

    Returns TWO_POINT_HOMOGENEOUS when n is not 2, 4, 8 or 16, when n = 8
    with nu < 3, or when n = 16 with nu != 8; UNDETERMINED otherwise.
    Pure table lookup, no geometry is performed.
    """
    if not 0 <= nu <= max(n - 1, 0):
        raise ValueError(f"nu = {nu} out of range for n = {n}")
    if n not in (2, 4, 8, 16):
        return Classification.TWO_POINT_HOMOGENEOUS
    if n == 8 and nu < 3:
        return Classification.TWO_POINT_HOMOGENEOUS
    if n == 16 and nu != 8:
        return Classification.TWO_POINT_HOMOGENEOUS
    return Classification.UNDETERMINED


@dataclass(frozen=True)
class OssermanReport:
    """Result of the spectrum-constancy check plus derived hypothesis flags."""

    is_osserman: bool
    profile: SpectrumProfile
    max_deviation: float
    samples_used: int
    m0: int
    nu: int
    prop1_hypotheses: tuple[bool, bool]
    radon_bound_ok: bool
    prop2_class: Classification


def _restricted_spectrum(r: CurvatureTensor, x: np.ndarray) -> np.ndarray:
    a = jacobi(r, x).entries
    p = orthonormal_complement(x)
    return np.linalg.eigvalsh(p.T @ a @ p)


def osserman_check(
    r: CurvatureTensor,
    samples: int = 200,
    rel_tol: float = CLUSTER_REL_TOL,
    seed: int = 0,
) -> OssermanReport:
    """Sample the Jacobi spectrum over random unit vectors and compare.

    Draws `samples` seeded uniform unit vectors, computes the sorted
    restricted spectrum at each, and reports the worst pairwise discrepancy
    of matching order statistics.  The tensor passes when that deviation is
    below rel_tol times the spectral scale.  The reported profile clusters
    the mean sorted spectrum.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples to compare spectra")
    sym = validate_tensor(r)
    if not sym.passed:
        raise InvalidTensor(
            f"tensor fails symmetry validation (max residual {sym.max_residual:.3e})"
        )
    n = r.n
    rng = np.random.default_rng(seed)
    spectra = np.empty((samples, n - 1))
    for s in range(samples):
        spectra[s] = _restricted_spectrum(r, sample_unit_vector(rng, n))
    # sorted rows: worst pairwise deviation is the largest per-coordinate range
    max_deviation = float(np.max(spectra.max(axis=0) - spectra.min(axis=0)))
    scale = float(np.max(np.abs(spectra))) if spectra.size else 0.0
    is_osserman = max_deviation <= rel_tol * max(1.0, scale)
    profile = cluster_spectrum(np.mean(spectra, axis=0), rel_tol)
    m0 = profile.max_multiplicity
    nu = n - 1 - m0
    hypotheses = (n >= 3 * nu, n > (nu + 1) ** 2 / 4.0)
    return OssermanReport(
        is_osserman=is_osserman,
        profile=profile,
        max_deviation=max_deviation,
        samples_used=samples,
        m0=m0,
        nu=nu,
        prop1_hypotheses=hypotheses,
        radon_bound_ok=nu <= radon_number(n) - 1,
        prop2_class=classify(n, nu),
    )


@dataclass(frozen=True)
class DualityViolation:
    """One sampled pair breaking the eigenvector duality beyond tolerance."""

    kind: str  # "eigenvector" or "kernel"
    sample: int
    eigenvalue: float
    residual: float


@dataclass(frozen=True)
class DualityReport:
    max_residual: float
    pairs_checked: int
    kernel_pairs_checked: int
    violations: tuple[DualityViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def duality_check(
    r: CurvatureTensor,
    samples: int = 200,
    tol: float = 1e-9,
    seed: int = 0,
) -> DualityReport:
    """Spot-check the eigenvector duality of an Osserman candidate.

    For each sampled unit X an eigenvector Y of R_X (orthonormal to X, with
    eigenvalue lam) is drawn and the residual |R_Y X - lam X| recorded.
    Whenever R_X has kernel directions inside the complement of X, the
    zero-eigenvalue variant is additionally exercised on a non-orthogonal,
    non-parallel combination Y = cos(psi) X + sin(psi) K, for which R_Y X
    must still vanish.  Violations are collected per pair, never raised.
    """
    n = r.n
    rng = np.random.default_rng(seed)
    max_residual = 0.0
    kernel_pairs = 0
    violations: list[DualityViolation] = []
    for idx in range(samples):
        x = sample_unit_vector(rng, n)
        p = orthonormal_complement(x)
        w, v = np.linalg.eigh(p.T @ jacobi(r, x).entries @ p)
        scale = max(1.0, float(np.max(np.abs(w))))
        j = int(rng.integers(n - 1))
        lam = float(w[j])
        y = p @ v[:, j]
        residual = float(np.linalg.norm(jacobi(r, y).entries @ x - lam * x))
        max_residual = max(max_residual, residual)
        if residual > tol * scale:
            violations.append(DualityViolation("eigenvector", idx, lam, residual))
        kernel_cols = np.nonzero(np.abs(w) <= 1e-9 * scale)[0]
        if kernel_cols.size:
            k = p @ v[:, kernel_cols[0]]
            psi = rng.uniform(0.15 * np.pi, 0.35 * np.pi)
            y2 = np.cos(psi) * x + np.sin(psi) * k
            residual2 = float(np.linalg.norm(jacobi(r, y2).entries @ x))
            kernel_pairs += 1
            max_residual = max(max_residual, residual2)
            if residual2 > tol * scale:
                violations.append(DualityViolation("kernel", idx, 0.0, residual2))
    return DualityReport(
        max_residual=max_residual,
        pairs_checked=samples,
        kernel_pairs_checked=kernel_pairs,
        violations=tuple(violations),
    )
