"""Algebraic curvature tensors: storage, symmetry validation, Jacobi operators.

A tensor lives in the standard orthonormal basis of R^n as the full n^4
component array comps[i, j, k, l] = <R(e_i, e_j) e_k, e_l>.  The sign
convention is fixed so that the unit-sphere tensor acts as
R(X, Y) Z = <X, Z> Y - <Y, Z> X and has Jacobi eigenvalue +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import DimensionMismatch, NonFinite, NotUnit, ShapeMismatch
from .linalg import (
    CLUSTER_REL_TOL,
    SpectrumProfile,
    SymOperator,
    cluster_spectrum,
    orthonormal_complement,
)

#: absolute tolerance on the four symmetry residuals
VALIDATION_ABS_TOL = 1e-10
#: unit vectors must have norm within this of 1
UNIT_ABS_TOL = 1e-12


@dataclass(frozen=True)
class CurvatureTensor:
    """Components of a (4,0) algebraic curvature tensor.

    Accepts either an (n, n, n, n) array or a flat length-n^4 array.
    Construction checks only shape and finiteness; the curvature symmetries
    are checked separately by :func:`validate_tensor` so that deliberately
    broken tensors can still be built and inspected.
    """

    comps: np.ndarray

    def __post_init__(self):
        c = np.array(self.comps, dtype=float)
        if c.ndim == 1:
            n = round(c.size ** 0.25)
            if n**4 != c.size:
                raise ShapeMismatch(
                    f"flat component array of length {c.size} is not a fourth power"
                )
            c = c.reshape(n, n, n, n)
        if c.ndim != 4 or len(set(c.shape)) != 1:
            raise ShapeMismatch(f"expected an (n,n,n,n) array, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NonFinite("tensor components must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "comps", c)

    @property
    def n(self) -> int:
        return self.comps.shape[0]


@dataclass(frozen=True)
class SymmetryReport:
    """Per-symmetry maximal residuals of a curvature tensor."""

    residuals: Mapping[str, float]
    tol: float
    passed: bool

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def validate_tensor(r: CurvatureTensor, tol: float = VALIDATION_ABS_TOL) -> SymmetryReport:
    """Check antisymmetries, pair exchange and the first Bianchi identity."""
    c = r.comps
    residuals = {
        "antisymmetry_ij": float(np.max(np.abs(c + np.einsum("jikl->ijkl", c)))),
        "antisymmetry_kl": float(np.max(np.abs(c + np.einsum("ijlk->ijkl", c)))),
        "pair_exchange": float(np.max(np.abs(c - np.einsum("klij->ijkl", c)))),
        "bianchi": float(
            np.max(
                np.abs(c + np.einsum("jkil->ijkl", c) + np.einsum("kijl->ijkl", c))
            )
        ),
    }
    return SymmetryReport(residuals, tol, all(v <= tol for v in residuals.values()))


def _check_vector(r: CurvatureTensor, x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if v.size != r.n:
        raise DimensionMismatch(f"{name} has dimension {v.size}, tensor has {r.n}")
    if not np.all(np.isfinite(v)):
        raise NonFinite(f"{name} must be finite")
    return v


def curvature_action(r: CurvatureTensor, x, y, z) -> np.ndarray:
    """The trilinear action R(X, Y)Z, component m = sum x_i y_j z_k comps[i,j,k,m]."""
    xv = _check_vector(r, x, "X")
    yv = _check_vector(r, y, "Y")
    zv = _check_vector(r, z, "Z")
    return np.einsum("i,j,k,ijkm->m", xv, yv, zv, r.comps, optimize=True)


def jacobi(r: CurvatureTensor, x) -> SymOperator:
    """Jacobi operator R_X Y = R(X, Y)X; quadratic in X, X need not be unit."""
    xv = _check_vector(r, x, "X")
    a = np.einsum("i,ijkm,k->mj", xv, r.comps, xv, optimize=True)
    return SymOperator(a)


def mixed_jacobi(r: CurvatureTensor, x, y) -> SymOperator:
    """Polarized Jacobi operator R_{XY} Z = (R(X, Z)Y + R(Y, Z)X) / 2."""
    xv = _check_vector(r, x, "X")
    yv = _check_vector(r, y, "Y")
    a = np.einsum("i,ijkm,k->mj", xv, r.comps, yv, optimize=True)
    b = np.einsum("i,ijkm,k->mj", yv, r.comps, xv, optimize=True)
    return SymOperator((a + b) / 2.0)


def sphere_tensor(n: int) -> CurvatureTensor:
    """Curvature tensor of the unit sphere: comps = d_ik d_jl - d_jk d_il."""
    if n < 2:
        raise ValueError("sphere tensor needs n >= 2")
    eye = np.eye(n)
    comps = np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("jk,il->ijkl", eye, eye)
    return CurvatureTensor(comps)


def combine(a: float, r1: CurvatureTensor, b: float, r2: CurvatureTensor) -> CurvatureTensor:
    """Componentwise a*R1 + b*R2."""
    if r1.n != r2.n:
        raise DimensionMismatch(f"cannot combine tensors on R^{r1.n} and R^{r2.n}")
    return CurvatureTensor(a * r1.comps + b * r2.comps)


def direct_sum(r1: CurvatureTensor, r2: CurvatureTensor) -> CurvatureTensor:
    """Block-diagonal curvature tensor on R^{n1+n2} with no mixed components."""
    n1, n2 = r1.n, r2.n
    comps = np.zeros((n1 + n2,) * 4)
    comps[:n1, :n1, :n1, :n1] = r1.comps
    comps[n1:, n1:, n1:, n1:] = r2.comps
    return CurvatureTensor(comps)


def jacobi_spectrum(
    r: CurvatureTensor, x, rel_tol: float = CLUSTER_REL_TOL
) -> SpectrumProfile:
    """Clustered spectrum of R_X restricted to the hyperplane orthogonal to X.

    X must be a unit vector; the trivial kernel direction along X is excluded
    by the restriction, leaving n - 1 eigenvalues counted with multiplicity.
    """
    xv = _check_vector(r, x, "X")
    if abs(np.linalg.norm(xv) - 1.0) > UNIT_ABS_TOL:
        raise NotUnit("jacobi_spectrum requires a unit vector")
    a = jacobi(r, xv).entries
    p = orthonormal_complement(xv)
    w = np.linalg.eigvalsh(p.T @ a @ p)
    return cluster_spectrum(w, rel_tol)


def tensor_from_jacobi(jac: Callable[[np.ndarray], np.ndarray], n: int) -> CurvatureTensor:
    """Rebuild a curvature tensor from its quadratic Jacobi family.

    `jac` must return the n x n Jacobi matrix of an algebraic curvature
    tensor for an arbitrary (not necessarily unit) vector.  Polarization
    recovers the mixed operators H(u,v) = R_{e_u e_v}, and the first Bianchi
    identity turns those into components via

        comps[i,j,k,l] = (4 H(i,k)[l,j] + 2 H(i,j)[l,k]) / 3.
    """
    eye = np.eye(n)
    diag = [np.asarray(jac(eye[u]), dtype=float) for u in range(n)]
    g = np.zeros((n, n, n, n))
    for u in range(n):
        g[u, u] = diag[u]
        for v in range(u + 1, n):
            mixed = (np.asarray(jac(eye[u] + eye[v]), float) - diag[u] - diag[v]) / 2.0
            g[u, v] = mixed
            g[v, u] = mixed
    # g[u, v, l, j] = <R_{e_u e_v} e_j, e_l>
    comps = (4.0 * np.einsum("iklj->ijkl", g) + 2.0 * np.einsum("ijlk->ijkl", g)) / 3.0
    return CurvatureTensor(comps)
