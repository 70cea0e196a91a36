"""Clifford/Hurwitz systems: Radon numbers, generator families, tensor builders.

A Cliff(nu) system packages nu skew-symmetric orthogonal operators J_s that
pairwise anticommute (J_s J_q + J_q J_s = -2 d_qs I) together with constants
lambda0 and mu_1..mu_nu.  Such a system determines an algebraic curvature
tensor whose Jacobi spectrum at any unit vector is {lambda0 with multiplicity
n - 1 - nu} plus the mu_s.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .cayley import left_mult_matrix, quat_mul
from .curvature import CurvatureTensor
from .errors import (
    ExceedsRadonBound,
    InvalidSystem,
    NonFinite,
    ShapeMismatch,
)
from .linalg import SymOperator, sample_unit_vector

#: residual thresholds used by validate_clifford
SKEW_TOL = 1e-12
ORTHO_TOL = 1e-10
HURWITZ_TOL = 1e-10
BILINEAR_TOL = 1e-10


def radon_number(n: int) -> int:
    """Radon-Hurwitz number: for n = 2^(4a+b) c with c odd, rho(n) = 2^b + 8a."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    a, b = divmod(e, 4)
    return 2**b + 8 * a


@dataclass(frozen=True)
class CliffordSystem:
    """A Cliff(nu) structure: dimension, constants and generator stack.

    Construction enforces shapes, finiteness, mu_s != lambda0 and the Radon
    bound nu <= rho(n) - 1.  The analytic generator properties (skewness,
    orthogonality, anticommutation) are checked by :func:`validate_clifford`
    so that defective systems can be built and diagnosed.
    """

    n: int
    lambda0: float
    mu: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).ravel()
        j = np.array(self.j, dtype=float)
        if j.size == 0:
            j = j.reshape(0, self.n, self.n)
        if j.ndim != 3 or j.shape[1:] != (self.n, self.n):
            raise ShapeMismatch(
                f"generators must form a (nu, {self.n}, {self.n}) stack, got {j.shape}"
            )
        if mu.size != j.shape[0]:
            raise ShapeMismatch(
                f"{mu.size} eigenvalues for {j.shape[0]} generators"
            )
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(j))):
            raise NonFinite("system data must be finite")
        if np.any(mu == self.lambda0):
            raise InvalidSystem("every mu_s must differ from lambda0")
        if mu.size > radon_number(self.n) - 1:
            raise ExceedsRadonBound(
                f"nu = {mu.size} exceeds rho({self.n}) - 1 = {radon_number(self.n) - 1}"
            )
        mu.setflags(write=False)
        j.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "lambda0", float(self.lambda0))

    @property
    def nu(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class CliffordReport:
    """Residuals of the generator identities, with pass/fail flags."""

    residuals: Mapping[str, float]
    passed: bool


def validate_clifford(c: CliffordSystem, samples: int = 16, seed: int = 0) -> CliffordReport:
    """Check skewness, orthogonality, anticommutation and the bilinear form.

    The bilinear identity <J_s X, J_q X> = d_sq |X|^2 is sampled over random
    vectors; for skew-symmetric generators it is equivalent to the Hurwitz
    relations, so the two residuals cross-check one another.
    """
    nu, n = c.nu, c.n
    skew = 0.0
    ortho = 0.0
    hurwitz = 0.0
    eye = np.eye(n)
    for s in range(nu):
        js = c.j[s]
        skew = max(skew, float(np.max(np.abs(js + js.T))))
        ortho = max(ortho, float(np.max(np.abs(js.T @ js - eye))))
        for q in range(s, nu):
            anti = js @ c.j[q] + c.j[q] @ js + 2.0 * (s == q) * eye
            hurwitz = max(hurwitz, float(np.max(np.abs(anti))))
    bilinear = 0.0
    rng = np.random.default_rng(seed)
    if nu:
        for _ in range(samples):
            x = rng.standard_normal(n)
            nx2 = float(np.dot(x, x))
            imgs = np.column_stack([c.j[s] @ x for s in range(nu)])
            gram = imgs.T @ imgs - nx2 * np.eye(nu)
            bilinear = max(bilinear, float(np.max(np.abs(gram))) / max(nx2, 1.0))
    residuals = {
        "skew_symmetry": skew,
        "orthogonality": ortho,
        "hurwitz": hurwitz,
        "bilinear_form": bilinear,
    }
    passed = (
        skew <= SKEW_TOL
        and ortho <= ORTHO_TOL
        and hurwitz <= HURWITZ_TOL
        and bilinear <= BILINEAR_TOL
    )
    return CliffordReport(residuals, passed)


def _mult_matrix(unit_index: int, dim: int) -> np.ndarray:
    """Matrix of left multiplication by a basis unit on R^4 or R^8."""
    eye = np.eye(dim)
    if dim == 4:
        cols = [quat_mul(eye[unit_index], eye[m]) for m in range(4)]
        return np.column_stack(cols)
    return left_mult_matrix(eye[unit_index])


def _base_family(b: int) -> tuple[int, list[np.ndarray]]:
    """Maximal anticommuting family on R^(2^b) for 0 <= b <= 3."""
    if b == 0:
        return 1, []
    if b == 1:
        return 2, [np.array([[0.0, -1.0], [1.0, 0.0]])]
    if b == 2:
        return 4, [_mult_matrix(s, 4) for s in (1, 2, 3)]
    return 8, [_mult_matrix(s, 8) for s in range(1, 8)]


def _double(dim: int, family: list[np.ndarray]) -> tuple[int, list[np.ndarray]]:
    """From k structures on R^dim build k+1 on R^(2 dim)."""
    zero = np.zeros((dim, dim))
    eye = np.eye(dim)
    out = [np.block([[zero, a], [a, zero]]) for a in family]
    out.append(np.block([[zero, -eye], [eye, zero]]))
    return 2 * dim, out


def _sixteen_family() -> list[np.ndarray]:
    """The 8 anticommuting structures on R^16 obtained by doubling octonions."""
    _, oct_family = _base_family(3)
    _, family = _double(8, oct_family)
    return family


def _tensor16(dim: int, family: list[np.ndarray]) -> tuple[int, list[np.ndarray]]:
    """From k structures on R^dim build k+8 on R^(16 dim).

    Tensors the identity with the 16-dimensional family B_1..B_8 and the old
    generators with the volume element B_1 B_2 ... B_8, which is symmetric,
    squares to the identity and anticommutes with every B_j.
    """
    b16 = _sixteen_family()
    omega = b16[0]
    for bj in b16[1:]:
        omega = omega @ bj
    eye = np.eye(dim)
    out = [np.kron(eye, bj) for bj in b16]
    out.extend(np.kron(a, omega) for a in family)
    return 16 * dim, out


def generate_hurwitz_family(n: int, nu: int) -> list[np.ndarray]:
    """Skew-symmetric orthogonal anticommuting n x n matrices J_1..J_nu.

    Works for every nu up to rho(n) - 1: base families for the complex,
    quaternion and octonion dimensions, an 8-generator jump for each factor
    of 16, and block replication over the odd part of n.
    """
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    bound = radon_number(n) - 1
    if nu > bound:
        raise ExceedsRadonBound(f"nu = {nu} exceeds rho({n}) - 1 = {bound}")
    if nu == 0:
        return []
    e = 0
    c = n
    while c % 2 == 0:
        c //= 2
        e += 1
    a, b = divmod(e, 4)
    dim, family = _base_family(b)
    for _ in range(a):
        dim, family = _tensor16(dim, family)
    if c > 1:
        eye = np.eye(c)
        family = [np.kron(eye, j) for j in family]
    return [j.copy() for j in family[:nu]]


def curvature_from_clifford(c: CliffordSystem) -> CurvatureTensor:
    """Curvature tensor determined by a Clifford system.

    comps[i,j,k,l] = lambda0 (d_ik d_jl - d_jk d_il)
      + sum_s (mu_s - lambda0)/3 * (2 A[j,i] A[l,k] + A[j,k] A[l,i]
                                    - A[i,k] A[l,j]),   A = J_s.
    """
    n = c.n
    eye = np.eye(n)
    comps = c.lambda0 * (
        np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("jk,il->ijkl", eye, eye)
    )
    for s in range(c.nu):
        a = c.j[s]
        term = (
            2.0 * np.einsum("ji,lk->ijkl", a, a)
            + np.einsum("jk,li->ijkl", a, a)
            - np.einsum("ik,lj->ijkl", a, a)
        )
        comps = comps + ((c.mu[s] - c.lambda0) / 3.0) * term
    return CurvatureTensor(comps)


def clifford_jacobi(c: CliffordSystem, x) -> SymOperator:
    """Jacobi operator of the system's tensor, evaluated directly:

    R_X Y = lambda0 (|X|^2 Y - <Y, X> X) + sum_s (mu_s - lambda0) <J_s X, Y> J_s X.
    """
    xv = np.asarray(x, dtype=float).ravel()
    if xv.size != c.n:
        raise ShapeMismatch(f"vector has dimension {xv.size}, system has {c.n}")
    nx2 = float(np.dot(xv, xv))
    op = c.lambda0 * (nx2 * np.eye(c.n) - np.outer(xv, xv))
    for s in range(c.nu):
        jx = c.j[s] @ xv
        op = op + (c.mu[s] - c.lambda0) * np.outer(jx, jx)
    return SymOperator(op)


def system_profile(c: CliffordSystem) -> list[tuple[float, int]]:
    """Nominal Jacobi spectrum on the complement of a unit vector.

    {lambda0: n - 1 - nu} together with the mu_s grouped by value, ascending.
    """
    counts: dict[float, int] = {}
    m0 = c.n - 1 - c.nu
    if m0 > 0:
        counts[c.lambda0] = m0
    for m in c.mu:
        counts[float(m)] = counts.get(float(m), 0) + 1
    return sorted(counts.items())


def random_unit_vectors(n: int, samples: int, seed: int = 0) -> np.ndarray:
    """Reproducible batch of uniform unit vectors, one per row."""
    rng = np.random.default_rng(seed)
    return np.vstack([sample_unit_vector(rng, n) for _ in range(samples)])
