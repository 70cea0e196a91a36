"""Shared builders for the test suite."""

import numpy as np

from osserman.clifford import CliffordSystem, curvature_from_clifford, generate_hurwitz_family
from osserman.curvature import CurvatureTensor, combine, direct_sum, sphere_tensor


def make_system(n, lambda0, mu) -> CliffordSystem:
    """Clifford system with generated Hurwitz family and given eigenvalues."""
    mu = np.asarray(mu, dtype=float)
    family = generate_hurwitz_family(n, mu.size)
    stack = np.stack(family) if family else np.zeros((0, n, n))
    return CliffordSystem(n, lambda0, mu, stack)


def make_tensor(n, lambda0, mu) -> CurvatureTensor:
    return curvature_from_clifford(make_system(n, lambda0, mu))


def block_tensor() -> CurvatureTensor:
    """Non-Osserman control: spheres of curvature 1 and 2 on R^3 + R^3."""
    one = sphere_tensor(3)
    two = combine(2.0, sphere_tensor(3), 0.0, sphere_tensor(3))
    return direct_sum(one, two)


def unit(rng, n) -> np.ndarray:
    x = rng.standard_normal(n)
    return x / np.linalg.norm(x)


def nullspace(a, tol=1e-10) -> np.ndarray:
    """Orthonormal basis of the kernel of a (columns)."""
    a = np.asarray(a, dtype=float)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.count_nonzero(s > tol * (s[0] if s.size else 1.0)))
    return vt[rank:].T
