"""Octonion arithmetic and the Cayley projective plane Jacobi operator.

Octonions are built from quaternions by Cayley-Dickson doubling with the
convention (a, b)(c, d) = (ac - d*b, da + bc*); coefficients are ordered
(1, e1, ..., e7) with e1, e2, e3 the quaternion units and e4 = (0, 1).

The module also provides the numerical certificate that the eigenspace
families of the Cayley-plane Jacobi operator cannot be swept out by linear
operators, which is what rules out a Clifford presentation of that tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import CurvatureTensor, tensor_from_jacobi
from .errors import NotUnit, ShapeMismatch
from .linalg import SymOperator, numeric_rank, sample_unit_vector

UNIT_ABS_TOL = 1e-12


def quat_mul(a, b) -> np.ndarray:
    """Hamilton product of quaternions given as length-4 coefficient arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def quat_conj(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.array([a[0], -a[1], -a[2], -a[3]])


def oct_mul_arr(x, y) -> np.ndarray:
    """Octonion product on length-8 coefficient arrays (Cayley-Dickson)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = x[:4], x[4:]
    c, d = y[:4], y[4:]
    top = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    bot = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([top, bot])


def oct_conj_arr(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = -x.copy()
    out[0] = x[0]
    return out


@dataclass(frozen=True)
class Octonion:
    """An octonion as 8 real coefficients over the basis (1, e1, ..., e7)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size != 8:
            raise ShapeMismatch(f"octonion needs 8 coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def unit(cls, s: int) -> "Octonion":
        """Basis element: unit(0) = 1, unit(s) = e_s for 1 <= s <= 7."""
        c = np.zeros(8)
        c[s] = 1.0
        return cls(c)

    def conj(self) -> "Octonion":
        return Octonion(oct_conj_arr(self.coeffs))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "Octonion") -> float:
        """<a, b> = (a b* + b a*) / 2, a real number."""
        return float(np.dot(self.coeffs, other.coeffs))

    def __mul__(self, other: "Octonion") -> "Octonion":
        return Octonion(oct_mul_arr(self.coeffs, other.coeffs))

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coeffs + other.coeffs)

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coeffs - other.coeffs)

    def __neg__(self) -> "Octonion":
        return Octonion(-self.coeffs)


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    return a * b


def oct_conj(a: Octonion) -> Octonion:
    return a.conj()


def left_mult_matrix(a) -> np.ndarray:
    """Matrix of x -> a x on R^8."""
    a = np.asarray(a, dtype=float)
    eye = np.eye(8)
    return np.column_stack([oct_mul_arr(a, eye[m]) for m in range(8)])


def right_mult_matrix(b) -> np.ndarray:
    """Matrix of x -> x b on R^8."""
    b = np.asarray(b, dtype=float)
    eye = np.eye(8)
    return np.column_stack([oct_mul_arr(eye[m], b) for m in range(8)])


@dataclass(frozen=True)
class CayleyPoint:
    """Tangent vector X = (a, b) in the octonion double plane, i.e. R^16."""

    a: Octonion
    b: Octonion

    @classmethod
    def from_vector(cls, v) -> "CayleyPoint":
        v = np.asarray(v, dtype=float).ravel()
        if v.size != 16:
            raise ShapeMismatch(f"expected 16 components, got {v.size}")
        return cls(Octonion(v[:8]), Octonion(v[8:]))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.a.coeffs, self.b.coeffs])

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def _as_point_vector(x) -> np.ndarray:
    if isinstance(x, CayleyPoint):
        return x.vector
    v = np.asarray(x, dtype=float).ravel()
    if v.size != 16:
        raise ShapeMismatch(f"expected 16 components, got {v.size}")
    return v


#: conjugation on coefficient arrays as a matrix
_CONJ = np.diag([1.0, -1, -1, -1, -1, -1, -1, -1])


def _jacobi_blocks(v: np.ndarray, alpha: float):
    a, b = v[:8], v[8:]
    p = oct_mul_arr(a, b)
    na2 = float(np.dot(a, a))
    nb2 = float(np.dot(b, b))
    top_left = (alpha / 4.0) * (4.0 * na2 + nb2) * np.eye(8)
    bot_right = (alpha / 4.0) * (4.0 * nb2 + na2) * np.eye(8)
    # columns (c, 0): bottom = 3 c*(ab); columns (0, d): top = 3 (ab)d*
    top_right = 0.75 * alpha * left_mult_matrix(p) @ _CONJ
    bot_left = 0.75 * alpha * right_mult_matrix(p) @ _CONJ
    return np.block([[top_left, top_right], [bot_left, bot_right]])


def cayley_jacobi(x, alpha: float = 1.0) -> SymOperator:
    """Jacobi operator of the Cayley-plane curvature tensor at a unit vector.

    For X = (a, b) and Y = (c, d) orthogonal to X the operator acts as

        R_X Y = (alpha/4) * ((4|a|^2 + |b|^2) c + 3 (ab) d*,
                             (4|b|^2 + |a|^2) d + 3 c* (ab));

    general Y is first projected onto the orthogonal complement of X, which
    keeps the operator symmetric and enforces R_X X = 0.
    """
    v = _as_point_vector(x)
    if abs(np.linalg.norm(v) - 1.0) > UNIT_ABS_TOL:
        raise NotUnit("cayley_jacobi requires a unit tangent vector")
    f = _jacobi_blocks(v, alpha)
    proj = np.eye(16) - np.outer(v, v)
    return SymOperator(proj @ f @ proj)


def cayley_tensor(alpha: float = 1.0) -> CurvatureTensor:
    """Full 16-dimensional curvature tensor rebuilt from the Jacobi family."""

    def jac(x: np.ndarray) -> np.ndarray:
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            return np.zeros((16, 16))
        return nrm**2 * cayley_jacobi(x / nrm, alpha).entries

    return tensor_from_jacobi(jac, 16)


def e_alpha_membership(x, y, tol: float = 1e-10) -> bool:
    """Whether Y = (c, d) belongs to the 7-dimensional eigenspace at unit X.

    Membership means (ab)d* = |b|^2 c, c*(ab) = |a|^2 d and
    <a, c> = <b, d> = 0; these are the conditions the Jacobi formula itself
    imposes on its large-eigenvalue eigenvectors.  At X = (1, 0) they
    collapse to d = 0 and Re(c) = 0.
    """
    xv = _as_point_vector(x)
    if abs(np.linalg.norm(xv) - 1.0) > UNIT_ABS_TOL:
        raise NotUnit("membership is defined against a unit vector")
    yv = _as_point_vector(y)
    a, b = xv[:8], xv[8:]
    c, d = yv[:8], yv[8:]
    p = oct_mul_arr(a, b)
    na2 = float(np.dot(a, a))
    nb2 = float(np.dot(b, b))
    if np.linalg.norm(oct_mul_arr(p, oct_conj_arr(d)) - nb2 * c) > tol:
        return False
    if np.linalg.norm(oct_mul_arr(oct_conj_arr(c), p) - na2 * d) > tol:
        return False
    return abs(np.dot(a, c)) <= tol and abs(np.dot(b, d)) <= tol


def alpha_constraint_rows(x) -> np.ndarray:
    """Linear conditions on (c, d) cutting out the 7-dimensional eigenspace.

    18 rows: the 8 components of (ab)d* - |b|^2 c, the 8 components of
    c*(ab) - |a|^2 d, and the two inner products <a, c>, <b, d>.  The rank
    is 9 for every nonzero X, including the degenerate points a = 0 or
    b = 0 where one of the product identities goes vacuous.
    """
    v = _as_point_vector(x)
    a, b = v[:8], v[8:]
    p = oct_mul_arr(a, b)
    na2 = float(np.dot(a, a))
    nb2 = float(np.dot(b, b))
    rows = np.zeros((18, 16))
    rows[:8, :8] = -nb2 * np.eye(8)
    rows[:8, 8:] = left_mult_matrix(p) @ _CONJ
    rows[8:16, :8] = right_mult_matrix(p) @ _CONJ
    rows[8:16, 8:] = -na2 * np.eye(8)
    rows[16, :8] = a
    rows[17, 8:] = b
    return rows


def alpha_quarter_constraint_rows(x, degenerate_tol: float = 1e-8) -> np.ndarray:
    """Linear conditions cutting out the 8-dimensional eigenspace.

    Implements a(|b|^2 d - <b,d> b) = (|a|^2 c - <a,c> a) b together with
    <Y, X> = 0.  The algebraic identity alone is also solved by Y = X, so the
    orthogonality row is what pins the eigenspace itself.  The identity
    degenerates when a or b vanishes, in which case the rows are taken from
    the numerically computed eigenprojector instead.
    """
    v = _as_point_vector(x)
    a, b = v[:8], v[8:]
    na2 = float(np.dot(a, a))
    nb2 = float(np.dot(b, b))
    if min(na2, nb2) < degenerate_tol**2:
        nrm = np.linalg.norm(v)
        op = cayley_jacobi(v / nrm, 1.0).entries
        w, vecs = np.linalg.eigh(op)
        basis = vecs[:, np.abs(w - 0.25) < 1e-6]
        return np.eye(16) - basis @ basis.T
    p = oct_mul_arr(a, b)
    rows = np.zeros((9, 16))
    rows[:8, :8] = -na2 * right_mult_matrix(b) + np.outer(p, a)
    rows[:8, 8:] = nb2 * left_mult_matrix(a) - np.outer(p, b)
    rows[8] = v
    return rows


def obstruction_nullspace(
    which: str = "alpha", samples: int = 64, tol: float = 1e-8, seed: int = 0
) -> int:
    """Dimension of the space of linear operators J with JX in E_which(X).

    Assembles, over `samples` random unit vectors X, the linear constraints
    on the 16 x 16 matrix J expressing that JX satisfies the chosen
    eigenspace's defining conditions, and returns the numerical nullspace
    dimension of the stacked system.  Zero for both eigenspace families of
    the Cayley plane.
    """
    if which not in ("alpha", "alpha4"):
        raise ValueError(f"which must be 'alpha' or 'alpha4', got {which!r}")
    if samples < 32:
        raise ValueError("need at least 32 samples to overdetermine the system")
    row_fn = alpha_constraint_rows if which == "alpha" else alpha_quarter_constraint_rows
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(samples):
        xv = sample_unit_vector(rng, 16)
        blocks.append(np.kron(row_fn(xv), xv))
    stacked = np.vstack(blocks)
    return 16 * 16 - numeric_rank(stacked, tol)


def span_constraint_nullspace(
    j_family, samples: int = 64, tol: float = 1e-8, seed: int = 0
) -> int:
    """Nullspace dimension for the condition JX in span(J_1 X, ..., J_k X).

    Positive control for :func:`obstruction_nullspace`: run against a genuine
    anticommuting family, each member of the family satisfies the constraint,
    so the result is at least the family size.
    """
    mats = [np.asarray(j, dtype=float) for j in j_family]
    n = mats[0].shape[0]
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(samples):
        xv = sample_unit_vector(rng, n)
        span = np.column_stack([m @ xv for m in mats])
        q, _ = np.linalg.qr(span)
        rows = np.eye(n) - q @ q.T
        blocks.append(np.kron(rows, xv))
    stacked = np.vstack(blocks)
    return n * n - numeric_rank(stacked, tol)
