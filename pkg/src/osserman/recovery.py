"""Recovery of a Clifford structure from an Osserman curvature tensor.

The constructive pipeline:

1.  normalize: subtract the dominant eigenvalue times the sphere tensor so
    the Jacobi operators acquire a fat kernel; the remaining nonzero
    eigenvalues, with multiplicity, form the diagonal model Lambda.
2.  assemble_frame: draw a generic orthonormal basis E_1..E_n, factor
    R_{E_1} = M_1 Lambda M_1^t through eigenvectors, and align every other
    factor M_i against M_1 through the cross-term identity
    M_1 Lambda M_i^t + M_i Lambda M_1^t = 2 R_{E_1 E_i}.  The map
    X -> M_X = sum x_i M_i then factors every Jacobi operator at once.
3.  stable_subspace: the eigenvalue group whose reciprocal is smallest has
    an eigenspace of Lambda Phi(X), Phi(X) = M_X^t M_X, that does not move
    with X.  Compute it from many samples and certify the agreement.
4.  gauge_generators: renormalize the gauge so that the stable subspace is
    swept out by operators J_s X = M_X u_s which are skew-symmetric,
    orthogonal and anticommuting.
5.  peel: subtract the rank-one-per-generator tensor those J_s generate and
    recurse on the remainder, which has one eigenvalue group fewer.

Every stage certifies its own output and raises a stage-specific error on
failure, so a non-Osserman input can never produce a silent wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clifford import CliffordSystem, curvature_from_clifford, validate_clifford
from .curvature import (
    CurvatureTensor,
    combine,
    jacobi,
    mixed_jacobi,
    sphere_tensor,
    validate_tensor,
)
from .errors import (
    AlignmentFailed,
    FrameInconsistent,
    GaugeFailed,
    GenericityExhausted,
    HypothesesViolated,
    NotUnit,
    ObstructionDetected,
    OssermanError,
    PeelInconsistent,
    RecoveryFailed,
    SpectrumMismatch,
    TieBreakNeeded,
    UnstableSubspace,
)
from .linalg import (
    CLUSTER_REL_TOL,
    RANK_REL_TOL,
    SpectrumProfile,
    image_basis,
    numeric_rank,
    orthonormal_complement,
    sample_unit_vector,
    subspace_gap,
)
from .verify import osserman_check

UNIT_ABS_TOL = 1e-12


@dataclass(frozen=True)
class LambdaOp:
    """Diagonal model of the nonzero Jacobi eigenvalues, grouped by value.

    Entries repeat per multiplicity and equal values sit in one contiguous
    run; the groups are ordered ascending.
    """

    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).ravel()
        if np.any(mu == 0.0):
            raise ValueError("model eigenvalues must be nonzero")
        seen = []
        for value in mu:
            if seen and value != seen[-1] and value in seen:
                raise ValueError("equal eigenvalues must be contiguous")
            if not seen or value != seen[-1]:
                seen.append(value)
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def nu(self) -> int:
        return self.mu.size

    @property
    def groups(self) -> tuple[tuple[float, int, int], ...]:
        """(value, start, count) per contiguous run of equal entries."""
        out = []
        start = 0
        for i in range(1, self.nu + 1):
            if i == self.nu or self.mu[i] != self.mu[start]:
                out.append((float(self.mu[start]), start, i - start))
                start = i
        return tuple(out)

    def diag(self) -> np.ndarray:
        return np.diag(self.mu)

    def inv_diag(self) -> np.ndarray:
        return np.diag(1.0 / self.mu)

    def without_group(self, index: int) -> "LambdaOp":
        _, start, count = self.groups[index]
        keep = np.concatenate([self.mu[:start], self.mu[start + count:]])
        return LambdaOp(keep)

    def scale(self) -> float:
        return float(np.max(np.abs(self.mu))) if self.nu else 1.0


@dataclass(frozen=True)
class FactorFrame:
    """Orthonormal basis E_1..E_n plus one n x nu factor per basis vector.

    Invariants (certified by assemble_frame): M_i^t M_i = I, each M_i
    factors R_{E_i} through Lambda, and all pairs satisfy the cross-term
    identity, so M_X = sum <X, E_i> M_i factors R_X globally.
    """

    basis: np.ndarray       # (n, n), column i is E_i
    factors: np.ndarray     # (n, n, nu), factors[i] is M_i
    lam: LambdaOp

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def nu(self) -> int:
        return self.lam.nu

    def coords(self, x) -> np.ndarray:
        return self.basis.T @ np.asarray(x, dtype=float)

    def factor_of(self, x) -> np.ndarray:
        """M_X = sum_i <X, E_i> M_i."""
        return np.tensordot(self.coords(x), self.factors, axes=(0, 0))

    def jacobi_of(self, x) -> np.ndarray:
        m = self.factor_of(x)
        return m @ self.lam.diag() @ m.T


@dataclass(frozen=True)
class PhiValue:
    """The quadratic form Phi(X) = M_X^t M_X; positive semidefinite."""

    matrix: np.ndarray


def phi(frame: FactorFrame, x) -> PhiValue:
    m = frame.factor_of(x)
    g = m.T @ m
    return PhiValue((g + g.T) / 2.0)


def lambda_phi_spectrum(frame: FactorFrame, x) -> np.ndarray:
    """Eigenvalues of Lambda Phi(X), ascending.

    Computed through the symmetric congruence Phi^(1/2) Lambda Phi^(1/2),
    which is similar to Lambda Phi(X) whenever Phi(X) is positive definite.
    """
    g = phi(frame, x).matrix
    w, v = np.linalg.eigh(g)
    if np.min(w) <= 0:
        raise GaugeFailed("Phi(X) is not positive definite at this vector")
    root = v @ np.diag(np.sqrt(w)) @ v.T
    return np.linalg.eigvalsh(root @ frame.lam.diag() @ root)


@dataclass(frozen=True)
class Normalization:
    """Output of normalize: shifted tensor, the shift, and the model."""

    tensor: CurvatureTensor
    lambda0: float
    lam: LambdaOp
    tie_broken: bool


@dataclass(frozen=True)
class StableSubspace:
    """Common eigenspace of Lambda Phi(X) for the selected eigenvalue."""

    basis: np.ndarray       # (nu, m) orthonormal columns
    eigenvalue: float
    group_index: int


@dataclass(frozen=True)
class StageRecord:
    """One entry of the recovery trace."""

    name: str
    info: dict


@dataclass(frozen=True)
class RecoveryConfig:
    samples: int = 200
    cluster_rel_tol: float = CLUSTER_REL_TOL
    rank_rel_tol: float = RANK_REL_TOL
    factor_tol: float = 1e-9
    frame_tol: float = 1e-8
    subspace_tol: float = 1e-9
    subspace_samples: int = 50
    frame_check_samples: int = 100
    triple_samples: int = 200
    redraw_budget: int = 50
    rebuild_tol: float = 1e-8
    zero_tol: float = 1e-9
    seed: int = 0
    force: bool = False


def normalize(
    r: CurvatureTensor, profile: SpectrumProfile, tie_break: str = "rule"
) -> Normalization:
    """Shift the dominant Jacobi eigenvalue to zero.

    The eigenvalue of maximal multiplicity becomes the sphere coefficient
    lambda0; the returned tensor is R - lambda0 * R1 and the model holds the
    remaining eigenvalues shifted by -lambda0, grouped ascending.  When two
    eigenvalues tie for the maximal multiplicity the one of smallest
    absolute value wins (tie_break="rule", surfaced via tie_broken) or
    TieBreakNeeded is raised (tie_break="raise").
    """
    if not profile.pairs:
        raise ValueError("empty spectrum profile")
    top = profile.max_multiplicity
    candidates = [v for v, m in profile.pairs if m == top]
    tie = len(candidates) > 1
    if tie and tie_break == "raise":
        raise TieBreakNeeded(
            f"eigenvalues {candidates} share the maximal multiplicity {top}"
        )
    lambda0 = min(candidates, key=lambda v: (abs(v), v))
    shifted = combine(1.0, r, -lambda0, sphere_tensor(r.n))
    mu = np.concatenate(
        [np.full(m, v - lambda0) for v, m in profile.pairs if v != lambda0]
        or [np.empty(0)]
    )
    return Normalization(shifted, float(lambda0), LambdaOp(mu), tie)


def factor_jacobi(
    rn: CurvatureTensor,
    x,
    lam: LambdaOp,
    tol: float = 1e-9,
    cluster_rel_tol: float = CLUSTER_REL_TOL,
) -> np.ndarray:
    """Factor R_X = M Lambda M^t with orthonormal columns, ordered like Lambda.

    The eigenvalues of R_X at the unit vector X must match {0 with
    multiplicity n - nu} plus the model entries; otherwise SpectrumMismatch.
    Columns are eigenvectors grouped to follow Lambda's layout, so the
    factor is unique up to a block-orthogonal gauge within each group.
    """
    xv = np.asarray(x, dtype=float).ravel()
    if abs(np.linalg.norm(xv) - 1.0) > UNIT_ABS_TOL:
        raise NotUnit("factorization requires a unit vector")
    a = jacobi(rn, xv).entries
    n = rn.n
    nu = lam.nu
    scale = max(1.0, lam.scale())
    if nu == 0:
        if float(np.max(np.abs(a))) > tol * scale:
            raise SpectrumMismatch("expected a vanishing Jacobi operator")
        return np.zeros((n, 0))
    w, v = np.linalg.eigh(a)
    expected = [(0.0, n - nu)] + [(val, cnt) for val, _, cnt in lam.groups]
    values = np.array([val for val, _ in expected])
    gaps = np.abs(values[:, None] - values[None, :])
    radius = 0.25 * float(np.min(gaps[gaps > 0]))
    assignment = np.argmin(np.abs(w[:, None] - values[None, :]), axis=1)
    deviation = np.abs(w - values[assignment])
    if float(np.max(deviation)) > radius:
        raise SpectrumMismatch(
            f"Jacobi eigenvalue {w[np.argmax(deviation)]:.6g} matches no "
            f"expected eigenvalue within {radius:.3g}"
        )
    counts = np.bincount(assignment, minlength=len(expected))
    for idx, (val, cnt) in enumerate(expected):
        if counts[idx] != cnt:
            raise SpectrumMismatch(
                f"eigenvalue {val:g} has multiplicity {counts[idx]}, expected {cnt}"
            )
    cols = []
    for gidx in range(1, len(expected)):
        cols.extend(np.nonzero(assignment == gidx)[0])
    m = v[:, cols]
    residual = float(np.max(np.abs(m @ lam.diag() @ m.T - a)))
    if residual > max(tol * scale, 1e-12):
        raise SpectrumMismatch(f"factorization residual {residual:.3e} exceeds tolerance")
    return m


def generic_pair(rn: CurvatureTensor, x, y, nu: int, tol: float = RANK_REL_TOL) -> bool:
    """Whether Im R_X and Im R_Y intersect trivially (sum has dimension 2 nu)."""
    if nu == 0:
        return True
    bx = image_basis(jacobi(rn, x).entries, tol)
    by = image_basis(jacobi(rn, y).entries, tol)
    return numeric_rank(np.hstack([bx, by]), tol) == 2 * nu


def generic_triple(
    rn: CurvatureTensor, x, y, z, nu: int, tol: float = RANK_REL_TOL
) -> bool:
    """Whether the images of R_X, R_Y, R_Z span a 3 nu dimensional space."""
    if nu == 0:
        return True
    bases = [image_basis(jacobi(rn, v).entries, tol) for v in (x, y, z)]
    return numeric_rank(np.hstack(bases), tol) == 3 * nu


def _project_block_orthogonal(n_mat: np.ndarray, lam: LambdaOp) -> np.ndarray:
    """Nearest gauge that is orthogonal and commutes with Lambda's groups."""
    out = np.zeros_like(n_mat)
    for _, start, count in lam.groups:
        block = n_mat[start:start + count, start:start + count]
        u, _, vt = np.linalg.svd(block)
        out[start:start + count, start:start + count] = u @ vt
    return out


def align_pair(
    m1: np.ndarray,
    rn: CurvatureTensor,
    e1,
    e2,
    lam: LambdaOp,
    tol: float = 1e-9,
) -> np.ndarray:
    """Factor of R_{E2} aligned with m1 through the cross-term identity.

    Any eigenvector factor of R_{E2} differs from the aligned one by a gauge
    N with N Lambda N^t = Lambda, and for a generic pair that gauge is the
    unique solution of the linear system

        M20 N Lambda m1^t + (M20 N Lambda m1^t)^t = 2 R_{E1 E2},

    solved by least squares and sharpened on the block-orthogonal gauge
    manifold.  AlignmentFailed signals an inconsistent system, i.e. input
    that is not Osserman or a pair that is not generic.
    """
    nu = lam.nu
    n = rn.n
    if nu == 0:
        return np.zeros((n, 0))
    cross = 2.0 * mixed_jacobi(rn, e1, e2).entries
    m20 = factor_jacobi(rn, e2, lam, tol)
    mu = lam.mu
    lam_mat = lam.diag()

    columns = np.empty((n * n, nu * nu))
    for a in range(nu):
        for b in range(nu):
            g = mu[b] * np.outer(m20[:, a], m1[:, b])
            columns[:, a * nu + b] = (g + g.T).ravel()

    def residual_of(n_gauge: np.ndarray) -> np.ndarray:
        half = m20 @ n_gauge @ lam_mat @ m1.T
        return cross - half - half.T

    sol, *_ = np.linalg.lstsq(columns, cross.ravel(), rcond=None)
    n_gauge = _project_block_orthogonal(sol.reshape(nu, nu), lam)
    scale = max(1.0, lam.scale())
    for _ in range(3):
        res = residual_of(n_gauge)
        if float(np.max(np.abs(res))) <= 0.1 * tol * scale:
            break
        dsol, *_ = np.linalg.lstsq(columns, res.ravel(), rcond=None)
        n_gauge = _project_block_orthogonal(n_gauge + dsol.reshape(nu, nu), lam)

    m2 = m20 @ n_gauge
    checks = {
        "gauge orthogonality": float(np.max(np.abs(m2.T @ m2 - np.eye(nu)))),
        "factorization": float(
            np.max(np.abs(m2 @ lam_mat @ m2.T - jacobi(rn, e2).entries))
        ),
        "cross-term": float(np.max(np.abs(residual_of(n_gauge)))),
    }
    worst_name, worst = max(checks.items(), key=lambda kv: kv[1])
    if worst > 10.0 * tol * scale:
        raise AlignmentFailed(
            f"{worst_name} residual {worst:.3e} exceeds tolerance; "
            "no admissible gauge aligns the pair"
        )
    return m2


def _random_orthonormal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def assemble_frame(
    rn: CurvatureTensor,
    lam: LambdaOp,
    tol: float = 1e-8,
    seed: int = 0,
    *,
    factor_tol: float = 1e-9,
    rank_tol: float = RANK_REL_TOL,
    redraw_budget: int = 50,
    triple_samples: int = 200,
    check_samples: int = 100,
) -> FactorFrame:
    """Build the global factorization R_X = M_X Lambda M_X^t.

    Draws orthonormal bases until every pair and a sample of triples pass
    the generic-position rank checks, aligns all factors against M_1, and
    certifies the pairwise cross-term identity plus the factorization on
    random unit vectors.  GenericityExhausted after the redraw budget;
    FrameInconsistent when the certified identities fail, which for a
    validated-Osserman input signals tolerances, and otherwise bad input.
    """
    n = rn.n
    nu = lam.nu
    rng = np.random.default_rng(seed)
    if nu == 0:
        return FactorFrame(np.eye(n), np.zeros((n, n, 0)), lam)
    if 3 * nu > n:
        raise GenericityExhausted(
            f"triples cannot reach rank 3 nu = {3 * nu} in dimension {n}"
        )

    basis = None
    for _ in range(redraw_budget):
        cand = _random_orthonormal(rng, n)
        images = []
        ok = True
        for i in range(n):
            b = image_basis(jacobi(rn, cand[:, i]).entries, rank_tol)
            if b.shape[1] > nu:
                # more nonzero directions than the model has eigenvalues:
                # no redraw can fix that
                raise FrameInconsistent(
                    f"Jacobi image has dimension {b.shape[1]} > nu = {nu}"
                )
            if b.shape[1] < nu:
                ok = False
                break
            images.append(b)
        if not ok:
            continue
        for i in range(n):
            if not ok:
                break
            for j in range(i + 1, n):
                if numeric_rank(np.hstack([images[i], images[j]]), rank_tol) != 2 * nu:
                    ok = False
                    break
        if not ok:
            continue
        triples = [
            tuple(rng.choice(n, size=3, replace=False)) for _ in range(triple_samples)
        ]
        for i, j, k in triples:
            stacked = np.hstack([images[i], images[j], images[k]])
            if numeric_rank(stacked, rank_tol) != 3 * nu:
                ok = False
                break
        if ok:
            basis = cand
            break
    if basis is None:
        raise GenericityExhausted(
            f"no generic basis found within {redraw_budget} redraws"
        )

    factors = np.zeros((n, n, nu))
    try:
        factors[0] = factor_jacobi(rn, basis[:, 0], lam, factor_tol)
        for i in range(1, n):
            factors[i] = align_pair(
                factors[0], rn, basis[:, 0], basis[:, i], lam, factor_tol
            )
    except (SpectrumMismatch, AlignmentFailed) as exc:
        raise FrameInconsistent(f"factor alignment failed: {exc}") from exc

    lam_mat = lam.diag()
    scale = max(1.0, lam.scale())
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            cross = (
                factors[i] @ lam_mat @ factors[j].T
                + factors[j] @ lam_mat @ factors[i].T
                - 2.0 * mixed_jacobi(rn, basis[:, i], basis[:, j]).entries
            )
            worst = max(worst, float(np.max(np.abs(cross))))
    if worst > tol * scale:
        raise FrameInconsistent(
            f"pairwise cross-term residual {worst:.3e} exceeds {tol * scale:.3e}"
        )

    frame = FactorFrame(basis, factors, lam)
    worst = 0.0
    for _ in range(check_samples):
        x = sample_unit_vector(rng, n)
        worst = max(
            worst,
            float(np.max(np.abs(frame.jacobi_of(x) - jacobi(rn, x).entries))),
        )
    if worst > tol * scale:
        raise FrameInconsistent(
            f"global factorization residual {worst:.3e} exceeds {tol * scale:.3e}"
        )
    return frame


def stable_subspace(
    frame: FactorFrame,
    lam: LambdaOp,
    samples: int = 50,
    tol: float = 1e-9,
    seed: int = 0,
) -> StableSubspace:
    """The eigenspace of Lambda Phi(X) that is independent of X.

    The target eigenvalue minimizes 1/value over the model's groups (for
    mixed signs this selects the negative eigenvalue of largest magnitude).
    The eigenspace is the kernel of the symmetric matrix
    Phi(X) - value * Lambda^{-1}; kernels over all samples are intersected
    through a stacked SVD and each sample is certified to agree with the
    common subspace by principal angle.  With a single eigenvalue group
    the subspace is everything.
    """
    groups = lam.groups
    if not groups:
        raise ValueError("model has no nonzero eigenvalues")
    gi = min(range(len(groups)), key=lambda i: 1.0 / groups[i][0])
    value, _, count = groups[gi]
    nu = lam.nu
    if len(groups) == 1:
        return StableSubspace(np.eye(nu), value, gi)

    rng = np.random.default_rng(seed)
    inv = lam.inv_diag()
    mats = []
    for _ in range(samples):
        x = sample_unit_vector(rng, frame.n)
        mats.append(phi(frame, x).matrix - value * inv)
    stacked = np.vstack(mats)
    _, svals, vt = np.linalg.svd(stacked, full_matrices=False)
    basis = vt[nu - count:].T
    if svals[nu - count - 1] <= 10.0 * max(tol * svals[0], tol):
        raise UnstableSubspace(
            "stacked kernel is larger than the eigenvalue multiplicity allows"
        )
    worst = 0.0
    for w in mats:
        scale = max(1.0, float(np.linalg.norm(w, 2)))
        ww = np.sort(np.abs(np.linalg.eigvalsh(w)))
        if ww[count - 1] > tol * scale or ww[count] <= 10.0 * tol * scale:
            raise UnstableSubspace(
                f"sampled kernel dimension differs from multiplicity {count}"
            )
        worst = max(worst, float(np.linalg.norm(w @ basis, 2)) / scale)
    if worst > tol:
        raise UnstableSubspace(
            f"sampled eigenspaces deviate from the common subspace by {worst:.3e}"
        )
    return StableSubspace(basis, value, gi)


def gauge_generators(
    frame: FactorFrame,
    subspace: StableSubspace,
    x0,
    lam: LambdaOp,
    tol: float = 1e-8,
) -> list[np.ndarray]:
    """Generators J_s X = M_X u_s for the stable eigenvalue group.

    Finds a gauge N0 with N0 Lambda N0^t = Lambda and N0^t Phi(X0) N0 = I
    by assembling, group by group, the eigenbasis of Lambda Phi(X0) made
    Phi-orthonormal; the u_s are the columns of N0 in the selected group,
    which must span the stable subspace.  The returned operators are
    certified skew-symmetric, orthogonal and anticommuting.
    """
    nu = lam.nu
    phi0 = phi(frame, x0).matrix
    inv = lam.inv_diag()
    n0 = np.zeros((nu, nu))
    for value, start, count in lam.groups:
        w, v = np.linalg.eigh(phi0 - value * inv)
        order = np.argsort(np.abs(w))[:count]
        scale = max(1.0, float(np.max(np.abs(w))))
        if float(np.max(np.abs(w[order]))) > tol * scale:
            raise GaugeFailed(
                f"Lambda Phi(X0) lacks an eigenvalue {value:g} of multiplicity {count}"
            )
        p = v[:, np.sort(order)]
        block = p.T @ phi0 @ p
        bw, bv = np.linalg.eigh((block + block.T) / 2.0)
        if np.min(bw) <= 1e-12:
            raise GaugeFailed("Phi(X0) is too ill-conditioned at the gauge point")
        n0[:, start:start + count] = p @ (bv @ np.diag(bw**-0.5) @ bv.T)

    lam_mat = lam.diag()
    resid_phi = float(np.max(np.abs(n0.T @ phi0 @ n0 - np.eye(nu))))
    resid_lam = float(np.max(np.abs(n0 @ lam_mat @ n0.T - lam_mat)))
    if max(resid_phi, resid_lam) > tol * max(1.0, lam.scale()):
        raise GaugeFailed(
            f"gauge residuals {resid_phi:.3e} / {resid_lam:.3e} exceed tolerance"
        )

    _, start, count = lam.groups[subspace.group_index]
    u_cols = n0[:, start:start + count]
    q, _ = np.linalg.qr(u_cols)
    if subspace_gap(subspace.basis, q) > 10.0 * tol:
        raise GaugeFailed("gauge block does not span the stable subspace")

    generators = []
    for s in range(count):
        w = np.einsum("iau,u->ai", frame.factors, u_cols[:, s])
        generators.append(w @ frame.basis.T)

    eye = np.eye(frame.n)
    worst = 0.0
    for s, js in enumerate(generators):
        worst = max(worst, float(np.max(np.abs(js + js.T))))
        worst = max(worst, float(np.max(np.abs(js.T @ js - eye))))
        for q_ in range(s + 1, count):
            jq = generators[q_]
            worst = max(worst, float(np.max(np.abs(js @ jq + jq @ js))))
    if worst > 10.0 * tol:
        raise GaugeFailed(f"generator identities violated by {worst:.3e}")
    return generators


def peel(
    rn: CurvatureTensor,
    lam_alpha: float,
    j_list,
    *,
    lam: LambdaOp | None = None,
    tol: float = 1e-8,
    check_samples: int = 8,
    seed: int = 0,
) -> CurvatureTensor:
    """Subtract the one-eigenvalue tensor generated by j_list from rn.

    The subtracted tensor is the Clifford tensor with sphere coefficient 0
    and all generator eigenvalues equal to lam_alpha, so the remainder's
    Jacobi kernel grows by the group's multiplicity.  When the pre-peel
    model is supplied the remainder's spectrum is certified against the
    reduced expectation; PeelInconsistent on disagreement.
    """
    mats = [np.asarray(j, dtype=float) for j in j_list]
    count = len(mats)
    n = rn.n
    hat = CliffordSystem(
        n, 0.0, np.full(count, float(lam_alpha)), np.stack(mats)
    )
    remainder = combine(1.0, rn, -1.0, curvature_from_clifford(hat))
    if lam is not None:
        keep = [
            np.full(cnt, val)
            for val, _, cnt in lam.groups
            if val != lam_alpha
        ]
        expected = np.sort(
            np.concatenate([np.zeros(n - 1 - lam.nu + count), *keep])
            if keep
            else np.zeros(n - 1)
        )
        rng = np.random.default_rng(seed)
        scale = max(1.0, lam.scale())
        for _ in range(check_samples):
            x = sample_unit_vector(rng, n)
            p = orthonormal_complement(x)
            w = np.linalg.eigvalsh(p.T @ jacobi(remainder, x).entries @ p)
            dev = float(np.max(np.abs(np.sort(w) - expected)))
            if dev > 10.0 * tol * scale:
                raise PeelInconsistent(
                    f"remainder spectrum deviates by {dev:.3e} from the "
                    "reduced eigenvalue table"
                )
    return remainder


def _annotate(exc: OssermanError, stage: str, forced: bool):
    if exc.stage is None:
        exc.stage = stage
    if forced:
        raise ObstructionDetected(
            f"stage '{stage}' failed persistently: {exc}", stage=stage
        ) from exc
    raise exc


def recover_clifford_traced(
    r: CurvatureTensor, config: RecoveryConfig | None = None
) -> tuple[CliffordSystem, list[StageRecord]]:
    """Full recovery pipeline; returns the system and a staged trace."""
    cfg = config or RecoveryConfig()
    trace: list[StageRecord] = []
    n = r.n

    sym = validate_tensor(r)
    trace.append(StageRecord("validate", {"max_residual": sym.max_residual}))
    if not sym.passed:
        raise RecoveryFailed(
            f"input tensor fails symmetry validation ({sym.max_residual:.3e})",
            stage="validate",
        )

    try:
        report = osserman_check(r, cfg.samples, cfg.cluster_rel_tol, cfg.seed)
    except OssermanError as exc:
        _annotate(exc, "osserman_check", forced=False)
    trace.append(
        StageRecord(
            "osserman_check",
            {
                "is_osserman": report.is_osserman,
                "max_deviation": report.max_deviation,
                "profile": list(report.profile.pairs),
            },
        )
    )
    if not report.is_osserman:
        raise RecoveryFailed(
            f"input is not Osserman (spectrum deviation {report.max_deviation:.3e})",
            stage="osserman_check",
        )

    nu = report.nu
    hyp_ok = n >= 3 * nu and n > (nu + 1) ** 2 / 4.0
    trace.append(
        StageRecord(
            "hypotheses",
            {"n": n, "nu": nu, "satisfied": hyp_ok, "forced": cfg.force and not hyp_ok},
        )
    )
    if not hyp_ok and not cfg.force:
        raise HypothesesViolated(
            f"(n, nu) = ({n}, {nu}) violates n >= 3 nu or n > (nu + 1)^2 / 4",
            stage="hypotheses",
        )
    forced = not hyp_ok

    norm = normalize(r, report.profile)
    trace.append(
        StageRecord(
            "normalize",
            {
                "lambda0": norm.lambda0,
                "tie_broken": norm.tie_broken,
                "model": norm.lam.mu.tolist(),
            },
        )
    )

    rn = norm.tensor
    lam = norm.lam
    scale0 = max(1.0, float(np.max(np.abs(r.comps))))
    collected: list[tuple[float, np.ndarray]] = []
    rounds = len(lam.groups)

    for round_idx in range(1, rounds + 1):
        if lam.nu == 0:
            break
        try:
            frame = assemble_frame(
                rn,
                lam,
                tol=cfg.frame_tol,
                seed=cfg.seed + round_idx,
                factor_tol=cfg.factor_tol,
                rank_tol=cfg.rank_rel_tol,
                redraw_budget=cfg.redraw_budget,
                triple_samples=cfg.triple_samples,
                check_samples=cfg.frame_check_samples,
            )
        except OssermanError as exc:
            _annotate(exc, f"assemble_frame[{round_idx}]", forced)
        trace.append(
            StageRecord(
                f"assemble_frame[{round_idx}]",
                {"nu": lam.nu, "model": lam.mu.tolist()},
            )
        )
        try:
            sub = stable_subspace(
                frame,
                lam,
                samples=cfg.subspace_samples,
                tol=cfg.subspace_tol,
                seed=cfg.seed + 1000 + round_idx,
            )
        except OssermanError as exc:
            _annotate(exc, f"stable_subspace[{round_idx}]", forced)
        trace.append(
            StageRecord(
                f"stable_subspace[{round_idx}]",
                {
                    "eigenvalue": sub.eigenvalue,
                    "dimension": sub.basis.shape[1],
                },
            )
        )
        try:
            gens = gauge_generators(
                frame, sub, frame.basis[:, 0], lam, tol=cfg.frame_tol
            )
        except OssermanError as exc:
            _annotate(exc, f"gauge_generators[{round_idx}]", forced)
        trace.append(
            StageRecord(
                f"gauge_generators[{round_idx}]", {"count": len(gens)}
            )
        )
        try:
            rn = peel(
                rn,
                sub.eigenvalue,
                gens,
                lam=lam,
                tol=cfg.frame_tol,
                seed=cfg.seed + 2000 + round_idx,
            )
        except OssermanError as exc:
            _annotate(exc, f"peel[{round_idx}]", forced)
        collected.extend((sub.eigenvalue, g) for g in gens)
        lam = lam.without_group(sub.group_index)
        trace.append(
            StageRecord(
                f"peel[{round_idx}]",
                {
                    "peeled_eigenvalue": sub.eigenvalue,
                    "remaining_model": lam.mu.tolist(),
                    "remainder_max": float(np.max(np.abs(rn.comps))),
                },
            )
        )

    remainder_max = float(np.max(np.abs(rn.comps)))
    if remainder_max > cfg.zero_tol * scale0:
        raise PeelInconsistent(
            f"remainder of size {remainder_max:.3e} left after peeling all groups",
            stage="peel",
        )

    if collected:
        mu = np.array([v + norm.lambda0 for v, _ in collected])
        j = np.stack([g for _, g in collected])
    else:
        mu = np.empty(0)
        j = np.zeros((0, n, n))
    system = CliffordSystem(n, norm.lambda0, mu, j)

    check = validate_clifford(system)
    rebuilt = curvature_from_clifford(system)
    rebuild_residual = float(np.max(np.abs(rebuilt.comps - r.comps)))
    trace.append(
        StageRecord(
            "final_validate",
            {
                "system_residuals": dict(check.residuals),
                "rebuild_residual": rebuild_residual,
                "nu": system.nu,
                "lambda0": system.lambda0,
            },
        )
    )
    if not check.passed:
        raise RecoveryFailed(
            "recovered generators fail the Clifford identities", stage="final_validate"
        )
    if rebuild_residual > cfg.rebuild_tol:
        raise RecoveryFailed(
            f"rebuilt tensor deviates componentwise by {rebuild_residual:.3e}",
            stage="final_validate",
        )
    return system, trace


def recover_clifford(
    r: CurvatureTensor, config: RecoveryConfig | None = None
) -> CliffordSystem:
    """Recover a Clifford system whose tensor reproduces the input.

    See :func:`recover_clifford_traced` for the staged variant used by the
    command line interface.
    """
    system, _ = recover_clifford_traced(r, config)
    return system
