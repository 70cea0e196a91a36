import numpy as np
import pytest

from conftest import block_tensor, make_system, make_tensor, unit
from osserman.cayley import cayley_tensor
from osserman.clifford import CliffordSystem, curvature_from_clifford, validate_clifford
from osserman.curvature import CurvatureTensor, jacobi, sphere_tensor
from osserman.errors import (
    AlignmentFailed,
    FrameInconsistent,
    GenericityExhausted,
    HypothesesViolated,
    ObstructionDetected,
    OssermanError,
    RecoveryFailed,
    SpectrumMismatch,
    TieBreakNeeded,
)
from osserman.linalg import SpectrumProfile, subspace_gap
from osserman.recovery import (
    LambdaOp,
    RecoveryConfig,
    align_pair,
    assemble_frame,
    factor_jacobi,
    gauge_generators,
    generic_pair,
    generic_triple,
    lambda_phi_spectrum,
    normalize,
    peel,
    phi,
    recover_clifford,
    recover_clifford_traced,
    stable_subspace,
)
from osserman.verify import osserman_check


class TestLambdaOp:
    def test_groups(self):
        lam = LambdaOp([2.0, 2.0, 5.0])
        assert lam.nu == 3
        assert lam.groups == ((2.0, 0, 2), (5.0, 2, 1))
        np.testing.assert_allclose(lam.diag(), np.diag([2.0, 2.0, 5.0]))

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            LambdaOp([1.0, 0.0])

    def test_rejects_split_groups(self):
        with pytest.raises(ValueError):
            LambdaOp([2.0, 5.0, 2.0])

    def test_without_group(self):
        lam = LambdaOp([2.0, 2.0, 5.0])
        np.testing.assert_allclose(lam.without_group(0).mu, [5.0])
        np.testing.assert_allclose(lam.without_group(1).mu, [2.0, 2.0])


class TestNormalize:
    def test_sphere_collapses_to_zero(self):
        tensor = sphere_tensor(6)
        report = osserman_check(tensor, samples=20)
        norm = normalize(tensor, report.profile)
        assert norm.lambda0 == 1.0
        assert norm.lam.nu == 0
        np.testing.assert_allclose(norm.tensor.comps, 0.0, atol=1e-14)

    def test_shifted_spectrum(self):
        tensor = make_tensor(8, 1.0, [3.0, 5.0])
        report = osserman_check(tensor, samples=40)
        norm = normalize(tensor, report.profile)
        assert norm.lambda0 == 1.0
        np.testing.assert_allclose(norm.lam.mu, [2.0, 4.0], atol=1e-10)
        rng = np.random.default_rng(0)
        x = unit(rng, 8)
        w = np.sort(np.linalg.eigvalsh(jacobi(norm.tensor, x).entries))
        np.testing.assert_allclose(w, [0, 0, 0, 0, 0, 0, 2, 4], atol=1e-10)

    def test_already_normalized_unchanged(self):
        tensor = make_tensor(8, 0.0, [2.0, 4.0])
        report = osserman_check(tensor, samples=40)
        norm = normalize(tensor, report.profile)
        # the dominant cluster mean carries eigensolver roundoff only
        assert abs(norm.lambda0) < 1e-12
        np.testing.assert_allclose(norm.tensor.comps, tensor.comps, atol=1e-14)

    def test_tie_break_rule_and_raise(self):
        profile = SpectrumProfile(((-1.0, 3), (1.0, 3)))
        # fabricate a tensor-free call: only the profile drives the choice
        tensor = sphere_tensor(7)
        norm = normalize(tensor, profile)
        assert norm.tie_broken
        assert norm.lambda0 == -1.0
        with pytest.raises(TieBreakNeeded):
            normalize(tensor, profile, tie_break="raise")


class TestFactorJacobi:
    def test_single_generator_factor(self):
        sys1 = make_system(4, 0.0, [3.0])
        tensor = curvature_from_clifford(sys1)
        lam = LambdaOp([3.0])
        rng = np.random.default_rng(1)
        x = unit(rng, 4)
        m = factor_jacobi(tensor, x, lam)
        assert m.shape == (4, 1)
        jx = sys1.j[0] @ x
        assert abs(abs(m[:, 0] @ jx) - 1.0) < 1e-12
        resid = np.max(np.abs(m @ lam.diag() @ m.T - jacobi(tensor, x).entries))
        assert resid < 1e-12

    def test_gauge_freedom(self):
        tensor = make_tensor(8, 0.0, [2.0, 2.0, 5.0])
        lam = LambdaOp([2.0, 2.0, 5.0])
        rng = np.random.default_rng(2)
        x = unit(rng, 8)
        m = factor_jacobi(tensor, x, lam)
        theta = 0.83
        gauge = np.eye(3)
        gauge[:2, :2] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        gauge[2, 2] = -1.0
        m2 = m @ gauge
        resid = np.max(np.abs(m2 @ lam.diag() @ m2.T - jacobi(tensor, x).entries))
        assert resid < 1e-12
        # recovered gauge between the two factors preserves the model
        n_rec = m.T @ m2
        np.testing.assert_allclose(n_rec @ lam.diag() @ n_rec.T, lam.diag(), atol=1e-10)
        np.testing.assert_allclose(n_rec.T @ n_rec, np.eye(3), atol=1e-10)

    def test_zero_model(self):
        lam = LambdaOp(np.empty(0))
        m = factor_jacobi(CurvatureTensor(np.zeros((4,) * 4)), np.eye(4)[0], lam)
        assert m.shape == (4, 0)

    def test_spectrum_mismatch(self):
        tensor = make_tensor(8, 0.0, [2.0, 4.0])
        rng = np.random.default_rng(3)
        with pytest.raises(SpectrumMismatch):
            factor_jacobi(tensor, unit(rng, 8), LambdaOp([2.0, 7.0]))


class TestGenericity:
    def setup_method(self):
        self.tensor = make_tensor(8, 0.0, [1.0, 2.0, 3.0])
        rng = np.random.default_rng(4)
        self.x = unit(rng, 8)
        y = rng.standard_normal(8)
        y -= (y @ self.x) * self.x
        self.y = y / np.linalg.norm(y)

    def test_coincident_pair_fails(self):
        assert not generic_pair(self.tensor, self.x, self.x, 3)

    def test_random_pair_passes(self):
        assert generic_pair(self.tensor, self.x, self.y, 3)

    def test_zero_model_vacuous(self):
        assert generic_pair(self.tensor, self.x, self.y, 0)
        assert generic_triple(self.tensor, self.x, self.y, self.x, 0)

    def test_triple_on_larger_space(self):
        tensor = make_tensor(12, 0.0, [1.0, 1.0, 1.0])
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.standard_normal((12, 3)))
        assert generic_triple(tensor, q[:, 0], q[:, 1], q[:, 2], 3)
        assert not generic_triple(tensor, q[:, 0], q[:, 1], q[:, 1], 3)


class TestAlignPair:
    def _setup(self, n=8, mu=(2.0, 5.0), seed=6):
        tensor = make_tensor(n, 0.0, list(mu))
        lam = LambdaOp(list(mu))
        rng = np.random.default_rng(seed)
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        e1, e2 = q[:, 0], q[:, 1]
        m1 = factor_jacobi(tensor, e1, lam)
        return tensor, lam, e1, e2, m1

    def test_cross_term_identity(self):
        tensor, lam, e1, e2, m1 = self._setup()
        m2 = align_pair(m1, tensor, e1, e2, lam)
        from osserman.curvature import mixed_jacobi

        cross = (
            m1 @ lam.diag() @ m2.T
            + m2 @ lam.diag() @ m1.T
            - 2.0 * mixed_jacobi(tensor, e1, e2).entries
        )
        assert np.max(np.abs(cross)) < 1e-9
        resid = np.max(np.abs(m2 @ lam.diag() @ m2.T - jacobi(tensor, e2).entries))
        assert resid < 1e-9

    def test_uniqueness(self):
        tensor, lam, e1, e2, m1 = self._setup()
        m2a = align_pair(m1, tensor, e1, e2, lam)
        m2b = align_pair(m1, tensor, e1, e2, lam)
        np.testing.assert_allclose(m2a, m2b, atol=1e-10)

    def test_swap_consistency(self):
        tensor, lam, e1, e2, m1 = self._setup()
        m2 = align_pair(m1, tensor, e1, e2, lam)
        m1_back = align_pair(m2, tensor, e2, e1, lam)
        np.testing.assert_allclose(m1_back, m1, atol=1e-9)

    def test_inconsistent_factor_fails(self):
        # factor from one tensor, cross terms from a rotated copy: spectra
        # agree but no gauge satisfies the cross-term identity
        tensor, lam, e1, e2, m1 = self._setup()
        rng = np.random.default_rng(99)
        q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
        base = make_system(8, 0.0, [2.0, 5.0])
        rotated = CliffordSystem(
            8, 0.0, base.mu, np.stack([q @ j @ q.T for j in base.j])
        )
        other = curvature_from_clifford(rotated)
        with pytest.raises(AlignmentFailed):
            align_pair(m1, other, e1, e2, lam)


class TestAssembleFrame:
    def test_frame_invariants(self):
        tensor = make_tensor(12, 0.0, [1.0, 1.0, 1.0])
        lam = LambdaOp([1.0, 1.0, 1.0])
        frame = assemble_frame(tensor, lam, tol=1e-8, seed=0)
        from osserman.curvature import mixed_jacobi

        n = 12
        worst = 0.0
        for i in range(n):
            np.testing.assert_allclose(
                frame.factors[i].T @ frame.factors[i], np.eye(3), atol=1e-9
            )
            for j in range(i + 1, n):
                cross = (
                    frame.factors[i] @ lam.diag() @ frame.factors[j].T
                    + frame.factors[j] @ lam.diag() @ frame.factors[i].T
                    - 2.0
                    * mixed_jacobi(tensor, frame.basis[:, i], frame.basis[:, j]).entries
                )
                worst = max(worst, float(np.max(np.abs(cross))))
        assert worst < 1e-8

    def test_global_factorization(self):
        tensor = make_tensor(8, 0.0, [2.0, 4.0])
        lam = LambdaOp([2.0, 4.0])
        frame = assemble_frame(tensor, lam, seed=1)
        rng = np.random.default_rng(2)
        for _ in range(50):
            x = unit(rng, 8)
            resid = np.max(np.abs(frame.jacobi_of(x) - jacobi(tensor, x).entries))
            assert resid < 1e-8

    def test_zero_model(self):
        frame = assemble_frame(CurvatureTensor(np.zeros((4,) * 4)), LambdaOp(np.empty(0)))
        assert frame.factors.shape == (4, 4, 0)

    def test_dimension_obstruction(self):
        # 3 nu > n can never pass the triple rank check
        tensor16 = make_tensor(16, 0.0, [1.0] * 6)
        with pytest.raises(GenericityExhausted):
            assemble_frame(tensor16, LambdaOp([1.0] * 6), seed=0)

    def test_non_osserman_input_is_frame_inconsistent(self):
        blk = block_tensor()
        with pytest.raises(FrameInconsistent):
            assemble_frame(blk, LambdaOp([1.0, 1.0]), seed=0, redraw_budget=5)


class TestPhiMap:
    def setup_method(self):
        self.tensor = make_tensor(12, 0.0, [2.0, 2.0, 5.0])
        self.lam = LambdaOp([2.0, 2.0, 5.0])
        self.frame = assemble_frame(self.tensor, self.lam, seed=3)

    def test_basis_vectors_give_identity(self):
        for i in range(12):
            np.testing.assert_allclose(
                phi(self.frame, self.frame.basis[:, i]).matrix, np.eye(3), atol=1e-9
            )

    def test_quadratic_scaling(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(12)
        np.testing.assert_allclose(
            phi(self.frame, 2.0 * x).matrix, 4.0 * phi(self.frame, x).matrix, atol=1e-10
        )

    def test_similarity_to_model(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            x = unit(rng, 12)
            w = lambda_phi_spectrum(self.frame, x)
            np.testing.assert_allclose(
                np.sort(w), np.sort(self.lam.mu), atol=1e-9
            )


class TestStableSubspace:
    def test_single_group_is_everything(self):
        tensor = make_tensor(12, 0.0, [3.0, 3.0, 3.0])
        lam = LambdaOp([3.0, 3.0, 3.0])
        frame = assemble_frame(tensor, lam, seed=6)
        sub = stable_subspace(frame, lam, samples=10, seed=0)
        assert sub.basis.shape == (3, 3)
        assert sub.eigenvalue == 3.0

    def test_selection_rule_picks_smallest_reciprocal(self):
        tensor = make_tensor(12, 0.0, [2.0, 2.0, 5.0])
        lam = LambdaOp([2.0, 2.0, 5.0])
        frame = assemble_frame(tensor, lam, seed=7)
        sub = stable_subspace(frame, lam, samples=30, seed=1)
        assert sub.eigenvalue == 5.0
        assert sub.basis.shape == (3, 1)

    def test_mixed_signs_pick_negative_of_largest_magnitude(self):
        tensor = make_tensor(8, 0.0, [-3.0, 2.0])
        lam = LambdaOp([-3.0, 2.0])
        frame = assemble_frame(tensor, lam, seed=8)
        sub = stable_subspace(frame, lam, samples=30, seed=2)
        assert sub.eigenvalue == -3.0

    def test_sampled_subspaces_agree(self):
        tensor = make_tensor(12, 0.0, [2.0, 2.0, 5.0])
        lam = LambdaOp([2.0, 2.0, 5.0])
        frame = assemble_frame(tensor, lam, seed=9)
        sub = stable_subspace(frame, lam, samples=50, seed=3)
        rng = np.random.default_rng(4)
        inv = lam.inv_diag()
        for _ in range(50):
            x = unit(rng, 12)
            w = phi(frame, x).matrix - sub.eigenvalue * inv
            vals, vecs = np.linalg.eigh(w)
            local = vecs[:, np.abs(vals) <= 1e-9 * max(1.0, np.abs(vals).max())]
            assert local.shape[1] == 1
            assert subspace_gap(sub.basis, local) < 1e-9


class TestGaugeGenerators:
    def test_roundtrip_generators_validate(self):
        tensor = make_tensor(12, 0.0, [2.0, 2.0, 5.0])
        lam = LambdaOp([2.0, 2.0, 5.0])
        frame = assemble_frame(tensor, lam, seed=10)
        sub = stable_subspace(frame, lam, samples=30, seed=5)
        gens = gauge_generators(frame, sub, frame.basis[:, 0], lam)
        assert len(gens) == 1
        system = CliffordSystem(12, 0.0, [sub.eigenvalue], np.stack(gens))
        report = validate_clifford(system)
        assert report.passed or max(report.residuals.values()) < 1e-8

    def test_skew_witness_and_eigen_membership(self):
        tensor = make_tensor(8, 0.0, [2.0, 4.0])
        lam = LambdaOp([2.0, 4.0])
        frame = assemble_frame(tensor, lam, seed=11)
        sub = stable_subspace(frame, lam, samples=30, seed=6)
        gens = gauge_generators(frame, sub, frame.basis[:, 0], lam)
        rng = np.random.default_rng(7)
        for js in gens:
            for _ in range(100):
                x = unit(rng, 8)
                assert abs((js @ x) @ x) < 1e-10
                resid = np.linalg.norm(
                    jacobi(tensor, x).entries @ (js @ x) - sub.eigenvalue * (js @ x)
                )
                assert resid < 1e-8

    def test_identity_gauge_for_flat_phi(self):
        # single group: Phi(E_1) = I so the gauge at E_1 is the identity and
        # the generator columns are the factor columns themselves
        tensor = make_tensor(12, 0.0, [3.0, 3.0, 3.0])
        lam = LambdaOp([3.0, 3.0, 3.0])
        frame = assemble_frame(tensor, lam, seed=12)
        sub = stable_subspace(frame, lam, samples=10, seed=8)
        gens = gauge_generators(frame, sub, frame.basis[:, 0], lam)
        assert len(gens) == 3
        system = CliffordSystem(12, 0.0, [3.0] * 3, np.stack(gens))
        assert validate_clifford(system).passed


class TestPeel:
    def test_single_group_full_peel(self):
        tensor = make_tensor(12, 0.0, [3.0, 3.0, 3.0])
        lam = LambdaOp([3.0, 3.0, 3.0])
        frame = assemble_frame(tensor, lam, seed=13)
        sub = stable_subspace(frame, lam, samples=10, seed=9)
        gens = gauge_generators(frame, sub, frame.basis[:, 0], lam)
        remainder = peel(tensor, sub.eigenvalue, gens, lam=lam)
        assert np.max(np.abs(remainder.comps)) < 1e-10

    def test_two_groups_leave_one(self):
        tensor = make_tensor(8, 0.0, [2.0, 4.0])
        lam = LambdaOp([2.0, 4.0])
        frame = assemble_frame(tensor, lam, seed=14)
        sub = stable_subspace(frame, lam, samples=30, seed=10)
        gens = gauge_generators(frame, sub, frame.basis[:, 0], lam)
        remainder = peel(tensor, sub.eigenvalue, gens, lam=lam)
        report = osserman_check(remainder, samples=40, seed=0)
        assert report.is_osserman
        nonzero = [(v, m) for v, m in report.profile.pairs if abs(v) > 1e-8]
        assert nonzero == [(2.0, 1)]

    def test_kernel_growth(self):
        tensor = make_tensor(8, 0.0, [2.0, 4.0])
        lam = LambdaOp([2.0, 4.0])
        frame = assemble_frame(tensor, lam, seed=15)
        sub = stable_subspace(frame, lam, samples=30, seed=11)
        gens = gauge_generators(frame, sub, frame.basis[:, 0], lam)
        remainder = peel(tensor, sub.eigenvalue, gens, lam=lam)
        rng = np.random.default_rng(12)
        x = unit(rng, 8)
        w = np.abs(np.linalg.eigvalsh(jacobi(remainder, x).entries))
        kernel_dim = int(np.count_nonzero(w < 1e-9))
        # (n - 1 - nu) + m_alpha + 1
        assert kernel_dim == (8 - 1 - 2) + 1 + 1


class TestRecoverClifford:
    @pytest.mark.parametrize(
        "n,mu_offsets,seed",
        [
            (8, (2.0, 4.0), 0),
            (12, (2.0, 2.0, 4.5), 1),
        ],
    )
    def test_roundtrip(self, n, mu_offsets, seed):
        rng = np.random.default_rng(seed)
        lam0 = float(rng.uniform(-0.5, 1.5))
        mu = [lam0 + off for off in mu_offsets]
        tensor = make_tensor(n, lam0, mu)
        system = recover_clifford(tensor, RecoveryConfig(samples=80, seed=seed))
        rebuilt = curvature_from_clifford(system)
        assert np.max(np.abs(rebuilt.comps - tensor.comps)) < 1e-8
        assert validate_clifford(system).passed

    def test_sphere(self):
        system = recover_clifford(sphere_tensor(6))
        assert system.nu == 0
        assert system.lambda0 == 1.0

    def test_zero_tensor(self):
        system = recover_clifford(CurvatureTensor(np.zeros((5,) * 4)))
        assert system.nu == 0
        assert system.lambda0 == 0.0

    def test_cayley_hypotheses(self):
        tensor = cayley_tensor(1.0)
        with pytest.raises(HypothesesViolated):
            recover_clifford(tensor, RecoveryConfig(samples=40))

    def test_cayley_forced_obstruction(self):
        tensor = cayley_tensor(1.0)
        with pytest.raises(ObstructionDetected) as info:
            recover_clifford(tensor, RecoveryConfig(samples=40, force=True))
        assert info.value.stage is not None

    def test_block_tensor_staged_failure(self):
        with pytest.raises(OssermanError) as info:
            recover_clifford(block_tensor(), RecoveryConfig(samples=60))
        assert isinstance(info.value, RecoveryFailed)
        assert info.value.stage == "osserman_check"

    def test_cross_round_anticommutation(self):
        tensor = make_tensor(8, 1.0, [3.0, 5.0])
        system = recover_clifford(tensor, RecoveryConfig(samples=60, seed=3))
        j0, j1 = system.j
        assert np.max(np.abs(j0 @ j1 + j1 @ j0)) < 1e-8

    def test_deterministic(self):
        tensor = make_tensor(8, 1.0, [3.0, 5.0])
        cfg = RecoveryConfig(samples=60, seed=4)
        a = recover_clifford(tensor, cfg)
        b = recover_clifford(tensor, cfg)
        np.testing.assert_array_equal(a.mu, b.mu)
        np.testing.assert_array_equal(a.j, b.j)

    def test_trace_records_stages(self):
        tensor = make_tensor(8, 1.0, [3.0, 5.0])
        _, trace = recover_clifford_traced(tensor, RecoveryConfig(samples=60, seed=5))
        names = [record.name for record in trace]
        assert names[0] == "validate"
        assert "normalize" in names
        assert names[-1] == "final_validate"
        assert any(name.startswith("peel") for name in names)
