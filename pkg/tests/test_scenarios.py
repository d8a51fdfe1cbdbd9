"""Tests for the deterministic scenario generators."""

import numpy as np
import pytest

import ellflow as ef
from ellflow import linalg
from ellflow.errors import InconsistentRegime
from ellflow.scenarios import Scenario


def initial_frakD_min(problem):
    eye = np.eye(problem.dim)
    m = problem.upsilon0.T + problem.mu * eye
    b = linalg.hermitian_part(
        problem.d0 @ np.linalg.solve(m, problem.d0.conj().T)
    )
    return linalg.min_eigenvalue(problem.upsilon0 - problem.mu * eye + 4.0 * b)


class TestGenerate:
    def test_reproducible(self):
        a = ef.generate(5, {"gap_positive"}, 4)
        b = ef.generate(5, {"gap_positive"}, 4)
        np.testing.assert_array_equal(a.problem.upsilon0, b.problem.upsilon0)
        np.testing.assert_array_equal(a.problem.d0, b.problem.d0)
        assert a.problem.mu == b.problem.mu
        assert a.name == b.name

    def test_different_seeds_differ(self):
        a = ef.generate(5, {"gap_positive"}, 4)
        b = ef.generate(6, {"gap_positive"}, 4)
        assert np.linalg.norm(a.problem.upsilon0 - b.problem.upsilon0) > 1e-6

    def test_scalar_fixture(self):
        scn = ef.generate(0, {"scalar"}, 1)
        assert scn.problem.upsilon0[0, 0] == pytest.approx(-0.99)
        assert scn.problem.d0[0, 0] == pytest.approx(0.07j)
        assert scn.problem.mu == 1.0
        assert scn.expected["c"] == pytest.approx(np.hypot(0.99, 0.14))

    def test_trivial(self):
        scn = ef.generate(3, {"trivial_D0"}, 4)
        assert scn.problem.is_constant
        assert scn.expected == {"constant": True}

    def test_commuting_k0_residual(self):
        """(seed 7, commuting, dim 4): K0 residual at most 1e-12."""
        scn = ef.generate(7, {"commuting"}, 4)
        p = scn.problem
        k0 = p.upsilon0 @ p.d0 - p.d0 @ p.upsilon0.T
        assert np.linalg.norm(k0) <= 1e-12

    def test_gap_regime_hypotheses(self):
        """Gap draws satisfy Ups0 >= alpha, mu = alpha/2, frakD0 >= mu."""
        for seed in range(5):
            scn = ef.generate(seed, {"gap_positive"}, 3)
            p = scn.problem
            alpha = 2 * p.mu
            assert p.epsilon == pytest.approx(alpha)
            assert linalg.min_eigenvalue(p.upsilon0) >= alpha - 1e-10
            assert initial_frakD_min(p) >= p.mu - 1e-8

    def test_nonpositive_regime_hypotheses(self):
        for seed in range(4):
            scn = ef.generate(seed, {"nonpositive_frakD0_psd"}, 3)
            p = scn.problem
            assert linalg.min_eigenvalue(p.upsilon0) < 0
            assert p.mu > 0
            assert initial_frakD_min(p) >= -1e-10

    def test_fermionic_sign(self):
        scn = ef.generate(2, {"fermionic_antisymmetric", "gap_positive"}, 4)
        assert scn.problem.symmetry == ef.Symmetry.ANTISYMMETRIC
        assert linalg.symmetry_residual(scn.problem.d0, -1) <= 1e-14

    def test_commuting_fermionic_even_dim(self):
        scn = ef.generate(1, {"commuting", "fermionic_antisymmetric", "gap_positive"}, 4)
        p = scn.problem
        k0 = p.upsilon0 @ p.d0 - p.d0 @ p.upsilon0.T
        assert np.linalg.norm(k0) <= 1e-12
        assert linalg.symmetry_residual(p.d0, -1) <= 1e-14

    def test_inconsistent_regimes(self):
        with pytest.raises(InconsistentRegime):
            ef.generate(0, {"scalar"}, 2)
        with pytest.raises(InconsistentRegime):
            ef.generate(0, {"fermionic_antisymmetric"}, 1)
        with pytest.raises(InconsistentRegime):
            ef.generate(0, {"commuting", "fermionic_antisymmetric"}, 3)
        with pytest.raises(InconsistentRegime):
            ef.generate(0, {"no_such_regime"}, 2)

    def test_commuting_expected_limit_matches_flow(self):
        """The stored oracle payload agrees with the integrated limit."""
        scn = ef.generate(11, {"commuting", "gap_positive"}, 3)
        assert scn.expected is not None
        expected = linalg.matrix_from_json(scn.expected["upsilon_inf"])
        traj = ef.integrate(scn.problem)
        res = ef.limit_operator(traj)
        err = np.linalg.norm(res.upsilon_inf - expected)
        assert err <= 1e-6 * (1 + np.linalg.norm(expected))

    def test_json_round_trip(self):
        scn = ef.generate(4, {"gap_positive"}, 3)
        obj = scn.to_json()
        back = Scenario.from_json(obj)
        np.testing.assert_array_equal(back.problem.upsilon0, scn.problem.upsilon0)
        assert back.regime_tags == scn.regime_tags
        assert back.name == scn.name


class TestNegativeCases:
    def test_structure(self):
        cases = ef.negative_cases(0)
        assert len(cases) == 3
        names = [c.name for c in cases]
        assert any("scalar" in n for n in names)
        assert any("constant-subspace" in n for n in names)

    def test_first_two_violate_psd(self):
        for scn in ef.negative_cases(0)[:2]:
            assert initial_frakD_min(scn.problem) < 0

    def test_no_admissible_positive_mu(self):
        """The engineered coupling is too small for any scanned mu."""
        scn = ef.negative_cases(0)[0]
        assert ef.scan_max_mu(scn.problem.upsilon0, scn.problem.d0) is None

    def test_constant_subspace_flow(self):
        """The kernel eigenvector of D0 pins the flow on its eigenspace."""
        scn = ef.negative_cases(0)[1]
        traj = ef.integrate(scn.problem)
        final = traj.states[-1]
        # first basis vector spans ker(D0) and is an eigenvector of Ups0
        assert abs(final.delta[0, 0]) <= 1e-12
        assert abs(final.d[0, 0]) <= 1e-12
        # the complement behaves like a converging scalar flow
        assert traj.reached_stop
        ups_inf = scn.problem.upsilon0 + final.delta
        assert linalg.min_eigenvalue(ups_inf) == pytest.approx(-0.5, abs=1e-8)

    def test_trivial_control(self):
        scn = ef.negative_cases(0)[2]
        assert scn.problem.is_constant

    def test_audit_takes_non_asserting_path(self):
        """Indefinite frakD_0: no budget claim, zeta climbs but stays < 0."""
        scn = ef.negative_cases(0)[0]
        traj = ef.integrate(scn.problem)
        rep = ef.audit(traj, n_samples=80, transport_pairs=4)
        v = rep.verdicts
        assert not v["frakD0_psd"]
        assert v["frakB_trace_decreasing"] is None
        assert v["hs_budget_holds"] is None
        assert v["zeta_direction"] == "increasing"
        assert v["zeta_monotone"]
        assert rep.samples[-1]["zeta"] <= 1e-7
        assert rep.all_asserted_hold
