"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a single ``[acceptance N] <name>: PASS|FAIL`` line; run with
``pytest -s tests/test_acceptance.py`` to see the lines as they pass.
"""

import time

import numpy as np

import ellflow as ef
from ellflow import linalg
from conftest import corpus_scenarios


def _verdict(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"\n[acceptance {num}] {name}: {status}" + (f" ({detail})" if detail else ""))
    assert ok, f"acceptance criterion {num} ({name}) failed: {detail}"


class TestAcceptance:
    def test_1_scalar_reproduction(self):
        """f and |g| match the closed forms to 1e-6 on [0, 2.5] in < 1 s."""
        t0 = time.perf_counter()
        problem = ef.generate(0, {"scalar"}, 1).problem
        cfg = ef.default_config(problem, t_max=2.5, stop_tol=1e-300)
        traj = ef.integrate(problem, cfg)
        sf = ef.ScalarFlow(0.99, 0.07)
        grid = np.linspace(0.0, 2.5, 251)
        fs, gs, worst = [], [], 0.0
        for t in grid:
            st = ef.dense_eval(traj, float(t))
            f_num = float(st.delta[0, 0].real)
            g_num = float(abs(st.d[0, 0]))
            f_cl, g_cl = ef.scalar_closed_form(sf, float(t))
            worst = max(worst, abs(f_num - f_cl), abs(g_num - g_cl))
            fs.append(f_num)
            gs.append(g_num)
        elapsed = time.perf_counter() - t0
        fs, gs = np.array(fs), np.array(gs)
        f_monotone = bool(np.all(np.diff(fs) >= -1e-12))
        peak = int(np.argmax(gs))
        g_non_monotone = 0 < peak < len(gs) - 1 and gs[peak] > gs[0] and gs[peak] > gs[-1]
        ok = worst <= 1e-6 and f_monotone and g_non_monotone and elapsed < 1.0
        _verdict(
            1,
            "scalar closed-form reproduction",
            ok,
            f"max_err={worst:.2e}, f_monotone={f_monotone}, "
            f"g_non_monotone={g_non_monotone}, runtime={elapsed:.2f}s",
        )

    def test_2_constant_of_motion(self):
        """50 mixed instances (dims 2-8): trace drift <= 1e-8 in < 30 s."""
        t0 = time.perf_counter()
        worst = 0.0
        for scn in corpus_scenarios(50):
            traj = ef.integrate(scn.problem)
            m0 = None
            for t in np.linspace(0.0, traj.t_end, 200):
                m = ef.motion_trace(ef.dense_eval(traj, float(t)), scn.problem)
                if m0 is None:
                    m0 = m
                worst = max(worst, abs(m - m0) / abs(m0))
        elapsed = time.perf_counter() - t0
        ok = worst <= 1e-8 and elapsed < 30.0
        _verdict(
            2,
            "constant of motion on the corpus",
            ok,
            f"worst_drift={worst:.2e}, runtime={elapsed:.1f}s",
        )

    def test_3_commutative_closed_form(self):
        """20 commuting gap instances: limit matches sqrt(Ups0^2+4 D0 D0*)."""
        worst = 0.0
        for seed in range(20):
            dim = 2 + seed % 5
            scn = ef.generate(seed, {"commuting", "gap_positive"}, dim)
            traj = ef.integrate(scn.problem)
            res = ef.limit_operator(traj)
            closed = ef.commutative_closed_form(scn.problem)
            err = np.linalg.norm(res.upsilon_inf - closed)
            rel = err / (1 + np.linalg.norm(res.upsilon_inf))
            worst = max(worst, rel)
        ok = worst <= 1e-6
        _verdict(3, "commutative closed form", ok, f"worst_rel_err={worst:.2e}")

    def test_4_ellipticity_monotonicity(self, corpus):
        """zeta, ||frakD||_op and the Hilbert-Schmidt budget behave
        monotonically at tolerance 1e-7 across the corpus."""
        failures = []
        for scn, traj in corpus:
            rep = ef.audit(traj, n_samples=200, transport_pairs=4)
            v = rep.verdicts
            if not v["zeta_monotone"]:
                failures.append((scn.name, "zeta"))
            if not v["frakD_norm_decreasing"]:
                failures.append((scn.name, "frakD_op"))
            if v["frakD0_psd"]:
                if not v["hs_budget_holds"]:
                    failures.append((scn.name, "hs_budget"))
                if not v["frakB_trace_decreasing"]:
                    failures.append((scn.name, "frakB_trace"))
        ok = not failures
        _verdict(4, "ellipticity monotonicity", ok, f"failures={failures[:5]}")

    def test_5_exponential_decay(self):
        """Gap instances: fitted rate >= 0.95 * 4|mu| and limit gap >= |mu|."""
        worst_rate_margin = np.inf
        worst_gap_margin = np.inf
        for seed in range(8):
            dim = 2 + seed % 5
            scn = ef.generate(seed, {"gap_positive"}, dim)
            traj = ef.integrate(scn.problem)
            mu = scn.problem.mu
            rate = ef.fit_decay_rate(traj)
            res = ef.limit_operator(traj)
            worst_rate_margin = min(worst_rate_margin, rate - 0.95 * 4 * abs(mu))
            worst_gap_margin = min(
                worst_gap_margin,
                linalg.min_eigenvalue(res.upsilon_inf) - (abs(mu) - 1e-6),
            )
        ok = worst_rate_margin >= 0.0 and worst_gap_margin >= 0.0
        _verdict(
            5,
            "exponential decay in the gap regime",
            ok,
            f"rate_margin={worst_rate_margin:.3f}, gap_margin={worst_gap_margin:.3f}",
        )

    def test_6_transport_identities(self, corpus):
        """D-, K- and frakD-transport residuals <= 1e-6 on sampled pairs."""
        worst = 0.0
        for scn, traj in corpus[:10]:
            problem = scn.problem
            t_end = traj.t_end
            pairs = [(0.0, 0.5 * t_end), (0.2 * t_end, 0.8 * t_end), (0.0, t_end)]
            w0 = ef.evolve_W(traj, 0.0, t_end).w
            d_t = ef.dense_eval(traj, t_end).d
            res = np.linalg.norm(d_t - w0 @ problem.d0 @ w0.T)
            worst = max(worst, res / (1 + np.linalg.norm(problem.d0)))
            for s, t in pairs:
                w = ef.evolve_W(traj, s, t).w
                st_s = ef.dense_eval(traj, s)
                st_t = ef.dense_eval(traj, t)
                k_s = ef.K_matrix(st_s, problem)
                k_t = ef.K_matrix(st_t, problem)
                res = np.linalg.norm(k_t - w @ k_s @ w.T)
                worst = max(worst, res / (1 + np.linalg.norm(k_s)))
                v = ef.evolve_V(traj, s, t).w
                fd_s = ef.frakD(st_s, problem)
                fd_t = ef.frakD(st_t, problem)
                res = np.linalg.norm(fd_t - v @ fd_s @ v.conj().T)
                worst = max(worst, res / (1 + np.linalg.norm(fd_s)))
        ok = worst <= 1e-6
        _verdict(6, "transport identities", ok, f"worst_rel_residual={worst:.2e}")

    def test_7_fock_diagonalization(self):
        """Pairing model and 10 random 3-mode instances: spectra agree."""
        t0 = time.perf_counter()
        ups0 = np.eye(2, dtype=complex)
        d0 = np.array([[0.0, 0.5], [-0.5, 0.0]], complex)
        problem = ef.FlowProblem(ups0, d0, mu=0.5, epsilon=1.0)
        traj = ef.integrate(problem)
        asym = ef.limit_operator(traj)
        comp = ef.validate(problem, asym, ef.jordan_wigner(2))
        r2 = np.sqrt(2.0)
        closed = np.array([1 - r2, 1.0, 1.0, 1 + r2])
        pairing_ok = (
            comp.max_abs_gap <= 1e-5
            and np.max(np.abs(comp.spec_h0 - closed)) <= 1e-5
            and np.max(np.abs(comp.spec_diag - closed)) <= 1e-5
        )
        ground_ok = abs(comp.spec_h0[0] - (problem.e0 - asym.energy_shift)) <= 1e-5

        worst_gap = 0.0
        ops3 = ef.jordan_wigner(3)
        for seed in range(10):
            scn = ef.generate(seed, {"gap_positive", "fermionic_antisymmetric"}, 3)
            traj3 = ef.integrate(scn.problem)
            asym3 = ef.limit_operator(traj3)
            comp3 = ef.validate(scn.problem, asym3, ops3)
            worst_gap = max(worst_gap, comp3.max_abs_gap)
            ground_ok = ground_ok and abs(
                comp3.spec_h0[0] - (scn.problem.e0 - asym3.energy_shift)
            ) <= 1e-5
        elapsed = time.perf_counter() - t0
        ok = pairing_ok and ground_ok and worst_gap <= 1e-5 and elapsed < 10.0
        _verdict(
            7,
            "Fock-space diagonalization",
            ok,
            f"pairing={pairing_ok}, worst_gap={worst_gap:.2e}, "
            f"ground_state={ground_ok}, runtime={elapsed:.1f}s",
        )

    def test_8_energy_shift_identity(self, corpus):
        """|shift - tr(delta_inf)/2| <= 1e-6 (1 + shift) for converged runs."""
        worst = 0.0
        checked = 0
        for scn, traj in corpus:
            if not traj.reached_stop:
                continue
            res = ef.limit_operator(traj)
            tr_half = float(np.trace(res.delta_inf).real) / 2
            rel = abs(res.energy_shift - tr_half) / (1 + abs(res.energy_shift))
            worst = max(worst, rel)
            checked += 1
        ok = worst <= 1e-6 and checked > 0
        _verdict(
            8,
            "energy-shift identity",
            ok,
            f"worst_rel={worst:.2e} over {checked} converged instances",
        )

    def test_9_appendix_predicates(self, corpus):
        """Commutative ellipse membership and relative boundedness above."""
        gamma, beta = 1.3, 0.6
        thetas = np.linspace(0.15, np.pi - 0.5, 11)
        x = np.diag(gamma * np.cos(thetas)).astype(complex)
        y = np.diag(beta * np.sin(thetas)).astype(complex)
        residual = ef.ellipse_residual(x, y, ef.EllipseParams(gamma, beta), "ellipse")
        ellipse_ok = residual <= 1e-10

        bounded_ok = True
        for scn, traj in corpus[:6]:
            problem = scn.problem
            c0 = linalg.norm(
                ef.frakD(ef.dense_eval(traj, 0.0), problem), "operator"
            )
            params = ef.EllipseParams(
                gamma=problem.mu,
                beta=abs(problem.mu) / 2,
                alpha=np.sqrt(c0 + 1e-7),
            )
            for t in np.linspace(0.0, traj.t_end, 40):
                st = ef.dense_eval(traj, float(t))
                ups = problem.upsilon0 + st.delta
                out = ef.elliptic_boundedness(ups, np.array(st.d), params)
                if not out["above"]:
                    bounded_ok = False
                    break
        ok = ellipse_ok and bounded_ok
        _verdict(
            9,
            "appendix ellipse predicates",
            ok,
            f"ellipse_residual={residual:.2e}, bounded_above={bounded_ok}",
        )
