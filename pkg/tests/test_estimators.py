import json

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from stablevar import (
    Estimate,
    InvalidInput,
    InvalidRank,
    Method,
    NotPositiveDefinite,
    SampleMoments,
    criterion_j,
    fit,
    fit_backward_ls,
    fit_fb11,
    fit_fb_sylvester,
    fit_ls,
    fit_rfb,
    fit_rls,
    moments_from_trajectory,
    residual_backward,
    residual_forward,
    simulate,
    stationary_covariance,
    spectral_radius,
    Trajectory,
)
from stablevar.estimators import as_method
from stablevar.experiments import build_paper_f

from _helpers import random_moments, random_spd, random_stable_model, rel

HALF = SampleMoments.from_matrices([[1.0]], [[1.0]], [[0.5]])


def _noiseless(rng, n, T):
    model = random_stable_model(rng, n)
    y = [rng.standard_normal(n)]
    for _ in range(T):
        y.append(model.F @ y[-1])
    return model.F, moments_from_trajectory(Trajectory(y=np.array(y)))


def _j_ls(S, F):
    return np.trace(np.linalg.solve(S.S11, residual_forward(S, F)))


def _random_rank(rng, n, m):
    return rng.standard_normal((n, m)) @ rng.standard_normal((m, n))


class TestScalarCases:
    @pytest.mark.parametrize("func", [fit_ls, fit_fb11, fit_backward_ls])
    def test_half(self, func):
        assert func(HALF).F_hat[0, 0] == pytest.approx(0.5)

    def test_sylvester_scalar(self):
        assert fit_fb_sylvester(HALF, [[1.0]]).F_hat[0, 0] == pytest.approx(0.5)

    def test_fb11_near_boundary(self):
        S = SampleMoments.from_matrices([[2.0]], [[2.0]], [[1.9]])
        est = fit_fb11(S)
        assert est.F_hat[0, 0] == pytest.approx(0.95)
        assert est.is_stable()

    def test_rank_one_scalar_rfb_is_fb11(self, rng):
        S = random_moments(rng, 1)
        assert fit_rfb(S, 1).F_hat[0, 0] == pytest.approx(fit_fb11(S).F_hat[0, 0], rel=1e-12)


class TestLeastSquares:
    def test_noiseless_identification(self, rng):
        for n in (2, 4, 6):
            F, S = _noiseless(rng, n, T=3 * n)
            assert rel(fit_ls(S).F_hat, F) < 1e-8

    def test_backward_noiseless(self, rng):
        F, S = _noiseless(rng, 3, T=20)
        Fb = fit_backward_ls(S).F_hat
        assert rel(Fb, np.linalg.inv(F)) < 1e-6

    def test_backward_noise_pd(self, rng):
        S = random_moments(rng, 5)
        est = fit_backward_ls(S)
        assert np.linalg.eigvalsh(est.Q_hat).min() > 0
        assert rel(est.F_hat, S.S01 @ np.linalg.inv(S.S11)) < 1e-10


class TestForwardsBackwards:
    def test_sylvester_matches_closed_form(self, rng):
        for n in range(1, 9):
            S = random_moments(rng, n)
            a = fit_fb_sylvester(S, S.S11).F_hat
            b = fit_fb11(S).F_hat
            assert np.linalg.norm(a - b) < 1e-9 * np.linalg.norm(b)

    def test_sylvester_local_minimality(self, rng):
        S = random_moments(rng, 4)
        P = random_spd(rng, 4)
        F = fit_fb_sylvester(S, P).F_hat
        J0 = criterion_j(S, F, P)
        for _ in range(100):
            dF = 1e-3 * rng.standard_normal((4, 4))
            assert J0 <= criterion_j(S, F + dF, P) + 1e-13 * abs(J0)

    def test_sylvester_bad_weight(self, rng):
        S = random_moments(rng, 3)
        with pytest.raises(InvalidInput):
            fit_fb_sylvester(S, np.eye(2))
        with pytest.raises(NotPositiveDefinite):
            fit_fb_sylvester(S, -np.eye(3))

    def test_fb11_stable_on_design_data(self):
        model = build_paper_f(1)
        for seed in range(50):
            S = moments_from_trajectory(simulate(model, 24, seed, init="zero"))
            assert fit_fb11(S).spectral_radius < 1


class TestReducedRankLS:
    def test_full_rank_is_ls(self, rng):
        for n in (1, 3, 6):
            S = random_moments(rng, n)
            assert np.linalg.norm(fit_rls(S, n).F_hat - fit_ls(S).F_hat) < 1e-9 * np.linalg.norm(
                fit_ls(S).F_hat)

    def test_hand_built_diagonal(self):
        S = SampleMoments.from_matrices(np.eye(2), np.eye(2), np.diag([0.3, 0.6]))
        est = fit_rls(S, 1)
        np.testing.assert_allclose(est.F_hat, np.diag([0.0, 0.6]), atol=1e-15)
        np.testing.assert_allclose(est.Q_hat, np.diag([1.0, 0.64]), atol=1e-15)
        assert est.warnings == []

    def test_beats_random_rank_two(self, rng):
        S = random_moments(rng, 4)
        J0 = _j_ls(S, fit_rls(S, 2).F_hat)
        F_ls = fit_ls(S).F_hat
        for _ in range(200):
            F = _random_rank(rng, 4, 2)
            if rng.random() < 0.5:  # also probe near the optimum
                U, s, Vt = np.linalg.svd(F_ls)
                F = (U[:, :2] * s[:2]) @ Vt[:2] + 0.05 * F / np.linalg.norm(F)
            assert J0 <= _j_ls(S, F) + 1e-12

    def test_noise_covariance_matches_residual(self, rng):
        S = random_moments(rng, 5)
        est = fit_rls(S, 2)
        assert rel(est.Q_hat, residual_forward(S, est.F_hat)) < 1e-9
        assert np.linalg.eigvalsh(est.Q_hat).min() > 0

    def test_rank_of_estimate(self, rng):
        S = random_moments(rng, 6)
        for m in range(1, 7):
            for est in (fit_rls(S, m), fit_rfb(S, m)):
                s = np.linalg.svd(est.F_hat, compute_uv=False)
                assert np.all(s[m:] < 1e-8 * s[0])


class TestReducedRankFB:
    def test_full_rank_is_fb11(self, rng):
        for n in (1, 3, 6):
            S = random_moments(rng, n)
            assert np.linalg.norm(fit_rfb(S, n).F_hat - fit_fb11(S).F_hat) < 1e-10

    def test_witness_positive_definite(self, rng):
        for n in (2, 4, 6):
            S = random_moments(rng, n)
            for m in range(1, n + 1):
                F = fit_rfb(S, m).F_hat
                W = np.linalg.inv(S.S11)
                assert np.linalg.eigvalsh(W - F.T @ W @ F).min() > 0

    def test_continuous_lyapunov_identity(self, rng):
        for n in (1, 3, 5, 8):
            S = random_moments(rng, n)
            F11 = fit_fb11(S).F_hat
            S11i = np.linalg.inv(S.S11)
            Fb = S.S11 @ F11.T @ S11i
            Ub = S.S11 - Fb @ S.S11 @ Fb.T
            Phi = -S.S00 @ S11i
            lhs = -Phi @ Ub + Ub @ (-Phi).T
            rhs = 2 * residual_backward(S, F11, S.S11)
            assert rel(lhs, rhs) < 1e-8

    def test_projector_ordering(self, rng):
        S = random_moments(rng, 6)
        j_fb = [criterion_j(S, fit_rfb(S, m).F_hat, S.S11) for m in range(1, 7)]
        j_ls = [_j_ls(S, fit_rls(S, m).F_hat) for m in range(1, 7)]
        assert np.all(np.diff(j_fb) <= 1e-12 * abs(j_fb[0]))
        assert np.all(np.diff(j_ls) <= 1e-12 * abs(j_ls[0]))

    def test_eigen_equivalence(self, rng):
        S = random_moments(rng, 5)
        half = np.real(sla.sqrtm(S.S11))
        ih = np.linalg.inv(half)
        F_ls = S.S10 @ np.linalg.inv(S.S00)
        R = ih @ F_ls @ S.S01 @ ih
        L = S.S10 @ np.linalg.inv(S.S00) @ S.S01 @ np.linalg.inv(S.S11)
        a = np.sort(np.linalg.eigvalsh(0.5 * (R + R.T)))
        b = np.sort(np.real(np.linalg.eigvals(L)))
        np.testing.assert_allclose(a, b, atol=1e-8)

    def test_tie_warning(self):
        S = SampleMoments.from_matrices(np.eye(3), np.eye(3), np.diag([0.5, 0.5, 0.2]))
        est = fit_rfb(S, 1)
        assert len(est.warnings) == 1 and "tie" in est.warnings[0]
        assert est.is_stable()
        assert fit_rfb(S, 2).warnings == []
        assert fit_rls(S, 1).warnings

    def test_reduced_rank_gap_closes(self):
        model = build_paper_f(1)

        def gap(T, seed):
            S = moments_from_trajectory(simulate(model, T, seed))
            return np.sqrt(T) * np.linalg.norm(fit_rls(S, 3).F_hat - fit_rfb(S, 3).F_hat)

        short = np.median([gap(24, s) for s in range(50)])
        long = np.median([gap(600, s) for s in range(50)])
        assert long < short


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8), short=st.booleans())
def test_rfb_is_always_stable(seed, n, short):
    r = np.random.default_rng(seed)
    model = random_stable_model(r, n, rho=r.uniform(0.5, 0.999))
    T = n + 2 if short else 10 * n
    S = moments_from_trajectory(simulate(model, T, seed, init="zero" if short else "stationary"))
    assert fit_fb11(S).spectral_radius < 1
    for m in range(1, n + 1):
        est = fit_rfb(S, m)
        assert spectral_radius(est.F_hat) < 1
        assert est.stability_margin > 0


class TestDispatchAndRank:
    def test_aliases(self):
        assert as_method("fb") is Method.FB11
        assert as_method("rfb") is Method.RFB
        assert as_method(Method.LS) is Method.LS
        with pytest.raises(InvalidInput):
            as_method("ridge")

    def test_fit_dispatch(self, rng):
        S = random_moments(rng, 3)
        assert fit(S, "ls").method is Method.LS
        assert fit(S, "bls").method is Method.BLS
        assert fit(S, "fb_sylvester").method is Method.FB_SYLVESTER
        assert fit(S, "rfb").rank == 3
        assert fit(S, "rls", rank=2).rank == 2
        assert fit(S, "fb").fit_seconds >= 0

    @pytest.mark.parametrize("m", [0, 4, -1, 1.5, "2"])
    def test_invalid_rank(self, rng, m):
        S = random_moments(rng, 3)
        with pytest.raises(InvalidRank):
            fit_rfb(S, m)

    def test_singular_moments(self):
        S = SampleMoments.from_matrices(np.diag([1.0, 0.0]), np.eye(2), np.zeros((2, 2)))
        with pytest.raises(NotPositiveDefinite):
            fit_ls(S)


class TestEstimateSerialization:
    def test_json_round_trip(self, rng):
        S = random_moments(rng, 3)
        est = fit_rls(S, 2)
        d = json.loads(json.dumps(est.to_dict()))
        assert set(d) == {"method", "n", "rank", "f_hat", "q_hat", "spectral_radius",
                          "fit_seconds", "warnings"}
        assert d["f_hat"] == est.F_hat.ravel().tolist()
        back = Estimate.from_dict(d)
        np.testing.assert_array_equal(back.F_hat, est.F_hat)
        np.testing.assert_array_equal(back.Q_hat, est.Q_hat)
        assert back.method is Method.RLS and back.rank == 2

    def test_no_q_hat(self, rng):
        d = fit_rfb(random_moments(rng, 2), 1).to_dict()
        assert "q_hat" not in d


def test_design_model_rfb_on_true_moments():
    # population moments: RFB recovers the rank-3 truth exactly
    model = build_paper_f(1)
    Pi = stationary_covariance(model)
    S = SampleMoments.from_matrices(Pi, Pi, model.F @ Pi)
    assert rel(fit_rfb(S, 3).F_hat, model.F) < 1e-8
    assert rel(fit_rls(S, 3).F_hat, model.F) < 1e-8
