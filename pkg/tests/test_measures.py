import math

import numpy as np
import pytest
from scipy import special

from wncalc import measures
from wncalc.measures import (
    MeasureModel,
    SamplerValidationError,
    check_positive_definite,
    grey_char,
    integrability_check,
    ls_inclusion_check,
    mittag_leffler,
    poisson_char,
    sample,
    validate_sampler,
)
from wncalc.weights import from_callable, power_exp, sqrt_log_weight


class TestMittagLeffler:
    def test_lambda_one_is_the_exponential(self):
        for t in (0.0, 0.5, 3.0, 20.0):
            assert mittag_leffler(1.0, t) == pytest.approx(math.exp(-t), rel=1e-12)

    def test_lambda_half_closed_form(self):
        # E_{1/2}(-t) = e^{t^2} erfc(t)
        for t in (0.1, 1.0, 4.0, 10.0):
            want = math.exp(t * t) * special.erfc(t)
            assert mittag_leffler(0.5, t) == pytest.approx(want, rel=1e-10)

    def test_values_are_probabilistic(self):
        ts = np.linspace(0.0, 30.0, 40)
        for lam in (0.3, 0.7):
            vals = [mittag_leffler(lam, float(t)) for t in ts]
            assert all(0.0 < v <= 1.0 for v in vals)
            assert all(b < a for a, b in zip(vals, vals[1:]))  # decreasing

    def test_range_and_domain_errors(self):
        with pytest.raises(ValueError):
            mittag_leffler(0.5, 51.0)
        with pytest.raises(ValueError):
            mittag_leffler(0.0, 1.0)
        with pytest.raises(ValueError):
            mittag_leffler(0.5, -1.0)


class TestCharacteristicFunctionals:
    def test_grey_lambda_one_is_gaussian_with_doubled_variance(self):
        xi = np.array([0.3, -0.4])
        assert grey_char(1.0, xi) == pytest.approx(
            math.exp(-float(np.sum(xi * xi))), rel=1e-12
        )

    def test_poisson_char_single_mode(self):
        val = poisson_char(np.array([0.7]), intensity=2.0)
        want = np.exp(2.0 * (np.exp(0.7j) - 1.0))
        assert val == pytest.approx(complex(want), rel=1e-12)

    def test_positive_definite_gaussian(self):
        model = MeasureModel(kind="gaussian", d=4)
        rng = np.random.default_rng(0)
        pts = rng.standard_normal((10, 4)) * 0.5
        rep = check_positive_definite(model.char_fn, pts)
        assert rep.verdict == "consistent"
        assert rep.min_eigenvalue >= -rep.tol

    def test_non_positive_definite_function_is_flagged(self):
        def fake_char(xi):
            return 1.0 - float(np.sum(xi * xi))  # not a characteristic function

        rng = np.random.default_rng(1)
        pts = rng.standard_normal((8, 2)) * 2.0
        rep = check_positive_definite(fake_char, pts)
        assert rep.verdict == "violated"


class TestSamplers:
    def test_sampling_is_deterministic_in_the_seed(self):
        m = MeasureModel(kind="grey", d=3, lam=0.6, sampler_seed=5)
        assert np.array_equal(sample(m, 100), sample(m, 100))

    def test_stable_laplace_transform(self):
        # one-sided stable S: E[exp(-u S)] = exp(-u^lam)
        rng = np.random.default_rng(2)
        lam = 0.5
        S = measures._stable_one_sided(lam, 200_000, rng)
        for u in (0.5, 1.0, 2.0):
            emp = np.exp(-u * S)
            se = float(np.std(emp) / math.sqrt(len(S)))
            assert float(np.mean(emp)) == pytest.approx(
                math.exp(-(u**lam)), abs=4 * se
            )

    def test_grey_sampler_validates_against_its_functional(self):
        m = MeasureModel(kind="grey", d=4, lam=0.6, sampler_seed=3)
        rep = validate_sampler(m, n=50_000)
        assert rep["worst_sigma"] <= 4.0

    def test_validation_catches_a_broken_sampler(self, monkeypatch):
        # a sampler off by a scale factor must fail the 4-sigma gate
        m = MeasureModel(kind="grey", d=4, lam=0.6, sampler_seed=4)
        true_sample = measures.sample
        monkeypatch.setattr(
            measures, "sample", lambda model, n, rng=None: 1.5 * true_sample(model, n, rng)
        )
        with pytest.raises(SamplerValidationError):
            validate_sampler(m, n=50_000)


class TestIntegrability:
    def test_trivial_weight_converges_to_one(self):
        m = MeasureModel(kind="gaussian", d=5, sampler_seed=6)
        u1 = from_callable("one", lambda r: 0.0, r_max=1e30)
        rep = integrability_check(m, u1, p=1.0, n=20_000)
        assert rep.verdict == "converged"
        assert rep.estimate == pytest.approx(1.0, rel=1e-12)

    def test_gaussian_exp_x_squared_diverges(self):
        m = MeasureModel(kind="gaussian", d=1, sampler_seed=7)
        u_bad = from_callable("exp2r", lambda r: 2.0 * r, r_max=1e30)
        rep = integrability_check(m, u_bad, p=0.0, n=50_000)
        assert rep.verdict == "diverging"

    def test_poisson_with_admissible_weight_converges(self):
        m = MeasureModel(kind="poisson", d=10, intensity=1.0, sampler_seed=8)
        rep = integrability_check(m, sqrt_log_weight(2), p=1.0, n=50_000)
        assert rep.verdict == "converged"

    def test_threaded_run_matches_serial_bytes(self):
        m = MeasureModel(kind="grey", d=6, lam=0.5, sampler_seed=9)
        u = power_exp(0.5)
        r1 = integrability_check(m, u, p=1.0, n=20_000, threads=1, validate=False)
        r8 = integrability_check(m, u, p=1.0, n=20_000, threads=8, validate=False)
        assert r1.batch_means == r8.batch_means
        assert r1.estimate == r8.estimate

    def test_batch_verdict_grading(self):
        assert measures._batch_verdict(np.ones(8))[0] == "converged"
        assert measures._batch_verdict(np.arange(1.0, 9.0))[0] == "diverging"
        wobble = np.array([1.0, 1.3, 0.8, 1.2, 0.9, 1.25, 0.85, 1.1])
        assert measures._batch_verdict(wobble)[0] == "inconclusive"


class TestMomentCheck:
    def test_bounded_observable_has_finite_moments(self):
        from wncalc.chaos import FiniteGaussianModel, chaos_vector

        model = FiniteGaussianModel(d=3, N=2)
        phi = chaos_vector(model, {(1, 0, 0): 1.0, (0, 0, 0): 2.0})
        m = MeasureModel(kind="gaussian", d=3, sampler_seed=10)
        reports = ls_inclusion_check(m, phi, s_list=[1.0, 2.0], n=40_000)
        assert [r.verdict for r in reports] == ["converged", "converged"]
        # E[|2 + Z|^2] = 4 + 1 for standard normal Z
        assert reports[1].estimate == pytest.approx(5.0, rel=0.05)
