import math
import warnings

import numpy as np
import pytest

from aamodels.data import DataMatrix
from aamodels.errors import FormatError, NothingToFit, ShapeError, SpecError
from aamodels.indices import Contiguity, ProjectedVariance
from aamodels.model import (
    AutoAssociativeModel,
    check_additive,
    evaluate_F,
    fit,
    information_ratio,
    load,
    reconstruct,
    save,
    transform,
)
from aamodels.regressors import RegressorSpec
from aamodels.synthetic import GeneratorSpec, generate, pca_oracle

LINEAR = RegressorSpec("linear")
SPLINE = RegressorSpec("spline", knot_count=4)
KERNEL = RegressorSpec("kernel", bandwidth=0.3)


@pytest.fixture(scope="module")
def s_shape():
    return generate(GeneratorSpec("s_shape", n=100, noise_sd=0.05, seed=0))


@pytest.fixture(scope="module")
def random5():
    rng = np.random.default_rng(0)
    return DataMatrix(rng.normal(size=(80, 5)) @ rng.normal(size=(5, 5)))


def test_rank2_linear_exact():
    X = generate(GeneratorSpec("linear_subspace", n=60, ambient_p=5, rank=2, seed=1))
    model, report = fit(X, 2, ProjectedVariance(), LINEAR)
    assert model.q_curve[2] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(report.residuals)) <= 1e-8


def test_full_dimension_linear_exact(random5):
    model, report = fit(random5, 5, ProjectedVariance(), LINEAR)
    assert np.max(np.linalg.norm(report.residuals, axis=1)) <= 1e-8
    assert model.q_curve[-1] == pytest.approx(1.0, abs=1e-10)


def test_s_shape_beats_pca_q1(s_shape):
    model, _ = fit(s_shape, 1, Contiguity(), SPLINE)
    _, ratios = pca_oracle(s_shape, 1)
    assert model.q_curve[1] > ratios[1]


def test_early_stop_on_zero_variance():
    X = generate(GeneratorSpec("linear_subspace", n=40, ambient_p=4, rank=2, seed=2))
    model, report = fit(X, 4, ProjectedVariance(), LINEAR)
    assert report.status == "stopped_early" and report.stopped_at == 2
    assert model.d == 2
    np.testing.assert_allclose(report.q_curve, [0.0, model.q_curve[1], 1.0, 1.0, 1.0], atol=1e-12)


def test_q_threshold(s_shape):
    model, report = fit(s_shape, 2, ProjectedVariance(), LINEAR, q_threshold=0.5)
    assert model.d == 1 and report.status == "threshold"


def test_fit_errors():
    with pytest.raises(ShapeError):
        fit(DataMatrix(np.eye(3)), 4)
    with pytest.raises(NothingToFit):
        fit(DataMatrix(np.ones((5, 2))), 1)
    with pytest.raises(SpecError) as info:
        fit(DataMatrix(np.random.default_rng(0).normal(size=(6, 2))), 1,
            ProjectedVariance(), RegressorSpec("spline", knot_count=4))
    assert info.value.step == "R"


def test_transform_reproduces_training(s_shape):
    for spec in (LINEAR, SPLINE, KERNEL):
        model, report = fit(s_shape, 2, Contiguity(), spec)
        np.testing.assert_allclose(transform(model, s_shape.values), report.principal_values, atol=1e-10)


def test_transform_mean_is_zero(random5):
    model, _ = fit(random5, 3, ProjectedVariance(), LINEAR)
    np.testing.assert_allclose(transform(model, model.mean), np.zeros((1, 3)), atol=1e-12)


def test_linear_transform_is_projection(random5):
    model, _ = fit(random5, 3, ProjectedVariance(), LINEAR)
    centered = random5.values - model.mean
    np.testing.assert_allclose(transform(model, random5.values), centered @ np.array(model.axes).T, atol=1e-10)


def test_transform_shape_error(random5):
    model, _ = fit(random5, 2)
    with pytest.raises(ShapeError):
        transform(model, np.ones((3, 4)))
    with pytest.raises(ShapeError):
        reconstruct(model, np.ones((3, 3)))


def test_reconstruct_zero_is_mean(random5):
    model, _ = fit(random5, 3, ProjectedVariance(), LINEAR)
    np.testing.assert_allclose(reconstruct(model, np.zeros((1, 3)))[0], model.mean)


@pytest.mark.parametrize("spec", [LINEAR, SPLINE, KERNEL], ids=lambda s: s.kind)
def test_expansion_identity(s_shape, spec):
    model, report = fit(s_shape, 1, Contiguity(), spec)
    X = s_shape.values
    err = X - reconstruct(model, transform(model, X))
    n = X.shape[0]
    sigma2 = np.sum(report.residuals**2) / n
    assert np.sum(err**2) == pytest.approx(n * sigma2, abs=1e-8)
    # per-sample telescoping: X_i - mean = sum_k s^k(Y^k_i) + R^d_i
    lhs = X - model.mean
    rhs = reconstruct(model, report.principal_values) - model.mean + report.residuals
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_full_linear_is_identity(random5):
    model, _ = fit(random5, 5, ProjectedVariance(), LINEAR)
    X = random5.values
    np.testing.assert_allclose(reconstruct(model, transform(model, X)), X, atol=1e-8)


def test_F_zero_dimensional():
    model = AutoAssociativeModel(mean=np.array([1.0, 2.0]), axes=[], regressors=[], q_curve=[0.0])
    np.testing.assert_allclose(evaluate_F(model, np.array([3.0, 5.0])), [2.0, 3.0])


@pytest.mark.parametrize("spec", [LINEAR, SPLINE, KERNEL], ids=lambda s: s.kind)
def test_reconstructions_lie_on_manifold(spec):
    X = generate(GeneratorSpec("s_shape", n=100, noise_sd=0.05, seed=3, ambient_p=3))
    model, report = fit(X, 2, Contiguity(), spec)
    rng = np.random.default_rng(4)
    lo, hi = report.principal_values.min(axis=0), report.principal_values.max(axis=0)
    Y = rng.uniform(lo, hi, size=(50, 2))
    assert np.max(np.linalg.norm(evaluate_F(model, reconstruct(model, Y)), axis=1)) <= 1e-8


def test_F_linear_formula(random5):
    model, _ = fit(random5, 2, ProjectedVariance(), LINEAR)
    x = np.random.default_rng(5).normal(size=5) * 3
    c = x - model.mean
    expected = c - sum((a @ c) * a for a in model.axes)
    np.testing.assert_allclose(evaluate_F(model, x), expected, atol=1e-10)


def test_information_ratio_recomputed(s_shape):
    model, report = fit(s_shape, 2, Contiguity(), SPLINE)
    q = information_ratio(model)
    assert q[0] == 0.0
    total = math.fsum((report.residual_history[0] ** 2).ravel())
    for k in range(1, 3):
        resid = math.fsum((report.residual_history[k] ** 2).ravel())
        assert q[k] == pytest.approx(1 - resid / total, abs=1e-12)
        assert report.steps[k - 1].residual_variance == pytest.approx(
            (1 - q[k]) * report.total_variance, abs=1e-10)


def test_information_ratio_full_linear(random5):
    model, _ = fit(random5, 5, ProjectedVariance(), LINEAR)
    q = information_ratio(model)
    assert q[0] == 0.0 and q[-1] == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(q) >= -1e-10)


def test_pca_model_is_additive(random5):
    model, _ = fit(random5, 3, ProjectedVariance(), LINEAR)
    rep = check_additive(model)
    assert rep.additive and rep.max_deviation <= 1e-10


@pytest.mark.parametrize("spec", [SPLINE, KERNEL], ids=lambda s: s.kind)
def test_condition_half_always_holds(spec):
    X = generate(GeneratorSpec("s_shape", n=100, noise_sd=0.05, seed=6, ambient_p=3))
    model, _ = fit(X, 3, Contiguity(), spec)
    assert check_additive(model).max_lower_deviation <= 1e-8


def test_curved_model_not_additive():
    # s^1 bends into the direction later chosen as a^2
    X = generate(GeneratorSpec("s_shape", n=100, noise_sd=0.01, seed=7, ambient_p=3))
    model, _ = fit(X, 2, Contiguity(), SPLINE)
    rep = check_additive(model)
    assert not rep.additive
    assert rep.deviation[1, 0] > 0.1
    assert rep.max_lower_deviation <= 1e-8


def test_residual_orthogonality_all_kinds(s_shape):
    for spec in (LINEAR, SPLINE, KERNEL):
        for index in (ProjectedVariance(), Contiguity()):
            model, report = fit(s_shape, 2, index, spec)
            A = np.array(model.axes)
            for k in (1, 2):
                assert np.max(np.abs(report.residual_history[k] @ A[:k].T)) <= 1e-8


def test_kernel_warns_when_q_decreases():
    X = generate(GeneratorSpec("two_clusters", n=40, noise_sd=0.0, seed=8, ambient_p=3, spread=0.3))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model, _ = fit(X, 3, ProjectedVariance(), RegressorSpec("kernel", bandwidth=5.0))
    decreased = np.any(np.diff(model.q_curve) < 0)
    assert decreased == any("decreased" in str(w.message) for w in caught)


# centering and non-correlation

def test_linear_centering_and_noncorrelation(random5):
    model, report = fit(random5, 5, ProjectedVariance(), LINEAR)
    Y = report.principal_values
    assert np.max(np.abs(Y.mean(axis=0))) <= 1e-8
    C = np.corrcoef(Y[:, :4].T)
    assert np.max(np.abs(C - np.diag(np.diag(C)))) <= 1e-8


def test_spline_centering_and_noncorrelation():
    X = generate(GeneratorSpec("s_shape", n=120, noise_sd=0.05, seed=9, ambient_p=4))
    model, report = fit(X, 3, Contiguity(), SPLINE)
    Y = report.principal_values
    for k in range(3):
        assert abs(Y[:, k].mean()) <= 1e-8
        assert np.max(np.abs(report.residual_history[k + 1].mean(axis=0))) <= 1e-8
        fitted = model.regressors[k](Y[:, k])
        assert np.max(np.abs(fitted.mean(axis=0))) <= 1e-8
    for k in range(2):
        assert abs(np.corrcoef(Y[:, k], Y[:, k + 1])[0, 1]) <= 1e-8


# persistence

@pytest.mark.parametrize("spec", [LINEAR, SPLINE, KERNEL], ids=lambda s: s.kind)
def test_round_trip(tmp_path, s_shape, spec):
    model, _ = fit(s_shape, 2, Contiguity(symmetrize=True), spec)
    path = tmp_path / "m.json"
    save(model, path)
    again = load(path)
    np.testing.assert_array_equal(again.q_curve, model.q_curve)
    assert again.index == model.index and again.regressor_spec == model.regressor_spec
    probes = np.random.default_rng(10).normal(size=(50, 2))
    np.testing.assert_array_equal(again.transform(probes), model.transform(probes))
    np.testing.assert_array_equal(again.reconstruct(probes), model.reconstruct(probes))


def test_load_truncated(tmp_path, s_shape):
    model, _ = fit(s_shape, 1)
    path = tmp_path / "m.json"
    save(model, path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(FormatError):
        load(path)


def test_load_version_mismatch(tmp_path, s_shape):
    model, _ = fit(s_shape, 1)
    d = model.to_dict()
    d["version"] = 99
    with pytest.raises(FormatError):
        AutoAssociativeModel.from_dict(d)
    d["version"] = 1
    del d["regressors"][0]["axis"]
    with pytest.raises(FormatError):
        AutoAssociativeModel.from_dict(d)


def test_kernel_metrics_reported(s_shape):
    _, report = fit(s_shape, 2, Contiguity(), KERNEL)
    assert all(np.isfinite(s.centering) for s in report.steps)
    assert len(report.correlations()) == 1
    _, report = fit(s_shape, 2, Contiguity(), SPLINE)
    assert max(s.centering for s in report.steps) <= 1e-8
    assert abs(report.correlations()[0]) <= 1e-8
