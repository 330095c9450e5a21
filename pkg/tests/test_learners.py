import json

import numpy as np
import pytest

from conftest import random_hyperboloid
from krein.exceptions import (
    ConvergenceError,
    ParameterError,
    SingularShiftError,
)
from krein.geometry import (
    GeodesicBoundary,
    TorusPoint,
    geodesic_label,
    poincare_to_hyperboloid,
    riemannian_gaussian_sample,
)
from krein.kernels import (
    EuclideanGaussian,
    GeodesicGaussian,
    eval_kernel,
    gram,
    lin_comb,
)
from krein.krein_linalg import sym_eigh
from krein.learners import (
    KreinKrrModel,
    KsvmModel,
    LabeledDataset,
    _smo,
    accuracy,
    decision_scores,
    krr_fit,
    krr_predict,
    ksvm_fit,
    ksvm_predict,
    model_from_json,
    model_to_json,
    stationarity_residual,
)


def euclidean_dataset(rng, n, spread=1.0):
    points = tuple(rng.normal(scale=spread, size=2) for _ in range(n))
    targets = rng.normal(size=n)
    return LabeledDataset(points=points, targets=targets)


def two_cluster_dataset(rng, n_per_side=10, gap=4.0):
    left = [rng.normal(size=2) - [gap, 0.0] for _ in range(n_per_side)]
    right = [rng.normal(size=2) + [gap, 0.0] for _ in range(n_per_side)]
    points = tuple(left + right)
    targets = np.concatenate([-np.ones(n_per_side), np.ones(n_per_side)])
    return LabeledDataset(points=points, targets=targets)


def hyperbolic_classification_dataset(count=60, seed=3):
    center = poincare_to_hyperboloid_origin()
    points = riemannian_gaussian_sample(center, 0.6, count, seed)
    boundary = GeodesicBoundary(normal=[0.0, 0.0, 1.0], offset=0.0)
    targets = np.array([float(geodesic_label(p, boundary)) for p in points])
    return LabeledDataset(points=tuple(points), targets=targets)


def poincare_to_hyperboloid_origin():
    from krein.geometry import PoincarePoint

    return poincare_to_hyperboloid(PoincarePoint([0.0, 0.0]))


class TestKrrFit:
    def test_single_point_closed_form(self):
        data = LabeledDataset(points=(np.zeros(1),), targets=[2.0])
        model = krr_fit(EuclideanGaussian(1.0), data, 1.0)
        assert model.alpha == pytest.approx([1.0], abs=1e-15)

    def test_matches_independent_dense_solve(self, rng):
        data = euclidean_dataset(rng, 20)
        kernel = EuclideanGaussian(0.7)
        model = krr_fit(kernel, data, 0.3)
        k = gram(kernel, data.points).entries
        reference = np.linalg.solve(k + 20 * 0.3 * np.eye(20), data.targets)
        assert np.max(np.abs(model.alpha - reference)) <= 1e-10

    def test_indefinite_circle_gram_with_negative_c(self, rng):
        pts = tuple(TorusPoint([a]) for a in rng.uniform(0.0, 2.0 * np.pi, 10))
        kernel = GeodesicGaussian("torus", 0.1)
        data = LabeledDataset(points=pts, targets=rng.normal(size=10))
        c = -0.37
        model = krr_fit(kernel, data, c)
        k = gram(kernel, pts).entries
        residual = np.max(np.abs((k + 10 * c * np.eye(10)) @ model.alpha - data.targets))
        assert residual <= 1e-8

    def test_singular_shift_reports_eigenvalue(self, rng):
        # two near-duplicate far-apart points give a Gram essentially equal
        # to the identity, so c = -1/N collides with the eigenvalue 1
        points = (np.array([0.0, 0.0]), np.array([20.0, 0.0]))
        data = LabeledDataset(points=points, targets=[1.0, -1.0])
        with pytest.raises(SingularShiftError) as excinfo:
            krr_fit(EuclideanGaussian(1.0), data, -0.5)
        assert excinfo.value.eigenvalue == pytest.approx(1.0, abs=1e-8)

    def test_zero_c_rejected(self, rng):
        with pytest.raises(ParameterError):
            krr_fit(EuclideanGaussian(1.0), euclidean_dataset(rng, 3), 0.0)


class TestKrrPredict:
    def test_single_point_model_predicts_diagonal(self):
        data = LabeledDataset(points=(np.zeros(1),), targets=[2.0])
        model = krr_fit(EuclideanGaussian(1.0), data, 1.0)
        assert krr_predict(model, np.zeros(1)) == pytest.approx(1.0, abs=1e-15)

    def test_predictions_shrink_as_c_grows(self):
        # frozen instance: on PD kernels the fit contracts toward zero
        rng = np.random.default_rng(11)
        pts = tuple(rng.normal(size=2) for _ in range(12))
        data = LabeledDataset(points=pts, targets=rng.normal(size=12))
        kernel = EuclideanGaussian(0.5)
        query = np.array([0.25, -0.4])
        values = [
            abs(krr_predict(krr_fit(kernel, data, c), query))
            for c in (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_training_predictions_satisfy_normal_equation(self, rng):
        data = euclidean_dataset(rng, 15)
        kernel = EuclideanGaussian(1.0)
        c = 0.5
        model = krr_fit(kernel, data, c)
        predictions = np.array([krr_predict(model, p) for p in data.points])
        expected = data.targets - 15 * c * model.alpha
        assert np.max(np.abs(predictions - expected)) <= 1e-10


class TestStationarityResidual:
    def test_fitted_model_is_stationary(self, rng):
        data = LabeledDataset(points=(np.zeros(1),), targets=[2.0])
        model = krr_fit(EuclideanGaussian(1.0), data, 1.0)
        assert stationarity_residual(model, data) <= 1e-15

    def test_unfitted_alpha_is_not_stationary(self, rng):
        data = euclidean_dataset(rng, 10)
        kernel = EuclideanGaussian(1.0)
        bogus = KreinKrrModel(
            kernel=kernel, support=data.points, alpha=rng.normal(size=10), c=1.0
        )
        assert stationarity_residual(bogus, data) > 1e-3

    def test_invariant_under_joint_permutation(self, rng):
        data = euclidean_dataset(rng, 12)
        kernel = EuclideanGaussian(1.0)
        model = krr_fit(kernel, data, 0.7)
        perm = rng.permutation(12)
        permuted_data = LabeledDataset(
            points=tuple(data.points[i] for i in perm), targets=data.targets[perm]
        )
        permuted_model = KreinKrrModel(
            kernel=kernel,
            support=permuted_data.points,
            alpha=model.alpha[perm],
            c=model.c,
        )
        assert stationarity_residual(permuted_model, permuted_data) == pytest.approx(
            stationarity_residual(model, data), abs=1e-12
        )


class TestKsvmFit:
    def test_separable_pd_case_reaches_full_accuracy(self, rng):
        data = two_cluster_dataset(rng)
        model = ksvm_fit(EuclideanGaussian(0.5), data, 10.0)
        assert accuracy(model, data) == 1.0

    def test_psd_gram_reduces_to_classical_svm(self, rng):
        data = two_cluster_dataset(rng)
        kernel = EuclideanGaussian(0.5)
        model = ksvm_fit(kernel, data, 5.0)
        k = gram(kernel, data.points).entries
        beta, bias, _ = _smo(k, data.targets, np.full(20, 5.0), 1e-6, 1_000_000)
        assert np.max(np.abs(model.alpha - beta * data.targets)) <= 1e-6
        assert model.bias == pytest.approx(bias, abs=1e-6)
        mine = decision_scores(model, data.points)
        classical = k @ (beta * data.targets) + bias
        assert np.max(np.abs(mine - classical)) <= 1e-6

    def test_hyperbolic_decision_values_match_direct_expansion(self):
        data = hyperbolic_classification_dataset()
        kernel = GeodesicGaussian("hyperbolic", 1.0)
        model = ksvm_fit(kernel, data, 10.0)
        for x in data.points[:10]:
            direct = sum(
                a * eval_kernel(kernel, s, x) for a, s in zip(model.alpha, model.support)
            ) + model.bias
            score, _ = ksvm_predict(model, x)
            assert score == pytest.approx(direct, abs=1e-8)

    def test_back_transformation_identity(self, rng):
        # on every fit, K alpha must equal K~ (beta * y) for the flipped
        # matrix K~ the solver actually used
        circle_pts = tuple(TorusPoint([a]) for a in rng.uniform(0.0, 2.0 * np.pi, 16))
        circle_data = LabeledDataset(
            points=circle_pts, targets=rng.choice([-1.0, 1.0], size=16)
        )
        cases = [
            (GeodesicGaussian("hyperbolic", 1.0), hyperbolic_classification_dataset(), 10.0),
            (GeodesicGaussian("torus", 0.09), circle_data, 5.0),
        ]
        for kernel, data, box in cases:
            model = ksvm_fit(kernel, data, box)
            k = gram(kernel, data.points).entries
            spectrum = sym_eigh(k)
            d, u = spectrum.eigenvalues, spectrum.eigenvectors
            sign_tol = 1e-12 * max(1.0, float(np.linalg.norm(k)))
            if np.all(d >= -sign_tol):
                ktil = k
            else:
                ktil = (u * np.abs(d)) @ u.T
                ktil = 0.5 * (ktil + ktil.T)
            beta, _, _ = _smo(
                ktil, data.targets, np.full(len(data), box), 1e-6, 1_000_000
            )
            assert np.max(np.abs(k @ model.alpha - ktil @ (beta * data.targets))) <= 1e-8

    def test_duplicated_point_with_halved_box_changes_nothing(self, rng):
        data = two_cluster_dataset(rng, n_per_side=7)
        kernel = EuclideanGaussian(0.4)
        n = len(data)
        base = ksvm_fit(kernel, data, 2.0)
        doubled = LabeledDataset(
            points=data.points + (data.points[0],),
            targets=np.concatenate([data.targets, [data.targets[0]]]),
        )
        box = np.full(n + 1, 2.0)
        box[0] = box[n] = 1.0
        split = ksvm_fit(kernel, doubled, box)
        grid = [rng.normal(scale=3.0, size=2) for _ in range(25)]
        assert np.max(
            np.abs(decision_scores(base, grid) - decision_scores(split, grid))
        ) <= 1e-6

    def test_kernel_and_box_rescaling_cancel(self, rng):
        data = two_cluster_dataset(rng)
        kernel = EuclideanGaussian(0.5)
        scale = 3.0
        base = ksvm_fit(kernel, data, 4.0)
        rescaled = ksvm_fit(lin_comb([kernel], [scale]), data, 4.0 / scale)
        assert np.max(
            np.abs(decision_scores(base, data.points) - decision_scores(rescaled, data.points))
        ) <= 1e-6

    def test_single_class_rejected(self, rng):
        points = tuple(rng.normal(size=2) for _ in range(4))
        data = LabeledDataset(points=points, targets=np.ones(4))
        with pytest.raises(ParameterError):
            ksvm_fit(EuclideanGaussian(1.0), data, 1.0)

    def test_non_binary_labels_rejected(self, rng):
        points = tuple(rng.normal(size=2) for _ in range(4))
        data = LabeledDataset(points=points, targets=[1.0, -1.0, 0.5, 1.0])
        with pytest.raises(ParameterError):
            ksvm_fit(EuclideanGaussian(1.0), data, 1.0)

    def test_iteration_budget_enforced(self, rng):
        data = two_cluster_dataset(rng)
        with pytest.raises(ConvergenceError):
            ksvm_fit(EuclideanGaussian(0.5), data, 10.0, max_iter=1)


class TestKsvmPredict:
    def test_antisymmetric_pair_scores_zero_at_midpoint(self):
        data = LabeledDataset(
            points=(np.array([1.0]), np.array([-1.0])), targets=[1.0, -1.0]
        )
        model = ksvm_fit(EuclideanGaussian(1.0), data, 10.0)
        score, label = ksvm_predict(model, np.array([0.0]))
        assert abs(score) <= 1e-12
        assert label == 1

    def test_label_is_sign_of_score(self, rng):
        data = two_cluster_dataset(rng)
        model = ksvm_fit(EuclideanGaussian(0.5), data, 10.0)
        for _ in range(20):
            x = rng.normal(scale=4.0, size=2)
            score, label = ksvm_predict(model, x)
            assert label == (1 if score >= 0.0 else -1)

    def test_space_mismatch_on_predict(self, rng):
        from krein.exceptions import SpaceMismatchError
        from krein.geometry import SpherePoint

        data = two_cluster_dataset(rng)
        model = ksvm_fit(EuclideanGaussian(0.5), data, 10.0)
        with pytest.raises(SpaceMismatchError):
            ksvm_predict(model, SpherePoint([1.0, 0.0, 0.0]))


class TestAccuracy:
    def test_perfect_model(self, rng):
        data = two_cluster_dataset(rng)
        model = ksvm_fit(EuclideanGaussian(0.5), data, 10.0)
        assert accuracy(model, data) == 1.0

    def test_constant_positive_model_on_negative_data(self, rng):
        points = tuple(rng.normal(size=2) for _ in range(6))
        data = LabeledDataset(points=points, targets=-np.ones(6))
        constant = KsvmModel(
            kernel=EuclideanGaussian(1.0),
            support=points,
            alpha=np.zeros(6),
            bias=1.0,
            box=1.0,
        )
        assert accuracy(constant, data) == 0.0

    def test_coin_flip_labels_against_constant_model(self, rng):
        n = 10_000
        points = tuple(rng.normal(size=1) for _ in range(n))
        labels = rng.choice([-1.0, 1.0], size=n)
        constant = KsvmModel(
            kernel=EuclideanGaussian(1.0),
            support=(np.zeros(1),),
            alpha=np.zeros(1),
            bias=1.0,
            box=1.0,
        )
        data = LabeledDataset(points=points, targets=labels)
        assert accuracy(constant, data) == pytest.approx(0.5, abs=0.02)


class TestModelSerialization:
    def test_krr_round_trip_preserves_predictions(self, rng):
        data = hyperbolic_classification_dataset(count=25, seed=9)
        kernel = GeodesicGaussian("hyperbolic", 1.0)
        model = krr_fit(kernel, data, 0.5)
        rebuilt = model_from_json(json.loads(json.dumps(model_to_json(model))))
        queries = random_hyperboloid(rng, 10)
        for x in queries:
            assert abs(krr_predict(rebuilt, x) - krr_predict(model, x)) <= 1e-12

    def test_ksvm_round_trip_preserves_predictions(self, rng):
        data = two_cluster_dataset(rng)
        model = ksvm_fit(EuclideanGaussian(0.5), data, 5.0)
        rebuilt = model_from_json(json.loads(json.dumps(model_to_json(model))))
        for _ in range(10):
            x = rng.normal(scale=3.0, size=2)
            assert abs(ksvm_predict(rebuilt, x)[0] - ksvm_predict(model, x)[0]) <= 1e-12

    def test_spd_space_round_trip(self, rng):
        mats = []
        for _ in range(6):
            base = rng.normal(size=(2, 2))
            mats.append(base @ base.T + 2.0 * np.eye(2))
        from krein.geometry import SpdPoint

        points = tuple(SpdPoint(m) for m in mats)
        data = LabeledDataset(points=points, targets=rng.normal(size=6))
        model = krr_fit(GeodesicGaussian("spd", 0.5), data, 1.0)
        rebuilt = model_from_json(json.loads(json.dumps(model_to_json(model))))
        query = SpdPoint(np.diag([2.0, 3.0]))
        assert krr_predict(rebuilt, query) == pytest.approx(
            krr_predict(model, query), abs=1e-12
        )

    def test_unknown_kind_rejected(self):
        with pytest.raises(ParameterError):
            model_from_json({"model": "mystery"})
