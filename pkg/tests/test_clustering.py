"""Тесты кластеризации FCM и NCM"""

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncmseg.core.clustering import (
    NumericError,
    compute_cbar,
    fcm_cost,
    fcm_fit,
    fcm_memberships,
    ncm_cost,
    ncm_fit,
    ncm_update_centers,
    ncm_update_memberships,
    quantile_centers
)
from ncmseg.core.validator import ValidationError
from ncmseg.models.config import NcmConfig, WeightForm
from ncmseg.models.state import FcmState, NcmState, StopReason


# ===== Независимые эталоны =====

def reference_memberships(data, centers, config):
    """Пошаговое вычисление T, I, F по одной точке без векторизации"""
    m = config.m
    p = 2.0 / (m - 1.0)
    if config.weight_form is WeightForm.PRINTED:
        a1, a2, a3 = 1.0 / config.w1, 1.0 / config.w2, 1.0 / config.w3
    else:
        a1, a2, a3 = (w ** (-m / (m - 1.0)) for w in (config.w1, config.w2, config.w3))

    t_rows, i_vals, f_vals = [], [], []
    for x in data:
        dist = [max(abs(x - c), config.distance_floor) for c in centers]
        order = sorted(range(len(centers)), key=lambda j: (dist[j], j))
        cbar = (centers[order[0]] + centers[order[1]]) / 2.0
        dbar = max(abs(x - cbar), config.distance_floor)

        t_raw = [a1 * d ** (-p) for d in dist]
        i_raw = a2 * dbar ** (-p)
        f_raw = a3 * config.delta ** (-p)
        k = 1.0 / (sum(t_raw) + i_raw + f_raw)

        t_rows.append([k * t for t in t_raw])
        i_vals.append(k * i_raw)
        f_vals.append(k * f_raw)

    return np.array(t_rows), np.array(i_vals), np.array(f_vals)


def reference_centers(data, t_rows, config):
    centers = []
    for j in range(len(t_rows[0])):
        weights = [(config.w1 * row[j]) ** config.m for row in t_rows]
        centers.append(sum(w * x for w, x in zip(weights, data)) / sum(weights))
    return np.array(centers)


def reference_fcm(data, centers, m=2.0, iterations=200):
    """Классический FCM по точкам"""
    centers = list(centers)
    for _ in range(iterations):
        u = []
        for x in data:
            dist = [max(abs(x - c), 1e-10) for c in centers]
            u.append([1.0 / sum((dist[i] / dist[k]) ** (2.0 / (m - 1.0)) for k in range(len(centers)))
                      for i in range(len(centers))])
        centers = [
            sum(u[n][i] ** m * data[n] for n in range(len(data))) / sum(u[n][i] ** m for n in range(len(data)))
            for i in range(len(centers))
        ]
    return np.array(centers)


def random_instance(seed):
    rng = np.random.default_rng(seed)
    clusters = int(rng.integers(2, 5))
    points = int(rng.integers(clusters, 201))
    data = rng.random(points)

    weights = rng.uniform(0.1, 1.0, size=3)
    weights = weights / weights.sum()
    config = NcmConfig(
        clusters=clusters,
        m=float(rng.uniform(1.5, 3.0)),
        w1=float(weights[0]),
        w2=float(weights[1]),
        w3=1.0 - float(weights[0]) - float(weights[1]),
        delta=float(rng.uniform(0.05, 0.3)),
        max_iter=30
    )
    return data, config


HAND_DATA = [0.1, 0.35, 0.6, 0.9]
HAND_CENTERS = [0.2, 0.8]


# ===== FCM =====

class TestFcm:

    def test_cost_zero_when_centers_on_points(self):
        state = FcmState(np.array([0.0, 1.0]), np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert fcm_cost([0.0, 1.0], state, 2.0) == 0.0

    def test_cost_single_center(self):
        state = FcmState(np.array([0.5]), np.ones((2, 1)))
        assert fcm_cost([0.0, 1.0], state, 2.0) == pytest.approx(0.5)

    def test_cost_shape_mismatch(self):
        state = FcmState(np.array([0.5]), np.ones((3, 1)))
        with pytest.raises(ValidationError):
            fcm_cost([0.0, 1.0], state, 2.0)

    def test_two_groups_converge(self):
        data = [0, 0, 0, 1, 1, 1]
        state = fcm_fit(data, clusters=2)
        reference = reference_fcm(data, quantile_centers(data, 2))

        assert np.sort(state.centers) == pytest.approx([0.0, 1.0], abs=1e-3)
        assert np.max(np.abs(np.sort(state.centers) - np.sort(reference))) < 1e-3
        assert state.converged

    def test_matches_reference_iteration(self, rng):
        data = np.concatenate([rng.normal(0.2, 0.03, 30), rng.normal(0.7, 0.05, 30)]).clip(0, 1)
        state = fcm_fit(data, clusters=2, eps=1e-12, max_iter=300)
        reference = reference_fcm(list(data), quantile_centers(data, 2), iterations=300)
        assert np.max(np.abs(np.sort(state.centers) - np.sort(reference))) < 1e-3

    def test_single_cluster_is_mean(self, rng):
        data = rng.random(20)
        state = fcm_fit(data, clusters=1)
        assert state.centers[0] == pytest.approx(data.mean(), abs=1e-12)
        assert np.all(state.memberships == 1.0)

    def test_memberships_rows_sum_to_one(self, rng):
        u = fcm_memberships(rng.random(50), [0.1, 0.5, 0.9], 2.0)
        assert np.max(np.abs(u.sum(axis=1) - 1.0)) < 1e-9

    def test_cost_non_increasing(self, rng):
        state = fcm_fit(rng.random(100), clusters=3, eps=1e-12)
        history = np.array(state.cost_history)
        assert np.all(history[1:] <= history[:-1] * (1 + 1e-7))
        assert state.converged == (state.stop_reason is StopReason.CENTER_TOL)

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            fcm_fit([0.1, 0.2], clusters=3)


# ===== NCM: отдельные шаги =====

class TestComputeCbar:

    def test_top_two(self):
        assert compute_cbar([0.7, 0.2, 0.1], [0.1, 0.5, 0.9]) == pytest.approx(0.3)

    def test_tie_goes_to_lowest_index(self):
        assert compute_cbar([0.5, 0.5, 0.0], [0.2, 0.4, 0.6]) == pytest.approx(0.3)

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=2))
    def test_two_clusters_always_midpoint(self, t_row):
        assert compute_cbar(t_row, [0.25, 0.75]) == pytest.approx(0.5)

    def test_single_cluster_rejected(self):
        with pytest.raises(ValidationError):
            compute_cbar([1.0], [0.5])


class TestNcmMemberships:

    @pytest.mark.parametrize('form', list(WeightForm))
    def test_hand_instance(self, form):
        config = NcmConfig(clusters=2, weight_form=form)
        t, i, f = ncm_update_memberships(HAND_DATA, HAND_CENTERS, config)
        t_ref, i_ref, f_ref = reference_memberships(HAND_DATA, HAND_CENTERS, config)

        assert np.max(np.abs(t - t_ref)) < 1e-12
        assert np.max(np.abs(i - i_ref)) < 1e-12
        assert np.max(np.abs(f - f_ref)) < 1e-12

    @pytest.mark.parametrize('form', list(WeightForm))
    def test_hand_instance_full_cycle(self, form):
        config = NcmConfig(clusters=2, weight_form=form)
        t, _, _ = ncm_update_memberships(HAND_DATA, HAND_CENTERS, config)
        t_ref, _, _ = reference_memberships(HAND_DATA, HAND_CENTERS, config)

        centers = ncm_update_centers(HAND_DATA, t, config)
        assert np.max(np.abs(centers - reference_centers(HAND_DATA, t_ref, config))) < 1e-12

    def test_default_config_uses_printed_formulas(self):
        config = NcmConfig(clusters=2)
        t, i, f = ncm_update_memberships(HAND_DATA, HAND_CENTERS, config)

        # m = 2: показатель 2/(m-1) = 2, веса 0.75, 0.125, 0.125, delta = 0.1
        for n, x in enumerate(HAND_DATA):
            d1, d2 = abs(x - 0.2), abs(x - 0.8)
            dbar = abs(x - 0.5)
            k = 1.0 / (d1 ** -2 / 0.75 + d2 ** -2 / 0.75 + dbar ** -2 / 0.125 + 0.1 ** -2 / 0.125)

            assert t[n, 0] == pytest.approx(k / 0.75 * d1 ** -2, abs=1e-12)
            assert t[n, 1] == pytest.approx(k / 0.75 * d2 ** -2, abs=1e-12)
            assert i[n] == pytest.approx(k / 0.125 * dbar ** -2, abs=1e-12)
            assert f[n] == pytest.approx(k / 0.125 * 0.1 ** -2, abs=1e-12)

        # x = 0.1: K = 1 / (133.33 + 2.72 + 50 + 800)
        assert f[0] == pytest.approx(800.0 / (400.0 / 3.0 + 400.0 / 147.0 + 850.0), rel=1e-12)

    def test_symmetric_point(self):
        config = NcmConfig(clusters=2, w1=1 / 3, w2=1 / 3, w3=1 / 3, delta=0.25)
        t, _, _ = ncm_update_memberships([0.5], [0.25, 0.75], config)
        assert t[0, 0] == pytest.approx(t[0, 1], abs=1e-15)

    def test_point_on_center(self):
        config = NcmConfig(clusters=3)
        t, i, f = ncm_update_memberships([0.5], [0.1, 0.5, 0.9], config)
        assert t[0, 1] == pytest.approx(1.0, abs=1e-9)
        assert np.isfinite(t).all() and np.isfinite(i).all() and np.isfinite(f).all()

    def test_coincident_centers_are_finite(self):
        config = NcmConfig(clusters=2)
        t, i, f = ncm_update_memberships([0.3, 0.3, 0.6], [0.3, 0.3], config)
        assert np.isfinite(t).all()
        assert np.max(np.abs(t.sum(axis=1) + i + f - 1.0)) < 1e-9

    def test_single_center_rejected(self):
        with pytest.raises(ValidationError):
            ncm_update_memberships([0.1], [0.5], NcmConfig(clusters=2))

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(0, 1), min_size=1, max_size=40),
        st.lists(st.floats(0, 1), min_size=2, max_size=5),
        st.sampled_from(list(WeightForm))
    )
    def test_normalization(self, data, centers, form):
        config = NcmConfig(clusters=len(centers), weight_form=form)
        t, i, f = ncm_update_memberships(data, centers, config)

        sums = t.sum(axis=1) + i + f
        assert np.max(np.abs(sums - 1.0)) < 1e-9
        for values in (t, i, f):
            assert values.min() >= 0.0 and values.max() <= 1.0 + 1e-12


class TestNcmCenters:

    def test_equal_columns_give_mean(self, rng):
        data = rng.random(10)
        centers = ncm_update_centers(data, np.full((10, 3), 0.2), NcmConfig(clusters=3))
        assert np.allclose(centers, data.mean(), atol=1e-12)

    def test_one_hot_columns_give_group_means(self):
        data = np.array([0.1, 0.2, 0.7, 0.9])
        t = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float)
        centers = ncm_update_centers(data, t, NcmConfig(clusters=2))
        assert centers == pytest.approx([0.15, 0.8], abs=1e-12)

    def test_matches_direct_summation(self, rng):
        data = rng.random(15)
        t = rng.random((15, 3)) / 3
        config = NcmConfig(clusters=3)
        centers = ncm_update_centers(data, t, config)
        assert np.max(np.abs(centers - reference_centers(list(data), t.tolist(), config))) < 1e-12

    def test_empty_cluster_reseeded(self):
        data = np.array([0.1, 0.2, 0.3])
        t = np.array([[1.0, 0.0], [0.9, 0.0], [0.2, 0.0]])
        centers = ncm_update_centers(data, t, NcmConfig(clusters=2))
        # точка с наименьшей максимальной степенью - третья
        assert centers[1] == pytest.approx(0.3)


class TestNcmCost:

    def test_zero_memberships(self):
        state = NcmState(np.array([0.2, 0.8]), np.zeros((3, 2)), np.zeros(3), np.zeros(3), np.zeros(3))
        assert ncm_cost([0.1, 0.5, 0.9], state, NcmConfig(clusters=2)) == 0.0

    def test_pure_falsity(self):
        config = NcmConfig(clusters=2)
        n = 5
        state = NcmState(np.array([0.2, 0.8]), np.zeros((n, 2)), np.zeros(n), np.ones(n), np.zeros(n))
        expected = n * config.delta ** 2 * config.w3 ** 2
        assert ncm_cost(np.linspace(0, 1, n), state, config) == pytest.approx(expected, rel=1e-12)

    def test_recomputation_matches_history(self, rng):
        data = rng.random(60)
        config = NcmConfig(clusters=3)
        state = ncm_fit(data, config)
        assert abs(ncm_cost(data, state, config) - state.final_cost) < 1e-12

    def test_shape_mismatch(self):
        state = NcmState(np.array([0.2, 0.8]), np.zeros((2, 2)), np.zeros(2), np.zeros(2), np.zeros(2))
        with pytest.raises(ValidationError):
            ncm_cost([0.1, 0.5, 0.9], state, NcmConfig(clusters=2))


# ===== NCM: полный цикл =====

class TestNcmFit:

    def test_two_groups(self, rng):
        low = np.clip(rng.normal(0.1, 0.01, 50), 0, 1)
        high = np.clip(rng.normal(0.9, 0.01, 50), 0, 1)
        state = ncm_fit(np.concatenate([low, high]), NcmConfig(clusters=2))

        centers = np.sort(state.centers)
        assert abs(centers[0] - low.mean()) < 0.02
        assert abs(centers[1] - high.mean()) < 0.02

    def test_repeated_values(self):
        values = [0.1, 0.45, 0.8]
        data = np.repeat(values, 20)
        state = ncm_fit(data, NcmConfig(clusters=3, eps=1e-3))

        assert np.sort(state.centers) == pytest.approx(values, abs=1e-6)
        assert state.final_cost < 1e-6

    def test_deterministic(self, rng):
        data = rng.random(150)
        first = ncm_fit(data, NcmConfig(clusters=4))
        second = ncm_fit(data, NcmConfig(clusters=4))

        assert np.array_equal(first.centers, second.centers)
        assert np.array_equal(first.t_memb, second.t_memb)
        assert first.cost_history == second.cost_history
        assert first.stop_reason is second.stop_reason

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            ncm_fit([0.1, 0.2], NcmConfig(clusters=3))

    def test_non_convergence_is_flagged(self, rng):
        state = ncm_fit(rng.random(100), NcmConfig(clusters=4, max_iter=1, eps=1e-12))
        assert state.iterations == 1
        assert state.stop_reason is StopReason.MAX_ITER
        assert not state.converged

    @pytest.mark.parametrize('seed', [7, 11])
    def test_cost_stall_is_not_converged(self, seed, caplog):
        data, config = random_instance(seed)
        config = config.with_updates(weight_form='stationary')

        with caplog.at_level(logging.WARNING, logger='ncmseg.core.clustering'):
            state = ncm_fit(data, config)

        assert state.stop_reason is StopReason.COST_STALL
        assert not state.converged
        assert state.iterations < config.max_iter
        assert any(record.levelno == logging.WARNING for record in caplog.records)

        history = np.array(state.cost_history)
        assert np.all(history[1:] <= history[:-1] * (1 + 1e-7))

    def test_nan_input_rejected(self):
        with pytest.raises(ValidationError):
            ncm_fit([0.1, float('nan'), 0.3], NcmConfig(clusters=2))

    @pytest.mark.parametrize('seed', range(100))
    def test_random_instances_normalized_and_monotone(self, seed):
        data, config = random_instance(seed)
        state = ncm_fit(data, config)

        assert np.max(np.abs(state.membership_sums() - 1.0)) < 1e-9
        history = np.array(state.cost_history)
        assert np.all(history[1:] <= history[:-1] * (1 + 1e-7))
        assert state.converged == (state.stop_reason is StopReason.CENTER_TOL)

    @pytest.mark.parametrize('seed', range(20))
    def test_every_iteration_normalized(self, seed):
        data, config = random_instance(seed)
        centers = quantile_centers(data, config.clusters)
        for _ in range(config.max_iter):
            t, i, f = ncm_update_memberships(data, centers, config)
            assert np.max(np.abs(t.sum(axis=1) + i + f - 1.0)) < 1e-9
            centers = ncm_update_centers(data, t, config)

    @pytest.mark.parametrize('seed', range(10))
    def test_shift_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.random(80) * 0.6
        config = NcmConfig(clusters=3, eps=1e-10)

        base = ncm_fit(data, config)
        shifted = ncm_fit(data + 0.3, config)
        assert np.max(np.abs((shifted.centers - 0.3) - base.centers)) < 1e-9

    @pytest.mark.parametrize('seed', range(10))
    def test_permuted_initial_centers(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.random(90)
        config = NcmConfig(clusters=3, eps=1e-10)
        initial = quantile_centers(data, 3)
        permutation = np.array([2, 0, 1])

        base = ncm_fit(data, config, initial_centers=initial)
        permuted = ncm_fit(data, config, initial_centers=initial[permutation])

        assert np.allclose(np.sort(base.centers), np.sort(permuted.centers), atol=1e-6)
        assert np.allclose(permuted.centers, base.centers[permutation], atol=1e-6)

    @pytest.mark.parametrize('seed', range(10))
    def test_argmax_stable_under_scaling(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.random(50) * 0.5
        centers = np.sort(rng.random(4) * 0.5)
        config = NcmConfig(clusters=4)

        t, _, _ = ncm_update_memberships(data, centers, config)
        t_scaled, _, _ = ncm_update_memberships(data * 2.0, centers * 2.0, config)
        assert np.array_equal(np.argmax(t, axis=1), np.argmax(t_scaled, axis=1))


def test_numeric_error_carries_point_index():
    error = NumericError("bad", point_index=3)
    assert error.point_index == 3
    assert "3" in str(error)
    assert isinstance(error, ArithmeticError)


def test_quantile_centers():
    centers = quantile_centers(np.arange(12) / 11.0, 12)
    assert centers == pytest.approx([(j + 0.5) / 12 for j in range(12)], abs=1e-12)
    assert math.isclose(quantile_centers([0.0, 1.0], 1)[0], 0.5)
