"""
Модуль кластеризации интенсивностей пикселей
=============================================

Предоставляет базовый алгоритм нечетких c-средних (FCM) и нейтрософские
c-средние (NCM) с попеременной оптимизацией по степеням принадлежности
и центрам кластеров. Данные - скалярные интенсивности X_i.

Функция стоимости NCM:
    L = sum_ij (w1 T_ij)^m (X_i - C_j)^2
      + sum_i (w2 I_i)^m (X_i - Cbar_i)^2
      + sum_i delta^2 (w3 F_i)^m
где Cbar_i - середина двух центров с наибольшими T_ij для точки i.

Основные функции:
    fcm_cost(), fcm_fit() - базовый FCM
    compute_cbar() - середина двух лучших центров
    ncm_update_memberships(), ncm_update_centers() - шаги NCM
    ncm_cost(), ncm_fit() - функция стоимости и полный цикл NCM
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..models.config import NcmConfig
from ..models.state import FcmState, NcmState, StopReason
from .validator import ParamValidator, ValidationError

logger = logging.getLogger(__name__)

# Знаменатель центра ниже порога - кластер пуст
EMPTY_CLUSTER_EPS = 1e-300

# Допустимый относительный рост функции стоимости за итерацию
COST_RTOL = 1e-7


class NumericError(ArithmeticError):
    """
    Нечисловое промежуточное значение в решателе

    Attributes:
        message: сообщение об ошибке
        point_index: индекс первой точки с некорректным значением
    """

    def __init__(self, message: str, point_index: Optional[int] = None):
        self.message = message
        self.point_index = point_index
        super().__init__(message)

    def __str__(self) -> str:
        if self.point_index is not None:
            return f"{self.message} (точка {self.point_index})"
        return self.message


# ===== Вспомогательные функции =====

def _as_data(data: Sequence[float]) -> np.ndarray:
    """Одномерный массив конечных значений float64"""
    array = np.asarray(data, dtype=np.float64).ravel()

    if array.size == 0:
        raise ValidationError("Данные не могут быть пустыми", 'data', 0)

    if not np.all(np.isfinite(array)):
        raise ValidationError("Данные содержат нечисловые значения", 'data', array.size)

    return array


def _check_points(data: np.ndarray, clusters: int) -> None:
    if data.size < clusters:
        raise ValidationError(
            f"Число точек должно быть не меньше числа кластеров ({clusters})",
            'data', data.size
        )


def _check_finite(name: str, *arrays: np.ndarray) -> None:
    """Проверка конечности построчных величин, NumericError с индексом точки"""
    for array in arrays:
        bad = ~np.isfinite(array)
        if bad.any():
            rows = np.nonzero(bad.reshape(bad.shape[0], -1).any(axis=1))[0]
            raise NumericError(f"Нечисловое значение при вычислении {name}", int(rows[0]))


def quantile_centers(data: Sequence[float], clusters: int) -> np.ndarray:
    """
    Начальные центры в квантилях (j + 0.5) / C упорядоченных данных

    Args:
        data: скалярные данные
        clusters: число кластеров

    Returns:
        np.ndarray: центры по возрастанию
    """
    x = _as_data(data)
    probs = (np.arange(clusters) + 0.5) / clusters
    return np.quantile(x, probs)


def _initial_centers(x: np.ndarray, clusters: int, initial: Optional[Sequence[float]]) -> np.ndarray:
    if initial is None:
        return quantile_centers(x, clusters)

    centers = _as_data(initial)
    if centers.size != clusters:
        raise ValidationError(f"Ожидалось {clusters} начальных центров", 'initial_centers', centers.size)
    return centers.copy()


def _distances(x: np.ndarray, centers: np.ndarray, floor: float) -> np.ndarray:
    """|X_i - C_j|, ограниченные снизу значением floor"""
    return np.maximum(np.abs(x[:, None] - centers[None, :]), floor)


def _top_two(scores: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Индексы наибольшего и второго по величине значения в каждой строке

    При равенстве выигрывает меньший индекс.
    """
    rows = np.arange(scores.shape[0])
    first = np.argmax(scores, axis=1)
    masked = scores.copy()
    masked[rows, first] = -np.inf
    second = np.argmax(masked, axis=1)
    return first, second


def _cbar_rows(t_memb: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Cbar_i для всех точек по матрице T (N, C)"""
    if centers.size < 2:
        raise ValidationError("Для Cbar нужно не меньше двух кластеров", 'clusters', centers.size)

    first, second = _top_two(t_memb)
    return (centers[first] + centers[second]) / 2.0


def _reseed_empty(
    centers: np.ndarray,
    denominators: np.ndarray,
    x: np.ndarray,
    best_membership: np.ndarray
) -> np.ndarray:
    """
    Перезапуск пустых кластеров

    Каждый пустой центр переносится в точку с наименьшей максимальной
    степенью принадлежности (следующий пустой - в следующую такую точку).
    """
    empty = np.nonzero(denominators < EMPTY_CLUSTER_EPS)[0]
    if empty.size == 0:
        return centers

    worst = np.argsort(best_membership, kind='stable')
    for slot, cluster in enumerate(empty):
        point = int(worst[slot % worst.size])
        centers[cluster] = x[point]
        logger.warning("Кластер %d пуст, центр перенесен в точку %d (%.4f)", cluster, point, x[point])

    return centers


def _weighted_centers(x: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Взвешенные средние по столбцам weights (N, C) и знаменатели"""
    denominators = weights.sum(axis=0)
    numerators = (weights * x[:, None]).sum(axis=0)

    with np.errstate(divide='ignore', invalid='ignore'):
        centers = numerators / denominators

    centers = np.where(denominators < EMPTY_CLUSTER_EPS, 0.0, centers)
    return centers, denominators


# ===== FCM =====

def fcm_memberships(
    data: Sequence[float],
    centers: Sequence[float],
    m: float,
    distance_floor: float = 1e-10
) -> np.ndarray:
    """
    Степени принадлежности FCM

    u_ik = 1 / sum_j (d_ik / d_ij)^(2/(m-1)), суммирование по кластерам.

    Args:
        data: скалярные данные (N,)
        centers: центры (C,)
        m: показатель нечеткости (> 1)
        distance_floor: нижняя граница расстояния

    Returns:
        np.ndarray: матрица (N, C), строки в сумме дают 1
    """
    x = _as_data(data)
    v = _as_data(centers)

    if v.size == 1:
        return np.ones((x.size, 1))

    dist = _distances(x, v, distance_floor)
    nearest = dist.min(axis=1, keepdims=True)
    ratio = np.power(nearest / dist, 2.0 / (m - 1.0))
    memberships = ratio / ratio.sum(axis=1, keepdims=True)

    _check_finite('степеней принадлежности FCM', memberships)
    return memberships


def fcm_update_centers(data: Sequence[float], memberships: np.ndarray, m: float) -> np.ndarray:
    """
    Центры FCM: v_i = sum_j u_ij^m X_j / sum_j u_ij^m

    Пустые кластеры перезапускаются в точке с наименьшей максимальной
    степенью принадлежности.
    """
    x = _as_data(data)
    weights = np.power(memberships, m)
    centers, denominators = _weighted_centers(x, weights)
    return _reseed_empty(centers, denominators, x, memberships.max(axis=1))


def fcm_cost(data: Sequence[float], state: FcmState, m: float) -> float:
    """
    Функция стоимости FCM: sum u_ij^m (X_j - v_i)^2

    Args:
        data: скалярные данные (N,)
        state: состояние с центрами (C,) и степенями принадлежности (N, C)
        m: показатель нечеткости

    Returns:
        float: неотрицательное значение стоимости

    Raises:
        ValidationError: при несогласованных размерах
    """
    x = _as_data(data)
    centers = np.asarray(state.centers, dtype=np.float64)
    memberships = np.asarray(state.memberships, dtype=np.float64)

    if memberships.shape != (x.size, centers.size):
        raise ValidationError(
            f"Ожидалась матрица принадлежности {(x.size, centers.size)}",
            'memberships', memberships.shape
        )

    squared = (x[:, None] - centers[None, :]) ** 2
    return float(np.sum(np.power(memberships, m) * squared))


def fcm_fit(
    data: Sequence[float],
    clusters: int,
    m: float = 2.0,
    eps: float = 1e-5,
    max_iter: int = 100,
    distance_floor: float = 1e-10,
    initial_centers: Optional[Sequence[float]] = None
) -> FcmState:
    """
    Нечеткие c-средние

    Центры инициализируются квантилями данных, затем попеременно
    пересчитываются степени принадлежности и центры, пока максимальный
    сдвиг центров не станет меньше eps или не будет достигнут max_iter.

    Args:
        data: скалярные данные
        clusters: число кластеров (>= 1)
        m: показатель нечеткости (> 1)
        eps: порог сходимости
        max_iter: предел итераций
        distance_floor: нижняя граница расстояния
        initial_centers: начальные центры (по умолчанию - квантили)

    Returns:
        FcmState: итоговое состояние

    Raises:
        ValidationError: если точек меньше, чем кластеров

    Example:
        >>> state = fcm_fit([0, 0, 0, 1, 1, 1], clusters=2)
        >>> np.round(np.sort(state.centers), 3).tolist()
        [0.0, 1.0]
    """
    if isinstance(clusters, bool) or int(clusters) != clusters or clusters < 1:
        raise ValidationError("Число кластеров должно быть >= 1", 'clusters', clusters)
    if not m > 1.0:
        raise ValidationError("Показатель нечеткости должен быть > 1", 'm', m)
    max_iter = ParamValidator.validate_int(max_iter, 'max_iter', minimum=1)

    x = _as_data(data)
    _check_points(x, clusters)
    centers = _initial_centers(x, clusters, initial_centers)

    state = None
    reason = StopReason.MAX_ITER
    history = []

    for iteration in range(1, max_iter + 1):
        memberships = fcm_memberships(x, centers, m, distance_floor)
        new_centers = fcm_update_centers(x, memberships, m)
        candidate = FcmState(new_centers, memberships, iterations=iteration)
        cost = fcm_cost(x, candidate, m)

        # Для FCM рост возможен только из-за округления или перезапуска пустого кластера
        if history and cost > history[-1] * (1.0 + COST_RTOL):
            reason = StopReason.COST_STALL
            logger.warning("FCM итерация %d увеличила бы стоимость, остановка без сходимости", iteration)
            break

        history.append(cost)
        shift = float(np.max(np.abs(new_centers - centers)))
        centers = new_centers
        state = candidate
        logger.debug("FCM итерация %d: стоимость %.6g, сдвиг %.3g", iteration, cost, shift)

        if shift < eps:
            reason = StopReason.CENTER_TOL
            break

    state.cost_history = history
    state.stop_reason = reason
    logger.info("FCM: %d итераций, стоимость %.4f, остановка: %s", state.iterations, history[-1], reason)
    return state


# ===== NCM =====

def compute_cbar(t_row: Sequence[float], centers: Sequence[float]) -> float:
    """
    Середина центров двух кластеров с наибольшими T_ij

    Args:
        t_row: степени истинности точки (C,)
        centers: центры (C,)

    Returns:
        float: (C_p + C_q) / 2

    Raises:
        ValidationError: если кластеров меньше двух или размеры не совпадают

    Example:
        >>> compute_cbar([0.7, 0.2, 0.1], [0.1, 0.5, 0.9])
        0.3
    """
    t = np.asarray(t_row, dtype=np.float64).ravel()
    c = np.asarray(centers, dtype=np.float64).ravel()

    if c.size < 2:
        raise ValidationError("Для Cbar нужно не меньше двух кластеров", 'clusters', c.size)
    if t.size != c.size:
        raise ValidationError(f"Ожидалось {c.size} значений T", 't_row', t.size)

    return float(_cbar_rows(t[None, :], c)[0])


def _ncm_memberships(
    x: np.ndarray,
    centers: np.ndarray,
    config: NcmConfig
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Обновление T, I, F и Cbar при фиксированных центрах

    Пара (p, q) для Cbar выбирается по самим T_ij: T_ij убывает
    с расстоянием, поэтому это два ближайших центра.
    """
    p = config.exponent
    factor_t, factor_i, factor_f = config.weight_factors()

    # Относительные расстояния: ближайший центр дает 1
    dist = _distances(x, centers, config.distance_floor)
    nearest = dist.min(axis=1)
    relative = np.power(nearest[:, None] / dist, p)

    # Cbar - середина двух ближайших центров
    first, second = _top_two(relative)
    cbar = (centers[first] + centers[second]) / 2.0
    dist_cbar = np.maximum(np.abs(x - cbar), config.distance_floor)
    delta = max(config.delta, config.distance_floor)

    # Общий масштаб строки не больше любого из расстояний
    scale = np.minimum(np.minimum(nearest, dist_cbar), delta)
    truth = factor_t * relative * np.power(scale / nearest, p)[:, None]
    indeterminacy = factor_i * np.power(scale / dist_cbar, p)
    falsity = factor_f * np.power(scale / delta, p)

    # K: общий нормирующий множитель
    k = 1.0 / (truth.sum(axis=1) + indeterminacy + falsity)
    t_memb = truth * k[:, None]
    i_memb = indeterminacy * k
    f_memb = falsity * k

    _check_finite('степеней принадлежности NCM', t_memb, i_memb, f_memb)
    return t_memb, i_memb, f_memb, cbar


def ncm_update_memberships(
    data: Sequence[float],
    centers: Sequence[float],
    config: NcmConfig
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Шаг обновления степеней T, I, F

    T_ij = K a_1 d_ij^(-p), I_i = K a_2 dbar_i^(-p), F_i = K a_3 delta^(-p),
    p = 2/(m-1), K выбирается так, что sum_j T_ij + I_i + F_i = 1.
    Множители a_k задаются NcmConfig.weight_form. Расстояния ограничены
    снизу значением distance_floor.

    Args:
        data: скалярные данные (N,)
        centers: центры (C,)
        config: гиперпараметры

    Returns:
        Tuple: (T (N, C), I (N,), F (N,))

    Raises:
        NumericError: при нечисловом промежуточном значении
    """
    x = _as_data(data)
    c = _as_data(centers)

    if c.size < 2:
        raise ValidationError("NCM требует не меньше двух кластеров", 'centers', c.size)

    t_memb, i_memb, f_memb, _ = _ncm_memberships(x, c, config)
    return t_memb, i_memb, f_memb


def ncm_update_centers(data: Sequence[float], t_memb: np.ndarray, config: NcmConfig) -> np.ndarray:
    """
    Шаг обновления центров

    C_j = sum_i (w1 T_ij)^m X_i / sum_i (w1 T_ij)^m

    Args:
        data: скалярные данные (N,)
        t_memb: степени истинности (N, C)
        config: гиперпараметры

    Returns:
        np.ndarray: новые центры (C,)
    """
    x = _as_data(data)
    t = np.asarray(t_memb, dtype=np.float64)

    if t.ndim != 2 or t.shape[0] != x.size:
        raise ValidationError(f"Ожидалась матрица T из {x.size} строк", 't_memb', t.shape)

    weights = np.power(config.w1 * t, config.m)
    centers, denominators = _weighted_centers(x, weights)
    return _reseed_empty(centers, denominators, x, t.max(axis=1))


def _ncm_cost_terms(
    x: np.ndarray,
    t_memb: np.ndarray,
    i_memb: np.ndarray,
    f_memb: np.ndarray,
    centers: np.ndarray,
    cbar: np.ndarray,
    config: NcmConfig
) -> float:
    m = config.m
    truth_term = np.sum(np.power(config.w1 * t_memb, m) * (x[:, None] - centers[None, :]) ** 2)
    indeterminacy_term = np.sum(np.power(config.w2 * i_memb, m) * (x - cbar) ** 2)
    falsity_term = np.sum(config.delta ** 2 * np.power(config.w3 * f_memb, m))
    return float(truth_term + indeterminacy_term + falsity_term)


def ncm_cost(data: Sequence[float], state: NcmState, config: NcmConfig) -> float:
    """
    Функция стоимости NCM

    Cbar_i пересчитывается по T и центрам состояния. delta - скалярный
    регуляризатор из конфигурации.

    Args:
        data: скалярные данные (N,)
        state: состояние NCM
        config: гиперпараметры

    Returns:
        float: неотрицательное значение стоимости

    Raises:
        ValidationError: при несогласованных размерах
    """
    x = _as_data(data)
    centers = np.asarray(state.centers, dtype=np.float64)
    t_memb = np.asarray(state.t_memb, dtype=np.float64)
    i_memb = np.asarray(state.i_memb, dtype=np.float64).ravel()
    f_memb = np.asarray(state.f_memb, dtype=np.float64).ravel()

    if t_memb.shape != (x.size, centers.size):
        raise ValidationError(f"Ожидалась матрица T {(x.size, centers.size)}", 't_memb', t_memb.shape)
    if i_memb.size != x.size or f_memb.size != x.size:
        raise ValidationError(f"Ожидалось {x.size} значений I и F", 'i_memb', (i_memb.size, f_memb.size))

    cbar = _cbar_rows(t_memb, centers)
    return _ncm_cost_terms(x, t_memb, i_memb, f_memb, centers, cbar, config)


def ncm_fit(
    data: Sequence[float],
    config: Optional[NcmConfig] = None,
    initial_centers: Optional[Sequence[float]] = None
) -> NcmState:
    """
    Нейтрософские c-средние

    Цикл: степени T, I, F при текущих центрах -> центры по T ->
    Cbar по новым T и центрам -> запись стоимости. Остановка:
        CENTER_TOL - максимальный сдвиг центров меньше eps, converged = True;
        COST_STALL - шаг увеличил бы стоимость более чем в (1 + 1e-7) раз,
            остается предыдущее состояние, converged = False;
        MAX_ITER - предел итераций, converged = False.

    Шаг центров минимизирует только слагаемое T: Cbar_i зависит от
    центров, и слагаемое I после сдвига центров может вырасти. Поэтому
    COST_STALL - обычный исход, а не редкий аварийный. Результат
    детерминирован.

    Args:
        data: скалярные данные
        config: гиперпараметры (по умолчанию NcmConfig())
        initial_centers: начальные центры (по умолчанию - квантили)

    Returns:
        NcmState: итоговое состояние

    Raises:
        ValidationError: если точек меньше, чем кластеров
        NumericError: при нечисловом промежуточном значении
    """
    config = config or NcmConfig()
    x = _as_data(data)
    _check_points(x, config.clusters)
    centers = _initial_centers(x, config.clusters, initial_centers)

    state = None
    reason = StopReason.MAX_ITER
    history = []

    for iteration in range(1, config.max_iter + 1):
        t_memb, i_memb, f_memb, _ = _ncm_memberships(x, centers, config)
        new_centers = ncm_update_centers(x, t_memb, config)

        # Cbar по новым центрам, как в функции стоимости
        cbar = _cbar_rows(t_memb, new_centers)
        cost = _ncm_cost_terms(x, t_memb, i_memb, f_memb, new_centers, cbar, config)
        shift = float(np.max(np.abs(new_centers - centers)))

        # Рост стоимости: шаг отбрасывается, остается предыдущее состояние
        if history and cost > history[-1] * (1.0 + COST_RTOL):
            reason = StopReason.COST_STALL
            logger.warning(
                "NCM итерация %d увеличила бы стоимость (%.6g > %.6g) при сдвиге центров %.3g, остановка без сходимости",
                iteration, cost, history[-1], shift
            )
            break

        history.append(cost)
        centers = new_centers
        state = NcmState(new_centers, t_memb, i_memb, f_memb, cbar, iterations=iteration)
        logger.debug("NCM итерация %d: стоимость %.6g, сдвиг %.3g", iteration, cost, shift)

        if shift < config.eps:
            reason = StopReason.CENTER_TOL
            break

    state.cost_history = history
    state.stop_reason = reason

    if reason is StopReason.MAX_ITER:
        logger.warning("NCM не сошелся за %d итераций", config.max_iter)

    logger.info("NCM: %d итераций, стоимость %.4f, остановка: %s", state.iterations, history[-1], reason)
    return state


__all__ = [
    'NumericError',
    'quantile_centers',
    'fcm_memberships',
    'fcm_update_centers',
    'fcm_cost',
    'fcm_fit',
    'compute_cbar',
    'ncm_update_memberships',
    'ncm_update_centers',
    'ncm_cost',
    'ncm_fit'
]
