"""
Модели состояния кластеризации и результата сегментации
========================================================

Основные классы:
    StopReason - Enum причин остановки итераций
    FcmState - состояние нечеткой кластеризации (FCM)
    NcmState - состояние нейтрософской кластеризации (NCM)
    SegmentationResult - результат сегментации B-скана
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from .image import BinaryMask, NeutrosophicImage


class StopReason(Enum):
    """
    Причина остановки итераций

    Возможные значения:
        CENTER_TOL: максимальный сдвиг центров меньше eps (сходимость)
        COST_STALL: следующий шаг увеличил бы функцию стоимости, центры
            еще движутся (сходимости нет)
        MAX_ITER: достигнут предел итераций (сходимости нет)
    """

    CENTER_TOL = "center_tol"
    COST_STALL = "cost_stall"
    MAX_ITER = "max_iter"

    @property
    def converged(self) -> bool:
        return self is StopReason.CENTER_TOL

    def __str__(self) -> str:
        return self.value


@dataclass
class FcmState:
    """
    Состояние FCM

    Attributes:
        centers: центры кластеров (C,)
        memberships: степени принадлежности (N, C), строки в сумме дают 1
        cost_history: значения функции стоимости по итерациям
        iterations: число выполненных итераций
        stop_reason: причина остановки
    """

    centers: np.ndarray
    memberships: np.ndarray
    cost_history: List[float] = field(default_factory=list)
    iterations: int = 0
    stop_reason: StopReason = StopReason.MAX_ITER

    @property
    def converged(self) -> bool:
        return self.stop_reason.converged

    @property
    def clusters(self) -> int:
        return int(self.centers.shape[0])

    @property
    def final_cost(self) -> Optional[float]:
        return self.cost_history[-1] if self.cost_history else None


@dataclass
class NcmState:
    """
    Состояние NCM

    Attributes:
        centers: центры кластеров C_j (C,)
        t_memb: степени истинности T_ij (N, C)
        i_memb: степени неопределенности I_i (N,)
        f_memb: степени ложности F_i (N,)
        cbar: середина двух ближайших центров для каждой точки (N,)
        cost_history: значения функции стоимости по итерациям
        iterations: число выполненных итераций
        stop_reason: причина остановки
    """

    centers: np.ndarray
    t_memb: np.ndarray
    i_memb: np.ndarray
    f_memb: np.ndarray
    cbar: np.ndarray
    cost_history: List[float] = field(default_factory=list)
    iterations: int = 0
    stop_reason: StopReason = StopReason.MAX_ITER

    @property
    def converged(self) -> bool:
        return self.stop_reason.converged

    @property
    def clusters(self) -> int:
        return int(self.centers.shape[0])

    @property
    def points(self) -> int:
        return int(self.t_memb.shape[0])

    @property
    def final_cost(self) -> Optional[float]:
        return self.cost_history[-1] if self.cost_history else None

    def membership_sums(self) -> np.ndarray:
        """Сумма T_ij + I_i + F_i для каждой точки"""
        return self.t_memb.sum(axis=1) + self.i_memb + self.f_memb


@dataclass
class SegmentationResult:
    """
    Результат сегментации B-скана

    Attributes:
        mask: бинарная маска жидкости
        state: итоговое состояние кластеризации (NcmState или FcmState)
        sorted_centers: центры по возрастанию уровня серого
        assignments: карта номеров кластеров (height, width), -1 вне ROI
        elapsed: время сегментации в секундах
        neutrosophic: нейтрософское представление изображения
        roi: маска области интереса
        method: использованный алгоритм ('ncm' или 'fcm')
    """

    mask: BinaryMask
    state: Any
    sorted_centers: np.ndarray
    assignments: np.ndarray
    elapsed: float
    neutrosophic: Optional[NeutrosophicImage] = None
    roi: Optional[BinaryMask] = None
    method: str = 'ncm'

    @property
    def fluid_cluster(self) -> int:
        """Индекс кластера с минимальным центром"""
        return int(np.argsort(self.state.centers, kind='stable')[0])

    def summary(self) -> Dict[str, Any]:
        """Краткая сводка для вывода"""
        return {
            'method': self.method,
            'iterations': self.state.iterations,
            'final_cost': self.state.final_cost,
            'converged': self.state.converged,
            'stop_reason': str(self.state.stop_reason),
            'fluid_pixels': self.mask.fluid_pixels,
            'elapsed': self.elapsed
        }
