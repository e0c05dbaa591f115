"""
Core module - ядро пакета ncmseg
=================================

Модуль содержит основные алгоритмы:

Функции:
    local_mean(), to_neutrosophic() - нейтрософское преобразование
    fcm_fit(), ncm_fit() - кластеризация FCM и NCM
    segment_bscan() - сегментация жидкости на B-скане
    ValidationError, NumericError - исключения
"""

# validator импортируется первым: модели используют его при загрузке
from .validator import ValidationError, ParamValidator, validate_config_keys
from .neutrosophic import local_mean, min_max_normalize, to_neutrosophic
from .clustering import (
    NumericError,
    quantile_centers,
    fcm_cost,
    fcm_fit,
    compute_cbar,
    ncm_update_memberships,
    ncm_update_centers,
    ncm_cost,
    ncm_fit
)
from .pipeline import assign_pixels, binarize, remove_small_components, segment_bscan

__all__ = [
    'ValidationError',
    'ParamValidator',
    'validate_config_keys',
    'local_mean',
    'min_max_normalize',
    'to_neutrosophic',
    'NumericError',
    'quantile_centers',
    'fcm_cost',
    'fcm_fit',
    'compute_cbar',
    'ncm_update_memberships',
    'ncm_update_centers',
    'ncm_cost',
    'ncm_fit',
    'assign_pixels',
    'binarize',
    'remove_small_components',
    'segment_bscan'
]
