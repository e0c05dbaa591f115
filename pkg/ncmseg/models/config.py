"""
Модели конфигурации
===================

Основные классы:
    WeightForm - форма весовых коэффициентов в обновлении степеней принадлежности
    NcmConfig - гиперпараметры кластеризации NCM
    CliConfig - конфигурация командной строки (NcmConfig + пути и режимы)
"""

from dataclasses import dataclass, field, fields, asdict, replace
from enum import Enum
from typing import Any, Dict, Mapping, Optional

from ..core.validator import ValidationError, ParamValidator, validate_config_keys


class WeightForm(Enum):
    """
    Форма весового множителя при T, I и F

    Возможные значения:
        PRINTED: 1/w, буквальная форма формул обновления (по умолчанию)
        STATIONARY: w^(-m/(m-1)), точный минимум функции стоимости по T, I, F
            при фиксированных центрах
    """

    PRINTED = "printed"
    STATIONARY = "stationary"

    @classmethod
    def from_string(cls, value: Any) -> 'WeightForm':
        if isinstance(value, cls):
            return value
        for form in cls:
            if form.value == str(value).lower():
                return form
        raise ValidationError(
            f"Допустимые значения: {[f.value for f in cls]}",
            'weight_form', value
        )

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class NcmConfig:
    """
    Гиперпараметры нейтрософской кластеризации (NCM)

    Attributes:
        clusters: число кластеров C (>= 2)
        m: показатель нечеткости (> 1)
        w1, w2, w3: веса T, I и F (> 0, сумма = 1)
        delta: скалярный регуляризатор в слагаемом F (> 0)
        eps: порог сходимости по сдвигу центров
        max_iter: максимальное число итераций
        distance_floor: нижняя граница расстояния |X_i - C_j|
        window: размер окна усредняющего фильтра (нечетный)
        seed: зарезервировано для рандомизированных запасных веток; текущие
            алгоритмы детерминированы и зерно не читают
        weight_form: форма весового множителя (см. WeightForm)
        min_area: минимальная площадь компоненты жидкости (0 - фильтр выключен)

    Example:
        >>> config = NcmConfig(clusters=4)
        >>> config.exponent
        2.0
    """

    clusters: int = 12
    m: float = 2.0
    w1: float = 0.75
    w2: float = 0.125
    w3: float = 0.125
    delta: float = 0.1
    eps: float = 1e-5
    max_iter: int = 100
    distance_floor: float = 1e-10
    window: int = 5
    seed: int = 0
    weight_form: WeightForm = WeightForm.PRINTED
    min_area: int = 0

    def __post_init__(self):
        check = ParamValidator
        object.__setattr__(self, 'clusters', check.validate_int(self.clusters, 'clusters', minimum=2))
        object.__setattr__(self, 'm', check.validate_float(self.m, 'm', low=1.0, low_inclusive=False))

        for name in ('w1', 'w2', 'w3'):
            value = check.validate_float(getattr(self, name), name, low=0.0, low_inclusive=False)
            object.__setattr__(self, name, value)

        total = self.w1 + self.w2 + self.w3
        if abs(total - 1.0) > 1e-9:
            raise ValidationError("Сумма весов w1 + w2 + w3 должна быть равна 1", 'weights', total)

        object.__setattr__(self, 'delta', check.validate_float(self.delta, 'delta', low=0.0, low_inclusive=False))
        object.__setattr__(self, 'eps', check.validate_float(self.eps, 'eps', low=0.0, low_inclusive=False))
        object.__setattr__(self, 'max_iter', check.validate_int(self.max_iter, 'max_iter', minimum=1))
        object.__setattr__(
            self, 'distance_floor',
            check.validate_float(self.distance_floor, 'distance_floor', low=0.0, low_inclusive=False)
        )
        object.__setattr__(self, 'window', check.validate_window(self.window))
        object.__setattr__(self, 'seed', check.validate_int(self.seed, 'seed'))
        object.__setattr__(self, 'weight_form', WeightForm.from_string(self.weight_form))
        object.__setattr__(self, 'min_area', check.validate_int(self.min_area, 'min_area', minimum=0))

    @property
    def exponent(self) -> float:
        """Показатель 2/(m-1) при расстояниях"""
        return 2.0 / (self.m - 1.0)

    @property
    def weights(self):
        return self.w1, self.w2, self.w3

    def weight_factors(self):
        """
        Множители при T, I и F в обновлении степеней принадлежности

        Returns:
            Tuple[float, float, float]: множители для w1, w2, w3
        """
        if self.weight_form is WeightForm.PRINTED:
            return tuple(1.0 / w for w in self.weights)

        power = -self.m / (self.m - 1.0)
        return tuple(w ** power for w in self.weights)

    def with_updates(self, **changes: Any) -> 'NcmConfig':
        """Копия конфигурации с измененными полями (с повторной валидацией)"""
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        """Преобразовать в словарь"""
        data = asdict(self)
        data['weight_form'] = self.weight_form.value
        return data


NCM_FIELDS = tuple(f.name for f in fields(NcmConfig))


@dataclass(frozen=True)
class CliConfig:
    """
    Конфигурация командной строки

    Приоритет источников: флаги > JSON файл (--config) > значения по умолчанию.

    Attributes:
        ncm: гиперпараметры кластеризации
        method: алгоритм кластеризации ('ncm' или 'fcm')
        expert: идентификатор эксперта для оценки
        roi: путь к маске области интереса
        report_format: формат отчета ('json' или 'csv')
        overlay: сохранять ли наложение маски на изображение
        threads: число потоков оценки (None - автоматически)
    """

    ncm: NcmConfig = field(default_factory=NcmConfig)
    method: str = 'ncm'
    expert: Optional[str] = None
    roi: Optional[str] = None
    report_format: str = 'json'
    overlay: bool = False
    threads: Optional[int] = None

    METHODS = ('ncm', 'fcm')
    FORMATS = ('json', 'csv')

    def __post_init__(self):
        if self.method not in self.METHODS:
            raise ValidationError(f"Допустимые методы: {list(self.METHODS)}", 'method', self.method)

        if self.report_format not in self.FORMATS:
            raise ValidationError(f"Допустимые форматы: {list(self.FORMATS)}", 'format', self.report_format)

        if self.threads is not None:
            object.__setattr__(self, 'threads', ParamValidator.validate_int(self.threads, 'threads', minimum=1))

    @classmethod
    def allowed_keys(cls):
        return NCM_FIELDS + ('method', 'expert', 'roi', 'format', 'overlay', 'threads')

    @classmethod
    def from_sources(
        cls,
        flags: Mapping[str, Any],
        file_config: Optional[Mapping[str, Any]] = None
    ) -> 'CliConfig':
        """
        Собрать конфигурацию из флагов и JSON файла

        Args:
            flags: значения флагов (None означает "флаг не задан")
            file_config: словарь из JSON файла

        Returns:
            CliConfig: итоговая конфигурация

        Raises:
            ValidationError: неизвестные ключи в файле или некорректные значения
        """
        merged: Dict[str, Any] = {}

        if file_config is not None:
            validate_config_keys(dict(file_config), cls.allowed_keys(), source='config')
            merged.update(file_config)

        for key, value in flags.items():
            if value is not None and key in cls.allowed_keys():
                merged[key] = value

        ncm_values = {k: merged[k] for k in NCM_FIELDS if k in merged}

        return cls(
            ncm=NcmConfig(**ncm_values),
            method=merged.get('method', 'ncm'),
            expert=None if merged.get('expert') is None else str(merged['expert']),
            roi=merged.get('roi'),
            report_format=merged.get('format', 'json'),
            overlay=bool(merged.get('overlay', False)),
            threads=merged.get('threads')
        )
