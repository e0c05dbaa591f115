"""
Модуль форматирования результатов
==================================

Предоставляет функции для вывода чисел, таблиц метрик и сводок
сегментации в удобочитаемом виде. Все числа выводятся с 4 знаками
после запятой.

Основные функции:
    format_value() - форматирование числа или неопределенного значения
    format_duration() - форматирование длительности
    format_simple_table() - простая текстовая таблица
    format_report_header() - заголовок отчета
    format_key_value() - пары ключ-значение
    format_metrics_table() - таблица метрик в виде строк
    format_segmentation_summary() - строки сводки по одному скану
"""

from typing import Any, Dict, List, Optional, Sequence

DECIMALS = 4

# Обозначение неопределенной метрики в тексте
UNDEFINED = 'н/д'


# ===== Форматирование чисел =====

def format_value(value: Optional[float], decimal_places: int = DECIMALS) -> str:
    """
    Форматирование числа с фиксированным числом знаков

    Args:
        value: число или None (не определено)
        decimal_places: количество знаков после запятой

    Returns:
        str: отформатированное число

    Example:
        >>> format_value(0.82237)
        '0.8224'

        >>> format_value(None)
        'н/д'
    """
    if value is None:
        return UNDEFINED

    return f"{float(value):.{decimal_places}f}"


def format_duration(seconds: float) -> str:
    """
    Форматирование длительности в секундах

    Example:
        >>> format_duration(1.23456)
        '1.2346 с'
    """
    return f"{format_value(seconds)} с"


# ===== Таблицы =====

def format_simple_table(
    data: Sequence[Sequence[Any]],
    headers: Optional[Sequence[str]] = None
) -> str:
    """
    Простое форматирование таблицы

    Args:
        data: список строк с данными
        headers: заголовки колонок

    Returns:
        str: отформатированная таблица
    """
    if not data:
        return "Нет данных"

    all_rows = [list(headers)] + [list(row) for row in data] if headers else [list(row) for row in data]

    col_widths = [
        max(len(str(row[col])) for row in all_rows)
        for col in range(len(all_rows[0]))
    ]

    lines = []
    for i, row in enumerate(all_rows):
        line = ' | '.join(str(cell).ljust(width) for cell, width in zip(row, col_widths))
        lines.append(line.rstrip())

        if i == 0 and headers:
            lines.append('-' * len(line))

    return '\n'.join(lines)


def format_report_header(title: str, subtitle: Optional[str] = None, width: int = 60) -> str:
    """
    Форматирование заголовка отчета

    Args:
        title: заголовок
        subtitle: подзаголовок
        width: ширина

    Returns:
        str: отформатированный заголовок
    """
    lines = ['=' * width, title.center(width).rstrip()]

    if subtitle:
        lines.append(subtitle.center(width).rstrip())

    lines.append('=' * width)

    return '\n'.join(lines)


def format_key_value(data: Dict[str, Any], key_width: int = 20, indent: int = 0) -> str:
    """
    Форматирование пар ключ-значение

    Числа с плавающей точкой выводятся с 4 знаками.

    Example:
        >>> print(format_key_value({'итерации': 12, 'стоимость': 0.5}))
        итерации             : 12
        стоимость            : 0.5000
    """
    lines = []
    indent_str = ' ' * indent

    for key, value in data.items():
        if value is None or isinstance(value, float):
            value_str = format_value(value)
        else:
            value_str = str(value)

        lines.append(f"{indent_str}{key:<{key_width}} : {value_str}")

    return '\n'.join(lines)


# ===== Отчеты =====

METRIC_HEADERS = ['Dice', 'Sensitivity', 'Precision']


def format_metrics_table(rows: Sequence[Dict[str, Any]], label: str = 'subject') -> List[str]:
    """
    Таблица метрик по строкам отчета

    Args:
        rows: словари с ключами label, dice, sensitivity, precision
        label: ключ идентификатора строки

    Returns:
        List[str]: строки таблицы

    Example:
        >>> lines = format_metrics_table([{'subject': 's1', 'dice': 0.5, 'sensitivity': 1.0, 'precision': None}])
        >>> lines[2]
        's1      | 0.5000 | 1.0000      | н/д'
    """
    table = [
        [row.get(label, '')] + [format_value(row.get(name)) for name in ('dice', 'sensitivity', 'precision')]
        for row in rows
    ]
    return format_simple_table(table, headers=[label.capitalize()] + METRIC_HEADERS).split('\n')


def format_segmentation_summary(
    iterations: int,
    cost: Optional[float],
    elapsed: float,
    fluid_pixels: int,
    stop_reason: str
) -> List[str]:
    """
    Строки сводки по результату сегментации одного скана

    Returns:
        List[str]: строки "ключ: значение"
    """
    return format_key_value({
        'iterations': iterations,
        'final_cost': None if cost is None else float(cost),
        'elapsed': format_duration(elapsed),
        'fluid_pixels': fluid_pixels,
        'stop_reason': stop_reason
    }, key_width=12).split('\n')


__all__ = [
    'DECIMALS',
    'UNDEFINED',
    'format_value',
    'format_duration',
    'format_simple_table',
    'format_report_header',
    'format_key_value',
    'format_metrics_table',
    'format_segmentation_summary'
]
