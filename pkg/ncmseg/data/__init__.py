"""
Data module - синтетические данные ncmseg
==========================================

Модуль содержит генератор фантомов B-сканов с известной разметкой:

Классы и функции:
    PhantomSpec - параметры фантома
    generate_phantom() - сгенерировать изображение и маску
    PhantomError - исключение при невозможности разместить включения
"""

from .phantom import PhantomSpec, PhantomError, generate_phantom

__all__ = [
    'PhantomSpec',
    'PhantomError',
    'generate_phantom'
]
