"""
Модуль для работы с файлами
============================

Предоставляет функции загрузки и сохранения растров, индексирования
набора данных OCT и записи отчетов о качестве сегментации.

Поддерживаемые форматы:
    чтение - PGM (P5), PNG 8/16 бит, TIFF (только полутоновые)
    запись масок - PNG 8 бит (жидкость = 255, ткань = 0)
    отчеты - JSON, CSV

Основные функции:
    load_gray() - загрузка B-скана с нормировкой в [0, 1]
    load_mask() - загрузка маски (ненулевые пиксели = жидкость)
    save_mask() - сохранение маски
    save_overlay() - наложение маски на изображение
    save_gray_png() - сохранение карты значений [0, 1] в PNG
    index_dataset() - построение индекса набора данных
    write_report() - запись отчета в JSON или CSV
    load_json_config() - чтение JSON файла конфигурации
"""

import json
import re
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from matplotlib import colors as mcolors
from matplotlib import image as mimage
from PIL import Image, UnidentifiedImageError

from ..core.validator import ValidationError
from ..models.dataset import DatasetIndex, DatasetLayout, ScanEntry, SubjectEntry
from ..models.image import BinaryMask, GrayImage, NeutrosophicImage
from .metrics import METRIC_NAMES, MetricsReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Pillow называет PGM форматом PPM
SUPPORTED_FORMATS = ('PNG', 'PPM', 'TIFF')
SIXTEEN_BIT_MODES = ('I;16', 'I;16B', 'I;16L', 'I;16N', 'I')
GRAY_MODES = ('L', '1', 'F') + SIXTEEN_BIT_MODES

OVERLAY_COLOR = 'red'
OVERLAY_OPACITY = 0.5

REPORT_FORMATS = ('json', 'csv')
COUNT_COLUMNS = ('tp', 'fp', 'tn', 'fn')
CSV_COLUMNS = ('scope', 'subject', 'image') + METRIC_NAMES + COUNT_COLUMNS

# Значения метрик в JSON: фиксированные 4 знака (0.5000, а не 0.5)
_JSON_METRIC_VALUE = re.compile(r'("(?:%s)": )(-?\d+\.\d+)' % '|'.join(METRIC_NAMES))


class FileHandlerError(Exception):
    """Исключение при работе с файлами"""
    pass


class ImageNotFoundError(FileHandlerError, FileNotFoundError):
    """Файл изображения не найден"""
    pass


class ImageFormatError(FileHandlerError):
    """
    Неподдерживаемый формат или цветное изображение

    Attributes:
        format_name: формат или режим, который не удалось принять
    """

    def __init__(self, message: str, format_name: Optional[str] = None):
        self.format_name = format_name
        super().__init__(f"{message}: {format_name}" if format_name else message)


class DatasetError(FileHandlerError, ValidationError):
    """
    Ошибка построения индекса набора данных

    Одновременно ошибка файлового слоя и некорректный аргумент:
    пустой или отсутствующий набор ловится как ValidationError.
    """

    def __init__(self, message: str, value: Any = None):
        ValidationError.__init__(self, message, 'dataset', value)


# ===== Растры =====

def _read_array(path: PathLike) -> Tuple[np.ndarray, str]:
    """Прочитать полутоновый растр как массив и вернуть его режим Pillow"""
    path = Path(path)

    if not path.is_file():
        raise ImageNotFoundError(f"Файл {path} не найден")

    try:
        with Image.open(path) as img:
            if img.format not in SUPPORTED_FORMATS:
                raise ImageFormatError("Неподдерживаемый формат", img.format)

            if img.mode not in GRAY_MODES:
                raise ImageFormatError("Допускаются только полутоновые изображения, режим", img.mode)

            return np.array(img), img.mode

    except UnidentifiedImageError:
        raise ImageFormatError("Не удалось распознать изображение", path.suffix.lstrip('.') or path.name)
    except OSError as e:
        raise FileHandlerError(f"Ошибка чтения {path}: {e}")


def load_gray(path: PathLike) -> GrayImage:
    """
    Загрузить полутоновый B-скан

    8-битные значения делятся на 255, 16-битные на 65535;
    значения режима F должны уже лежать в [0, 1].

    Args:
        path: путь к файлу PGM, PNG или TIFF

    Returns:
        GrayImage: интенсивности в [0, 1]

    Raises:
        ImageNotFoundError: файл не существует
        ImageFormatError: неподдерживаемый формат или цветное изображение

    Example:
        >>> image = load_gray("bscan.png")
        >>> image.width, image.height
        (512, 496)
    """
    array, mode = _read_array(path)

    if mode == 'L':
        data = array.astype(np.float64) / 255.0
    elif mode == '1':
        data = array.astype(np.float64)
    elif mode in SIXTEEN_BIT_MODES:
        if array.min() < 0 or array.max() > 65535:
            raise ImageFormatError("Значения вне 16-битного диапазона, режим", mode)
        data = array.astype(np.float64) / 65535.0
    else:
        data = array.astype(np.float64)
        if not np.all(np.isfinite(data)) or data.min() < 0.0 or data.max() > 1.0:
            raise ImageFormatError("Значения режима F должны лежать в [0, 1], режим", mode)

    logger.debug("Загружен %s: %dx%d, режим %s", path, data.shape[1], data.shape[0], mode)
    return GrayImage(data)


def load_mask(path: PathLike) -> BinaryMask:
    """
    Загрузить маску: любой ненулевой пиксель считается жидкостью

    Raises:
        ImageNotFoundError: файл не существует
        ImageFormatError: неподдерживаемый формат или цветное изображение
    """
    array, _ = _read_array(path)
    return BinaryMask((array != 0).astype(np.uint8))


def _prepare_path(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def save_gray_png(values: np.ndarray, path: PathLike, bits: int = 8) -> str:
    """
    Сохранить карту значений из [0, 1] как PNG

    8 бит: round(v * 255); 16 бит: round(v * 65535).

    Returns:
        str: путь к сохраненному файлу

    Raises:
        ValidationError: разрядность не 8 и не 16
    """
    if bits not in (8, 16):
        raise ValidationError("Допустимая разрядность: 8 или 16", 'bits', bits)

    scale, dtype = (255.0, np.uint8) if bits == 8 else (65535.0, np.uint16)
    quantized = np.rint(np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0) * scale).astype(dtype)

    try:
        path = _prepare_path(path)
        Image.fromarray(quantized).save(path, format='PNG')
    except OSError as e:
        raise FileHandlerError(f"Ошибка сохранения PNG {path}: {e}")

    return str(path.resolve())


def save_mask(mask: BinaryMask, path: PathLike) -> str:
    """
    Сохранить маску как 8-битный PNG (жидкость = 255, ткань = 0)

    Returns:
        str: путь к сохраненному файлу
    """
    return save_gray_png(mask.data, path)


def save_overlay(image: GrayImage, mask: BinaryMask, path: PathLike) -> str:
    """
    Сохранить изображение с закрашенными пикселями жидкости

    Пиксели жидкости смешиваются с красным цветом с непрозрачностью 0.5.

    Raises:
        ValidationError: размеры изображения и маски различаются
        FileHandlerError: ошибка записи
    """
    if image.shape != mask.shape:
        raise ValidationError(
            f"Размер маски должен совпадать с изображением {image.width}x{image.height}",
            'mask', f"{mask.width}x{mask.height}"
        )

    rgb = np.repeat(image.data[:, :, np.newaxis], 3, axis=2)
    tint = np.asarray(mcolors.to_rgb(OVERLAY_COLOR))
    fluid = mask.as_bool()
    rgb[fluid] = (1.0 - OVERLAY_OPACITY) * rgb[fluid] + OVERLAY_OPACITY * tint

    try:
        path = _prepare_path(path)
        mimage.imsave(path, np.clip(rgb, 0.0, 1.0), format='png')
    except OSError as e:
        raise FileHandlerError(f"Ошибка сохранения наложения {path}: {e}")

    return str(path.resolve())


def save_neutrosophic_maps(neutrosophic: NeutrosophicImage, prefix: PathLike) -> Dict[str, str]:
    """
    Сохранить карты T, I, F и delta как <prefix>_t.png, <prefix>_i.png и т.д.

    Returns:
        Dict[str, str]: пути к файлам по имени карты
    """
    prefix = str(prefix)
    return {
        name: save_gray_png(values, f"{prefix}_{name}.png")
        for name, values in neutrosophic.maps().items()
    }


# ===== Набор данных =====

def _image_size(path: Path) -> Tuple[int, int]:
    try:
        with Image.open(path) as img:
            return img.size
    except (UnidentifiedImageError, OSError) as e:
        raise ImageFormatError(f"Не удалось прочитать {path}", str(e))


def discover_experts(root: PathLike, layout: DatasetLayout = DatasetLayout()) -> List[str]:
    """
    Найти идентификаторы экспертов (каталоги разметки) во всех субъектах

    Returns:
        List[str]: эксперты в лексикографическом порядке
    """
    root = Path(root)
    experts = set()

    if root.is_dir():
        for subject_dir in root.iterdir():
            masks_dir = subject_dir / layout.masks_dir
            if masks_dir.is_dir():
                experts.update(d.name for d in masks_dir.iterdir() if d.is_dir())

    return sorted(experts)


def resolve_expert(experts: Sequence[str], value: Any) -> str:
    """
    Сопоставить значение флага --expert с каталогом эксперта

    Допускается точное имя каталога или номер (3 -> 'expert3').

    Raises:
        ValidationError: эксперт не найден
    """
    name = str(value)

    for candidate in (name, f"expert{name}"):
        if candidate in experts:
            return candidate

    raise ValidationError(f"Доступные эксперты: {list(experts)}", 'expert', value)


def index_dataset(
    root: PathLike,
    experts: Optional[Sequence[str]] = None,
    layout: DatasetLayout = DatasetLayout()
) -> DatasetIndex:
    """
    Построить индекс набора данных

    Структура: root/<subject>/images/<stem>.<ext> и
    root/<subject>/masks/<expert>/<stem>.png. Сканы без маски одного из
    экспертов или с несовпадающим размером маски исключаются и
    попадают в список предупреждений.

    Args:
        root: корневой каталог
        experts: эксперты (None - все найденные)
        layout: соглашение о структуре каталогов

    Returns:
        DatasetIndex: субъекты и сканы в лексикографическом порядке

    Raises:
        DatasetError: каталог не существует или не содержит ни одного скана
    """
    root = Path(root)

    if not root.is_dir():
        raise DatasetError(f"Каталог набора данных {root} не найден", str(root))

    experts = sorted(experts) if experts is not None else discover_experts(root, layout)
    if not experts:
        raise DatasetError(f"В {root} не найдено ни одной экспертной разметки", str(root))

    index = DatasetIndex(root=root, experts=list(experts))

    for subject_dir in sorted(p for p in root.iterdir() if layout.image_dir(p).is_dir()):
        subject = SubjectEntry(subject_id=subject_dir.name)

        images = sorted(
            p for p in layout.image_dir(subject_dir).iterdir()
            if p.is_file() and p.suffix.lower() in layout.image_suffixes
        )

        for image_path in images:
            entry = _index_scan(subject_dir, image_path, experts, layout, index.warnings)
            if entry is not None:
                subject.scans.append(entry)

        if subject.scans:
            index.subjects.append(subject)

    for warning in index.warnings:
        logger.warning(warning)

    if index.scan_count == 0:
        raise DatasetError(f"Набор данных {root} пуст", str(root))

    logger.info("Индекс %s: %s", root, index.summary())
    return index


def _index_scan(
    subject_dir: Path,
    image_path: Path,
    experts: Sequence[str],
    layout: DatasetLayout,
    warnings: List[str]
) -> Optional[ScanEntry]:
    scan_id = f"{subject_dir.name}/{image_path.stem}"
    entry = ScanEntry(image_path=image_path)
    image_size = None

    for expert in experts:
        mask_path = layout.find_mask(subject_dir, expert, image_path.stem)

        if mask_path is None:
            warnings.append(f"{scan_id}: нет маски эксперта {expert}")
            return None

        image_size = image_size or _image_size(image_path)
        mask_size = _image_size(mask_path)
        if mask_size != image_size:
            warnings.append(
                f"{scan_id}: размер маски эксперта {expert} {mask_size} "
                f"не совпадает со сканом {image_size}"
            )
            return None

        entry.masks[expert] = mask_path

    return entry


# ===== Отчеты =====

def _report_rows(report: MetricsReport) -> List[Dict[str, Any]]:
    rows = []

    for item in report.per_image:
        rows.append({'scope': 'image', 'subject': item.subject_id, 'image': item.image_id,
                     **item.metrics, **item.counts.to_dict()})

    for item in report.per_subject:
        rows.append({'scope': 'subject', 'subject': item.subject_id, 'image': '',
                     **item.metrics, **item.counts.to_dict()})

    rows.append({'scope': 'average', 'subject': '', 'image': '', **report.average})
    return rows


def report_to_frame(report: MetricsReport) -> pd.DataFrame:
    """
    Табличное представление отчета

    Одна строка на скан, затем строки субъектов и строка среднего;
    колонка scope принимает значения image, subject, average.
    """
    df = pd.DataFrame(_report_rows(report), columns=list(CSV_COLUMNS))

    for name in METRIC_NAMES:
        df[name] = df[name].astype('float64')

    for name in COUNT_COLUMNS:
        df[name] = df[name].astype('Int64')

    return df


def _format_report_json(report: MetricsReport) -> str:
    """JSON текст отчета, метрики с фиксированными 4 знаками"""
    text = json.dumps(report.to_dict(), ensure_ascii=False, indent=2)
    return _JSON_METRIC_VALUE.sub(lambda m: f"{m.group(1)}{float(m.group(2)):.4f}", text)


def write_report(report: MetricsReport, path: PathLike, fmt: str = 'json') -> str:
    """
    Записать отчет

    JSON: объекты metadata, per_image, per_subject, average; числа
    округлены до 4 знаков, неопределенные метрики = null.
    CSV: неопределенные метрики = пустая ячейка.

    Args:
        report: отчет
        path: путь к файлу
        fmt: 'json' или 'csv'

    Returns:
        str: путь к сохраненному файлу

    Raises:
        ValidationError: неизвестный формат
        FileHandlerError: ошибка записи
    """
    fmt = str(fmt).lower()
    if fmt not in REPORT_FORMATS:
        raise ValidationError(f"Допустимые форматы: {list(REPORT_FORMATS)}", 'format', fmt)

    try:
        path = _prepare_path(path)

        if fmt == 'json':
            with open(path, 'w', encoding='utf-8') as f:
                f.write(_format_report_json(report) + '\n')
        else:
            report_to_frame(report).to_csv(path, index=False, float_format='%.4f', na_rep='')

    except OSError as e:
        raise FileHandlerError(f"Ошибка сохранения отчета {path}: {e}")

    logger.info("Отчет записан: %s (%s)", path, fmt)
    return str(path.resolve())


def load_json_config(path: PathLike) -> Dict[str, Any]:
    """
    Прочитать JSON файл конфигурации

    Raises:
        FileHandlerError: файл не найден или не читается
        ValidationError: содержимое не является JSON объектом
    """
    path = Path(path)

    if not path.is_file():
        raise FileHandlerError(f"Файл конфигурации {path} не найден")

    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Некорректный JSON: {e}", 'config', str(path))
    except OSError as e:
        raise FileHandlerError(f"Ошибка чтения {path}: {e}")

    if not isinstance(data, dict):
        raise ValidationError("Конфигурация должна быть JSON объектом", 'config', type(data).__name__)

    return data


__all__ = [
    'FileHandlerError',
    'ImageNotFoundError',
    'ImageFormatError',
    'DatasetError',
    'load_gray',
    'load_mask',
    'save_gray_png',
    'save_mask',
    'save_overlay',
    'save_neutrosophic_maps',
    'discover_experts',
    'resolve_expert',
    'index_dataset',
    'report_to_frame',
    'write_report',
    'load_json_config'
]
