"""
Командная строка ncmseg
=======================

Подкоманды:
    segment   - сегментация одного B-скана, запись маски и наложения
    evaluate  - сегментация набора данных и отчет по метрикам
    transform - запись карт T, I, F, delta в PNG
    phantom   - генерация синтетического B-скана и его маски

Коды завершения:
    0 - успех
    1 - ошибка аргументов или конфигурации
    2 - ошибка ввода-вывода или набора данных
    3 - численная ошибка или ошибка генерации фантома

Пример:
    ncmseg phantom phantom.png phantom_mask.png --seed 1
    ncmseg segment phantom.png -o mask.png --overlay overlay.png
    ncmseg evaluate data/ --expert 1 --report report.json
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from . import __version__
from .core.clustering import NumericError
from .core.neutrosophic import to_neutrosophic
from .core.pipeline import segment_bscan
from .core.validator import ParamValidator, ValidationError
from .data.phantom import PhantomError, PhantomSpec, generate_phantom
from .models.config import CliConfig, WeightForm
from .models.dataset import ScanEntry
from .models.image import BinaryMask
from .utils.file_handler import (
    DatasetError,
    FileHandlerError,
    discover_experts,
    index_dataset,
    load_gray,
    load_json_config,
    load_mask,
    save_gray_png,
    save_mask,
    save_neutrosophic_maps,
    save_overlay,
    resolve_expert,
    write_report
)
from .utils.formatter import format_report_header, format_segmentation_summary
from .utils.metrics import ConfusionCounts, SegmentationStatistics, confusion

logger = logging.getLogger(__name__)

THREADS_ENV = 'NCMSEG_THREADS'
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    """Ошибка разбора аргументов командной строки"""
    pass


class CliArgumentParser(argparse.ArgumentParser):
    """Парсер, который сообщает об ошибках исключением вместо выхода с кодом 2"""

    def error(self, message: str):
        raise UsageError(message)


# ===== Конфигурация =====

def _flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    """Значения флагов в ключах конфигурации (None - флаг не задан)"""
    values = {key: getattr(args, key, None) for key in CliConfig.allowed_keys()}
    values['format'] = getattr(args, 'report_format', None)
    values['overlay'] = True if getattr(args, 'overlay', None) else None
    return values


def build_config(args: argparse.Namespace) -> CliConfig:
    """
    Собрать конфигурацию: флаги > файл --config > значения по умолчанию

    Raises:
        ValidationError: неизвестные ключи или некорректные значения
        FileHandlerError: файл конфигурации не найден
    """
    file_config = load_json_config(args.config) if getattr(args, 'config', None) else None
    return CliConfig.from_sources(_flag_values(args), file_config)


def resolve_workers(requested: Optional[int]) -> int:
    """
    Число потоков оценки

    По умолчанию используется число процессоров; переменная окружения
    NCMSEG_THREADS задает верхнюю границу.

    Raises:
        ValidationError: значение NCMSEG_THREADS не положительное целое
    """
    workers = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)

    if cap is not None and cap.strip():
        try:
            cap_value = int(cap)
        except ValueError:
            raise ValidationError("Ожидалось целое число", THREADS_ENV, cap)
        workers = min(workers, ParamValidator.validate_int(cap_value, THREADS_ENV, minimum=1))

    return workers


def _load_roi(config: CliConfig) -> Optional[BinaryMask]:
    return load_mask(config.roi) if config.roi else None


def _overlay_path(args: argparse.Namespace, config: CliConfig) -> Optional[Path]:
    if args.overlay:
        return Path(args.overlay)
    if config.overlay:
        output = Path(args.output)
        return output.with_name(f"{output.stem}_overlay.png")
    return None


# ===== Подкоманды =====

def cmd_segment(args: argparse.Namespace) -> int:
    """Сегментация одного B-скана"""
    config = build_config(args)
    image = load_gray(args.image)

    result = segment_bscan(image, config.ncm, roi=_load_roi(config), method=config.method)
    save_mask(result.mask, args.output)

    overlay = _overlay_path(args, config)
    if overlay is not None:
        save_overlay(image, result.mask, overlay)

    state = result.state
    for line in format_segmentation_summary(
        state.iterations, state.final_cost, result.elapsed,
        result.mask.fluid_pixels, str(state.stop_reason)
    ):
        print(line)

    return EXIT_OK


def _evaluate_scan(
    item: Tuple[str, ScanEntry],
    expert: str,
    config: CliConfig,
    roi: Optional[BinaryMask]
) -> Tuple[str, str, ConfusionCounts]:
    subject_id, scan = item
    image = load_gray(scan.image_path)
    truth = load_mask(scan.masks[expert])

    result = segment_bscan(image, config.ncm, roi=roi, method=config.method)
    counts = confusion(result.mask, truth)

    logger.info("%s/%s: %d итераций, счетчики %s", subject_id, scan.stem, result.state.iterations, counts)
    return subject_id, scan.stem, counts


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Сегментация всех сканов набора данных и сравнение с разметкой эксперта"""
    config = build_config(args)
    root = Path(args.dataset)

    if not root.is_dir():
        raise DatasetError(f"Каталог набора данных {root} не найден", str(root))

    available = discover_experts(root)
    if not available:
        raise DatasetError(f"В {root} не найдено ни одной экспертной разметки", str(root))

    expert = resolve_expert(available, config.expert if config.expert is not None else available[0])
    index = index_dataset(root, experts=[expert])
    roi = _load_roi(config)
    workers = resolve_workers(config.threads)

    logger.info("Оценка %d сканов, эксперт %s, потоков %d", index.scan_count, expert, workers)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda item: _evaluate_scan(item, expert, config, roi), index.iter_scans()))

    stats = SegmentationStatistics(metadata={
        'package': 'ncmseg',
        'version': __version__,
        'method': config.method,
        'expert': expert,
        'config': config.ncm.to_dict(),
        'excluded': len(index.warnings)
    })
    for subject_id, image_id, counts in results:
        stats.add(subject_id, image_id, counts)

    report = stats.build_report()
    write_report(report, args.report, config.report_format)

    print(format_report_header(f"{config.method.upper()} против эксперта {expert}"))
    for line in report.summary_lines():
        print(line)

    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    """Запись нейтрософских карт в PNG"""
    config = build_config(args)
    image = load_gray(args.image)

    neutrosophic = to_neutrosophic(image, config.ncm.window)
    for name, path in save_neutrosophic_maps(neutrosophic, args.prefix).items():
        print(f"{name}: {path}")

    return EXIT_OK


def cmd_phantom(args: argparse.Namespace) -> int:
    """Генерация синтетического B-скана"""
    spec = PhantomSpec(
        width=args.width,
        height=args.height,
        layer_count=args.layers,
        blob_count=args.blobs,
        blob_intensity=(args.blob_min, args.blob_max),
        background_intensity=(args.bg_min, args.bg_max),
        noise_std=args.noise,
        seed=args.seed,
        blob_radius=(args.radius_min, args.radius_max)
    )
    image, mask = generate_phantom(spec)

    save_gray_png(image.data, args.image_out, bits=args.bits)
    save_mask(mask, args.mask_out)

    print(f"image: {args.image_out}")
    print(f"mask: {args.mask_out} (жидкость: {mask.fluid_pixels})")
    return EXIT_OK


# ===== Парсер =====

def _add_ncm_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('параметры кластеризации')
    group.add_argument('--clusters', type=int, help='число кластеров (по умолчанию 12)')
    group.add_argument('--m', type=float, help='показатель нечеткости (по умолчанию 2.0)')
    group.add_argument('--w1', type=float, help='вес истинности (по умолчанию 0.75)')
    group.add_argument('--w2', type=float, help='вес неопределенности (по умолчанию 0.125)')
    group.add_argument('--w3', type=float, help='вес ложности (по умолчанию 0.125)')
    group.add_argument('--delta', type=float, help='параметр шума (по умолчанию 0.1)')
    group.add_argument('--window', type=int, help='нечетное окно усреднения (по умолчанию 5)')
    group.add_argument('--eps', type=float, help='порог сдвига центров (по умолчанию 1e-5)')
    group.add_argument('--max-iter', dest='max_iter', type=int, help='предел итераций (по умолчанию 100)')
    group.add_argument('--distance-floor', dest='distance_floor', type=float, help='нижняя граница расстояний')
    group.add_argument('--seed', type=int, help='зерно (зарезервировано: сегментация детерминирована и его не читает)')
    group.add_argument('--weight-form', dest='weight_form', choices=[w.value for w in WeightForm],
                       help='форма весового множителя (по умолчанию printed)')
    group.add_argument('--min-area', dest='min_area', type=int, help='минимальная площадь компоненты жидкости')
    group.add_argument('--method', choices=list(CliConfig.METHODS), help='алгоритм кластеризации')
    group.add_argument('--roi', help='маска области интереса')
    group.add_argument('--config', help='JSON файл конфигурации')


def build_parser() -> CliArgumentParser:
    """Парсер аргументов со всеми подкомандами"""
    parser = CliArgumentParser(prog='ncmseg', description='Сегментация жидкости на OCT B-сканах методом NCM')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('-v', '--verbose', action='count', default=0, help='подробный журнал (-v, -vv)')

    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    segment = commands.add_parser('segment', help='сегментация одного B-скана')
    segment.add_argument('image', help='входное изображение')
    segment.add_argument('-o', '--output', required=True, help='путь к маске PNG')
    segment.add_argument('--overlay', help='путь к изображению с наложением маски')
    _add_ncm_arguments(segment)
    segment.set_defaults(func=cmd_segment)

    evaluate = commands.add_parser('evaluate', help='оценка на наборе данных')
    evaluate.add_argument('dataset', help='корневой каталог набора данных')
    evaluate.add_argument('--expert', help='эксперт для сравнения (по умолчанию первый)')
    evaluate.add_argument('--report', required=True, help='путь к отчету')
    evaluate.add_argument('--format', dest='report_format', choices=list(CliConfig.FORMATS), help='формат отчета')
    evaluate.add_argument('--threads', type=int, help='число потоков')
    _add_ncm_arguments(evaluate)
    evaluate.set_defaults(func=cmd_evaluate)

    transform = commands.add_parser('transform', help='карты T, I, F, delta')
    transform.add_argument('image', help='входное изображение')
    transform.add_argument('prefix', help='префикс выходных файлов')
    transform.add_argument('--window', type=int, help='нечетное окно усреднения (по умолчанию 5)')
    transform.add_argument('--config', help='JSON файл конфигурации')
    transform.set_defaults(func=cmd_transform)

    defaults = PhantomSpec()
    phantom = commands.add_parser('phantom', help='синтетический B-скан')
    phantom.add_argument('image_out', help='путь к изображению PNG')
    phantom.add_argument('mask_out', help='путь к маске PNG')
    phantom.add_argument('--width', type=int, default=defaults.width)
    phantom.add_argument('--height', type=int, default=defaults.height)
    phantom.add_argument('--layers', type=int, default=defaults.layer_count)
    phantom.add_argument('--blobs', type=int, default=defaults.blob_count)
    phantom.add_argument('--blob-min', dest='blob_min', type=float, default=defaults.blob_intensity[0])
    phantom.add_argument('--blob-max', dest='blob_max', type=float, default=defaults.blob_intensity[1])
    phantom.add_argument('--bg-min', dest='bg_min', type=float, default=defaults.background_intensity[0])
    phantom.add_argument('--bg-max', dest='bg_max', type=float, default=defaults.background_intensity[1])
    phantom.add_argument('--radius-min', dest='radius_min', type=float, default=defaults.blob_radius[0])
    phantom.add_argument('--radius-max', dest='radius_max', type=float, default=defaults.blob_radius[1])
    phantom.add_argument('--noise', type=float, default=defaults.noise_std)
    phantom.add_argument('--seed', type=int, default=defaults.seed)
    phantom.add_argument('--bits', type=int, choices=(8, 16), default=8, help='разрядность изображения')
    phantom.set_defaults(func=cmd_phantom)

    return parser


def configure_logging(verbosity: int) -> None:
    """WARNING по умолчанию, INFO с -v, DEBUG с -vv; журнал пишется в stderr"""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger('ncmseg').setLevel(level)


def _fail(code: int, error: BaseException) -> int:
    print(f"ncmseg: ошибка: {error}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Точка входа командной строки

    Args:
        argv: аргументы (None - sys.argv[1:])

    Returns:
        int: код завершения 0/1/2/3
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(EXIT_USAGE, e)

    configure_logging(args.verbose)

    # DatasetError - одновременно ValidationError, но код у него файловый
    try:
        return args.func(args)
    except (FileHandlerError, OSError) as e:
        return _fail(EXIT_IO, e)
    except (ValidationError, UsageError) as e:
        return _fail(EXIT_USAGE, e)
    except (NumericError, PhantomError) as e:
        return _fail(EXIT_NUMERIC, e)


if __name__ == '__main__':
    sys.exit(main())
