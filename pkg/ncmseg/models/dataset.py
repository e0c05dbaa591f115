"""
Модель набора данных OCT
========================

Предоставляет классы для представления набора B-сканов с экспертной
разметкой: субъекты, сканы и маски экспертов.

Основные классы:
    DatasetLayout - соглашение о структуре каталогов (точка расширения)
    ScanEntry - B-скан и пути к маскам экспертов
    SubjectEntry - субъект и его сканы
    DatasetIndex - индекс всего набора данных
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Tuple


@dataclass(frozen=True)
class DatasetLayout:
    """
    Структура каталогов набора данных

    По умолчанию:
        root/<subject>/images/<stem>.png|pgm|tif
        root/<subject>/masks/<expert>/<stem>.png

    Attributes:
        images_dir: имя каталога со сканами
        masks_dir: имя каталога с масками экспертов
        image_suffixes: допустимые расширения сканов
        mask_suffixes: допустимые расширения масок
    """

    images_dir: str = 'images'
    masks_dir: str = 'masks'
    image_suffixes: Tuple[str, ...] = ('.png', '.pgm', '.tif', '.tiff')
    mask_suffixes: Tuple[str, ...] = ('.png',)

    def image_dir(self, subject_dir: Path) -> Path:
        return subject_dir / self.images_dir

    def expert_dir(self, subject_dir: Path, expert: str) -> Path:
        return subject_dir / self.masks_dir / expert

    def find_mask(self, subject_dir: Path, expert: str, stem: str):
        """Путь к маске эксперта для скана или None"""
        for suffix in self.mask_suffixes:
            candidate = self.expert_dir(subject_dir, expert) / f"{stem}{suffix}"
            if candidate.is_file():
                return candidate
        return None


@dataclass
class ScanEntry:
    """
    B-скан с масками экспертов

    Attributes:
        image_path: путь к скану
        masks: пути к маскам по идентификатору эксперта
    """

    image_path: Path
    masks: Dict[str, Path] = field(default_factory=dict)

    @property
    def stem(self) -> str:
        return self.image_path.stem

    def __str__(self) -> str:
        return f"{self.stem} ({len(self.masks)} масок)"


@dataclass
class SubjectEntry:
    """
    Субъект (пациент) и его сканы

    Attributes:
        subject_id: идентификатор субъекта (имя каталога)
        scans: сканы в лексикографическом порядке
    """

    subject_id: str
    scans: List[ScanEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.scans)


@dataclass
class DatasetIndex:
    """
    Индекс набора данных

    Attributes:
        root: корневой каталог
        subjects: субъекты в лексикографическом порядке
        experts: эксперты, для которых строился индекс
        warnings: сообщения об исключенных сканах
    """

    root: Path
    subjects: List[SubjectEntry] = field(default_factory=list)
    experts: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def scan_count(self) -> int:
        return sum(len(subject) for subject in self.subjects)

    def iter_scans(self) -> Iterator[Tuple[str, ScanEntry]]:
        """Перебор пар (subject_id, скан) в порядке индекса"""
        for subject in self.subjects:
            for scan in subject.scans:
                yield subject.subject_id, scan

    def get_subject(self, subject_id: str) -> SubjectEntry:
        for subject in self.subjects:
            if subject.subject_id == subject_id:
                return subject
        raise KeyError(subject_id)

    def summary(self) -> Dict[str, int]:
        """Краткая статистика индекса"""
        return {
            'subjects': len(self.subjects),
            'scans': self.scan_count,
            'experts': len(self.experts),
            'warnings': len(self.warnings)
        }
