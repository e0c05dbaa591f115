"""Тесты ввода-вывода: растры, набор данных, отчеты"""

import json

import numpy as np
import pandas as pd
import pytest
from PIL import Image

from ncmseg.core.neutrosophic import to_neutrosophic
from ncmseg.core.validator import ValidationError
from ncmseg.models.dataset import DatasetLayout
from ncmseg.models.image import BinaryMask, GrayImage
from ncmseg.utils.file_handler import (
    DatasetError,
    FileHandlerError,
    ImageFormatError,
    ImageNotFoundError,
    discover_experts,
    index_dataset,
    load_gray,
    load_json_config,
    load_mask,
    report_to_frame,
    resolve_expert,
    save_gray_png,
    save_mask,
    save_neutrosophic_maps,
    save_overlay,
    write_report
)
from ncmseg.utils.metrics import ConfusionCounts, MetricsReport, SegmentationStatistics


def write_tiny_dataset(root, subjects=4, scans=49, experts=('expert1', 'expert2'), size=(6, 8)):
    """Набор данных из маленьких однотонных сканов"""
    image = np.full(size, 128, dtype=np.uint8)
    mask = np.zeros(size, dtype=np.uint8)
    mask[1:3, 1:3] = 255

    for s in range(subjects):
        subject_dir = root / f"subject{s + 1}"
        (subject_dir / 'images').mkdir(parents=True)
        for expert in experts:
            (subject_dir / 'masks' / expert).mkdir(parents=True)

        for k in range(scans):
            stem = f"bscan_{k:03d}"
            Image.fromarray(image).save(subject_dir / 'images' / f"{stem}.png")
            for expert in experts:
                Image.fromarray(mask).save(subject_dir / 'masks' / expert / f"{stem}.png")

    return root


def sample_report():
    stats = SegmentationStatistics({'expert': 'expert1'})
    stats.add('s1', 'b1', ConfusionCounts(tp=9, fp=1, tn=80, fn=10))
    stats.add('s2', 'b1', ConfusionCounts(tp=0, fp=0, tn=100, fn=0))
    return stats.build_report()


class TestLoadGray:

    def test_pgm_8bit(self, tmp_path):
        path = tmp_path / 'scan.pgm'
        Image.fromarray(np.array([[0, 51], [255, 102]], dtype=np.uint8)).save(path)

        image = load_gray(path)
        assert image.shape == (2, 2)
        assert image.data.tolist() == pytest.approx([[0.0, 0.2], [1.0, 0.4]])

    def test_png_16bit(self, tmp_path):
        path = tmp_path / 'scan16.png'
        Image.fromarray(np.array([[0, 65535], [32768, 1000]], dtype=np.uint16)).save(path)

        image = load_gray(path)
        assert image.data[0, 1] == pytest.approx(1.0)
        assert image.data[1, 0] == pytest.approx(32768 / 65535)

    def test_save_16bit_round_trip(self, tmp_path, rng):
        values = rng.random((5, 7))
        path = save_gray_png(values, tmp_path / 'values.png', bits=16)
        assert np.max(np.abs(load_gray(path).data - values)) <= 0.5 / 65535 + 1e-12

    def test_color_rejected(self, tmp_path):
        path = tmp_path / 'color.png'
        Image.new('RGB', (4, 4), (10, 20, 30)).save(path)

        with pytest.raises(ImageFormatError) as info:
            load_gray(path)
        assert info.value.format_name == 'RGB'

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageNotFoundError):
            load_gray(tmp_path / 'missing.png')

    def test_missing_file_is_file_not_found(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_gray(tmp_path / 'missing.png')

    def test_not_an_image(self, tmp_path):
        path = tmp_path / 'notes.png'
        path.write_text('not an image')
        with pytest.raises(ImageFormatError):
            load_gray(path)

    def test_bad_bit_depth(self, tmp_path):
        with pytest.raises(ValidationError):
            save_gray_png(np.zeros((2, 2)), tmp_path / 'x.png', bits=12)


class TestMasks:

    def test_round_trip(self, tmp_path, rng):
        mask = BinaryMask((rng.random((9, 11)) < 0.4).astype(np.uint8))
        path = save_mask(mask, tmp_path / 'nested' / 'mask.png')

        assert load_mask(path) == mask
        with Image.open(path) as img:
            assert img.mode == 'L'
            assert set(np.unique(np.array(img)).tolist()) <= {0, 255}

    def test_any_nonzero_is_fluid(self, tmp_path):
        path = tmp_path / 'mask.png'
        Image.fromarray(np.array([[0, 1], [200, 0]], dtype=np.uint8)).save(path)
        assert load_mask(path).data.tolist() == [[0, 1], [1, 0]]

    def test_overlay(self, tmp_path):
        image = GrayImage(np.full((4, 4), 0.2))
        mask = BinaryMask.zeros(4, 4)
        mask_data = mask.data.copy()
        mask_data[0, 0] = 1

        path = save_overlay(image, BinaryMask(mask_data), tmp_path / 'overlay.png')

        with Image.open(path) as img:
            rgb = np.array(img.convert('RGB')).astype(int)
        assert rgb[0, 0, 0] > rgb[0, 0, 1]
        assert rgb[1, 1, 0] == rgb[1, 1, 1] == rgb[1, 1, 2]

    def test_overlay_shape_mismatch(self, tmp_path):
        with pytest.raises(ValidationError):
            save_overlay(GrayImage(np.zeros((3, 3))), BinaryMask.zeros(4, 4), tmp_path / 'o.png')

    def test_neutrosophic_maps(self, tmp_path, rng):
        ns = to_neutrosophic(GrayImage(rng.random((6, 6))), 3)
        paths = save_neutrosophic_maps(ns, tmp_path / 'maps' / 'scan')

        assert sorted(paths) == ['delta', 'f', 'i', 't']
        for name, path in paths.items():
            assert path.endswith(f"scan_{name}.png")
            assert load_gray(path).shape == (6, 6)


class TestIndexDataset:

    def test_full_layout(self, tmp_path):
        root = write_tiny_dataset(tmp_path / 'data')
        index = index_dataset(root)

        assert index.experts == ['expert1', 'expert2']
        assert len(index.subjects) == 4
        assert index.scan_count == 4 * 49
        assert index.warnings == []

        first = index.subjects[0].scans[0]
        assert first.stem == 'bscan_000'
        assert set(first.masks) == {'expert1', 'expert2'}

    def test_lexicographic_order(self, tmp_path):
        root = write_tiny_dataset(tmp_path / 'data', subjects=2, scans=3)
        index = index_dataset(root, ['expert1'])

        pairs = [(subject, scan.stem) for subject, scan in index.iter_scans()]
        assert pairs == sorted(pairs)

    def test_orphan_scan_excluded(self, tmp_path):
        root = write_tiny_dataset(tmp_path / 'data', subjects=2, scans=3)
        (root / 'subject2' / 'masks' / 'expert2' / 'bscan_001.png').unlink()

        index = index_dataset(root)
        assert index.scan_count == 5
        assert len(index.warnings) == 1
        assert 'subject2/bscan_001' in index.warnings[0]

        only_first = index_dataset(root, ['expert1'])
        assert only_first.scan_count == 6
        assert only_first.warnings == []

    def test_mask_size_mismatch_excluded(self, tmp_path):
        root = write_tiny_dataset(tmp_path / 'data', subjects=1, scans=2, experts=('expert1',))
        Image.fromarray(np.zeros((3, 3), dtype=np.uint8)).save(
            root / 'subject1' / 'masks' / 'expert1' / 'bscan_000.png'
        )

        index = index_dataset(root)
        assert index.scan_count == 1
        assert len(index.warnings) == 1

    def test_missing_root(self, tmp_path):
        with pytest.raises(DatasetError):
            index_dataset(tmp_path / 'nowhere')

    def test_empty_root(self, tmp_path):
        (tmp_path / 'empty').mkdir()
        with pytest.raises(DatasetError):
            index_dataset(tmp_path / 'empty')

    def test_empty_root_is_invalid_argument(self, tmp_path):
        (tmp_path / 'empty').mkdir()
        with pytest.raises(ValidationError) as info:
            index_dataset(tmp_path / 'empty')

        assert isinstance(info.value, FileHandlerError)
        assert info.value.field == 'dataset'
        assert info.value.value == str(tmp_path / 'empty')

    def test_no_scans(self, tmp_path):
        root = write_tiny_dataset(tmp_path / 'data', subjects=1, scans=1)
        (root / 'subject1' / 'images' / 'bscan_000.png').unlink()
        with pytest.raises(DatasetError):
            index_dataset(root)

    def test_custom_layout(self, tmp_path):
        root = tmp_path / 'data'
        (root / 'p1' / 'raw').mkdir(parents=True)
        (root / 'p1' / 'labels' / 'a').mkdir(parents=True)
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8)).save(root / 'p1' / 'raw' / 'x.png')
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8)).save(root / 'p1' / 'labels' / 'a' / 'x.png')

        layout = DatasetLayout(images_dir='raw', masks_dir='labels')
        index = index_dataset(root, layout=layout)
        assert index.experts == ['a']
        assert index.scan_count == 1

    def test_phantom_dataset(self, dataset):
        index = index_dataset(dataset)
        assert index.summary() == {'subjects': 2, 'scans': 4, 'experts': 2, 'warnings': 0}


class TestExperts:

    def test_discover(self, tmp_path):
        root = write_tiny_dataset(tmp_path / 'data', subjects=1, scans=1)
        assert discover_experts(root) == ['expert1', 'expert2']

    @pytest.mark.parametrize('value, expected', [('1', 'expert1'), (2, 'expert2'), ('expert2', 'expert2')])
    def test_resolve(self, value, expected):
        assert resolve_expert(['expert1', 'expert2'], value) == expected

    def test_resolve_unknown(self):
        with pytest.raises(ValidationError) as info:
            resolve_expert(['expert1', 'expert2'], 3)
        assert info.value.field == 'expert'


class TestWriteReport:

    def test_json(self, tmp_path):
        report = MetricsReport(average={'dice': 0.822345, 'sensitivity': None, 'precision': 0.5})
        path = write_report(report, tmp_path / 'report.json')

        with open(path, encoding='utf-8') as f:
            text = f.read()

        assert '"dice": 0.8223' in text
        assert '"precision": 0.5000' in text
        assert json.loads(text)['average']['precision'] == 0.5
        assert json.loads(text)['average']['sensitivity'] is None

    def test_json_structure(self, tmp_path):
        path = write_report(sample_report(), tmp_path / 'report.json', 'json')
        with open(path, encoding='utf-8') as f:
            data = json.load(f)

        assert set(data) == {'metadata', 'per_image', 'per_subject', 'average'}
        assert data['per_subject'][1]['dice'] is None
        assert data['average']['precision'] == 0.9

    def test_csv(self, tmp_path):
        path = write_report(sample_report(), tmp_path / 'report.csv', 'csv')
        frame = pd.read_csv(path, keep_default_na=False)

        assert list(frame.columns) == ['scope', 'subject', 'image', 'dice', 'sensitivity',
                                       'precision', 'tp', 'fp', 'tn', 'fn']
        assert frame['scope'].tolist() == ['image', 'image', 'subject', 'subject', 'average']
        assert frame.loc[4, 'tp'] == ''
        assert frame.loc[1, 'dice'] == ''
        assert frame.loc[0, 'dice'] == '0.6207'

    def test_frame(self):
        frame = report_to_frame(sample_report())
        assert frame['tp'].isna().tolist() == [False, False, False, False, True]
        assert frame['dice'].isna().tolist() == [False, True, False, True, False]

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValidationError):
            write_report(sample_report(), tmp_path / 'report.xlsx', 'xlsx')


class TestJsonConfig:

    def test_load(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text('{"clusters": 8, "m": 2.5}')
        assert load_json_config(path) == {'clusters': 8, 'm': 2.5}

    def test_missing(self, tmp_path):
        with pytest.raises(FileHandlerError):
            load_json_config(tmp_path / 'missing.json')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text('{clusters: 8')
        with pytest.raises(ValidationError):
            load_json_config(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text('[1, 2]')
        with pytest.raises(ValidationError):
            load_json_config(path)
