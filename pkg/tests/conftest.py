"""Общие фикстуры тестов ncmseg"""

import numpy as np
import pytest

from ncmseg.data.phantom import PhantomSpec, generate_phantom
from ncmseg.utils.file_handler import save_gray_png, save_mask

# Почти квадратный кадр: доля жидкости та же, что у 512x496
SMALL_SPEC = PhantomSpec(width=128, height=124)

# Радиусы, при которых доля жидкости 4 включений лежит между 1/24 и 3/24
DATASET_SPEC = PhantomSpec(width=96, height=92, noise_std=0.0, blob_radius=(0.08, 0.095))


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: полноразмерные прогоны, пропуск через -m "not slow"')


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def small_phantom():
    return generate_phantom(SMALL_SPEC.with_updates(seed=7))


@pytest.fixture
def make_dataset(tmp_path):
    """Фабрика набора данных: root/<subject>/images и root/<subject>/masks/<expert>"""

    def build(subjects=2, scans=2, experts=('expert1', 'expert2'), spec=DATASET_SPEC, name='data'):
        root = tmp_path / name
        for s in range(subjects):
            subject_dir = root / f"subject{s + 1:02d}"
            for k in range(scans):
                image, mask = generate_phantom(spec.with_updates(seed=10 * s + k))
                stem = f"bscan_{k:03d}"
                save_gray_png(image.data, subject_dir / 'images' / f"{stem}.png")
                for expert in experts:
                    save_mask(mask, subject_dir / 'masks' / expert / f"{stem}.png")
        return root

    return build


@pytest.fixture
def dataset(make_dataset):
    return make_dataset()
