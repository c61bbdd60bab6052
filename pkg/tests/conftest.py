import numpy as np
import pytest

from scriptid.corpus import load_glyphs


@pytest.fixture(scope="session")
def glyph_bank():
    return load_glyphs()


def random_binary(rng, h, w, density=0.5):
    return (rng.random((h, w)) < density).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
