import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_thin_map(rng, shape=(32, 32), n_strokes=4):
    """Random thin binary map built from dilated strokes, then thinned."""
    from obkit.raster import dilate_disk, morph_thin

    h, w = shape
    out = np.zeros(shape, dtype=bool)
    for _ in range(n_strokes):
        x, y = rng.integers(0, w), rng.integers(0, h)
        pts = [(x, y)]
        for _ in range(rng.integers(5, 20)):
            x = int(np.clip(x + rng.integers(-1, 2), 0, w - 1))
            y = int(np.clip(y + rng.integers(-1, 2), 0, h - 1))
            pts.append((x, y))
        out |= dilate_disk(pts, int(rng.integers(0, 3)), (w, h))
    return morph_thin(out)
