import numpy as np
import pytest

from generators import natural_image
from irmir import Image, encode_image

# filled by test_acceptance: criterion id -> (passed, detail)
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{status}] {key}: {detail}")


def _rgb(rng, w, h):
    return np.stack([natural_image(rng, w, h) for _ in range(3)], axis=-1).astype(np.uint8)


@pytest.fixture(scope="session")
def image_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(123)
    nat = _rgb(rng, 64, 48)
    encode_image(Image.from_array(nat), d / "natural.png")
    brighter = np.clip(np.floor(nat * 1.2 + 0.5), 0, 255).astype(np.uint8)
    encode_image(Image.from_array(brighter), d / "brighter.png")
    encode_image(Image.from_array(_rgb(rng, 64, 48)), d / "other.ppm")
    encode_image(Image.from_array(np.full((10, 12, 3), 100, np.uint8)), d / "const.png")
    encode_image(Image.from_array(np.zeros((10, 12, 3), np.uint8)), d / "blank.png")
    a = np.array([[0, 0], [1, 1]], np.uint8)
    b = np.array([[0, 1], [0, 1]], np.uint8)
    encode_image(Image.from_array(a), d / "indep_a.png")
    encode_image(Image.from_array(b), d / "indep_b.png")
    encode_image(Image.from_array(_rgb(rng, 30, 20)), d / "small.png")
    return d
