import numpy as np
import pytest

from torusdyn import Loop, RotationNumber


@pytest.fixture(scope="session")
def golden() -> RotationNumber:
    return RotationNumber.golden()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def band_loop(rng, n=256, modes=(1, -1, 2), amp=0.1, base=1.0):
    """Non-vanishing loop: base + small band-limited perturbation."""
    d = {0: complex(base)}
    for k in modes:
        d[k] = amp * (rng.normal() + 1j * rng.normal())
    return Loop.from_modes(d, n)
