import numpy as np
import pytest

from pitchgen.camera import fixed_broadcast_camera
from pitchgen.geometry import FieldDimensions, build_field_model


@pytest.fixture(scope="session")
def field_model():
    return build_field_model(FieldDimensions())


@pytest.fixture(scope="session")
def fixed_cam():
    return fixed_broadcast_camera()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
