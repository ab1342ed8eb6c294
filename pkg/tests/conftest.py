import numpy as np
import pytest

from kolflow.core import ArtifactStore, ArtifactType, LandmarkSet, Raster
from kolflow.registry import Registry, register_builtin_services


@pytest.fixture
def store(tmp_path):
    root = tmp_path / "store"
    root.mkdir()
    return ArtifactStore(root)


@pytest.fixture
def registry():
    reg = Registry()
    register_builtin_services(reg)
    return reg


@pytest.fixture
def empty_registry():
    return Registry()


def random_raster(rng: np.random.Generator, width: int, height: int,
                  channels: str = "RGB") -> Raster:
    depth = 3 if channels == "RGB" else 4
    data = rng.integers(0, 256, size=(height, width, depth), dtype=np.uint8)
    return Raster.from_array(data)


def random_landmarks(rng: np.random.Generator, scale: float = 100.0,
                     offset: float = 50.0) -> LandmarkSet:
    pts = rng.random((68, 2)) * scale + offset
    return LandmarkSet.from_array(pts)


@pytest.fixture
def sample_inputs(store):
    """Store one artifact per conventional input role; returns role -> ref."""
    rng = np.random.default_rng(7)
    refs = {
        "identity": store.store_value(random_raster(rng, 64, 64),
                                      ArtifactType.PERSON_IMAGE)[0],
        "garment": store.store_value(random_raster(rng, 16, 16),
                                     ArtifactType.GARMENT_REF)[0],
        "makeup_ref": store.store_value(random_raster(rng, 8, 8),
                                        ArtifactType.MAKEUP_REF)[0],
        "object_ref": store.store_value(random_raster(rng, 8, 8),
                                        ArtifactType.OBJECT_REF)[0],
        "background_spec": store.store_value("studio backdrop",
                                             ArtifactType.BACKGROUND_SPEC)[0],
        "landmarks": store.store_value(random_landmarks(rng),
                                       ArtifactType.LANDMARK_SET)[0],
    }
    return {role: str(ref) for role, ref in refs.items()}
