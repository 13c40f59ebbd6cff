import pytest

from skewflow import RunConfig, gallery
from skewflow.nonuniform import run_nonuniform_panel
from skewflow.probes import ratio_data
from skewflow.uniform import run_uniform_panel


@pytest.fixture(scope="session")
def config():
    return RunConfig()


@pytest.fixture(scope="session")
def systems():
    return {name: gallery.build(name) for name in gallery.GALLERY_NAMES}


@pytest.fixture(scope="session")
def ratio_cache(systems):
    return {name: ratio_data(s) for name, s in systems.items()}


@pytest.fixture(scope="session")
def uniform_panels(systems, ratio_cache, config):
    return {
        name: run_uniform_panel(s, config, data=ratio_cache[name])
        for name, s in systems.items()
    }


@pytest.fixture(scope="session")
def classifications(systems, uniform_panels, config):
    return {
        name: run_nonuniform_panel(s, config, uniform=uniform_panels[name])
        for name, s in systems.items()
    }
