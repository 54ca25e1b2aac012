import pytest

from mirror_teleport import Couplings, compute_couplings
from mirror_teleport.cli import bundled_config_path, load_config

COEFF_FIELDS = (
    "stokes_n",
    "mirror_n",
    "stokes_mirror",
    "mirror_anti",
    "anti_n",
    "stokes_anti",
)


@pytest.fixture(scope="session")
def moderate():
    """Well-separated rates: every route is benign in float64."""
    return Couplings.from_rates(2.0, 3.0)


@pytest.fixture(scope="session")
def bench_config():
    return load_config(bundled_config_path())


@pytest.fixture(scope="session")
def bench_couplings(bench_config):
    """Near-degenerate rates (ratio ~1414) from the bundled benchmark config."""
    return compute_couplings(bench_config.params)
