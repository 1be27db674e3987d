import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FAST_CFG = """
k_grid = 4..6
lda_iters = 150
sg_epochs = 3
sg_dim = 32
gru_hidden = 16
lstm_hidden = 16
max_epochs = 3
"""


@pytest.fixture(scope="session")
def fast_cfg_text():
    return FAST_CFG


@pytest.fixture(scope="session")
def sample_run(tmp_path_factory):
    """One small pipeline run over the bundled sample, shared across tests."""
    from topicsent.config import parse_config
    from topicsent.pipeline import run_pipeline
    root = tmp_path_factory.mktemp("runs")
    cfg = parse_config(FAST_CFG, run_dir=str(root), run_id="shared")
    return run_pipeline(cfg)
