from dataclasses import fields

import pytest
from hypothesis import given
from hypothesis import strategies as st

from topicsent.config import PipelineConfig, dump_config, load_config, parse_config
from topicsent.errors import ConfigError


def test_defaults():
    cfg = parse_config("")
    assert cfg.k_grid == "2..20" and cfg.beta == 0.01 and cfg.lda_iters == 1000
    assert cfg.sg_dim == 100 and cfg.gru_hidden == 128 and cfg.lstm_hidden == 256
    assert cfg.batch_size == 32 and cfg.lr == 0.001 and cfg.patience == 3
    assert cfg.train_csv.endswith("sample_train.csv") and cfg.test_csv.endswith("sample_test.csv")


def test_types_and_comments():
    cfg = parse_config("seed = 7  # comment\nlr=0.01\nonly_gru = yes\n\nk_grid = 3,5\n")
    assert cfg.seed == 7 and isinstance(cfg.seed, int)
    assert cfg.lr == 0.01 and cfg.only_gru is True and cfg.k_grid == "3,5"


@pytest.mark.parametrize("text", [
    "bogus = 1", "seed = abc", "only_gru = maybe", "no equals sign", "coherence = cv",
    "batch_size = 0", "val_fraction = 1.0", "max_df_frac = 0", "k_grid = 0..3",
    "k_grid = x", "only_gru = 1\nonly_bilstm = 1", "label_mode = best",
])
def test_bad_config(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_overrides_win_and_none_is_ignored():
    cfg = parse_config("seed = 3\nrun_id = a", seed=9, run_id=None)
    assert cfg.seed == 9 and cfg.run_id == "a"


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.cfg")


def test_every_key_has_a_default():
    assert all(f.default is not f.default_factory for f in fields(PipelineConfig))
    PipelineConfig()


@given(seed=st.integers(0, 2**31), lr=st.floats(1e-6, 1.0), grid=st.sampled_from(["2..5", "4,8"]),
       flag=st.booleans())
def test_dump_parse_round_trip(seed, lr, grid, flag):
    cfg = parse_config("", seed=seed, lr=lr, k_grid=grid, lda_include_test=flag)
    assert parse_config(dump_config(cfg)) == cfg


def test_hash_depends_only_on_named_keys():
    a, b = parse_config("seed = 1"), parse_config("seed = 1\nlr = 0.5")
    assert a.hash(["seed", "k_grid"]) == b.hash(["seed", "k_grid"])
    assert a.hash(["lr"]) != b.hash(["lr"])
