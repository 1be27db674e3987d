"""Flat key=value pipeline configuration."""
import dataclasses
import hashlib
import json
from dataclasses import dataclass, fields
from importlib import resources

from .errors import ConfigError


def sample_path(name):
    return str(resources.files("topicsent.data").joinpath("sample").joinpath(name))


@dataclass
class PipelineConfig:
    # inputs / layout
    train_csv: str = ""
    test_csv: str = ""
    run_dir: str = "runs"
    run_id: str = "default"
    seed: int = 0
    threads: int = 1
    # corpus
    min_df: int = 2
    max_df_frac: float = 0.5
    # topics
    k_grid: str = "2..20"
    alpha: float = 0.0  # 0 -> 50 / K
    beta: float = 0.01
    lda_iters: int = 1000
    top_n: int = 20
    coherence: str = "umass"
    fold_in_sweeps: int = 20
    lda_include_test: bool = False
    # embeddings
    sg_dim: int = 100
    sg_window: int = 5
    sg_negatives: int = 5
    sg_epochs: int = 5
    sg_lr: float = 0.025
    sg_min_count: int = 1
    # labeling
    scs_threshold: float = 0.2
    scs_exponent: float = 2.0
    label_top_n: int = 20
    label_mode: str = "aggregate"
    manual_labels: str = ""
    # classifier
    gru_hidden: int = 128
    lstm_hidden: int = 256
    batch_size: int = 32
    max_epochs: int = 10
    lr: float = 0.001
    patience: int = 3
    val_fraction: float = 0.1
    clip_norm: float = 5.0
    only_gru: bool = False
    only_bilstm: bool = False

    def __post_init__(self):
        if not self.train_csv:
            self.train_csv = sample_path("sample_train.csv")
        if not self.test_csv:
            self.test_csv = sample_path("sample_test.csv")
        if self.coherence not in ("umass", "npmi"):
            raise ConfigError(f"coherence must be umass or npmi, got {self.coherence!r}")
        if self.label_mode not in ("aggregate", "mean"):
            raise ConfigError(f"label_mode must be aggregate or mean, got {self.label_mode!r}")
        if self.only_gru and self.only_bilstm:
            raise ConfigError("only_gru and only_bilstm are mutually exclusive")
        for name, ok in _CHECKS.items():
            if not ok(getattr(self, name)):
                raise ConfigError(f"{name} = {getattr(self, name)!r} is out of range")
        from .topics import parse_grid
        parse_grid(self.k_grid)

    def hash(self, keys):
        blob = json.dumps({k: getattr(self, k) for k in sorted(keys)}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


_pos = lambda v: v > 0  # noqa: E731
_CHECKS = {
    "threads": _pos, "min_df": _pos, "max_df_frac": lambda v: 0 < v <= 1,
    "alpha": lambda v: v >= 0, "beta": _pos, "lda_iters": _pos, "top_n": lambda v: v >= 2,
    "fold_in_sweeps": lambda v: v >= 0, "sg_dim": _pos, "sg_window": _pos,
    "sg_negatives": _pos, "sg_epochs": _pos, "sg_lr": _pos, "sg_min_count": _pos,
    "scs_threshold": lambda v: 0 <= v <= 1, "scs_exponent": _pos, "label_top_n": _pos,
    "gru_hidden": _pos, "lstm_hidden": _pos, "batch_size": _pos, "max_epochs": _pos,
    "lr": _pos, "patience": lambda v: v >= 0, "val_fraction": lambda v: 0 <= v < 1,
    "clip_norm": _pos,
}


def _convert(name, typ, raw):
    try:
        if typ is bool or typ == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int or typ == "int":
            return int(raw)
        if typ is float or typ == "float":
            return float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {typ}") from None


def parse_config(text, **overrides):
    types = {f.name: f.type for f in fields(PipelineConfig)}
    values = {}
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in ln.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, types[key], raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)


def load_config(path=None, **overrides):
    text = ""
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text, **overrides)


def dump_config(cfg):
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in fields(cfg))
