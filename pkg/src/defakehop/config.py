"""Pipeline configuration: flat key=value text file, overridable by CLI
flags.  Unknown keys are rejected so typos fail loudly.
"""
from dataclasses import asdict, dataclass, fields

from .errors import InputError


@dataclass
class PipelineConfig:
    kernel_size: int = 3
    max_channels_per_hop: int = 10
    th_discard: float = 0.002
    th_forward: float = 0.01
    energy_target: float = 0.9
    pca_cap_hop1: int = 45
    pca_cap_hop2: int = 25
    pca_cap_hop3: int = 5
    channel_trees: int = 100
    channel_depth: int = 1
    final_trees: int = 100
    final_depth: int = 6
    learning_rate: float = 0.3
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0

    @property
    def pca_caps(self):
        return (self.pca_cap_hop1, self.pca_cap_hop2, self.pca_cap_hop3)

    def to_dict(self):
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def config_from_dict(values):
    cfg = PipelineConfig()
    for key, val in values.items():
        if key not in _FIELD_TYPES:
            raise InputError(f"unknown config key: {key}")
        typ = int if _FIELD_TYPES[key] in (int, "int") else float
        try:
            setattr(cfg, key, typ(val))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad value for config key {key}: {val!r}") from exc
    return cfg


def load_config(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InputError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                values[key.strip()] = val.strip()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(values)
