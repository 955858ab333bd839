"""Pipeline configuration: flat ``section.key=value`` text files.

Every knob of every stage lives here with the module defaults; unknown
keys are rejected so typos fail loudly. The ``OCR_CONFIG`` environment
variable supplies a fallback config path and explicit CLI flags win over
file values.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from pathlib import Path

from .char_segmentation import ShapeThresholds
from .errors import ConfigError
from .recognition import TrainConfig


@dataclass(frozen=True)
class BinarizeConfig:
    window: int = 25
    offset: float = 10.0


@dataclass(frozen=True)
class DeskewConfig:
    enabled: bool = True
    min_angle: float = 0.5  # skip rotation for near-zero estimates


@dataclass(frozen=True)
class LineConfig:
    blur_radius: int = 2
    min_ink: int = 4


@dataclass(frozen=True)
class DebugConfig:
    dump_layout: bool = False
    dump_segmentation: bool = False
    out_dir: str = "debug"


@dataclass(frozen=True)
class EvalThresholds:
    min_word_seg: float = 0.0
    min_char_seg: float = 0.0
    min_overall: float = 0.0


@dataclass
class PipelineConfig:
    binarize: BinarizeConfig = field(default_factory=BinarizeConfig)
    deskew: DeskewConfig = field(default_factory=DeskewConfig)
    lines: LineConfig = field(default_factory=LineConfig)
    segmentation: ShapeThresholds = field(default_factory=ShapeThresholds)
    train: TrainConfig = field(default_factory=TrainConfig)
    debug: DebugConfig = field(default_factory=DebugConfig)
    eval: EvalThresholds = field(default_factory=EvalThresholds)
    class_map: str = ""
    jobs: int = 0  # 0 = available cores


_SECTIONS = ("binarize", "deskew", "lines", "segmentation", "train", "debug", "eval")
_SCALARS = ("class_map", "jobs")


def _coerce(raw: str, target_type: type, key: str):
    try:
        if target_type is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return target_type(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def apply_override(cfg: PipelineConfig, key: str, raw_value: str) -> None:
    """Set one dotted key (``segmentation.stroke_max_thickness=3``) in place."""
    if key in _SCALARS:
        current = getattr(cfg, key)
        setattr(cfg, key, _coerce(raw_value, type(current), key))
        return
    if "." not in key:
        raise ConfigError(f"unknown config key: {key}")
    section, _, name = key.partition(".")
    if section not in _SECTIONS:
        raise ConfigError(f"unknown config section: {section}")
    holder = getattr(cfg, section)
    fields = {f.name: f for f in dataclasses.fields(holder)}
    if name not in fields:
        raise ConfigError(f"unknown config key: {key}")
    value = _coerce(raw_value, type(getattr(holder, name)), key)
    setattr(cfg, section, replace(holder, **{name: value}))


def load_config(path: str | Path | None = None,
                overrides: dict[str, str] | None = None) -> PipelineConfig:
    """Defaults, then the config file, then explicit overrides."""
    cfg = PipelineConfig()
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            apply_override(cfg, key.strip(), value.strip())
    for key, value in (overrides or {}).items():
        apply_override(cfg, key, value)
    return cfg
