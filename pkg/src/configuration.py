#!/usr/bin/env python
# encoding: utf-8

"""
@Author:              Edoardo Altamura
@Year:                2026
@Email:               edoardo.altamura@outlook.com
@Copyright:           Copyright (c) 2026 Edoardo Altamura
@Last Modified by:    Edoardo Altamura
@Latest release:      18 Oct 2026
@Project:             Underwater image enhancement (ADR, desk-scale)

Released under the MIT License. See the LICENSE file in the project root.
"""
from dataclasses import dataclass, field, fields, asdict, replace
from typing import Any, Dict, List, Type, TypeVar
import json
import os.path
import pathlib

path_project = pathlib.Path(__file__).parent.parent.resolve()

T = TypeVar('T')


class ConfigError(ValueError):
    """Raised for unknown keys, wrong types or out-of-range configuration values."""


def load_flat_json(cls: Type[T], source: Any) -> T:
    """
    Build a flat dataclass from a key-value JSON file (or an already parsed dictionary).

    Unknown keys and values of the wrong type are rejected instead of being ignored, so a typo in a
    configuration file cannot silently fall back to a default.

    :param cls: The dataclass to instantiate.
    :param source: Path to a JSON file, or a dictionary.
    :return: An instance of ``cls``.
    :raises ConfigError: On unknown keys, wrong types or invalid JSON.
    :raises FileNotFoundError: If the path does not exist.

    Example usage:
        ```python
        config = load_flat_json(Config, 'configs/desk.json')
        ```
    """
    if isinstance(source, (str, pathlib.Path)):
        if not os.path.isfile(source):
            raise FileNotFoundError(f"Configuration file {source} not found. Check the path and try again.")
        with open(source, 'r') as fh:
            try:
                source = json.load(fh)
            except json.JSONDecodeError as error:
                raise ConfigError(f"Configuration file is not valid JSON: {error}") from None

    if not isinstance(source, dict):
        raise ConfigError(f"A configuration must be a flat JSON object, got {type(source).__name__}.")

    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(source) - set(known))
    if unknown:
        raise ConfigError(f"Unknown configuration keys {unknown}. Valid keys are: {sorted(known)}.")

    values = {}
    for key, value in source.items():
        expected = known[key].type
        expected = {'int': int, 'float': float, 'bool': bool, 'str': str}.get(expected, expected)
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if expected in (int, float, str, bool) and (not isinstance(value, expected) or
                                                     (expected is int and isinstance(value, bool))):
            raise ConfigError(f"Configuration key '{key}' expects {expected.__name__}, got {value!r}.")
        values[key] = value
    return cls(**values)


@dataclass(frozen=True)
class AblationToggles:
    """
    One switch per ablation row: each disables a composition term, a stage or a loss term.
    """
    turbidity_term: bool = True
    noise_term: bool = True
    retinex_stage: bool = True
    unetpp_stage: bool = True
    perc_loss: bool = True
    ssim_loss: bool = True

    @classmethod
    def without(cls, name: str) -> 'AblationToggles':
        if name not in {f.name for f in fields(cls)}:
            raise ConfigError(f"Unknown ablation toggle '{name}'.")
        return replace(cls(), **{name: False})


ABLATION_LABELS = {
    'turbidity_term': 'w/o Turbidity term',
    'noise_term': 'w/o Noise term',
    'retinex_stage': 'w/o Retinex stage',
    'unetpp_stage': 'w/o U-Net++ stage',
    'perc_loss': 'w/o L_perc',
    'ssim_loss': 'w/o L_SSIM',
}


@dataclass
class Config:
    """
    Run configuration, read from flat key-value JSON. Defaults follow the published training recipe;
    desk-scale runs override ``image_size``, ``epochs`` and ``base_width``.
    """
    image_size: int = 256
    batch_size: int = 8
    epochs: int = 100
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    lambda1: float = 1.0
    lambda2: float = 0.5
    lambda3: float = 0.1
    lambda4: float = 0.3
    lambda5: float = 0.2
    turbidity_term: bool = True
    noise_term: bool = True
    retinex_stage: bool = True
    unetpp_stage: bool = True
    perc_loss: bool = True
    ssim_loss: bool = True
    seed: int = 0
    dataset: str = 'data'
    checkpoint: str = 'model.adr'
    run_log: str = 'run_log.csv'
    checkpoint_every: int = 0
    lr_schedule: str = 'constant'
    strict_deterministic: bool = False
    checked: bool = False
    dense_skips: bool = True
    attention_ffn: bool = False
    base_width: int = 64
    n_jobs: int = 1
    allow_png: bool = False
    test_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.image_size < 8 or self.image_size % 8:
            raise ConfigError(f"image_size must be a positive multiple of 8, got {self.image_size}.")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be at least 1, got {self.batch_size}.")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}.")
        if self.checkpoint_every < 0:
            raise ConfigError(f"checkpoint_every must be non-negative, got {self.checkpoint_every}.")
        for name in ('lambda1', 'lambda2', 'lambda3', 'lambda4', 'lambda5'):
            if getattr(self, name) < 0:
                raise ConfigError(f"Loss weight {name} must be non-negative, got {getattr(self, name)}.")
        if self.lr_schedule != 'constant':
            raise ConfigError(f"Only the 'constant' learning-rate schedule is available, got '{self.lr_schedule}'.")
        if self.base_width < 1:
            raise ConfigError(f"base_width must be a positive integer, got {self.base_width}.")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}.")

    @classmethod
    def from_json(cls, source: Any) -> 'Config':
        return load_flat_json(cls, source)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def save(self, path: str) -> None:
        with open(path, 'w') as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @property
    def weights(self):
        from .losses import LossWeights
        return LossWeights(self.lambda1, self.lambda2, self.lambda3, self.lambda4, self.lambda5)

    @property
    def ablation(self) -> AblationToggles:
        return AblationToggles(**{f.name: getattr(self, f.name) for f in fields(AblationToggles)})

    @property
    def n_workers(self) -> int:
        return 1 if self.strict_deterministic else self.n_jobs

    def with_ablation(self, toggles: AblationToggles) -> 'Config':
        return replace(self, **asdict(toggles))

    def architecture(self) -> Dict[str, Any]:
        """The fields that determine parameter names and shapes; checkpoints must agree on all of them."""
        return {'base_width': self.base_width, 'dense_skips': self.dense_skips, 'attention_ffn': self.attention_ffn}


@dataclass
class _RunConfigPaths:
    """
    Default locations for generated datasets, training runs and reports.
    """
    _base: str = str(path_project)
    _descriptions: List[str] = field(default_factory=lambda: ['data', 'runs', 'reports'])

    def __post_init__(self):
        for description in self._descriptions:
            setattr(self, description, os.path.join(self._base, description))

    def ensure(self, description: str) -> str:
        """
        Return the directory for ``description``, creating it on first use.
        """
        directory = getattr(self, description)
        if not os.path.isdir(directory):
            print(f'\N{FILE FOLDER} | Creating directory: {directory:s}')
            os.makedirs(directory, exist_ok=True)
        return directory


@dataclass(frozen=True)
class ConfigPaths:
    """
    Static project paths: the bundled matplotlib styles and the run directories.
    """
    mplstyles: str = os.path.join(path_project, 'src', 'mplstyles')
    runs: _RunConfigPaths = field(default_factory=_RunConfigPaths)

    def __repr__(self):
        return f'This is a {self.__class__.__name__} instance containing static paths to project directories.'


cfg_paths = ConfigPaths()
