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
from dataclasses import dataclass, asdict
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple
import json
import os
import sys

import numpy as np
from tqdm.auto import tqdm

from .configuration import ConfigError, load_flat_json
from .functional import interpolation_matrix
from .io import IO
from .pipeline import parallel_map

DEPTH_KINDS = ('linear_gradient', 'radial', 'value_noise')


@dataclass
class SceneSpec:
    """
    Simulator settings for one family of underwater scenes.

    :ivar depth_kind: Shape of the depth field: ``linear_gradient`` (top 0, bottom 1), ``radial`` or ``value_noise``.
    :ivar A: Background light per channel, in (0, 1).
    :ivar beta: Per-channel attenuation (red largest by default), non-negative.
    :ivar noise_sigma: Standard deviation of the additive noise before depth attenuation.
    :ivar turbidity_strength: Amplitude of the turbidity scattering term.
    :ivar seed: Seed of the whole dataset.
    :ivar jitter: Relative per-sample perturbation of A and beta (0 disables it).
    """
    depth_kind: str = 'value_noise'
    A: Tuple[float, float, float] = (0.2, 0.6, 0.7)
    beta: Tuple[float, float, float] = (1.2, 0.5, 0.4)
    noise_sigma: float = 0.01
    turbidity_strength: float = 0.05
    seed: int = 7
    jitter: float = 0.1

    def __post_init__(self) -> None:
        self.A = tuple(float(a) for a in self.A)
        self.beta = tuple(float(b) for b in self.beta)
        if self.depth_kind not in DEPTH_KINDS:
            raise ConfigError(f"Unknown depth_kind '{self.depth_kind}'. Choose one of {DEPTH_KINDS}.")
        if len(self.A) != 3 or not all(0.0 < a < 1.0 for a in self.A):
            raise ConfigError(f"A must hold three values in (0, 1), got {self.A}.")
        if len(self.beta) != 3 or any(b < 0 for b in self.beta):
            raise ConfigError(f"beta must hold three non-negative values, got {self.beta}.")
        if self.noise_sigma < 0 or self.turbidity_strength < 0 or self.jitter < 0:
            raise ConfigError("noise_sigma, turbidity_strength and jitter must be non-negative.")

    @classmethod
    def from_json(cls, source: Any) -> 'SceneSpec':
        return load_flat_json(cls, source)


@dataclass
class PairSample:
    """
    One synthetic pair with the ground-truth physics fields used to make it (kept before clamping).

    ``image = clamp01(target * t + A * (1 - t) + noise + turbidity)``
    """
    index: int
    image: np.ndarray
    target: np.ndarray
    depth: np.ndarray
    transmission: np.ndarray
    background_light: np.ndarray
    noise: np.ndarray
    turbidity: np.ndarray
    clamp_free: bool


@dataclass
class SyntheticDataset:
    samples: List[PairSample]
    train_indices: List[int]
    test_indices: List[int]
    spec: SceneSpec
    seed: int
    size: int
    test_fraction: float

    @property
    def train(self) -> List[PairSample]:
        return [self.samples[i] for i in self.train_indices]

    @property
    def test(self) -> List[PairSample]:
        return [self.samples[i] for i in self.test_indices]


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample ``index``; the same bytes whichever worker draws it."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _smooth_field(rng: np.random.Generator, h: int, w: int, cells: int = 4) -> np.ndarray:
    coarse = rng.uniform(0.0, 1.0, size=(cells + 1, cells + 1))
    field = interpolation_matrix(cells + 1, h) @ coarse @ interpolation_matrix(cells + 1, w).T
    low, high = field.min(), field.max()
    return (field - low) / (high - low) if high > low else np.zeros_like(field)


def gen_depth(spec: SceneSpec, h: int, w: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Normalised depth field D of shape 1 x H x W in [0, 1].

    :param spec: Scene settings; ``spec.depth_kind`` selects the field.
    :param h: Height.
    :param w: Width.
    :param rng: Random stream; ``default_rng(spec.seed)`` when omitted.
    :return: Float64 depth map.
    """
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    if spec.depth_kind == 'linear_gradient':
        column = np.linspace(0.0, 1.0, h) if h > 1 else np.zeros(1)
        depth = np.repeat(column[:, None], w, axis=1)
    elif spec.depth_kind == 'radial':
        cy, cx = rng.uniform(0.25, 0.75) * (h - 1), rng.uniform(0.25, 0.75) * (w - 1)
        yy, xx = np.mgrid[0:h, 0:w]
        distance = np.hypot(yy - cy, xx - cx)
        depth = distance / distance.max() if distance.max() > 0 else distance
    elif spec.depth_kind == 'value_noise':
        depth = _smooth_field(rng, h, w)
    else:
        raise ConfigError(f"Unknown depth_kind '{spec.depth_kind}'.")
    return depth[None]


def beer_lambert_t(depth: np.ndarray, beta: Sequence[float]) -> np.ndarray:
    """Per-channel transmission ``t_c = exp(-beta_c * D)``, shape 3 x H x W."""
    beta = np.asarray(beta, dtype=np.float64).reshape(3, 1, 1)
    return np.exp(-beta * depth)


def classical_forward(target: np.ndarray, transmission: np.ndarray, background_light: Sequence[float]) -> np.ndarray:
    """Haze-only image formation ``J t + A (1 - t)``."""
    a = np.asarray(background_light, dtype=np.float64).reshape(3, 1, 1)
    return target * transmission + a * (1.0 - transmission)


def color_chart(h: int, w: int, rng: np.random.Generator, shapes: int = 4) -> np.ndarray:
    """
    Procedural clean image: a two-colour gradient with a few flat rectangles and discs, values in [0.05, 0.95].
    """
    start, stop = rng.uniform(0.05, 0.95, size=(2, 3))
    angle = rng.uniform(0.0, 2 * np.pi)
    yy, xx = np.mgrid[0:h, 0:w]
    ramp = (np.cos(angle) * xx / max(w - 1, 1) + np.sin(angle) * yy / max(h - 1, 1))
    ramp = (ramp - ramp.min()) / (np.ptp(ramp) or 1.0)
    image = start[:, None, None] * (1.0 - ramp) + stop[:, None, None] * ramp

    for _ in range(shapes):
        colour = rng.uniform(0.05, 0.95, size=3)[:, None, None]
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        radius = rng.uniform(0.1, 0.3) * min(h, w)
        if rng.uniform() < 0.5:
            mask = np.hypot(yy - cy, xx - cx) <= radius
        else:
            mask = (np.abs(yy - cy) <= radius) & (np.abs(xx - cx) <= 0.7 * radius)
        image = np.where(mask[None], colour, image)
    return image


def degrade(target: np.ndarray, spec: SceneSpec, rng: Optional[np.random.Generator] = None,
            index: int = 0) -> PairSample:
    """
    Run the extended image-formation model forward on a clean image.

    Noise is ``Normal(0, sigma) * exp(-D)`` and turbidity is ``strength * (1 - t) * D * field`` with a smooth
    random field in [0, 1]. The observed image is clamped to [0, 1]; the truth fields are kept unclamped and
    ``clamp_free`` records whether the clamp changed any value.

    :param target: Clean image, 3 x H x W in [0, 1].
    :param spec: Scene settings.
    :param rng: Random stream; ``default_rng(spec.seed)`` when omitted.
    :param index: Sample index stored on the result.
    :return: The synthetic pair, as float32 arrays.
    """
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    target = np.asarray(target, dtype=np.float64)
    _, h, w = target.shape

    background_light = np.asarray(spec.A, dtype=np.float64)
    beta = np.asarray(spec.beta, dtype=np.float64)
    if spec.jitter > 0:
        background_light = np.clip(background_light * (1.0 + spec.jitter * rng.uniform(-1, 1, 3)), 0.01, 0.99)
        beta = np.maximum(beta * (1.0 + spec.jitter * rng.uniform(-1, 1, 3)), 0.0)

    depth = gen_depth(spec, h, w, rng)
    transmission = beer_lambert_t(depth, beta)
    noise = spec.noise_sigma * rng.standard_normal((3, h, w)) * np.exp(-depth)
    turbidity = spec.turbidity_strength * (1.0 - transmission) * depth * _smooth_field(rng, h, w)[None]

    observed = classical_forward(target, transmission, background_light) + noise + turbidity
    clamp_free = bool(observed.min() >= 0.0 and observed.max() <= 1.0)

    f32 = np.float32
    return PairSample(index=index, image=np.clip(observed, 0.0, 1.0).astype(f32), target=target.astype(f32),
                      depth=depth.astype(f32), transmission=transmission.astype(f32),
                      background_light=background_light.astype(f32), noise=noise.astype(f32),
                      turbidity=turbidity.astype(f32), clamp_free=clamp_free)


def split_indices(n: int, seed: int, test_fraction: float = 0.2) -> Tuple[List[int], List[int]]:
    """
    Deterministic disjoint train/test split of ``range(n)``; both lists sorted.
    """
    if n < 1:
        raise ValueError("Cannot split an empty dataset.")
    n_test = 0 if n == 1 else min(max(1, int(round(n * test_fraction))), n - 1)
    order = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2 ** 32 - 1,))).permutation(n)
    return sorted(int(i) for i in order[n_test:]), sorted(int(i) for i in order[:n_test])


def _make_sample(index: int, spec: SceneSpec, size: int, seed: int,
                 base_images: Optional[Sequence[np.ndarray]]) -> PairSample:
    rng = sample_rng(seed, index)
    if base_images:
        base = np.asarray(base_images[index % len(base_images)], dtype=np.float64)
        clean = interpolation_matrix(base.shape[1], size) @ base @ interpolation_matrix(base.shape[2], size).T
    else:
        clean = color_chart(size, size, rng)
    return degrade(np.clip(clean, 0.0, 1.0), spec, rng, index=index)


def make_dataset(n: int, spec: SceneSpec, size: int = 64, base_images: Optional[Sequence[np.ndarray]] = None,
                 seed: Optional[int] = None, test_fraction: float = 0.2, n_jobs: int = 1) -> SyntheticDataset:
    """
    Generate ``n`` synthetic pairs and a deterministic train/test split.

    Each sample draws from its own counter-based stream, so serial (``n_jobs=1``) and parallel generation
    produce identical bytes.

    :param n: Number of pairs, at least 1.
    :param spec: Scene settings.
    :param size: Square image size.
    :param base_images: Optional clean 3 x H x W images, cycled and resized; colour charts otherwise.
    :param seed: Dataset seed; ``spec.seed`` when omitted.
    :param test_fraction: Fraction of samples held out.
    :param n_jobs: joblib worker count.
    :return: The dataset.
    :raises ValueError: If ``n < 1``.
    """
    if n < 1:
        raise ValueError(f"A dataset needs at least one sample, got n={n}.")
    seed = spec.seed if seed is None else seed

    if n_jobs == 1:
        samples = []
        for index in (pbar := tqdm(range(n), file=sys.stdout, disable=n < 16)):
            pbar.set_description(f"Synthesising pair {index:04d}")
            samples.append(_make_sample(index, spec, size, seed, base_images))
    else:
        samples = parallel_map(partial(_make_sample, spec=spec, size=size, seed=seed, base_images=base_images),
                               range(n), n_jobs=n_jobs)

    train, test = split_indices(n, seed, test_fraction)
    return SyntheticDataset(samples=samples, train_indices=train, test_indices=test, spec=spec, seed=seed,
                            size=size, test_fraction=test_fraction)


def write_dataset(dataset: SyntheticDataset, out_dir: str, write_truth: bool = True) -> str:
    """
    Write a dataset directory: ``manifest.json``, ``train/`` and ``test/`` PPM pairs, optional ``truth/`` fields.

    File names are ``NNNN_input.ppm`` / ``NNNN_gt.ppm`` and ``NNNN_{D,t,N,S}.f32`` with the sample index.
    The manifest holds no timestamps, so the same spec and seed always give the same manifest bytes.

    :return: Path of the manifest.
    """
    for sub in ('train', 'test') + (('truth',) if write_truth else ()):
        os.makedirs(os.path.join(out_dir, sub), exist_ok=True)

    splits = {i: 'train' for i in dataset.train_indices}
    splits.update({i: 'test' for i in dataset.test_indices})
    files = []
    for sample in dataset.samples:
        split = splits[sample.index]
        stem = f"{sample.index:04d}"
        entry: Dict[str, Any] = {'index': sample.index, 'split': split, 'clamp_free': sample.clamp_free}
        for kind, array in (('input', sample.image), ('gt', sample.target)):
            relative = f"{split}/{stem}_{kind}.ppm"
            IO.save_image(array, os.path.join(out_dir, relative))
            entry[kind] = relative
            entry[f"sha256_{kind}"] = IO.sha256(os.path.join(out_dir, relative))
        if write_truth:
            for name, array in (('D', sample.depth), ('t', sample.transmission), ('N', sample.noise),
                                ('S', sample.turbidity)):
                IO.save_f32(array, os.path.join(out_dir, 'truth', f"{stem}_{name}.f32"))
            entry['A'] = [float(a) for a in sample.background_light]
        files.append(entry)

    manifest = {
        'format': 'adr-synth/1',
        'seed': dataset.seed,
        'n': len(dataset.samples),
        'size': dataset.size,
        'test_fraction': dataset.test_fraction,
        'spec': asdict(dataset.spec),
        'truth': write_truth,
        'files': files,
    }
    path = os.path.join(out_dir, 'manifest.json')
    with open(path, 'w') as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write('\n')
    return path
