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
from collections import OrderedDict
from dataclasses import dataclass
from typing import List, Optional, Union
import os
import warnings

import numpy as np

from .checkpoint import load_checkpoint
from .datasets import DataError, PairedDataset
from .io import IO
from .losses import PhiNetwork
from .metrics import MetricsReport, evaluate
from .model import ADRModel, PipelineOutput
from .pipeline import Stopwatch
from .tensor import Tensor, no_grad
from . import functional as F

# (file suffix, tensor in the pipeline output, min-max scaled before saving)
PANELS = (
    ('enhanced', 'enhanced', False),
    ('depth', 'depth', False),
    ('transmission', 'transmission', False),
    ('turbidity', 'turbidity', True),
    ('noise', 'noise', True),
    ('dehazed', 'dehazed', False),
    ('illumination', 'illumination', False),
    ('reflectance', 'reflectance', False),
)


class Predictor:
    """
    Batch-in, batch-out wrapper around a trained model that also accumulates the forward wall-clock time.
    """

    def __init__(self, model: ADRModel) -> None:
        self.model = model
        self.elapsed_ms = 0.0
        self.images = 0

    def __call__(self, batch: np.ndarray) -> np.ndarray:
        with no_grad(), Stopwatch() as watch:
            enhanced = self.model(Tensor(batch)).enhanced.data
        self.elapsed_ms += watch.ms
        self.images += len(batch)
        return enhanced

    @property
    def ms_per_image(self) -> Optional[float]:
        return self.elapsed_ms / self.images if self.images else None


def predictor(model: ADRModel) -> Predictor:
    return Predictor(model)


def fit_to_grid(image: np.ndarray, strict: bool = False, multiple: int = 8) -> np.ndarray:
    """
    Make both spatial sizes multiples of ``multiple``, resizing to the nearest valid size when needed.

    :raises DataError: Under ``strict`` when the image does not already fit.
    """
    h, w = image.shape[-2:]
    if h % multiple == 0 and w % multiple == 0:
        return image
    if strict:
        raise DataError(f"Image size {h}x{w} is not divisible by {multiple}. Resize it, or run without --strict "
                        f"to resize automatically.")
    size = (max(multiple, int(round(h / multiple)) * multiple), max(multiple, int(round(w / multiple)) * multiple))
    warnings.warn(f"Image size {h}x{w} is not divisible by {multiple}; resizing to {size[0]}x{size[1]}.",
                  UserWarning)
    with no_grad():
        return F.resize_bilinear(Tensor(image[None], dtype=image.dtype), size).data[0]


@dataclass
class EnhanceResult:
    image: np.ndarray
    output: PipelineOutput
    paths: 'OrderedDict[str, str]'

    @property
    def enhanced(self) -> np.ndarray:
        return self.output.enhanced.data[0]


def _panel(output: PipelineOutput, name: str) -> Tensor:
    if name == 'enhanced':
        return output.enhanced
    if name in ('illumination', 'reflectance'):
        return getattr(output.retinex, name)
    return getattr(output.dehaze, name)


def _as_model(model: Union[ADRModel, str]) -> ADRModel:
    return load_checkpoint(model)[0] if isinstance(model, str) else model


def enhance(model: Union[ADRModel, str], image_path: str, out_dir: str, dump_intermediates: bool = False,
            strict: bool = False, allow_png: bool = False) -> EnhanceResult:
    """
    Enhance one image and write the result, optionally with every intermediate map.

    Files are named ``<stem>_<panel>.ppm``. Without ``dump_intermediates`` only the ``enhanced`` panel is written;
    with it the eight panels are enhanced, depth, transmission, turbidity and noise (both min-max scaled),
    dehazed, illumination and reflectance.

    :param model: A model, or the path of a checkpoint.
    :param image_path: Input image.
    :param out_dir: Output directory, created when missing.
    :param dump_intermediates: Write the seven intermediate panels too.
    :param strict: Refuse images whose size is not a multiple of 8 instead of resizing them.
    :param allow_png: Accept PNG input.
    :return: The (possibly resized) input, the pipeline output and the written paths.
    :raises DataError: Under ``strict`` for sizes that are not multiples of 8.
    :raises ImageFormatError: For malformed images.

    Example usage:
        ```python
        result = enhance('runs/model.adr', 'dive.ppm', 'out/', dump_intermediates=True)
        list(result.paths)
        ```
    """
    model = _as_model(model)
    image = fit_to_grid(IO.load_image(image_path, allow_png=allow_png), strict=strict)
    with no_grad():
        output = model(Tensor(image[None]))

    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(image_path))[0]
    paths = OrderedDict()
    for suffix, name, scaled in PANELS if dump_intermediates else PANELS[:1]:
        path = os.path.join(out_dir, f'{stem}_{suffix}.ppm')
        tensor = _panel(output, name).data[0]
        if scaled:
            IO.save_normalized(tensor, path)
        else:
            IO.save_image(tensor, path)
        paths[suffix] = path
    return EnhanceResult(image=image, output=output, paths=paths)


def decompose(model: Union[ADRModel, str], image_path: str, out_dir: str, figure: bool = False,
              strict: bool = False, allow_png: bool = False) -> EnhanceResult:
    """
    ``enhance`` with every intermediate panel, plus an optional single-figure overview (``<stem>_panels.png``).
    """
    result = enhance(model, image_path, out_dir, dump_intermediates=True, strict=strict, allow_png=allow_png)
    if figure:
        from .visualisation import PlotPanels
        stem = os.path.splitext(os.path.basename(image_path))[0]
        result.paths['figure'] = PlotPanels(result.image, result.output).save(os.path.join(out_dir,
                                                                                          f'{stem}_panels.png'))
    return result


def evaluate_checkpoint(checkpoint: str, data: str, split: str = 'test', n_jobs: Optional[int] = None,
                        include_input: bool = True) -> List[MetricsReport]:
    """
    Score a checkpoint on a paired dataset, together with the untouched degraded input as a reference row.

    :param checkpoint: Checkpoint path; the stored configuration fixes the image size.
    :param data: Dataset directory in any layout :meth:`PairedDataset.from_directory` accepts.
    :param split: Split to score.
    :param n_jobs: Metric workers; the checkpoint configuration decides when omitted.
    :param include_input: Also report the degraded input against the ground truth.
    :return: The model report first, then the input reference.
    """
    model, _, stored = load_checkpoint(checkpoint)
    config = stored.config
    n_jobs = config.n_workers if n_jobs is None else n_jobs
    dataset = PairedDataset.from_directory(data, split=split, image_size=config.image_size,
                                           allow_png=config.allow_png, test_fraction=config.test_fraction)
    phi = PhiNetwork()

    predict = predictor(model)
    report = evaluate(predict, dataset.ids, dataset.inputs, dataset.targets, phi=phi, n_jobs=n_jobs,
                      label='ADR (this checkpoint)')
    report.ms_per_image = predict.ms_per_image
    reports = [report]
    if include_input:
        reports.append(evaluate(lambda batch: batch, dataset.ids, dataset.inputs, dataset.targets, phi=phi,
                                n_jobs=n_jobs, label='degraded input'))
    return reports
