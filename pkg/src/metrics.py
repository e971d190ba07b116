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
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .io import IO
from .losses import PhiNetwork, perceptual_loss, ssim
from .tensor import Tensor, no_grad

PSNR_CAP_DB = 100.0
COLUMNS = ['image_id', 'psnr_db', 'ssim', 'phi_distance']

ArrayLike = Union[Tensor, np.ndarray]


def _as_batch(image: ArrayLike) -> Tensor:
    array = image.data if isinstance(image, Tensor) else np.asarray(image)
    if array.ndim == 3:
        array = array[None]
    return Tensor(array, dtype=array.dtype)


def psnr(pred: ArrayLike, target: ArrayLike, peak: float = 1.0) -> float:
    """
    Peak signal-to-noise ratio ``10 log10(peak**2 / MSE)`` in dB, capped at 100 dB for identical images.

    :raises ValueError: If the shapes differ.
    """
    pred = np.asarray(pred.data if isinstance(pred, Tensor) else pred, dtype=np.float64)
    target = np.asarray(target.data if isinstance(target, Tensor) else target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"psnr: prediction has shape {pred.shape} but the target has {target.shape}.")
    mse = float(np.mean((pred - target) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return float(min(10.0 * np.log10(peak ** 2 / mse), PSNR_CAP_DB))


def ssim_metric(pred: ArrayLike, target: ArrayLike) -> float:
    """Structural similarity through the same code path as the training loss."""
    with no_grad():
        return ssim(_as_batch(pred), _as_batch(target)).item()


def phi_distance(pred: ArrayLike, target: ArrayLike, phi: PhiNetwork) -> float:
    """Frozen-feature distance; a desk-scale stand-in, not comparable with published LPIPS values."""
    with no_grad():
        return perceptual_loss(_as_batch(pred), _as_batch(target), phi).item()


def image_metrics(image_id: str, pred: np.ndarray, target: np.ndarray, phi: Optional[PhiNetwork] = None) -> dict:
    row = {'image_id': image_id, 'psnr_db': psnr(pred, target), 'ssim': ssim_metric(pred, target)}
    row['phi_distance'] = phi_distance(pred, target, phi) if phi is not None else np.nan
    return row


@dataclass
class MetricsReport(IO):
    """
    Per-image metrics with dataset means.

    ``rows`` has the columns ``image_id, psnr_db, ssim, phi_distance``; the means are always recomputed
    from the rows.
    """
    rows: pd.DataFrame
    label: str = 'enhanced'
    ms_per_image: Optional[float] = None

    def __post_init__(self) -> None:
        if len(self.rows) == 0:
            raise ValueError("A metrics report needs at least one image.")

    @property
    def count(self) -> int:
        return len(self.rows)

    @property
    def mean_psnr(self) -> float:
        return float(self.rows['psnr_db'].mean())

    @property
    def mean_ssim(self) -> float:
        return float(self.rows['ssim'].mean())

    @property
    def mean_phi(self) -> float:
        return float(self.rows['phi_distance'].mean())

    def save(self, path: str) -> None:
        self.to_csv(self.rows[COLUMNS], path)

    def summary(self) -> dict:
        return {'method': self.label, 'SSIM': self.mean_ssim, 'PSNR': self.mean_psnr,
                'phi-distance*': self.mean_phi, 'images': self.count, 'ms/image': self.ms_per_image}


def format_table(reports: Sequence[MetricsReport]) -> str:
    """
    Human-readable table, columns in the order SSIM, PSNR, feature distance.

    The feature distance column is computed with the frozen untrained network and is marked with an
    asterisk: it is not comparable with published LPIPS values.
    """
    table = pd.DataFrame([report.summary() for report in reports])
    if table['ms/image'].isna().all():
        table = table.drop(columns=['ms/image'])
    text = table.to_string(index=False, float_format=lambda v: f"{v:.4f}")
    return f"{text}\n* frozen random-feature distance, not comparable with LPIPS"


def evaluate(predict: Callable[[np.ndarray], np.ndarray], ids: Sequence[str], inputs: np.ndarray,
             targets: np.ndarray, phi: Optional[PhiNetwork] = None, n_jobs: int = 1,
             label: str = 'enhanced') -> MetricsReport:
    """
    Score ``predict`` on a paired set of images.

    Predictions run serially in input order; per-image metrics are computed by joblib workers and
    assembled in the same order.

    :param predict: Maps an N x 3 x H x W batch to predictions of the same shape.
    :param ids: Image identifiers.
    :param inputs: Degraded images, N x 3 x H x W.
    :param targets: Ground truth, N x 3 x H x W.
    :param phi: Frozen feature network for the ``phi_distance`` column; NaN when omitted.
    :param n_jobs: joblib worker count.
    :param label: Row label in the printed table.
    :return: The report.
    :raises ValueError: If the dataset is empty.
    """
    if len(ids) == 0:
        raise ValueError("Cannot evaluate an empty dataset.")
    predictions = [predict(inputs[i:i + 1])[0] for i in range(len(ids))]
    rows = Parallel(n_jobs=n_jobs)(delayed(image_metrics)(image_id, prediction, target, phi)
                                   for image_id, prediction, target in zip(ids, predictions, targets))
    return MetricsReport(rows=pd.DataFrame(rows, columns=COLUMNS), label=label)
