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
from typing import Iterator, List, Optional, Sequence, Tuple
import glob
import json
import os
import sys
import warnings

import numpy as np
from tqdm.auto import tqdm

from .io import IO
from .synth import PairSample
from .tensor import Tensor, no_grad, get_default_dtype
from . import functional as F

IMAGE_EXTENSIONS = ('.ppm', '.png')


class DataError(ValueError):
    """Raised when a dataset directory is missing, empty or inconsistent."""


def resize_image(image: np.ndarray, size: int) -> np.ndarray:
    """Bilinear resize of a 3 x H x W array to size x size (identity when it already matches)."""
    with no_grad():
        return F.resize_bilinear(Tensor(image[None], dtype=image.dtype), size).data[0]


class PairedDataset(IO):

    def __init__(self, ids: Sequence[str], inputs: Sequence[np.ndarray], targets: Sequence[np.ndarray]) -> None:
        """
        In-memory paired dataset of degraded inputs and clean targets, all 3 x S x S.

        Use :meth:`from_directory` for datasets on disk and :meth:`from_samples` for simulator output.

        :param ids: Image identifiers, in the order they are reported.
        :param inputs: Degraded images.
        :param targets: Clean images.
        :raises DataError: If the dataset is empty or the three sequences differ in length.
        """
        super().__init__()
        if len(ids) == 0:
            raise DataError("The dataset is empty: no image pairs were found.")
        if not len(ids) == len(inputs) == len(targets):
            raise DataError(f"Got {len(ids)} ids, {len(inputs)} inputs and {len(targets)} targets.")
        self.ids = list(ids)
        self.inputs = np.stack(inputs).astype(get_default_dtype())
        self.targets = np.stack(targets).astype(get_default_dtype())

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, index: int) -> Tuple[str, np.ndarray, np.ndarray]:
        return self.ids[index], self.inputs[index], self.targets[index]

    @property
    def image_size(self) -> int:
        return self.inputs.shape[-1]

    def batches(self, batch_size: int, rng: Optional[np.random.Generator] = None) \
            -> Iterator[Tuple[List[str], np.ndarray, np.ndarray]]:
        """
        Yield ``(ids, inputs, targets)`` batches; the last partial batch is included.

        :param batch_size: Maximum batch size.
        :param rng: Shuffle with this generator; keep the stored order when omitted.
        """
        order = rng.permutation(len(self)) if rng is not None else np.arange(len(self))
        for start in range(0, len(self), batch_size):
            chosen = order[start:start + batch_size]
            yield [self.ids[i] for i in chosen], self.inputs[chosen], self.targets[chosen]

    def num_batches(self, batch_size: int) -> int:
        return -(-len(self) // batch_size)

    @classmethod
    def from_samples(cls, samples: Sequence[PairSample]) -> 'PairedDataset':
        return cls([f"{s.index:04d}" for s in samples], [s.image for s in samples], [s.target for s in samples])

    @staticmethod
    def _pairs_in(directory: str) -> List[Tuple[str, str, str]]:
        pairs = []
        for path in sorted(glob.glob(os.path.join(directory, '*_input.*'))):
            stem, extension = os.path.basename(path).rsplit('_input.', 1)
            target = os.path.join(directory, f"{stem}_gt.{extension}")
            if not os.path.isfile(target):
                raise DataError(f"Input {path} has no matching ground truth {target}.")
            pairs.append((stem, path, target))
        return pairs

    @staticmethod
    def _user_pairs(directory: str, split: str, test_fraction: float) -> List[Tuple[str, str, str]]:
        names = sorted(name for name in os.listdir(os.path.join(directory, 'input'))
                       if name.lower().endswith(IMAGE_EXTENSIONS))
        missing = [name for name in names if not os.path.isfile(os.path.join(directory, 'gt', name))]
        if missing:
            raise DataError(f"{len(missing)} input images have no ground truth in {directory}/gt, e.g. {missing[0]}.")
        n_test = min(max(1, int(round(len(names) * test_fraction))), len(names) - 1) if len(names) > 1 else 0
        warnings.warn(f"Splitting {len(names)} user pairs lexicographically ({len(names) - n_test} train, {n_test} "
                      f"test). This may not match any published split.", UserWarning)
        chosen = {'train': names[:len(names) - n_test], 'test': names[len(names) - n_test:], 'all': names}[split]
        return [(os.path.splitext(name)[0], os.path.join(directory, 'input', name),
                 os.path.join(directory, 'gt', name)) for name in chosen]

    @classmethod
    def from_directory(cls, directory: str, split: str = 'train', image_size: Optional[int] = None,
                       allow_png: bool = False, test_fraction: float = 0.2) -> 'PairedDataset':
        """
        Load pairs from one of the supported layouts.

        1. Simulator output: ``manifest.json`` listing ``train/`` and ``test/`` files.
        2. ``train/`` and ``test/`` sub-directories of ``NNNN_input`` / ``NNNN_gt`` images.
        3. A directory that directly holds ``NNNN_input`` / ``NNNN_gt`` images (``split`` is ignored).
        4. User data in ``input/`` and ``gt/`` with identical file names, split lexicographically.

        :param directory: Dataset root.
        :param split: ``train``, ``test`` or ``all``.
        :param image_size: Resize every image to this square size; keep the file size when omitted.
        :param allow_png: Accept PNG files.
        :param test_fraction: Held-out fraction for layout 4.
        :return: The dataset.
        :raises DataError: If no layout matches or the split is empty.
        """
        if split not in ('train', 'test', 'all'):
            raise DataError(f"Unknown split '{split}'. Use 'train', 'test' or 'all'.")
        if not os.path.isdir(directory):
            raise DataError(f"Dataset directory {directory} does not exist.")

        manifest = os.path.join(directory, 'manifest.json')
        if os.path.isfile(manifest):
            with open(manifest, 'r') as fh:
                files = json.load(fh)['files']
            pairs = [(f"{entry['index']:04d}", os.path.join(directory, entry['input']),
                      os.path.join(directory, entry['gt'])) for entry in files
                     if split == 'all' or entry['split'] == split]
        elif os.path.isdir(os.path.join(directory, 'train')) or os.path.isdir(os.path.join(directory, 'test')):
            subsets = ('train', 'test') if split == 'all' else (split,)
            pairs = [pair for subset in subsets if os.path.isdir(os.path.join(directory, subset))
                     for pair in cls._pairs_in(os.path.join(directory, subset))]
        elif os.path.isdir(os.path.join(directory, 'input')) and os.path.isdir(os.path.join(directory, 'gt')):
            pairs = cls._user_pairs(directory, split, test_fraction)
        else:
            pairs = cls._pairs_in(directory)

        if not pairs:
            raise DataError(f"No '{split}' image pairs found in {directory}. Expected a manifest.json, train/ and "
                            f"test/ directories, input/ and gt/ directories, or NNNN_input/NNNN_gt image files.")

        ids, inputs, targets = [], [], []
        for image_id, input_path, target_path in (pbar := tqdm(pairs, file=sys.stdout, disable=len(pairs) < 16)):
            pbar.set_description(f"Loading {image_id}")
            degraded = cls.load_image(input_path, allow_png=allow_png)
            clean = cls.load_image(target_path, allow_png=allow_png)
            if degraded.shape != clean.shape:
                raise DataError(f"Pair {image_id}: input {degraded.shape} and ground truth {clean.shape} differ.")
            if image_size is not None:
                degraded, clean = resize_image(degraded, image_size), resize_image(clean, image_size)
            ids.append(image_id)
            inputs.append(degraded)
            targets.append(clean)
        return cls(ids, inputs, targets)
