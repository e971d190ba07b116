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
from dataclasses import dataclass, fields
from typing import List, Optional
import os
import sys

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from .checkpoint import load_checkpoint, restore_rng, save_checkpoint
from .configuration import ABLATION_LABELS, AblationToggles, Config
from .datasets import PairedDataset
from .io import IO
from .losses import LossReport, PhiNetwork, TERMS, total_loss
from .model import ADRModel
from .optim import Adam, AdamState
from .pipeline import Stopwatch, measure
from .tensor import NumericalError, Tensor, checked_mode, is_checked

RUN_LOG_COLUMNS = ['step', 'epoch'] + list(TERMS) + ['total', 'wall_ms']


def shuffle_rng(seed: int) -> np.random.Generator:
    """Batch-order generator, a stream separate from the weight initialisation."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))


@dataclass
class TrainingResult:
    model: ADRModel
    adam: AdamState
    run_log: pd.DataFrame
    rng: np.random.Generator
    checkpoint: Optional[str] = None

    @property
    def steps(self) -> int:
        return len(self.run_log)


class Trainer(IO):

    def __init__(self, config: Config, dataset: PairedDataset, model: Optional[ADRModel] = None,
                 adam: Optional[AdamState] = None, rng: Optional[np.random.Generator] = None,
                 phi: Optional[PhiNetwork] = None, start_epoch: int = 0, progress: bool = True) -> None:
        """
        Joint training of the three stages with one Adam optimiser and one backward pass per batch.

        :param config: Run configuration.
        :param dataset: Training pairs, already at ``config.image_size``.
        :param model: Model to continue from; a fresh one is built from the config when omitted.
        :param adam: Optimiser state to continue from.
        :param rng: Batch-order generator to continue from.
        :param phi: Frozen feature network of the perceptual term.
        :param start_epoch: Number of epochs already completed.
        :param progress: Show tqdm progress bars.
        """
        super().__init__()
        self.config = config
        self.dataset = dataset
        self.model = model or ADRModel.from_config(config)
        self.optimiser = Adam(OrderedDict(self.model.named_parameters()), lr=config.lr, beta1=config.beta1,
                              beta2=config.beta2, eps=config.eps)
        if adam is not None:
            self.optimiser.state = adam
        self.rng = rng or shuffle_rng(config.seed)
        self.phi = phi or PhiNetwork()
        self.start_epoch = start_epoch
        self.progress = progress
        self.rows: List[dict] = []

    @property
    def steps_per_epoch(self) -> int:
        return self.dataset.num_batches(self.config.batch_size)

    def learning_rate(self, step: int) -> float:
        # 'constant' is the only schedule
        return self.config.lr

    def step(self, inputs: np.ndarray, targets: np.ndarray) -> LossReport:
        """
        Forward, loss, backward and one optimiser update on a single batch.

        :raises NumericalError: If the loss is not finite, naming the first non-finite intermediate tensor.
        """
        output = self.model(Tensor(inputs))
        report = total_loss(output, Tensor(targets), self.config.weights, self.config.ablation, self.phi)
        if not np.all(np.isfinite(report.total.data)):
            culprit = output.first_non_finite() or next(
                (name for name, term in report.terms.items() if not np.all(np.isfinite(term.data))), 'total')
            raise NumericalError(f"The loss became non-finite at step {self.optimiser.state.step + 1}. First "
                                 f"non-finite tensor: '{culprit}'. Lower the learning rate or run with "
                                 f"checked=true to stop at the offending operation.", name=culprit)
        report.total.backward()
        self.optimiser.step(lr=self.learning_rate(self.optimiser.state.step))
        self.optimiser.zero_grad()
        return report

    def run_log(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=RUN_LOG_COLUMNS)

    def save(self, epoch: int) -> str:
        return save_checkpoint(self.config.checkpoint, self.model, self.config, self.optimiser.state, self.rng,
                               epoch=epoch)

    def fit(self, save: bool = True) -> TrainingResult:
        """
        Train for the remaining epochs, log every step and write checkpoints.

        A checkpoint is written every ``checkpoint_every`` epochs (when positive) and after the last epoch; the
        run log is written next to it.

        :param save: Write the checkpoint and the run log.
        :return: The trained model, its optimiser state and the run log.
        """
        config = self.config
        with checked_mode(config.checked or is_checked()):
            for epoch in range(self.start_epoch, config.epochs):
                batches = self.dataset.batches(config.batch_size, self.rng)
                for ids, inputs, targets in (pbar := tqdm(batches, total=self.steps_per_epoch, file=sys.stdout,
                                                          disable=not self.progress, leave=False)):
                    with Stopwatch(frozen=config.strict_deterministic) as watch:
                        report = self.step(inputs, targets)
                    values = report.values()
                    self.rows.append({'step': self.optimiser.state.step, 'epoch': epoch, **values,
                                      'wall_ms': watch.ms})
                    pbar.set_description(f"Epoch {epoch + 1}/{config.epochs} | loss {values['total']:.4f}")

                if save and config.checkpoint_every and (epoch + 1) % config.checkpoint_every == 0:
                    self.save(epoch + 1)

        path = None
        if save:
            path = self.save(config.epochs)
            self.to_csv(self.run_log(), config.run_log)
            print(f"\N{FLOPPY DISK} | Checkpoint written to {path}, run log to {config.run_log}")
        return TrainingResult(model=self.model, adam=self.optimiser.state, run_log=self.run_log(), rng=self.rng,
                              checkpoint=path)


@measure
def train(config: Config, dataset: Optional[PairedDataset] = None, resume: Optional[str] = None,
          progress: bool = True, save: bool = True) -> TrainingResult:
    """
    Train a model from a configuration.

    :param config: Run configuration; the training split is read from ``config.dataset`` unless ``dataset`` is
                   given.
    :param dataset: Training pairs to use instead of the configured directory.
    :param resume: Checkpoint to continue from. Its architecture must match the configuration.
    :param progress: Show progress bars.
    :param save: Write the checkpoint and the run log.
    :return: The training result.
    :raises DataError: If the dataset cannot be loaded.
    :raises NumericalError: If the loss diverges.

    Example usage:
        ```python
        result = train(Config.from_json('configs/desk.json'))
        result.run_log.tail()
        ```
    """
    if dataset is None:
        dataset = PairedDataset.from_directory(config.dataset, split='train', image_size=config.image_size,
                                               allow_png=config.allow_png, test_fraction=config.test_fraction)
    if resume is None:
        trainer = Trainer(config, dataset, progress=progress)
    else:
        model, adam, checkpoint = load_checkpoint(resume, config)
        print(f"\N{CLOCKWISE OPEN CIRCLE ARROW} | Resuming from {resume} after epoch {checkpoint.meta['epoch']}")
        trainer = Trainer(config, dataset, model=model, adam=adam, rng=restore_rng(checkpoint),
                          start_epoch=checkpoint.meta['epoch'], progress=progress)
    return trainer.fit(save=save)


def gradient_fingerprint(config: Config, inputs: np.ndarray, targets: np.ndarray,
                         phi: Optional[PhiNetwork] = None) -> pd.Series:
    """
    Per-parameter gradient L2 norms of one loss evaluation of a freshly initialised model.

    Models built from the same seed share their initial weights whatever the ablation toggles, so two
    configurations compute the same graph exactly when their fingerprints agree. Parameters outside the graph
    have norm 0.

    :param config: Model and loss configuration.
    :param inputs: Batch of degraded images, N x 3 x S x S.
    :param targets: Matching ground truth.
    :param phi: Frozen feature network.
    :return: Norms indexed by parameter name, in model order.
    """
    model = ADRModel.from_config(config)
    output = model(Tensor(inputs))
    report = total_loss(output, Tensor(targets), config.weights, config.ablation, phi or PhiNetwork())
    report.total.backward()
    norms = OrderedDict((name, 0.0 if p.grad is None else float(np.linalg.norm(p.grad)))
                        for name, p in model.named_parameters())
    return pd.Series(norms, name='grad_norm')


def fingerprint_distance(a: pd.Series, b: pd.Series) -> float:
    return float(np.linalg.norm(a.to_numpy(dtype=np.float64) - b.reindex(a.index).to_numpy(dtype=np.float64)))


def ablation_variants() -> 'OrderedDict[str, AblationToggles]':
    variants = OrderedDict([('full', AblationToggles())])
    for toggle in fields(AblationToggles):
        variants[toggle.name] = AblationToggles.without(toggle.name)
    return variants


@measure
def run_ablation_study(config: Config, train_set: PairedDataset, test_set: PairedDataset,
                       out_dir: Optional[str] = None, progress: bool = True) -> pd.DataFrame:
    """
    Train the full model and every single-toggle variant from the same seed, then evaluate each on the test set.

    :param config: Base configuration; its own toggles are ignored.
    :param train_set: Training pairs.
    :param test_set: Held-out pairs.
    :param out_dir: Write each variant's checkpoint and run log here, plus ``ablation.csv``; nothing is written
                    when omitted.
    :param progress: Show progress bars.
    :return: One row per variant with the test metrics and the gradient-fingerprint distance to the full model.
    """
    from .inference import predictor
    from .metrics import evaluate

    phi = PhiNetwork()
    batch = min(config.batch_size, len(train_set))
    inputs, targets = train_set.inputs[:batch], train_set.targets[:batch]
    reference = None
    rows = []

    for name, toggles in (pbar := tqdm(ablation_variants().items(), file=sys.stdout, disable=not progress)):
        pbar.set_description(f"Ablation: {ABLATION_LABELS.get(name, 'full model')}")
        variant = config.with_ablation(toggles)
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            variant.checkpoint = os.path.join(out_dir, f'{name}.adr')
            variant.run_log = os.path.join(out_dir, f'{name}_run_log.csv')

        fingerprint = gradient_fingerprint(variant, inputs, targets, phi)
        reference = fingerprint if reference is None else reference
        result = Trainer(variant, train_set, phi=phi, progress=False).fit(save=out_dir is not None)
        report = evaluate(predictor(result.model), test_set.ids, test_set.inputs, test_set.targets, phi=phi,
                          n_jobs=variant.n_workers, label=ABLATION_LABELS.get(name, 'full model'))
        rows.append({'variant': report.label, 'SSIM': report.mean_ssim, 'PSNR': report.mean_psnr,
                     'phi-distance*': report.mean_phi, 'final_loss': float(result.run_log['total'].iloc[-1])
                     if len(result.run_log) else np.nan,
                     'fingerprint_distance': fingerprint_distance(reference, fingerprint)})

    table = pd.DataFrame(rows)
    if out_dir is not None:
        IO.to_csv(table, os.path.join(out_dir, 'ablation.csv'), typed=True)
    return table
