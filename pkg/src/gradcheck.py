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
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import sys

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from .configuration import Config
from .losses import (PhiNetwork, l1_loss, ssim_loss, perceptual_loss, dehaze_loss, retinex_loss,
                     total_loss)
from .model import ADRModel
from .nn import Parameter
from .tensor import Tensor, no_grad, default_dtype
from . import functional as F

OP_TOLERANCE = 1e-4
PIPELINE_TOLERANCE = 1e-3
RELATIVE_FLOOR = 1e-4

Closure = Callable[..., Tensor]


def _relative_error(analytic: float, numeric: float, floor: float = RELATIVE_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def _scalarise(out: Tensor, rng: np.random.Generator) -> Tuple[Tensor, Optional[np.ndarray]]:
    if out.size == 1:
        return out.sum(), None
    weights = rng.standard_normal(out.shape)
    return (out * Tensor(weights, dtype=out.dtype)).sum(), weights


def grad_check_op(closure: Closure, inputs: Sequence[Tensor], epsilon: float = 1e-6,
                  max_elements: Optional[int] = None, seed: int = 0) -> float:
    """
    Worst relative error between backward() and central finite differences.

    A non-scalar output is reduced to a scalar with fixed random weights. Each probed element is moved by
    ``+-epsilon``; when the error at ``epsilon`` exceeds the op tolerance the probe is repeated at
    ``epsilon / 10`` and the smaller error kept, which steps over ReLU and clamp kinks.

    :param closure: Function of the input tensors returning a tensor.
    :param inputs: 64-bit tensors; those with ``requires_grad`` are probed.
    :param epsilon: Finite-difference step.
    :param max_elements: Probe at most this many elements per input (sampled without replacement).
    :param seed: Seed for the output weights and the element sampling.
    :return: The worst relative error ``|a - n| / max(|a|, |n|, 1e-4)``.
    :raises ValueError: If an input is not float64.

    Example usage:
        ```python
        with default_dtype(np.float64):
            x = Tensor(np.random.rand(2, 4), requires_grad=True)
            error = grad_check_op(lambda t: F.activation('tanh', t), [x])
        ```
    """
    for tensor in inputs:
        if tensor.dtype != np.float64:
            raise ValueError(f"Gradient checks need float64 inputs, got {tensor.dtype}.")
    rng = np.random.default_rng(seed)

    for tensor in inputs:
        tensor.zero_grad()
    loss, weights = _scalarise(closure(*inputs), rng)
    loss.backward()
    analytic = [None if t.grad is None else t.grad.copy() for t in inputs]

    def evaluate() -> float:
        with no_grad():
            out = closure(*inputs)
            return float(np.sum(out.data * weights)) if weights is not None else float(out.data.sum())

    worst = 0.0
    for tensor, grad in zip(inputs, analytic):
        if not tensor.requires_grad:
            continue
        grad = np.zeros(tensor.shape) if grad is None else grad
        flat = tensor.data.reshape(-1)
        indices = np.arange(flat.size)
        if max_elements is not None and flat.size > max_elements:
            indices = np.sort(rng.choice(flat.size, size=max_elements, replace=False))
        for index in indices:
            errors = []
            for step in (epsilon, epsilon / 10):
                original = flat[index]
                flat[index] = original + step
                plus = evaluate()
                flat[index] = original - step
                minus = evaluate()
                flat[index] = original
                errors.append(_relative_error(grad.reshape(-1)[index], (plus - minus) / (2 * step)))
                if errors[-1] <= OP_TOLERANCE:
                    break
            worst = max(worst, min(errors))
    return worst


def check_parameters(loss_fn: Callable[[], Tensor], parameters: 'OrderedDict[str, Parameter]',
                     per_parameter: int = 2, epsilon: float = 1e-6, seed: int = 0) -> Dict[str, float]:
    """
    Finite-difference check of a scalar loss with respect to sampled entries of every parameter.

    :param loss_fn: Builds the loss from scratch on each call.
    :param parameters: Named float64 parameters.
    :param per_parameter: Entries probed per parameter tensor.
    :param epsilon: Finite-difference step.
    :param seed: Sampling seed.
    :return: Worst relative error per parameter name.
    """
    names = list(parameters)
    tensors = [parameters[name] for name in names]
    errors = {}

    for tensor in tensors:
        tensor.zero_grad()
    loss_fn().backward()
    analytic = {name: (np.zeros(p.shape) if p.grad is None else p.grad.copy()) for name, p in parameters.items()}

    rng = np.random.default_rng(seed)
    for name in (pbar := tqdm(names, file=sys.stdout, leave=False)):
        pbar.set_description(f"Probing {name}")
        flat = parameters[name].data.reshape(-1)
        count = min(per_parameter, flat.size)
        worst = 0.0
        for index in rng.choice(flat.size, size=count, replace=False):
            candidates = []
            for step in (epsilon, epsilon / 10):
                original = flat[index]
                with no_grad():
                    flat[index] = original + step
                    plus = loss_fn().item()
                    flat[index] = original - step
                    minus = loss_fn().item()
                flat[index] = original
                candidates.append(_relative_error(analytic[name].reshape(-1)[index], (plus - minus) / (2 * step)))
                if candidates[-1] <= PIPELINE_TOLERANCE:
                    break
            worst = max(worst, min(candidates))
        errors[name] = worst
    return errors


def _op_cases(rng: np.random.Generator) -> List[Tuple[str, Closure, List[Tensor]]]:
    def leaf(*shape, low=-1.0, high=1.0):
        return Tensor(rng.uniform(low, high, size=shape), requires_grad=True)

    def away_from_zero(*shape):
        values = rng.uniform(0.2, 1.0, size=shape) * rng.choice([-1.0, 1.0], size=shape)
        return Tensor(values, requires_grad=True)

    def untied(*shape):
        return Tensor(rng.permutation(np.prod(shape)).reshape(shape) / np.prod(shape), requires_grad=True)

    window = np.outer(np.hanning(5)[1:4], np.hanning(5)[1:4])
    cases = [
        ('conv2d', lambda x, w, b: F.conv2d(x, w, b), [leaf(2, 3, 5, 5), leaf(4, 3, 3, 3), leaf(4)]),
        ('conv2d_stride2', lambda x, w, b: F.conv2d(x, w, b, stride=2), [leaf(1, 2, 6, 6), leaf(2, 2, 3, 3), leaf(2)]),
        ('max_pool2d', lambda x: F.max_pool2d(x), [untied(2, 2, 4, 4)]),
        ('upsample_bilinear', lambda x: F.upsample_bilinear(x, 2), [leaf(1, 2, 3, 3)]),
        ('resize_bilinear', lambda x: F.resize_bilinear(x, (3, 5)), [leaf(1, 2, 4, 4)]),
        ('global_avg_pool', lambda x: F.global_avg_pool(x), [leaf(2, 3, 4, 4)]),
        ('linear', lambda x, w, b: F.linear(x, w, b), [leaf(2, 4), leaf(3, 4), leaf(3)]),
        ('relu', lambda x: F.activation('relu', x), [away_from_zero(100)]),
        ('sigmoid', lambda x: F.activation('sigmoid', x), [leaf(100, low=-3, high=3)]),
        ('tanh', lambda x: F.activation('tanh', x), [leaf(100, low=-3, high=3)]),
        ('gelu', lambda x: F.activation('gelu', x), [leaf(100, low=-3, high=3)]),
        ('add', lambda a, b: F.elementwise('add', a, b), [leaf(2, 3, 4, 4), leaf(1, 3, 1, 1)]),
        ('sub', lambda a, b: F.elementwise('sub', a, b), [leaf(2, 3, 4, 4), leaf(2, 1, 4, 4)]),
        ('mul', lambda a, b: F.elementwise('mul', a, b), [leaf(2, 3, 4, 4), leaf(2, 1, 4, 4)]),
        ('div', lambda a, b: F.elementwise('div', a, b), [leaf(3, 4), leaf(3, 4, low=0.5, high=2.0)]),
        ('pow', lambda a, b: F.elementwise('pow', a, b), [leaf(3, 4, low=0.2, high=1.0), leaf(3, 4, low=0.5, high=1.5)]),
        ('exp', lambda x: F.elementwise('exp', x), [leaf(3, 4)]),
        ('clamp_min', lambda x: F.elementwise('clamp_min', x, 0.1), [leaf(3, 4, low=0.3, high=1.0)]),
        ('clamp01', lambda x: F.elementwise('clamp01', x), [leaf(3, 4, low=0.1, high=0.9)]),
        ('reduce_mean', lambda x: F.reduce('mean', x, axes=1), [leaf(3, 4)]),
        ('reduce_sum', lambda x: F.reduce('sum', x), [leaf(3, 4)]),
        ('concat_channels', lambda a, b: F.concat_channels([a, b]), [leaf(1, 2, 3, 3), leaf(1, 1, 3, 3)]),
        ('matmul_batched', lambda a, b: F.matmul_batched(a, b), [leaf(2, 3, 4), leaf(2, 4, 5)]),
        ('softmax_lastdim', lambda x: F.softmax_lastdim(x), [leaf(3, 5, low=-2, high=2)]),
        ('layer_norm', lambda x, g, b: F.layer_norm(x, g, b), [leaf(3, 8), leaf(8), leaf(8)]),
        ('filter2d_valid', lambda x: F.filter2d_valid(x, window), [leaf(1, 2, 6, 6)]),
    ]

    target = Tensor(rng.uniform(0.0, 1.0, size=(1, 3, 16, 16)))
    phi = PhiNetwork()
    cases += [
        ('l1_loss', lambda p: l1_loss(p, target), [leaf(1, 3, 16, 16, low=0.0, high=1.0)]),
        ('ssim_loss', lambda p: ssim_loss(p, target), [leaf(1, 3, 16, 16, low=0.0, high=1.0)]),
        ('perceptual_loss', lambda p: perceptual_loss(p, target, phi), [leaf(1, 3, 16, 16, low=0.0, high=1.0)]),
        ('dehaze_loss', lambda p: dehaze_loss(p, target), [leaf(1, 3, 16, 16, low=0.0, high=1.0)]),
        ('retinex_loss', lambda l, r: retinex_loss(l, r, target),
         [leaf(1, 1, 16, 16, low=0.0, high=1.0), leaf(1, 3, 16, 16, low=0.0, high=1.0)]),
    ]
    return cases


def pipeline_check(config: Config, size: int = 16, per_parameter: int = 2, seed: int = 0) -> Dict[str, float]:
    """
    Check the full three-stage loss against finite differences for sampled entries of every parameter.

    Runs in float64 on one random ``size x size`` pair.
    """
    with default_dtype(np.float64):
        rng = np.random.default_rng(seed)
        model = ADRModel.from_config(config)
        phi = PhiNetwork()
        image = Tensor(rng.uniform(0.0, 1.0, size=(1, 3, size, size)))
        target = Tensor(rng.uniform(0.0, 1.0, size=(1, 3, size, size)))
        ablation = config.ablation

        def loss_fn() -> Tensor:
            return total_loss(model(image), target, config.weights, ablation, phi).total

        parameters = OrderedDict((name, p) for name, p in model.named_parameters())
        return check_parameters(loss_fn, parameters, per_parameter=per_parameter, seed=seed)


def run_suite(config: Optional[Config] = None, size: int = 16, seed: int = 0, include_pipeline: bool = True,
              extra: Sequence[Tuple[str, Closure, List[Tensor]]] = ()) -> pd.DataFrame:
    """
    Finite-difference suite over every primitive, each loss term and the full pipeline.

    :param config: Model configuration for the pipeline check (the defaults when omitted).
    :param size: Spatial size of the pipeline check.
    :param seed: Seed for inputs and sampling.
    :param include_pipeline: Run the full-pipeline check.
    :param extra: Additional ``(component, closure, inputs)`` cases, checked at the op tolerance.
    :return: DataFrame with columns ``component, max_rel_error, tolerance, passed``.
    """
    rows = []
    with default_dtype(np.float64):
        rng = np.random.default_rng(seed)
        cases = _op_cases(rng) + list(extra)
        for name, closure, inputs in (pbar := tqdm(cases, file=sys.stdout)):
            pbar.set_description(f"Checking {name}")
            error = grad_check_op(closure, inputs, seed=seed)
            rows.append({'component': name, 'max_rel_error': error, 'tolerance': OP_TOLERANCE,
                         'passed': bool(error < OP_TOLERANCE)})

    if include_pipeline:
        errors = pipeline_check(config or Config(), size=size, seed=seed)
        worst_name = max(errors, key=errors.get)
        rows.append({'component': f'pipeline ({worst_name})', 'max_rel_error': errors[worst_name],
                     'tolerance': PIPELINE_TOLERANCE, 'passed': bool(errors[worst_name] < PIPELINE_TOLERANCE)})

    return pd.DataFrame(rows, columns=['component', 'max_rel_error', 'tolerance', 'passed'])
