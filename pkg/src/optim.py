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
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .nn import Parameter
from .tensor import NumericalError, ShapeError, is_checked


@dataclass
class AdamState:
    """
    Moment buffers and hyper-parameters of the Adam optimiser.

    Defaults follow the training recipe: lr 1e-4, beta1 0.9, beta2 0.999, eps 1e-8.
    """
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=OrderedDict)
    v: Dict[str, np.ndarray] = field(default_factory=OrderedDict)

    def ensure(self, params: Dict[str, Parameter]) -> None:
        for name, parameter in params.items():
            if name not in self.m:
                self.m[name] = np.zeros_like(parameter.data)
                self.v[name] = np.zeros_like(parameter.data)
            elif self.m[name].shape != parameter.shape:
                raise ShapeError(f"Adam moment buffer for '{name}' has shape {self.m[name].shape}, parameter has "
                                 f"{parameter.shape}.", dimension=name)


def adam_step(params: Dict[str, Parameter], grads: Dict[str, Optional[np.ndarray]], state: AdamState,
              lr: Optional[float] = None) -> None:
    """
    One bias-corrected Adam update, in place.

    Parameters whose gradient is ``None`` (unused in this step, or frozen) keep their value and
    moment buffers. The step counter increases by one per call.

    :param params: Ordered mapping from name to parameter.
    :param grads: Mapping from name to gradient array (or ``None``).
    :param state: Optimiser state, updated in place.
    :param lr: Learning rate for this step; ``state.lr`` when omitted (schedule hook).
    :raises NumericalError: In checked mode, if a gradient holds NaN or infinity.
    """
    state.ensure(params)
    state.step += 1
    lr = state.lr if lr is None else lr
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step

    for name, parameter in params.items():
        grad = grads.get(name)
        if grad is None:
            continue
        if is_checked() and not np.all(np.isfinite(grad)):
            raise NumericalError(f"Gradient of '{name}' contains non-finite values.", name=name)

        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad

        m_hat = m / correction1
        v_hat = v / correction2
        parameter.data -= (lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(parameter.dtype)


class Adam:

    def __init__(self, params: 'OrderedDict[str, Parameter]', lr: float = 1e-4, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8) -> None:
        """
        Adam over a fixed, ordered set of named parameters.

        Example usage:
            ```python
            optimiser = Adam(OrderedDict(model.named_parameters()), lr=1e-4)
            loss.backward()
            optimiser.step()
            optimiser.zero_grad()
            ```
        """
        self.params = OrderedDict((name, p) for name, p in params.items() if p.requires_grad)
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        self.state.ensure(self.params)

    def step(self, lr: Optional[float] = None) -> None:
        adam_step(self.params, {name: p.grad for name, p in self.params.items()}, self.state, lr=lr)

    def zero_grad(self) -> None:
        for parameter in self.params.values():
            parameter.zero_grad()
