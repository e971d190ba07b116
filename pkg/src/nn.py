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
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .tensor import Tensor, ShapeError, get_default_dtype
from . import functional as F


class Parameter(Tensor):

    def __init__(self, data: np.ndarray, requires_grad: bool = True, name: Optional[str] = None) -> None:
        """
        A leaf tensor owned by a :class:`Module`. Its dotted name is assigned by the owning module tree.
        """
        super().__init__(data, requires_grad=requires_grad, name=name)


def he_normal(shape: Tuple[int, ...], fan_in: int, rng: np.random.Generator) -> np.ndarray:
    """
    He-style fan-in initialisation: zero-mean normal with standard deviation sqrt(2 / fan_in).

    Values are drawn in float64 and cast to the default dtype, so float32 and float64 models built
    from the same seed hold the same weights up to rounding.
    """
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(get_default_dtype())


class Module:
    """
    Container of parameters and sub-modules.

    Attributes are traversed in assignment order, so parameter names such as
    ``stage1.depth_branch.conv0.weight`` and their iteration order are deterministic.
    """

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError(f"{type(self).__name__}.forward is not implemented.")

    def named_parameters(self, prefix: str = '') -> Iterator[Tuple[str, Parameter]]:
        for key, value in vars(self).items():
            if isinstance(value, Parameter):
                yield f"{prefix}{key}", value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{prefix}{key}.")

    def parameters(self) -> List[Parameter]:
        return [parameter for _, parameter in self.named_parameters()]

    def assign_names(self, prefix: str = '') -> None:
        seen = set()
        for name, parameter in self.named_parameters(prefix):
            if id(parameter) in seen:
                raise ValueError(f"Parameter '{name}' is shared between two modules; names must be unique.")
            seen.add(id(parameter))
            parameter.name = name

    def zero_grad(self) -> None:
        for parameter in self.parameters():
            parameter.zero_grad()

    def freeze(self) -> None:
        for parameter in self.parameters():
            parameter.requires_grad = False

    def num_parameters(self) -> int:
        return int(sum(parameter.size for parameter in self.parameters()))

    def state_dict(self) -> 'OrderedDict[str, np.ndarray]':
        return OrderedDict((name, parameter.data.copy()) for name, parameter in self.named_parameters())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """
        Copy arrays into the parameters, refusing any difference in names or shapes.

        :param state: Mapping from dotted parameter name to array.
        :raises ShapeError: If a name is missing, unexpected, or has a different shape.
        """
        own = OrderedDict(self.named_parameters())
        missing = [name for name in own if name not in state]
        unexpected = [name for name in state if name not in own]
        if missing or unexpected:
            raise ShapeError(f"Parameter names differ. Missing: {missing[:5]}; unexpected: {unexpected[:5]}.",
                             dimension='name')
        for name, parameter in own.items():
            array = np.asarray(state[name])
            if array.shape != parameter.shape:
                raise ShapeError(f"Parameter '{name}' has shape {parameter.shape} but the state holds "
                                 f"{array.shape}.", dimension=name)
            parameter.data = np.ascontiguousarray(array, dtype=parameter.dtype)


class Conv2d(Module):

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: np.random.Generator,
                 zero_init: bool = False) -> None:
        fan_in = in_channels * kernel_size * kernel_size
        shape = (out_channels, in_channels, kernel_size, kernel_size)
        data = np.zeros(shape, dtype=get_default_dtype()) if zero_init else he_normal(shape, fan_in, rng)
        self.weight = Parameter(data)
        self.bias = Parameter(np.zeros(out_channels, dtype=get_default_dtype()))

    def forward(self, x: Tensor) -> Tensor:
        return F.conv2d(x, self.weight, self.bias)


class Linear(Module):

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator) -> None:
        self.weight = Parameter(he_normal((out_features, in_features), in_features, rng))
        self.bias = Parameter(np.zeros(out_features, dtype=get_default_dtype()))

    def forward(self, x: Tensor) -> Tensor:
        return F.linear(x, self.weight, self.bias)


class LayerNorm(Module):

    def __init__(self, dim: int, eps: float = 1e-5) -> None:
        self.gain = Parameter(np.ones(dim, dtype=get_default_dtype()))
        self.bias = Parameter(np.zeros(dim, dtype=get_default_dtype()))
        self.eps = eps

    def forward(self, x: Tensor) -> Tensor:
        return F.layer_norm(x, self.gain, self.bias, self.eps)


class ConvBlock(Module):

    def __init__(self, in_channels: int, out_channels: int, rng: np.random.Generator) -> None:
        """Two 3x3 convolutions, each followed by ReLU."""
        self.conv0 = Conv2d(in_channels, out_channels, 3, rng)
        self.conv1 = Conv2d(out_channels, out_channels, 3, rng)
        self.out_channels = out_channels

    def forward(self, x: Tensor) -> Tensor:
        return F.relu(self.conv1(F.relu(self.conv0(x))))
