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
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

Array = np.ndarray
Scalar = Union[int, float]


class ShapeError(ValueError):

    def __init__(self, message: str, dimension: Optional[Union[int, str]] = None) -> None:
        """
        Raised when tensor shapes are incompatible with an operation.

        :param message: Human-readable description of the mismatch.
        :param dimension: Index (or name) of the offending dimension, when known.
        """
        super().__init__(message)
        self.dimension = dimension


class NumericalError(ArithmeticError):

    def __init__(self, message: str, name: Optional[str] = None) -> None:
        """
        Raised on non-finite values, division by zero or invalid power bases.

        :param message: Human-readable description of the failure.
        :param name: Name of the first offending tensor, when known.
        """
        super().__init__(message)
        self.name = name


class TapeError(RuntimeError):
    """Raised when the computation record is used incorrectly (e.g. backward twice)."""


@dataclass
class _EngineState:
    dtype: type = np.float32
    checked: bool = False
    grad_enabled: bool = True


_STATE = _EngineState()


def get_default_dtype() -> type:
    return _STATE.dtype


def set_default_dtype(dtype: type) -> None:
    """
    Set the floating-point type used for new tensors.

    :param dtype: ``np.float32`` (training/inference) or ``np.float64`` (gradient checks).
    :raises ValueError: For any other type.
    """
    if np.dtype(dtype) not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"Only float32 and float64 are supported, got {dtype}.")
    _STATE.dtype = np.dtype(dtype).type


@contextmanager
def default_dtype(dtype: type) -> Iterator[None]:
    """
    Temporarily switch the default floating-point type.

    Example usage:
        ```python
        with default_dtype(np.float64):
            x = Tensor(np.random.rand(2, 3), requires_grad=True)
        ```
    """
    previous = _STATE.dtype
    set_default_dtype(dtype)
    try:
        yield
    finally:
        _STATE.dtype = previous


def is_checked() -> bool:
    return _STATE.checked


def set_checked(enabled: bool) -> None:
    _STATE.checked = bool(enabled)


@contextmanager
def checked_mode(enabled: bool = True) -> Iterator[None]:
    """
    Enable (or disable) NaN, division-by-zero and shape assertions inside the block.
    """
    previous = _STATE.checked
    _STATE.checked = bool(enabled)
    try:
        yield
    finally:
        _STATE.checked = previous


@contextmanager
def no_grad() -> Iterator[None]:
    """
    Evaluate operations without recording them on the tape (inference, metrics).
    """
    previous = _STATE.grad_enabled
    _STATE.grad_enabled = False
    try:
        yield
    finally:
        _STATE.grad_enabled = previous


def unbroadcast(grad: Array, to_shape: Tuple[int, ...]) -> Array:
    """
    Sum out broadcast dimensions so that ``grad`` matches ``to_shape``.

    :param grad: Gradient with the (broadcast) output shape.
    :param to_shape: Shape of the operand that was broadcast.
    :return: Gradient reduced to ``to_shape``.
    """
    if grad.shape == tuple(to_shape):
        return grad

    while grad.ndim > len(to_shape):
        grad = grad.sum(axis=0)

    for axis, size in enumerate(to_shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad.reshape(to_shape)


class Tensor:
    # Makes numpy defer to Tensor.__radd__ etc. for ``np.float32(2) * tensor``
    __array_priority__ = 1000

    def __init__(self, data: Union[Array, Scalar, Sequence], requires_grad: bool = False,
                 name: Optional[str] = None, creator: Optional["Function"] = None,
                 dtype: Optional[type] = None) -> None:
        """
        N-dimensional array with optional linkage into the gradient tape.

        Images are stored as N x C x H x W. Leaves created with ``requires_grad=True`` receive
        a ``grad`` array of identical shape after :meth:`backward`.

        :param data: Array-like payload, copied into a contiguous buffer of the default dtype.
        :param requires_grad: Whether gradients should be accumulated for this tensor.
        :param name: Optional label used in diagnostics.
        :param creator: The :class:`Function` that produced this tensor (``None`` for leaves).
        :param dtype: Explicit dtype, overriding the engine default.
        """
        self.data: Array = np.ascontiguousarray(data, dtype=dtype or _STATE.dtype)
        self.requires_grad = bool(requires_grad)
        self.name = name
        self.creator = creator
        self.grad: Optional[Array] = None
        self._consumed = False

    # ------------------------------------------------------------------ properties
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def numpy(self) -> Array:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False, name=self.name, dtype=self.data.dtype)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = f", name='{self.name}'" if self.name else ''
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad}{label})"

    # ------------------------------------------------------------------ backward
    def backward(self) -> Dict["Tensor", Array]:
        """
        Reverse-mode sweep from this scalar tensor to every grad-flagged leaf.

        Leaf gradients are accumulated into ``leaf.grad``. The record of a loss can be swept only
        once: build a new graph (and reset the leaves with ``zero_grad``) for the next step.

        :return: Map from each grad-flagged leaf reached to its gradient.
        :raises ShapeError: If the tensor is not a scalar.
        :raises TapeError: If this graph was already swept, or nothing requires a gradient.
        """
        if self.data.size != 1:
            raise ShapeError(f"backward() needs a scalar loss, got shape {self.shape}.", dimension=0)
        if self._consumed:
            raise TapeError("backward() was already called on this graph. Reset gradients with zero_grad() and "
                            "evaluate the loss again before calling backward().")
        if not self.requires_grad:
            raise TapeError("The loss does not depend on any tensor with requires_grad=True.")

        order = _topological_order(self)
        pending: Dict[int, Array] = {id(self): np.ones_like(self.data)}
        leaves: List[Tensor] = []

        for node in reversed(order):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue

            if node.creator is None:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                leaves.append(node)
                continue

            input_grads = node.creator.backward(grad)
            for parent, parent_grad in zip(node.creator.inputs, input_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                parent_grad = unbroadcast(np.asarray(parent_grad, dtype=parent.dtype), parent.shape)
                if _STATE.checked and parent_grad.shape != parent.shape:
                    raise ShapeError(f"{type(node.creator).__name__}.backward returned a gradient of shape "
                                     f"{parent_grad.shape} for an input of shape {parent.shape}.")
                key = id(parent)
                pending[key] = parent_grad if key not in pending else pending[key] + parent_grad

        self._consumed = True
        return {leaf: leaf.grad for leaf in leaves}

    # ------------------------------------------------------------------ operators
    def _lift(self, other: Union["Tensor", Scalar, Array]) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        return Tensor(other, dtype=self.dtype)

    def __add__(self, other):
        return Add.apply(self, self._lift(other))

    def __radd__(self, other):
        return Add.apply(self._lift(other), self)

    def __sub__(self, other):
        return Sub.apply(self, self._lift(other))

    def __rsub__(self, other):
        return Sub.apply(self._lift(other), self)

    def __mul__(self, other):
        return Mul.apply(self, self._lift(other))

    def __rmul__(self, other):
        return Mul.apply(self._lift(other), self)

    def __truediv__(self, other):
        return Div.apply(self, self._lift(other))

    def __rtruediv__(self, other):
        return Div.apply(self._lift(other), self)

    def __pow__(self, exponent):
        exponent_is_tensor = isinstance(exponent, Tensor)
        return Pow.apply(self, self._lift(exponent), exponent_is_tensor=exponent_is_tensor)

    def __neg__(self):
        return Neg.apply(self)

    def __getitem__(self, index):
        return GetItem.apply(self, index=index)

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Reshape.apply(self, shape=shape)

    def transpose(self, *axes: int) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return Transpose.apply(self, axes=axes)

    def sum(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> "Tensor":
        return Sum.apply(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> "Tensor":
        return Mean.apply(self, axis=axis, keepdims=keepdims)


def _topological_order(root: Tensor) -> List[Tensor]:
    # Iterative DFS; deep U-Net++ graphs overflow the recursion limit
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        if node.creator is not None:
            for parent in reversed(node.creator.inputs):
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
    return order


class Function:

    def __init__(self, *inputs: Tensor) -> None:
        """
        Base class for differentiable operations.

        Subclasses implement ``forward`` on raw arrays and ``backward``, which maps the gradient of
        the output to one gradient (or ``None``) per input.

        :param inputs: The tensors this operation consumes.
        """
        self.inputs = inputs

    def forward(self, *arrays: Array, **kwargs: Any) -> Array:
        raise NotImplementedError(f"{type(self).__name__}.forward is not implemented.")

    def backward(self, grad: Array) -> Tuple[Optional[Array], ...]:
        raise NotImplementedError(f"{type(self).__name__}.backward is not implemented.")

    @classmethod
    def apply(cls, *inputs: Tensor, **kwargs: Any) -> Tensor:
        """
        Run the forward pass and, when gradients are enabled, link the result into the tape.

        :param inputs: Input tensors.
        :param kwargs: Non-differentiable options forwarded to ``forward``.
        :return: The output tensor.
        :raises NumericalError: In checked mode, if the result contains NaN or infinity.
        """
        function = cls(*inputs)
        out = function.forward(*(tensor.data for tensor in inputs), **kwargs)
        requires_grad = _STATE.grad_enabled and any(tensor.requires_grad for tensor in inputs)
        if not requires_grad:
            function.inputs = ()

        if _STATE.checked and not np.all(np.isfinite(out)):
            raise NumericalError(f"{cls.__name__} produced non-finite values.", name=cls.__name__)

        return Tensor(out, requires_grad=requires_grad, creator=function if requires_grad else None,
                      dtype=np.asarray(out).dtype)


# ---------------------------------------------------------------------- elementwise arithmetic
class Add(Function):

    def forward(self, a, b):
        return a + b

    def backward(self, grad):
        return grad, grad


class Sub(Function):

    def forward(self, a, b):
        return a - b

    def backward(self, grad):
        return grad, -grad


class Mul(Function):

    def forward(self, a, b):
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return grad * self.b, grad * self.a


class Div(Function):

    def forward(self, a, b):
        if _STATE.checked and np.any(b == 0):
            raise NumericalError("Division by zero in div(a, b).", name='div')
        self.a, self.b = a, b
        return a / b

    def backward(self, grad):
        grad_a = grad / self.b
        return grad_a, -grad_a * self.a / self.b


class Pow(Function):

    def forward(self, a, b, exponent_is_tensor: bool = False):
        if _STATE.checked and exponent_is_tensor and np.any(a <= 0):
            raise NumericalError("pow(a, b) with a tensor exponent needs a strictly positive base.", name='pow')
        self.a, self.b = a, b
        self.out = np.power(a, b)
        return self.out

    def backward(self, grad):
        grad_a = grad * self.b * np.power(self.a, self.b - 1)
        grad_b = None
        if self.inputs[1].requires_grad:
            grad_b = grad * self.out * np.log(np.where(self.a > 0, self.a, 1))
        return grad_a, grad_b


class Neg(Function):

    def forward(self, a):
        return -a

    def backward(self, grad):
        return -grad,


class Exp(Function):

    def forward(self, a):
        self.out = np.exp(a)
        return self.out

    def backward(self, grad):
        return grad * self.out,


class Abs(Function):

    def forward(self, a):
        # sign(0) = 0: the L1 subgradient at exact ties is zero
        self.sign = np.sign(a)
        return np.abs(a)

    def backward(self, grad):
        return grad * self.sign,


class ClampMin(Function):

    def forward(self, a, minimum: float = 0.0):
        self.mask = a >= minimum
        return np.maximum(a, np.asarray(minimum, dtype=a.dtype))

    def backward(self, grad):
        return grad * self.mask,


class Clamp01(Function):

    def forward(self, a):
        self.mask = (a >= 0) & (a <= 1)
        return np.clip(a, 0, 1)

    def backward(self, grad):
        return grad * self.mask,


# ---------------------------------------------------------------------- shape manipulation
class Reshape(Function):

    def forward(self, a, shape=()):
        self.in_shape = a.shape
        return a.reshape(shape)

    def backward(self, grad):
        return grad.reshape(self.in_shape),


class Transpose(Function):

    def forward(self, a, axes=()):
        self.axes = tuple(axes) if axes else tuple(reversed(range(a.ndim)))
        return np.ascontiguousarray(np.transpose(a, self.axes))

    def backward(self, grad):
        return np.transpose(grad, np.argsort(self.axes)),


class GetItem(Function):

    def forward(self, a, index=None):
        self.in_shape, self.index = a.shape, index
        return np.array(a[index], copy=True)

    def backward(self, grad):
        out = np.zeros(self.in_shape, dtype=grad.dtype)
        np.add.at(out, self.index, grad)
        return out,


class Concat(Function):

    def forward(self, *arrays, axis: int = 1):
        self.axis = axis
        self.sizes = [array.shape[axis] for array in arrays]
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad):
        splits = np.cumsum(self.sizes)[:-1]
        return tuple(np.split(grad, splits, axis=self.axis))


# ---------------------------------------------------------------------- reductions
def _normalise_axis(axis, ndim: int) -> Tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(sorted(a % ndim for a in axis))


class Sum(Function):

    def forward(self, a, axis=None, keepdims: bool = False):
        if a.size == 0:
            raise ShapeError("sum() of an empty tensor.", dimension=0)
        self.in_shape = a.shape
        self.axis = _normalise_axis(axis, a.ndim)
        self.keepdims = keepdims
        return np.asarray(a.sum(axis=self.axis, keepdims=keepdims))

    def backward(self, grad):
        if not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return np.broadcast_to(grad, self.in_shape).copy(),


class Mean(Function):

    def forward(self, a, axis=None, keepdims: bool = False):
        if a.size == 0:
            raise ShapeError("mean() of an empty tensor.", dimension=0)
        self.in_shape = a.shape
        self.axis = _normalise_axis(axis, a.ndim)
        self.keepdims = keepdims
        self.count = int(np.prod([a.shape[i] for i in self.axis]))
        return np.asarray(a.mean(axis=self.axis, keepdims=keepdims))

    def backward(self, grad):
        if not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return np.broadcast_to(grad / self.count, self.in_shape).copy(),
