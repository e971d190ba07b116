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
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal, special

from .tensor import (Function, Tensor, ShapeError, Array, Add, Sub, Mul, Div, Pow, Exp, Abs, ClampMin, Clamp01,
                     Concat, Sum, Mean)

Operand = Union[Tensor, float, int]


def _as_tensor(value: Operand, like: Tensor) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value, dtype=like.dtype)


# ---------------------------------------------------------------------- convolution
class Conv2d(Function):

    def forward(self, x, w, b, stride: int = 1, pad: int = 0):
        if x.ndim != 4:
            raise ShapeError(f"conv2d expects an N x C x H x W input, got {x.ndim} dimensions.", dimension='ndim')
        n, c, h, width = x.shape
        f, c_w, k, k_w = w.shape
        if c != c_w:
            raise ShapeError(f"conv2d: input has {c} channels (dimension 1) but the weight expects {c_w}.",
                             dimension=1)
        if k != k_w or k % 2 == 0:
            raise ShapeError(f"conv2d needs a square kernel of odd size, got {k}x{k_w}.", dimension=2)
        if b.shape != (f,):
            raise ShapeError(f"conv2d: bias has shape {b.shape}, expected ({f},).", dimension=0)

        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
        h_out = (h + 2 * pad - k) // stride + 1
        w_out = (width + 2 * pad - k) // stride + 1
        if h_out < 1 or w_out < 1:
            raise ShapeError(f"conv2d: kernel {k} does not fit a {h}x{width} input with pad {pad}.", dimension=2)

        windows = sliding_window_view(xp, (k, k), axis=(2, 3))[:, :, ::stride, ::stride][:, :, :h_out, :w_out]
        cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * h_out * w_out, c * k * k)
        w_mat = w.reshape(f, c * k * k)

        self.cols, self.w_mat = cols, w_mat
        self.geometry = (n, c, h, width, k, stride, pad, h_out, w_out, xp.shape)
        out = cols @ w_mat.T + b
        return np.ascontiguousarray(out.reshape(n, h_out, w_out, f).transpose(0, 3, 1, 2))

    def backward(self, grad):
        n, c, h, width, k, stride, pad, h_out, w_out, padded_shape = self.geometry
        f = self.w_mat.shape[0]
        g_mat = grad.transpose(0, 2, 3, 1).reshape(-1, f)

        grad_w = (g_mat.T @ self.cols).reshape(f, c, k, k)
        grad_b = g_mat.sum(axis=0)

        g_cols = (g_mat @ self.w_mat).reshape(n, h_out, w_out, c, k, k)
        grad_xp = np.zeros(padded_shape, dtype=grad.dtype)
        for i in range(k):
            for j in range(k):
                grad_xp[:, :, i:i + stride * h_out:stride, j:j + stride * w_out:stride] += \
                    g_cols[:, :, :, :, i, j].transpose(0, 3, 1, 2)

        grad_x = grad_xp[:, :, pad:pad + h, pad:pad + width] if pad else grad_xp
        return grad_x, grad_w, grad_b


def conv2d(x: Tensor, weight: Tensor, bias: Tensor, stride: int = 1, pad: Optional[int] = None) -> Tensor:
    """
    2-D cross-correlation of an N x Cin x H x W input with a Cout x Cin x k x k kernel.

    :param x: Input tensor.
    :param weight: Kernel, with odd spatial size k.
    :param bias: Per-output-channel bias of shape (Cout,).
    :param stride: Spatial stride.
    :param pad: Zero padding; defaults to ``k // 2`` ("same" output size for stride 1).
    :return: Tensor of shape N x Cout x H' x W' with H' = (H + 2 pad - k) / stride + 1.
    :raises ShapeError: Naming the offending dimension on any mismatch.
    """
    if pad is None:
        pad = weight.shape[-1] // 2
    return Conv2d.apply(x, weight, bias, stride=stride, pad=pad)


# ---------------------------------------------------------------------- pooling and resampling
class MaxPool2d(Function):

    def forward(self, x, k: int = 2):
        n, c, h, w = x.shape
        if h % k or w % k:
            raise ShapeError(f"max_pool2d: spatial size {h}x{w} is not divisible by {k}.",
                             dimension=2 if h % k else 3)
        blocks = x.reshape(n, c, h // k, k, w // k, k).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h // k, w // k, k * k)
        # argmax returns the first maximum, i.e. row-major tie-breaking inside each window
        self.argmax = blocks.argmax(axis=-1)
        self.geometry = (n, c, h, w, k)
        return np.take_along_axis(blocks, self.argmax[..., None], axis=-1)[..., 0]

    def backward(self, grad):
        n, c, h, w, k = self.geometry
        blocks = np.zeros((n, c, h // k, w // k, k * k), dtype=grad.dtype)
        np.put_along_axis(blocks, self.argmax[..., None], grad[..., None], axis=-1)
        out = blocks.reshape(n, c, h // k, w // k, k, k).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h, w)
        return out,


def max_pool2d(x: Tensor, k: int = 2) -> Tensor:
    """
    Non-overlapping k x k max pooling; gradients go to the first maximum of each window.
    """
    return MaxPool2d.apply(x, k=k)


@lru_cache(maxsize=64)
def interpolation_matrix(n_in: int, n_out: int, dtype_name: str = 'float64') -> Array:
    """
    Linear interpolation weights along one axis, half-pixel centres (align-corners = false).

    Row ``o`` samples the input at ``(o + 0.5) * n_in / n_out - 0.5``, clamped to the valid range.

    :param n_in: Input length.
    :param n_out: Output length.
    :param dtype_name: Floating type of the matrix.
    :return: Matrix of shape (n_out, n_in) whose rows sum to one.
    """
    matrix = np.zeros((n_out, n_in), dtype=np.float64)
    scale = n_in / n_out
    for o in range(n_out):
        source = min(max((o + 0.5) * scale - 0.5, 0.0), n_in - 1)
        lower = int(np.floor(source))
        upper = min(lower + 1, n_in - 1)
        weight = source - lower
        matrix[o, lower] += 1.0 - weight
        matrix[o, upper] += weight
    matrix = matrix.astype(dtype_name)
    matrix.setflags(write=False)
    return matrix


class Interpolate(Function):

    def forward(self, x, size: Tuple[int, int] = (1, 1)):
        h, w = x.shape[-2:]
        self.m_h = interpolation_matrix(h, size[0], x.dtype.name)
        self.m_w = interpolation_matrix(w, size[1], x.dtype.name)
        return np.ascontiguousarray(np.matmul(np.matmul(self.m_h, x), self.m_w.T))

    def backward(self, grad):
        return np.matmul(np.matmul(self.m_h.T, grad), self.m_w),


def upsample_bilinear(x: Tensor, scale: int) -> Tensor:
    """
    Bilinear upsampling by an integer factor (align-corners = false).

    :param x: Tensor whose last two dimensions are spatial.
    :param scale: Integer factor, at least 1.
    :return: Tensor with H and W multiplied by ``scale``.
    """
    if int(scale) != scale or scale < 1:
        raise ShapeError(f"upsample_bilinear needs an integer scale >= 1, got {scale}.", dimension='scale')
    if scale == 1:
        return x
    h, w = x.shape[-2:]
    return Interpolate.apply(x, size=(h * int(scale), w * int(scale)))


def resize_bilinear(x: Tensor, size: Union[int, Tuple[int, int]]) -> Tensor:
    """
    Resize the spatial dimensions with the same kernel as :func:`upsample_bilinear`.

    :param x: Tensor whose last two dimensions are spatial.
    :param size: Target size, an int (square) or (H, W).
    :return: The resized tensor; the input itself when the size already matches.
    """
    size = (size, size) if isinstance(size, int) else tuple(size)
    if size[0] < 1 or size[1] < 1:
        raise ShapeError(f"resize_bilinear: invalid target size {size}.", dimension='size')
    if tuple(x.shape[-2:]) == size:
        return x
    return Interpolate.apply(x, size=size)


def global_avg_pool(x: Tensor) -> Tensor:
    """N x C x H x W -> N x C spatial mean."""
    return Mean.apply(x, axis=(2, 3), keepdims=False)


# ---------------------------------------------------------------------- dense algebra
class Matmul(Function):

    def forward(self, a, b):
        if a.shape[-1] != b.shape[-2]:
            raise ShapeError(f"matmul: inner dimensions disagree ({a.shape[-1]} vs {b.shape[-2]}).",
                             dimension=a.ndim - 1)
        self.a, self.b = a, b
        return np.matmul(a, b)

    def backward(self, grad):
        return np.matmul(grad, np.swapaxes(self.b, -1, -2)), np.matmul(np.swapaxes(self.a, -1, -2), grad)


def matmul_batched(a: Tensor, b: Tensor) -> Tensor:
    """
    Batched product of B x M x K and B x K x P tensors.
    """
    if a.ndim != 3 or b.ndim != 3 or a.shape[0] != b.shape[0]:
        raise ShapeError(f"matmul_batched expects B x M x K and B x K x P, got {a.shape} and {b.shape}.",
                         dimension=0)
    return Matmul.apply(a, b)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """
    Affine map ``x @ weight.T + bias`` over the last dimension.

    :param x: Tensor of shape (..., F).
    :param weight: Tensor of shape (G, F).
    :param bias: Tensor of shape (G,).
    :return: Tensor of shape (..., G).
    """
    if x.shape[-1] != weight.shape[1]:
        raise ShapeError(f"linear: input has {x.shape[-1]} features but the weight expects {weight.shape[1]}.",
                         dimension=x.ndim - 1)
    if bias.shape != (weight.shape[0],):
        raise ShapeError(f"linear: bias has shape {bias.shape}, expected ({weight.shape[0]},).", dimension=0)
    return Matmul.apply(x, weight.transpose(1, 0)) + bias


class SoftmaxLastdim(Function):

    def forward(self, x):
        shifted = x - x.max(axis=-1, keepdims=True)
        exps = np.exp(shifted)
        self.out = exps / exps.sum(axis=-1, keepdims=True)
        return self.out

    def backward(self, grad):
        return self.out * (grad - (grad * self.out).sum(axis=-1, keepdims=True)),


def softmax_lastdim(x: Tensor) -> Tensor:
    """Numerically stable softmax over the last dimension."""
    if x.shape[-1] < 1:
        raise ShapeError("softmax_lastdim needs a non-empty last dimension.", dimension=x.ndim - 1)
    return SoftmaxLastdim.apply(x)


def concat_channels(inputs: Sequence[Tensor]) -> Tensor:
    """
    Concatenate N x Ci x H x W tensors along the channel axis, in list order.

    :raises ShapeError: Naming the index of the first input whose N, H or W disagrees.
    """
    if len(inputs) == 0:
        raise ShapeError("concat_channels needs at least one input.", dimension=1)
    reference = inputs[0].shape
    for index, tensor in enumerate(inputs):
        if tensor.ndim != 4 or (tensor.shape[0], *tensor.shape[2:]) != (reference[0], *reference[2:]):
            raise ShapeError(f"concat_channels: input {index} has shape {tensor.shape}, incompatible with "
                             f"{reference} outside the channel axis.", dimension=index)
    if len(inputs) == 1:
        return inputs[0]
    return Concat.apply(*inputs, axis=1)


# ---------------------------------------------------------------------- activations
class Relu(Function):

    def forward(self, x):
        self.mask = x > 0
        return np.where(self.mask, x, 0).astype(x.dtype)

    def backward(self, grad):
        return grad * self.mask,


class Sigmoid(Function):

    def forward(self, x):
        self.out = special.expit(x)
        return self.out

    def backward(self, grad):
        return grad * self.out * (1 - self.out),


class Tanh(Function):

    def forward(self, x):
        self.out = np.tanh(x)
        return self.out

    def backward(self, grad):
        return grad * (1 - self.out * self.out),


class Gelu(Function):

    def forward(self, x):
        self.x = x
        self.cdf = special.ndtr(x)
        return x * self.cdf

    def backward(self, grad):
        pdf = np.exp(-0.5 * self.x * self.x) / np.sqrt(2 * np.pi)
        return grad * (self.cdf + self.x * pdf),


_ACTIVATIONS = {'relu': Relu, 'sigmoid': Sigmoid, 'tanh': Tanh, 'gelu': Gelu}


def activation(kind: str, x: Tensor) -> Tensor:
    """
    Elementwise nonlinearity.

    :param kind: One of ``relu``, ``sigmoid``, ``tanh``, ``gelu`` (exact, Gaussian CDF form).
    :param x: Input tensor.
    :return: Activated tensor.
    """
    try:
        return _ACTIVATIONS[kind].apply(x)
    except KeyError:
        raise ValueError(f"Unknown activation '{kind}'. Available: {', '.join(_ACTIVATIONS)}.") from None


def relu(x: Tensor) -> Tensor:
    return Relu.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


# ---------------------------------------------------------------------- elementwise / reductions
def exp(x: Tensor) -> Tensor:
    return Exp.apply(x)


def absolute(x: Tensor) -> Tensor:
    return Abs.apply(x)


def clamp_min(x: Tensor, minimum: float) -> Tensor:
    return ClampMin.apply(x, minimum=minimum)


def clamp01(x: Tensor) -> Tensor:
    return Clamp01.apply(x)


def elementwise(kind: str, a: Tensor, b: Optional[Operand] = None) -> Tensor:
    """
    Dispatch an elementwise operation by name.

    Binary kinds (``add``, ``sub``, ``mul``, ``div``, ``pow``) broadcast ``b`` when it is a scalar,
    a per-channel tensor or a single-channel map. ``clamp_min`` takes the floor as ``b``;
    ``exp`` and ``clamp01`` ignore it.

    :raises NumericalError: In checked mode, on division by zero or a non-positive pow base.
    """
    if kind == 'exp':
        return Exp.apply(a)
    if kind == 'clamp01':
        return Clamp01.apply(a)
    if kind == 'clamp_min':
        return ClampMin.apply(a, minimum=float(b))
    binary = {'add': Add, 'sub': Sub, 'mul': Mul, 'div': Div}
    if kind in binary:
        return binary[kind].apply(a, _as_tensor(b, a))
    if kind == 'pow':
        return Pow.apply(a, _as_tensor(b, a), exponent_is_tensor=isinstance(b, Tensor))
    raise ValueError(f"Unknown elementwise kind '{kind}'.")


def reduce(kind: str, x: Tensor, axes: Optional[Union[int, Tuple[int, ...]]] = None) -> Tensor:
    """Mean or sum over ``axes`` (all axes by default)."""
    if kind == 'mean':
        return Mean.apply(x, axis=axes)
    if kind == 'sum':
        return Sum.apply(x, axis=axes)
    raise ValueError(f"Unknown reduction '{kind}'. Expected 'mean' or 'sum'.")


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalise over the last dimension, then scale and shift."""
    centred = x - x.mean(axis=-1, keepdims=True)
    variance = (centred * centred).mean(axis=-1, keepdims=True)
    return centred * Pow.apply(variance + eps, Tensor(-0.5, dtype=x.dtype)) * gain + bias


# ---------------------------------------------------------------------- fixed-kernel filtering
class Filter2dValid(Function):

    def forward(self, x, kernel: Array = None):
        kh, kw = kernel.shape
        if x.shape[-2] < kh or x.shape[-1] < kw:
            raise ShapeError(f"Image of size {x.shape[-2]}x{x.shape[-1]} is smaller than the {kh}x{kw} window.",
                             dimension=x.ndim - 2)
        self.kernel = kernel.astype(x.dtype)[None, None]
        return signal.correlate(x, self.kernel, mode='valid', method='direct')

    def backward(self, grad):
        return signal.convolve(grad, self.kernel, mode='full', method='direct'),


def filter2d_valid(x: Tensor, kernel: Array) -> Tensor:
    """
    Depthwise correlation of every N x C plane with a fixed 2-D kernel, keeping only full windows.
    """
    return Filter2dValid.apply(x, kernel=np.asarray(kernel))


def stack_batch(tensors: List[Tensor]) -> Tensor:
    """Concatenate 1 x C x H x W tensors along the batch axis."""
    return tensors[0] if len(tensors) == 1 else Concat.apply(*tensors, axis=0)
