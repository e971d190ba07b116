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
from typing import Dict, List, Optional, Tuple

import numpy as np

from .nn import Module, Conv2d, ConvBlock, Linear, LayerNorm
from .physics import DehazeBundle
from .retinex import RetinexBundle
from .tensor import Tensor, ShapeError
from . import functional as F

STAGE_INPUT_LAYOUT: Tuple[Tuple[str, int], ...] = (
    ('image', 3),
    ('dehazed', 3),
    ('illumination_enhanced', 1),
    ('reflectance_refined', 3),
    ('depth', 1),
    ('transmission', 3),
    ('noise', 3),
    ('turbidity', 3),
)


@dataclass
class StageInput20:
    """
    The enhancement network input: every earlier output stacked along channels in the fixed layout
    [I 3, J_dehazed 3, L_enhanced 1, R_refined 3, D 1, t 3, N 3, S 3].
    """
    tensor: Tensor

    def __post_init__(self) -> None:
        channels = sum(c for _, c in STAGE_INPUT_LAYOUT)
        if self.tensor.shape[1] != channels:
            raise ShapeError(f"Stage input must have {channels} channels, got {self.tensor.shape[1]}.", dimension=1)

    @staticmethod
    def channel_range(name: str) -> Tuple[int, int]:
        start = 0
        for field_name, channels in STAGE_INPUT_LAYOUT:
            if field_name == name:
                return start, start + channels
            start += channels
        raise KeyError(f"'{name}' is not part of the stage input. Fields: {[n for n, _ in STAGE_INPUT_LAYOUT]}.")

    def slice(self, name: str) -> Tensor:
        start, stop = self.channel_range(name)
        return self.tensor[:, start:stop]


def assemble_input(image: Tensor, dehaze: DehazeBundle, retinex: RetinexBundle) -> StageInput20:
    """
    Concatenate the observed image and every stage-1/stage-2 output in the fixed layout order.

    :raises ShapeError: Naming the index (in layout order) of the first field whose N, H or W differs.
    """
    fields = {
        'image': image,
        'dehazed': dehaze.dehazed,
        'illumination_enhanced': retinex.illumination_enhanced,
        'reflectance_refined': retinex.reflectance_refined,
        'depth': dehaze.depth,
        'transmission': dehaze.transmission,
        'noise': dehaze.noise,
        'turbidity': dehaze.turbidity,
    }
    tensors = []
    for name, channels in STAGE_INPUT_LAYOUT:
        if fields[name].shape[1] != channels:
            raise ShapeError(f"'{name}' must have {channels} channels, got {fields[name].shape[1]}.", dimension=1)
        tensors.append(fields[name])
    return StageInput20(F.concat_channels(tensors))


class AttentionBlock(Module):

    def __init__(self, dim: int, rng: np.random.Generator, heads: int = 4, feed_forward: bool = False) -> None:
        """
        Pre-norm multi-head self-attention over spatial tokens with a residual connection.

        There is no positional encoding, so the block is equivariant to any permutation of the spatial
        positions. With ``feed_forward`` a pre-norm GELU MLP (dim -> 2 dim -> dim) follows.

        :param dim: Token (channel) dimension; must be divisible by ``heads``.
        :param rng: Generator used for the projection weights.
        :param heads: Number of attention heads.
        :param feed_forward: Append the MLP sublayer.
        :raises ShapeError: If ``dim`` is not divisible by ``heads``.
        """
        if dim % heads:
            raise ShapeError(f"Attention dimension {dim} is not divisible by {heads} heads.", dimension=1)
        self.norm = LayerNorm(dim)
        self.query = Linear(dim, dim, rng)
        self.key = Linear(dim, dim, rng)
        self.value = Linear(dim, dim, rng)
        self.output = Linear(dim, dim, rng)
        if feed_forward:
            self.ffn_norm = LayerNorm(dim)
            self.ffn0 = Linear(dim, 2 * dim, rng)
            self.ffn1 = Linear(2 * dim, dim, rng)
        self.dim = dim
        self.heads = heads
        self.feed_forward = feed_forward
        self.last_attention: Optional[np.ndarray] = None

    def _split_heads(self, x: Tensor, n: int, tokens: int) -> Tensor:
        d = self.dim // self.heads
        return x.reshape(n, tokens, self.heads, d).transpose(0, 2, 1, 3).reshape(n * self.heads, tokens, d)

    def forward(self, features: Tensor) -> Tensor:
        n, c, h, w = features.shape
        if c != self.dim:
            raise ShapeError(f"Attention block expects {self.dim} channels, got {c}.", dimension=1)
        tokens = h * w
        x = features.reshape(n, c, tokens).transpose(0, 2, 1)

        normed = self.norm(x)
        q = self._split_heads(self.query(normed), n, tokens)
        k = self._split_heads(self.key(normed), n, tokens)
        v = self._split_heads(self.value(normed), n, tokens)

        scale = 1.0 / np.sqrt(self.dim // self.heads)
        weights = F.softmax_lastdim(F.matmul_batched(q, k.transpose(0, 2, 1)) * scale)
        self.last_attention = weights.data.reshape(n, self.heads, tokens, tokens).copy()

        mixed = F.matmul_batched(weights, v).reshape(n, self.heads, tokens, c // self.heads)
        mixed = mixed.transpose(0, 2, 1, 3).reshape(n, tokens, c)
        x = x + self.output(mixed)

        if self.feed_forward:
            x = x + self.ffn1(F.activation('gelu', self.ffn0(self.ffn_norm(x))))

        return x.transpose(0, 2, 1).reshape(n, c, h, w)


class EnhanceNet(Module):
    """
    U-Net++ over the 20-channel stage input with self-attention on the deepest backbone node.

    Backbone nodes X^{i,0} have widths (w, 2w, 4w, 8w). A nested node is
    ``X^{i,j} = block(concat[X^{i,0}, ..., X^{i,j-1}, up(X^{i+1,j-1})])`` where ``up`` halves the channels
    with a 1x1 convolution and upsamples bilinearly by 2, so every node of level i has width ``w * 2**i``.
    Only X^{0,3} feeds the output projection.

    Example usage:
        ```python
        net = EnhanceNet(np.random.default_rng(0), base_width=8)
        enhanced = net(stage_input.tensor)  # N x 3 x H x W in (0, 1)
        ```
    """

    depth = 4

    def __init__(self, rng: np.random.Generator, in_channels: int = 20, base_width: int = 64,
                 dense_skips: bool = True, attention_ffn: bool = False) -> None:
        self.widths = [base_width * 2 ** i for i in range(self.depth)]
        self.dense_skips = dense_skips

        for i, width in enumerate(self.widths):
            setattr(self, f'node_{i}_0', ConvBlock(in_channels if i == 0 else self.widths[i - 1], width, rng))
        self.attention = AttentionBlock(self.widths[-1], rng, heads=4, feed_forward=attention_ffn)

        for i in range(self.depth - 1):
            setattr(self, f'up_{i}', Conv2d(self.widths[i + 1], self.widths[i], 1, rng))
        for i, j in self.decoder_nodes():
            inputs = (j + 1) * self.widths[i] if dense_skips else 2 * self.widths[i]
            setattr(self, f'node_{i}_{j}', ConvBlock(inputs, self.widths[i], rng))

        self.head = Conv2d(self.widths[0], 3, 1, rng)
        self.last_node_shapes: Dict[str, Tuple[int, ...]] = OrderedDict()

    def decoder_nodes(self) -> List[Tuple[int, int]]:
        """Nested nodes in evaluation order; the plain U-Net keeps only the decoder diagonal."""
        last = self.depth - 1
        nodes = [(i, j) for j in range(1, self.depth) for i in range(self.depth - j)]
        return nodes if self.dense_skips else [(i, j) for i, j in nodes if i + j == last]

    def unetpp_encode(self, x: Tensor) -> List[Tensor]:
        h, w = x.shape[-2:]
        scale = 2 ** (self.depth - 1)
        if h % scale or w % scale:
            raise ShapeError(f"The enhancement network pools {self.depth - 1} times: H and W must be divisible by "
                             f"{scale}, got {h}x{w}.", dimension=2 if h % scale else 3)
        self.last_node_shapes = OrderedDict()
        nodes = []
        for i in range(self.depth):
            x = getattr(self, f'node_{i}_0')(x if i == 0 else F.max_pool2d(x))
            self.last_node_shapes[f'X^{{{i},0}}'] = x.shape
            nodes.append(x)
        return nodes

    def bottleneck_attention(self, features: Tensor) -> Tensor:
        return self.attention(features)

    def unetpp_decode(self, backbone: List[Tensor]) -> Tensor:
        grid: Dict[Tuple[int, int], Tensor] = {(i, 0): node for i, node in enumerate(backbone)}
        for i, j in self.decoder_nodes():
            below = F.upsample_bilinear(getattr(self, f'up_{i}')(grid[(i + 1, j - 1)]), 2)
            if self.dense_skips:
                skips = [grid[(i, k)] for k in range(j)]
            else:
                skips = [grid[(i, 0)]]
            grid[(i, j)] = getattr(self, f'node_{i}_{j}')(F.concat_channels(skips + [below]))
            self.last_node_shapes[f'X^{{{i},{j}}}'] = grid[(i, j)].shape
        return grid[(0, self.depth - 1)]

    def project_output(self, features: Tensor) -> Tensor:
        return F.sigmoid(self.head(features))

    def forward(self, x: Tensor) -> Tensor:
        backbone = self.unetpp_encode(x)
        backbone[-1] = self.bottleneck_attention(backbone[-1])
        return self.project_output(self.unetpp_decode(backbone))
