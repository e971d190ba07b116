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
from typing import Any, Dict, Optional, Tuple
import json
import os
import struct

import numpy as np

from .configuration import Config
from .model import ADRModel
from .optim import AdamState
from .tensor import ShapeError

MAGIC = b'ADRCKPT1'
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Raised for malformed checkpoint files and for checkpoints that do not fit the requested model."""


@dataclass
class Checkpoint:
    """
    Everything needed to resume or reproduce a run: parameters in model order, Adam moments, the
    generator state and a configuration snapshot.

    Layout (little-endian): ``b'ADRCKPT1'``, u32 length + JSON metadata, u32 record count, then per record
    u32 name length, UTF-8 name, u32 ndim, ndim x u32 dims and the float32 payload. Parameter records
    come first, followed by ``adam.m.<name>`` and ``adam.v.<name>``.
    """
    meta: Dict[str, Any]
    parameters: 'OrderedDict[str, np.ndarray]' = field(default_factory=OrderedDict)
    adam_m: 'OrderedDict[str, np.ndarray]' = field(default_factory=OrderedDict)
    adam_v: 'OrderedDict[str, np.ndarray]' = field(default_factory=OrderedDict)

    @property
    def config(self) -> Config:
        return Config(**self.meta['config'])

    def records(self):
        yield from self.parameters.items()
        yield from ((f'adam.m.{name}', array) for name, array in self.adam_m.items())
        yield from ((f'adam.v.{name}', array) for name, array in self.adam_v.items())

    def to_bytes(self) -> bytes:
        meta = json.dumps(self.meta, sort_keys=True, separators=(',', ':')).encode('utf-8')
        records = list(self.records())
        chunks = [MAGIC, struct.pack('<I', len(meta)), meta, struct.pack('<I', len(records))]
        for name, array in records:
            encoded = name.encode('utf-8')
            array = np.ascontiguousarray(array, dtype='<f4')
            chunks.append(struct.pack('<I', len(encoded)) + encoded)
            chunks.append(struct.pack(f'<I{array.ndim}I', array.ndim, *array.shape))
            chunks.append(array.tobytes())
        return b''.join(chunks)

    @classmethod
    def from_bytes(cls, raw: bytes) -> 'Checkpoint':
        """
        :raises CheckpointError: On a wrong magic, a truncated file or trailing bytes.
        """
        if raw[:len(MAGIC)] != MAGIC:
            raise CheckpointError(f"Not a checkpoint: expected magic {MAGIC!r}, found {raw[:len(MAGIC)]!r}.")
        position = len(MAGIC)

        def take(n: int) -> bytes:
            nonlocal position
            if position + n > len(raw):
                raise CheckpointError(f"Checkpoint truncated at byte {position} (needed {n} more bytes).")
            chunk = raw[position:position + n]
            position += n
            return chunk

        (meta_length,) = struct.unpack('<I', take(4))
        try:
            meta = json.loads(take(meta_length).decode('utf-8'))
        except (UnicodeDecodeError, json.JSONDecodeError) as error:
            raise CheckpointError(f"Checkpoint metadata is corrupt: {error}") from None
        if meta.get('version') != FORMAT_VERSION:
            raise CheckpointError(f"Unsupported checkpoint version {meta.get('version')}; expected {FORMAT_VERSION}.")

        checkpoint = cls(meta=meta)
        (count,) = struct.unpack('<I', take(4))
        for _ in range(count):
            (name_length,) = struct.unpack('<I', take(4))
            name = take(name_length).decode('utf-8')
            (ndim,) = struct.unpack('<I', take(4))
            shape = struct.unpack(f'<{ndim}I', take(4 * ndim)) if ndim else ()
            size = int(np.prod(shape)) if ndim else 1
            array = np.frombuffer(take(4 * size), dtype='<f4').reshape(shape).astype(np.float32)
            if name.startswith('adam.m.'):
                checkpoint.adam_m[name[len('adam.m.'):]] = array
            elif name.startswith('adam.v.'):
                checkpoint.adam_v[name[len('adam.v.'):]] = array
            else:
                checkpoint.parameters[name] = array
        if position != len(raw):
            raise CheckpointError(f"Checkpoint has {len(raw) - position} unexpected trailing bytes.")
        return checkpoint


def build_checkpoint(model: ADRModel, config: Config, adam: Optional[AdamState] = None,
                     rng: Optional[np.random.Generator] = None, epoch: int = 0) -> Checkpoint:
    adam = adam or AdamState(lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)
    meta = {
        'version': FORMAT_VERSION,
        'config': config.to_dict(),
        'architecture': config.architecture(),
        'epoch': epoch,
        'rng': rng.bit_generator.state if rng is not None else None,
        'adam': {'lr': adam.lr, 'beta1': adam.beta1, 'beta2': adam.beta2, 'eps': adam.eps, 'step': adam.step},
    }
    parameters = OrderedDict((name, p.data) for name, p in model.named_parameters())
    order = [name for name in parameters if name in adam.m]
    return Checkpoint(meta=meta, parameters=parameters, adam_m=OrderedDict((n, adam.m[n]) for n in order),
                      adam_v=OrderedDict((n, adam.v[n]) for n in order))


def save_checkpoint(path: str, model: ADRModel, config: Config, adam: Optional[AdamState] = None,
                    rng: Optional[np.random.Generator] = None, epoch: int = 0) -> str:
    """
    Write a checkpoint file; the same model, optimiser and generator state always give the same bytes.

    :return: The path written.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as fh:
        fh.write(build_checkpoint(model, config, adam, rng, epoch).to_bytes())
    return path


def read_checkpoint(path: str) -> Checkpoint:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Checkpoint {path} not found.")
    with open(path, 'rb') as fh:
        return Checkpoint.from_bytes(fh.read())


def load_checkpoint(path: str, config: Optional[Config] = None) \
        -> Tuple[ADRModel, AdamState, Checkpoint]:
    """
    Rebuild the model, the optimiser state and the checkpoint metadata.

    :param path: Checkpoint file.
    :param config: Configuration to run with. Its architecture fields must equal the stored ones; the
                   ablation toggles and the run settings are taken from it. The stored configuration is
                   used when omitted.
    :return: ``(model, adam_state, checkpoint)``.
    :raises CheckpointError: If the architecture or any parameter name or shape differs.

    Example usage:
        ```python
        model, adam, checkpoint = load_checkpoint('runs/model.adr')
        ```
    """
    checkpoint = read_checkpoint(path)
    stored = checkpoint.config
    config = config or stored
    if config.architecture() != stored.architecture():
        raise CheckpointError(f"Checkpoint architecture {stored.architecture()} does not match the requested "
                              f"{config.architecture()}. Architectures are never adapted on load.")

    model = ADRModel.from_config(config)
    try:
        model.load_state_dict(checkpoint.parameters)
    except ShapeError as error:
        raise CheckpointError(f"Checkpoint parameters do not fit the model: {error}") from None

    hyper = checkpoint.meta['adam']
    adam = AdamState(lr=hyper['lr'], beta1=hyper['beta1'], beta2=hyper['beta2'], eps=hyper['eps'],
                     step=hyper['step'])
    for name, array in checkpoint.adam_m.items():
        adam.m[name] = array.copy()
        adam.v[name] = checkpoint.adam_v[name].copy()
    return model, adam, checkpoint


def restore_rng(checkpoint: Checkpoint) -> Optional[np.random.Generator]:
    state = checkpoint.meta.get('rng')
    if state is None:
        return None
    rng = np.random.default_rng()
    rng.bit_generator.state = state
    return rng
