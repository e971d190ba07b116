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
from typing import Optional, Tuple, Union
import hashlib
import os
import struct

import numpy as np
import pandas as pd

from .tensor import Tensor, get_default_dtype

F32_MAGIC = b'ADRF'
PPM_MAGIC = b'P6'


class ImageFormatError(ValueError):

    def __init__(self, message: str, position: Optional[int] = None) -> None:
        """
        Raised on malformed image or raw-field files.

        :param message: What was expected and what was found.
        :param position: Byte offset at which the problem was detected.
        """
        super().__init__(message if position is None else f"{message} (at byte {position})")
        self.position = position


def _as_chw(image: Union[Tensor, np.ndarray]) -> np.ndarray:
    array = image.data if isinstance(image, Tensor) else np.asarray(image)
    if array.ndim == 4:
        if array.shape[0] != 1:
            raise ValueError(f"Only single images can be saved, got a batch of {array.shape[0]}.")
        array = array[0]
    if array.ndim == 2:
        array = array[None]
    if array.ndim != 3 or array.shape[0] not in (1, 3):
        raise ValueError(f"Images must be 1 x H x W or 3 x H x W, got shape {array.shape}.")
    return array


def quantize(image: Union[Tensor, np.ndarray]) -> np.ndarray:
    """
    Clamp to [0, 1] and map to bytes with round-half-up: ``floor(v * 255 + 0.5)``.

    :return: H x W x 3 uint8 array (single-channel input is replicated to grey RGB).
    """
    array = np.clip(_as_chw(image).astype(np.float64), 0.0, 1.0)
    array = np.floor(array * 255.0 + 0.5).astype(np.uint8)
    if array.shape[0] == 1:
        array = np.repeat(array, 3, axis=0)
    return np.ascontiguousarray(array.transpose(1, 2, 0))


def normalize_minmax(image: Union[Tensor, np.ndarray]) -> np.ndarray:
    """
    Min-max scale to [0, 1]; a constant map becomes uniform mid-grey (0.5).
    """
    array = _as_chw(image).astype(np.float64)
    low, high = array.min(), array.max()
    if high - low <= 0:
        return np.full(array.shape, 0.5)
    return (array - low) / (high - low)


class IO:

    def __init__(self) -> None:
        """
        File I/O for images (binary PPM, optional PNG), raw float fields and pandas reports.

        Example usage:
            ```python
            image = IO.load_image('sample.ppm')          # 3 x H x W floats in [0, 1]
            IO.save_image(image, 'copy.ppm')
            IO.save_normalized(noise_map, 'noise.ppm')   # min-max scaled for display
            ```
        """
        pass

    # ------------------------------------------------------------------ images
    @staticmethod
    def _read_ppm(raw: bytes) -> Tuple[np.ndarray, int, int]:
        if raw[:2] != PPM_MAGIC:
            raise ImageFormatError(f"Expected binary PPM magic {PPM_MAGIC!r}, found {raw[:2]!r}.", position=0)

        tokens = []
        position = 2
        while len(tokens) < 3:
            if position >= len(raw):
                raise ImageFormatError("PPM header ends before width, height and maxval.", position=position)
            char = raw[position:position + 1]
            if char.isspace():
                position += 1
            elif char == b'#':
                end = raw.find(b'\n', position)
                position = len(raw) if end < 0 else end + 1
            else:
                start = position
                while position < len(raw) and not raw[position:position + 1].isspace() \
                        and raw[position:position + 1] != b'#':
                    position += 1
                token = raw[start:position]
                if not token.isdigit():
                    raise ImageFormatError(f"PPM header field {token!r} is not a positive integer.", position=start)
                tokens.append(int(token))

        if position >= len(raw) or not raw[position:position + 1].isspace():
            raise ImageFormatError("PPM header must end with a single whitespace byte.", position=position)
        position += 1

        width, height, maxval = tokens
        if width < 1 or height < 1:
            raise ImageFormatError(f"PPM size {width}x{height} is empty.", position=2)
        if maxval != 255:
            raise ImageFormatError(f"Only 8-bit PPM (maxval 255) is supported, found maxval {maxval}.",
                                   position=position - 1)

        expected = width * height * 3
        payload = raw[position:position + expected]
        if len(payload) < expected:
            raise ImageFormatError(f"PPM payload truncated: expected {expected} bytes, found {len(payload)}.",
                                   position=position + len(payload))
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
        return pixels, width, height

    @staticmethod
    def load_image(path: str, allow_png: bool = False, dtype: Optional[type] = None) -> np.ndarray:
        """
        Load an RGB image as a 3 x H x W array with values ``v / 255``.

        :param path: A binary PPM (P6, maxval 255) or, with ``allow_png``, a PNG file.
        :param allow_png: Enable PNG decoding through Pillow.
        :param dtype: Output dtype; the engine default when omitted.
        :return: Array of shape 3 x H x W in [0, 1].
        :raises FileNotFoundError: If the file does not exist.
        :raises ImageFormatError: On a malformed header, wrong magic or truncated payload.
        """
        if not os.path.isfile(path):
            raise FileNotFoundError(f"Image file {path} not found.")
        dtype = dtype or get_default_dtype()

        if path.lower().endswith('.png'):
            if not allow_png:
                raise ImageFormatError(f"{path} is a PNG file; enable PNG support with allow_png (requires Pillow).")
            from PIL import Image
            with Image.open(path) as handle:
                pixels = np.asarray(handle.convert('RGB'), dtype=np.uint8)
        else:
            with open(path, 'rb') as fh:
                pixels, _, _ = IO._read_ppm(fh.read())

        return (pixels.transpose(2, 0, 1).astype(np.float64) / 255.0).astype(dtype)

    @staticmethod
    def save_image(image: Union[Tensor, np.ndarray], path: str) -> None:
        """
        Write a 1- or 3-channel image in [0, 1] as binary PPM (clamped, round-half-up quantisation).
        """
        pixels = quantize(image)
        height, width = pixels.shape[:2]
        with open(path, 'wb') as fh:
            fh.write(b'P6\n%d %d\n255\n' % (width, height))
            fh.write(pixels.tobytes())

    @staticmethod
    def save_normalized(image: Union[Tensor, np.ndarray], path: str) -> None:
        """
        Write a low-magnitude map (noise, turbidity) after min-max scaling.
        """
        IO.save_image(normalize_minmax(image), path)

    # ------------------------------------------------------------------ raw float fields
    @staticmethod
    def save_f32(field: Union[Tensor, np.ndarray], path: str) -> None:
        """
        Write a C x H x W field as ``b'ADRF'``, then u32 C, H, W and float32 values, all little-endian.
        """
        array = field.data if isinstance(field, Tensor) else np.asarray(field)
        if array.ndim == 4 and array.shape[0] == 1:
            array = array[0]
        elif array.ndim == 2:
            array = array[None]
        if array.ndim != 3:
            raise ValueError(f"Raw fields must be C x H x W, got shape {array.shape}.")
        c, h, w = array.shape
        with open(path, 'wb') as fh:
            fh.write(F32_MAGIC + struct.pack('<III', c, h, w))
            fh.write(np.ascontiguousarray(array, dtype='<f4').tobytes())

    @staticmethod
    def load_f32(path: str) -> np.ndarray:
        with open(path, 'rb') as fh:
            raw = fh.read()
        if raw[:4] != F32_MAGIC:
            raise ImageFormatError(f"Expected raw field magic {F32_MAGIC!r}, found {raw[:4]!r}.", position=0)
        if len(raw) < 16:
            raise ImageFormatError("Raw field header truncated.", position=len(raw))
        c, h, w = struct.unpack('<III', raw[4:16])
        expected = 4 * c * h * w
        if len(raw) - 16 != expected:
            raise ImageFormatError(f"Raw field payload should hold {expected} bytes, found {len(raw) - 16}.",
                                   position=16)
        return np.frombuffer(raw[16:], dtype='<f4').reshape(c, h, w).astype(np.float32)

    @staticmethod
    def sha256(path: str) -> str:
        digest = hashlib.sha256()
        with open(path, 'rb') as fh:
            for block in iter(lambda: fh.read(1 << 16), b''):
                digest.update(block)
        return digest.hexdigest()

    # ------------------------------------------------------------------ tables
    @staticmethod
    def to_csv(df: pd.DataFrame, path: str, typed: bool = False) -> None:
        """
        Save a DataFrame to CSV.

        With ``typed`` a row holding each column's dtype is inserted below the header, so that
        :meth:`read_csv` restores the exact dtypes (reports that are read back by the ablation harness).
        Run logs and metrics use plain CSV with a fixed header.

        :param df: DataFrame to save.
        :param path: Destination file.
        :param typed: Insert the dtype row.
        """
        if typed:
            dtypes_addon = pd.DataFrame([dict(zip(df.columns.tolist(), df.dtypes.astype(str).tolist()))])
            df = pd.concat([dtypes_addon, df.astype(object)], ignore_index=True)
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        df.to_csv(path, index=False)

    @staticmethod
    def read_csv(path: str, typed: bool = False) -> pd.DataFrame:
        """
        Read a CSV written by :meth:`to_csv`, restoring dtypes when the file is typed.
        """
        if not typed:
            return pd.read_csv(path)
        dtypes = pd.read_csv(path, nrows=1).iloc[0].to_dict()
        return pd.read_csv(path, dtype=dtypes, skiprows=[1])
