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
import os.path
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
import matplotlib

matplotlib.use('Agg')
from matplotlib import pyplot as plt  # noqa: E402

from .configuration import cfg_paths  # noqa: E402
from .io import normalize_minmax  # noqa: E402
from .losses import TERMS  # noqa: E402
from .model import PipelineOutput  # noqa: E402

ACCENT = '#1B6F8A'


class _Figure:
    mplstyle: str = 'adr.mplstyle'

    def __init__(self, **kwargs):
        """
        Base figure: applies the bundled style and creates the axes.

        :param kwargs: Additional keyword arguments to pass to the plt.subplots function.
        """
        plt.style.use(os.path.join(cfg_paths.mplstyles, self.mplstyle))
        self.fig, self.axes = plt.subplots(**kwargs)

    def get_panels(self) -> Tuple[plt.Figure, np.ndarray]:
        return self.fig, self.axes

    def set_title(self, title: str, subtitle: str = '') -> None:
        """
        Left-aligned title and subtitle above the panels, with an accent rule on top.
        """
        self.fig.text(x=0.02, y=0.93, s=subtitle, ha='left', va='bottom', fontsize=10, alpha=.8)
        self.fig.text(x=0.02, y=0.965, s=title, ha='left', va='bottom', fontsize=12, weight='bold', alpha=.8)
        self.fig.add_artist(plt.Line2D([0.02, 0.98], [0.995, 0.995], transform=self.fig.transFigure,
                                       color=ACCENT, linewidth=1.5))

    def save(self, path: str, **kwargs) -> str:
        """
        Save the figure and close it.

        :param path: Destination file. A bare file name goes to the reports directory.
        :param kwargs: Additional keyword arguments to pass to savefig.
        :return: The path written.
        """
        if os.path.dirname(path) == '':
            path = os.path.join(cfg_paths.runs.ensure('reports'), path)
        self.fig.savefig(path, **kwargs)
        plt.close(self.fig)
        print(f"\N{FRAME WITH PICTURE} | Figure saved to {path:s}")
        return path


class PlotPanels(_Figure):
    """
    Every intermediate map of one image in a single figure: input, depth, transmission, turbidity and noise
    (min-max scaled), the dehazed image, illumination, reflectance and the enhanced output.

    Example usage:
        ```python
        result = enhance('runs/model.adr', 'dive.ppm', 'out/', dump_intermediates=True)
        PlotPanels(result.image, result.output).save('out/dive_panels.png')
        ```
    """
    panels = (('Input', None, False), ('Depth D', 'depth', False), ('Transmission t', 'transmission', False),
              ('Turbidity S (scaled)', 'turbidity', True), ('Noise N (scaled)', 'noise', True),
              ('Dehazed', 'dehazed', False), ('Illumination L', 'illumination', False),
              ('Reflectance R', 'reflectance', False), ('Enhanced', 'enhanced', False))

    def __init__(self, image: np.ndarray, output: PipelineOutput):
        super().__init__(nrows=3, ncols=3, figsize=(9, 9.6))
        for axis, (title, name, scaled) in zip(self.axes.flat, self.panels):
            array = image if name is None else self._tensor(output, name)
            array = normalize_minmax(array) if scaled else np.clip(array, 0.0, 1.0)
            if array.shape[0] == 1:
                axis.imshow(array[0], cmap='viridis', vmin=0.0, vmax=1.0)
            else:
                axis.imshow(array.transpose(1, 2, 0))
            axis.set_title(title)
            axis.set_axis_off()
        self.set_title('Three-stage decomposition', subtitle='Physics dehazing, Retinex split and U-Net++ output')

    @staticmethod
    def _tensor(output: PipelineOutput, name: str) -> np.ndarray:
        if name == 'enhanced':
            return output.enhanced.data[0]
        if name in ('illumination', 'reflectance'):
            return getattr(output.retinex, name).data[0]
        return getattr(output.dehaze, name).data[0]


class PlotLossCurves(_Figure):
    """
    Per-step loss terms and the total from a run log.
    """

    def __init__(self, run_log: pd.DataFrame, terms: Sequence[str] = TERMS):
        super().__init__(figsize=(7, 4.5))
        for term in terms:
            if run_log[term].abs().sum() > 0:
                self.axes.plot(run_log['step'], run_log[term], label=term, linewidth=1)
        self.axes.plot(run_log['step'], run_log['total'], label='total', color=ACCENT, linewidth=2)
        self.axes.set_yscale('log')
        self.axes.set_xlabel('Optimiser step')
        self.axes.legend(fontsize=9, loc='upper right', frameon=True, framealpha=0.85)
        self.fig.subplots_adjust(top=0.85)
        self.set_title('Training loss', subtitle='Weighted terms are shown before weighting')
