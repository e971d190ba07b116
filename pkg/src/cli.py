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
from typing import List, Optional
import argparse
import glob
import os
import sys
import traceback

from .__version__ import __version__
from .checkpoint import CheckpointError
from .configuration import Config, ConfigError
from .datasets import DataError, PairedDataset
from .io import IO, ImageFormatError
from .tensor import NumericalError, ShapeError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class GradientCheckFailed(ArithmeticError):
    pass


class _Parser(argparse.ArgumentParser):

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='adr', description='Three-stage underwater image enhancement: physics-guided dehazing, '
                                             'Retinex decomposition and a U-Net++ enhancer.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--cite', action='store_true', help='print a BibTeX entry for this software and exit')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')

    synth = commands.add_parser('synth', help='generate a synthetic paired dataset')
    synth.add_argument('--spec', help='scene settings, flat JSON')
    synth.add_argument('--out', required=True, help='output directory')
    synth.add_argument('--n', type=int, default=64, help='number of pairs')
    synth.add_argument('--size', type=int, default=64, help='square image size')
    synth.add_argument('--seed', type=int, help='dataset seed (overrides the scene settings)')
    synth.add_argument('--test-fraction', type=float, default=0.2)
    synth.add_argument('--base-images', help='directory of clean PPM images to degrade instead of colour charts')
    synth.add_argument('--no-truth', action='store_true', help='skip the raw D, t, N, S fields')
    synth.add_argument('--n-jobs', type=int, default=1)

    train = commands.add_parser('train', help='train the three stages jointly')
    train.add_argument('--config', required=True, help='run configuration, flat JSON')
    train.add_argument('--resume', help='checkpoint to continue from')
    train.add_argument('--plot', action='store_true', help='save the loss curves next to the run log')
    train.add_argument('--quiet', action='store_true', help='hide progress bars')

    for name, help_text in (('enhance', 'enhance one image'),
                            ('decompose', 'enhance one image and dump every intermediate map')):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('--ckpt', required=True, help='checkpoint file')
        sub.add_argument('--in', dest='image', required=True, help='input image')
        sub.add_argument('--out', required=True, help='output directory')
        sub.add_argument('--strict', action='store_true', help='refuse sizes that are not multiples of 8')
        sub.add_argument('--allow-png', action='store_true')
        if name == 'enhance':
            sub.add_argument('--dump-intermediates', action='store_true', help='write all eight panels')
        else:
            sub.add_argument('--figure', action='store_true', help='also save every panel in one PNG figure')

    evaluate = commands.add_parser('eval', help='score a checkpoint on a paired dataset')
    evaluate.add_argument('--ckpt', required=True, help='checkpoint file')
    evaluate.add_argument('--data', required=True, help='dataset directory')
    evaluate.add_argument('--split', default='test', choices=('train', 'test', 'all'))
    evaluate.add_argument('--out', help='write the per-image report to this CSV')
    evaluate.add_argument('--n-jobs', type=int)

    gradcheck = commands.add_parser('gradcheck', help='finite-difference check of every gradient')
    gradcheck.add_argument('--config', help='model configuration, flat JSON (architecture and toggles)')
    gradcheck.add_argument('--base-width', type=int, default=8, help='U-Net++ width when no config is given')
    gradcheck.add_argument('--size', type=int, default=16, help='spatial size of the pipeline check (at least 16)')
    gradcheck.add_argument('--out', help='write the report to this CSV')
    gradcheck.add_argument('--skip-pipeline', action='store_true')

    ablate = commands.add_parser('ablate', help='train and score the full model and each ablation variant')
    ablate.add_argument('--config', required=True, help='base run configuration, flat JSON')
    ablate.add_argument('--out', default='ablation', help='directory for checkpoints, run logs and the table')
    return parser


def _synth(args) -> int:
    from .synth import SceneSpec, make_dataset, write_dataset

    spec = SceneSpec.from_json(args.spec) if args.spec else SceneSpec()
    base_images = None
    if args.base_images:
        paths = sorted(glob.glob(os.path.join(args.base_images, '*.ppm')))
        if not paths:
            raise DataError(f"No .ppm images found in {args.base_images}.")
        base_images = [IO.load_image(path) for path in paths]
    dataset = make_dataset(args.n, spec, size=args.size, base_images=base_images, seed=args.seed,
                           test_fraction=args.test_fraction, n_jobs=args.n_jobs)
    manifest = write_dataset(dataset, args.out, write_truth=not args.no_truth)
    print(f"\N{WATER WAVE} | {len(dataset.train)} train and {len(dataset.test)} test pairs written; manifest "
          f"{manifest}")
    return EXIT_OK


def _train(args) -> int:
    from .training import train

    config = Config.from_json(args.config)
    result = train(config, resume=args.resume, progress=not args.quiet)
    final = result.run_log['total'].iloc[-1] if result.steps else float('nan')
    print(f"\N{CHEQUERED FLAG} | {result.steps} steps, final loss {final:.5f}")
    if args.plot and result.steps:
        from .visualisation import PlotLossCurves
        PlotLossCurves(result.run_log).save(os.path.splitext(os.path.abspath(config.run_log))[0] + '.png')
    return EXIT_OK


def _enhance(args) -> int:
    from .inference import decompose, enhance

    if args.command == 'decompose':
        result = decompose(args.ckpt, args.image, args.out, figure=args.figure, strict=args.strict,
                           allow_png=args.allow_png)
    else:
        result = enhance(args.ckpt, args.image, args.out, dump_intermediates=args.dump_intermediates,
                         strict=args.strict, allow_png=args.allow_png)
    for panel, path in result.paths.items():
        print(f"\N{FRAME WITH PICTURE} | {panel:<13s} {path}")
    return EXIT_OK


def _eval(args) -> int:
    from .inference import evaluate_checkpoint
    from .metrics import format_table

    reports = evaluate_checkpoint(args.ckpt, args.data, split=args.split, n_jobs=args.n_jobs)
    print(format_table(reports))
    if args.out:
        reports[0].save(args.out)
        print(f"\N{FLOPPY DISK} | Per-image report written to {args.out}")
    return EXIT_OK


def _gradcheck(args) -> int:
    from .gradcheck import run_suite

    config = Config.from_json(args.config) if args.config else Config(base_width=args.base_width)
    report = run_suite(config, size=args.size, include_pipeline=not args.skip_pipeline)
    print(report.to_string(index=False, float_format=lambda v: f"{v:.3e}"))
    if args.out:
        IO.to_csv(report, args.out)
    failed = report.loc[~report['passed'], 'component'].tolist()
    if failed:
        raise GradientCheckFailed(f"Gradient check failed for: {', '.join(failed)}")
    print("\N{WHITE HEAVY CHECK MARK} | Every gradient matches its finite-difference estimate")
    return EXIT_OK


def _ablate(args) -> int:
    from .training import run_ablation_study

    config = Config.from_json(args.config)
    options = dict(image_size=config.image_size, allow_png=config.allow_png, test_fraction=config.test_fraction)
    train_set = PairedDataset.from_directory(config.dataset, split='train', **options)
    test_set = PairedDataset.from_directory(config.dataset, split='test', **options)
    table = run_ablation_study(config, train_set, test_set, out_dir=args.out)
    print(table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    print("* frozen random-feature distance, not comparable with LPIPS")
    return EXIT_OK


COMMANDS = {'synth': _synth, 'train': _train, 'enhance': _enhance, 'decompose': _enhance, 'eval': _eval,
            'gradcheck': _gradcheck, 'ablate': _ablate}


def exit_code(error: BaseException) -> int:
    """Map an exception onto the documented exit codes."""
    if isinstance(error, (UsageError, ConfigError)):
        return EXIT_USAGE
    if isinstance(error, (ImageFormatError, DataError, CheckpointError, ShapeError, FileNotFoundError)):
        return EXIT_DATA
    if isinstance(error, (NumericalError, GradientCheckFailed)):
        return EXIT_NUMERICAL
    return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the ``adr`` command.

    :param argv: Arguments without the program name; ``sys.argv[1:]`` when omitted.
    :return: 0 on success, 1 for usage or configuration errors, 2 for data errors, 3 for numerical failures.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cite:
            from .__cite__ import citation
            print(citation())
            return EXIT_OK
        if args.command is None:
            parser.print_help()
            return EXIT_USAGE
        return COMMANDS[args.command](args)

    except UsageError as error:
        print(f"\N{CROSS MARK} | {error}", file=sys.stderr)
        return EXIT_USAGE

    except SystemExit as stop:
        # --help and --version
        return int(stop.code or 0)

    except (ConfigError, ImageFormatError, DataError, CheckpointError, ShapeError, FileNotFoundError,
            NumericalError, GradientCheckFailed) as error:
        print(f"\N{CROSS MARK} | {type(error).__name__}: {error}", file=sys.stderr)
        return exit_code(error)

    except Exception as error:
        traceback.print_exc()
        print(f"\N{CROSS MARK} | Unexpected {type(error).__name__}: {error}", file=sys.stderr)
        return EXIT_USAGE
