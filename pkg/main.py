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
import sys

sys.path.append('..')

from src.cli import main


if __name__ == '__main__':
    sys.exit(main())
