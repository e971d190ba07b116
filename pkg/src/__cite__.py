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
import warnings
import datetime
import os.path

from .configuration import path_project

# Date of the first release, used when no git history is available
DATE_CREATED = '2026-10-18'


def last_commit_date(default: str = DATE_CREATED) -> str:
    """
    Date of the last commit of the project repository, as YYYY-MM-DD.

    :param default: Returned when GitPython is missing or the project is not a git checkout.
    :return: The date string.
    """
    try:
        import git

        repo = git.Repo(path_project)
        timestamp = repo.head.commit.committed_date
        return datetime.datetime.fromtimestamp(timestamp, tz=datetime.timezone.utc).strftime('%Y-%m-%d')

    except ModuleNotFoundError:
        warnings.warn('Git-python module was not found, but you can install it with <pip install GitPython>. '
                      'Returning the date of creation.', UserWarning)

    except Exception:
        warnings.warn('Could not retrieve the date of last commit. Returning the date of creation.', UserWarning)

    return default


def read_version() -> str:
    # Fetch the version from the base file
    with open(os.path.join(path_project, "src", "__version__.py"), "r") as fh:
        exec_output = {}
        exec(fh.read(), exec_output)
    return exec_output["__version__"]


def citation() -> str:
    """
    BibTeX entry for this software, dated by the last commit.
    """
    version = read_version()
    date = last_commit_date()
    return (r"@software{altamura_adr_underwater," "\n"
            r"  author = {{Altamura}, Edoardo}," "\n"
            r'  title = {"Desk-scale three-stage underwater image enhancement: physics-guided dehazing, '
            r'Retinex decomposition and U-Net++ refinement"},' "\n"
            f"  version = {{{version:s}}}," "\n"
            f"  date = {{{date:s}}}," "\n"
            r"}")
