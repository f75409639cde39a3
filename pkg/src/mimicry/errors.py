"""Exception types shared across the pipeline.

Each error carries the name of the pipeline stage that raised it so the
command-line front end can print a one-line diagnostic naming the failing
stage.  Pure numeric functions raise plain ``ValueError`` for domain
violations instead.
"""

from __future__ import annotations


class MimicryError(Exception):
    """Base class for pipeline failures."""

    def __init__(self, message: str, stage: str = "pipeline"):
        super().__init__(message)
        self.stage = stage


class FormatError(MimicryError):
    """Input file is structurally malformed (e.g. missing header columns)."""


class EmptyInputError(MimicryError):
    """Input parsed cleanly but produced zero usable rows."""


class NoDataError(MimicryError):
    """A construction step ended with nothing to work on (empty calendar,
    empty universe)."""


class InsufficientDataError(MimicryError):
    """Not enough observations for the requested window or fit."""
