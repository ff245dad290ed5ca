"""A directed greybox fuzzing toolkit for the MiniProc toy language."""

__version__ = "0.1.0"
