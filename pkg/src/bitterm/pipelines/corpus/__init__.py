"""Run a corpus in both analysis modes and compare them"""

from .pipeline import create_pipeline  # NOQA
