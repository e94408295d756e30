"""Analyse one program and store its JSON report"""

from .pipeline import create_pipeline  # NOQA
