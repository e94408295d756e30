"""Bit-vector terms, evaluation, bit-blasting and incremental solving."""

from .bitblast import BitBlaster, bitblast  # NOQA
from .evaluate import evaluate, extend_width  # NOQA
from .solver import Model, SessionFactory, SolverSession, SolverSettings, SolverStats, check  # NOQA
