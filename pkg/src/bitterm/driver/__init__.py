"""Interprocedural driver: forward and backward passes over the call graph and verdict assembly."""

from .analyzer import Analyzer  # NOQA
from .records import AnalysisRecord, Budget, ProcedureVerdict, TermStatus, Verdict  # NOQA
