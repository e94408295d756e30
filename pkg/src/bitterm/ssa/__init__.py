"""SSA encoding of procedures into guarded transition systems."""

from .encoder import CallSite, LoopInfo, ProcedureTS, encode, halting_procedures  # NOQA
from .printer import format_procedure, format_program  # NOQA
from .summaries import Signature, inline_all, inline_procedure, instantiate, instantiate_summaries  # NOQA
