"""Template-based synthesis of invariants, summaries, contexts, rankings and preconditions."""

from .bounds import SynthesisBounds, parse_schedule  # NOQA
from .engine import Clause, Instance, TemplateSolver  # NOQA
from .invariants import comp_callctx_o, comp_inv_sum_o, forward_body, infer_invariant, invariant_formula  # NOQA
from .preconditions import BackwardAnalysis, precondition_formula  # NOQA
from .ranking import LexRanking, comp_term_arg  # NOQA
from .templates import Templates  # NOQA
