import logging
from typing import Dict, List, Tuple

from bitterm.absdom import Row, Template, TemplateSpec
from bitterm.logic import terms as T
from bitterm.ssa import LoopInfo, ProcedureTS

logger = logging.getLogger(__name__)


def _padded(rows, before: int, after: int) -> List[Row]:
    return [Row((0,) * before + r.coefficients + (0,) * after, r.guard, r.label) for r in rows]


def _nonempty(template: Template, guard) -> Template:
    """A template without rows cannot tell bottom from top; give it the row ``0 <= d``."""
    if template.rows:
        return template
    return template.extend([Row((0,) * len(template.variables), guard, "reachable")])


class Templates:
    """Builds, and caches per procedure, the templates one analysis run uses."""

    def __init__(self, spec: TemplateSpec = None):
        self.spec = spec or TemplateSpec()
        self._cache: Dict[Tuple[int, str], object] = {}

    def _cached(self, ts: ProcedureTS, key: str, build):
        slot = (id(ts), key)
        if slot not in self._cache:
            self._cache[slot] = build()
        return self._cache[slot]

    def loops(self, ts: ProcedureTS) -> List[Template]:
        return [self.loop(ts, loop) for loop in ts.loops]

    def loop(self, ts: ProcedureTS, loop: LoopInfo) -> Template:
        """Rows over the loop-head state guarded by the head guard, plus the loop's overflow rows."""

        def build() -> Template:
            template = self.spec.build(loop.state, loop.names, loop.head_guard, "loop", (loop.head_guard,),
                                       name=f"{ts.name}.loop{loop.index}")
            if not self.spec.overflow_rows:
                return _nonempty(template, loop.head_guard)
            kept = len(template.variables)
            extra = [Row(c[:kept], g, label) for c, g, label in loop.overflow_rows if not any(c[kept:])]
            if len(extra) < len(loop.overflow_rows):
                dropped = len(loop.overflow_rows) - len(extra)
                logger.debug(f"{ts.name} loop {loop.index}: dropped {dropped} overflow rows beyond max_template_vars")
            return _nonempty(template.extend(extra), loop.head_guard)

        return self._cached(ts, f"loop{loop.index}", build)

    def summary(self, ts: ProcedureTS) -> Template:
        """Rows over inputs and outputs, all guarded by the exit guard."""
        return self._cached(ts, "summary", lambda: _nonempty(self._boundary(ts, "io", ts.exit_guard), ts.exit_guard))

    def context(self, ts: ProcedureTS) -> Template:
        """Calling-context rows: inputs unguarded, outputs guarded by the exit guard."""
        return self._cached(ts, "context", lambda: _nonempty(self._boundary(ts, "call", T.TRUE), T.TRUE))

    def precondition(self, ts: ProcedureTS) -> Template:
        def build() -> Template:
            template = self.spec.build(ts.inputs, ts.input_names, T.TRUE, "pre", name=f"{ts.name}.pre")
            return _nonempty(template, T.TRUE)

        return self._cached(ts, "pre", build)

    def _boundary(self, ts: ProcedureTS, kind: str, input_guard) -> Template:
        inputs = self.spec.build(ts.inputs, ts.input_names, input_guard)
        outputs = self.spec.build(ts.outputs, ts.output_names, ts.exit_guard)
        n_in, n_out = len(inputs.variables), len(outputs.variables)
        rows = _padded(inputs.rows, 0, n_out) + _padded(outputs.rows, n_in, 0)
        return Template(inputs.variables + outputs.variables, tuple(rows), kind, (ts.exit_guard,),
                        name=f"{ts.name}.{kind}")
