"""
Guarded template polyhedra.

A template is a list of rows ``G_r ==> a_r . x <= d_r`` over a vector of
formal variables. Guards are terms over the formals plus any guard symbols
the template declares; instantiating a template maps all of them to actual
terms. Row arithmetic is evaluated at a signed width wide enough that the
inner product cannot overflow.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import yaml

from bitterm.errors import TemplateError
from bitterm.logic import terms as T
from bitterm.logic.evaluate import inner_product_width, linear_term
from bitterm.logic.terms import Term

logger = logging.getLogger(__name__)

KINDS = ("loop", "io", "call", "pre")


@dataclass(frozen=True)
class Row:
    coefficients: Tuple[int, ...]
    guard: Term = T.TRUE
    label: str = ""

    def support(self) -> List[int]:
        return [i for i, c in enumerate(self.coefficients) if c]


@dataclass(frozen=True)
class Template:
    variables: Tuple[Term, ...]
    rows: Tuple[Row, ...]
    kind: str = "loop"
    guard_symbols: Tuple[Term, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TemplateError(f"unknown template kind {self.kind!r}")
        for row in self.rows:
            if len(row.coefficients) != len(self.variables):
                raise TemplateError(
                    f"row {row.label or row.coefficients} has {len(row.coefficients)} coefficients "
                    f"for {len(self.variables)} variables"
                )

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def formals(self) -> Tuple[Term, ...]:
        return self.variables + self.guard_symbols

    def row_width(self, index: int) -> int:
        row = self.rows[index]
        support = row.support()
        return inner_product_width([self.variables[i].width for i in support],
                                   [row.coefficients[i] for i in support])

    def row_range(self, index: int) -> Tuple[int, int]:
        """Smallest and largest value the row expression can take."""
        row = self.rows[index]
        lo = hi = 0
        for c, x in zip(row.coefficients, self.variables):
            if not c:
                continue
            vlo, vhi = T.type_range(x.width, x.signed)
            lo += min(c * vlo, c * vhi)
            hi += max(c * vlo, c * vhi)
        return lo, hi

    def row_term(self, index: int, mapping: Optional[Mapping[Term, Term]] = None) -> Term:
        row = self.rows[index]
        actuals = [mapping.get(x, x) if mapping else x for x in self.variables]
        pairs = [(row.coefficients[i], actuals[i]) for i in row.support()]
        return linear_term(pairs, self.row_width(index))

    def row_guard(self, index: int, mapping: Optional[Mapping[Term, Term]] = None) -> Term:
        guard = self.rows[index].guard
        return T.substitute(guard, mapping) if mapping else guard

    def row_value(self, index: int, valuation: Mapping[str, int]) -> int:
        """Row expression value under a valuation of the formals, as a Python int."""
        row = self.rows[index]
        total = 0
        for c, x in zip(row.coefficients, self.variables):
            if c:
                v = valuation[x.name]
                total += c * (T.to_signed(v, x.width) if x.signed else v & T.mask(x.width))
        return total

    def restrict(self, indices: Iterable[int]) -> "Template":
        return Template(self.variables, tuple(self.rows[i] for i in indices), self.kind, self.guard_symbols, self.name)

    def extend(self, rows: Iterable[Row]) -> "Template":
        return Template(self.variables, self.rows + tuple(rows), self.kind, self.guard_symbols, self.name)


def numeric(variables: Iterable[Term]) -> List[Term]:
    return [x for x in variables if x.width > 1]


def interval_rows(variables: Sequence[Term], guard: Term = T.TRUE, names: Optional[Sequence[str]] = None) -> List[Row]:
    rows = []
    for i, x in enumerate(variables):
        if x.width == 1:
            continue
        label = names[i] if names else x.name
        unit = [0] * len(variables)
        unit[i] = 1
        rows.append(Row(tuple(unit), guard, f"{label}<=d"))
        unit[i] = -1
        rows.append(Row(tuple(unit), guard, f"-{label}<=d"))
    return rows


def interval_template(variables: Sequence[Term], guard: Term = T.TRUE, kind: str = "io",
                      guard_symbols: Sequence[Term] = (), name: str = "") -> Template:
    """Two rows per numeric variable: ``x <= d`` and ``-x <= d``."""
    variables = tuple(variables)
    return Template(variables, tuple(interval_rows(variables, guard)), kind, tuple(guard_symbols), name)


@dataclass
class TemplateSpec:
    """Template selection as configured: the built-in shapes or a YAML sidecar."""

    shape: str = "interval"
    rows: List[Union[List[int], Dict[str, int]]] = field(default_factory=list)
    interval: bool = True
    overflow_rows: bool = True
    max_vars: int = 32

    @classmethod
    def parse(cls, value: str, max_vars: int = 32) -> "TemplateSpec":
        if value in ("interval", "box"):
            return cls(shape=value, overflow_rows=value == "interval", max_vars=max_vars)
        path = Path(value)
        if not path.is_file():
            raise TemplateError(f"template must be 'interval', 'box' or a YAML file, got {value!r}")
        try:
            data = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as e:
            raise TemplateError(f"cannot read template file {value}: {e}") from e
        rows = data.get("rows", [])
        if not isinstance(rows, list):
            raise TemplateError("template file needs a list under 'rows'")
        spec = cls(shape="file", rows=rows, interval=bool(data.get("interval", True)),
                   overflow_rows=bool(data.get("overflow_rows", False)), max_vars=max_vars)
        logger.info(f"loaded {len(rows)} template rows from {value}")
        return spec

    def extra_rows(self, variables: Sequence[Term], names: Sequence[str], guard: Term) -> List[Row]:
        """Sidecar rows over ``variables``; rows naming absent variables are skipped."""
        out = []
        index = {n: i for i, n in enumerate(names)}
        for entry in self.rows:
            coefficients = [0] * len(variables)
            if isinstance(entry, dict):
                if not set(entry) <= set(index):
                    continue
                for n, c in entry.items():
                    coefficients[index[n]] = int(c)
            elif isinstance(entry, list):
                if len(entry) != len(variables):
                    continue
                coefficients = [int(c) for c in entry]
            else:
                raise TemplateError(f"bad template row {entry!r}")
            if any(coefficients):
                out.append(Row(tuple(coefficients), guard, "sidecar"))
        return out

    def build(self, variables: Sequence[Term], names: Sequence[str], guard: Term = T.TRUE, kind: str = "io",
              guard_symbols: Sequence[Term] = (), name: str = "") -> Template:
        variables = list(variables)[: self.max_vars]
        names = list(names)[: self.max_vars]
        rows = interval_rows(variables, guard, names) if (self.interval or self.shape != "file") else []
        if self.shape == "file":
            rows += self.extra_rows(variables, names, guard)
        if not rows and variables:
            rows = interval_rows(variables, guard, names)
        return Template(tuple(variables), tuple(rows), kind, tuple(guard_symbols), name)
