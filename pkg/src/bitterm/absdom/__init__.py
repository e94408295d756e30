"""Guarded template-polyhedra abstract domain."""

from .template import Row, Template, TemplateSpec, interval_template  # NOQA
from .value import AbstractValue, Bound, concretize, describe, describe_negation, is_subsumed, join  # NOQA
