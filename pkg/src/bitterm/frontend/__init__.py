"""Parsing, type checking and call-graph construction for the input language."""
from bitterm.frontend.ast import IntType, Procedure, Program  # NOQA
from bitterm.frontend.callgraph import build_call_graph, reachable  # NOQA
from bitterm.frontend.parser import parse, parse_condition  # NOQA
from bitterm.frontend.printer import print_program  # NOQA
