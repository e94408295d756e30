"""Pretty-printer producing source that parses back to an equal tree."""
from typing import List

from bitterm.frontend import ast as A

INDENT = "    "


def print_expr(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return f"{e.value}{'u' if e.unsigned else ''}{'l' if e.long else ''}"
    if isinstance(e, A.Name):
        return e.ident
    if isinstance(e, A.Nondet):
        return f"{e.spelling}()"
    if isinstance(e, A.Unary):
        return f"{e.op}{_operand(e.operand)}"
    if isinstance(e, A.Cast):
        return f"({e.target}){_operand(e.operand)}"
    if isinstance(e, A.Binary):
        return f"{_nested(e.left)} {e.op} {_nested(e.right)}"
    raise TypeError(f"not an expression: {e!r}")


def _operand(e: A.Expr) -> str:
    text = print_expr(e)
    return f"({text})" if isinstance(e, (A.Binary, A.Unary, A.Cast)) else text


def _nested(e: A.Expr) -> str:
    text = print_expr(e)
    return f"({text})" if isinstance(e, A.Binary) else text


def _rhs(value) -> str:
    return print_call(value) if isinstance(value, A.Call) else print_expr(value)


def print_call(call: A.Call) -> str:
    return f"{call.name}({', '.join(print_expr(a) for a in call.args)})"


def _block(block: A.Block, depth: int) -> List[str]:
    lines = []
    for stmt in block.stmts:
        lines.extend(print_stmt(stmt, depth))
    return lines


def print_stmt(stmt: A.Stmt, depth: int = 0) -> List[str]:
    pad = INDENT * depth
    if isinstance(stmt, A.Block):
        return [pad + "{"] + _block(stmt, depth + 1) + [pad + "}"]
    if isinstance(stmt, A.Decl):
        init = "" if stmt.init is None else f" = {_rhs(stmt.init)}"
        return [f"{pad}{stmt.ctype} {stmt.name}{init};"]
    if isinstance(stmt, A.Assign):
        return [f"{pad}{stmt.target} {stmt.op} {_rhs(stmt.value)};"]
    if isinstance(stmt, A.CallStmt):
        return [f"{pad}{print_call(stmt.call)};"]
    if isinstance(stmt, A.If):
        lines = [f"{pad}if ({print_expr(stmt.cond)}) {{"] + _block(stmt.then, depth + 1)
        if stmt.orelse is not None:
            lines += [pad + "} else {"] + _block(stmt.orelse, depth + 1)
        return lines + [pad + "}"]
    if isinstance(stmt, A.While):
        return [f"{pad}while ({print_expr(stmt.cond)}) {{"] + _block(stmt.body, depth + 1) + [pad + "}"]
    if isinstance(stmt, A.Return):
        return [pad + ("return;" if stmt.value is None else f"return {print_expr(stmt.value)};")]
    if isinstance(stmt, A.Assume):
        return [f"{pad}assume({print_expr(stmt.cond)});"]
    if isinstance(stmt, A.Assert):
        return [f"{pad}assert({print_expr(stmt.cond)});"]
    if isinstance(stmt, A.InlinedBody):
        target = f" -> {stmt.result}" if stmt.result else ""
        return [f"{pad}// inlined {stmt.callee}{target}", pad + "{"] + _block(stmt.body, depth + 1) + [pad + "}"]
    raise TypeError(f"not a statement: {stmt!r}")


def print_procedure(proc: A.Procedure) -> str:
    params = ", ".join(f"{p.ctype} {p.name}" for p in proc.params)
    ret = "void" if proc.ret is None else str(proc.ret)
    lines = [f"{ret} {proc.name}({params}) {{"] + _block(proc.body, 1) + ["}"]
    return "\n".join(lines)


def print_program(program: A.Program) -> str:
    parts = []
    if program.globals:
        parts.append("\n".join(line for g in program.globals for line in print_stmt(g)))
    parts.extend(print_procedure(p) for p in program.procedures.values())
    return "\n\n".join(parts) + "\n"
