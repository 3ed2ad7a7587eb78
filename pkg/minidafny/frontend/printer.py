"""
Pretty printer producing source that parses back to the same AST
"""
from typing import List

from minidafny.frontend import ast

_BINARY_PREC = {
    "<==>": 1, "==>": 2, "||": 3, "&&": 4,
    "<": 5, "<=": 5, ">": 5, ">=": 5, "==": 5, "!=": 5,
    "+": 6, "-": 6, "*": 7, "/": 7, "%": 7,
}
_UNARY_PREC = 8
_POSTFIX_PREC = 9
_ATOM_PREC = 10
INDENT = "    "


def precedence(expr: ast.Expr) -> int:
    if isinstance(expr, ast.Binary):
        return _BINARY_PREC[expr.op]
    if isinstance(expr, ast.ChainedCmp):
        return 5
    if isinstance(expr, ast.Unary):
        return _UNARY_PREC
    if isinstance(expr, (ast.ArraySelect, ast.Length)):
        return _POSTFIX_PREC
    if isinstance(expr, (ast.Quantifier, ast.IfThenElse)):
        return 0
    return _ATOM_PREC


def _paren(expr: ast.Expr, minimum: int) -> str:
    text = format_expr(expr)
    return text if precedence(expr) >= minimum else f"({text})"


def format_expr(expr: ast.Expr) -> str:
    if isinstance(expr, ast.IntLit):
        return str(expr.value)
    if isinstance(expr, ast.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, ast.NullLit):
        return "null"
    if isinstance(expr, ast.Var):
        return expr.name
    if isinstance(expr, ast.Binary):
        prec = _BINARY_PREC[expr.op]
        if expr.op == "==>":
            left, right = _paren(expr.left, prec + 1), _paren(expr.right, prec)
        elif prec == 5:
            left, right = _paren(expr.left, prec + 1), _paren(expr.right, prec + 1)
        else:
            left, right = _paren(expr.left, prec), _paren(expr.right, prec + 1)
        return f"{left} {expr.op} {right}"
    if isinstance(expr, ast.ChainedCmp):
        parts = [_paren(expr.operands[0], 6)]
        for op, operand in zip(expr.ops, expr.operands[1:]):
            parts.append(f"{op} {_paren(operand, 6)}")
        return " ".join(parts)
    if isinstance(expr, ast.Unary):
        return f"{expr.op}{_paren(expr.operand, _UNARY_PREC)}"
    if isinstance(expr, ast.ArraySelect):
        return f"{_paren(expr.array, _POSTFIX_PREC)}[{format_expr(expr.index)}]"
    if isinstance(expr, ast.Length):
        return f"{_paren(expr.array, _POSTFIX_PREC)}.Length"
    if isinstance(expr, ast.IfThenElse):
        return f"if {format_expr(expr.cond)} then {format_expr(expr.then)} else {format_expr(expr.else_)}"
    if isinstance(expr, ast.Call):
        return _format_call(expr.qualifier, expr.name, expr.args)
    if isinstance(expr, ast.Quantifier):
        return f"{expr.kind} {expr.var} :: {format_expr(expr.body)}"
    raise TypeError(f"cannot format {type(expr).__name__}")


def _format_call(qualifier, name, args) -> str:
    prefix = f"{qualifier}." if qualifier else ""
    return f"{prefix}{name}({', '.join(format_expr(a) for a in args)})"


def format_stmt(stmt: ast.Stmt, depth: int) -> List[str]:
    pad = INDENT * depth
    if isinstance(stmt, ast.VarDecl):
        ghost = "ghost " if stmt.ghost else ""
        annotation = f": {stmt.type}" if stmt.type is not None else ""
        init = f" := {format_expr(stmt.init)}" if stmt.init is not None else ""
        return [f"{pad}{ghost}var {stmt.name}{annotation}{init};"]
    if isinstance(stmt, ast.Assign):
        return [f"{pad}{format_expr(stmt.lhs)} := {format_expr(stmt.rhs)};"]
    if isinstance(stmt, ast.MultiAssignCall):
        call = _format_call(stmt.qualifier, stmt.method, stmt.args)
        if not stmt.lhs:
            return [f"{pad}{call};"]
        lhs = ", ".join(stmt.lhs)
        if stmt.declares:
            ghost = "ghost " if stmt.ghost else ""
            return [f"{pad}{ghost}var {lhs} := {call};"]
        return [f"{pad}{lhs} := {call};"]
    if isinstance(stmt, ast.If):
        lines = [f"{pad}if {format_expr(stmt.cond)} {{"]
        lines += format_block_body(stmt.then, depth + 1)
        if stmt.else_ is not None:
            lines.append(f"{pad}}} else {{")
            lines += format_block_body(stmt.else_, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, ast.While):
        lines = [f"{pad}while {format_expr(stmt.guard)}"]
        lines += [f"{pad}{INDENT}invariant {format_expr(inv)};" for inv in stmt.invariants]
        if stmt.decreases is not None:
            lines.append(f"{pad}{INDENT}decreases {format_expr(stmt.decreases)};")
        lines.append(f"{pad}{{")
        lines += format_block_body(stmt.body, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, ast.Assert):
        return [f"{pad}assert {format_expr(stmt.expr)};"]
    if isinstance(stmt, ast.Break):
        return [f"{pad}break;"]
    raise TypeError(f"cannot format {type(stmt).__name__}")


def format_block_body(block: ast.Block, depth: int) -> List[str]:
    lines: List[str] = []
    for stmt in block.stmts:
        lines += format_stmt(stmt, depth)
    return lines


def _format_params(params: List[ast.Param]) -> str:
    return ", ".join(f"{'ghost ' if p.ghost else ''}{p.name}: {p.type}" for p in params)


def format_decl(decl: ast.Decl, depth: int) -> List[str]:
    pad = INDENT * depth
    clause_pad = pad + INDENT
    lines: List[str] = []
    if isinstance(decl, ast.MethodDecl):
        header = f"{pad}method {decl.name}({_format_params(decl.ins)})"
        if decl.outs:
            header += f" returns ({_format_params(decl.outs)})"
        lines.append(header)
        lines += [f"{clause_pad}requires {format_expr(e)};" for e in decl.requires]
        if decl.modifies:
            lines.append(f"{clause_pad}modifies {', '.join(f.name for f in decl.modifies)};")
        if decl.reads:
            lines.append(f"{clause_pad}reads {', '.join(f.name for f in decl.reads)};")
        lines += [f"{clause_pad}ensures {format_expr(e)};" for e in decl.ensures]
        if decl.decreases is not None:
            lines.append(f"{clause_pad}decreases {format_expr(decl.decreases)};")
        lines.append(f"{pad}{{")
        lines += format_block_body(decl.body, depth + 1)
        lines.append(f"{pad}}}")
        return lines

    keyword = "predicate" if decl.is_predicate else "function"
    if decl.is_function_method:
        keyword += " method"
    header = f"{pad}{keyword} {decl.name}({_format_params(decl.ins)})"
    if not decl.is_predicate:
        header += f": {decl.return_type}"
    lines.append(header)
    lines += [f"{clause_pad}requires {format_expr(e)};" for e in decl.requires]
    if decl.reads:
        lines.append(f"{clause_pad}reads {', '.join(f.name for f in decl.reads)};")
    lines += [f"{clause_pad}ensures {format_expr(e)};" for e in decl.ensures]
    if decl.decreases is not None:
        lines.append(f"{clause_pad}decreases {format_expr(decl.decreases)};")
    lines.append(f"{pad}{{")
    lines.append(f"{clause_pad}{format_expr(decl.body)}")
    lines.append(f"{pad}}}")
    return lines


def format_program(program: ast.Program) -> str:
    """Render a Program as .mdfy source"""
    chunks: List[str] = []
    items = sorted(
        [(c.span.start_line, c.span.start_col, k, c) for k, c in enumerate(program.classes)]
        + [(m.span.start_line, m.span.start_col, len(program.classes) + k, m)
           for k, m in enumerate(program.members)],
        key=lambda item: (item[0], item[1], item[2]),
    )
    for _, _, _, item in items:
        if isinstance(item, ast.ClassDecl):
            lines = [f"class {item.name} {{"]
            for k, member in enumerate(item.members):
                if k:
                    lines.append("")
                lines += format_decl(member, 1)
            lines.append("}")
        else:
            lines = format_decl(item, 0)
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"
