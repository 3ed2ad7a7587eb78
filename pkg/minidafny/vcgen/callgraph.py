"""
Call graph over methods and functions, with strongly connected components
"""
from dataclasses import dataclass, field
from typing import Dict, List, Set

from minidafny.frontend import ast
from minidafny.typecheck.types import TypedProgram


@dataclass
class CallGraph:
    edges: Dict[str, List[str]]
    component: Dict[str, int] = field(default_factory=dict)
    components: List[List[str]] = field(default_factory=list)

    def same_cycle(self, caller: str, callee: str) -> bool:
        """Whether a call from caller to callee can recur back to caller"""
        if caller not in self.component or callee not in self.component:
            return False
        if caller == callee:
            return caller in self.edges.get(caller, [])
        return self.component[caller] == self.component[callee]

    def is_recursive(self, name: str) -> bool:
        return any(self.same_cycle(name, callee) for callee in self.edges.get(name, []))


def _callees(decl: ast.Decl) -> List[str]:
    found: List[str] = []
    if isinstance(decl, ast.FunctionDecl):
        exprs = [decl.body]
    else:
        exprs = []
        for stmt in ast.walk_statements(decl.body):
            if isinstance(stmt, ast.MultiAssignCall) and stmt.decl is not None:
                found.append(stmt.decl.qualified_name)
    for expr in exprs:
        for node in ast.walk(expr):
            if isinstance(node, ast.Call) and node.decl is not None:
                found.append(node.decl.qualified_name)
    return sorted(set(found))


def _tarjan(edges: Dict[str, List[str]]) -> List[List[str]]:
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    on_stack: Set[str] = set()
    stack: List[str] = []
    components: List[List[str]] = []

    def connect(node: str):
        index[node] = low[node] = len(index)
        stack.append(node)
        on_stack.add(node)
        for succ in edges.get(node, []):
            if succ not in index:
                connect(succ)
                low[node] = min(low[node], low[succ])
            elif succ in on_stack:
                low[node] = min(low[node], index[succ])
        if low[node] == index[node]:
            component = []
            while True:
                member = stack.pop()
                on_stack.discard(member)
                component.append(member)
                if member == node:
                    break
            components.append(sorted(component))

    for node in sorted(edges):
        if node not in index:
            connect(node)
    return components


def build_callgraph(tp: TypedProgram) -> CallGraph:
    """Edges from each declaration to the declarations its body calls"""
    edges = {name: _callees(info.decl) for name, info in tp.decls.items()}
    graph = CallGraph(edges)
    graph.components = _tarjan(edges)
    for k, component in enumerate(graph.components):
        for name in component:
            graph.component[name] = k
    return graph
