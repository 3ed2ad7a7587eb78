"""
Function definitions and their unfolding inside formulas
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from minidafny import formula as F
from minidafny.formula import Term
from minidafny.ir.translate import Translator, function_heaps, type_expr_sort
from minidafny.typecheck.types import TypedProgram

logger = logging.getLogger(__name__)


@dataclass
class FunctionDef:
    """A function as a logical definition over its parameter and heap symbols"""
    name: str
    params: Tuple[str, ...]          # parameter symbols, then heap variables
    requires: Term
    ensures: Term
    body: Term
    sort: str
    nat_result: bool = False

    def instantiate(self, clause: Term, args: Tuple[Term, ...]) -> Term:
        return F.substitute(clause, dict(zip(self.params, args)))


def build_function_table(tp: TypedProgram) -> Dict[str, FunctionDef]:
    """Translate every function of tp into a FunctionDef, keyed by qualified name"""
    translator = Translator(tp)
    table: Dict[str, FunctionDef] = {}
    for name, decl in tp.functions.items():
        info = tp.info(decl)
        params = tuple(symbol.unique for symbol in info.params)
        params += tuple(heap.value for heap in function_heaps(decl))
        table[name] = FunctionDef(
            name=name,
            params=params,
            requires=F.and_(*(translator.term(c) for c in decl.requires)),
            ensures=F.and_(*(translator.term(c) for c in decl.ensures)),
            body=translator.term(decl.body),
            sort=type_expr_sort(decl.return_type),
            nat_result=decl.return_type.name == "nat",
        )
    return table


def _facts(definition: FunctionDef, app: Term) -> List[Term]:
    facts = []
    ensures = definition.instantiate(definition.ensures, app.args)
    if ensures is not F.TRUE:
        facts.append(F.implies(definition.instantiate(definition.requires, app.args), ensures))
    if definition.nat_result:
        facts.append(F.ge(app, F.ZERO))
    return facts


def inline_functions(formula: Term, fuel: int, table: Dict[str, FunctionDef],
                     exclude: FrozenSet[Term] = frozenset()) -> Term:
    """
    Unfold function applications up to `fuel` levels per call chain

    Each application F(a) becomes `if requires[a] then body[a] else F(a)`.
    Applications without bound variables also contribute
    `requires[a] ==> ensures[a]` (and `F(a) >= 0` for nat results) as
    hypotheses; applications in `exclude` are unfolded but contribute none.

    Args:
        formula: formula to rewrite
        fuel: unfolding depth, 0 leaves every application uninterpreted
        table: definitions from build_function_table
        exclude: applications whose facts would be circular

    Returns:
        Rewritten formula, implied by the original under the definitions
    """

    def unfold(term: Term, depth: int) -> Term:
        def rewrite(node: Term, args: Tuple[Term, ...]):
            if node.op != "app" or node.value not in table:
                return None
            app = F.app(node.value, args, node.sort)
            if depth <= 0:
                return app
            definition = table[node.value]
            body = unfold(definition.instantiate(definition.body, args), depth - 1)
            return F.ite(definition.instantiate(definition.requires, args), body, app)

        return F.transform(term, rewrite)

    unfolded = unfold(formula, fuel)
    free = formula.free_vars
    facts: List[Term] = []
    for node in F.subterms(unfolded):
        if node.op == "app" and node.value in table and node not in exclude and node.free_vars <= free:
            facts.extend(_facts(table[node.value], node))
    if facts:
        logger.debug(f"inlining added {len(facts)} function fact(s)")
    return F.implies(F.and_(*facts), unfolded)
