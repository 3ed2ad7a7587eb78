"""
Negation normal form and skolemization
"""
from typing import Dict, Tuple

from minidafny import formula as F
from minidafny.formula import Term
from minidafny.prover.verdict import UNSUPPORTED_FRAGMENT, Incomplete


def nnf(term: Term) -> Term:
    """
    Negation normal form over and / or / quantifiers

    Implications, equivalences and boolean if-then-else are expanded;
    negations end up directly on atoms.
    """
    memo: Dict[Tuple[int, bool], Term] = {}

    def walk(t: Term, positive: bool) -> Term:
        key = (id(t), positive)
        hit = memo.get(key)
        if hit is not None:
            return hit
        op = t.op
        if op == "bool":
            result = t if positive else F.not_(t)
        elif op == "not":
            result = walk(t.args[0], not positive)
        elif op == "and":
            parts = [walk(a, positive) for a in t.args]
            result = F.and_(*parts) if positive else F.or_(*parts)
        elif op == "or":
            parts = [walk(a, positive) for a in t.args]
            result = F.or_(*parts) if positive else F.and_(*parts)
        elif op == "implies":
            lhs, rhs = walk(t.args[0], not positive), walk(t.args[1], positive)
            result = F.or_(lhs, rhs) if positive else F.and_(lhs, rhs)
        elif op == "iff":
            a, b = t.args
            if positive:
                result = F.or_(F.and_(walk(a, True), walk(b, True)), F.and_(walk(a, False), walk(b, False)))
            else:
                result = F.or_(F.and_(walk(a, True), walk(b, False)), F.and_(walk(a, False), walk(b, True)))
        elif op == "ite" and t.sort == F.BOOL:
            c, then, other = t.args
            result = F.or_(F.and_(walk(c, True), walk(then, positive)),
                           F.and_(walk(c, False), walk(other, positive)))
        elif op in ("forall", "exists"):
            kind = op if positive else ("exists" if op == "forall" else "forall")
            result = F.quantifier(kind, t.value, walk(t.args[0], positive))
        else:
            result = t if positive else F.not_(t)
        memo[key] = result
        return result

    return walk(term, True)


def _has_exists(term: Term) -> bool:
    return any(node.op == "exists" for node in F.subterms(term))


class Skolemizer:
    """Replaces existentials outside every universal by fresh constants `x!skN`"""

    def __init__(self):
        self.count = 0
        self.constants: Dict[str, str] = {}

    def fresh(self, var: str) -> str:
        self.count += 1
        name = f"{var.split('#')[0]}!sk{self.count}"
        self.constants[name] = F.INT
        return name

    def __call__(self, term: Term) -> Term:
        """
        Raises:
            Incomplete: an existential occurs below a universal
        """
        op = term.op
        if op == "exists":
            name = self.fresh(term.value)
            return self(F.substitute(term.args[0], {term.value: F.mk_var(name, F.INT)}))
        if op == "forall":
            if _has_exists(term.args[0]):
                raise Incomplete(UNSUPPORTED_FRAGMENT, "existential below a universal")
            return term
        if op in ("and", "or"):
            return F.rebuild(term, tuple(self(a) for a in term.args))
        return term


def skolemize(term: Term) -> Term:
    """Skolemize an NNF formula"""
    return Skolemizer()(term)
