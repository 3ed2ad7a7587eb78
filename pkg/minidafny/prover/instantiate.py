"""
Quantifier instantiation at ground terms
"""
import logging
from typing import Callable, Dict, Iterable, List, Optional, Union

from minidafny import formula as F
from minidafny.formula import Term, format_term
from minidafny.prover.ground import GroundClauseSet, encode_ground
from minidafny.prover.normalize import nnf, skolemize
from minidafny.prover.verdict import INSTANTIATION_LIMIT, Incomplete, Unknown, Verdict

logger = logging.getLogger(__name__)


class Instantiator:
    """
    Grounds an NNF, skolemized formula by replacing every universal with the
    conjunction of its instances

    Instances are taken at the ground Int terms of the formula: constants,
    literals, array indices and function arguments. Each round collects the
    terms of the previous round's ground formula, so instances can feed each
    other. Extra instances (from model checking) are added per universal.
    `count` totals the instances of every expansion and is bounded by `cap`.
    """

    def __init__(self, formula: Term, rounds: int = 3, cap: int = 10000,
                 check: Optional[Callable[[], None]] = None):
        self.formula = formula
        self.rounds = rounds
        self.cap = cap
        self.check = check
        self.constants = formula.free_vars
        self.extra: Dict[Term, Dict[Term, None]] = {}
        self.universals: Dict[Term, None] = {}
        self.count = 0

    def candidates(self, term: Term) -> List[Term]:
        found: Dict[Term, None] = {}

        def keep(node: Term):
            if node.sort == F.INT and node.free_vars <= self.constants:
                found[node] = None

        for node in F.subterms(term):
            if node.op == "int" or (node.op == "var" and node.sort == F.INT):
                keep(node)
            elif node.op in ("select", "store"):
                keep(node.args[2])
            elif node.op in ("len", "app"):
                for arg in node.args:
                    keep(arg)
        return sorted(found, key=format_term)

    def add_instances(self, universal: Term, terms: Iterable[Term]) -> int:
        """Register extra instantiation terms for one universal; returns how many were new"""
        slot = self.extra.setdefault(universal, {})
        before = len(slot)
        for term in terms:
            slot[term] = None
        return len(slot) - before

    def expand(self) -> Term:
        """
        Raises:
            Incomplete: more than `cap` instances in total over every expansion
        """
        terms = self.candidates(self.formula)
        ground = self._expand(terms)
        for _ in range(1, self.rounds):
            grown = self.candidates(ground)
            if grown == terms:
                break
            terms = grown
            ground = self._expand(terms)
        logger.debug(f"{self.count} instance(s) of {len(self.universals)} universal(s) "
                     f"over {len(terms)} term(s)")
        return ground

    def _expand(self, terms: List[Term]) -> Term:
        if not terms:
            terms = [F.ZERO]
        self.universals = {}
        memo: Dict[int, Term] = {}

        def walk(t: Term) -> Term:
            hit = memo.get(id(t))
            if hit is not None:
                return hit
            if t.op == "forall":
                self.universals[t] = None
                points = list(terms) + [e for e in self.extra.get(t, {}) if e not in terms]
                parts = []
                for point in points:
                    self.count += 1
                    if self.count > self.cap:
                        raise Incomplete(INSTANTIATION_LIMIT, f"more than {self.cap} instances")
                    if self.check is not None:
                        self.check()
                    parts.append(walk(F.substitute(t.args[0], {t.value: point})))
                result = F.and_(*parts)
            elif t.op in ("and", "or"):
                result = F.rebuild(t, tuple(walk(a) for a in t.args))
            else:
                result = t
            memo[id(t)] = result
            return result

        return walk(self.formula)


def prepare(hypotheses: List[Term], goal_neg: Term) -> Term:
    """Conjunction of hypotheses and negated goal in skolemized negation normal form"""
    return skolemize(nnf(F.and_(*hypotheses, goal_neg)))


def instantiate_quantifiers(hypotheses: List[Term], goal_neg: Term, rounds: int = 3,
                            cap: int = 10000) -> Union[GroundClauseSet, Verdict]:
    """
    Ground clause set of hypotheses and negated goal

    Returns:
        GroundClauseSet, or Unknown(instantiation-limit / unsupported-fragment)
    """
    try:
        formula = prepare(hypotheses, goal_neg)
        return encode_ground(Instantiator(formula, rounds, cap).expand())
    except Incomplete as exc:
        logger.debug(f"instantiation gave up: {exc}")
        return Unknown(exc.reason)
