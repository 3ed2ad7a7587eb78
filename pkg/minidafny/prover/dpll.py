"""
DPLL(T) over a GroundClauseSet

Boolean search with two watched literals and first-UIP clause learning;
the arithmetic atoms on the trail are checked with the Omega test at every
propagation fixpoint, and infeasible sets are reduced to a minimal core
that is learned as a clause.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

from minidafny.prover.ground import GroundClauseSet
from minidafny.prover.omega import Constraint, integer_model
from minidafny.prover.verdict import Model, Value

logger = logging.getLogger(__name__)


@dataclass
class Sat:
    model: Model
    assignment: Dict[str, Value] = field(default_factory=dict)


@dataclass
class Unsat:
    conflicts: int = 0


class _Search:
    def __init__(self, clause_set: GroundClauseSet, check: Optional[Callable[[], None]]):
        self.cs = clause_set
        self.check = check
        self.clauses: List[List[int]] = []
        self.synced = 0
        self.watches: Dict[int, List[int]] = {}
        self.values: Dict[int, bool] = {}
        self.levels: Dict[int, int] = {}
        self.reasons: Dict[int, Optional[int]] = {}
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.theory_key: Optional[frozenset] = None
        self.theory_model: Dict[str, int] = {}
        self.conflicts = 0

    @property
    def level(self) -> int:
        return len(self.trail_lim)

    def value(self, lit: int) -> Optional[bool]:
        v = self.values.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def enqueue(self, lit: int, reason: Optional[int]):
        var = abs(lit)
        self.values[var] = lit > 0
        self.levels[var] = self.level
        self.reasons[var] = reason
        self.trail.append(lit)

    def backtrack(self, level: int):
        if self.level <= level:
            return
        start = self.trail_lim[level]
        for lit in self.trail[start:]:
            var = abs(lit)
            del self.values[var]
            del self.levels[var]
            del self.reasons[var]
        del self.trail[start:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def watch(self, ci: int):
        clause = self.clauses[ci]
        self.watches.setdefault(clause[0], []).append(ci)
        self.watches.setdefault(clause[1], []).append(ci)

    # clause database --------------------------------------------------------

    def _attach(self, lits: List[int]) -> bool:
        lits = list(dict.fromkeys(lits))
        if any(-lit in lits for lit in lits):
            return True
        if any(self.value(lit) is True for lit in lits):
            return True
        lits = [lit for lit in lits if self.value(lit) is None]
        if not lits:
            return False
        ci = len(self.clauses)
        self.clauses.append(lits)
        if len(lits) == 1:
            self.enqueue(lits[0], ci)
        else:
            self.watch(ci)
        return True

    def sync(self) -> bool:
        """Attach clauses added to the clause set since the last call; level 0 only"""
        for clause in self.cs.clauses[self.synced:]:
            if not self._attach(clause):
                return False
        self.synced = len(self.cs.clauses)
        return True

    def learn(self, lits: List[int]):
        ci = len(self.clauses)
        self.clauses.append(lits)
        if len(lits) > 1:
            j = max(range(1, len(lits)), key=lambda k: self.levels[abs(lits[k])])
            lits[1], lits[j] = lits[j], lits[1]
            self.watch(ci)
        self.enqueue(lits[0], ci)

    # propagation and conflicts ---------------------------------------------------

    def propagate(self) -> Optional[int]:
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            watching = self.watches.get(false_lit, [])
            kept: List[int] = []
            i = 0
            while i < len(watching):
                ci = watching[i]
                i += 1
                clause = self.clauses[ci]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.value(clause[0]) is True:
                    kept.append(ci)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.value(clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if self.value(clause[0]) is False:
                    kept.extend(watching[i:])
                    self.watches[false_lit] = kept
                    return ci
                self.enqueue(clause[0], ci)
            self.watches[false_lit] = kept
        return None

    def analyze(self, conflict: List[int]) -> Tuple[List[int], int]:
        """First-UIP learned clause and the level to jump back to"""
        seen = set()
        learned: List[int] = []
        pending = 0
        index = len(self.trail) - 1
        lits = conflict
        while True:
            for lit in lits:
                var = abs(lit)
                if var in seen or self.levels[var] == 0:
                    continue
                seen.add(var)
                if self.levels[var] == self.level:
                    pending += 1
                else:
                    learned.append(lit)
            while abs(self.trail[index]) not in seen:
                index -= 1
            uip = self.trail[index]
            index -= 1
            pending -= 1
            if pending == 0:
                break
            reason = self.reasons[abs(uip)]
            lits = [lit for lit in self.clauses[reason] if abs(lit) != abs(uip)]
        learned.insert(0, -uip)
        back = max((self.levels[abs(lit)] for lit in learned[1:]), default=0)
        return learned, back

    def resolve(self, conflict: List[int]) -> bool:
        """Learn from a falsified clause; False when the conflict is at level 0"""
        self.conflicts += 1
        if not conflict:
            return False
        top = max(self.levels[abs(lit)] for lit in conflict)
        if top == 0:
            return False
        self.backtrack(top)
        learned, back = self.analyze(conflict)
        self.backtrack(back)
        self.learn(learned)
        return True

    # theory ---------------------------------------------------------------------

    def _constraint(self, lit: int) -> Constraint:
        coeffs, bound = self.cs.theory[abs(lit)]
        if lit > 0:
            return dict(coeffs), bound
        return {name: -a for name, a in coeffs}, -bound - 1

    def _core(self, lits: List[int]) -> List[int]:
        core = list(lits)
        i = 0
        while i < len(core):
            trial = core[:i] + core[i + 1:]
            if integer_model([], [self._constraint(lit) for lit in trial], self.check) is None:
                core = trial
            else:
                i += 1
        return core

    def theory_conflict(self) -> Optional[List[int]]:
        lits = [var if self.values[var] else -var for var in self.cs.theory if var in self.values]
        key = frozenset(lits)
        if self.theory_key is not None and key <= self.theory_key:
            return None
        model = integer_model([], [self._constraint(lit) for lit in lits], self.check)
        if model is not None:
            self.theory_key = key
            self.theory_model = model
            return None
        return [-lit for lit in self._core(lits)]

    # search -------------------------------------------------------------------------

    def decide(self) -> Optional[int]:
        """A literal satisfying the first unsatisfied clause, None when all are satisfied"""
        for clause in self.clauses:
            free = None
            for lit in clause:
                state = self.value(lit)
                if state is True:
                    break
                if state is None and free is None:
                    free = lit
            else:
                if free is not None:
                    return free
        return None

    def assignment(self) -> Dict[str, Value]:
        result: Dict[str, Value] = {}
        for name in self.cs.int_vars:
            result[name] = self.theory_model.get(name, 0)
        for name in self.cs.bool_vars:
            result[name] = bool(self.values.get(self.cs.index[name], False))
        return result

    def run(self) -> Optional[Dict[str, Value]]:
        if not self.sync():
            return None
        while True:
            if self.check is not None:
                self.check()
            conflict = self.propagate()
            if conflict is not None:
                if not self.resolve(list(self.clauses[conflict])):
                    return None
                continue
            core = self.theory_conflict()
            if core is not None:
                if not self.resolve(core):
                    return None
                continue
            lit = self.decide()
            if lit is not None:
                self.trail_lim.append(len(self.trail))
                self.enqueue(lit, None)
                continue
            assignment = self.assignment()
            lemmas = self.cs.congruence_lemmas(assignment)
            if not lemmas:
                return assignment
            logger.debug(f"adding {len(lemmas)} functional-consistency lemma(s)")
            for lemma in lemmas:
                self.cs.add_formula(lemma)
            self.backtrack(0)
            if not self.sync():
                return None


def decide_ground(clauses: GroundClauseSet,
                  check: Optional[Callable[[], None]] = None) -> Union[Sat, Unsat]:
    """
    Satisfiability of a ground clause set

    Args:
        clauses: clause set from encode_ground
        check: called periodically; may raise to abort (deadline)

    Returns:
        Sat with a total model, or Unsat
    """
    search = _Search(clauses, check)
    assignment = search.run()
    if assignment is None:
        logger.debug(f"unsat after {search.conflicts} conflict(s)")
        return Unsat(search.conflicts)
    return Sat(clauses.to_model(assignment), assignment)
