"""
Ground formulas to clauses over boolean and linear integer atoms

Pipeline per added formula: read-over-write expansion of heap selects,
negation normal form with integer if-then-else lifted out of atoms,
Ackermann constants for selects / lengths / function applications,
linearization into canonical `sum(a*x) <= c` atoms, Tseitin clauses.
Functional consistency of the Ackermann constants is enforced lazily
through congruence_lemmas.
"""
import logging
from math import gcd
from typing import Dict, List, Optional, Tuple

from minidafny import formula as F
from minidafny.formula import Term
from minidafny.prover.evaluate import NotEvaluable, evaluate_ground
from minidafny.prover.normalize import nnf
from minidafny.prover.verdict import UNSUPPORTED_FRAGMENT, Incomplete, Model, Value

logger = logging.getLogger(__name__)

Coeffs = Tuple[Tuple[str, int], ...]
LinearAtom = Tuple[Coeffs, int]          # sum(a*x) <= c


# ---------------------------------------------------------------------------
# Heap reads
# ---------------------------------------------------------------------------

def _read(heap: Term, ref: Term, index: Term) -> Term:
    if heap.op == "store":
        base, r, i, value = heap.args
        return F.ite(F.and_(F.eq(ref, r), F.eq(index, i)), value, _read(base, ref, index))
    if heap.op == "frame":
        old, fresh = heap.args[:2]
        modified = F.or_(*(F.eq(ref, m) for m in heap.args[2:]))
        return F.ite(modified, _read(fresh, ref, index), _read(old, ref, index))
    return F.select(heap, ref, index)


def expand_reads(term: Term) -> Term:
    """Rewrite every select over store / frame into if-then-else over base heap reads"""
    return F.transform(term, lambda node, args: _read(*args) if node.op == "select" else None)


# ---------------------------------------------------------------------------
# If-then-else lifting
# ---------------------------------------------------------------------------

def _first_int_ite(atom: Term) -> Optional[Term]:
    for node in F.subterms(atom):
        if node.op in ("forall", "exists"):
            raise Incomplete(UNSUPPORTED_FRAGMENT, "quantifier inside a term")
        if node.op == "ite" and node.sort != F.BOOL:
            return node
    return None


def _replace(term: Term, target: Term, replacement: Term) -> Term:
    return F.transform(term, lambda node, args: replacement if node is target else None)


def _lift_atom(atom: Term) -> Term:
    target = _first_int_ite(atom)
    if target is None:
        return atom
    cond, then, other = target.args
    return F.or_(F.and_(cond, _lift_atom(_replace(atom, target, then))),
                 F.and_(F.not_(cond), _lift_atom(_replace(atom, target, other))))


def _map_atoms(formula: Term, fn) -> Term:
    memo: Dict[int, Term] = {}

    def walk(t: Term) -> Term:
        hit = memo.get(id(t))
        if hit is not None:
            return hit
        if t.op in ("and", "or"):
            result = F.rebuild(t, tuple(walk(a) for a in t.args))
        elif t.op == "not":
            result = F.not_(fn(t.args[0]))
        elif t.op == "bool":
            result = t
        elif t.op in ("forall", "exists"):
            raise Incomplete(UNSUPPORTED_FRAGMENT, f"{t.op} left after instantiation")
        else:
            result = fn(t)
        memo[id(t)] = result
        return result

    return walk(formula)


def lift_ites(formula: Term) -> Term:
    """NNF formula whose atoms contain no integer if-then-else"""
    current = nnf(formula)
    while True:
        lifted = _map_atoms(current, _lift_atom)
        if lifted is current:
            return current
        current = nnf(lifted)


# ---------------------------------------------------------------------------
# Linear arithmetic
# ---------------------------------------------------------------------------

def canonical_atom(coeffs: Dict[str, int], bound: int) -> Tuple[Optional[LinearAtom], bool]:
    """
    Canonical form of `sum(coeffs) <= bound`

    Returns:
        (atom, positive): the constraint equals atom (or its negation when
        positive is False); atom is None for a constant constraint, whose
        truth value is then `positive`
    """
    items = tuple(sorted((name, a) for name, a in coeffs.items() if a != 0))
    if not items:
        return None, 0 <= bound
    g = 0
    for _, a in items:
        g = gcd(g, abs(a))
    items = tuple((name, a // g) for name, a in items)
    bound = bound // g
    if items[0][1] < 0:
        return (tuple((name, -a) for name, a in items), -bound - 1), False
    return (items, bound), True


class GroundClauseSet:
    """
    CNF over ground atoms with the maps needed to read models back

    Variables are numbered from 1; `theory` maps a variable to its linear
    atom, all other variables are plain booleans named in `names`.
    """

    def __init__(self):
        self.clauses: List[List[int]] = []
        self.names: List[str] = [""]
        self.index: Dict[str, int] = {}
        self.theory: Dict[int, LinearAtom] = {}
        self.atoms: Dict[LinearAtom, int] = {}
        self.int_vars: Dict[str, None] = {}
        self.bool_vars: Dict[str, None] = {}
        self.ackermann: Dict[Term, Term] = {}       # read / length / application -> constant
        self.groups: Dict[tuple, List[Term]] = {}
        self.divisions: Dict[tuple, Tuple[Term, Term]] = {}
        self.pending: List[Term] = []
        self._tseitin: Dict[int, int] = {}
        self._counter = 0

    @property
    def num_vars(self) -> int:
        return len(self.names) - 1

    def _fresh(self, prefix: str) -> str:
        self._counter += 1
        return f"!{prefix}{self._counter}"

    def variable(self, name: str) -> int:
        var = self.index.get(name)
        if var is None:
            var = len(self.names)
            self.names.append(name)
            self.index[name] = var
        return var

    # Ackermann constants -----------------------------------------------------

    def _constant_for(self, node: Term) -> Term:
        const = self.ackermann.get(node)
        if const is None:
            prefix = {"select": "sel", "len": "len", "app": "app"}[node.op]
            const = F.mk_var(self._fresh(prefix), node.sort)
            self.ackermann[node] = const
            if node.op == "select":
                key = ("select", node.args[0].value)
            elif node.op == "app":
                key = ("app", node.value)
            else:
                key = ("len",)
            self.groups.setdefault(key, []).append(node)
        return const

    def ackermannize(self, formula: Term) -> Term:
        def rewrite(node: Term, args: Tuple[Term, ...]):
            if node.op in ("select", "len", "app"):
                return self._constant_for(F.rebuild(node, args))
            return None

        return F.transform(formula, rewrite)

    # linearization -------------------------------------------------------------

    def linear(self, term: Term) -> Tuple[Dict[str, int], int]:
        op = term.op
        if op == "int":
            return {}, term.value
        if op == "var":
            self.int_vars[term.value] = None
            return {term.value: 1}, 0
        if op in ("add", "sub"):
            (ca, ka), (cb, kb) = self.linear(term.args[0]), self.linear(term.args[1])
            sign = 1 if op == "add" else -1
            merged = dict(ca)
            for name, a in cb.items():
                merged[name] = merged.get(name, 0) + sign * a
            return merged, ka + sign * kb
        if op == "neg":
            ca, ka = self.linear(term.args[0])
            return {name: -a for name, a in ca.items()}, -ka
        if op == "mul":
            (ca, ka), (cb, kb) = self.linear(term.args[0]), self.linear(term.args[1])
            if ca and cb:
                raise Incomplete(UNSUPPORTED_FRAGMENT, f"nonlinear term {F.format_term(term)}")
            if not ca:
                return {name: ka * b for name, b in cb.items()}, ka * kb
            return {name: kb * a for name, a in ca.items()}, ka * kb
        if op in ("div", "mod"):
            return self._division(term)
        raise Incomplete(UNSUPPORTED_FRAGMENT, f"cannot linearize {op}")

    def _division(self, term: Term) -> Tuple[Dict[str, int], int]:
        cd, kd = self.linear(term.args[1])
        if cd:
            raise Incomplete(UNSUPPORTED_FRAGMENT, f"division by non-literal {F.format_term(term.args[1])}")
        dividend = term.args[0]
        if kd == 0:
            # x / 0 is left unconstrained
            key = ("zero", term)
            if key not in self.divisions:
                free = F.mk_var(self._fresh("div"), F.INT)
                self.divisions[key] = (free, free)
            name = self.divisions[key][0].value
            self.int_vars[name] = None
            return {name: 1}, 0
        key = (dividend, kd)
        if key not in self.divisions:
            q = F.mk_var(self._fresh("q"), F.INT)
            r = F.mk_var(self._fresh("r"), F.INT)
            self.divisions[key] = (q, r)
            self.pending.append(F.and_(
                F.eq(dividend, F.add(F.mul(F.mk_int(kd), q), r)),
                F.le(F.ZERO, r),
                F.le(r, F.mk_int(abs(kd) - 1)),
            ))
        q, r = self.divisions[key]
        result = q if term.op == "div" else r
        self.int_vars[result.value] = None
        return {result.value: 1}, 0

    def _le(self, lhs: Term, rhs: Term, offset: int = 0) -> Term:
        """Literal for lhs - rhs <= offset"""
        (ca, ka), (cb, kb) = self.linear(lhs), self.linear(rhs)
        coeffs = dict(ca)
        for name, b in cb.items():
            coeffs[name] = coeffs.get(name, 0) - b
        atom, positive = canonical_atom(coeffs, offset - ka + kb)
        if atom is None:
            return F.mk_bool(positive)
        var = self.atoms.get(atom)
        if var is None:
            var = self.variable(f"!t{len(self.atoms) + 1}")
            self.atoms[atom] = var
            self.theory[var] = atom
        literal = F.mk_var(self.names[var], F.BOOL)
        return literal if positive else F.not_(literal)

    def _theory_atom(self, atom: Term) -> Term:
        op = atom.op
        if op == "var" and atom.sort == F.BOOL:
            self.bool_vars[atom.value] = None
            self.variable(atom.value)
            return atom
        if op == "le":
            return self._le(atom.args[0], atom.args[1])
        if op == "lt":
            return self._le(atom.args[0], atom.args[1], -1)
        if op == "eq" and atom.args[0].sort == F.INT:
            return F.and_(self._le(atom.args[0], atom.args[1]), self._le(atom.args[1], atom.args[0]))
        raise Incomplete(UNSUPPORTED_FRAGMENT, f"atom {F.format_term(atom)}")

    # clauses --------------------------------------------------------------------

    def _literal(self, t: Term) -> int:
        if t.op == "var":
            return self.variable(t.value)
        if t.op == "not":
            return -self._literal(t.args[0])
        hit = self._tseitin.get(id(t))
        if hit is not None:
            return hit
        aux = self.variable(self._fresh("ts"))
        children = [self._literal(a) for a in t.args]
        if t.op == "and":
            for child in children:
                self.clauses.append([-aux, child])
        elif t.op == "or":
            self.clauses.append([-aux] + children)
        else:
            raise Incomplete(UNSUPPORTED_FRAGMENT, f"connective {t.op}")
        self._tseitin[id(t)] = aux
        return aux

    def _assert(self, t: Term):
        if t is F.TRUE:
            return
        if t is F.FALSE:
            self.clauses.append([])
        elif t.op == "and":
            for part in t.args:
                self._assert(part)
        elif t.op == "or":
            self.clauses.append([self._literal(a) for a in t.args])
        else:
            self.clauses.append([self._literal(t)])

    def add_formula(self, formula: Term) -> int:
        """
        Conjoin a ground formula

        Returns:
            Number of clauses added

        Raises:
            Incomplete: formula outside the decidable fragment
        """
        before = len(self.clauses)
        self.pending.append(formula)
        while self.pending:
            current = self.pending.pop(0)
            ground = self.ackermannize(lift_ites(expand_reads(current)))
            encoded = nnf(_map_atoms(ground, self._theory_atom))
            self._assert(encoded)
        return len(self.clauses) - before

    # models -------------------------------------------------------------------

    def _args_key(self, node: Term, scalars: Model) -> Optional[tuple]:
        key = []
        for arg in node.args:
            if arg.sort in (F.HEAP, F.HEAPB):
                key.append(F.format_term(arg))
                continue
            try:
                key.append(evaluate_ground(arg, scalars))
            except NotEvaluable:
                return None
        return tuple(key)

    @staticmethod
    def _value(assignment: Dict[str, Value], const: Term) -> Value:
        return assignment.get(const.value, False if const.sort == F.BOOL else 0)

    def congruence_lemmas(self, assignment: Dict[str, Value]) -> List[Term]:
        """Functional-consistency instances violated by `assignment`"""
        scalars = Model(scalars=assignment)
        lemmas: List[Term] = []
        for key in self.groups:
            seen: Dict[tuple, Term] = {}
            for node in self.groups[key]:
                args_key = self._args_key(node, scalars)
                if args_key is None:
                    continue
                first = seen.setdefault(args_key, node)
                if first is node:
                    continue
                a, b = self.ackermann[first], self.ackermann[node]
                if self._value(assignment, a) == self._value(assignment, b):
                    continue
                same = [F.eq(x, y) for x, y in zip(first.args, node.args)
                        if x.sort not in (F.HEAP, F.HEAPB)]
                lemmas.append(F.implies(F.and_(*same), F.eq(a, b)))
        return lemmas

    def to_model(self, assignment: Dict[str, Value]) -> Model:
        """Lift a satisfying assignment of the clause set to a Model"""
        model = Model(scalars=dict(sorted(assignment.items())))
        for node, const in self.ackermann.items():
            key = self._args_key(node, model)
            if key is None:
                continue
            value = self._value(assignment, const)
            if node.op == "select":
                model.heaps.setdefault(node.args[0].value, {})[(key[1], key[2])] = value
            elif node.op == "len":
                model.lengths[key[0]] = value
            else:
                model.functions[(node.value, key)] = value
        return model


def encode_ground(formula: Term) -> GroundClauseSet:
    """GroundClauseSet of a quantifier-free formula"""
    clauses = GroundClauseSet()
    clauses.add_formula(formula)
    logger.debug(f"ground encoding: {clauses.num_vars} variable(s), {len(clauses.clauses)} clause(s), "
                 f"{len(clauses.atoms)} arithmetic atom(s)")
    return clauses
