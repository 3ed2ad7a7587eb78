"""
Direct evaluation of formulas under a model
Independent of the decision procedure, so it doubles as the model oracle
"""
from typing import Dict, List, Optional, Tuple

from minidafny import formula as F
from minidafny.diagnostics import MiniDafnyError
from minidafny.formula import Term
from minidafny.prover.verdict import Model, Value

# widest quantifier range enumerated
MAX_RANGE = 100_000


class NotEvaluable(MiniDafnyError):
    """The model does not determine the value (unknown function point, unbounded quantifier, x / 0)"""


class _Heap:
    def read(self, ref: int, index: int) -> Value:
        raise NotImplementedError


class _BaseHeap(_Heap):
    def __init__(self, name: str, model: Model):
        self.name = name
        self.model = model

    def read(self, ref: int, index: int) -> Value:
        return self.model.read(self.name, ref, index)


class _StoreHeap(_Heap):
    def __init__(self, parent: _Heap, ref: int, index: int, value: Value):
        self.parent = parent
        self.key = (ref, index)
        self.value = value

    def read(self, ref: int, index: int) -> Value:
        if (ref, index) == self.key:
            return self.value
        return self.parent.read(ref, index)


class _FrameHeap(_Heap):
    def __init__(self, old: _Heap, fresh: _Heap, refs: frozenset):
        self.old = old
        self.fresh = fresh
        self.refs = refs

    def read(self, ref: int, index: int) -> Value:
        return (self.fresh if ref in self.refs else self.old).read(ref, index)


def _guards(body: Term, kind: str) -> List[Term]:
    if kind == "exists":
        return F.conjuncts(body)
    if body.op == "implies":
        return F.conjuncts(body.args[0]) + _guards(body.args[1], kind)
    if body.op == "or":
        return [d.args[0] for d in body.args if d.op == "not"]
    return []


def quantifier_range(var: str, body: Term, kind: str) -> Optional[Tuple[List[Term], List[Term]]]:
    """
    Syntactic bounds of a quantified variable

    Returns:
        (lower bounds, exclusive upper bounds) read off `lo <= i < hi` style
        guards, or None when either side is missing
    """
    lows: List[Term] = []
    highs: List[Term] = []
    for guard in _guards(body, kind):
        if guard.op not in ("le", "lt", "eq"):
            continue
        a, b = guard.args
        strict = guard.op == "lt"
        if b.op == "var" and b.value == var and var not in a.free_vars:
            lows.append(F.add(a, F.ONE) if strict else a)
            if guard.op == "eq":
                highs.append(F.add(a, F.ONE))
        elif a.op == "var" and a.value == var and var not in b.free_vars:
            highs.append(b if strict else F.add(b, F.ONE))
            if guard.op == "eq":
                lows.append(b)
    if not lows or not highs:
        return None
    return lows, highs


class _Evaluator:
    def __init__(self, model: Model):
        self.model = model
        self.memo: Dict[int, object] = {}

    def eval(self, term: Term, env: Dict[str, int]):
        cacheable = not env or term.free_vars.isdisjoint(env)
        if cacheable:
            hit = self.memo.get(id(term))
            if hit is not None:
                return hit
        value = self._eval(term, env)
        if cacheable:
            self.memo[id(term)] = value
        return value

    def _eval(self, term: Term, env: Dict[str, int]):
        op = term.op
        args = term.args
        if op in ("int", "bool"):
            return term.value
        if op == "var":
            if term.value in env:
                return env[term.value]
            if term.sort in (F.HEAP, F.HEAPB):
                return _BaseHeap(term.value, self.model)
            default = False if term.sort == F.BOOL else 0
            return self.model.scalars.get(term.value, default)
        if op == "and":
            return all(self.eval(a, env) for a in args)
        if op == "or":
            return any(self.eval(a, env) for a in args)
        if op == "not":
            return not self.eval(args[0], env)
        if op == "implies":
            return (not self.eval(args[0], env)) or bool(self.eval(args[1], env))
        if op == "iff":
            return bool(self.eval(args[0], env)) == bool(self.eval(args[1], env))
        if op == "ite":
            return self.eval(args[1] if self.eval(args[0], env) else args[2], env)
        if op in ("forall", "exists"):
            return self._quantifier(term, env)
        if op == "select":
            heap = self.eval(args[0], env)
            return heap.read(self.eval(args[1], env), self.eval(args[2], env))
        if op == "store":
            parent = self.eval(args[0], env)
            return _StoreHeap(parent, self.eval(args[1], env), self.eval(args[2], env),
                              self.eval(args[3], env))
        if op == "frame":
            refs = frozenset(self.eval(m, env) for m in args[2:])
            return _FrameHeap(self.eval(args[0], env), self.eval(args[1], env), refs)
        if op == "len":
            return self.model.length(self.eval(args[0], env))
        if op == "app":
            key = tuple(F.format_term(a) if a.sort in (F.HEAP, F.HEAPB) else self.eval(a, env)
                        for a in args)
            try:
                return self.model.functions[(term.value, key)]
            except KeyError:
                raise NotEvaluable(f"no value for {term.value}{key}")
        values = [self.eval(a, env) for a in args]
        if op == "add":
            return values[0] + values[1]
        if op == "sub":
            return values[0] - values[1]
        if op == "mul":
            return values[0] * values[1]
        if op == "neg":
            return -values[0]
        if op in ("div", "mod"):
            if values[1] == 0:
                raise NotEvaluable("division by zero")
            q, r = F.euclid_divmod(values[0], values[1])
            return q if op == "div" else r
        if op == "lt":
            return values[0] < values[1]
        if op == "le":
            return values[0] <= values[1]
        if op == "eq":
            if args[0].sort in (F.HEAP, F.HEAPB):
                raise NotEvaluable("heap equality")
            return values[0] == values[1]
        raise NotEvaluable(f"operator {op}")

    def _quantifier(self, term: Term, env: Dict[str, int]) -> bool:
        var, body = term.value, term.args[0]
        bounds = quantifier_range(var, body, term.op)
        if bounds is None:
            raise NotEvaluable(f"unbounded quantifier over {var}")
        lo = max(self.eval(b, env) for b in bounds[0])
        hi = min(self.eval(b, env) for b in bounds[1])
        if hi - lo > MAX_RANGE:
            raise NotEvaluable(f"quantifier range of {var} too wide")
        want = term.op == "forall"
        for value in range(lo, hi):
            if bool(self.eval(body, {**env, var: value})) != want:
                return not want
        return want


def evaluate_ground(term: Term, model: Model):
    """
    Value of `term` under `model`

    Symbols missing from the model read as 0 / false; quantifiers are
    evaluated by enumerating their syntactic range.

    Raises:
        NotEvaluable: the model leaves the value open
    """
    return _Evaluator(model).eval(term, {})


def holds(term: Term, model: Model) -> Optional[bool]:
    """True / False, or None when the model leaves the formula open"""
    try:
        return bool(evaluate_ground(term, model))
    except NotEvaluable:
        return None
