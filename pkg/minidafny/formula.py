"""
Sorted first-order terms shared by ir, vcgen, prover and replay
Terms are hash-consed: structurally equal terms are the same object, so
equality is identity and hashing is free
"""
import threading
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

INT = "Int"
BOOL = "Bool"
HEAP = "Heap"        # (ref, index) -> Int
HEAPB = "HeapB"      # (ref, index) -> Bool

HEAP_VAR = "$heap"
HEAPB_VAR = "$heapb"

NULL_VALUE = 0


class Term:
    """A node of the term DAG; build through the constructor functions below"""
    __slots__ = ("op", "args", "value", "sort", "_free", "_text", "__weakref__")

    def __init__(self, op: str, args: Tuple["Term", ...], value, sort: str):
        self.op = op
        self.args = args
        self.value = value
        self.sort = sort
        self._free: Optional[frozenset] = None
        self._text: Optional[str] = None

    def __repr__(self) -> str:
        return f"Term({format_term(self)})"

    def __str__(self) -> str:
        return format_term(self)

    @property
    def is_const(self) -> bool:
        return self.op in ("int", "bool")

    @property
    def free_vars(self) -> frozenset:
        """Names of free variables"""
        if self._free is None:
            if self.op == "var":
                self._free = frozenset((self.value,))
            elif self.op in ("forall", "exists"):
                self._free = self.args[0].free_vars - {self.value}
            else:
                acc: Set[str] = set()
                for arg in self.args:
                    acc |= arg.free_vars
                self._free = frozenset(acc)
        return self._free


_TABLE: Dict[tuple, Term] = {}
_LOCK = threading.Lock()


def _make(op: str, args: Tuple[Term, ...], value, sort: str) -> Term:
    key = (op, args, value, sort)
    term = _TABLE.get(key)
    if term is None:
        with _LOCK:
            term = _TABLE.get(key)
            if term is None:
                term = Term(op, args, value, sort)
                _TABLE[key] = term
    return term


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def mk_int(n: int) -> Term:
    return _make("int", (), int(n), INT)


def mk_bool(b: bool) -> Term:
    return _make("bool", (), bool(b), BOOL)


TRUE = mk_bool(True)
FALSE = mk_bool(False)
ZERO = mk_int(0)
ONE = mk_int(1)
NULL = ZERO


def mk_var(name: str, sort: str = INT) -> Term:
    return _make("var", (), name, sort)


def euclid_divmod(a: int, b: int) -> Tuple[int, int]:
    """Euclidean division: a == b*q + r and 0 <= r < |b|"""
    r = a % abs(b)
    return (a - r) // b, r


def add(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int":
        return mk_int(a.value + b.value)
    if a is ZERO:
        return b
    if b is ZERO:
        return a
    return _make("add", (a, b), None, INT)


def sub(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int":
        return mk_int(a.value - b.value)
    if b is ZERO:
        return a
    if a is b:
        return ZERO
    return _make("sub", (a, b), None, INT)


def mul(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int":
        return mk_int(a.value * b.value)
    if a is ZERO or b is ZERO:
        return ZERO
    if a is ONE:
        return b
    if b is ONE:
        return a
    return _make("mul", (a, b), None, INT)


def neg(a: Term) -> Term:
    if a.op == "int":
        return mk_int(-a.value)
    if a.op == "neg":
        return a.args[0]
    return _make("neg", (a,), None, INT)


def div(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int" and b.value != 0:
        return mk_int(euclid_divmod(a.value, b.value)[0])
    if b is ONE:
        return a
    return _make("div", (a, b), None, INT)


def mod(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int" and b.value != 0:
        return mk_int(euclid_divmod(a.value, b.value)[1])
    return _make("mod", (a, b), None, INT)


def lt(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int":
        return mk_bool(a.value < b.value)
    if a is b:
        return FALSE
    return _make("lt", (a, b), None, BOOL)


def le(a: Term, b: Term) -> Term:
    if a.op == "int" and b.op == "int":
        return mk_bool(a.value <= b.value)
    if a is b:
        return TRUE
    return _make("le", (a, b), None, BOOL)


def gt(a: Term, b: Term) -> Term:
    return lt(b, a)


def ge(a: Term, b: Term) -> Term:
    return le(b, a)


def eq(a: Term, b: Term) -> Term:
    if a is b:
        return TRUE
    if a.is_const and b.is_const:
        return mk_bool(a.value == b.value)
    if a.sort == BOOL:
        return iff(a, b)
    # canonical argument order keeps a == b and b == a the same atom
    if format_term(b) < format_term(a):
        a, b = b, a
    return _make("eq", (a, b), None, BOOL)


def ne(a: Term, b: Term) -> Term:
    return not_(eq(a, b))


def not_(a: Term) -> Term:
    if a.op == "bool":
        return mk_bool(not a.value)
    if a.op == "not":
        return a.args[0]
    return _make("not", (a,), None, BOOL)


def and_(*parts: Term) -> Term:
    flat: List[Term] = []
    seen: Set[int] = set()
    for part in _flatten("and", parts):
        if part is TRUE:
            continue
        if part is FALSE:
            return FALSE
        if id(part) not in seen:
            seen.add(id(part))
            flat.append(part)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return _make("and", tuple(flat), None, BOOL)


def or_(*parts: Term) -> Term:
    flat: List[Term] = []
    seen: Set[int] = set()
    for part in _flatten("or", parts):
        if part is FALSE:
            continue
        if part is TRUE:
            return TRUE
        if id(part) not in seen:
            seen.add(id(part))
            flat.append(part)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return _make("or", tuple(flat), None, BOOL)


def _flatten(op: str, parts: Iterable[Term]) -> Iterator[Term]:
    for part in parts:
        if part.op == op:
            yield from part.args
        else:
            yield part


def implies(a: Term, b: Term) -> Term:
    if a is TRUE:
        return b
    if a is FALSE or b is TRUE:
        return TRUE
    if b is FALSE:
        return not_(a)
    if a is b:
        return TRUE
    return _make("implies", (a, b), None, BOOL)


def iff(a: Term, b: Term) -> Term:
    if a is b:
        return TRUE
    if a is TRUE:
        return b
    if b is TRUE:
        return a
    if a is FALSE:
        return not_(b)
    if b is FALSE:
        return not_(a)
    if format_term(b) < format_term(a):
        a, b = b, a
    return _make("iff", (a, b), None, BOOL)


def ite(c: Term, t: Term, e: Term) -> Term:
    if c is TRUE:
        return t
    if c is FALSE:
        return e
    if t is e:
        return t
    if t.sort == BOOL:
        if t is TRUE and e is FALSE:
            return c
        if t is FALSE and e is TRUE:
            return not_(c)
    return _make("ite", (c, t, e), None, t.sort)


def heap_var(elem_sort: str) -> Term:
    return mk_var(HEAPB_VAR, HEAPB) if elem_sort == BOOL else mk_var(HEAP_VAR, HEAP)


def select(heap: Term, ref: Term, index: Term) -> Term:
    return _make("select", (heap, ref, index), None, BOOL if heap.sort == HEAPB else INT)


def store(heap: Term, ref: Term, index: Term, val: Term) -> Term:
    return _make("store", (heap, ref, index, val), None, heap.sort)


def frame(old: Term, fresh: Term, modified: Tuple[Term, ...]) -> Term:
    """Heap equal to `old` except on arrays in `modified`, where it reads `fresh`"""
    if not modified:
        return old
    return _make("frame", (old, fresh) + tuple(modified), None, old.sort)


def length(ref: Term) -> Term:
    return _make("len", (ref,), None, INT)


def app(name: str, args: Tuple[Term, ...], sort: str) -> Term:
    """Application of an uninterpreted (or not yet unfolded) function symbol"""
    return _make("app", tuple(args), name, sort)


def forall(var: str, body: Term) -> Term:
    if var not in body.free_vars:
        return body
    if body.op == "bool":
        return body
    return _make("forall", (body,), var, BOOL)


def exists(var: str, body: Term) -> Term:
    if var not in body.free_vars:
        return body
    return _make("exists", (body,), var, BOOL)


def quantifier(kind: str, var: str, body: Term) -> Term:
    return forall(var, body) if kind == "forall" else exists(var, body)


# ---------------------------------------------------------------------------
# Traversal and substitution
# ---------------------------------------------------------------------------

def rebuild(term: Term, args: Tuple[Term, ...]) -> Term:
    """Same operator over new arguments, re-simplified"""
    op = term.op
    if args == term.args:
        return term
    if op in _BUILDERS:
        return _BUILDERS[op](*args)
    if op == "and":
        return and_(*args)
    if op == "or":
        return or_(*args)
    if op == "frame":
        return frame(args[0], args[1], args[2:])
    if op == "app":
        return app(term.value, args, term.sort)
    if op == "forall":
        return forall(term.value, args[0])
    if op == "exists":
        return exists(term.value, args[0])
    return _make(op, args, term.value, term.sort)


_BUILDERS: Dict[str, Callable[..., Term]] = {
    "add": add, "sub": sub, "mul": mul, "neg": neg, "div": div, "mod": mod,
    "lt": lt, "le": le, "eq": eq, "not": not_, "implies": implies, "iff": iff,
    "ite": ite, "select": select, "store": store, "len": length,
}


def subterms(term: Term) -> Iterator[Term]:
    """Every distinct subterm once, children before parents"""
    seen: Set[int] = set()
    stack: List[Tuple[Term, bool]] = [(term, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for arg in reversed(node.args):
            if id(arg) not in seen:
                stack.append((arg, False))


def transform(term: Term, fn: Callable[[Term, Tuple[Term, ...]], Optional[Term]]) -> Term:
    """Bottom-up rewrite; fn(node, new_args) returns a replacement or None to rebuild"""
    cache: Dict[int, Term] = {}
    for node in subterms(term):
        new_args = tuple(cache[id(a)] for a in node.args)
        replaced = fn(node, new_args)
        cache[id(node)] = replaced if replaced is not None else rebuild(node, new_args)
    return cache[id(term)]


def _fresh_bound(name: str, avoid: frozenset) -> str:
    base = name.split("#")[0]
    k = 1
    while f"{base}#{k}" in avoid:
        k += 1
    return f"{base}#{k}"


def substitute(term: Term, mapping: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution of free variables"""
    if not mapping:
        return term
    relevant = {k: v for k, v in mapping.items() if k in term.free_vars}
    if not relevant:
        return term
    return _subst(term, relevant, {})


def _subst(term: Term, mapping: Mapping[str, Term], cache: Dict[int, Term]) -> Term:
    # cache belongs to this mapping only
    if term.free_vars.isdisjoint(mapping.keys()):
        return term
    hit = cache.get(id(term))
    if hit is not None:
        return hit
    if term.op == "var":
        result = mapping.get(term.value, term)
    elif term.op in ("forall", "exists"):
        var = term.value
        body = term.args[0]
        inner = {k: v for k, v in mapping.items() if k != var and k in body.free_vars}
        incoming: Set[str] = set()
        for value in inner.values():
            incoming |= value.free_vars
        if var in incoming:
            renamed = _fresh_bound(var, frozenset(incoming | body.free_vars))
            body = _subst(body, {var: mk_var(renamed, INT)}, {})
            var = renamed
        result = quantifier(term.op, var, _subst(body, inner, {}) if inner else body)
    else:
        result = rebuild(term, tuple(_subst(a, mapping, cache) for a in term.args))
    cache[id(term)] = result
    return result


def symbols(term: Term) -> Dict[str, str]:
    """Free variable name -> sort"""
    found: Dict[str, str] = {}
    free = term.free_vars
    for node in subterms(term):
        if node.op == "var" and node.value in free:
            found[node.value] = node.sort
    return found


def applications(term: Term) -> List[Term]:
    return [node for node in subterms(term) if node.op == "app"]


def conjuncts(term: Term) -> List[Term]:
    return list(term.args) if term.op == "and" else [term]


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_INFIX = {
    "add": "+", "sub": "-", "mul": "*", "div": "/", "mod": "%",
    "lt": "<", "le": "<=", "eq": "==", "and": "&&", "or": "||",
    "implies": "==>", "iff": "<==>",
}

_ATOMIC = ("int", "bool", "var", "app", "select", "len", "not", "neg")


def _wrap(term: Term) -> str:
    text = format_term(term)
    return text if term.op in _ATOMIC else f"({text})"


def format_term(term: Term) -> str:
    if term._text is None:
        term._text = _format(term)
    return term._text


def _format(term: Term) -> str:
    op = term.op
    if op == "int":
        return str(term.value)
    if op == "bool":
        return "true" if term.value else "false"
    if op == "var":
        return term.value
    if op in _INFIX:
        return f" {_INFIX[op]} ".join(_wrap(a) for a in term.args)
    if op == "not":
        return f"!{_wrap(term.args[0])}"
    if op == "neg":
        return f"-{_wrap(term.args[0])}"
    if op == "ite":
        c, t, e = term.args
        return f"if {format_term(c)} then {format_term(t)} else {format_term(e)}"
    if op == "select":
        h, r, i = term.args
        return f"{_wrap(h)}[{format_term(r)}][{format_term(i)}]"
    if op == "store":
        h, r, i, v = term.args
        return f"{_wrap(h)}[{format_term(r)}][{format_term(i)} := {format_term(v)}]"
    if op == "frame":
        old, fresh = term.args[:2]
        mods = ", ".join(format_term(m) for m in term.args[2:])
        return f"frame({format_term(old)}, {format_term(fresh)}; {mods})"
    if op == "len":
        return f"{_wrap(term.args[0])}.Length"
    if op == "app":
        return f"{term.value}({', '.join(format_term(a) for a in term.args)})"
    if op in ("forall", "exists"):
        return f"{op} {term.value} :: {format_term(term.args[0])}"
    return f"{op}({', '.join(format_term(a) for a in term.args)})"
