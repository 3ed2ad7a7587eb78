"""
Omega test: integer satisfiability of conjunctions of linear constraints

Constraints are (coefficients, bound) pairs meaning `sum(a*x) <= bound`
(inequalities) or `sum(a*x) == bound` (equalities). Equalities are
eliminated exactly (mod-hat substitution for non-unit coefficients);
inequalities by Fourier-Motzkin with real and dark shadows and splinters
when the elimination is inexact. Models pick values closest to zero.
"""
from math import gcd
from typing import Callable, Dict, List, Optional, Tuple

Constraint = Tuple[Dict[str, int], int]


def modhat(a: int, m: int) -> int:
    """Symmetric residue of a modulo m, in (-m/2, m/2]"""
    return a - m * ((2 * a + m) // (2 * m))


def _ceil_div(n: int, d: int) -> int:
    return -((-n) // d)


def _normalize(constraint: Constraint, equality: bool):
    """None when trivially true, False when trivially false, else the gcd-reduced constraint"""
    coeffs = {name: a for name, a in constraint[0].items() if a != 0}
    bound = constraint[1]
    if not coeffs:
        ok = bound == 0 if equality else bound >= 0
        return None if ok else False
    g = 0
    for a in coeffs.values():
        g = gcd(g, abs(a))
    if equality:
        if bound % g:
            return False
        return {name: a // g for name, a in coeffs.items()}, bound // g
    return {name: a // g for name, a in coeffs.items()}, bound // g


def _substitute(constraint: Constraint, var: str, expr: Constraint) -> Constraint:
    """Replace var by expr (coefficients, constant) in constraint"""
    coeffs, bound = constraint
    a = coeffs.get(var, 0)
    if a == 0:
        return constraint
    result = {name: b for name, b in coeffs.items() if name != var}
    for name, b in expr[0].items():
        result[name] = result.get(name, 0) + a * b
    return result, bound - a * expr[1]


def _value(expr: Constraint, model: Dict[str, int]) -> int:
    return sum(a * model.get(name, 0) for name, a in expr[0].items()) + expr[1]


def _key(coeffs: Dict[str, int]) -> Tuple[Tuple[str, int], ...]:
    return tuple(sorted(coeffs.items()))


class OmegaSolver:
    def __init__(self, check: Optional[Callable[[], None]] = None):
        self.check = check
        self.sigmas = 0

    def solve(self, equalities: List[Constraint], inequalities: List[Constraint]) -> Optional[Dict[str, int]]:
        """
        Integer model of the constraints, or None when there is none

        Variables that end up unconstrained are absent from the model and may take any value.
        """
        if self.check is not None:
            self.check()
        eqs: List[Constraint] = []
        for constraint in equalities:
            normal = _normalize(constraint, True)
            if normal is False:
                return None
            if normal is not None:
                eqs.append(normal)
        tightest: Dict[tuple, int] = {}
        for constraint in inequalities:
            normal = _normalize(constraint, False)
            if normal is False:
                return None
            if normal is not None:
                key = _key(normal[0])
                if key not in tightest or normal[1] < tightest[key]:
                    tightest[key] = normal[1]
        if eqs:
            return self._equality(eqs, [(dict(k), c) for k, c in tightest.items()])
        for key, upper in tightest.items():
            opposite = tuple((name, -a) for name, a in key)
            if opposite in tightest:
                lower = -tightest[opposite]
                if lower > upper:
                    return None
                if lower == upper:
                    rest = [(dict(k), c) for k, c in tightest.items() if k not in (key, opposite)]
                    return self.solve([(dict(key), upper)], rest)
        if not tightest:
            return {}
        return self._inequalities([(dict(k), c) for k, c in tightest.items()])

    def _equality(self, eqs: List[Constraint], ineqs: List[Constraint]) -> Optional[Dict[str, int]]:
        pick, var = min(
            ((k, name) for k, (coeffs, _) in enumerate(eqs) for name in coeffs),
            key=lambda item: (abs(eqs[item[0]][0][item[1]]), item[0], item[1]))
        coeffs, bound = eqs[pick]
        a_k = coeffs[var]
        if abs(a_k) == 1:
            expr = ({name: -a_k * a for name, a in coeffs.items() if name != var}, a_k * bound)
            rest_eqs = [e for k, e in enumerate(eqs) if k != pick]
        else:
            m = abs(a_k) + 1
            sign = 1 if a_k > 0 else -1
            self.sigmas += 1
            sigma = f"!sigma{self.sigmas}"
            expr_coeffs = {name: sign * modhat(a, m) for name, a in coeffs.items() if name != var}
            expr_coeffs[sigma] = -sign * m
            expr = (expr_coeffs, sign * modhat(-bound, m))
            rest_eqs = list(eqs)
        model = self.solve([_substitute(e, var, expr) for e in rest_eqs],
                           [_substitute(c, var, expr) for c in ineqs])
        if model is None:
            return None
        model[var] = _value(expr, model)
        return model

    def _inequalities(self, ineqs: List[Constraint]) -> Optional[Dict[str, int]]:
        lowers: Dict[str, List[Constraint]] = {}
        uppers: Dict[str, List[Constraint]] = {}
        for constraint in ineqs:
            for name, a in constraint[0].items():
                (uppers if a > 0 else lowers).setdefault(name, []).append(constraint)
        names = sorted(set(lowers) | set(uppers))
        for name in names:
            if name not in lowers or name not in uppers:
                # one-sided: drop the variable with its constraints
                rest = [c for c in ineqs if name not in c[0]]
                model = self.solve([], rest)
                if model is None:
                    return None
                return self._place(name, lowers.get(name, []), uppers.get(name, []), model)

        def cost(name: str):
            exact = all(-c[0][name] == 1 for c in lowers[name]) or all(c[0][name] == 1 for c in uppers[name])
            return (not exact, len(lowers[name]) * len(uppers[name]), name)

        var = min(names, key=cost)
        exact = not cost(var)[0]
        others = [c for c in ineqs if var not in c[0]]
        real, dark = [], []
        for low in lowers[var]:
            b = -low[0][var]
            for up in uppers[var]:
                a = up[0][var]
                combined: Dict[str, int] = {}
                for name, coef in low[0].items():
                    if name != var:
                        combined[name] = combined.get(name, 0) + a * coef
                for name, coef in up[0].items():
                    if name != var:
                        combined[name] = combined.get(name, 0) + b * coef
                bound = a * low[1] + b * up[1]
                real.append((combined, bound))
                dark.append((combined, bound - (a - 1) * (b - 1)))
        if exact:
            model = self.solve([], others + real)
            return None if model is None else self._place(var, lowers[var], uppers[var], model)
        if self.solve([], others + real) is None:
            return None
        model = self.solve([], others + dark)
        if model is not None:
            return self._place(var, lowers[var], uppers[var], model)
        a_max = max(c[0][var] for c in uppers[var])
        for low in lowers[var]:
            b = -low[0][var]
            for i in range((a_max * b - a_max - b) // a_max + 1):
                # b*x == rest(low) - bound(low) + i
                coeffs = {name: -coef for name, coef in low[0].items() if name != var}
                coeffs[var] = b
                model = self.solve([(coeffs, -low[1] + i)], ineqs)
                if model is not None:
                    return model
        return None

    @staticmethod
    def _place(var: str, lowers: List[Constraint], uppers: List[Constraint],
               model: Dict[str, int]) -> Dict[str, int]:
        """Value of var closest to zero within its bounds under model"""
        lo: Optional[int] = None
        hi: Optional[int] = None
        for coeffs, bound in lowers:
            b = -coeffs[var]
            rest = sum(a * model.get(name, 0) for name, a in coeffs.items() if name != var)
            value = _ceil_div(rest - bound, b)
            lo = value if lo is None else max(lo, value)
        for coeffs, bound in uppers:
            a = coeffs[var]
            rest = sum(c * model.get(name, 0) for name, c in coeffs.items() if name != var)
            value = (bound - rest) // a
            hi = value if hi is None else min(hi, value)
        if lo is not None and hi is not None and lo > hi:
            raise ArithmeticError(f"empty range for {var}: [{lo}, {hi}]")
        if lo is not None and lo > 0:
            model[var] = lo
        elif hi is not None and hi < 0:
            model[var] = hi
        else:
            model[var] = 0
        return model


def integer_model(equalities: List[Constraint], inequalities: List[Constraint],
                  check: Optional[Callable[[], None]] = None) -> Optional[Dict[str, int]]:
    """Satisfying integer assignment, or None when the constraints have no integer solution"""
    return OmegaSolver(check).solve(equalities, inequalities)
