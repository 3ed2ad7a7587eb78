"""
Built-in prover: instantiation, ground decision procedure, model checking
of the universals and model minimization
"""
import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

from minidafny import formula as F
from minidafny.formula import Term
from minidafny.prover.dpll import Unsat, decide_ground
from minidafny.prover.evaluate import NotEvaluable, evaluate_ground, holds, quantifier_range
from minidafny.prover.ground import encode_ground
from minidafny.prover.instantiate import Instantiator, prepare
from minidafny.prover.verdict import (
    INSTANTIATION_LIMIT, TIMEOUT, Counterexample, Incomplete, Model, Proved, Unknown, Verdict,
)
from minidafny.vcgen.wp import VerificationCondition

logger = logging.getLogger(__name__)

# widest range checked per universal when looking for violated instances
REFINE_RANGE = 1000


@dataclass
class ProverOptions:
    timeout_ms: int = 10000
    rounds: int = 3
    instantiation_cap: int = 10000
    refinements: int = 8
    minimize: bool = True


def deadline_check(timeout_ms: int) -> Callable[[], None]:
    deadline = time.monotonic() + timeout_ms / 1000.0

    def check():
        if time.monotonic() > deadline:
            raise Incomplete(TIMEOUT, f"{timeout_ms} ms elapsed")

    return check


def _violated_points(universal: Term, model: Model) -> List[Term]:
    """Integers in the universal's syntactic range whose instance the model does not satisfy"""
    var, body = universal.value, universal.args[0]
    bounds = quantifier_range(var, body, "forall")
    if bounds is None:
        return []
    try:
        lo = max(evaluate_ground(b, model) for b in bounds[0])
        hi = min(evaluate_ground(b, model) for b in bounds[1])
    except NotEvaluable:
        return []
    points = []
    for value in range(lo, min(hi, lo + REFINE_RANGE)):
        point = F.mk_int(value)
        if holds(F.substitute(body, {var: point}), model) is not True:
            points.append(point)
    return points


def _refine(instantiator: Instantiator, model: Model) -> int:
    added = 0
    for universal in list(instantiator.universals):
        added += instantiator.add_instances(universal, _violated_points(universal, model))
    return added


def minimize_model(target: Term, model: Model, check: Optional[Callable[[], None]] = None) -> Model:
    """Halve integer symbols of target toward 0 while target stays true"""
    names = sorted(name for name, sort in F.symbols(target).items() if sort == F.INT)
    for name in names:
        while model.scalars.get(name, 0) != 0:
            if check is not None:
                check()
            value = model.scalars[name]
            candidate = model.copy()
            candidate.scalars[name] = -(-value // 2) if value < 0 else value // 2
            if holds(target, candidate) is not True:
                break
            model = candidate
    return model


def _search(vc: VerificationCondition, options: ProverOptions, check: Callable[[], None]) -> Verdict:
    formula = prepare(vc.prelude, F.not_(vc.formula))
    instantiator = Instantiator(formula, options.rounds, options.instantiation_cap, check)
    for _ in range(options.refinements + 1):
        ground = instantiator.expand()
        result = decide_ground(encode_ground(ground), check)
        if isinstance(result, Unsat):
            return Proved()
        model = result.model
        exact = holds(formula, model)
        if exact is not False:
            target = formula if exact else ground
            break
        if _refine(instantiator, model) == 0:
            target = ground
            break
        logger.debug(f"{vc.method} vc {vc.id}: model violates a universal, refining")
    else:
        raise Incomplete(INSTANTIATION_LIMIT, "refinement did not converge")
    if options.minimize and holds(target, model) is True:
        model = minimize_model(target, model, check)
    return Counterexample(model)


def prove(vc: VerificationCondition, options: Optional[ProverOptions] = None) -> Verdict:
    """
    Decide validity of a verification condition

    The negated condition (with its prelude) is skolemized, its universals
    instantiated at ground terms and the ground core decided. A satisfying
    model is checked against the bounded universals; violated instances are
    added and the search resumes.

    Returns:
        Proved, Counterexample(model) or Unknown(reason)
    """
    options = options or ProverOptions()
    if vc.formula is F.TRUE:
        return Proved()
    check = deadline_check(options.timeout_ms)
    started = time.monotonic()
    try:
        verdict = _search(vc, options, check)
    except Incomplete as exc:
        logger.debug(f"{vc.method} vc {vc.id}: gave up ({exc})")
        return Unknown(exc.reason)
    logger.debug(f"{vc.method} vc {vc.id} {vc.kind.value}: {verdict.label} "
                 f"in {(time.monotonic() - started) * 1000:.0f} ms")
    return verdict
