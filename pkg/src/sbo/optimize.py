"""Bid optimizers for each click model.

Fixed and proportional instances admit exact fractional-prefix optima.  For
the independent model, the best integer prefix is a 2-approximation among
integer solutions, so prefix enumeration with the approximate evaluator gives
a (2 + eps) guarantee.  The scenario model is handled by exhaustive integer
search at desk scale, and a generic prefix heuristic works for any model.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from sbo.core import EvalReport, Instance, canonicalize, scaled_value
from sbo.dist import Fixed, Independent, Proportional, Scenario, pmf_bucket, tail_prob
from sbo.errors import ModelMismatchError, ParameterError, SizeError
from sbo.evaluate import (
    eval_auto,
    eval_fixed,
    eval_independent_ptas,
    eval_proportional,
    eval_scenario,
)
from sbo.kernels import best_integer_bids

BRUTEFORCE_CAP_ENV = "SBO_BRUTEFORCE_CAP"
DEFAULT_BRUTEFORCE_CAP = 22


def bruteforce_cap() -> int:
    return int(os.environ.get(BRUTEFORCE_CAP_ENV, DEFAULT_BRUTEFORCE_CAP))


@dataclass(frozen=True)
class PrefixSolution:
    """A fractional prefix: full bids below istar, a fraction at istar, zero beyond.

    ``istar`` is 1-based; 0 means the empty solution.
    """

    istar: int
    frac: float

    def __post_init__(self):
        if self.istar < 0:
            raise ParameterError(f"istar must be >= 0, got {self.istar}")
        if not 0.0 <= self.frac <= 1.0:
            raise ParameterError(f"frac must be in [0, 1], got {self.frac}")

    def to_bids(self, n: int) -> tuple[float, ...]:
        if self.istar > n:
            raise ParameterError(f"istar {self.istar} exceeds keyword count {n}")
        bids = [0.0] * n
        for i in range(self.istar - 1):
            bids[i] = 1.0
        if self.istar >= 1:
            bids[self.istar - 1] = self.frac
        return tuple(bids)


@dataclass(frozen=True)
class OptReport:
    """An optimizer's chosen bids with its value report and guarantee tag."""

    bids: tuple[float, ...]
    value: EvalReport
    method: str
    guarantee: str


def _better(cand: tuple[float, tuple[float, ...]], best) -> bool:
    """Deterministic total order: higher value, then fewer keywords, then lex smaller."""
    if best is None:
        return True
    v, bids = cand
    bv, bbids = best
    if v != bv:
        return v > bv
    nk, bnk = sum(b > 0 for b in bids), sum(b > 0 for b in bbids)
    if nk != bnk:
        return nk < bnk
    return bids < bbids


def _pick_best(candidates, evaluator) -> tuple[tuple[float, ...], EvalReport]:
    best = None
    best_report = None
    for bids in candidates:
        report = evaluator(bids)
        if _better((report.value, bids), best):
            best = (report.value, bids)
            best_report = report
    return best[1], best_report


def opt_fixed_fractional(instance: Instance) -> OptReport:
    """Optimal fractional solution for known clicks: the maximal affordable prefix."""
    if not isinstance(instance.model, Fixed):
        raise ModelMismatchError("opt_fixed_fractional needs a Fixed model")
    inst = canonicalize(instance)
    costs = [k.cpc * c for k, c in zip(inst.keywords, inst.model.clicks)]
    bids = [0.0] * inst.n
    remaining = inst.budget
    for i, cost in enumerate(costs):
        if cost <= remaining:
            bids[i] = 1.0
            remaining -= cost
        else:
            bids[i] = remaining / cost
            remaining = 0.0
            break
    bids = tuple(bids)
    return OptReport(
        bids=bids,
        value=eval_fixed(bids, inst),
        method="fixed-fractional-prefix",
        guarantee="exact",
    )


def opt_fixed_integer(instance: Instance, resolution: float = 1e-6) -> OptReport:
    """Optimal integer bids for known clicks by pseudo-polynomial cost DP.

    Costs are discretized at ``resolution * budget``; per discretized cost
    level the DP keeps the best (clicks, keyword count, bids) triple, and all
    levels, including over-budget ones, are scanned at the end.
    """
    if not isinstance(instance.model, Fixed):
        raise ModelMismatchError("opt_fixed_integer needs a Fixed model")
    inst = canonicalize(instance)
    unit = inst.budget * resolution
    clicks = inst.model.clicks
    costs = [round(k.cpc * c / unit) for k, c in zip(inst.keywords, clicks)]

    true_costs = [k.cpc * c for k, c in zip(inst.keywords, clicks)]

    # states: discretized cost level -> (clicks, bids tuple, true cost)
    states: dict[int, tuple[float, tuple[float, ...], float]] = {
        0: (0.0, (0.0,) * inst.n, 0.0)
    }
    for i in range(inst.n):
        updated = dict(states)
        for level, (clk, bids, cost) in states.items():
            new_level = level + costs[i]
            new_bids = bids[:i] + (1.0,) + bids[i + 1 :]
            cand = (clk + clicks[i], new_bids, cost + true_costs[i])
            old = updated.get(new_level)
            if old is None or _better((cand[0], cand[1]), (old[0], old[1])):
                updated[new_level] = cand
        states = updated

    best = None
    for clk, bids, cost in states.values():
        val = scaled_value(clk, cost, inst.budget)
        if _better((val, bids), best):
            best = (val, bids)
    bids = best[1]
    return OptReport(
        bids=bids,
        value=eval_fixed(bids, inst),
        method="fixed-integer-dp",
        guarantee="exact",
    )


def interior_stationary_point(
    A: float,
    P: float,
    budget: float,
    Q: float,
    Cst: float,
    qi: float,
    cpci: float,
    lo: float,
    hi: float,
):
    """Unique interior root of the interval objective's derivative, if any.

    The objective on an interval where the over-budget outcome set is fixed is
    g(b) = A (Q + b qi) + P B (Q + b qi) / (Cst + b qi cpci); its derivative
    has at most one root because the rational term's derivative keeps the sign
    of qi (Cst - Q cpci).
    """
    if qi * cpci == 0.0 or A == 0.0 or P == 0.0:
        return None
    rhs = -P * budget * (Cst - Q * cpci) / A
    if rhs <= 0.0:
        return None
    b = (math.sqrt(rhs) - Cst) / (qi * cpci)
    if lo < b < hi:
        return b
    return None


def _proportional_candidates(inst: Instance) -> list[tuple[float, ...]]:
    """Marked (integer and budget-threshold) plus interior stationary prefixes."""
    model: Proportional = inst.model
    pmf = model.total_clicks
    cpcs = inst.cpcs()
    # Keywords with no cost impact are bid 1 unconditionally; the prefix runs
    # over the remaining (costed) keywords in canonical order.
    free = [i for i in range(inst.n) if model.q[i] * cpcs[i] == 0.0]
    ks = [i for i in range(inst.n) if model.q[i] * cpcs[i] > 0.0]
    m = len(ks)

    cumq = [0.0]
    cumwc = [0.0]
    for i in ks:
        cumq.append(cumq[-1] + model.q[i])
        cumwc.append(cumwc[-1] + model.q[i] * cpcs[i])

    marked = {float(x) for x in range(m + 1)}
    for c in pmf.values():
        if c <= 0:
            continue
        target = inst.budget / c  # prefix weighted cost that exactly spends B
        if target >= cumwc[-1]:
            continue
        for j in range(m):
            if cumwc[j] <= target <= cumwc[j + 1]:
                seg = cumwc[j + 1] - cumwc[j]
                if seg > 0:
                    marked.add(j + (target - cumwc[j]) / seg)
                break

    xs = sorted(marked)
    interesting = []
    for x_lo, x_hi in zip(xs, xs[1:]):
        mid = (x_lo + x_hi) / 2
        j = min(int(mid), m - 1)
        if not (j <= x_lo and x_hi <= j + 1):
            continue  # interval spans a keyword boundary; integer marks prevent this
        wc_mid = cumwc[j] + (mid - j) * (cumwc[j + 1] - cumwc[j])
        over = [c for c in pmf.values() if c * wc_mid > inst.budget]
        A = sum(c * p for c, p in pmf.points if c not in over)
        P = sum(p for c, p in pmf.points if c in over)
        i = ks[j]
        b = interior_stationary_point(
            A, P, inst.budget, cumq[j], cumwc[j], model.q[i], cpcs[i], x_lo - j, x_hi - j
        )
        if b is not None:
            interesting.append(j + b)

    candidates = []
    for x in sorted(set(xs) | set(interesting)):
        bids = [0.0] * inst.n
        for i in free:
            bids[i] = 1.0
        j = min(int(x), m - 1) if m else 0
        for jj in range(m):
            if jj < j:
                bids[ks[jj]] = 1.0
        if m:
            bids[ks[j]] = min(1.0, max(0.0, x - j))
            if x >= m:
                bids[ks[m - 1]] = 1.0
        candidates.append(tuple(bids))
    if not candidates:
        bids = [0.0] * inst.n
        for i in free:
            bids[i] = 1.0
        candidates.append(tuple(bids))
    return candidates


def opt_proportional_exact(instance: Instance) -> OptReport:
    """Optimal fractional solution for the proportional model.

    Enumerates O(n + t) candidate prefixes: all integer prefixes, the
    budget-threshold prefix of every support value, and the interior
    stationary point of each interval between consecutive marks.
    """
    if not isinstance(instance.model, Proportional):
        raise ModelMismatchError("opt_proportional_exact needs a Proportional model")
    inst = canonicalize(instance)
    candidates = _proportional_candidates(inst)
    bids, report = _pick_best(candidates, lambda b: eval_proportional(b, inst))
    return OptReport(bids=bids, value=report, method="proportional-marked-prefixes", guarantee="exact")


def opt_proportional_ptas(instance: Instance, eps: float) -> OptReport:
    """Bucket the total-clicks distribution, optimize exactly, evaluate on the original."""
    if not isinstance(instance.model, Proportional):
        raise ModelMismatchError("opt_proportional_ptas needs a Proportional model")
    if not eps > 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    inst = canonicalize(instance)
    model: Proportional = inst.model
    bucketed = Instance(
        inst.keywords,
        inst.budget,
        Proportional(model.q, pmf_bucket(model.total_clicks, eps)),
    )
    inner = opt_proportional_exact(bucketed)
    return OptReport(
        bids=inner.bids,
        value=eval_proportional(inner.bids, inst),
        method="proportional-bucketed-prefixes",
        guarantee=f"ptas({eps})",
    )


def opt_independent_prefix(instance: Instance, eps: float) -> OptReport:
    """Best integer prefix under the approximate evaluator: a (2 + eps) guarantee.

    The evaluator runs at eps' with (1 + eps')^2 <= 1 + eps so that the
    argmax comparison composes to a factor of at most 2 (1 + eps).
    """
    if not isinstance(instance.model, Independent):
        raise ModelMismatchError("opt_independent_prefix needs an Independent model")
    if not 0 < eps <= 1:
        raise ParameterError(f"eps must be in (0, 1], got {eps}")
    inst = canonicalize(instance)
    eps_inner = math.sqrt(1.0 + eps) - 1.0
    prefixes = [PrefixSolution(i, 1.0).to_bids(inst.n) for i in range(inst.n + 1)]
    bids, report = _pick_best(
        prefixes, lambda b: eval_independent_ptas(b, inst, eps_inner)
    )
    return OptReport(
        bids=bids,
        value=report,
        method="independent-integer-prefixes",
        guarantee=f"two-approx({eps})",
    )


def opt_scenario_bruteforce(instance: Instance, cap: int | None = None) -> OptReport:
    """Exact best integer bid vector by enumerating all 2^n candidates."""
    if not isinstance(instance.model, Scenario):
        raise ModelMismatchError("opt_scenario_bruteforce needs a Scenario model")
    cap = bruteforce_cap() if cap is None else cap
    inst = canonicalize(instance)
    if inst.n > cap:
        raise SizeError(f"{inst.n} keywords exceed the exhaustive-search cap {cap}")
    clicks = [list(c) for _, c in inst.model.scenarios]
    cpcs = inst.cpcs()
    costs = [[cpc * c for cpc, c in zip(cpcs, row)] for row in clicks]
    probs = [p for p, _ in inst.model.scenarios]
    mask, _ = best_integer_bids(clicks, costs, probs, inst.budget)
    bids = tuple(float((mask >> i) & 1) for i in range(inst.n))
    return OptReport(
        bids=bids,
        value=eval_scenario(bids, inst),
        method="scenario-bruteforce",
        guarantee="exhaustive",
    )


def _golden_section(f, lo: float, hi: float, iters: int = 60):
    """Maximize a unimodal-ish f on [lo, hi]; returns (x, f(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def opt_prefix_search(instance: Instance, eps: float = 0.05, grid: int = 1000) -> OptReport:
    """Prefix baseline for any model: integer prefixes plus fractional refinement.

    The refinement (golden section plus a coarse grid over the fractional bid,
    the grid guarding against non-concavity) applies where exact evaluation is
    cheap; for the independent model only integer prefixes are scored, with
    the approximate evaluator.
    """
    inst = canonicalize(instance)
    model = inst.model
    if isinstance(model, Independent):
        evaluator = lambda b: eval_independent_ptas(b, inst, eps)
        guarantee = "heuristic"
        refine = False
    else:
        evaluator = lambda b: eval_auto(b, inst, eps)
        guarantee = "exact" if isinstance(model, (Fixed, Proportional)) else "heuristic"
        refine = not isinstance(model, Fixed)

    candidates = [PrefixSolution(i, 1.0).to_bids(inst.n) for i in range(inst.n + 1)]
    if refine:
        for istar in range(1, inst.n + 1):
            def obj(frac, istar=istar):
                return evaluator(PrefixSolution(istar, frac).to_bids(inst.n)).value

            best_frac = max(range(grid + 1), key=lambda g: obj(g / grid)) / grid
            candidates.append(PrefixSolution(istar, best_frac).to_bids(inst.n))
            x, _ = _golden_section(obj, max(0.0, best_frac - 1.0 / grid),
                                   min(1.0, best_frac + 1.0 / grid))
            candidates.append(PrefixSolution(istar, x).to_bids(inst.n))
    if isinstance(model, Fixed):
        candidates.append(opt_fixed_fractional(inst).bids)

    bids, report = _pick_best(candidates, evaluator)
    return OptReport(bids=bids, value=report, method="prefix-search", guarantee=guarantee)


def opt_auto(instance: Instance, eps: float = 0.05) -> OptReport:
    """Model-appropriate default optimizer."""
    model = instance.model
    if isinstance(model, Fixed):
        return opt_fixed_fractional(instance)
    if isinstance(model, Proportional):
        return opt_proportional_exact(instance)
    if isinstance(model, Independent):
        return opt_independent_prefix(instance, eps)
    if isinstance(model, Scenario):
        if instance.n <= bruteforce_cap():
            return opt_scenario_bruteforce(instance)
        return opt_prefix_search(instance, eps)
    raise ModelMismatchError(f"unknown click model {type(model).__name__}")
