"""Evaluators for the expected budget-scaled click count under each model.

The fixed, scenario and proportional models admit exact evaluation.  The
independent model is evaluated either by explicit enumeration of the joint
support (small instances only) or by a dynamic-programming approximation
scheme with a certified (1 + eps) sandwich.  A seeded Monte Carlo estimator
works for every model and serves as a universal cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sbo import dist
from sbo.core import EvalReport, Instance, check_bids, scaled_value
from sbo.dist import (
    RNG_ALGORITHM,
    DiscretePMF,
    Fixed,
    Independent,
    Proportional,
    Scenario,
    partial_expectation,
    pmf_bucket,
    support_size,
    tail_prob,
)
from sbo.errors import ModelMismatchError, OracleTooLargeError, ParameterError

# Joint-support product above which exact independent enumeration refuses.
EXACT_ENUMERATION_CAP = 10**6
# Total support count above which the approximation scheme buckets pmfs first.
EXPLICIT_SUPPORT_CAP = 10**4


def _require(instance: Instance, model_type) -> None:
    if not isinstance(instance.model, model_type):
        raise ModelMismatchError(
            f"expected a {model_type.__name__} model, got {type(instance.model).__name__}"
        )


def eval_fixed(bids, instance: Instance) -> EvalReport:
    """Exact objective for deterministic click counts."""
    _require(instance, Fixed)
    bids = check_bids(bids, instance.n)
    clicks = sum(b * c for b, c in zip(bids, instance.model.clicks))
    cost = sum(b * k.cpc * c for b, k, c in zip(bids, instance.keywords, instance.model.clicks))
    return EvalReport.exact(scaled_value(clicks, cost, instance.budget), "fixed-exact")


def eval_scenario(bids, instance: Instance) -> EvalReport:
    """Exact expectation: evaluate each scenario and weight by its probability."""
    _require(instance, Scenario)
    bids = check_bids(bids, instance.n)
    cpcs = instance.cpcs()
    total = 0.0
    for prob, clicks in instance.model.scenarios:
        clk = sum(b * c for b, c in zip(bids, clicks))
        cost = sum(b * cpc * c for b, cpc, c in zip(bids, cpcs, clicks))
        total += prob * scaled_value(clk, cost, instance.budget)
    return EvalReport.exact(total, "scenario-exact")


def eval_proportional(bids, instance: Instance) -> EvalReport:
    """Exact expectation via the budget threshold on the total click count.

    With sq = sum(b_i q_i) and sqc = sum(b_i q_i cpc_i), the solution is under
    budget exactly when the total click count C <= c* = B / sqc, so

        E[value] = sq * E[C ; C <= c*]  +  (B * sq / sqc) * Pr[C > c*].
    """
    _require(instance, Proportional)
    bids = check_bids(bids, instance.n)
    model: Proportional = instance.model
    sq = sum(b * q for b, q in zip(bids, model.q))
    sqc = sum(b * q * k.cpc for b, q, k in zip(bids, model.q, instance.keywords))
    pmf = model.total_clicks
    if sq == 0.0:
        return EvalReport.exact(0.0, "proportional-exact")
    if sqc == 0.0:
        # Free clicks are never budget-limited.
        return EvalReport.exact(sq * pmf.mean(), "proportional-exact")
    cstar = instance.budget / sqc
    val = sq * partial_expectation(pmf, cstar)
    val += (instance.budget * sq / sqc) * tail_prob(pmf, cstar)
    return EvalReport.exact(val, "proportional-exact")


def eval_independent_exact(
    bids, instance: Instance, cap: int = EXACT_ENUMERATION_CAP
) -> EvalReport:
    """Exact expectation by enumerating the full joint support.

    Deliberately brute force; refuses when the joint-product size exceeds
    ``cap`` and directs callers to :func:`eval_independent_ptas`.
    """
    _require(instance, Independent)
    bids = check_bids(bids, instance.n)
    model: Independent = instance.model
    joint = 1
    for pmf in model.pmfs:
        joint *= len(pmf)
        if joint > cap:
            raise OracleTooLargeError(
                f"joint support exceeds {cap} outcomes; use eval_independent_ptas"
            )
    shape = tuple(len(pmf) for pmf in model.pmfs)
    clk = np.zeros(shape)
    cost = np.zeros(shape)
    logp = np.zeros(shape)
    for i, pmf in enumerate(model.pmfs):
        ax = [None] * instance.n
        ax[i] = slice(None)
        idx = tuple(ax)
        vals = np.asarray(pmf.values())
        clk = clk + bids[i] * vals[idx]
        cost = cost + bids[i] * instance.keywords[i].cpc * vals[idx]
        logp = logp + np.log(np.asarray(pmf.probs()))[idx]
    probs = np.exp(logp)
    scale = np.maximum(1.0, cost / instance.budget)
    val = float(np.sum(probs * clk / scale))
    return EvalReport.exact(val, "independent-exact")


@dataclass(frozen=True)
class CostDistributionTable:
    """DP table of rounded-cost distributions for a growing keyword set.

    ``rows[j]`` maps a discretized cost level d to the probability that the
    first j included keywords (the excluded one skipped) cost d after rounding
    down onto the grid {0} union {scale * base**k}.  Costs are pre-scaled so
    the minimum positive per-outcome cost is 1; ``scale`` converts grid levels
    back to original money units.
    """

    rows: tuple[dict, ...]
    base: float
    scale: float
    eps: float

    def final_row(self) -> dict:
        """Distribution of the total rounded cost, in original money units."""
        return {d * self.scale: p for d, p in self.rows[-1].items()}


def dp_cost_distribution(
    bids, instance: Instance, exclude: int, eps: float
) -> CostDistributionTable:
    """Approximate distribution of the cost of all keywords except ``exclude``.

    Every mass point's cost is under-estimated by a factor of at most
    (1 + eps) relative to the true cost of the joint outcomes it aggregates.
    """
    _require(instance, Independent)
    if not eps > 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    bids = check_bids(bids, instance.n)
    if not 0 <= exclude < instance.n:
        raise ParameterError(f"exclude index {exclude} out of range")
    model: Independent = instance.model
    n = instance.n
    base = 1.0 + eps / n

    # Per-keyword cost outcomes (cost, prob); zero-cost outcomes kept apart.
    outcomes: list[list[tuple[float, float]]] = []
    positive = []
    for j in range(n):
        if j == exclude:
            continue
        cpc = instance.keywords[j].cpc
        row = [(bids[j] * cpc * v, p) for v, p in model.pmfs[j].points]
        outcomes.append(row)
        positive.extend(c for c, _ in row if c > 0)
    if not positive:
        return CostDistributionTable(rows=({0.0: 1.0},), base=base, scale=1.0, eps=eps)
    scale = min(positive)

    max_total = sum(max(c for c, _ in row) for row in outcomes) / scale
    kmax = dist._floor_log(max_total, base) + 1
    dvals = base ** np.arange(kmax + 1)
    logbase = math.log(base)

    # row[0] is the d=0 slot; row[1 + k] is the grid level base**k.
    row = np.zeros(kmax + 2)
    row[0] = 1.0
    rows = [row.copy()]
    for kw_outcomes in outcomes:
        new = np.zeros_like(row)
        for c, p in kw_outcomes:
            if c == 0.0:
                new += p * row
                continue
            x = c / scale
            raw = np.concatenate(([x], dvals + x))
            k = np.floor(np.log(raw) / logbase).astype(int)
            k = np.clip(k, 0, kmax)
            # guard against log round-off on exact grid hits
            k[np.take(dvals, np.minimum(k + 1, kmax)) <= raw] += 1
            k = np.clip(k, 0, kmax)
            k[np.take(dvals, k) > raw * (1 + 1e-12)] -= 1
            np.add.at(new, k + 1, p * row)
        row = new
        rows.append(row.copy())

    def to_dict(arr):
        out = {}
        if arr[0] > 0:
            out[0.0] = float(arr[0])
        for k in range(kmax + 1):
            if arr[k + 1] > 0:
                out[float(dvals[k])] = float(arr[k + 1])
        return out

    return CostDistributionTable(
        rows=tuple(to_dict(r) for r in rows), base=base, scale=scale, eps=eps
    )


def eval_independent_ptas(bids, instance: Instance, eps: float) -> EvalReport:
    """Approximate expectation with certified relative error at most eps.

    Decomposes the expectation keyword by keyword,

        E[value] = sum_i sum_c p_i(c) * b_i * c * s(i, c),
        s(i, c) = sum_d Pr[cost(others) = d] / max(1, (d + b_i * c * cpc_i) / B),

    and estimates each s(i, c) from the rounded-down cost table, which only
    over-estimates: exact <= value <= (1 + eps) * exact.  Distributions with a
    very large explicit support are bucketed first; the certified interval
    widens accordingly.
    """
    _require(instance, Independent)
    if not 0 < eps <= 1:
        raise ParameterError(f"eps must be in (0, 1], got {eps}")
    bids = check_bids(bids, instance.n)
    model: Independent = instance.model

    bucketed = support_size(model) > EXPLICIT_SUPPORT_CAP
    if bucketed:
        eps_inner = math.sqrt(1.0 + eps) - 1.0
        model = Independent(tuple(pmf_bucket(pmf, eps_inner) for pmf in model.pmfs))
        instance = Instance(instance.keywords, instance.budget, model)
    else:
        eps_inner = eps

    budget = instance.budget
    total = 0.0
    for i in range(instance.n):
        if bids[i] == 0.0:
            continue
        cpc = instance.keywords[i].cpc
        table = dp_cost_distribution(bids, instance, exclude=i, eps=eps_inner)
        final = table.final_row()
        for c, p in model.pmfs[i].points:
            if c == 0.0:
                continue
            own = bids[i] * c * cpc
            s = sum(pd / max(1.0, (d + own) / budget) for d, pd in final.items())
            total += p * bids[i] * c * s
    upper = total * (1.0 + eps_inner) if bucketed else total
    return EvalReport(
        value=total,
        method="independent-ptas" + ("-bucketed" if bucketed else ""),
        epsilon=eps,
        lower=total / (1.0 + eps),
        upper=upper,
    )


def sample_clicks_matrix(instance: Instance, samples: int, seed: int) -> np.ndarray:
    """Draw ``samples`` click realizations as a (samples, n) array."""
    rng = np.random.default_rng(seed)
    model = instance.model
    if isinstance(model, Fixed):
        return np.tile(np.asarray(model.clicks), (samples, 1))
    if isinstance(model, Proportional):
        pmf = model.total_clicks
        cs = rng.choice(pmf.values(), size=samples, p=pmf.probs())
        return np.outer(cs, np.asarray(model.q))
    if isinstance(model, Independent):
        cols = [
            rng.choice(pmf.values(), size=samples, p=pmf.probs()) for pmf in model.pmfs
        ]
        return np.column_stack(cols)
    if isinstance(model, Scenario):
        probs = [p for p, _ in model.scenarios]
        matrix = np.asarray([clicks for _, clicks in model.scenarios])
        idx = rng.choice(len(model.scenarios), size=samples, p=probs)
        return matrix[idx]
    raise ModelMismatchError(f"unknown click model {type(model).__name__}")


def eval_monte_carlo(bids, instance: Instance, samples: int, seed: int) -> EvalReport:
    """Seeded Monte Carlo estimate with mean +/- 3 standard error bounds."""
    if samples < 1:
        raise ParameterError(f"samples must be >= 1, got {samples}")
    bids = np.asarray(check_bids(bids, instance.n))
    clicks = sample_clicks_matrix(instance, samples, seed)
    cpcs = np.asarray(instance.cpcs())
    clk = clicks @ bids
    cost = clicks @ (bids * cpcs)
    vals = clk / np.maximum(1.0, cost / instance.budget)
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return EvalReport(
        value=mean,
        method=f"monte-carlo({RNG_ALGORITHM})",
        epsilon=0.0,
        lower=mean - 3 * se,
        upper=mean + 3 * se,
    )


def eval_auto(bids, instance: Instance, eps: float = 0.05) -> EvalReport:
    """Dispatch to the natural exact evaluator, or the PTAS when enumeration is too big."""
    model = instance.model
    if isinstance(model, Fixed):
        return eval_fixed(bids, instance)
    if isinstance(model, Scenario):
        return eval_scenario(bids, instance)
    if isinstance(model, Proportional):
        return eval_proportional(bids, instance)
    if isinstance(model, Independent):
        try:
            return eval_independent_exact(bids, instance)
        except OracleTooLargeError:
            return eval_independent_ptas(bids, instance, eps)
    raise ModelMismatchError(f"unknown click model {type(model).__name__}")
