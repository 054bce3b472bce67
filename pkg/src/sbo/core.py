"""Problem representation and the deterministic budget-scaled objective.

A solution bids a fraction ``b_i`` in [0, 1] on each keyword.  In one
realization of the click counts, the solution would collect
``sum(b_i * clicks_i)`` clicks at total cost ``sum(b_i * cpc_i * clicks_i)``.
If the cost exceeds the budget ``B``, clicks are forfeited proportionally,
giving the objective

    value(b) = sum(b_i * clicks_i) / max(1, sum(b_i * cost_i) / B).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from sbo.errors import DimensionError, InvalidWeightError, ValidationError


@dataclass(frozen=True)
class Keyword:
    """One keyword with its fixed cost per click and an optional click value."""

    id: str
    cpc: float
    weight: float = 1.0

    def __post_init__(self):
        if self.cpc < 0:
            raise ValidationError(f"keyword {self.id!r}: cpc must be >= 0, got {self.cpc}")
        if not self.weight > 0:
            raise InvalidWeightError(
                f"keyword {self.id!r}: weight must be > 0, got {self.weight}"
            )


@dataclass(frozen=True)
class Instance:
    """A keyword list, a budget, and a click model of matching dimension.

    The click model is any of the model classes from :mod:`sbo.dist`; it is
    only required to expose ``n``, ``permuted(order)`` and
    ``scale_clicks(factors)``.
    """

    keywords: tuple[Keyword, ...]
    budget: float
    model: object

    def __post_init__(self):
        object.__setattr__(self, "keywords", tuple(self.keywords))
        if len(self.keywords) < 1:
            raise ValidationError("instance needs at least one keyword")
        if not self.budget > 0:
            raise ValidationError(f"budget must be > 0, got {self.budget}")
        if self.model.n != len(self.keywords):
            raise DimensionError(
                f"model dimension {self.model.n} != keyword count {len(self.keywords)}"
            )

    @property
    def n(self) -> int:
        return len(self.keywords)

    def cpcs(self) -> tuple[float, ...]:
        return tuple(k.cpc for k in self.keywords)

    def weights(self) -> tuple[float, ...]:
        return tuple(k.weight for k in self.keywords)


@dataclass(frozen=True)
class EvalReport:
    """An expected objective value with certified bounds.

    ``lower <= value <= upper`` always holds; exact evaluators collapse the
    interval.  ``epsilon`` is the requested relative error (0 for exact).
    """

    value: float
    method: str
    epsilon: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower <= self.value <= self.upper):
            raise ValidationError(
                f"report bounds violated: {self.lower} <= {self.value} <= {self.upper}"
            )

    @classmethod
    def exact(cls, value: float, method: str) -> "EvalReport":
        return cls(value=value, method=method, epsilon=0.0, lower=value, upper=value)


def check_bids(bids: Sequence[float], n: int) -> tuple[float, ...]:
    """Validate a bid vector against an instance dimension."""
    bids = tuple(float(b) for b in bids)
    if len(bids) != n:
        raise DimensionError(f"bid vector length {len(bids)} != {n}")
    for b in bids:
        if not 0.0 <= b <= 1.0:
            raise ValidationError(f"bid {b} outside [0, 1]")
    return bids


def check_realization(clicks: Sequence[float], n: int) -> tuple[float, ...]:
    """Validate a click realization against an instance dimension."""
    clicks = tuple(float(c) for c in clicks)
    if len(clicks) != n:
        raise DimensionError(f"realization length {len(clicks)} != {n}")
    for c in clicks:
        if c < 0:
            raise ValidationError(f"negative click count {c}")
    return clicks


def canonical_order(instance: Instance) -> list[int]:
    """Permutation that sorts keywords by non-decreasing cpc, stable on ties."""
    return sorted(range(instance.n), key=lambda i: (instance.keywords[i].cpc, i))


def canonicalize(instance: Instance) -> Instance:
    """Return an equivalent instance with keywords sorted by non-decreasing cpc.

    Model parameters are permuted identically, so evaluating permuted bids on
    the result gives the same objective.  Idempotent.
    """
    order = canonical_order(instance)
    if order == list(range(instance.n)):
        return instance
    keywords = tuple(instance.keywords[i] for i in order)
    return replace(instance, keywords=keywords, model=instance.model.permuted(order))


def aggregate(
    bids: Sequence[float], realization: Sequence[float], instance: Instance
) -> tuple[float, float]:
    """Total clicks and cost collected by ``bids`` in one realization."""
    bids = check_bids(bids, instance.n)
    clicks = check_realization(realization, instance.n)
    total_clicks = sum(b * c for b, c in zip(bids, clicks))
    total_cost = sum(b * k.cpc * c for b, k, c in zip(bids, instance.keywords, clicks))
    return total_clicks, total_cost


def value(bids: Sequence[float], realization: Sequence[float], instance: Instance) -> float:
    """Budget-scaled click count of ``bids`` in one realization."""
    clicks, cost = aggregate(bids, realization, instance)
    return scaled_value(clicks, cost, instance.budget)


def scaled_value(clicks: float, cost: float, budget: float) -> float:
    """Apply the budget scaling ``clicks / max(1, cost / budget)``."""
    if cost > budget:
        return clicks * budget / cost
    return clicks


def weighted_value(
    bids: Sequence[float], realization: Sequence[float], instance: Instance
) -> float:
    """Objective with per-keyword click values: weighted clicks, unweighted cost."""
    bids = check_bids(bids, instance.n)
    clicks = check_realization(realization, instance.n)
    wclicks = sum(b * k.weight * c for b, k, c in zip(bids, instance.keywords, clicks))
    cost = sum(b * k.cpc * c for b, k, c in zip(bids, instance.keywords, clicks))
    return scaled_value(wclicks, cost, instance.budget)


def apply_click_weights(instance: Instance) -> Instance:
    """Fold per-keyword click values into an equivalent unweighted instance.

    Substitutes clicks'_i = w_i * clicks_i and cpc'_i = cpc_i / w_i, which
    leaves the weighted objective unchanged while resetting every weight to 1.
    The result is re-canonicalized since the cpc order may change.
    """
    weights = instance.weights()
    for k in instance.keywords:
        if not k.weight > 0:
            raise InvalidWeightError(f"keyword {k.id!r} has non-positive weight")
    keywords = tuple(
        Keyword(id=k.id, cpc=k.cpc / k.weight, weight=1.0) for k in instance.keywords
    )
    model = instance.model.scale_clicks(weights)
    return canonicalize(replace(instance, keywords=keywords, model=model))
