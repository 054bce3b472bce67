"""Finite discrete distributions and the stochastic click models.

Four click models are supported:

* ``Fixed`` -- click counts known in advance.
* ``Proportional`` -- one random total click count split by fixed frequencies.
* ``Independent`` -- one distribution per keyword, drawn independently.
* ``Scenario`` -- an explicit list of joint outcomes with probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from sbo.errors import DimensionError, ParameterError, ValidationError

# Probability sums farther than this from 1 are rejected instead of rescaled.
PROB_SUM_TOLERANCE = 1e-6

RNG_ALGORITHM = "pcg64"  # numpy default_rng; recorded in Monte Carlo reports


@dataclass(frozen=True)
class DiscretePMF:
    """A finite pmf over non-negative values.

    Points are kept sorted by value with duplicates merged; probabilities are
    renormalized on construction when their sum is within ``PROB_SUM_TOLERANCE``
    of 1, and rejected otherwise.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        points = [(float(v), float(p)) for v, p in self.points]
        if not points:
            raise ValidationError("pmf needs at least one point")
        merged: dict[float, float] = {}
        for v, p in points:
            if v < 0:
                raise ValidationError(f"pmf value {v} is negative")
            if p <= 0:
                raise ValidationError(f"pmf probability {p} is not positive")
            merged[v] = merged.get(v, 0.0) + p
        total = sum(merged.values())
        if abs(total - 1.0) > PROB_SUM_TOLERANCE:
            raise ValidationError(f"pmf probabilities sum to {total}, not 1")
        object.__setattr__(
            self,
            "points",
            tuple((v, merged[v] / total) for v in sorted(merged)),
        )

    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.points)

    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.points)

    def mean(self) -> float:
        return sum(v * p for v, p in self.points)

    def __len__(self) -> int:
        return len(self.points)


def pmf_validate(points: Iterable[tuple[float, float]]) -> DiscretePMF:
    """Build a valid pmf: sort, merge duplicates, renormalize or reject."""
    return DiscretePMF(tuple(points))


def tail_prob(pmf: DiscretePMF, cstar: float) -> float:
    """Pr[C > cstar] (strict)."""
    return sum(p for v, p in pmf.points if v > cstar)


def partial_expectation(pmf: DiscretePMF, cstar: float) -> float:
    """Sum of v * p(v) over support values v <= cstar (inclusive)."""
    return sum(v * p for v, p in pmf.points if v <= cstar)


def pmf_bucket(pmf: DiscretePMF, eps_prime: float) -> DiscretePMF:
    """Round support values down onto a geometric grid, merging their mass.

    Each positive value v maps to the largest s * (1 + eps_prime)^k <= v,
    where s is the smallest positive support value; zero stays at zero.  The
    result under-approximates every outcome by a factor of at most
    (1 + eps_prime).
    """
    if not eps_prime > 0:
        raise ParameterError(f"eps_prime must be > 0, got {eps_prime}")
    positive = [v for v in pmf.values() if v > 0]
    if not positive:
        return pmf
    base = 1.0 + eps_prime
    s = min(positive)
    bucketed: dict[float, float] = {}
    for v, p in pmf.points:
        if v > 0:
            v = s * base ** _floor_log(v / s, base)
        bucketed[v] = bucketed.get(v, 0.0) + p
    return DiscretePMF(tuple(bucketed.items()))


def _floor_log(x: float, base: float) -> int:
    """Largest integer k >= 0 with base**k <= x, robust to log round-off."""
    k = max(0, math.floor(math.log(x) / math.log(base)))
    while base ** (k + 1) <= x:
        k += 1
    while k > 0 and base**k > x:
        k -= 1
    return k


@dataclass(frozen=True)
class Fixed:
    """Deterministic click counts."""

    clicks: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "clicks", tuple(float(c) for c in self.clicks))
        for c in self.clicks:
            if c < 0:
                raise ValidationError(f"negative click count {c}")

    @property
    def n(self) -> int:
        return len(self.clicks)

    def permuted(self, order: Sequence[int]) -> "Fixed":
        return Fixed(tuple(self.clicks[i] for i in order))

    def scale_clicks(self, factors: Sequence[float]) -> "Fixed":
        return Fixed(tuple(c * f for c, f in zip(self.clicks, factors)))


@dataclass(frozen=True)
class Proportional:
    """A random total click count split among keywords by frequencies q."""

    q: tuple[float, ...]
    total_clicks: DiscretePMF

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        for x in self.q:
            if x < 0:
                raise ValidationError(f"negative click frequency {x}")
        total = sum(self.q)
        if abs(total - 1.0) > PROB_SUM_TOLERANCE:
            raise ValidationError(f"click frequencies sum to {total}, not 1")

    @property
    def n(self) -> int:
        return len(self.q)

    def permuted(self, order: Sequence[int]) -> "Proportional":
        return Proportional(tuple(self.q[i] for i in order), self.total_clicks)

    def scale_clicks(self, factors: Sequence[float]) -> "Proportional":
        # clicks_i = q_i * C becomes w_i * q_i * C; renormalize the split and
        # push the normalizer into the total-clicks distribution.
        scaled = [q * f for q, f in zip(self.q, factors)]
        norm = sum(scaled)
        if norm <= 0:
            raise ValidationError("cannot scale a proportional model to zero mass")
        pmf = DiscretePMF(tuple((v * norm, p) for v, p in self.total_clicks.points))
        return Proportional(tuple(x / norm for x in scaled), pmf)


@dataclass(frozen=True)
class Independent:
    """One click distribution per keyword, drawn independently."""

    pmfs: tuple[DiscretePMF, ...]

    def __post_init__(self):
        object.__setattr__(self, "pmfs", tuple(self.pmfs))

    @property
    def n(self) -> int:
        return len(self.pmfs)

    def permuted(self, order: Sequence[int]) -> "Independent":
        return Independent(tuple(self.pmfs[i] for i in order))

    def scale_clicks(self, factors: Sequence[float]) -> "Independent":
        return Independent(
            tuple(
                DiscretePMF(tuple((v * f, p) for v, p in pmf.points))
                for pmf, f in zip(self.pmfs, factors)
            )
        )


@dataclass(frozen=True)
class Scenario:
    """An explicit list of (probability, joint click vector) outcomes."""

    scenarios: tuple[tuple[float, tuple[float, ...]], ...]

    def __post_init__(self):
        scenarios = tuple(
            (float(p), tuple(float(c) for c in clicks)) for p, clicks in self.scenarios
        )
        if not scenarios:
            raise ValidationError("scenario model needs at least one scenario")
        n = len(scenarios[0][1])
        for p, clicks in scenarios:
            if p <= 0:
                raise ValidationError(f"scenario probability {p} is not positive")
            if len(clicks) != n:
                raise DimensionError("scenario click vectors have differing lengths")
            for c in clicks:
                if c < 0:
                    raise ValidationError(f"negative click count {c}")
        total = sum(p for p, _ in scenarios)
        if abs(total - 1.0) > PROB_SUM_TOLERANCE:
            raise ValidationError(f"scenario probabilities sum to {total}, not 1")
        object.__setattr__(self, "scenarios", scenarios)

    @property
    def n(self) -> int:
        return len(self.scenarios[0][1])

    def permuted(self, order: Sequence[int]) -> "Scenario":
        return Scenario(
            tuple((p, tuple(clicks[i] for i in order)) for p, clicks in self.scenarios)
        )

    def scale_clicks(self, factors: Sequence[float]) -> "Scenario":
        return Scenario(
            tuple(
                (p, tuple(c * f for c, f in zip(clicks, factors)))
                for p, clicks in self.scenarios
            )
        )


ClickModel = Union[Fixed, Proportional, Independent, Scenario]


def sample(model: ClickModel, seed: int) -> tuple[float, ...]:
    """Draw one click realization; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    if isinstance(model, Fixed):
        return model.clicks
    if isinstance(model, Proportional):
        c = _draw(rng, model.total_clicks)
        return tuple(q * c for q in model.q)
    if isinstance(model, Independent):
        return tuple(_draw(rng, pmf) for pmf in model.pmfs)
    if isinstance(model, Scenario):
        idx = rng.choice(len(model.scenarios), p=[p for p, _ in model.scenarios])
        return model.scenarios[idx][1]
    raise TypeError(f"unknown click model {type(model).__name__}")


def _draw(rng: np.random.Generator, pmf: DiscretePMF) -> float:
    return float(rng.choice(pmf.values(), p=pmf.probs()))


def support_size(model: ClickModel) -> int:
    """Number of support descriptors (not the joint-product size)."""
    if isinstance(model, Fixed):
        return 1
    if isinstance(model, Proportional):
        return len(model.total_clicks)
    if isinstance(model, Independent):
        return sum(len(pmf) for pmf in model.pmfs)
    if isinstance(model, Scenario):
        return len(model.scenarios)
    raise TypeError(f"unknown click model {type(model).__name__}")
