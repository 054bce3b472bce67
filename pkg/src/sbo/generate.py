"""Instance generators: named worst-case constructions and random instances.

Three named families are built here: the 3-keyword instance where no
fractional prefix is optimal, the exponential-cpc scenario family where every
prefix is far from optimal, and the clique-to-scenario reduction used to
establish hardness of scenario-model optimization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sbo.core import Instance, Keyword, canonicalize
from sbo.dist import DiscretePMF, Fixed, Independent, Proportional, Scenario
from sbo.errors import ParameterError, ValidationError


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with 1-based node ids."""

    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        edges = []
        for u, v in self.edges:
            if not (1 <= u <= self.node_count and 1 <= v <= self.node_count):
                raise ValidationError(f"edge ({u},{v}) outside 1..{self.node_count}")
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
            edges.append(key)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_clique(self, k: int) -> bool:
        """Direct clique check by enumeration (test oracle for the reduction)."""
        from itertools import combinations

        if k <= 1:
            return self.node_count >= k
        edge_set = set(self.edges)
        for nodes in combinations(range(1, self.node_count + 1), k):
            if all((a, b) in edge_set for a, b in combinations(nodes, 2)):
                return True
        return False


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: first line "n m", then m lines "u v"."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty graph file")
    try:
        n, m = map(int, lines[0].split())
        edges = tuple(tuple(map(int, ln.split())) for ln in lines[1 : m + 1])
    except ValueError as exc:
        raise ValidationError(f"malformed graph file: {exc}") from None
    if len(edges) != m:
        raise ValidationError(f"expected {m} edges, found {len(edges)}")
    return Graph(node_count=n, edges=edges)


def format_graph(graph: Graph) -> str:
    lines = [f"{graph.node_count} {graph.edge_count}"]
    lines += [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def gen_nonprefix_example() -> Instance:
    """3-keyword independent instance whose optimum is not a prefix.

    Keywords 2 and 3 cost the same, but keyword 3 always delivers one click
    while keyword 2 is a coin flip; skipping the volatile middle keyword
    always gets 2 clicks, whereas the best prefix expects only 1.75.
    """
    keywords = (
        Keyword("k1", cpc=0.0),
        Keyword("k2", cpc=1.0),
        Keyword("k3", cpc=1.0),
    )
    model = Independent(
        (
            DiscretePMF(((1.0, 1.0),)),
            DiscretePMF(((0.0, 0.5), (1.0, 0.5))),
            DiscretePMF(((1.0, 1.0),)),
        )
    )
    return canonicalize(Instance(keywords=keywords, budget=1.0, model=model))


def gen_gap_example(n: int, c: float, budget: float) -> Instance:
    """Scenario family where every prefix is far from the optimum.

    2n keywords with cpc_i = c^i; scenario s (1..n) gives keywords 2s-1 and
    2s exactly budget / c^(2s-1) clicks each, with probability proportional
    to c^(2s-1).  Bidding all odd keywords spends the budget on cheap clicks
    in every scenario, while any prefix does well in at most one scenario.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not c > 1:
        raise ParameterError(f"c must be > 1, got {c}")
    if not budget > 0:
        raise ParameterError(f"budget must be > 0, got {budget}")
    keywords = tuple(Keyword(f"k{i}", cpc=float(c) ** i) for i in range(1, 2 * n + 1))
    weights = [float(c) ** (2 * s - 1) for s in range(1, n + 1)]
    alpha = 1.0 / sum(weights)
    scenarios = []
    for s in range(1, n + 1):
        clicks = [0.0] * (2 * n)
        clicks[2 * s - 2] = budget / c ** (2 * s - 1)
        clicks[2 * s - 1] = budget / c ** (2 * s - 1)
        scenarios.append((alpha * weights[s - 1], tuple(clicks)))
    return canonicalize(
        Instance(keywords=keywords, budget=budget, model=Scenario(tuple(scenarios)))
    )


@dataclass(frozen=True)
class CliqueReductionParams:
    """Deterministically chosen parameters of the clique-to-scenario reduction."""

    epsilon: float
    delta: float
    alpha: float
    t: float
    K: float
    V: float
    k: int
    nodes: int
    edges: int

    def check(self) -> None:
        k, K = self.k, self.K
        if not 0 < self.epsilon < 1.0 / (k + 1):
            raise ParameterError(f"epsilon {self.epsilon} not in (0, 1/(k+1))")
        slack = (1 - self.delta) / 2 - k * self.delta * K / (self.nodes * self.epsilon)
        if not slack > 0:
            raise ParameterError(f"delta {self.delta} too large (slack {slack})")
        lhs = (k + 1) * (K / self.epsilon + self.alpha * self.t) / (K + self.alpha * self.t)
        if not lhs < 1.0 / self.epsilon:
            raise ParameterError(f"t {self.t} too small ({lhs} >= 1/epsilon)")


def gen_clique_reduction(
    graph: Graph, k: int
) -> tuple[Instance, float, CliqueReductionParams]:
    """Map (graph, k) to a scenario instance with target value V.

    Node keywords are cheap (cpc = epsilon) and edge keywords expensive
    (cpc = 1); the budget K = k(k-1)/2 forces good integer solutions to pick
    K edge keywords touching as few nodes as possible.  The exhaustive
    integer optimum reaches V exactly when the graph has a k-clique.
    """
    n, m = graph.node_count, graph.edge_count
    if not 2 <= k <= n:
        raise ParameterError(f"need 2 <= k <= {n}, got k={k}")
    if m < 1:
        raise ParameterError("graph needs at least one edge")

    K = k * (k - 1) / 2.0
    epsilon = 1.0 / (2 * (k + 1))
    # largest power of 10 at most half the delta that zeroes the slack term
    delta_star = n * epsilon / (n * epsilon + 2 * k * K)
    delta = 10.0 ** np.floor(np.log10(delta_star / 2))
    alpha = 1.0 / (2 * m)
    t = 1.0
    while (k + 1) * (K / epsilon + alpha * t) / (K + alpha * t) >= 1.0 / epsilon:
        t *= 2.0
    V = (1 - delta) * K + (delta * (n - k) / n) * (K / epsilon)
    params = CliqueReductionParams(
        epsilon=epsilon, delta=delta, alpha=alpha, t=t, K=K, V=V, k=k, nodes=n, edges=m
    )
    params.check()

    # node keywords first (cheap), then edge keywords; already in cpc order
    keywords = tuple(
        [Keyword(f"node:{i}", cpc=epsilon) for i in range(1, n + 1)]
        + [Keyword(f"edge:{u}-{v}", cpc=1.0) for u, v in graph.edges]
    )
    neighbors = {i: [] for i in range(1, n + 1)}
    for e, (u, v) in enumerate(graph.edges):
        neighbors[u].append(e)
        neighbors[v].append(e)

    scenarios = [(1 - delta, tuple([0.0] * n + [1.0] * m))]
    for i in range(1, n + 1):
        clicks = [0.0] * (n + m)
        clicks[i - 1] = K / epsilon
        for e in neighbors[i]:
            clicks[n + e] = t
        scenarios.append((delta / n, tuple(clicks)))
    instance = canonicalize(
        Instance(keywords=keywords, budget=K, model=Scenario(tuple(scenarios)))
    )
    return instance, V, params


@dataclass(frozen=True)
class GenConfig:
    """Bounds for random instance generation."""

    cpc_range: tuple[float, float] = (0.1, 10.0)
    click_range: tuple[float, float] = (0.0, 20.0)
    max_support: int = 4
    max_scenarios: int = 6
    budget_factor_range: tuple[float, float] = (0.2, 5.0)

    def validate(self) -> None:
        if not (0 <= self.cpc_range[0] <= self.cpc_range[1]):
            raise ParameterError(f"bad cpc range {self.cpc_range}")
        if not (0 <= self.click_range[0] <= self.click_range[1]):
            raise ParameterError(f"bad click range {self.click_range}")
        if self.max_support < 1 or self.max_scenarios < 1:
            raise ParameterError("support and scenario counts must be >= 1")
        if not 0 < self.budget_factor_range[0] <= self.budget_factor_range[1]:
            raise ParameterError(f"bad budget factor range {self.budget_factor_range}")


def _random_pmf(rng: np.random.Generator, config: GenConfig) -> DiscretePMF:
    size = int(rng.integers(1, config.max_support + 1))
    lo, hi = config.click_range
    values = rng.uniform(lo, hi, size=size)
    values = np.unique(np.round(values, 6))
    probs = rng.uniform(0.1, 1.0, size=len(values))
    probs /= probs.sum()
    return DiscretePMF(tuple(zip(values.tolist(), probs.tolist())))


def gen_random(
    model_kind: str, n: int, seed: int, config: GenConfig | None = None
) -> Instance:
    """Deterministic random instance of the requested model.

    The budget is drawn so the expected total cost straddles it, exercising
    both the under- and over-budget branches of the objective.
    """
    config = config or GenConfig()
    config.validate()
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    cpcs = rng.uniform(*config.cpc_range, size=n)
    keywords = tuple(Keyword(f"k{i + 1}", cpc=float(c)) for i, c in enumerate(cpcs))

    if model_kind == "fixed":
        clicks = rng.uniform(*config.click_range, size=n)
        model = Fixed(tuple(clicks.tolist()))
        expected = clicks
    elif model_kind == "proportional":
        q = rng.uniform(0.05, 1.0, size=n)
        q /= q.sum()
        pmf = _random_pmf(rng, config)
        model = Proportional(tuple(q.tolist()), pmf)
        expected = q * pmf.mean()
    elif model_kind == "independent":
        pmfs = tuple(_random_pmf(rng, config) for _ in range(n))
        model = Independent(pmfs)
        expected = np.asarray([pmf.mean() for pmf in pmfs])
    elif model_kind == "scenario":
        count = int(rng.integers(1, config.max_scenarios + 1))
        probs = rng.uniform(0.1, 1.0, size=count)
        probs /= probs.sum()
        rows = rng.uniform(*config.click_range, size=(count, n))
        model = Scenario(
            tuple((float(p), tuple(row.tolist())) for p, row in zip(probs, rows))
        )
        expected = probs @ rows
    else:
        raise ParameterError(f"unknown model kind {model_kind!r}")

    expected_cost = float(np.dot(cpcs, expected))
    if expected_cost <= 0:
        expected_cost = 1.0
    lo, hi = config.budget_factor_range
    factor = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
    budget = expected_cost * factor
    return canonicalize(Instance(keywords=keywords, budget=budget, model=model))
