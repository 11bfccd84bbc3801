"""Reproducible random instances with controlled size, requirements and slope.

Costs are integers: the cheaper endpoint cost is log-uniform in
``[1, cost_scale]`` (rounded), the other is ``floor(base * q)`` with ``q``
uniform in ``[1, theta_target]``; which endpoint is the cheaper one is a coin
flip. ``theta_target = inf`` makes the cheap side free with probability 1/2
and otherwise draws ``q`` log-uniformly in ``[1, cost_scale]``.
Requirements are uniform in ``[0, k_max]``, clipped to the number of distinct
neighbors available, so the full edge set is always a cover.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass

from .errors import InputError
from .model import Instance, max_distinct_neighbors


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    m: int
    k_max: int
    theta_target: float = 1.0
    cost_scale: float = 100.0
    seed: int = 0
    bipartite: bool = False

    def __post_init__(self):
        if self.n < 1 or self.m < 0 or self.k_max < 0:
            raise InputError("n must be positive and m, k_max nonnegative")
        if self.m > 0 and self.n < 2:
            raise InputError("edges need at least two nodes")
        if not self.theta_target >= 1:
            raise InputError(f"theta_target must be >= 1, got {self.theta_target}")
        if not self.cost_scale >= 1:
            raise InputError(f"cost_scale must be >= 1, got {self.cost_scale}")

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.theta_target):
            d["theta_target"] = "inf"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        d = dict(d)
        d["theta_target"] = float(d.get("theta_target", 1.0))
        return cls(**d)


def _cost_pair(rng: random.Random, spec: GeneratorSpec) -> tuple:
    base = max(1, round(math.exp(rng.uniform(0.0, math.log(spec.cost_scale)))))
    if math.isinf(spec.theta_target):
        if rng.random() < 0.5:
            cheap, dear = 0, base
        else:
            q = math.exp(rng.uniform(0.0, math.log(spec.cost_scale)))
            cheap, dear = base, math.floor(base * q)
    else:
        cheap, dear = base, math.floor(base * rng.uniform(1.0, spec.theta_target))
    return (cheap, dear) if rng.random() < 0.5 else (dear, cheap)


def generate(spec: GeneratorSpec) -> Instance:
    rng = random.Random(spec.seed)
    n = spec.n
    if spec.bipartite:
        left, right = list(range(n // 2)), list(range(n // 2, n))
        if spec.m and not left:
            raise InputError("a bipartite instance with edges needs n >= 2")
    edges = []
    for _ in range(spec.m):
        if spec.bipartite:
            u, v = rng.choice(left), rng.choice(right)
        else:
            u, v = rng.sample(range(n), 2)
        cu, cv = _cost_pair(rng, spec)
        edges.append((u, v, cu, cv))
    draft = Instance.build(n, edges, [0] * n)
    avail = max_distinct_neighbors(draft)
    req = []
    for v in range(n):
        r = rng.randint(0, spec.k_max)
        if spec.bipartite and v < n // 2:
            r = 0
        req.append(min(r, avail[v]))
    return Instance.build(n, edges, req)


def dumps(inst: Instance, spec: GeneratorSpec | None = None) -> str:
    """Canonical JSON (sorted keys), with the generator settings under ``meta``."""
    d = inst.to_dict()
    if spec is not None:
        d["meta"] = spec.to_dict()
    return json.dumps(d, sort_keys=True)
