"""Activation multigraphs: edges with two endpoint costs, levels, feasibility.

Degrees are counted as the number of *distinct* neighbors, so parallel edges
to the same neighbor never help cover a requirement twice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

from .errors import InputError

Number = Union[int, float, Fraction]
EdgeSet = frozenset  # frozenset[int] of edge ids


def _check_cost(value, what: str) -> Number:
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise InputError(f"{what} must be a number, got {value!r}")
    if isinstance(value, float) and not math.isfinite(value):
        raise InputError(f"{what} must be finite, got {value!r}")
    if value < 0:
        raise InputError(f"{what} must be nonnegative, got {value!r}")
    return value


@dataclass(frozen=True)
class ActivationEdge:
    id: int
    u: int
    v: int
    cost_u: Number
    cost_v: Number

    def __post_init__(self):
        if self.u == self.v:
            raise InputError(f"edge {self.id} is a self-loop at node {self.u}")
        _check_cost(self.cost_u, f"edge {self.id} cost_u")
        _check_cost(self.cost_v, f"edge {self.id} cost_v")

    def cost_at(self, node: int) -> Number:
        if node == self.u:
            return self.cost_u
        if node == self.v:
            return self.cost_v
        raise InputError(f"node {node} is not an endpoint of edge {self.id}")

    def other(self, node: int) -> int:
        return self.v if node == self.u else self.u


@dataclass(frozen=True)
class LevelAssignment:
    levels: tuple
    total: Number

    @classmethod
    def of(cls, levels: Iterable[Number]) -> "LevelAssignment":
        levels = tuple(levels)
        return cls(levels, sum(levels))


@dataclass(frozen=True)
class Instance:
    """A multigraph on nodes ``0..node_count-1`` with degree requirements."""

    node_count: int
    edges: tuple
    requirements: tuple

    def __post_init__(self):
        n = self.node_count
        if not isinstance(n, int) or n < 1:
            raise InputError(f"node_count must be a positive integer, got {n!r}")
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "requirements", tuple(self.requirements))
        if len(self.requirements) != n:
            raise InputError(
                f"requirements has length {len(self.requirements)}, expected {n}"
            )
        for v, r in enumerate(self.requirements):
            if isinstance(r, bool) or not isinstance(r, int) or r < 0:
                raise InputError(f"requirement of node {v} must be a nonnegative int")
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise InputError(f"edge ids must be dense; position {i} holds id {e.id}")
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise InputError(f"edge {i} has an endpoint outside [0, {n})")

    @classmethod
    def build(cls, n: int, edges: Iterable[tuple], requirements: Iterable[int]) -> "Instance":
        """Build from ``(u, v, cost_u, cost_v)`` tuples; ids are positions."""
        return cls(
            n,
            tuple(ActivationEdge(i, u, v, cu, cv) for i, (u, v, cu, cv) in enumerate(edges)),
            tuple(requirements),
        )

    @cached_property
    def incident(self) -> tuple:
        """Edge ids incident to each node."""
        inc = [[] for _ in range(self.node_count)]
        for e in self.edges:
            inc[e.u].append(e.id)
            inc[e.v].append(e.id)
        return tuple(tuple(x) for x in inc)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def check_edge_set(self, J: Iterable[int]) -> EdgeSet:
        J = frozenset(J)
        m = len(self.edges)
        for eid in J:
            if isinstance(eid, bool) or not isinstance(eid, int) or not 0 <= eid < m:
                raise InputError(f"unknown edge id {eid!r}")
        return J

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.node_count,
            "edges": [
                {"u": e.u, "v": e.v, "cu": _json_number(e.cost_u), "cv": _json_number(e.cost_v)}
                for e in self.edges
            ],
            "r": list(self.requirements),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            n = data["n"]
            raw = data["edges"]
            r = data["r"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"instance JSON is missing field {exc}") from None
        edges = []
        for i, item in enumerate(raw):
            try:
                edges.append(ActivationEdge(i, item["u"], item["v"], item["cu"], item["cv"]))
            except (KeyError, TypeError) as exc:
                raise InputError(f"edge {i} is malformed: {exc}") from None
        return cls(n, tuple(edges), tuple(r))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _json_number(x: Number):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def induced_levels(inst: Instance, J: Iterable[int]) -> LevelAssignment:
    """Cheapest levels that activate every edge of ``J``."""
    J = inst.check_edge_set(J)
    levels = [0] * inst.node_count
    for eid in J:
        e = inst.edges[eid]
        if e.cost_u > levels[e.u]:
            levels[e.u] = e.cost_u
        if e.cost_v > levels[e.v]:
            levels[e.v] = e.cost_v
    return LevelAssignment.of(levels)


def activation_cost(inst: Instance, J: Iterable[int]) -> Number:
    return induced_levels(inst, J).total


def neighbor_sets(inst: Instance, J: Iterable[int]) -> list:
    nbrs = [set() for _ in range(inst.node_count)]
    for eid in J:
        e = inst.edges[eid]
        nbrs[e.u].add(e.v)
        nbrs[e.v].add(e.u)
    return nbrs


def coverage_degree(inst: Instance, J: Iterable[int], v: int) -> int:
    """Number of distinct neighbors of ``v`` in the graph ``(V, J)``."""
    if not 0 <= v < inst.node_count:
        raise InputError(f"node {v} out of range")
    J = inst.check_edge_set(J)
    return len({inst.edges[eid].other(v) for eid in inst.incident[v] if eid in J})


def first_deficient_node(inst: Instance, J: Iterable[int]) -> int | None:
    """Smallest node whose requirement ``J`` fails to meet, or None."""
    J = inst.check_edge_set(J)
    nbrs = neighbor_sets(inst, J)
    for v, r in enumerate(inst.requirements):
        if len(nbrs[v]) < r:
            return v
    return None


def is_feasible(inst: Instance, J: Iterable[int]) -> bool:
    return first_deficient_node(inst, J) is None


def edge_slope(cost_u: Number, cost_v: Number):
    hi, lo = max(cost_u, cost_v), min(cost_u, cost_v)
    if hi == 0:
        return Fraction(1)
    if lo == 0:
        return math.inf
    return Fraction(hi) / Fraction(lo)


def slope(inst: Instance):
    """Largest endpoint-cost ratio over all edges.

    Finite values are exact :class:`Fraction`s; an edge that is free at one
    end only gives ``math.inf``. A ``(0, 0)`` edge counts as ratio 1.
    """
    if not inst.edges:
        raise InputError("slope is undefined for an instance without edges")
    return max(edge_slope(e.cost_u, e.cost_v) for e in inst.edges)


def max_requirement(inst: Instance) -> int:
    return max(inst.requirements, default=0)


def max_distinct_neighbors(inst: Instance) -> list:
    return [len(s) for s in neighbor_sets(inst, range(inst.edge_count))]
