"""Instance transformations: cost scaling to bounded slope and the bipartite
double cover, each with a map back to the original edge ids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InfeasibleAtThisM, InfeasibleInstance, InputError
from .model import ActivationEdge, EdgeSet, Instance, first_deficient_node, is_feasible


@dataclass(frozen=True)
class ScaledInstance:
    instance: Instance
    alpha: Fraction
    M: object
    removed_edges: frozenset
    id_map: tuple  # scaled edge id -> original edge id
    n: int
    rho: object
    eps: object

    @property
    def slope_bound(self) -> Fraction:
        """Proven ceiling on the scaled slope, ``n(rho+1)/eps``."""
        return self.n * (Fraction(self.rho) + 1) / Fraction(self.eps)


def scale_costs(inst: Instance, M, rho, eps) -> ScaledInstance:
    """Drop edges with an endpoint cost above ``M`` and round the rest to
    integer multiples of ``alpha = eps*M / (n*(rho+1))``, at least 1."""
    if not M > 0:
        raise InputError(f"M must be positive, got {M}")
    if not rho >= 1:
        raise InputError(f"rho must be >= 1, got {rho}")
    if not 0 < eps <= 1:
        raise InputError(f"eps must lie in (0, 1], got {eps}")
    n = inst.node_count
    alpha = Fraction(eps) * Fraction(M) / (n * (Fraction(rho) + 1))

    def rescale(c):
        return max(math.floor(Fraction(c) / alpha), 1)

    kept, removed = [], []
    for e in inst.edges:
        if e.cost_u > M or e.cost_v > M:
            removed.append(e.id)
        else:
            kept.append(e)
    edges = tuple(
        ActivationEdge(i, e.u, e.v, rescale(e.cost_u), rescale(e.cost_v))
        for i, e in enumerate(kept)
    )
    scaled = Instance(n, edges, inst.requirements)
    bad = first_deficient_node(scaled, range(len(edges)))
    if bad is not None:
        raise InfeasibleAtThisM(f"M={M} leaves node {bad} uncoverable", node=bad)
    return ScaledInstance(
        scaled, alpha, M, frozenset(removed), tuple(e.id for e in kept), n, rho, eps
    )


def enumerate_M(inst: Instance) -> list:
    """Powers of two bracketing every possible maximum endpoint cost.

    Starts at 1, or lower when positive costs fall below 1, and stops at the
    first power of two that is at least the largest endpoint cost.
    """
    costs = [c for e in inst.edges for c in (e.cost_u, e.cost_v)]
    top = max(costs, default=0)
    if top == 0:
        return [1]
    low = min(c for c in costs if c > 0)
    start = min(0, math.floor(math.log2(low)))
    stop = math.ceil(math.log2(top))
    out = [2**i if i >= 0 else Fraction(1, 2**-i) for i in range(start, stop + 1)]
    # log2 rounding could leave the largest cost just above the last power
    while out[-1] < top:
        out.append(out[-1] * 2)
    return out


def lift_scaled_solution(scaled: ScaledInstance, J_hat: Iterable[int]) -> EdgeSet:
    J_hat = scaled.instance.check_edge_set(J_hat)
    return frozenset(scaled.id_map[i] for i in J_hat)


@dataclass(frozen=True)
class BipartiteInstance:
    """Double cover of an instance.

    Nodes ``0..b_count-1`` form side B (the original nodes, carrying the
    requirements); nodes ``b_count..b_count+a_count-1`` form side A (the
    copies, no requirements). Every edge has ``u`` in A and ``v`` in B.
    """

    instance: Instance
    a_count: int
    b_count: int
    origin: tuple  # bipartite edge id -> original edge id

    def __post_init__(self):
        inst = self.instance
        if inst.node_count != self.a_count + self.b_count:
            raise InputError("side sizes do not add up to the node count")
        if len(self.origin) != inst.edge_count:
            raise InputError("origin map length differs from the edge count")
        for e in inst.edges:
            if not (e.u >= self.b_count and e.v < self.b_count):
                raise InputError(f"edge {e.id} does not run from side A to side B")
        if any(inst.requirements[self.b_count:]):
            raise InputError("nodes on side A must have zero requirement")

    @property
    def edges(self) -> tuple:
        return self.instance.edges

    @property
    def requirements(self) -> tuple:
        return self.instance.requirements[: self.b_count]

    @property
    def side_a(self) -> range:
        return range(self.b_count, self.b_count + self.a_count)

    @property
    def side_b(self) -> range:
        return range(self.b_count)

    def to_dict(self) -> dict:
        d = self.instance.to_dict()
        d["sides"] = {"A": list(self.side_a), "B": list(self.side_b)}
        d["origin"] = list(self.origin)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "BipartiteInstance":
        inst = Instance.from_dict(data)
        try:
            a, b = data["sides"]["A"], data["sides"]["B"]
            origin = data["origin"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bipartite JSON is missing field {exc}") from None
        if list(b) != list(range(len(b))) or list(a) != list(range(len(b), len(b) + len(a))):
            raise InputError("side B must be nodes 0..|B|-1 followed by side A")
        return cls(inst, len(a), len(b), tuple(origin))


def bipartite_double_cover(inst: Instance) -> BipartiteInstance:
    """Edge ``uv`` (id i) becomes ``u'v`` (id 2i) and ``v'u`` (id 2i+1),
    where ``x'`` is node ``n + x``; each copy keeps the original cost at
    each original endpoint."""
    n = inst.node_count
    edges = []
    for e in inst.edges:
        edges.append(ActivationEdge(2 * e.id, n + e.u, e.v, e.cost_u, e.cost_v))
        edges.append(ActivationEdge(2 * e.id + 1, n + e.v, e.u, e.cost_v, e.cost_u))
    doubled = Instance(2 * n, tuple(edges), inst.requirements + (0,) * n)
    origin = tuple(e.id for e in inst.edges for _ in range(2))
    return BipartiteInstance(doubled, n, n, origin)


def lift_bipartite_solution(bip: BipartiteInstance, J_bip: Iterable[int]) -> EdgeSet:
    J_bip = bip.instance.check_edge_set(J_bip)
    if not is_feasible(bip.instance, J_bip):
        raise InfeasibleInstance("cannot lift an edge set that does not cover side B")
    return frozenset(bip.origin[i] for i in J_bip)


def two_copy_image(inst: Instance, J: Iterable[int]) -> EdgeSet:
    """Both bipartite copies of every edge in ``J``."""
    return frozenset(i for eid in inst.check_edge_set(J) for i in (2 * eid, 2 * eid + 1))
