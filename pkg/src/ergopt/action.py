"""Action potentials between points: constrained action infima, the Mane
potential and the Peierls barrier, all exact on eventually periodic points.

The constrained action of parameters (gamma, l, k, x, y) is the infimum of
the length-n cost sum (cost = gamma - potential) over orbit segments that
start lam**k-close to x, end lam**k-close to y and have length n >= l.  For a
locally constant potential this is a shortest-walk problem on the transfer
graph with a forced prefix, solved here without any truncation:

  * while the closeness constraint still pins upcoming symbols the walk must
    shadow x (a single forced path),
  * afterwards it roams freely, and the tail infimum is a walk-cost closure.

The k -> infinity limits stabilize for eventually periodic arguments; the
limit values are computed in closed form from the shadow cycle cost and the
closure matrix, and (optionally) re-certified against the finite-k engine at
exactly computed stabilization depths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, VerificationError
from .extended import MINUS_INF, PLUS_INF, ActionValue
from .graph import TransferGraph, build, max_mean_cycle
from .potential import Potential
from .shift import EventuallyPeriodicPoint, PeriodicOrbit

_RawRow = list[Fraction | None]


@dataclass(frozen=True)
class AuxiliaryQuery:
    """Parameters of one constrained action evaluation."""

    gamma: Fraction
    min_steps: int
    depth: int
    x: EventuallyPeriodicPoint
    y: EventuallyPeriodicPoint

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.min_steps < 0 or self.depth < 0:
            raise PreconditionError("query parameters l and k must be >= 0")
        if self.x.shift != self.y.shift:
            raise PreconditionError("query points belong to different shift spaces")


class ActionEngine:
    """Exact evaluator for one locally constant potential on one shift.

    Caches the transfer graph, the maximizing constant and per-gamma walk
    closures, so repeated queries are cheap.  Instances are read-only after
    construction apart from internal caches.
    """

    def __init__(self, potential: Potential, certify: bool = False):
        table = potential.as_table()
        if table is None:
            raise PreconditionError(
                "the exact action engine needs a locally constant potential;"
                " composite potentials are only served by the brute-force module"
            )
        potential.shift.require_transitive()
        self.potential = potential
        self.shift = potential.shift
        self.table = table.reduced()
        self.graph: TransferGraph = build(self.shift, self.table)
        self.certify = certify
        self._beta: Fraction | None = None
        self._beta_witness: PeriodicOrbit | None = None
        self._closures: dict[Fraction, list[_RawRow]] = {}

    # -- cached graph data ----------------------------------------------------

    @property
    def beta(self) -> Fraction:
        if self._beta is None:
            self._beta, self._beta_witness = max_mean_cycle(self.graph)
        return self._beta

    @property
    def beta_witness(self) -> PeriodicOrbit:
        self.beta
        return self._beta_witness

    def closure(self, gamma: Fraction) -> list[_RawRow]:
        """Min cost over walks of length >= 0 at level gamma (gamma >= beta)."""
        gamma = Fraction(gamma)
        cached = self._closures.get(gamma)
        if cached is None:
            from .graph import WALKS_GE0, min_walk_closure

            matrix = min_walk_closure(self.graph, gamma, WALKS_GE0)
            if matrix.diverged:
                raise PreconditionError("walk closure diverges below the critical value")
            cached = [[None if v.is_plus_inf else v.value for v in row] for row in matrix.entries]
            self._closures[gamma] = cached
        return cached

    def diverges(self, gamma: Fraction) -> bool:
        return Fraction(gamma) < self.beta

    # -- shadow bookkeeping ----------------------------------------------------

    def _edge_cost_along(self, x: EventuallyPeriodicPoint, i: int, gamma: Fraction) -> Fraction:
        w = tuple(x.letter(i + j) for j in range(self.graph.depth))
        return gamma - self.graph.table.value_at_word(w)

    def _shadow_cost(self, x: EventuallyPeriodicPoint, n: int, gamma: Fraction) -> Fraction:
        return sum((self._edge_cost_along(x, i, gamma) for i in range(n)), Fraction(0))

    def _vertex_at(self, x: EventuallyPeriodicPoint, i: int) -> int:
        w = tuple(x.letter(i + j) for j in range(self.graph.depth - 1))
        return self.graph.vertex_index[w]

    def _cycle_cost(self, x: EventuallyPeriodicPoint, gamma: Fraction) -> Fraction:
        """Cost of shadowing one full period of x's repeating tail."""
        tail = x.tail()
        return self._shadow_cost(tail, tail.period, gamma)

    # -- the constrained action -------------------------------------------------

    def auxiliary_action(self, query: AuxiliaryQuery) -> ActionValue:
        """Exact value of the constrained action infimum, in closed form.

        Returns -inf exactly when gamma lies below the maximizing constant
        (and the shift is transitive, so a negative-cost cycle can always be
        inserted into the free segment)."""
        if query.x.shift != self.shift:
            raise PreconditionError("query points live on a different shift space")
        gamma = query.gamma
        if self.diverges(gamma):
            return MINUS_INF
        g = self.graph
        width = g.depth - 1
        x, y, l, k = query.x, query.y, query.min_steps, query.depth
        forced = max(0, k - width)
        horizon = max(forced, l)
        best: Fraction | None = None

        # stop while the x-constraint still pins future symbols: the segment
        # must equal x up to the stop, and x itself must then approach y
        if forced > 0:
            running = Fraction(0)
            for i in range(forced):
                if i >= l and x.shift_by(i).agrees_to_depth(y, k - i):
                    if best is None or running < best:
                        best = running
                running += self._edge_cost_along(x, i, gamma)
            dist: dict[int, Fraction] = {self._vertex_at(x, forced): running}
        else:
            dist = {v: Fraction(0) for v in g.start_vertices(x.prefix(min(k, width)))}

        for _ in range(forced, horizon):
            nxt: dict[int, Fraction] = {}
            for u, du in dist.items():
                for e in g.out_edges[u]:
                    cand = du + (gamma - e.weight)
                    if e.dst not in nxt or cand < nxt[e.dst]:
                        nxt[e.dst] = cand
            dist = nxt

        closure = self.closure(gamma)
        targets = g.start_vertices(y.prefix(min(k, width)))
        for u, du in dist.items():
            row = closure[u]
            for v in targets:
                tail = row[v]
                if tail is None:
                    continue
                cand = du + tail
                if best is None or cand < best:
                    best = cand
        if best is None:
            return PLUS_INF
        return ActionValue.finite(best)

    # -- k -> infinity limits ----------------------------------------------------

    def _orbit_hits(self, x, y, lo: int, hi: int, gamma):
        """(i, shadow cost) for every lo <= i <= hi with shifted x equal to y."""
        hits = []
        running = self._shadow_cost(x, lo, gamma)
        point = x.shift_by(lo)
        for i in range(lo, hi + 1):
            if i >= 1 and point == y:
                hits.append((i, running))
            running += self._edge_cost_along(x, i, gamma)
            point = point.shifted()
        return hits

    def _travel_value(self, x, y, gamma) -> Fraction | None:
        """Stabilized cost of shadowing x forever and then travelling to y's
        cylinder; None encodes +inf (the shadow cost diverges)."""
        if self._cycle_cost(x, gamma) != 0:
            return None
        start = x.preperiod_length
        base = self._shadow_cost(x, start, gamma)
        row = self.closure(gamma)[self._vertex_at(x, start)]
        target = self._vertex_at(y, 0)
        tail = row[target]
        if tail is None:
            return None
        return base + tail

    def mane_potential(self, gamma, x, y) -> ActionValue:
        value, _ = self.mane_with_witness(gamma, x, y)
        return value

    def mane_with_witness(self, gamma, x, y):
        """sup over k of the constrained action at l = 1, with witness data
        for the infinite outcomes."""
        gamma = Fraction(gamma)
        self._check_points(x, y)
        if self.diverges(gamma):
            return MINUS_INF, {"negative_cycle": self.beta_witness}
        hits = self._orbit_hits(x, y, 0, x.preperiod_length + x.period, gamma)
        orbit_best = min((c for i, c in hits if i >= 1), default=None)
        travel = self._travel_value(x, y, gamma)
        value = _min_opt(orbit_best, travel)
        if value is None:
            result = PLUS_INF, {"diverging_shadow": PeriodicOrbit.of(x.tail())}
        else:
            result = ActionValue.finite(value), {}
        if self.certify:
            self._certify_limit(gamma, 1, x, y, result[0])
        return result

    def peierls_barrier(self, gamma, x, y) -> ActionValue:
        value, _ = self.peierls_with_witness(gamma, x, y)
        return value

    def peierls_with_witness(self, gamma, x, y):
        """sup over k and over l of the constrained action: only orbit hits
        that recur (those inside x's repeating tail) survive the l limit."""
        gamma = Fraction(gamma)
        self._check_points(x, y)
        if self.diverges(gamma):
            return MINUS_INF, {"negative_cycle": self.beta_witness}
        recurring = None
        if self._cycle_cost(x, gamma) == 0:
            pre = x.preperiod_length
            hits = self._orbit_hits(x, y, pre + 1, pre + x.period, gamma)
            recurring = min((c for _, c in hits), default=None)
        travel = self._travel_value(x, y, gamma)
        value = _min_opt(recurring, travel)
        if value is None:
            result = PLUS_INF, {"diverging_shadow": PeriodicOrbit.of(x.tail())}
        else:
            result = ActionValue.finite(value), {}
        if self.certify:
            min_steps = x.preperiod_length + 1
            self._certify_limit(gamma, min_steps, x, y, result[0])
        return result

    # -- stabilization certificates ----------------------------------------------

    def _stable_depth(self, x, y, min_steps: int, gamma) -> int:
        """A depth past which the finite-depth action equals its limit.

        Beyond this depth every near-hit of y along x's orbit is an exact hit,
        the forced shadow has entered x's repeating tail, and (for a positive
        shadow cycle cost) the shadow cost alone exceeds the limit value."""
        m = self.graph.depth
        pre, p = x.preperiod_length, x.period
        depth = max(pre + m, min_steps + m, m)
        scan = pre + p
        for i in range(1, scan + 1):
            other = x.shift_by(i)
            if other == y:
                continue
            dis = other.first_disagreement(y)
            depth = max(depth, i + dis + 1)
        cyc = self._cycle_cost(x, gamma)
        if cyc > 0:
            hits = self._orbit_hits(x, y, 0, scan, gamma)
            target = min((c for i, c in hits if i >= min_steps), default=None)
            if target is not None:
                closure = self.closure(gamma)
                floor = min(
                    (v for row in closure for v in row if v is not None), default=Fraction(0)
                )
                need = target - floor - self._shadow_cost(x, pre, gamma)
                periods = max(0, math.ceil(need / cyc)) + 1
                depth = max(depth, pre + periods * p + m)
        return depth

    def _certify_limit(self, gamma, min_steps, x, y, claimed: ActionValue):
        """Check the closed-form limit against the finite-depth engine at the
        computed stabilization depth and one full period beyond it."""
        depth = self._stable_depth(x, y, min_steps, gamma)
        for d in (depth, depth + x.period):
            got = self.auxiliary_action(AuxiliaryQuery(gamma, min_steps, d, x, y))
            if claimed.is_finite and got != claimed:
                raise VerificationError(
                    f"stabilization certificate failed at depth {d}:"
                    f" engine {got.serialize()} vs limit {claimed.serialize()}"
                )
            if claimed.is_plus_inf and got.is_minus_inf:
                raise VerificationError("divergent limit claimed on a negative-cycle instance")

    def _check_points(self, x, y):
        if x.shift != self.shift or y.shift != self.shift:
            raise PreconditionError("points live on a different shift space")


def _min_opt(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# -- spec-level operation wrappers ---------------------------------------------

def auxiliary_action(potential: Potential, query: AuxiliaryQuery) -> ActionValue:
    return ActionEngine(potential).auxiliary_action(query)


def mane_potential(potential: Potential, gamma, x, y) -> ActionValue:
    return ActionEngine(potential).mane_potential(gamma, x, y)


def peierls_barrier(potential: Potential, gamma, x, y) -> ActionValue:
    return ActionEngine(potential).peierls_barrier(gamma, x, y)
