"""Aubry sets of locally constant potentials, sub-actions and contact loci.

At the critical level the zero-cost closed walks of the transfer graph form a
subgraph (a disjoint union of strongly connected pieces); the infinite edge
paths of that subgraph realize the Aubry set of the potential.  Sub-actions
are rows of the walk-cost closure; the one generated by an Aubry point x is
the map y -> mane_potential(x, y).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .action import ActionEngine
from .errors import PreconditionError
from .potential import LocallyConstantTable, Potential
from .shift import EventuallyPeriodicPoint, PeriodicOrbit, Word


def as_engine(potential_or_engine) -> ActionEngine:
    if isinstance(potential_or_engine, ActionEngine):
        return potential_or_engine
    return ActionEngine(potential_or_engine)


@dataclass(frozen=True)
class AubrySubgraph:
    """Edges lying on zero-cost closed walks at the critical level, plus the
    partition of their endpoints into mutual-zero-cost classes."""

    beta: Fraction
    edge_words: frozenset[Word]
    classes: tuple[frozenset[Word], ...]

    @property
    def vertex_words(self) -> frozenset[Word]:
        out = set()
        for cls in self.classes:
            out |= cls
        return frozenset(out)

    def contains_periodic_orbit(self, orbit: PeriodicOrbit, depth: int) -> bool:
        """True when the orbit's cyclic edge path stays inside the subgraph."""
        x = orbit.representative
        p = orbit.period
        return all(
            tuple(x.letter(t + j) for j in range(depth)) in self.edge_words for t in range(p)
        )

    def distance_to(self, z: EventuallyPeriodicPoint, depth: int) -> Fraction:
        """Exact distance from z to the set of infinite subgraph paths."""
        lam = z.shift.lam
        horizon = z.preperiod_length + z.period + depth
        for t in range(horizon):
            w = tuple(z.letter(t + j) for j in range(depth))
            if w not in self.edge_words:
                # longest spellable prefix ends inside this window
                best = t + depth - 1
                while best >= 0 and not any(
                    e[: min(best, depth)] == tuple(z.letter(j) for j in range(min(best, depth)))
                    for e in self.edge_words
                ):
                    best -= 1
                return lam ** self._agreement_depth(z)
        return Fraction(0)

    def _agreement_depth(self, z: EventuallyPeriodicPoint) -> int:
        """Largest j such that some infinite subgraph path matches z's first j
        letters (every subgraph edge extends to such a path)."""
        depth = len(next(iter(self.edge_words)))
        # frontier: subgraph vertices (edge prefixes) compatible with z so far
        frontier = {e for e in self.edge_words if e[0] == z.letter(0)}
        if not frontier:
            return 0
        j = 1
        horizon = z.preperiod_length + z.period + depth + 1
        while j < horizon:
            letter = z.letter(j)
            nxt = set()
            for e in frontier:
                if j < depth:
                    if e[j] == letter:
                        nxt.add(e)
                else:
                    tail = e[1:] + (letter,)
                    if tail in self.edge_words:
                        nxt.add(tail)
            if not nxt:
                return j
            frontier = nxt
            j += 1
        return j  # periodic structure repeats from here on, so z is in the set


def aubry_subgraph(potential_or_engine) -> AubrySubgraph:
    """Tight edges (cost + return closure = 0) and their classes."""
    engine = as_engine(potential_or_engine)
    g = engine.graph
    beta = engine.beta
    closure = engine.closure(beta)
    edges = set()
    for e in g.edges:
        back = closure[e.dst][e.src]
        if back is not None and (beta - e.weight) + back == 0:
            edges.add(e.word)
    critical = sorted(
        i
        for i in range(g.size)
        if any(w[:-1] == g.vertices[i] for w in edges)
    )
    classes: list[list[int]] = []
    for v in critical:
        placed = False
        for cls in classes:
            u = cls[0]
            duv, dvu = closure[u][v], closure[v][u]
            if duv is not None and dvu is not None and duv + dvu == 0:
                cls.append(v)
                placed = True
                break
        if not placed:
            classes.append([v])
    class_words = tuple(
        frozenset(g.vertices[v] for v in cls) for cls in classes
    )
    return AubrySubgraph(beta, frozenset(edges), class_words)


def is_aubry_point(potential_or_engine, x: EventuallyPeriodicPoint) -> bool:
    """A point is Aubry exactly when its self Mane potential at the critical
    level vanishes."""
    engine = as_engine(potential_or_engine)
    value = engine.mane_potential(engine.beta, x, x)
    return value.is_finite and value.value == 0


@dataclass(frozen=True)
class SubAction:
    """A locally constant function u with  A + u(shift .) - u <= beta  edgewise."""

    table: LocallyConstantTable
    base_point: EventuallyPeriodicPoint | None = None

    @property
    def depth(self) -> int:
        return self.table.depth

    def value_at_word(self, w: Word) -> Fraction:
        return self.table.value_at_word(w)

    def value_at_point(self, x: EventuallyPeriodicPoint) -> Fraction:
        return self.table.value_at_point(x)

    def variation(self, ell: int) -> Fraction:
        return self.table.variation(ell)


def _vertex_values_to_subaction(engine: ActionEngine, values, base_point=None) -> SubAction:
    g = engine.graph
    table_vals = {}
    for w in engine.shift.admissible_words(g.depth):
        table_vals[w] = values[g.vertex_index[w[:-1]]]
    return SubAction(LocallyConstantTable(engine.shift, g.depth, table_vals), base_point)


def sub_action_from_point(potential_or_engine, x: EventuallyPeriodicPoint) -> SubAction:
    """The sub-action y -> mane_potential(x, y) of an Aubry point x, realized
    on the graph as shadow cost plus a closure row.

    Raises when x is not an Aubry point (the map would take +inf values)."""
    engine = as_engine(potential_or_engine)
    if not is_aubry_point(engine, x):
        raise PreconditionError("sub-actions are generated by Aubry points only")
    beta = engine.beta
    start = x.preperiod_length
    base = engine._shadow_cost(x, start, beta)
    row = engine.closure(beta)[engine._vertex_at(x, start)]
    values = []
    for v in range(engine.graph.size):
        tail = row[v]
        if tail is None:
            raise PreconditionError("sub-action would be infinite somewhere")
        values.append(base + tail)
    return _vertex_values_to_subaction(engine, values, x)


def maxplus_reference_subaction(potential_or_engine) -> SubAction:
    """Closure row from the least critical vertex; used to cross-check the
    point-generated sub-actions up to additive constants per class."""
    engine = as_engine(potential_or_engine)
    sub = aubry_subgraph(engine)
    g = engine.graph
    critical = sorted(sub.vertex_words)
    if not critical:
        raise PreconditionError("empty critical set")
    z = g.vertex_index[critical[0]]
    row = engine.closure(engine.beta)[z]
    values = []
    for v in range(g.size):
        tail = row[v]
        if tail is None:
            raise PreconditionError("reference sub-action would be infinite somewhere")
        values.append(tail)
    return _vertex_values_to_subaction(engine, values, None)


def subaction_defects(engine: ActionEngine, u: SubAction) -> dict[Word, Fraction]:
    """Edgewise value of  A + u(shift .) - u - beta  on a graph deep enough to
    make the expression locally constant per edge."""
    reduced = u.table.reduced()
    from .graph import build

    depth = max(engine.graph.depth, reduced.depth + 1)
    graph = build(engine.shift, engine.table.lifted(max(engine.table.depth, depth)))
    out = {}
    for e in graph.edges:
        head = reduced.value_at_word(e.word[1:])
        tail = reduced.value_at_word(e.word[:-1])
        out[e.word] = e.weight + head - tail - engine.beta
    return out


def is_sub_action(potential_or_engine, u: SubAction) -> bool:
    engine = as_engine(potential_or_engine)
    return all(d <= 0 for d in subaction_defects(engine, u).values())


@dataclass(frozen=True)
class ContactLocus:
    """Edges where the sub-action inequality is tight."""

    edge_words: frozenset[Word]


def contact_locus(potential_or_engine, u: SubAction) -> ContactLocus:
    engine = as_engine(potential_or_engine)
    defects = subaction_defects(engine, u)
    if any(d > 0 for d in defects.values()):
        raise PreconditionError("input function violates the sub-action inequality")
    return ContactLocus(frozenset(w for w, d in defects.items() if d == 0))


def default_base_point(potential_or_engine) -> EventuallyPeriodicPoint:
    """Deterministic Aubry base point: the shortest zero-cost cycle through
    the least critical vertex, spelled from that vertex, ties broken by the
    lexicographically least spelled word."""
    engine = as_engine(potential_or_engine)
    sub = aubry_subgraph(engine)
    g = engine.graph
    z = g.vertex_index[sorted(sub.vertex_words)[0]]
    allowed = sub.edge_words
    n = g.size
    # reach[j][u][v]: a length-j path u -> v inside the subgraph exists
    ident = [[u == v for v in range(n)] for u in range(n)]
    reach = [ident]
    for _ in range(n):
        prev = reach[-1]
        nxt = [[False] * n for _ in range(n)]
        for u in range(n):
            for e in g.out_edges[u]:
                if e.word not in allowed:
                    continue
                for v in range(n):
                    if prev[e.dst][v]:
                        nxt[u][v] = True
        reach.append(nxt)
    for length in range(1, n + 1):
        if not reach[length][z][z]:
            continue
        cur, letters = z, []
        remaining = length
        while remaining > 0:
            for e in g.out_edges[cur]:
                if e.word in allowed and reach[remaining - 1][e.dst][z]:
                    letters.append(g.vertices[cur][0])
                    cur = e.dst
                    break
            else:
                raise AssertionError("subgraph cycle reconstruction failed")
            remaining -= 1
        return EventuallyPeriodicPoint(engine.shift, (), tuple(letters))
    raise AssertionError("critical vertex lies on no subgraph cycle")
