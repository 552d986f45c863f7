"""Weighted digraph model of a locally constant potential.

A depth-m table on a transitive shift becomes a de Bruijn style digraph whose
vertices are the admissible (m-1)-words and whose edges are the admissible
m-words, weighted by the table.  The maximizing constant is the maximum cycle
mean of this graph; walk-cost closures at a level gamma (edge cost
gamma - weight) drive everything downstream.

Graphs are immutable after build; all algorithms here are exact over
Fractions and deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .extended import MINUS_INF, PLUS_INF, ActionValue
from .potential import LocallyConstantTable, Potential
from .shift import PeriodicOrbit, ShiftSpace, Word

WALKS_GE1 = ">=1"
WALKS_GE0 = ">=0"


@dataclass(frozen=True)
class TransferEdge:
    src: int
    dst: int
    word: Word
    weight: Fraction


class TransferGraph:
    """Vertices: admissible (depth-1)-words; edges: admissible depth-words."""

    def __init__(self, shift: ShiftSpace, table: LocallyConstantTable):
        shift.require_transitive()
        depth = max(table.depth, 2)
        lifted = table.lifted(depth)
        self.shift = shift
        self.depth = depth
        self.table = lifted
        self.vertices: tuple[Word, ...] = shift.admissible_words(depth - 1)
        self.vertex_index = {w: i for i, w in enumerate(self.vertices)}
        edges = []
        for w in shift.admissible_words(depth):
            edges.append(
                TransferEdge(
                    self.vertex_index[w[:-1]],
                    self.vertex_index[w[1:]],
                    w,
                    lifted.value_at_word(w),
                )
            )
        self.edges: tuple[TransferEdge, ...] = tuple(edges)
        out: list[list[TransferEdge]] = [[] for _ in self.vertices]
        into: list[list[TransferEdge]] = [[] for _ in self.vertices]
        for e in self.edges:
            out[e.src].append(e)
            into[e.dst].append(e)
        self.out_edges = tuple(tuple(sorted(es, key=lambda e: e.word)) for es in out)
        self.in_edges = tuple(tuple(sorted(es, key=lambda e: e.word)) for es in into)
        if not self.edges:
            raise PreconditionError("transfer graph has no edges")

    @property
    def size(self) -> int:
        return len(self.vertices)

    def start_vertices(self, prefix: Word) -> tuple[int, ...]:
        """Vertices whose word begins with the given prefix (all when empty)."""
        k = len(prefix)
        return tuple(i for i, w in enumerate(self.vertices) if w[:k] == prefix)

    def spelled_orbit(self, vertex_cycle: list[int]) -> PeriodicOrbit:
        """The periodic orbit traced by a closed vertex walk (first letters)."""
        cyc = tuple(self.vertices[v][0] for v in vertex_cycle)
        return PeriodicOrbit.from_cycle(self.shift, cyc)


def build(shift: ShiftSpace, potential) -> TransferGraph:
    """Build the transfer graph of a table potential (lifted to depth >= 2)."""
    if isinstance(potential, LocallyConstantTable):
        table = potential
    else:
        table = potential.as_table()
        if table is None:
            raise PreconditionError("only locally constant potentials have a transfer graph")
    return TransferGraph(shift, table)


# -- maximum mean cycle ------------------------------------------------------

def _max_walk_tables(graph: TransferGraph, length: int) -> list[list[list[Fraction | None]]]:
    """dp[k][u][v] = largest weight of a u-to-v walk of exactly k edges."""
    n = graph.size
    ident: list[list[Fraction | None]] = [
        [Fraction(0) if i == j else None for j in range(n)] for i in range(n)
    ]
    tables = [ident]
    for _ in range(length):
        prev = tables[-1]
        nxt: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
        for u in range(n):
            row = prev[u]
            for mid in range(n):
                base = row[mid]
                if base is None:
                    continue
                for e in graph.out_edges[mid]:
                    cand = base + e.weight
                    cur = nxt[u][e.dst]
                    if cur is None or cand > cur:
                        nxt[u][e.dst] = cand
        tables.append(nxt)
    return tables


def _reconstruct_max_walk(graph, tables, start: int, length: int, total: Fraction) -> list[int]:
    """Lexicographically least (by edge word) closed walk of the given length
    and weight from ``start``; assumes one exists."""
    walk = [start]
    cur = start
    remaining = length
    needed = total
    while remaining > 0:
        for e in graph.out_edges[cur]:
            rest = tables[remaining - 1][e.dst][start]
            if rest is not None and e.weight + rest == needed:
                needed -= e.weight
                cur = e.dst
                if remaining > 1:
                    walk.append(cur)
                break
        else:
            raise AssertionError("walk reconstruction lost the optimum")
        remaining -= 1
    return walk


def max_mean_cycle(graph: TransferGraph) -> tuple[Fraction, PeriodicOrbit]:
    """Karp's dynamic program for the maximum cycle mean, with a witness cycle.

    Ties are broken deterministically: shortest witness first, then the
    lexicographically least spelled cycle.
    """
    n = graph.size
    # Karp: walks of exact length k from a fixed source.
    best: list[list[Fraction | None]] = [[None] * n for _ in range(n + 1)]
    best[0][0] = Fraction(0)
    for k in range(1, n + 1):
        for e in graph.edges:
            base = best[k - 1][e.src]
            if base is None:
                continue
            cand = base + e.weight
            cur = best[k][e.dst]
            if cur is None or cand > cur:
                best[k][e.dst] = cand
    beta: Fraction | None = None
    for v in range(n):
        top = best[n][v]
        if top is None:
            continue
        ratios = [
            (top - best[k][v]) / (n - k)
            for k in range(n)
            if best[k][v] is not None
        ]
        if ratios:
            cand = min(ratios)
            if beta is None or cand > beta:
                beta = cand
    if beta is None:
        raise PreconditionError("graph has no cycle reachable from the first vertex")

    tables = _max_walk_tables(graph, n)
    for length in range(1, n + 1):
        target = length * beta
        spelled = []
        for v in range(n):
            if tables[length][v][v] == target:
                walk = _reconstruct_max_walk(graph, tables, v, length, target)
                spelled.append(graph.spelled_orbit(walk))
        if spelled:
            witness = min(spelled, key=lambda o: o.representative.cycle)
            return beta, witness
    raise AssertionError("no cycle attains the maximum mean")


# -- negative cycle detection -------------------------------------------------

def has_negative_cycle(
    graph: TransferGraph, gamma: Fraction
) -> tuple[bool, PeriodicOrbit | None]:
    """Bellman-Ford relaxation with edge cost gamma - weight; exact.

    True (with a witness cycle) exactly when some cycle has negative total
    cost, i.e. when gamma is below the maximum cycle mean.
    """
    gamma = Fraction(gamma)
    n = graph.size
    dist = [Fraction(0)] * n
    pred: list[TransferEdge | None] = [None] * n
    flagged = None
    for round_ in range(n + 1):
        changed = False
        for e in graph.edges:
            cand = dist[e.src] + (gamma - e.weight)
            if cand < dist[e.dst]:
                dist[e.dst] = cand
                pred[e.dst] = e
                changed = True
                if round_ == n:
                    flagged = e.dst
        if not changed:
            return False, None
        if flagged is not None:
            break
    # walk back n steps to land inside a negative cycle, then cut it out
    v = flagged
    for _ in range(n):
        v = pred[v].src
    cycle_vertices = [v]
    u = pred[v].src
    while u != v:
        cycle_vertices.append(u)
        u = pred[u].src
    cycle_vertices.reverse()
    cost = sum(
        gamma - pred[cycle_vertices[(i + 1) % len(cycle_vertices)]].weight
        for i in range(len(cycle_vertices))
    )
    if cost >= 0:
        raise AssertionError("negative-cycle witness has nonnegative cost")
    return True, graph.spelled_orbit(cycle_vertices)


# -- critical value by bisection ----------------------------------------------

def critical_value_bisect(graph: TransferGraph) -> Fraction:
    """Recover the maximum cycle mean as the threshold of negative-cycle
    existence.

    Cycle means, once edge weights are scaled to integers, are rationals with
    denominator at most |V|; two distinct candidates differ by at least
    1/|V|^2, so plain bisection pins the threshold down to a unique candidate
    which is then read off exactly.
    """
    n = graph.size
    scale = math.lcm(*(e.weight.denominator for e in graph.edges))
    weights = [e.weight * scale for e in graph.edges]

    def negative(scaled_gamma: Fraction) -> bool:
        return has_negative_cycle(graph, scaled_gamma / scale)[0]

    lo = min(weights) - 1
    hi = max(weights)
    if negative(hi):
        raise AssertionError("maximum weight must dominate every cycle mean")
    lo = Fraction(lo)
    hi = Fraction(hi)
    gap = Fraction(1, n * n)
    while hi - lo >= gap:
        mid = (lo + hi) / 2
        if negative(mid):
            lo = mid
        else:
            hi = mid
    # the unique rational with denominator <= n in (lo, hi]
    found = []
    for q in range(1, n + 1):
        p = math.floor(hi * q)
        cand = Fraction(p, q)
        if lo < cand <= hi:
            found.append(cand)
    values = set(found)
    if len(values) != 1:
        raise AssertionError(f"bisection interval holds {len(values)} candidates")
    return values.pop() / scale


# -- walk-cost closures --------------------------------------------------------

@dataclass(frozen=True)
class CostMatrix:
    """Minimal walk costs (edge cost = gamma - weight) between all vertex
    pairs, over walks of length >= 1 or >= 0.  When gamma sits below the
    maximum cycle mean the closure diverges and every entry is -inf."""

    vertices: tuple[Word, ...]
    gamma: Fraction
    length_class: str
    entries: tuple[tuple[ActionValue, ...], ...]
    diverged: bool = False

    def entry(self, i: int, j: int) -> ActionValue:
        return self.entries[i][j]

    def to_csv(self) -> str:
        def label(w: Word) -> str:
            return "".join(map(str, w))

        lines = ["," + ",".join(label(w) for w in self.vertices)]
        for w, row in zip(self.vertices, self.entries):
            lines.append(label(w) + "," + ",".join(v.serialize() for v in row))
        return "\n".join(lines) + "\n"


def _min_closure_raw(graph: TransferGraph, gamma: Fraction) -> list[list[Fraction | None]]:
    """Min cost over walks of length >= 1, as plain Fractions (None = +inf).
    Only valid when no cycle has negative cost."""
    n = graph.size
    step: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for e in graph.edges:
        cost = gamma - e.weight
        cur = step[e.src][e.dst]
        if cur is None or cost < cur:
            step[e.src][e.dst] = cost
    power = [row[:] for row in step]
    closure = [row[:] for row in step]
    for _ in range(n - 1):
        nxt: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
        for u in range(n):
            for mid in range(n):
                base = power[u][mid]
                if base is None:
                    continue
                srow = step[mid]
                for v in range(n):
                    add = srow[v]
                    if add is None:
                        continue
                    cand = base + add
                    if nxt[u][v] is None or cand < nxt[u][v]:
                        nxt[u][v] = cand
        power = nxt
        for u in range(n):
            for v in range(n):
                cand = power[u][v]
                if cand is not None and (closure[u][v] is None or cand < closure[u][v]):
                    closure[u][v] = cand
    return closure


def min_walk_closure(graph: TransferGraph, gamma, length_class: str = WALKS_GE1) -> CostMatrix:
    """Entrywise minimum of walk costs in the stated length class.

    Detects divergence (a negative-cost cycle) first and returns an all -inf
    matrix flagged ``diverged`` in that case.
    """
    gamma = Fraction(gamma)
    if length_class not in (WALKS_GE0, WALKS_GE1):
        raise ValueError(f"unknown length class {length_class!r}")
    n = graph.size
    negative, _ = has_negative_cycle(graph, gamma)
    if negative:
        row = tuple(MINUS_INF for _ in range(n))
        return CostMatrix(graph.vertices, gamma, length_class, tuple(row for _ in range(n)), True)
    closure = _min_closure_raw(graph, gamma)
    if length_class == WALKS_GE0:
        for i in range(n):
            if closure[i][i] is None or closure[i][i] > 0:
                closure[i][i] = Fraction(0)
    entries = tuple(
        tuple(PLUS_INF if v is None else ActionValue.finite(v) for v in row) for row in closure
    )
    return CostMatrix(graph.vertices, gamma, length_class, entries, False)
