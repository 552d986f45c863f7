"""Subshifts of finite type with an ultrametric, and their finitely
represented points.

A shift space is a finite alphabet together with a 0/1 transition matrix and a
rational metric base ``lam`` in (0, 1); the distance between two sequences is
``lam ** first_disagreement``.  Only eventually periodic points (a finite
preperiod word followed by a repeating cycle) are represented: they are dense,
hashable, and every quantity in this package evaluates exactly on them.

All types here are immutable after construction and safe to share between
threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import PreconditionError

Word = tuple[int, ...]


def word(letters) -> Word:
    """Coerce an iterable of letters to a Word tuple."""
    return tuple(int(a) for a in letters)


@dataclass(frozen=True)
class ShiftSpace:
    """A finite-alphabet Markov shift with metric base ``lam``.

    ``transitions[i][j]`` is True when the two-letter word ``i j`` is
    admissible.  Every letter must have at least one successor and one
    predecessor; topological transitivity (strong connectivity of the
    transition digraph) is computed once and stored in ``transitive``.
    """

    alphabet_size: int
    transitions: tuple[tuple[bool, ...], ...]
    lam: Fraction = Fraction(1, 2)
    transitive: bool = field(init=False, compare=False, default=False)

    def __post_init__(self):
        n = self.alphabet_size
        if n < 1:
            raise ValueError("alphabet_size must be positive")
        lam = Fraction(self.lam)
        if not (0 < lam < 1):
            raise ValueError("metric base lam must lie strictly between 0 and 1")
        object.__setattr__(self, "lam", lam)
        rows = tuple(tuple(bool(v) for v in row) for row in self.transitions)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise ValueError("transitions must be an n-by-n matrix")
        object.__setattr__(self, "transitions", rows)
        for i in range(n):
            if not any(rows[i]):
                raise ValueError(f"letter {i} has no outgoing transition")
            if not any(rows[j][i] for j in range(n)):
                raise ValueError(f"letter {i} has no incoming transition")
        object.__setattr__(self, "transitive", self._strongly_connected())

    def _strongly_connected(self) -> bool:
        n = self.alphabet_size

        def sweep(succ):
            seen = {0}
            stack = [0]
            while stack:
                u = stack.pop()
                for v in succ(u):
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            return len(seen) == n

        fwd = sweep(lambda u: (v for v in range(n) if self.transitions[u][v]))
        bwd = sweep(lambda u: (v for v in range(n) if self.transitions[v][u]))
        return fwd and bwd

    @classmethod
    def full(cls, alphabet_size: int, lam=Fraction(1, 2)) -> "ShiftSpace":
        row = tuple(True for _ in range(alphabet_size))
        return cls(alphabet_size, tuple(row for _ in range(alphabet_size)), Fraction(lam))

    @classmethod
    def from_pairs(cls, alphabet_size: int, pairs, lam=Fraction(1, 2)) -> "ShiftSpace":
        rows = [[False] * alphabet_size for _ in range(alphabet_size)]
        for i, j in pairs:
            rows[int(i)][int(j)] = True
        return cls(alphabet_size, tuple(tuple(r) for r in rows), Fraction(lam))

    def allowed(self, i: int, j: int) -> bool:
        return self.transitions[i][j]

    def successors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(self.alphabet_size) if self.transitions[i][j])

    def require_transitive(self):
        if not self.transitive:
            raise PreconditionError("operation requires a topologically transitive shift")

    def is_admissible_word(self, w: Word) -> bool:
        if len(w) == 0:
            return False
        if any(not (0 <= a < self.alphabet_size) for a in w):
            return False
        return all(self.transitions[a][b] for a, b in zip(w, w[1:]))

    def validate_word(self, w: Word, what: str = "word"):
        if len(w) == 0:
            raise ValueError(f"{what} must have length >= 1")
        for a in w:
            if not (0 <= a < self.alphabet_size):
                raise ValueError(f"{what} uses letter {a} outside the alphabet")
        for a, b in zip(w, w[1:]):
            if not self.transitions[a][b]:
                raise ValueError(f"{what} contains the forbidden transition {a}->{b}")

    def admissible_words(self, length: int) -> tuple[Word, ...]:
        return _admissible_words(self, length)


@lru_cache(maxsize=None)
def _admissible_words(shift: ShiftSpace, length: int) -> tuple[Word, ...]:
    if length < 1:
        raise ValueError("word length must be >= 1")
    words = [(a,) for a in range(shift.alphabet_size)]
    for _ in range(length - 1):
        words = [w + (b,) for w in words for b in shift.successors(w[-1])]
    return tuple(sorted(words))


def _primitive_root(cycle: Word) -> Word:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class EventuallyPeriodicPoint:
    """A point of the shift written as preperiod . cycle cycle cycle ...

    Instances are stored in canonical form: the cycle is primitive and the
    preperiod is as short as possible (trailing letters that merely rotate the
    cycle are absorbed).  Two points are equal exactly when their canonical
    forms coincide, so equality, hashing and the metric are all decidable.
    """

    shift: ShiftSpace
    preperiod: Word
    cycle: Word

    def __post_init__(self):
        pre = word(self.preperiod)
        cyc = word(self.cycle)
        if not cyc:
            raise ValueError("cycle must be nonempty")
        seq = pre + cyc + cyc[:1]
        self.shift.validate_word(seq, "point")
        cyc = _primitive_root(cyc)
        pre_l = list(pre)
        # absorbing p...a (c1..ck-1 a)^inf  ==  p... (a c1..ck-1)^inf keeps the
        # sequence fixed while shortening the preperiod
        while pre_l and pre_l[-1] == cyc[-1]:
            pre_l.pop()
            cyc = cyc[-1:] + cyc[:-1]
        object.__setattr__(self, "preperiod", tuple(pre_l))
        object.__setattr__(self, "cycle", cyc)

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def preperiod_length(self) -> int:
        return len(self.preperiod)

    @property
    def is_periodic(self) -> bool:
        return not self.preperiod

    def letter(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.cycle[(i - len(self.preperiod)) % len(self.cycle)]

    def prefix(self, length: int) -> Word:
        return tuple(self.letter(i) for i in range(length))

    def shifted(self) -> "EventuallyPeriodicPoint":
        if self.preperiod:
            return EventuallyPeriodicPoint(self.shift, self.preperiod[1:], self.cycle)
        c = self.cycle
        return EventuallyPeriodicPoint(self.shift, (), c[1:] + c[:1])

    def shift_by(self, n: int) -> "EventuallyPeriodicPoint":
        if n < 0:
            raise ValueError("shift count must be >= 0")
        pre = len(self.preperiod)
        if n <= pre:
            return EventuallyPeriodicPoint(self.shift, self.preperiod[n:], self.cycle)
        r = (n - pre) % len(self.cycle)
        c = self.cycle
        return EventuallyPeriodicPoint(self.shift, (), c[r:] + c[:r])

    def tail(self) -> "EventuallyPeriodicPoint":
        """The purely periodic point reached after the preperiod."""
        return EventuallyPeriodicPoint(self.shift, (), self.cycle)

    def first_disagreement(self, other: "EventuallyPeriodicPoint") -> int | None:
        """Index of the first differing letter, or None when the points are equal."""
        if self.shift != other.shift:
            raise PreconditionError("points belong to different shift spaces")
        bound = max(len(self.preperiod), len(other.preperiod)) + math.lcm(
            len(self.cycle), len(other.cycle)
        )
        for i in range(bound):
            if self.letter(i) != other.letter(i):
                return i
        return None

    def agrees_to_depth(self, other: "EventuallyPeriodicPoint", depth: int) -> bool:
        return all(self.letter(i) == other.letter(i) for i in range(depth))

    def __repr__(self) -> str:
        pre = ",".join(map(str, self.preperiod))
        cyc = ",".join(map(str, self.cycle))
        return f"Point({pre}|{cyc})"


def distance(x: EventuallyPeriodicPoint, y: EventuallyPeriodicPoint) -> Fraction:
    """The ultrametric lam ** (first disagreement); 0 for equal points."""
    ell = x.first_disagreement(y)
    if ell is None:
        return Fraction(0)
    return x.shift.lam ** ell


@dataclass(frozen=True)
class PeriodicOrbit:
    """The full shift-orbit of a periodic point, as a sorted tuple of points."""

    points: tuple[EventuallyPeriodicPoint, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("an orbit has at least one point")
        pts = tuple(sorted(self.points, key=lambda p: p.cycle))
        if any(not p.is_periodic for p in pts):
            raise ValueError("orbit points must be purely periodic")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_cycle(cls, shift: ShiftSpace, cycle) -> "PeriodicOrbit":
        cyc = _primitive_root(word(cycle))
        base = EventuallyPeriodicPoint(shift, (), cyc)
        pts = {base.shift_by(i) for i in range(len(cyc))}
        return cls(tuple(pts))

    @classmethod
    def of(cls, point: EventuallyPeriodicPoint) -> "PeriodicOrbit":
        if not point.is_periodic:
            raise PreconditionError("only periodic points generate orbits")
        return cls.from_cycle(point.shift, point.cycle)

    @property
    def shift(self) -> ShiftSpace:
        return self.points[0].shift

    @property
    def period(self) -> int:
        return len(self.points)

    @property
    def representative(self) -> EventuallyPeriodicPoint:
        return self.points[0]

    def __contains__(self, x: EventuallyPeriodicPoint) -> bool:
        return any(p == x for p in self.points)

    def __repr__(self) -> str:
        return f"Orbit({','.join(map(str, self.representative.cycle))})"


def orbit_distance(orbit: PeriodicOrbit, x: EventuallyPeriodicPoint) -> Fraction:
    """min over orbit points z of distance(z, x); exact."""
    return min(distance(z, x) for z in orbit.points)


def periodic_orbits_up_to(shift: ShiftSpace, max_period: int) -> tuple[PeriodicOrbit, ...]:
    """All periodic orbits of primitive period <= max_period, sorted by
    (period, cycle word of the representative)."""
    seen: dict[Word, PeriodicOrbit] = {}
    for p in range(1, max_period + 1):
        for w in shift.admissible_words(p):
            if not shift.allowed(w[-1], w[0]):
                continue
            if _primitive_root(w) != w:
                continue
            key = min(w[i:] + w[:i] for i in range(p))
            if key not in seen:
                seen[key] = PeriodicOrbit.from_cycle(shift, key)
    return tuple(sorted(seen.values(), key=lambda o: (o.period, o.representative.cycle)))
