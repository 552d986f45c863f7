"""Potentials: exact rational functionals on a shift space.

A potential is a rational linear combination of
  * locally constant tables (value determined by the first m letters),
  * distance-to-a-periodic-orbit terms,
  * coboundaries u(shifted x) - u(x) of locally constant tables,
plus a constant offset.  Every term evaluates exactly on eventually periodic
points, and variation / supremum bounds are exact for pure table combinations
and certified upper bounds otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import PreconditionError
from .shift import (
    EventuallyPeriodicPoint,
    PeriodicOrbit,
    ShiftSpace,
    Word,
    orbit_distance,
    word,
)


class VariationBound(NamedTuple):
    value: Fraction
    exact: bool


class NormBound(NamedTuple):
    value: Fraction
    exact: bool


class LocallyConstantTable:
    """A depth-m locally constant function, tabulated on all admissible m-words."""

    def __init__(self, shift: ShiftSpace, depth: int, values):
        if depth < 1:
            raise ValueError("table depth must be >= 1")
        expected = set(shift.admissible_words(depth))
        table = {word(k): Fraction(v) for k, v in dict(values).items()}
        if set(table) != expected:
            missing = sorted(expected - set(table))[:3]
            extra = sorted(set(table) - expected)[:3]
            raise ValueError(
                f"table must cover exactly the admissible {depth}-words"
                f" (missing {missing}, extra {extra})"
            )
        self.shift = shift
        self.depth = depth
        self._values = table

    @property
    def values(self) -> dict[Word, Fraction]:
        return dict(self._values)

    def value_at_word(self, w: Word) -> Fraction:
        key = tuple(w[: self.depth])
        try:
            return self._values[key]
        except KeyError:
            raise PreconditionError(f"prefix {key} is not an admissible word of this table")

    def value_at_point(self, x: EventuallyPeriodicPoint) -> Fraction:
        return self.value_at_word(x.prefix(self.depth))

    def lifted(self, depth: int) -> "LocallyConstantTable":
        """Re-tabulate at a larger depth; values are unchanged as a function."""
        if depth < self.depth:
            raise ValueError("can only lift to a depth >= the current one")
        if depth == self.depth:
            return self
        vals = {w: self._values[w[: self.depth]] for w in self.shift.admissible_words(depth)}
        return LocallyConstantTable(self.shift, depth, vals)

    def reduced(self) -> "LocallyConstantTable":
        """Drop trailing depth while the function does not depend on it."""
        table = self
        while table.depth > 1:
            groups: dict[Word, Fraction] = {}
            ok = True
            for w, v in table._values.items():
                head = w[:-1]
                if groups.setdefault(head, v) != v:
                    ok = False
                    break
            if not ok:
                break
            table = LocallyConstantTable(table.shift, table.depth - 1, groups)
        return table

    def variation(self, ell: int) -> Fraction:
        """Exact ell-th variation: the largest value spread over admissible
        depth words sharing an ell-prefix (0 once ell reaches the depth)."""
        if ell < 0:
            raise ValueError("variation index must be >= 0")
        if ell >= self.depth:
            return Fraction(0)
        groups: dict[Word, list[Fraction]] = {}
        for w, v in self._values.items():
            groups.setdefault(w[:ell], []).append(v)
        return max(max(vs) - min(vs) for vs in groups.values())

    def variation_tail(self, ell: int) -> Fraction:
        """Sum of variations from ell on; finite because depth is finite."""
        return sum((self.variation(j) for j in range(ell, self.depth)), Fraction(0))

    def sup_abs(self) -> Fraction:
        return max(abs(v) for v in self._values.values())

    def scaled(self, c) -> "LocallyConstantTable":
        c = Fraction(c)
        return LocallyConstantTable(
            self.shift, self.depth, {w: c * v for w, v in self._values.items()}
        )

    def plus_constant(self, c) -> "LocallyConstantTable":
        c = Fraction(c)
        return LocallyConstantTable(
            self.shift, self.depth, {w: v + c for w, v in self._values.items()}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LocallyConstantTable)
            and self.shift == other.shift
            and self.depth == other.depth
            and self._values == other._values
        )

    def __repr__(self) -> str:
        return f"Table(depth={self.depth}, {len(self._values)} words)"


class DistanceToOrbit:
    """The map x -> distance(orbit, x); 1-Lipschitz for the ultrametric, so its
    ell-th variation is at most lam ** ell."""

    def __init__(self, orbit: PeriodicOrbit):
        self.orbit = orbit
        self.shift = orbit.shift

    def value_at_point(self, x: EventuallyPeriodicPoint) -> Fraction:
        return orbit_distance(self.orbit, x)

    def __eq__(self, other) -> bool:
        return isinstance(other, DistanceToOrbit) and self.orbit == other.orbit

    def __repr__(self) -> str:
        return f"DistanceToOrbit({self.orbit!r})"


class CoboundaryOf:
    """The coboundary u(shifted x) - u(x) of a locally constant table u.
    It integrates to zero against every invariant measure."""

    def __init__(self, table: LocallyConstantTable):
        self.table = table
        self.shift = table.shift

    def value_at_point(self, x: EventuallyPeriodicPoint) -> Fraction:
        return self.table.value_at_point(x.shifted()) - self.table.value_at_point(x)

    def expanded(self) -> LocallyConstantTable:
        """The coboundary as a depth (m+1) table."""
        d = self.table.depth + 1
        vals = {
            w: self.table.value_at_word(w[1:]) - self.table.value_at_word(w[:-1])
            for w in self.shift.admissible_words(d)
        }
        return LocallyConstantTable(self.shift, d, vals)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoboundaryOf) and self.table == other.table

    def __repr__(self) -> str:
        return f"CoboundaryOf({self.table!r})"


Term = LocallyConstantTable | DistanceToOrbit | CoboundaryOf


class Potential:
    """A finite combination coefficient * term + constant offset."""

    def __init__(self, shift: ShiftSpace, terms=(), constant=Fraction(0)):
        self.shift = shift
        checked = []
        for coeff, term in terms:
            if term.shift != shift:
                raise PreconditionError("all terms must live on the same shift space")
            checked.append((Fraction(coeff), term))
        self.terms = tuple(checked)
        self.constant = Fraction(constant)

    @classmethod
    def from_table(cls, table: LocallyConstantTable, coefficient=Fraction(1)) -> "Potential":
        return cls(table.shift, [(Fraction(coefficient), table)])

    @classmethod
    def constant_potential(cls, shift: ShiftSpace, c) -> "Potential":
        return cls(shift, (), Fraction(c))

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x: EventuallyPeriodicPoint) -> Fraction:
        if x.shift != self.shift:
            raise PreconditionError("point belongs to a different shift space")
        total = self.constant
        for coeff, term in self.terms:
            total += coeff * term.value_at_point(x)
        return total

    def birkhoff_sum(self, x: EventuallyPeriodicPoint, n: int) -> Fraction:
        """Sum of the potential along the first n orbit points (0 for n = 0)."""
        if n < 0:
            raise ValueError("Birkhoff sum length must be >= 0")
        total = Fraction(0)
        point = x
        for _ in range(n):
            total += self.evaluate(point)
            point = point.shifted()
        return total

    def orbit_mean(self, orbit: PeriodicOrbit) -> Fraction:
        """Average along one full period; independent of the representative."""
        p = orbit.period
        return self.birkhoff_sum(orbit.representative, p) / p

    # -- structure ----------------------------------------------------------

    def distance_terms(self) -> tuple[tuple[Fraction, DistanceToOrbit], ...]:
        return tuple((c, t) for c, t in self.terms if isinstance(t, DistanceToOrbit))

    @property
    def is_table(self) -> bool:
        return not self.distance_terms()

    def table_part(self) -> LocallyConstantTable:
        """Collapse all table and coboundary terms plus the offset into one
        table (the distance terms are left out)."""
        depth = 1
        pieces: list[tuple[Fraction, LocallyConstantTable]] = []
        for coeff, term in self.terms:
            if isinstance(term, LocallyConstantTable):
                pieces.append((coeff, term))
                depth = max(depth, term.depth)
            elif isinstance(term, CoboundaryOf):
                expanded = term.expanded()
                pieces.append((coeff, expanded))
                depth = max(depth, expanded.depth)
        vals = {}
        for w in self.shift.admissible_words(depth):
            v = self.constant
            for coeff, tab in pieces:
                v += coeff * tab.value_at_word(w)
            vals[w] = v
        return LocallyConstantTable(self.shift, depth, vals).reduced()

    def as_table(self) -> LocallyConstantTable | None:
        """The whole potential as a single table, or None when a distance
        term prevents a finite-depth representation."""
        if not self.is_table:
            return None
        return self.table_part()

    # -- algebra ------------------------------------------------------------

    def plus_term(self, coefficient, term: Term) -> "Potential":
        return Potential(self.shift, list(self.terms) + [(Fraction(coefficient), term)], self.constant)

    def plus_constant(self, c) -> "Potential":
        return Potential(self.shift, self.terms, self.constant + Fraction(c))

    def scaled(self, c) -> "Potential":
        c = Fraction(c)
        return Potential(self.shift, [(c * k, t) for k, t in self.terms], c * self.constant)

    def plus(self, other: "Potential") -> "Potential":
        if other.shift != self.shift:
            raise PreconditionError("potentials live on different shift spaces")
        return Potential(
            self.shift, list(self.terms) + list(other.terms), self.constant + other.constant
        )

    # -- regularity bounds ---------------------------------------------------

    def variation(self, ell: int) -> VariationBound:
        """ell-th variation; exact for pure table combinations, otherwise the
        table part plus lam**ell per unit of distance-term coefficient."""
        if ell < 1:
            raise ValueError("variation index must be >= 1")
        base = self.table_part().variation(ell)
        dist = self.distance_terms()
        if not dist:
            return VariationBound(base, True)
        lam = self.shift.lam
        extra = sum((abs(c) * lam**ell for c, _ in dist), Fraction(0))
        return VariationBound(base + extra, False)

    def variation_tail(self, ell: int) -> Fraction:
        """Upper bound for the summed variations from ell on (exact for pure
        tables, geometric tail for distance terms)."""
        base = self.table_part().variation_tail(ell)
        lam = self.shift.lam
        tail = lam**ell / (1 - lam)
        extra = sum((abs(c) * tail for c, _ in self.distance_terms()), Fraction(0))
        return base + extra

    def sv_norm(self) -> NormBound:
        """Summed variations from 1 plus the sup norm; exact for pure tables."""
        table = self.table_part()
        base = table.variation_tail(1) + table.sup_abs()
        dist = self.distance_terms()
        if not dist:
            return NormBound(base, True)
        lam = self.shift.lam
        per_unit = lam / (1 - lam) + 1
        extra = sum((abs(c) * per_unit for c, _ in dist), Fraction(0))
        return NormBound(base + extra, False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Potential)
            and self.shift == other.shift
            and self.terms == other.terms
            and self.constant == other.constant
        )

    def __repr__(self) -> str:
        return f"Potential({len(self.terms)} terms, offset {self.constant})"


# Spec-level operation aliases kept as plain functions.

def evaluate(potential: Potential, x: EventuallyPeriodicPoint) -> Fraction:
    return potential.evaluate(x)


def birkhoff_sum(potential: Potential, x: EventuallyPeriodicPoint, n: int) -> Fraction:
    return potential.birkhoff_sum(x, n)


def orbit_mean(potential: Potential, orbit: PeriodicOrbit) -> Fraction:
    return potential.orbit_mean(orbit)


def variation(potential: Potential, ell: int) -> VariationBound:
    return potential.variation(ell)


def sv_norm(potential: Potential) -> NormBound:
    return potential.sv_norm()
