"""Privilege predicates as a finite poset with "Public" at the bottom."""

from __future__ import annotations

from collections.abc import Iterable

from .errors import UnknownPredicateError, ValidationError

PUBLIC = "Public"


class PrivilegeLattice:
    """Named predicates ordered by dominance.

    ``dominance`` holds ``(stronger, weaker)`` pairs; ``dominates`` answers from
    the reflexive-transitive closure, which is computed once at construction.
    Every predicate dominates ``Public`` whether or not a pair says so.
    """

    def __init__(self, predicates: Iterable[str], dominance: Iterable[tuple[str, str]] = ()):
        preds = list(dict.fromkeys(predicates))
        if PUBLIC not in preds:
            preds.insert(0, PUBLIC)
        self.predicates: tuple[str, ...] = tuple(preds)
        known = set(preds)
        pairs = []
        for hi, lo in dominance:
            for name in (hi, lo):
                if name not in known:
                    raise UnknownPredicateError(name, "dominance pair")
            pairs.append((hi, lo))
        self.dominance: tuple[tuple[str, str], ...] = tuple(dict.fromkeys(pairs))

        below: dict[str, set[str]] = {p: {p, PUBLIC} for p in preds}
        for hi, lo in self.dominance:
            below[hi].add(lo)
        # closure by fixpoint; lattices are tiny
        changed = True
        while changed:
            changed = False
            for p in preds:
                extra = set().union(*(below[q] for q in below[p])) - below[p]
                if extra:
                    below[p] |= extra
                    changed = True
        for p in preds:
            for q in below[p]:
                if q != p and p in below[q]:
                    raise ValidationError(f"dominance cycle between {p!r} and {q!r}")
        self._below = {p: frozenset(s) for p, s in below.items()}

    def __contains__(self, name: object) -> bool:
        return name in self._below

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrivilegeLattice):
            return NotImplemented
        return set(self.predicates) == set(other.predicates) and self._below == other._below

    def __repr__(self) -> str:
        return f"PrivilegeLattice({list(self.predicates)!r})"

    def check(self, name: str, context: str = "") -> str:
        if name not in self._below:
            raise UnknownPredicateError(name, context)
        return name

    def dominates(self, p: str, q: str) -> bool:
        self.check(p)
        self.check(q)
        return q in self._below[p]

    def strictly_dominates(self, p: str, q: str) -> bool:
        return p != q and self.dominates(p, q)

    def dominated_by(self, p: str) -> frozenset[str]:
        self.check(p)
        return self._below[p]

    def maximal(self, names: Iterable[str]) -> set[str]:
        """Drop every member strictly dominated by another member."""
        pool = set(names)
        return {p for p in pool if not any(self.strictly_dominates(q, p) for q in pool)}


def dominates(lattice: PrivilegeLattice, p: str, q: str) -> bool:
    return lattice.dominates(p, q)
