"""
Lines of Z_n^d, the diagonal maps that label them, and the two placement
verifiers.

Two queens conflict when they lie on a common line parallel to a direction
in {-1,0,1}^d. Each canonical direction corresponds to one diagonal map
x -> (x_1,...,x_{l-1}, x_{l+1}+e_{l+1}x_l, ..., x_d+e_d x_l) whose fibers are
exactly the lines of that family, so a queen set is independent iff every
diagonal map is injective on it.
"""
import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .core import Direction, PreconditionError, enumerate_directions

logger = logging.getLogger(__name__)


# -----------------------------
# Placement
# -----------------------------

@dataclass(frozen=True)
class Placement(object):
    n: int
    d: int
    queens: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError('n must be positive, got {}'.format(self.n))
        if self.d < 1:
            raise PreconditionError('d must be positive, got {}'.format(self.d))

        queens = tuple(tuple(int(c) for c in q) for q in self.queens)
        for q in queens:
            if len(q) != self.d:
                raise PreconditionError('queen {} does not have {} coordinates'.format(list(q), self.d))
            if any(c < 0 or c >= self.n for c in q):
                raise PreconditionError('queen {} has a coordinate outside [0, {})'.format(list(q), self.n))
        if len(set(queens)) != len(queens):
            raise PreconditionError('placement contains duplicate queens')
        object.__setattr__(self, 'queens', queens)

    @classmethod
    def from_points(cls, n, d, points):
        """
        Builds a placement from arbitrary integer coordinates, reducing mod n
        :param n:
        :param d:
        :param points: iterable of coordinate sequences or Points
        :return:
        """
        return cls(n, d, tuple(tuple(c % n for c in p) for p in points))

    @property
    def count(self):
        return len(self.queens)

    def __len__(self):
        return len(self.queens)

    def translate(self, v):
        return Placement.from_points(self.n, self.d, [[a + b for a, b in zip(q, v)] for q in self.queens])

    def scale(self, u):
        return Placement.from_points(self.n, self.d, [[a * u for a in q] for q in self.queens])

    def without(self, index):
        return Placement(self.n, self.d, self.queens[:index] + self.queens[index + 1:])

    def with_queen(self, coords):
        return Placement(self.n, self.d, self.queens + (tuple(c % self.n for c in coords),))

    def sorted(self):
        return Placement(self.n, self.d, tuple(sorted(self.queens)))


# -----------------------------
# Diagonal maps
# -----------------------------

@dataclass(frozen=True, order=True)
class DiagonalMap(object):
    """
    lead is the 0-based index l of the first moving coordinate; e holds
    (e_{l+1}, ..., e_d), one coefficient for every coordinate after it.
    """
    lead: int
    e: Tuple[int, ...]

    @property
    def d(self):
        return self.lead + 1 + len(self.e)

    @classmethod
    def from_direction(cls, direction):
        lead = direction.lead
        return cls(lead, tuple(-eps for eps in direction.eps[lead + 1:]))

    def direction(self):
        return Direction((0,) * self.lead + (1,) + tuple(-e for e in self.e))

    def apply(self, coords, n):
        l = self.lead
        x_l = coords[l]
        head = tuple(coords[:l])
        tail = tuple((x + e * x_l) % n for x, e in zip(coords[l + 1:], self.e))
        return head + tail

    def matrix(self):
        """
        The (d-1) x d integer matrix of the map
        :return:
        """
        d = self.d
        rows = []
        for i in range(self.lead):
            row = [0] * d
            row[i] = 1
            rows.append(row)
        for j, e in enumerate(self.e, start=self.lead + 1):
            row = [0] * d
            row[j] = 1
            row[self.lead] = e
            rows.append(row)
        return np.array(rows, dtype=np.int64).reshape(d - 1, d)

    def __str__(self):
        return 'lead={} e=({})'.format(self.lead + 1, ','.join(str(e) for e in self.e))


@functools.lru_cache(maxsize=None)
def diagonal_maps(d):
    """
    One diagonal map per canonical direction, in the order of enumerate_directions
    :param d:
    :return:
    """
    return tuple(DiagonalMap.from_direction(direction) for direction in enumerate_directions(d))


def apply_diagonal_map(m, p):
    """
    Line label of point p in the family of m
    :param m: DiagonalMap
    :param p: Point
    :return: tuple of d-1 residues
    """
    if m.d != p.d:
        raise PreconditionError('map for dimension {} applied to a point of dimension {}'.format(m.d, p.d))
    return m.apply(p.coords, p.n)


# -----------------------------
# Conflicts
# -----------------------------

def conflict_coords(a, b, n):
    """
    Fast path of conflict() on raw coordinate tuples
    :return: Direction or None
    """
    diff = [(y - x) % n for x, y in zip(a, b)]
    delta = next((c for c in diff if c != 0), None)
    if delta is None:
        raise PreconditionError('a queen cannot conflict with itself: {}'.format(list(a)))

    minus = (-delta) % n
    eps = []
    for c in diff:
        if c == 0:
            eps.append(0)
        elif c == delta:
            eps.append(1)
        elif c == minus:
            eps.append(-1)
        else:
            return None
    return Direction(tuple(eps))


def conflict(p, q):
    """
    Canonical direction of the line through p and q, or None when no line joins them
    :param p: Point
    :param q: Point
    :return:
    """
    if p.n != q.n:
        raise PreconditionError('points on different boards: n={} and n={}'.format(p.n, q.n))
    if p.d != q.d:
        raise PreconditionError('points of different dimension: d={} and d={}'.format(p.d, q.d))
    return conflict_coords(p.coords, q.coords, p.n)


# -----------------------------
# Verification
# -----------------------------

@dataclass(frozen=True)
class VerifyReport(object):
    independent: bool
    conflicts: Tuple[Tuple[int, int, Direction], ...] = ()
    per_family_collisions: Dict[DiagonalMap, int] = field(default_factory=dict)

    def conflict_pairs(self):
        return {(i, j) for i, j, _ in self.conflicts}

    def summary(self):
        if self.independent:
            return 'independent'
        return '{} conflicting pair(s)'.format(len(self.conflicts))


def _family_counts(pl, pairs):
    counts = {m: 0 for m in diagonal_maps(pl.d)}
    for i, j in pairs:
        a, b = pl.queens[i], pl.queens[j]
        for m in counts:
            if m.apply(a, pl.n) == m.apply(b, pl.n):
                counts[m] += 1
    return counts


def _report(pl, pairs):
    pairs = sorted(pairs)
    conflicts = tuple((i, j, conflict_coords(pl.queens[i], pl.queens[j], pl.n)) for i, j in pairs)
    return VerifyReport(
        independent=not conflicts,
        conflicts=conflicts,
        per_family_collisions=_family_counts(pl, pairs),
    )


def verify_pairwise(pl):
    """
    Checks every pair of queens with conflict(); quadratic, used as the oracle
    :param pl: Placement
    :return: VerifyReport
    """
    pairs = []
    for i, j in itertools.combinations(range(pl.count), 2):
        if conflict_coords(pl.queens[i], pl.queens[j], pl.n) is not None:
            pairs.append((i, j))
    return _report(pl, pairs)


def verify_by_maps(pl):
    """
    Projects every queen through each of the (3^d - 1)/2 diagonal maps and looks
    for repeated line labels. This is the default verifier.
    :param pl: Placement
    :return: VerifyReport
    """
    if pl.count < 2:
        return _report(pl, [])

    queens = np.array(pl.queens, dtype=np.int64).reshape(pl.count, pl.d)
    pairs = set()
    for m in diagonal_maps(pl.d):
        if pl.d == 1:
            # Z_n^1 is a single line
            buckets = [np.arange(pl.count)]
        else:
            labels = (queens @ m.matrix().T) % pl.n
            _, inverse, counts = np.unique(labels, axis=0, return_inverse=True, return_counts=True)
            inverse = inverse.reshape(-1)
            buckets = [np.flatnonzero(inverse == label) for label in np.flatnonzero(counts > 1)]

        for bucket in buckets:
            pairs.update(itertools.combinations(bucket.tolist(), 2))

    report = _report(pl, pairs)
    logger.debug('verify_by_maps n=%d d=%d count=%d: %s', pl.n, pl.d, pl.count, report.summary())
    return report


# -----------------------------
# Line occupancy
# -----------------------------

class LineIndex(object):
    """
    Live occupancy of every line of every family; a cell is admissible iff
    all of its line labels are free.
    """

    def __init__(self, n, d):
        self.n = n
        self.d = d
        self.maps = diagonal_maps(d)
        self.occupied = [set() for _ in self.maps]

    def labels(self, coords):
        return [m.apply(coords, self.n) for m in self.maps]

    def is_free(self, labels):
        return all(label not in occ for label, occ in zip(labels, self.occupied))

    def add(self, labels):
        for label, occ in zip(labels, self.occupied):
            occ.add(label)

    def remove(self, labels):
        for label, occ in zip(labels, self.occupied):
            occ.discard(label)

    def try_add(self, coords):
        """
        Occupies the lines of coords if they are all free
        :param coords:
        :return: True when the cell was admissible
        """
        labels = self.labels(coords)
        if not self.is_free(labels):
            return False
        self.add(labels)
        return True


def conflict_free_subset(n, d, candidates):
    """
    Greedy filter: keeps each candidate whose lines are all still free
    :param candidates: iterable of coordinate tuples, in the order to try them
    :return: list of kept coordinate tuples
    """
    index = LineIndex(n, d)
    kept = []
    for coords in candidates:
        if index.try_add(coords):
            kept.append(coords)
    return kept
