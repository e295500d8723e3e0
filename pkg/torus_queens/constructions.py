"""
Explicit independent placements.

    lemma1   (t, 2t)                          gcd(n, 6) = 1           n queens
    lemma2   (t, 3t) and (t-1, 3t)            n = +-2 mod 12          n-1 queens
    lemma3   (t, 2t-c), c = 0, 1, 2, 1        n an odd multiple of 3  n-2 queens
    thm3     (t_1, -2t_1+t_2, ..., -2t_{d-1}) no prime p < 2^d in n   n^(d-1) queens
    thm5     thm3 perturbed by a step function alpha, greedily filtered (or the
             unperturbed filter where that keeps more)

Every result is re-verified with verify_by_maps before it is returned.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

from .core import (
    MAX_DIMENSION,
    ConstructionError,
    coprime_to_six,
    crt_combine,
    largest_prime_power_below,
    prime_power_dividing,
    primes_below,
    require,
    smallest_prime_divisor,
)
from .lines import LineIndex, Placement, conflict_free_subset, diagonal_maps, verify_by_maps

logger = logging.getLogger(__name__)

# 2D residue classes without a construction here are handed to the randomized plane search
FALLBACK_NODE_BUDGET = 100000
FALLBACK_SEED = 0


class Method(str, Enum):
    LEMMA1 = 'lemma1'
    LEMMA2 = 'lemma2'
    LEMMA3 = 'lemma3'
    THEOREM3 = 'thm3'
    THEOREM5 = 'thm5'
    SOLVER_FALLBACK = 'solver'
    TRIVIAL = 'trivial'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ConstructionResult(object):
    placement: Placement
    method: Method
    claimed_count: int
    verified: bool
    info: Dict[str, object] = field(default_factory=dict)

    @property
    def count(self):
        return self.placement.count

    @property
    def deficit(self):
        return self.placement.n ** (self.placement.d - 1) - self.placement.count


def _finish(placement, method, claimed_count, **info):
    report = verify_by_maps(placement)
    if not report.independent:
        raise ConstructionError('{} placement for n={} d={} has {} conflict(s), first {}'.format(
            method, placement.n, placement.d, len(report.conflicts), report.conflicts[0]))
    if placement.count != claimed_count:
        raise ConstructionError('{} placement for n={} d={} has {} queens, expected {}'.format(
            method, placement.n, placement.d, placement.count, claimed_count))

    logger.info('%s: n=%d d=%d count=%d', method, placement.n, placement.d, placement.count)
    return ConstructionResult(placement, method, claimed_count, True, dict(info))


# -----------------------------
# TWO DIMENSIONS
# -----------------------------

def construct_lemma1(n):
    """
    n queens on Z_n^2 for n coprime to 6. Sums 3t and differences t are
    permutations of Z_n.
    :param n:
    :return:
    """
    require(n >= 1 and coprime_to_six(n), 'n must be coprime to 6 for lemma1, got {}'.format(n))
    placement = slope_family(n, 2)
    return _finish(placement, Method.LEMMA1, n)


def construct_lemma2(n):
    """
    n-1 queens for n = 2m, n = +-2 mod 12: (t, 3t) for t < m and (t-1, 3t)
    for m < t < 2m. The second range has odd sum and difference labels.
    :param n:
    :return:
    """
    require(n >= 2 and n % 12 in (2, 10), 'n must be congruent to +-2 mod 12 for lemma2, got {}'.format(n))
    m = n // 2
    queens = [(t, 3 * t) for t in range(m)]
    queens += [(t - 1, 3 * t) for t in range(m + 1, 2 * m)]
    return _finish(Placement.from_points(n, 2, queens), Method.LEMMA2, n - 1)


def lemma3_segments(m):
    """
    (offset c, first t, last t) of the four segments for n = 6m+3
    :param m:
    :return:
    """
    return (
        (0, 0, 2 * m),
        (1, 2 * m + 2, 3 * m + 1),
        (2, 3 * m + 3, 5 * m + 2),
        (1, 5 * m + 3, 6 * m + 2),
    )


def construct_lemma3(n):
    """
    n-2 queens for n an odd multiple of 3, on fields (t, 2t - c)
    :param n:
    :return:
    """
    require(n >= 3 and n % 2 == 1 and n % 3 == 0, 'n must be an odd multiple of 3 for lemma3, got {}'.format(n))
    m = (n - 3) // 6
    queens = []
    for c, first, last in lemma3_segments(m):
        queens.extend((t, 2 * t - c) for t in range(first, last + 1))
    return _finish(Placement.from_points(n, 2, queens), Method.LEMMA3, n - 2)


def slope_family(n, k, count=None):
    """
    Queens at (t, k t) for t = 0..count-1
    :param n:
    :param k: slope
    :param count: defaults to n
    :return: Placement (not necessarily independent)
    """
    count = n if count is None else count
    require(0 <= count <= n, 'count must lie in [0, n], got {}'.format(count))
    return Placement.from_points(n, 2, [(t, k * t) for t in range(count)])


def independent_prefix_length(n, k):
    """
    Largest L such that (t, k t) for t < L is independent
    :param n:
    :param k:
    :return:
    """
    index = LineIndex(n, 2)
    for t in range(n):
        if not index.try_add((t, (k * t) % n)):
            return t
    return n


def diagonal_labels(placement):
    """
    Line labels of every queen in every family, keyed by direction
    :param placement:
    :return: dict str(direction) -> list of labels
    """
    labels = {}
    for m in diagonal_maps(placement.d):
        values = [m.apply(q, placement.n) for q in placement.queens]
        if placement.d == 2:
            values = [v[0] for v in values]
        labels[str(m.direction())] = values
    return labels


# -----------------------------
# HIGHER DIMENSIONS
# -----------------------------

def _field(t, n, alpha=0):
    """
    (t_1, -2t_1 + t_2, ..., -2t_{d-2} + t_{d-1}, -2t_{d-1} + alpha)
    """
    coords = [t[0]]
    for prev, cur in zip(t, t[1:]):
        coords.append(-2 * prev + cur)
    coords.append(-2 * t[-1] + alpha)
    return tuple(c % n for c in coords)


def has_small_prime_divisor(n, d):
    return smallest_prime_divisor(n, below=2 ** d) is not None


def construct_theorem3(n, d):
    """
    n^(d-1) queens when n has no prime divisor below 2^d. A conflict would need
    (eps_d + 2 eps_{d-1} + ... + 2^(d-1) eps_1) t = 0 with the bracket a nonzero
    integer below 2^d, hence a unit mod n.
    :param n:
    :param d:
    :return:
    """
    require(d >= 2, 'd must be at least 2 for thm3, got {}'.format(d))
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(not has_small_prime_divisor(n, d),
            'n must have no prime divisor below 2^d = {} for thm3, got n={}'.format(2 ** d, n))

    queens = [_field(t, n) for t in itertools.product(range(n), repeat=d - 1)]
    return _finish(Placement(n, d, tuple(queens)), Method.THEOREM3, n ** (d - 1))


@dataclass(frozen=True)
class StepComponent(object):
    p: int
    q: int
    active: bool

    @property
    def levels(self):
        k, power = 0, 1
        while power < self.q:
            power *= self.p
            k += 1
        return k

    def value(self, t, n):
        """
        Residue of alpha mod q: the level-h chessboard sum of the interval digits
        floor(t_i p^(h+1) / n) mod p, weighted by p^h
        """
        if not self.active:
            return 0
        total = 0
        scale = 1
        for h in range(self.levels):
            step = self.p ** (h + 1)
            total += scale * sum((t_i * step // n) % self.p for t_i in t)
            scale *= self.p
        return total % self.q


@dataclass(frozen=True)
class StepFunction(object):
    n: int
    d: int
    components: Tuple[StepComponent, ...]
    modulus: int
    basis: Tuple[int, ...]

    def __call__(self, t):
        total = sum(c.value(t, self.n) * b for c, b in zip(self.components, self.basis))
        return total % self.modulus


def step_modulus_bound(d):
    return 2 ** (2 ** (d + 2))


def theorem5_guarantee(n, d):
    """
    The count the existence statement guarantees; negative (vacuous) at desk scale
    """
    return n ** (d - 1) - 2 ** (2 ** (d + 4)) * n ** (d - 2)


def build_alpha(n, d):
    """
    The CRT-assembled step function over the primes p < 2^d. When p | n, q is the
    largest power of p below 2^d that divides n and the residue of alpha mod q
    labels the intervals of [0, n) cut at multiples of n/p, n/p^2, ..., n/q with
    chessboard sums over the d-1 parameters. Otherwise q is the largest power of
    p below 2^d and alpha = 0 mod q.
    :param n:
    :param d:
    :return: StepFunction
    """
    require(n >= 2, 'n must be at least 2 for thm5, got {}'.format(n))
    require(2 <= d <= MAX_DIMENSION, 'd must be between 2 and {} for thm5, got {}'.format(MAX_DIMENSION, d))

    bound = 2 ** d
    components = tuple(
        StepComponent(p, prime_power_dividing(p, n, bound), True) if n % p == 0
        else StepComponent(p, largest_prime_power_below(p, bound), False)
        for p in primes_below(bound)
    )

    # unit vectors of the CRT decomposition
    moduli = [c.q for c in components]
    basis = []
    for i in range(len(moduli)):
        value, modulus = crt_combine([(1 if j == i else 0, q) for j, q in enumerate(moduli)])
        basis.append(value)

    if modulus > step_modulus_bound(d):
        raise ConstructionError('step function modulus {} exceeds 2^(2^(d+2))'.format(modulus))
    return StepFunction(n, d, components, modulus, tuple(basis))


def greedy_fields(n, d, alpha=None):
    """
    Fields F(t) = (t_1, -2t_1+t_2, ..., -2t_{d-1} + alpha(t)) in lexicographic t
    order, each kept only if all its lines are still free
    :param alpha: StepFunction, None for alpha = 0
    :return: list of kept coordinate tuples
    """
    params = itertools.product(range(n), repeat=d - 1)
    if alpha is None:
        candidates = (_field(t, n) for t in params)
    else:
        candidates = (_field(t, n, alpha(t)) for t in params)
    return conflict_free_subset(n, d, candidates)


def construct_theorem5(n, d):
    """
    The greedily filtered fields perturbed by the step function. At desk scale
    the perturbation does not win for every n, so the unperturbed filter is run
    as well and the larger of the two is kept; info records both sizes.
    :param n:
    :param d:
    :return:
    """
    alpha = build_alpha(n, d)
    perturbed = greedy_fields(n, d, alpha)
    plain = greedy_fields(n, d)
    kept = perturbed if len(perturbed) >= len(plain) else plain

    placement = Placement(n, d, tuple(kept))
    deficit = n ** (d - 1) - placement.count
    logger.info('thm5: n=%d d=%d modulus=%d alpha kept %d, plain kept %d',
                n, d, alpha.modulus, len(perturbed), len(plain))
    return _finish(placement, Method.THEOREM5, placement.count, modulus=alpha.modulus, deficit=deficit,
                   alpha_kept=len(perturbed), plain_kept=len(plain))


def _construct_greedy_lift(n, d):
    # no step function beyond MAX_DIMENSION
    kept = greedy_fields(n, d)
    return _finish(Placement(n, d, tuple(kept)), Method.TRIVIAL, len(kept))


# -----------------------------
# DISPATCH
# -----------------------------

def _search_fallback(n, node_budget):
    from .solver import Decision, find_plane_witness

    decision = find_plane_witness(n, n - 2, seed=FALLBACK_SEED, node_budget=node_budget)
    if decision.status is Decision.YES:
        return _finish(decision.witness, Method.SOLVER_FALLBACK, n - 2, nodes=decision.nodes_explored)

    logger.warning('plane search for n=%d ended with %s after %d nodes', n, decision.status, decision.nodes_explored)
    return None


def best_construction(n, d, node_budget=FALLBACK_NODE_BUDGET):
    """
    The best construction known here for (n, d)

    d = 2: lemma1 / lemma2 / lemma3 by residue class, otherwise an n-2 witness
    from the randomized plane search, and the step-function family only if
    that runs out of nodes.
    d >= 3: thm3 when n has no prime divisor below 2^d, else thm5.

    :param n:
    :param d:
    :param node_budget: node budget of the 2D plane search
    :return: ConstructionResult
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(d >= 2, 'd must be at least 2, got {}'.format(d))

    if n == 1:
        return _finish(Placement(1, d, ((0,) * d,)), Method.TRIVIAL, 1)

    if d == 2:
        if coprime_to_six(n):
            return construct_lemma1(n)
        if n % 12 in (2, 10):
            return construct_lemma2(n)
        if n % 2 == 1:
            return construct_lemma3(n)
        result = _search_fallback(n, node_budget)
        if result is not None:
            return result
        return construct_theorem5(n, d)

    if not has_small_prime_divisor(n, d):
        return construct_theorem3(n, d)
    if d <= MAX_DIMENSION:
        return construct_theorem5(n, d)
    return _construct_greedy_lift(n, d)


CONSTRUCTIONS = {
    Method.LEMMA1: lambda n, d: construct_lemma1(n),
    Method.LEMMA2: lambda n, d: construct_lemma2(n),
    Method.LEMMA3: lambda n, d: construct_lemma3(n),
    Method.THEOREM3: construct_theorem3,
    Method.THEOREM5: construct_theorem5,
}


def construct(n, d, method='auto'):
    """
    Runs a named construction, or best_construction for 'auto'
    :param n:
    :param d:
    :param method: 'auto' or a Method value
    :return:
    """
    if method == 'auto':
        return best_construction(n, d)

    method = Method(method)
    require(method in CONSTRUCTIONS, 'no construction named {}'.format(method))
    if method in (Method.LEMMA1, Method.LEMMA2, Method.LEMMA3):
        require(d == 2, '{} is a two dimensional construction, got d={}'.format(method, d))
    return CONSTRUCTIONS[method](n, d)
