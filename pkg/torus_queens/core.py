"""
Exact modular arithmetic and the direction families shared by every module.

Everything here works on Python integers; there is no floating point in the
package.
"""
import functools
import itertools
import math
import operator
from dataclasses import dataclass
from typing import Tuple

from sympy import multiplicity, primerange

# largest dimension the step-function construction accepts
MAX_DIMENSION = 6


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


class ConstructionError(RuntimeError):
    """A construction failed its own re-verification."""


def normalize(x, n):
    """
    Canonical representative of x in Z_n
    :param x: any integer
    :param n: modulus, n >= 1
    :return: x mod n in [0, n)
    """
    if n < 1:
        raise PreconditionError('modulus must be positive, got {}'.format(n))
    return x % n


@dataclass(frozen=True)
class Residue(object):
    value: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, 'value', normalize(self.value, self.n))

    def __check(self, other):
        if isinstance(other, Residue):
            if other.n != self.n:
                raise PreconditionError('residues of different moduli: {} and {}'.format(self.n, other.n))
            return other.value
        return other

    def __add__(self, other):
        return Residue(self.value + self.__check(other), self.n)

    __radd__ = __add__

    def __sub__(self, other):
        return Residue(self.value - self.__check(other), self.n)

    def __rsub__(self, other):
        return Residue(self.__check(other) - self.value, self.n)

    def __mul__(self, other):
        return Residue(self.value * self.__check(other), self.n)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.n)

    def __pow__(self, p):
        return Residue(pow(self.value, p, self.n), self.n)

    def __int__(self):
        return self.value

    def __str__(self):
        return '{} (mod {})'.format(self.value, self.n)


@dataclass(frozen=True)
class Point(object):
    coords: Tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.coords) < 1:
            raise PreconditionError('a point needs at least one coordinate')
        object.__setattr__(self, 'coords', tuple(normalize(c, self.n) for c in self.coords))

    @property
    def d(self):
        return len(self.coords)

    def translate(self, v):
        return Point(tuple(a + b for a, b in zip(self.coords, v)), self.n)

    def scale(self, u):
        return Point(tuple(a * u for a in self.coords), self.n)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True, order=True)
class Direction(object):
    """
    A canonical move family: nonzero eps in {-1,0,1}^d whose first nonzero
    entry is +1, so eps and -eps are one family.
    """
    eps: Tuple[int, ...]

    def __post_init__(self):
        if not any(self.eps) or any(e not in (-1, 0, 1) for e in self.eps):
            raise PreconditionError('direction must be a nonzero vector in {{-1,0,1}}^d, got {}'.format(self.eps))
        if self.eps[self.lead] != 1:
            raise PreconditionError('direction {} is not canonical'.format(self.eps))

    @property
    def lead(self):
        return next(i for i, e in enumerate(self.eps) if e != 0)

    @property
    def d(self):
        return len(self.eps)

    def __str__(self):
        return '({})'.format(','.join(str(e) for e in self.eps))


@functools.lru_cache(maxsize=None)
def enumerate_directions(d):
    """
    All (3^d - 1)/2 canonical directions of Z_n^d, lexicographic on eps
    :param d: dimension >= 1
    :return: tuple of Direction
    """
    if d < 1:
        raise PreconditionError('dimension must be at least 1, got {}'.format(d))

    directions = []
    for eps in itertools.product((-1, 0, 1), repeat=d):
        nonzero = [e for e in eps if e != 0]
        if nonzero and nonzero[0] == 1:
            directions.append(Direction(eps))
    return tuple(sorted(directions))


def crt_combine(residue_pairs):
    """
    Chinese remainder reconstruction over pairwise coprime moduli

    >>> crt_combine([(3, 4), (2, 3)])
    (11, 12)

    :param residue_pairs: iterable of (remainder, modulus)
    :return: (value in [0, M), M)
    """
    pairs = [(int(r), int(m)) for r, m in residue_pairs]
    for _, m in pairs:
        if m < 1:
            raise PreconditionError('CRT moduli must be positive, got {}'.format(m))
    for (_, a), (_, b) in itertools.combinations(pairs, 2):
        if math.gcd(a, b) != 1:
            raise PreconditionError('CRT moduli {} and {} are not coprime'.format(a, b))

    prod_m = functools.reduce(operator.mul, (m for _, m in pairs), 1)
    result = 0
    for r, m in pairs:
        rest = prod_m // m
        result += r * rest * pow(rest, -1, m)
    return result % prod_m, prod_m


def primes_below(bound):
    return list(primerange(2, bound))


def smallest_prime_divisor(n, below=None):
    """
    Smallest prime p dividing n by trial division, or None
    :param n:
    :param below: only look at primes strictly below this bound
    :return:
    """
    limit = below if below is not None else math.isqrt(n) + 1
    for p in primerange(2, limit):
        if n % p == 0:
            return p
    if below is None and n > 1:
        return n
    return None


def largest_prime_power_below(p, bound):
    q = p
    while q * p < bound:
        q *= p
    return q


def prime_power_dividing(p, n, bound):
    """
    Largest power of p below bound that divides n (1 when p does not divide n)
    """
    return min(largest_prime_power_below(p, bound), p ** multiplicity(p, n))


def coprime_to_six(n):
    return math.gcd(n, 6) == 1


def require(condition, message):
    if not condition:
        raise PreconditionError(message)

