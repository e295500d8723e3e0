import math

import numpy as np
import pytest

from torus_queens.core import (
    Direction,
    Point,
    PreconditionError,
    Residue,
    crt_combine,
    enumerate_directions,
    largest_prime_power_below,
    normalize,
    primes_below,
    smallest_prime_divisor,
)


@pytest.mark.parametrize('x,n,expected', [(-13, 10, 7), (0, 5, 0), (354, 5, 4)])
def test_normalize(x, n, expected):
    assert normalize(x, n) == expected


def test_normalize_rejects_zero_modulus():
    with pytest.raises(PreconditionError):
        normalize(3, 0)


def test_directions_d2():
    assert [d.eps for d in enumerate_directions(2)] == [(0, 1), (1, -1), (1, 0), (1, 1)]
    assert [d.eps for d in enumerate_directions(1)] == [(1,)]


@pytest.mark.parametrize('d', [1, 2, 3, 4, 5, 6])
def test_direction_count(d):
    directions = enumerate_directions(d)
    assert len(directions) == (3 ** d - 1) // 2
    eps = {x.eps for x in directions}
    assert len(eps) == len(directions)
    for e in eps:
        assert tuple(-c for c in e) not in eps


def test_direction_rejects_non_canonical():
    with pytest.raises(PreconditionError):
        Direction((-1, 1))
    with pytest.raises(PreconditionError):
        Direction((0, 0))
    with pytest.raises(PreconditionError):
        Direction((1, 2))


@pytest.mark.parametrize('pairs,expected', [
    ([(0, 4), (0, 3), (0, 5), (0, 7)], (0, 420)),
    ([(1, 4), (0, 3), (0, 5), (0, 7)], (105, 420)),
    ([(3, 4), (2, 3)], (11, 12)),
])
def test_crt_combine(pairs, expected):
    assert crt_combine(pairs) == expected


def test_crt_combine_satisfies_every_congruence():
    rng = np.random.default_rng(7)
    moduli = [8, 9, 5, 7, 11]
    for _ in range(200):
        remainders = [int(rng.integers(0, m)) for m in moduli]
        value, modulus = crt_combine(zip(remainders, moduli))
        assert modulus == math.prod(moduli)
        assert 0 <= value < modulus
        assert [value % m for m in moduli] == remainders


def test_crt_combine_rejects_shared_factor():
    with pytest.raises(PreconditionError):
        crt_combine([(1, 4), (1, 6)])


def test_residue_arithmetic_matches_integers():
    rng = np.random.default_rng(11)
    for _ in range(500):
        n = int(rng.integers(1, 10 ** 6))
        a, b = (int(x) for x in rng.integers(-10 ** 12, 10 ** 12, size=2))
        ra, rb = Residue(a, n), Residue(b, n)
        assert (ra + rb).value == (a + b) % n
        assert (ra - rb).value == (a - b) % n
        assert (ra * rb).value == (a * b) % n
        assert (-ra).value == (-a) % n
        assert (ra ** 3).value == pow(a, 3, n)


def test_residue_moduli_must_match():
    with pytest.raises(PreconditionError):
        Residue(1, 5) + Residue(1, 7)


def test_point_normalizes():
    p = Point((-1, 12), 5)
    assert p.coords == (4, 2)
    assert p.translate((1, 3)).coords == (0, 0)
    assert p.scale(2).coords == (3, 4)


def test_small_prime_helpers():
    assert primes_below(16) == [2, 3, 5, 7, 11, 13]
    assert largest_prime_power_below(2, 8) == 4
    assert largest_prime_power_below(3, 8) == 3
    assert largest_prime_power_below(2, 64) == 32
    assert smallest_prime_divisor(35, below=8) == 5
    assert smallest_prime_divisor(11, below=8) is None
    assert smallest_prime_divisor(91) == 7


if __name__ == '__main__':
    pytest.main([__file__])
