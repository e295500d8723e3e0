"""
Power sums S_p = sum_{x=0}^{n-1} x^p and the congruence certificates built on them.

A certificate is self-contained: every evidence value is recomputable from
(kind, n, d), and check_certificate re-derives and compares all of them before
confirming the contradiction they encode.
"""
import functools
import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

from sympy.functions.combinatorial.numbers import stirling

from .core import ConstructionError, PreconditionError, Residue, coprime_to_six, require
from .lines import diagonal_maps, verify_by_maps

logger = logging.getLogger(__name__)

MAX_EXPONENT = 12


# -----------------------------
# POWER SUMS
# -----------------------------

@dataclass(frozen=True)
class PowerSum(object):
    n: int
    p: int
    value_exact: int

    @property
    def value_mod_n(self):
        return Residue(self.value_exact, self.n)


@functools.lru_cache(maxsize=None)
def _stirling_first(k, j):
    return int(stirling(k, j, kind=1, signed=True))


# power sums are compared with direct summation up to this n
DIRECT_CHECK_MAX_N = 10 ** 4


@functools.lru_cache(maxsize=4096)
def _power_sums(n, p):
    """
    S_0..S_p from sum_x x(x-1)...(x-k+1) = k! C(n, k+1), eliminating the lower
    powers of each falling factorial in turn
    """
    sums = []
    for k in range(p + 1):
        falling = math.factorial(k) * math.comb(n, k + 1)
        lower = sum(_stirling_first(k, j) * sums[j] for j in range(k))
        sums.append(falling - lower)
    return tuple(sums)


@functools.lru_cache(maxsize=4096)
def _checked_power_sum(n, p):
    value = _power_sums(n, p)[p]
    if n <= DIRECT_CHECK_MAX_N:
        direct = direct_power_sum(n, p)
        if direct != value:
            raise ConstructionError('S_{} for n={}: recursion gives {}, direct sum {}'.format(p, n, value, direct))
    return value


def power_sum(n, p, check=True):
    """
    :param n: n >= 1
    :param p: 0 <= p <= 12
    :param check: compare against direct summation when n <= DIRECT_CHECK_MAX_N
        (cached per (n, p)); a mismatch raises ConstructionError
    :return: PowerSum
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(0 <= p <= MAX_EXPONENT, 'exponent must lie in [0, {}], got {}'.format(MAX_EXPONENT, p))

    value = _checked_power_sum(n, p) if check else _power_sums(n, p)[p]
    return PowerSum(n, p, value)


def direct_power_sum(n, p):
    return sum(x ** p for x in range(n))


def closed_form_power_sum(n, p):
    """
    Faulhaber closed forms for p <= 3
    """
    if p == 0:
        return n
    if p == 1:
        return n * (n - 1) // 2
    if p == 2:
        return (n - 1) * n * (2 * n - 1) // 6
    if p == 3:
        return (n * (n - 1) // 2) ** 2
    raise PreconditionError('no closed form stored for p={}'.format(p))


def s_mod(n, p):
    return power_sum(n, p).value_exact % n


# -----------------------------
# COMPLETION
# -----------------------------

@dataclass(frozen=True)
class CompletionResult(object):
    placement: object
    column: int
    row: int
    a_plus: int
    a_minus: int


def complete_placement(pl):
    """
    Adds the queen an independent (n-1)-queen placement on Z_n^2, n odd, is
    missing. Its column and row are the values the other queens leave out, and
    the missing sum and difference labels land on the same cell because S_1 = 0
    mod n.
    :param pl: Placement
    :return: CompletionResult
    """
    n = pl.n
    require(pl.d == 2, 'completion works on Z_n^2, got d={}'.format(pl.d))
    require(n % 2 == 1, 'n must be odd for completion, got {}'.format(n))
    require(pl.count == n - 1, 'completion needs n-1 = {} queens, got {}'.format(n - 1, pl.count))
    report = verify_by_maps(pl)
    require(report.independent, 'completion needs an independent placement: {}'.format(report.summary()))

    s1 = s_mod(n, 1)
    column = (s1 - sum(x for x, _ in pl.queens)) % n
    row = (s1 - sum(y for _, y in pl.queens)) % n
    a_plus = (s1 - sum(x + y for x, y in pl.queens)) % n
    a_minus = (s1 - sum(x - y for x, y in pl.queens)) % n

    completed = pl.with_queen((column, row))
    if not verify_by_maps(completed).independent:
        raise ConstructionError('completion of n={} at ({}, {}) is not independent'.format(n, column, row))
    return CompletionResult(completed, column, row, a_plus, a_minus)


# -----------------------------
# CERTIFICATES
# -----------------------------

class CertificateKind(str, Enum):
    POLYA = 'PolyaNoN'
    THEOREM2 = 'Theorem2NoNminus1'
    THEOREM4 = 'Theorem4NoN2'
    EXACT = 'ExactValue'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Evidence(object):
    name: str
    value: int
    modulus: int


@dataclass(frozen=True)
class Certificate(object):
    kind: CertificateKind
    n: int
    d: int
    bound: int
    evidence: Tuple[Evidence, ...] = field(default_factory=tuple)

    def value(self, name):
        for ev in self.evidence:
            if ev.name == name:
                return ev.value
        raise KeyError(name)


def _ev(name, value, modulus):
    return Evidence(name, value % modulus, modulus)


def _polya_applies(n, d):
    return d == 2 and n >= 2 and (n % 2 == 0 or n % 3 == 0)


def _theorem2_applies(n, d):
    return d == 2 and n >= 2 and (n % 3 == 0 or n % 4 == 0)


def _theorem4_applies(n, d):
    return d == 3 and coprime_to_six(n) and n % 5 == 0 and n % 25 != 0


def _derive_polya(n):
    # a full placement has every x, y, x+y, x-y value once
    s1, s2 = s_mod(n, 1), s_mod(n, 2)
    return n - 1, [
        _ev('S_1', s1, n),
        _ev('sum_x_plus_y', 2 * s1, n),
        _ev('S_2', s2, n),
        _ev('2S_2', 2 * s2, n),
    ]


def _derive_theorem2(n):
    # a = the missing sum / difference label; even n gets the mod-2n sharpening
    s1, s2 = s_mod(n, 1), s_mod(n, 2)
    a = s1
    return n - 2, [
        _ev('a_plus', a, n),
        _ev('a_minus', a, n),
        _ev('a^2', a * a, n),
        _ev('S_2', s2, n),
        _ev('2S_2', 2 * s2, n),
        _ev('S_2+a^2', s2 + a * a, n),
        _ev('2S_2+2a^2', 2 * s2 + 2 * a * a, n),
    ]


def _derive_theorem4(n):
    fifth = n // 5
    s = {p: s_mod(n, p) for p in (1, 2, 3, 4, 6)}
    return n * n - 1, [
        _ev('S_1', s[1], n),
        _ev('S_2', s[2], n),
        _ev('S_3', s[3], n),
        _ev('S_4', s[4], n),
        _ev('n/5', fifth, n),
        _ev('S_4 mod n/5', s[4], fifth),
        _ev('S_2*S_6', s[2] * s[6], n),
        _ev('S_4^2', s[4] ** 2, n),
        _ev('3S_4^2', 3 * s[4] ** 2, n),
    ]


def _derive_exact(n):
    upper = n
    if _polya_applies(n, 2):
        upper = n - 1
    if _theorem2_applies(n, 2):
        upper = n - 2
    return known_max_2d(n), [
        _ev('n mod 12', n, 12),
        Evidence('lower', construction_lower_bound_2d(n), n + 1),
        Evidence('upper', upper, n + 1),
    ]


_DERIVATIONS = {
    CertificateKind.POLYA: (_polya_applies, lambda n, d: _derive_polya(n)),
    CertificateKind.THEOREM2: (_theorem2_applies, lambda n, d: _derive_theorem2(n)),
    CertificateKind.THEOREM4: (_theorem4_applies, lambda n, d: _derive_theorem4(n)),
    CertificateKind.EXACT: (lambda n, d: d == 2 and n >= 2, lambda n, d: _derive_exact(n)),
}


def _contradiction_holds(cert):
    v = cert.value
    n = cert.n
    if cert.kind is CertificateKind.POLYA:
        # even n: sum(x+y) = 2 S_1 must equal S_1; multiples of 3: 2 S_2 must vanish
        return v('S_1') != v('sum_x_plus_y') or v('2S_2') != 0
    if cert.kind is CertificateKind.THEOREM2:
        if n % 2 == 1:
            return v('2S_2+2a^2') != 0
        return v('S_2+a^2') != 0
    if cert.kind is CertificateKind.THEOREM4:
        return (
            v('S_1') == 0 and v('S_2') == 0 and v('S_3') == 0
            and v('S_4') != 0 and v('S_4 mod n/5') == 0
            and v('S_2*S_6') == 0
            and v('3S_4^2') != v('S_4^2')
        )
    if cert.kind is CertificateKind.EXACT:
        return v('lower') == v('upper') == cert.bound
    return False


def emit_certificate(kind, n, d):
    kind = CertificateKind(kind)
    applies, derive = _DERIVATIONS[kind]
    require(applies(n, d), '{} does not apply to n={} d={}'.format(kind, n, d))
    bound, evidence = derive(n, d)
    cert = Certificate(kind, n, d, bound, tuple(evidence))
    check_certificate(cert)
    return cert


def check_certificate(cert):
    """
    Re-derives every evidence value from (kind, n, d) and checks the contradiction
    :param cert: Certificate
    :return: None, raises ConstructionError on any mismatch
    """
    applies, derive = _DERIVATIONS[CertificateKind(cert.kind)]
    if not applies(cert.n, cert.d):
        raise ConstructionError('{} is not applicable to n={} d={}'.format(cert.kind, cert.n, cert.d))

    bound, evidence = derive(cert.n, cert.d)
    if bound != cert.bound:
        raise ConstructionError('{} bound {} does not match recomputed {}'.format(cert.kind, cert.bound, bound))
    if tuple(evidence) != tuple(cert.evidence):
        mismatched = [e.name for e, f in itertools.zip_longest(evidence, cert.evidence) if e != f]
        raise ConstructionError('{} evidence mismatch in {}'.format(cert.kind, mismatched))
    if not _contradiction_holds(cert):
        raise ConstructionError('{} evidence for n={} does not yield a contradiction'.format(cert.kind, cert.n))


def certificate_to_dict(cert):
    return {
        'kind': str(cert.kind),
        'n': cert.n,
        'd': cert.d,
        'bound': cert.bound,
        'evidence': [{'name': e.name, 'value': e.value, 'modulus': e.modulus} for e in cert.evidence],
    }


def certificate_to_json(cert):
    return json.dumps(certificate_to_dict(cert), ensure_ascii=False)


def certificate_from_json(text):
    data = json.loads(text) if isinstance(text, str) else text
    try:
        evidence = tuple(Evidence(e['name'], int(e['value']), int(e['modulus'])) for e in data['evidence'])
        return Certificate(CertificateKind(data['kind']), int(data['n']), int(data['d']), int(data['bound']), evidence)
    except (KeyError, TypeError, ValueError) as e:
        raise PreconditionError('malformed certificate document: {}'.format(e))


def impossibility_2d(n):
    """
    Pólya's bound (no n queens when 2 | n or 3 | n) and the sharper bound
    (no n-1 queens when 3 | n or 4 | n), weakest first
    :param n: n >= 2
    :return: list of Certificate, empty when neither applies
    """
    require(n >= 2, 'n must be at least 2, got {}'.format(n))
    certs = []
    if _polya_applies(n, 2):
        certs.append(emit_certificate(CertificateKind.POLYA, n, 2))
    if _theorem2_applies(n, 2):
        certs.append(emit_certificate(CertificateKind.THEOREM2, n, 2))
    return certs


def impossibility_3d(n):
    """
    No n^2 queens on Z_n^3 when gcd(n, 6) = 1, 5 | n and 25 does not divide n
    :param n:
    :return: Certificate or None
    """
    require(n >= 2, 'n must be at least 2, got {}'.format(n))
    if not _theorem4_applies(n, 3):
        return None
    return emit_certificate(CertificateKind.THEOREM4, n, 3)


def construction_lower_bound_2d(n):
    if coprime_to_six(n):
        return n
    if n % 12 in (2, 10):
        return n - 1
    return n - 2


def known_max_2d(n):
    """
    Exact maximum on Z_n^2: n, n-1 or n-2 by residue class mod 12
    :param n:
    :return:
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    if n == 1:
        return 1
    return construction_lower_bound_2d(n)


def exact_value_certificate(n):
    return emit_certificate(CertificateKind.EXACT, n, 2)


def upper_bound(n, d):
    """
    Best upper bound for independent queens on Z_n^d: the trivial n^(d-1),
    slicing the exact 2D value up through the dimensions, and n^(d-3)(n^2 - 1)
    when the three dimensional certificate applies
    :param n:
    :param d:
    :return:
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(d >= 1, 'd must be positive, got {}'.format(d))
    if d == 1 or n == 1:
        return 1

    bounds = [n ** (d - 1), n ** (d - 2) * known_max_2d(n)]
    if d >= 3 and _theorem4_applies(n, 3):
        bounds.append(n ** (d - 3) * (n * n - 1))
    return min(bounds)


# -----------------------------
# MOMENT DIAGNOSTIC
# -----------------------------

@dataclass(frozen=True)
class MomentFailure(object):
    direction: str
    coordinates: Tuple[int, ...]
    exponents: Tuple[int, ...]
    observed: int
    expected: int


@dataclass(frozen=True)
class MomentReport(object):
    perfect_size: bool
    checked: int
    failures: List[MomentFailure]

    @property
    def consistent(self):
        return not self.failures


def moment_diagnostic(pl, max_exponent=4):
    """
    Compares sum u^p v^q over the line labels of every family with the value a
    placement of n^(d-1) queens must produce, n^(d-3) S_p S_q (one coordinate
    and S_p alone when d = 2)
    :param pl: Placement, d >= 2
    :param max_exponent:
    :return: MomentReport
    """
    n, d = pl.n, pl.d
    require(d >= 2, 'moment sums need d >= 2, got {}'.format(d))
    require(0 <= max_exponent <= MAX_EXPONENT, 'max_exponent must lie in [0, {}]'.format(MAX_EXPONENT))

    s = [s_mod(n, p) for p in range(max_exponent + 1)]
    width = 1 if d == 2 else 2
    multiplicity = n ** (d - 1 - width)

    failures = []
    checked = 0
    for m in diagonal_maps(d):
        labels = [m.apply(q, n) for q in pl.queens]
        for coords in itertools.combinations(range(d - 1), width):
            for exps in itertools.product(range(max_exponent + 1), repeat=width):
                observed = sum(
                    functools.reduce(lambda acc, ce: acc * pow(label[ce[0]], ce[1], n), zip(coords, exps), 1)
                    for label in labels
                ) % n
                expected = multiplicity
                for e in exps:
                    expected *= s[e]
                expected %= n
                checked += 1
                if observed != expected:
                    failures.append(MomentFailure(str(m.direction()), coords, exps, observed, expected))

    return MomentReport(pl.count == n ** (d - 1), checked, failures)
