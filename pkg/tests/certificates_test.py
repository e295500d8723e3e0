import dataclasses
import math

import numpy as np
import pytest

from torus_queens.certificates import (
    DIRECT_CHECK_MAX_N,
    CertificateKind,
    Evidence,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    closed_form_power_sum,
    complete_placement,
    emit_certificate,
    exact_value_certificate,
    impossibility_2d,
    impossibility_3d,
    known_max_2d,
    moment_diagnostic,
    power_sum,
    s_mod,
    upper_bound,
)
from torus_queens.constructions import construct_lemma1, construct_lemma2, construct_lemma3, construct_theorem3
from torus_queens.core import ConstructionError, PreconditionError
from torus_queens.lines import verify_by_maps

THEOREM4_MODULI = [5, 35, 55, 65, 85, 95]


def test_power_sum_examples():
    s = power_sum(5, 4)
    assert s.value_exact == 354
    assert s.value_mod_n.value == 4
    assert power_sum(12, 2).value_exact == 506
    assert power_sum(12, 2).value_mod_n.value == 2


def test_power_sums_agree_three_ways():
    running = [0] * 9
    for n in range(1, 2001):
        # running[p] = sum of x^p for x < n
        x = n - 1
        for p in range(9):
            running[p] += x ** p
        for p in range(9):
            assert power_sum(n, p).value_exact == running[p]
            if p <= 3:
                assert closed_form_power_sum(n, p) == running[p]


def test_power_sum_direct_check_and_range():
    assert power_sum(40, 12, check=True).value_exact == sum(x ** 12 for x in range(40))
    with pytest.raises(PreconditionError):
        power_sum(5, 13)
    with pytest.raises(PreconditionError):
        power_sum(0, 1)


def test_power_sum_checks_by_default():
    assert DIRECT_CHECK_MAX_N >= 2000
    assert power_sum(40, 12).value_exact == sum(x ** 12 for x in range(40))
    assert power_sum(DIRECT_CHECK_MAX_N + 1, 3).value_exact == closed_form_power_sum(DIRECT_CHECK_MAX_N + 1, 3)


def test_parallelogram_identity():
    rng = np.random.default_rng(0)
    x = rng.integers(-10 ** 6, 10 ** 6, size=10000, dtype=np.int64)
    y = rng.integers(-10 ** 6, 10 ** 6, size=10000, dtype=np.int64)
    assert np.array_equal((x + y) ** 2 + (x - y) ** 2, 2 * x ** 2 + 2 * y ** 2)


def test_square_shift_by_n():
    rng = np.random.default_rng(1)
    n = rng.integers(1, 10 ** 4, size=10000, dtype=np.int64)
    x = rng.integers(-10 ** 6, 10 ** 6, size=10000, dtype=np.int64)
    shift = ((x + n) ** 2 - x ** 2) % (2 * n)
    even = n % 2 == 0
    assert (shift[even] == 0).all()
    assert np.array_equal(shift[~even], n[~even])


def test_low_power_sums_vanish_mod_n():
    for n in range(1, 2001, 2):
        assert s_mod(n, 1) == 0
        assert s_mod(n, 3) == 0
        if n % 3:
            assert s_mod(n, 2) == 0


def test_fourth_power_sum_mod_n_for_single_factor_five():
    moduli = [n for n in range(5, 2001, 5) if math.gcd(n, 6) == 1 and n % 25]
    assert moduli[:4] == [5, 35, 55, 65]
    for n in moduli:
        s4 = s_mod(n, 4)
        assert s4 % (n // 5) == 0
        assert s4 != 0


@pytest.mark.parametrize('n', THEOREM4_MODULI)
def test_theorem4_evidence(n):
    s = {p: power_sum(n, p).value_exact % n for p in (1, 2, 3, 4)}
    assert s[1] == s[2] == s[3] == 0
    assert s[4] % (n // 5) == 0
    assert s[4] != 0
    assert (3 * s[4] ** 2) % n != (s[4] ** 2) % n


def test_theorem4_five():
    cert = impossibility_3d(5)
    assert cert.kind is CertificateKind.THEOREM4
    assert cert.bound == 24
    assert cert.value('S_4') == 4
    assert cert.value('3S_4^2') == 3
    assert cert.value('S_4^2') == 1
    assert impossibility_3d(35).bound == 1224
    assert impossibility_3d(25) is None
    assert impossibility_3d(7) is None


def test_theorem2_twelve():
    certs = impossibility_2d(12)
    assert [c.kind for c in certs] == [CertificateKind.POLYA, CertificateKind.THEOREM2]
    assert [c.bound for c in certs] == [11, 10]
    theorem2 = certs[1]
    assert theorem2.value('a_plus') == 6
    assert theorem2.value('S_2') == 2


def test_impossibility_2d_coverage():
    for n in range(2, 121):
        kinds = [c.kind for c in impossibility_2d(n)]
        assert (CertificateKind.POLYA in kinds) == (n % 2 == 0 or n % 3 == 0)
        assert (CertificateKind.THEOREM2 in kinds) == (n % 3 == 0 or n % 4 == 0)
    assert impossibility_2d(25) == []


def test_known_max_2d():
    assert [known_max_2d(n) for n in range(2, 13)] == [1, 1, 2, 5, 4, 7, 6, 7, 9, 11, 10]
    assert known_max_2d(1) == 1
    for n in range(2, 200):
        assert known_max_2d(n) in (n, n - 1, n - 2)


def test_upper_bound():
    assert upper_bound(5, 3) == 24
    assert upper_bound(12, 3) == 120
    assert upper_bound(35, 3) == 1224
    assert upper_bound(11, 3) == 121
    assert upper_bound(5, 4) == 5 * 24
    assert upper_bound(9, 2) == 7


def test_exact_value_certificate():
    for n in range(2, 61):
        cert = exact_value_certificate(n)
        assert cert.bound == known_max_2d(n)
        assert cert.value('lower') == cert.value('upper')


def test_check_certificate_rejects_tampering():
    cert = impossibility_2d(12)[1]
    check_certificate(cert)
    with pytest.raises(ConstructionError):
        check_certificate(dataclasses.replace(cert, bound=11))
    forged = tuple(Evidence(e.name, (e.value + 1) % e.modulus, e.modulus) if e.name == 'S_2' else e
                   for e in cert.evidence)
    with pytest.raises(ConstructionError):
        check_certificate(dataclasses.replace(cert, evidence=forged))
    with pytest.raises(ConstructionError):
        check_certificate(dataclasses.replace(cert, n=13))


def test_emit_requires_applicable_kind():
    with pytest.raises(PreconditionError):
        emit_certificate(CertificateKind.THEOREM2, 10, 2)


def test_certificate_json():
    for cert in impossibility_2d(12) + [impossibility_3d(35), exact_value_certificate(25)]:
        restored = certificate_from_json(certificate_to_json(cert))
        assert restored == cert
        check_certificate(restored)
    with pytest.raises(PreconditionError):
        certificate_from_json('{"kind": "PolyaNoN"}')


def test_completion_round_trip():
    rng = np.random.default_rng(4)
    odd = [n for n in range(5, 100, 2) if math.gcd(n, 6) == 1]
    for _ in range(100):
        n = odd[int(rng.integers(0, len(odd)))]
        full = construct_lemma1(n).placement
        index = int(rng.integers(0, n))
        removed = full.queens[index]

        completion = complete_placement(full.without(index))
        assert (completion.column, completion.row) == removed
        assert completion.a_plus == (removed[0] + removed[1]) % n
        assert completion.a_minus == (removed[0] - removed[1]) % n
        assert completion.placement.sorted() == full.sorted()
        assert verify_by_maps(completion.placement).independent


def test_completion_preconditions():
    with pytest.raises(PreconditionError):
        complete_placement(construct_lemma1(7).placement)
    short = construct_lemma3(9).placement
    with pytest.raises(PreconditionError):
        complete_placement(short)
    with pytest.raises(PreconditionError):
        complete_placement(construct_lemma2(10).placement)


def test_moment_diagnostic():
    perfect = moment_diagnostic(construct_theorem3(11, 3).placement)
    assert perfect.perfect_size
    assert perfect.consistent
    assert perfect.checked == 13 * 25

    assert moment_diagnostic(construct_lemma1(7).placement).consistent

    short = moment_diagnostic(construct_lemma3(9).placement)
    assert not short.perfect_size
    assert not short.consistent


if __name__ == '__main__':
    pytest.main([__file__])
