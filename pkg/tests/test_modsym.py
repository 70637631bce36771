"""Modular-symbol layer: presentation dimensions, cusp classes, operators.

The Atkin-Lehner traces are checked against an independent oracle: the
fixed points of w_Q on X_0(QM) (for gcd(Q, M) = 1, Q > 4) are counted by
h(-4Q) * prod_{p | M} (1 + (-4Q|p)) where h is the class number of
binary quadratic forms, and the Riemann-Hurwitz formula turns the trace
into that fixed-point count via  #fixed = 2 - trace(w_Q | cuspidal).
"""

import random

import pytest

from x0plus import arith, modsym
from x0plus.exactla import ExactMatrix


def test_p1_sizes(spaces):
    for n in (2, 11, 268):
        assert len(modsym.p1_list(arith.as_level(n))) == arith.psi(n)


def test_p1_normal_form_unique():
    for n in (12, 30, 49):
        seen = set()
        for u in range(n):
            for v in range(n):
                w = modsym.p1_normalize(n, u, v)
                if w is not None:
                    seen.add(w)
        assert len(seen) == arith.psi(n)
        for u, v in seen:
            assert modsym.p1_normalize(n, u, v) == (u, v)
            for c in (2, 3, 5, 7):
                if arith.gcd(c, n) == 1:
                    assert modsym.p1_normalize(n, c * u, c * v) == (u, v)


def test_build_space_dimensions(spaces):
    s11 = spaces(11)
    assert s11.dimension == 3 and s11.cuspidal_dimension == 2
    s10 = spaces(10)
    assert s10.dimension == 3 and s10.cuspidal_dimension == 0
    assert modsym.build_space(1).dimension == 0


def test_boundary_kernel_dims(spaces):
    assert spaces(10).cuspidal_dimension == 0
    assert spaces(11).cuspidal_dimension == 2
    assert spaces(22).cuspidal_dimension == 4
    b = spaces(22).boundary_map()
    assert b.rows == arith.nu_inf(22)
    assert b.cols - b.rank() == 4


def test_cusp_equivalence():
    # at prime level the two classes are 0 and infinity; 1/11 has
    # denominator 11 and lies in the class of infinity, not of 0
    assert not modsym.cusp_equivalent((0, 1), (1, 11), 11)
    assert modsym.cusp_equivalent((1, 0), (1, 11), 11)
    assert not modsym.cusp_equivalent((1, 0), (0, 1), 11)
    assert modsym.cusp_equivalent((1, 2), (1, 2), 35)
    for n in (11, 24, 36, 49):
        reps = modsym.cusp_representatives(arith.as_level(n))
        assert len(reps) == arith.nu_inf(n)
        for i, a in enumerate(reps):
            for j, b in enumerate(reps):
                assert modsym.cusp_equivalent(a, b, n) == (i == j)


def test_cuspidal_dim_equals_2g_up_to_300(spaces):
    for n in range(1, 301):
        assert modsym.build_space(n).cuspidal_dimension == 2 * arith.genus_x0(n)


def test_hecke_traces_level_11(spaces):
    s = spaces(11)
    assert s.hecke_matrix(2).trace() == -4
    assert s.hecke_matrix(3).trace() == -2
    with pytest.raises(ValueError):
        s.hecke_matrix(11)


def test_hecke_trace_even_integer(spaces):
    for n in (23, 37, 50, 54):
        s = spaces(n)
        for p in (2, 3, 5):
            if n % p:
                t = s.hecke_matrix(p).trace()
                assert t.denominator == 1 and int(t) % 2 == 0


def test_atkin_lehner_basics(spaces):
    s = spaces(11)
    assert s.atkin_lehner_trace(11) == -2
    assert modsym.genus_plus(s) == 0
    assert spaces(130).fixed_cuspidal_dimension({130}) == 16
    assert spaces(271).fixed_cuspidal_dimension({271}) == 12
    with pytest.raises(ValueError):
        spaces(130).atkin_lehner_matrix(7)


def test_fixed_subspace_dimensions(spaces):
    assert spaces(78).fixed_cuspidal_dimension({2, 78}) == 2
    s = spaces(17)
    assert s.fixed_cuspidal_dimension({17}) == 2 * modsym.genus_plus(s)


def test_fixed_dimension_186_corrected(spaces):
    # the published table prints quotient genus 3 here; the computed
    # fixed subspace has dimension 8 (genus 4), confirmed by the
    # class-number fixed-point oracle below
    assert spaces(186).fixed_cuspidal_dimension({3, 186}) == 8


@pytest.mark.xfail(
    strict=True, reason="published table cell says quotient genus 3 at level 186"
)
def test_fixed_dimension_186_as_published(spaces):
    assert spaces(186).fixed_cuspidal_dimension({3, 186}) == 6


def test_quotient_genus_examples(spaces):
    assert modsym.quotient_genus(spaces(130), {130}) == 8
    assert modsym.quotient_genus(spaces(120), {8, 120}) == 2
    assert modsym.quotient_genus(spaces(420), {3, 420}) == 17


def test_al_group_closure():
    lvl = arith.as_level(210)
    group = modsym.al_group_closure({2, 105}, lvl)
    assert group == [1, 2, 105, 210]
    assert modsym.al_group_closure({210}, lvl) == [1, 210]


def test_operator_commutation_and_involution(spaces):
    rng = random.Random(7)
    candidates = [n for n in range(11, 201) if arith.genus_x0(n) > 0]
    for _ in range(12):
        n = rng.choice(candidates)
        s = spaces(n)
        primes = [p for p in (2, 3, 5, 7) if n % p][:2]
        if len(primes) == 2:
            tp, tq = s.hecke_matrix(primes[0]), s.hecke_matrix(primes[1])
            assert tp.multiply(tq) == tq.multiply(tp)
        qs = [q for q in arith.exact_divisors(n) if q > 1]
        q = rng.choice(qs)
        w = s.atkin_lehner_matrix(q)
        assert w.square() == ExactMatrix.identity(w.rows)
        if primes:
            tp = s.hecke_matrix(primes[0])
            assert w.multiply(tp) == tp.multiply(w)


def test_eigenspace_dims_sum(spaces):
    for n in (37, 57, 91):
        s = spaces(n)
        for q in arith.exact_divisors(n):
            if q == 1:
                continue
            t = s.atkin_lehner_trace(q)
            dim = s.cuspidal_dimension
            plus = (dim + t) // 2
            minus = (dim - t) // 2
            assert plus + minus == dim and plus >= 0 and minus >= 0


def test_sign_pattern_dims_sum_squarefree(spaces):
    # squarefree N: eigenspace dims over all sign patterns of the full
    # Atkin-Lehner group partition the cuspidal space
    for n in (66, 105):
        s = spaces(n)
        prime_qs = [p**e for p, e in arith.as_level(n).factorization]
        total = 0
        for mask in range(2 ** len(prime_qs)):
            # dim of the simultaneous eigenspace with signs from mask, via
            # the averaged projector trace over the full group
            group = modsym.al_group_closure(set(prime_qs), arith.as_level(n))
            acc = 0
            for g in group:
                sign = 1
                for i, q in enumerate(prime_qs):
                    if mask >> i & 1 and arith.gcd(g, q) > 1:
                        sign = -sign
                acc += sign * s.atkin_lehner_trace(g)
            assert acc % len(group) == 0
            total += acc // len(group)
        assert total == s.cuspidal_dimension


# -- independent class-number oracle for Atkin-Lehner traces ---------------


def _h(D):
    """Class number of primitive binary quadratic forms of discriminant
    D < 0, by direct enumeration of reduced forms (|b| <= a <= c, with
    b >= 0 when |b| = a or a = c)."""
    count = 0
    b = D & 1
    while 3 * b * b <= -D:
        q = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= q:
            if q % a == 0:
                c = q // a
                if arith.gcd(arith.gcd(a, b), c) == 1:
                    count += 1 if b == 0 or a == b or a == c else 2
            a += 1
        b += 2
    return count


def _fixed_points_oracle(Q, M):
    """Number of fixed points of w_Q on X_0(QM), for Q > 4 exactly
    dividing QM, M odd squarefree coprime to Q (Fricke fixed-point
    formula via class numbers of the orders of discriminant -4Q, and
    also -Q when Q = 3 mod 4)."""
    discs = [-4 * Q]
    if Q % 4 == 3:
        discs.append(-Q)
    total = 0
    for disc in discs:
        term = _h(disc)
        for p, _ in arith.as_level(M).factorization:
            term *= 1 + arith.kronecker(disc, p)
        total += term
    return total


def test_atkin_lehner_trace_against_class_numbers(spaces):
    assert _h(-4) == 1 and _h(-20) == 2 and _h(-84) == 4 and _h(-248) == 8
    for Q, M in ((7, 1), (11, 1), (23, 1), (7, 3), (11, 5), (31, 5), (62, 3)):
        fixed = _fixed_points_oracle(Q, M)
        s = spaces(Q * M)
        assert 2 - s.atkin_lehner_trace(Q) == fixed
