import random

import pytest

from x0plus import arith, modsym, pointcount


def test_request_validation():
    with pytest.raises(pointcount.BadReduction):
        pointcount.make_request(268, {268}, 2, 2)
    with pytest.raises(ValueError):
        pointcount.make_request(11, {}, 3, 3)


def test_table_examples(spaces):
    s268 = spaces(268)
    assert pointcount.count_points(pointcount.make_request(268, {268}, 3, 2), s268) == 46
    s273 = spaces(273)
    assert pointcount.count_points(pointcount.make_request(273, {273}, 2, 2), s273) == 26


def test_genus_zero_gives_q_plus_one(spaces):
    assert pointcount.count_points(pointcount.make_request(10, {}, 3, 1), spaces(10)) == 4
    assert pointcount.count_points(pointcount.make_request(10, {}, 7, 2), spaces(10)) == 50


def test_x0_11_over_f2(spaces):
    assert pointcount.count_points(pointcount.make_request(11, {}, 2, 1), spaces(11)) == 5


def test_hasse_weil_window_function():
    assert pointcount.hasse_weil_window(0, 9) == (10, 10)
    assert pointcount.hasse_weil_window(1, 4) == (1, 9)
    assert pointcount.hasse_weil_window(7, 9) == (0, 52)


def test_counts_in_hasse_weil_window(spaces):
    rng = random.Random(11)
    samples = 0
    while samples < 40:
        n = rng.randint(11, 120)
        p = rng.choice((2, 3, 5, 7, 11, 13))
        r = rng.choice((1, 2))
        if n % p == 0:
            continue
        keys = rng.choice(([], [n]))
        s = spaces(n)
        req = pointcount.make_request(n, keys, p, r)
        count = pointcount.count_points(req, s)
        g = modsym.genus_plus(s) if keys else arith.genus_x0(n)
        lo, hi = pointcount.hasse_weil_window(g, p**r)
        assert lo <= count <= hi
        samples += 1


def test_field_extension_monotone(spaces):
    for n, p in ((11, 3), (37, 2), (67, 2), (88, 3)):
        s = spaces(n)
        c1 = pointcount.count_points(pointcount.make_request(n, {n}, p, 1), s)
        c2 = pointcount.count_points(pointcount.make_request(n, {n}, p, 2), s)
        assert c2 >= c1


def test_quotient_dominance(spaces):
    # every F_q point upstairs maps to an F_q point of the quotient
    for n, p, r in ((37, 2, 1), (88, 3, 2), (117, 2, 2)):
        s = spaces(n)
        up = pointcount.count_points(pointcount.make_request(n, {}, p, r), s)
        down = pointcount.count_points(pointcount.make_request(n, {n}, p, r), s)
        assert down >= -(-up // 2)
