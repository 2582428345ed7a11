from fractions import Fraction as F

import pytest

from losmax.oracle import evaluate_f, global_max_bruteforce, local_probe
from losmax.polytope import GuardError, enumerate_vertices


@pytest.mark.parametrize("point, value", [((1,), 1), ((1, 2, 4), F(7, 4)), ((F(5, 4), F(3, 2)), F(22, 15))])
def test_evaluate_f(point, value):
    assert evaluate_f(point) == value


def test_evaluate_f_zero():
    with pytest.raises(ValueError):
        evaluate_f((1, 0))


def test_brute_n1():
    r = global_max_bruteforce(1)
    assert r.best_vertex == (1,) and r.best_value == 1 and r.unique


def test_brute_n2():
    r = global_max_bruteforce(2, keep_values=True)
    assert r.best_vertex == (1, 2) and r.best_value == F(3, 2) and r.unique
    assert dict(r.all_values)[(F(5, 4), F(3, 2))] == F(22, 15)


def test_brute_n4():
    r = global_max_bruteforce(4)
    assert r.best_vertex == (1, 2, 4, 6) and r.best_value == F(23, 12)
    assert r.alpha_is_unique_max


def test_alpha_dominates_every_vertex():
    for n in range(1, 6):
        verts = enumerate_vertices(n)
        r = global_max_bruteforce(n, vertices=verts, keep_values=True)
        fa = evaluate_f(r.alpha)
        for point, f in r.all_values:
            assert f < fa or point == r.alpha


def test_brute_guard():
    with pytest.raises(GuardError):
        global_max_bruteforce(9)


def test_probe_n1():
    r = local_probe(1, F(3), 200, seed=0)
    assert not r.exceeded and r.accepted == 200


def test_probe_n2():
    r = local_probe(2, F(1, 2), 1000, seed=11)
    assert not r.exceeded and r.accepted > 0


def test_probe_is_deterministic():
    a = local_probe(6, "1/10", 300, seed=5, signed=True)
    b = local_probe(6, "1/10", 300, seed=5, signed=True)
    assert a == b
    assert a != local_probe(6, "1/10", 300, seed=6, signed=True)


def test_signed_probe_reports_discards():
    r = local_probe(10, "1/10", 500, seed=3, signed=True)
    assert r.discarded > 0
    assert r.accepted + r.discarded == 500
    assert not r.exceeded


def test_probe_arguments():
    with pytest.raises(ValueError):
        local_probe(3, 0, 10, 1)
    with pytest.raises(ValueError):
        local_probe(3, 1, 0, 1)
