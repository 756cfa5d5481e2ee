import random
from fractions import Fraction

import pytest

from affsurf.errors import DenominatorZero
from affsurf.relinv import (SIGN_I30, SIGN_PICK, order4_G_block, order4_G_block_pipeline,
                            pick_factorization_check, pick_numerator, pipeline_G3, rel_I30,
                            weight_law_G1)
from affsurf.scalar import S
from affsurf.series import Series2, polynomial
from affsurf.verify import random_rank2_jet

B1_JET = {(1, 1): 1, (3, 0): 1, (0, 3): 1}


def test_pick_examples():
    assert pick_numerator(B1_JET) == S(8)
    assert pick_numerator({(1, 1): 1}) == S(0)
    assert pick_numerator({(1, 1): 1, (3, 0): 1}) == S(0)


def test_rel_i30_examples():
    # the closed form is the negative of the pipeline value
    assert rel_I30(B1_JET) == SIGN_I30 * S(1)
    assert rel_I30({(1, 1): 1}) == S(0)
    assert rel_I30({(1, 1): 1, (0, 3): 1}) == S(0)


def test_rel_i30_domain():
    with pytest.raises(DenominatorZero):
        rel_I30({(2, 0): 1, (1, 1): -1, (0, 2): 1, (3, 0): 1})


def test_pipeline_g3_on_b1_jet():
    F = Series2.from_factorial(3, {k: S(v) for k, v in B1_JET.items()})
    assert pipeline_G3(F) == (S(1), S(1))


def test_rel_i30_matches_pipeline_on_random_jets():
    rng = random.Random(70)
    for _ in range(20):
        F = random_rank2_jet(rng)
        assert pipeline_G3(F)[0] == SIGN_I30 * rel_I30(F)


def test_pick_check_examples():
    chk = pick_factorization_check(B1_JET)
    assert chk.lhs == S(1) and chk.rhs == S(-1) and chk.signFlag == "opposite"
    chk = pick_factorization_check({(1, 1): 1})
    assert chk.lhs == S(0) and chk.rhs == S(0) and chk.signFlag == "both"


def test_pick_sign_constant_on_random_jets():
    rng = random.Random(71)
    flags = set()
    for _ in range(20):
        chk = pick_factorization_check(random_rank2_jet(rng))
        assert chk.lhs == SIGN_PICK * chk.rhs
        flags.add(chk.signFlag)
    assert flags <= {"opposite", "both"} and SIGN_PICK == -1


def test_order4_block_examples():
    out = order4_G_block({(3, 0): 1, (4, 0): 3})
    assert out[(4, 0)] == S(3)
    assert all(v.is_zero() for k, v in out.items() if k != (4, 0))
    assert order4_G_block({(2, 1): 1, (3, 0): 1})[(4, 0)] == S(-2)


def test_order4_block_matches_pipeline():
    rng = random.Random(72)
    for _ in range(10):
        vals = {(1, 1): 1}
        for d in (3, 4):
            for j in range(d + 1):
                vals[(j, d - j)] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        vals[(3, 0)] = Fraction(rng.randint(1, 4))
        F = Series2.from_factorial(4, {k: S(v) for k, v in vals.items()})
        assert order4_G_block(F) == order4_G_block_pipeline(F)


def test_order4_block_needs_f30():
    with pytest.raises(DenominatorZero):
        order4_G_block({(1, 1): 1})


def test_weight_law():
    rng = random.Random(73)
    for _ in range(10):
        F = polynomial(4, {(1, 1): 1, (3, 0): Fraction(rng.randint(1, 5), 6),
                           (0, 3): Fraction(rng.randint(-5, -1), 6),
                           (2, 1): Fraction(rng.randint(-3, 3), 2)})
        mu, lam = S(Fraction(rng.randint(1, 7), 3)), S(Fraction(rng.randint(-7, -1), 2))
        k, l = S(Fraction(rng.randint(-3, 3), 5)), S(Fraction(rng.randint(-3, 3), 7))
        r30, r03 = weight_law_G1(F, mu, lam, k, l)
        assert r30 == lam / (mu * mu) and r03 == mu / (lam * lam)
