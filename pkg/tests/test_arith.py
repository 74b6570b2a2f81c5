import random
from fractions import Fraction

import pytest

from qgt.arith import EvalConfig, HalfInt, det, q_power, qpochhammer, qpochhammer_inf
from qgt.errors import ExactModeUnsupported, HalfPowerUnavailable


def test_halfint_exact_ops():
    a, b = HalfInt.of(Fraction(3, 2)), HalfInt.of(2)
    assert (a + b).as_fraction() == Fraction(7, 2)
    assert (b - a).as_fraction() == Fraction(1, 2)
    assert 2 * a == HalfInt.of(3)
    assert a < b and not a.is_integral and b.is_integral


def test_q_power_examples(cfg, cfg4):
    assert q_power(cfg4, Fraction(1, 2)) == Fraction(1, 2)
    assert q_power(cfg, 0) == 1
    assert q_power(cfg, 3) == Fraction(1, 8)
    with pytest.raises(HalfPowerUnavailable):
        q_power(cfg, Fraction(1, 2))


def test_q_power_additive(cfg4):
    for a in range(-6, 7):
        for b in range(-6, 7):
            x, y = Fraction(a, 2), Fraction(b, 2)
            assert q_power(cfg4, x + y) == q_power(cfg4, x) * q_power(cfg4, y)


def test_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(Fraction(3, 2))
    with pytest.raises(ValueError):
        EvalConfig(Fraction(1, 2), sqrt_q=Fraction(1, 2))
    assert EvalConfig(Fraction(1, 9)).sqrt_q == Fraction(1, 3)


def test_qpochhammer_examples(cfg):
    assert qpochhammer(cfg, 0, 5) == 1
    assert qpochhammer(cfg, Fraction(1, 2), 2) == Fraction(3, 8)
    assert qpochhammer(cfg, Fraction(7, 3), 0) == 1


def test_qpochhammer_split(cfg):
    rng = random.Random(3)
    for _ in range(50):
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        n, m = rng.randint(0, 6), rng.randint(0, 6)
        assert qpochhammer(cfg, a, n + m) == qpochhammer(cfg, a, n) * qpochhammer(cfg, a * cfg.q ** n, m)


def test_qpochhammer_inf(fcfg, cfg):
    oracle = 1.0
    for i in range(1, 121):
        oracle *= 1 - 0.5 ** i
    assert abs(complex(qpochhammer_inf(fcfg, 0.5, 1e-30)) - oracle) < 1e-15
    assert complex(qpochhammer_inf(fcfg, 0, 1e-30)) == 1
    assert abs(complex(qpochhammer_inf(fcfg, 1, 1e-30))) == 0
    with pytest.raises(ExactModeUnsupported):
        qpochhammer_inf(cfg, Fraction(1, 2), 1e-30)


def test_float_backend_matches_exact(cfg, fcfg):
    rng = random.Random(7)
    for _ in range(1000):
        a = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
        n = rng.randint(0, 8)
        exact = qpochhammer(cfg, a, n)
        approx = complex(qpochhammer(fcfg, a, n))
        assert abs(approx - float(exact)) <= 2.0 ** (-120) * max(1.0, abs(float(exact)))


def test_det_exact_and_float():
    m = [[Fraction(2), Fraction(1), Fraction(0)], [Fraction(1), Fraction(3), Fraction(1)], [Fraction(0), Fraction(1), Fraction(4)]]
    assert det(m) == 18
    assert abs(det([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]) - 18) < 1e-12
    assert det([[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]) == -1
