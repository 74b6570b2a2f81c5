from fractions import Fraction

import pytest

from qgt.arith import EvalConfig
from qgt.chars import bcd_eval
from qgt.contour import (
    BoundaryPointA,
    BoundaryPointBC,
    QuadratureSpec,
    bcd_finiteN_integral,
    bcd_multivar_det,
    bcd_ratio,
    bcd_ratio_multi,
    c_k,
    c_kN,
    phiA,
    phiA_multivar,
    phiBCD,
    phiBCD_multivar,
    schur_ratio,
    schur_ratio_multi,
    typeA_finiteN_residue,
    typeA_finiteN_strip,
    typeA_multivar_det,
)
from qgt.errors import DomainViolation, PoleNeighborhood

# Limits frozen from direct character ratios at large N (float, 256 bits):
# type A at N = 80 with b = 40, types B/C/D at N = 60; they agree with N = 70 / 50 to about 1e-11.
T13 = BoundaryPointA(0, (1,), 1, 3)
Y012 = BoundaryPointBC((0, 1, 2))
PHI_A_13 = 1.2250500872302925
PHI_A_13_MULTI = 1.3956909106704536 + 0.09130528771234699j
PHI_BCD_0 = {"B": 0.9815675544520148, "C": 0.8715209240176561, "D": 1.0325951016440247}
PHI_BCD_1 = {"B": 0.5522278710537705 - 0.07558558911373352j, "C": 0.40680261097370246 - 0.05543079633911313j,
             "D": 0.6372065309850544 - 0.11108513339840563j}
PHI_BCD_MULTI = {"B": 0.6574822032989478, "C": 0.4173696653700661, "D": 0.8418623482856583}


@pytest.fixture(scope="module")
def f256():
    return EvalConfig(Fraction(1, 2), mode="float", float_precision_bits=256)


def test_residue_examples(cfg):
    assert typeA_finiteN_residue((0, 0, 0), 3, 1, 2, cfg) == 1
    assert typeA_finiteN_residue((1, 0), 2, 1, 3, cfg) == Fraction(3, 4)
    assert typeA_finiteN_residue((2, 1, 0), 3, 1, 2, cfg) == schur_ratio((2, 1, 0), 1, Fraction(1, 4), cfg)


def test_residue_at_apparent_singularities(cfg):
    # a = b makes x coincide with the replaced point; the result is the ratio itself
    for lam in [(2, 0, -1), (3, 3, 1, 0)]:
        N = len(lam)
        for b in range(1, N):
            for a in range(N + 3):
                assert typeA_finiteN_residue(lam, N, b, a, cfg) == schur_ratio(lam, b, cfg.q ** a, cfg)


def test_strip_examples(fcfg):
    q = 0.5
    assert abs(complex(typeA_finiteN_strip((0, 0, 0), 3, 1, 1.3, fcfg)) - 1) < 1e-9
    # s_(1,0)(1, q x) / s_(1,0)(1, q) at x = 1.5
    assert abs(complex(typeA_finiteN_strip((1, 0), 2, 1, 1.5, fcfg)) - 1.75 / 1.5) < 1e-9
    ref = complex(schur_ratio((2, 1, 0, 0), 2, q ** 2 * 1.3, fcfg))
    assert abs(complex(typeA_finiteN_strip((2, 1, 0, 0), 4, 2, 1.3, fcfg)) - ref) < 1e-10


def test_strip_shift_independence(fcfg):
    vals = [complex(typeA_finiteN_strip((2, 1, 0, -1), 4, 2, 0.9 + 0.3j, fcfg, QuadratureSpec(shift=R)))
            for R in (-2.0, 0.0, 2.0)]
    assert max(abs(v - vals[1]) for v in vals) < 1e-9


def test_strip_domain(fcfg):
    with pytest.raises(DomainViolation):
        typeA_finiteN_strip((1, 0), 2, 1, 10.0, fcfg)
    with pytest.raises(DomainViolation):
        typeA_finiteN_strip((1, 0), 2, 1, -1.0, fcfg)


def test_bcd_examples(cfg, cfg4):
    fc = cfg.with_mode("float")
    for G in "BCD":
        assert abs(complex(bcd_finiteN_integral(G, (0, 0), 2, 1, 1.3, fc)) - 1) < 1e-12
    assert bcd_finiteN_integral("C", (1,), 1, 0, Fraction(1, 4), cfg, method="residue") == Fraction(17, 10)
    assert abs(complex(bcd_finiteN_integral("C", (1,), 1, 0, 0.25, fc)) - 1.7) < 1e-9
    f4 = cfg4.with_mode("float")
    ref = complex(bcd_ratio("B", (1, 0), 1, 2.0, f4))
    assert abs(complex(bcd_finiteN_integral("B", (1, 0), 2, 1, 2.0, f4)) - ref) < 1e-9 * abs(ref)


@pytest.mark.parametrize("method", ["residue", "contour", "strip"])
def test_bcd_methods_agree(method, cfg):
    fc = cfg.with_mode("float")
    for G, lam, m, x in [("C", (2, 1), 1, 1.3 + 0.2j), ("D", (2, 0), 1, 1.4), ("C", (3, 1, 0), 1, 0.8)]:
        ref = complex(bcd_ratio(G, lam, m, x, fc))
        val = complex(bcd_finiteN_integral(G, lam, len(lam), m, x, fc, method=method))
        assert abs(val - ref) < 1e-9 * abs(ref)


def test_multivar_examples(cfg):
    q = cfg.q
    xs = (q ** 3, q ** -1)
    assert typeA_multivar_det((2, 1, 0, 0), 4, 1, 2, xs, cfg) == schur_ratio_multi((2, 1, 0, 0), 1, xs, cfg)
    assert typeA_multivar_det((0, 0, 0), 3, 1, 2, xs, cfg) == 1
    assert typeA_multivar_det((3, 1, 0), 3, 1, 1, (q ** 2,), cfg) == schur_ratio((3, 1, 0), 1, q ** 3, cfg)
    ys = (q ** 3, q ** 2)
    assert bcd_multivar_det("C", (2, 1), 2, 2, ys, cfg) == bcd_ratio_multi("C", (2, 1), ys, cfg)
    assert bcd_multivar_det("D", (0, 0, 0), 3, 2, ys, cfg) == 1


def test_c_k_is_limit(f256):
    for G in "BCD":
        assert abs(complex(c_kN(G, 2, 60, f256)) - complex(c_k(G, 2, f256))) < 1e-12


def test_phiA_examples(fcfg):
    assert abs(complex(phiA(BoundaryPointA.constant(0), 0.7, fcfg)) - 1) < 1e-9
    x = 1.3 + 0.2j
    assert abs(complex(phiA(BoundaryPointA.constant(2), x, fcfg)) - x ** 2) < 1e-9
    assert abs(complex(phiA(T13, 1.3, fcfg)) - PHI_A_13) < 1e-9
    assert abs(complex(phiA_multivar(T13, (1.3, 0.7 + 0.1j), fcfg)) - PHI_A_13_MULTI) < 1e-9


def test_phiA_against_finite_ratio(fcfg):
    t = BoundaryPointA(0, (), 1, 1)
    lam = tuple([1] * 20 + [0] * 20)
    ref = complex(schur_ratio(lam, 20, 0.5 ** 20 * 1.3, fcfg))
    assert abs(complex(phiA(t, 1.3, fcfg)) - ref) < 1e-6


def test_phiA_refuses_near_poles(fcfg):
    with pytest.raises(PoleNeighborhood):
        phiA(T13, 2.0005, fcfg)
    near = complex(phiA(T13, 2.0, fcfg, continuation=True))
    assert abs(near - complex(phiA(T13, 2.01, fcfg))) < 0.05


def test_phiA_multivar_normalization(fcfg):
    for t in (T13, BoundaryPointA(-1, (0, 2), 0, 2)):
        assert abs(complex(phiA_multivar(t, (1.0, 0.5), fcfg, continuation=True)) - 1) < 1e-8
    assert abs(complex(phiA_multivar(BoundaryPointA.constant(0), (1.3, 0.6), fcfg)) - 1) < 1e-9


@pytest.mark.parametrize("G", ["B", "C", "D"])
def test_phiBCD_values(G, fcfg):
    assert abs(complex(phiBCD(G, BoundaryPointBC((0,)), 0, 1.7, fcfg)) - 1) < 1e-9
    assert abs(complex(phiBCD(G, Y012, 0, 1.3, fcfg)) - PHI_BCD_0[G]) < 1e-9
    assert abs(complex(phiBCD(G, Y012, 1, 0.6 + 0.5j, fcfg)) - PHI_BCD_1[G]) < 1e-9
    x = 0.6 + 0.5j
    assert abs(complex(phiBCD(G, Y012, 1, x, fcfg)) - complex(phiBCD(G, Y012, 1, 1 / x, fcfg))) < 1e-8


@pytest.mark.parametrize("G", ["B", "C", "D"])
def test_phiBCD_multivar(G, fcfg):
    assert abs(complex(phiBCD_multivar(G, Y012, (1.3, 0.8), fcfg)) - PHI_BCD_MULTI[G]) < 1e-9
    assert abs(complex(phiBCD_multivar(G, BoundaryPointBC((0,)), (1.3, 0.8), fcfg)) - 1) < 1e-9


def test_phiBCD_multivar_C_against_N36(fcfg):
    y = BoundaryPointBC((0, 1, 1))
    lam = tuple([1] * 35 + [0])
    ref = complex(bcd_ratio_multi("C", lam, (1.3, 0.8), fcfg))
    assert abs(complex(phiBCD_multivar("C", y, (1.3, 0.8), fcfg)) - ref) < 1e-5


def test_phiBCD_normalization(fcfg):
    for G, point in (("C", 0.5), ("D", 1.0)):
        val = phiBCD(G, Y012, 0, point, fcfg, continuation=True)
        assert abs(complex(val) - 1) < 1e-8


def test_direct_ratio_exact_oracle(cfg):
    # chi^C_(1)(q^2) / chi^C_(1)(q) at q = 1/2, by the Weyl ratio
    assert bcd_eval("C", (1,), [Fraction(1, 4)]) / bcd_eval("C", (1,), [Fraction(1, 2)]) == Fraction(17, 10)
