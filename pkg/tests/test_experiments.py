import pytest

from qgt.chars import Signature
from qgt.contour import BoundaryPointA, BoundaryPointBC
from qgt.experiments import (
    canonical_sequence_A,
    canonical_sequence_BC,
    concentration_experiment,
    convergence_experiment,
    lln_experiment,
    martin_experiment,
    stabilizes_A,
    stabilizes_BC,
)
from qgt.graph import SignSequence

ALT = SignSequence.alternating()
T13 = BoundaryPointA(0, (1,), 1, 3)
T11 = BoundaryPointA(0, (), 1, 1)
Y012 = BoundaryPointBC((0, 1, 2))


def test_canonical_sequences():
    assert canonical_sequence_A(T13, ALT, 6) == Signature((3, 3, 1, 0, 0, 0))
    assert canonical_sequence_A(T11, ALT, 5) == Signature((1, 1, 0, 0, 0))
    assert canonical_sequence_A(T13, SignSequence.constant(1), 3) == Signature((0, 0, 0))
    assert canonical_sequence_BC(Y012, 5) == (2, 2, 2, 1, 0)
    assert canonical_sequence_BC(Y012, 1) == (0,)
    for N in range(2, 9):
        assert stabilizes_A(canonical_sequence_A(T13, ALT, N), T13, ALT.b(N))
        assert stabilizes_BC(canonical_sequence_BC(Y012, N), Y012)
    with pytest.raises(ValueError):
        canonical_sequence_BC(Y012, 0)


@pytest.mark.parametrize("family,point,xs", [
    ("A", T13, (1.3,)),
    ("A", T13, (1.3, 0.7 + 0.1j)),
    ("C", Y012, (1.3,)),
    ("D", Y012, (1.3, 0.8)),
])
def test_convergence(family, point, xs, cfg):
    rep = convergence_experiment(family, point, len(xs), xs, (10, 20, 40), cfg)
    errs = [r["error"] for r in rep.rows]
    assert rep.verdict, errs
    assert errs[-1] <= 1e-6
    assert rep.to_dict()["parameters"]["N_list"] == [10, 20, 40]


def test_convergence_reports_failure(cfg):
    rep = convergence_experiment("C", Y012, 1, (1.3,), (4, 6), cfg)
    assert not rep.verdict and rep.to_dict()["verdict"] == "fail"


def test_lln_type_a_exact(cfg):
    rep = lln_experiment("A", T11, 3, 20, 0, 0, cfg)
    assert rep.verdict and all(r["exact"] for r in rep.rows)
    assert rep.notes["joint_frequency"] >= 0.99


def test_lln_bc_sampled(cfg):
    rep = lln_experiment("C", Y012, 3, 10, 500, 3, cfg)
    assert rep.verdict
    assert rep.rows[0]["frequency"] >= 0.99


def test_concentration(cfg):
    rep = concentration_experiment("C", Y012, 2, range(5, 9), 20_000, 1, cfg)
    assert rep.verdict
    assert rep.notes["C_exact"] <= 20
    for r in rep.rows:
        assert r["exact_probability"] <= 20 * 0.5 ** r["rate"]


def test_martin_type_a_k1(cfg):
    rep = martin_experiment("A", T11, 1, (16, 24, 32, 40), cfg)
    assert rep.verdict
    m = rep.notes["M_k"]
    assert abs(float(m["1"]) - 0.38967843273484193) < 1e-12
    assert abs(float(m["0"]) + float(m["1"]) - 1) < 1e-12


def test_martin_trivial_point(cfg):
    rep = martin_experiment("A", BoundaryPointA.constant(0), 2, (6, 8, 10), cfg)
    assert [r["tv_to_previous"] for r in rep.rows[1:]] == [0, 0]


@pytest.mark.xfail(strict=True, reason="TV at k = 2 shrinks by q^4 per 8 levels: 4.4e-6 at N = 40")
def test_martin_type_a_k2_at_40(cfg):
    rep = martin_experiment("A", T11, 2, (16, 24, 32, 40), cfg)
    assert rep.verdict


def test_martin_type_a_k2_at_48(cfg):
    rep = martin_experiment("A", T11, 2, (16, 24, 32, 40, 48), cfg)
    tvs = [r["tv_to_previous"] for r in rep.rows[1:]]
    assert rep.verdict
    # one factor q^4 per 8 levels
    for a, b in zip(tvs, tvs[1:]):
        assert abs(b / a - 1 / 16) < 1e-3


def test_martin_bc_monte_carlo(cfg):
    rep = martin_experiment("C", Y012, 1, (6, 10), cfg, samples=2000, seed=5)
    assert rep.parameters["samples"] == 2000
    assert rep.rows[1]["tv_to_previous"] < 0.05
