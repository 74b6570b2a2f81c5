"""Acceptance criteria 1-12.  Each test records one PASS/FAIL line, echoed at the end of the run."""

import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from qgt import suites
from qgt.arith import EvalConfig
from qgt.cli import run
from qgt.contour import BoundaryPointA, BoundaryPointBC, phiA
from qgt.experiments import concentration_experiment, convergence_experiment, lln_experiment
from qgt.graph import SymmetricGraph, boundary_measure, f_mu_functional

Q = Fraction(1, 2)
T13 = BoundaryPointA(0, (1,), 1, 3)
T11 = BoundaryPointA(0, (), 1, 1)
Y012 = BoundaryPointBC((0, 1, 2))


@pytest.fixture(scope="module")
def exact():
    return EvalConfig(Q)


def _record(n, ok, detail, elapsed=None):
    when = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}{when}")
    return ok


def _suite(n, name, cfg, limit=None, **kwargs):
    start = time.perf_counter()
    records = suites.SUITES[name](cfg, **kwargs)
    elapsed = time.perf_counter() - start
    cases = sum(r["cases"] for r in records)
    fails = sum(r["failures"] for r in records)
    worst = max(r["worst"] for r in records)
    ok = fails == 0 and (limit is None or elapsed <= limit)
    _record(n, ok, f"{name}: {cases} cases, {fails} failures, worst {worst:.2e}", elapsed)
    assert fails == 0, [r for r in records if r["failures"]]
    if limit is not None:
        assert elapsed <= limit, f"{elapsed:.0f}s over the {limit}s budget"


def test_criterion_01_typeA_contour(exact):
    _suite(1, "contour-A", exact, limit=300, max_n=6, max_part=3)


def test_criterion_02_bc_contour(exact):
    _suite(2, "contour-BC", exact, limit=600, max_n=4, max_part=3, tol=1e-9)


def test_criterion_03_multivar(exact):
    _suite(3, "multivar", exact, max_n=6, max_k=3, max_part=3, tol=1e-10)


def test_criterion_04_structural(exact):
    _suite(4, "structural", exact, limit=120, max_n=4, max_part=3)


def test_criterion_05_stochastic(exact):
    _suite(5, "stochastic", exact, max_n=7, count=500)


def test_criterion_06_multistep(exact):
    _suite(6, "multistep", exact, max_n=6, max_k=3)


def test_criterion_07_phi(exact):
    _suite(7, "phi", exact, limit=120, tol=1e-8)


def test_criterion_08_convergence(exact):
    start = time.perf_counter()
    cases = [("A", T13, (1.3,)), ("A", T13, (1.3, 0.7 + 0.1j))]
    cases += [(G, Y012, xs) for G in "BCD" for xs in ((1.3,), (1.3, 0.8))]
    finals, ok = [], True
    for fam, point, xs in cases:
        rep = convergence_experiment(fam, point, len(xs), xs, (10, 20, 40), exact, tol=1e-6)
        ok &= rep.verdict
        finals.append(f"{fam}k{len(xs)}={rep.rows[-1]['error']:.1e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed <= 300
    _record(8, ok, "errors at N=40: " + " ".join(finals), elapsed)
    assert ok


def test_criterion_09_lln(exact):
    start = time.perf_counter()
    bc = lln_experiment("C", Y012, 3, 20, 5000, 9, exact)
    a = lln_experiment("A", T11, 3, 20, 0, 0, exact)
    freqs = [r["frequency"] for r in bc.rows]
    ok = bc.verdict and a.verdict and min(freqs) >= 0.99 and a.notes["joint_frequency"] >= 0.99
    _record(9, ok, f"C frequencies {[round(f, 4) for f in freqs]}, "
                   f"A exact joint mass {a.notes['joint_frequency']:.6f}", time.perf_counter() - start)
    assert ok


def test_criterion_10_concentration(exact):
    start = time.perf_counter()
    out, ok = [], True
    for fam, point in (("C", Y012), ("A", T11)):
        rep = concentration_experiment(fam, point, 2, range(5, 16), 100_000, 1, exact, bound=20)
        ok &= rep.verdict and rep.notes["C_hat"] <= 20
        out.append(f"{fam}: C_hat={rep.notes['C_hat']:.2f} (exact {rep.notes['C_exact']:.2f})")
    _record(10, ok, "; ".join(out), time.perf_counter() - start)
    assert ok


def test_criterion_11_fmu_and_boundary(exact):
    start = time.perf_counter()
    records = suites.suite_fmu(exact, tol=1e-8)
    fails = sum(r["failures"] for r in records)
    row = boundary_measure(SymmetricGraph(), T11, 1, exact, N_trunc=40)
    fc = exact.with_mode("float")
    # b(1) = 0, so the shifted point equals t, and s_mu(1) = 1 for k = 1
    gap = max(abs(f_mu_functional("A", mu, lambda z: complex(phiA(T11, z, fc)), 1, exact, grid=32) - float(p))
              for mu, p in row.support.items())
    ok = fails == 0 and gap <= 1e-5
    _record(11, ok, f"orthogonality worst {max(r['worst'] for r in records):.1e}, M_1 vs F_mu(Phi) {gap:.1e}",
            time.perf_counter() - start)
    assert ok


def test_criterion_12_determinism(tmp_path):
    invocations = [
        ["verify", "--suite", "multistep", "--max-n", "4"],
        ["verify", "--suite", "stochastic", "--max-n", "5", "--seed", "3"],
        ["experiment", "lln", "--family", "C", "--point", "0,1,2", "--L", "8", "--samples", "400", "--seed", "2"],
        ["experiment", "concentration", "--family", "A", "--point", "0::1@1", "--k", "2",
         "--N-list", "5,6,7", "--samples", "2000", "--seed", "5", "--threads", "2"],
        ["experiment", "martin", "--family", "C", "--point", "0,1,2", "--N-list", "4,6",
         "--samples", "500", "--seed", "1", "--format", "csv"],
    ]
    same = []
    for i, argv in enumerate(invocations):
        paths = [tmp_path / f"{i}_{j}" for j in range(2)]
        codes = [run(argv + ["--output", str(p)]) for p in paths]
        same.append(codes[0] == codes[1] and paths[0].read_bytes() == paths[1].read_bytes())
    ok = all(same)
    _record(12, ok, f"{sum(same)}/{len(same)} invocations byte-identical on repeat")
    assert ok
