"""Exact-identity verification suites behind ``qgt verify``.

Each suite returns a list of summary records, one per group of cases, with
keys ``suite``, ``group``, ``cases``, ``failures`` and ``worst`` (largest
relative error, 0 for exact suites).  A suite passes iff every record has
zero failures.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .arith import EvalConfig, det, q_power
from .chars import (
    FrobeniusCoords,
    GroupType,
    NonnegSignature,
    Signature,
    bcd_eval,
    bcd_principal,
    frobenius_det_eval,
    hook_char_eval,
    interlacing_lower,
    jacobi_trudi_eval,
    schur_eval,
    schur_principal,
)
from .contour import (
    BoundaryPointA,
    BoundaryPointBC,
    bcd_finiteN_integral,
    bcd_multivar_det,
    bcd_ratio,
    bcd_ratio_multi,
    phiA,
    phiA_multivar,
    phiBCD,
    schur_ratio,
    schur_ratio_multi,
    typeA_finiteN_residue,
    typeA_multivar_det,
)
from .graph import (
    KernelRow,
    SignSequence,
    SymmetricGraph,
    compose,
    f_mu_functional,
    kernelA_multi_exact,
    kernelA_step,
    kernelBC_step,
    skew_bc,
)

ALL_GROUPS = (GroupType.B, GroupType.C, GroupType.D)
# generic evaluation points away from the excluded sets
TEST_POINTS = (1.3, 0.7 + 0.2j, -0.9 + 0.5j, 2.1 - 0.4j, 0.2 + 0.35j, -1.7 + 0.3j)


def signatures(N: int, lo: int, hi: int) -> list[Signature]:
    return [Signature(p) for p in itertools.combinations_with_replacement(range(hi, lo - 1, -1), N)]


def partitions(N: int, hi: int) -> list[NonnegSignature]:
    return [NonnegSignature(p) for p in signatures(N, 0, hi)]


def _record(suite: str, group: str, cases: int, failures: int, worst: float = 0.0) -> dict:
    return {"suite": suite, "group": group, "cases": cases, "failures": failures, "worst": worst}


def _rel(a, b) -> float:
    a, b = complex(a), complex(b)
    return abs(a - b) / max(abs(b), 1e-300)


def _bc_cfg(G: GroupType, cfg: EvalConfig) -> EvalConfig:
    """Type B needs exact half powers; fall back to q = 1/4 when sqrt(q) is irrational."""
    if G is GroupType.B and cfg.exact and cfg.sqrt_q is None:
        return EvalConfig(Fraction(1, 4), None, cfg.float_precision_bits, cfg.mode)
    return cfg


# ---------------------------------------------------------------- contour identities


def suite_contour_A(cfg: EvalConfig, max_n: int = 6, max_part: int = 3) -> list[dict]:
    """Exact residue evaluation against the Schur ratio with x = q^a at position b."""
    out = []
    for N in range(2, max_n + 1):
        cases = fails = 0
        for lam in signatures(N, -max_part, max_part):
            for b in range(1, N):
                for a in range(0, N + 3):
                    cases += 1
                    if typeA_finiteN_residue(lam, N, b, a, cfg) != schur_ratio(lam, b, q_power(cfg, a), cfg):
                        fails += 1
        out.append(_record("contour-A", f"N={N}", cases, fails))
    return out


def suite_contour_BC(cfg: EvalConfig, max_n: int = 4, max_part: int = 3, tol: float = 1e-9,
                     groups=ALL_GROUPS, points=TEST_POINTS) -> list[dict]:
    """Contour quadrature of the B/C/D finite-N identity against the character ratio."""
    out = []
    fcfg = cfg if not cfg.exact else cfg.with_mode("float")
    for G in groups:
        gcfg = fcfg if G is not GroupType.B else EvalConfig(Fraction(1, 4), None, fcfg.float_precision_bits, "float")
        for N in range(1, max_n + 1):
            cases = fails = 0
            worst = 0.0
            for lam in partitions(N, max_part):
                for m in range(N):
                    for x in points:
                        err = _rel(bcd_finiteN_integral(G, lam, N, m, x, gcfg), bcd_ratio(G, lam, m, x, gcfg))
                        cases += 1
                        fails += err > tol
                        worst = max(worst, err)
            out.append(_record("contour-BC", f"{G.value} N={N} q={gcfg.q}", cases, fails, worst))
    return out


def suite_multivar(cfg: EvalConfig, max_n: int = 6, max_k: int = 3, max_part: int = 3,
                   tol: float = 1e-10) -> list[dict]:
    """Determinant reductions: exact at q-power points, relative error at generic float points."""
    out = []
    exact = cfg if cfg.exact else cfg.with_mode("exact")
    fcfg = cfg.with_mode("float")
    qpts = [q_power(exact, a) for a in (-1, 3, -2)]
    fpts = [1.3 + 0.1j, 0.6 - 0.3j, -1.1 + 0.4j]
    for N in range(2, max_n + 1):
        cases = fails = 0
        worst = 0.0
        for k in range(1, min(max_k, N - 1) + 1):
            for lam in signatures(N, 0, max_part):
                for b in range(0, N - k + 1):
                    cases += 2
                    xs = qpts[:k]
                    fails += typeA_multivar_det(lam, N, b, k, xs, exact) != schur_ratio_multi(lam, b, xs, exact)
                    err = _rel(typeA_multivar_det(lam, N, b, k, fpts[:k], fcfg),
                               schur_ratio_multi(lam, b, fpts[:k], fcfg))
                    fails += err > tol
                    worst = max(worst, err)
        out.append(_record("multivar", f"A N={N}", cases, fails, worst))
    for G in ALL_GROUPS:
        gx = _bc_cfg(G, exact)
        gf = gx.with_mode("float")
        gq = [q_power(gx, a) for a in (-1, 3, -2)]
        for N in range(1, max_n + 1):
            cases = fails = 0
            worst = 0.0
            for k in range(1, min(max_k, N) + 1):
                for lam in partitions(N, max_part):
                    cases += 2
                    fails += bcd_multivar_det(G, lam, N, k, gq[:k], gx) != bcd_ratio_multi(G, lam, gq[:k], gx)
                    err = _rel(bcd_multivar_det(G, lam, N, k, fpts[:k], gf), bcd_ratio_multi(G, lam, fpts[:k], gf))
                    fails += err > tol
                    worst = max(worst, err)
            out.append(_record("multivar", f"{G.value} N={N} q={gx.q}", cases, fails, worst))
    return out


# ---------------------------------------------------------------- structural identities


def _rand_points(rng: random.Random, n: int) -> list[Fraction]:
    pts = set()
    while len(pts) < n:
        pts.add(Fraction(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((1, -1)))
    return sorted(pts)


def _rand_bc_points(rng: random.Random, n: int) -> list[Fraction]:
    """Points whose orbits z + 1/z are pairwise distinct."""
    while True:
        pts = _rand_points(rng, n)
        orbits = {z + 1 / z for z in pts}
        if len(orbits) == n:
            return pts


def _giambelli_A(lam, points):
    fc = FrobeniusCoords.from_partition(lam)
    if fc.rank == 0:
        return 1
    return det([[hook_char_eval("schurA", fc.a[i], fc.b[j], len(lam), points) for j in range(fc.rank)]
                for i in range(fc.rank)])


def suite_structural(cfg: EvalConfig, max_n: int = 4, max_part: int = 3, seed: int = 0) -> list[dict]:
    """Branching rules, label-variable dualities and determinantal forms against the Weyl ratio."""
    rng = random.Random(seed)
    exact = cfg if cfg.exact else cfg.with_mode("exact")
    out = []

    # type A branching: s_lam(x, u) = sum_{mu < lam} s_mu(x) u^{|lam|-|mu|}
    cases = fails = 0
    for N in range(1, max_n + 1):
        for lam in signatures(N + 1, -max_part, max_part):
            pts = _rand_points(rng, N + 1)
            x, u = pts[:-1], pts[-1]
            rhs = sum(schur_eval(mu, x) * u ** (lam.size - mu.size) for mu in interlacing_lower(lam))
            cases += 1
            fails += schur_eval(lam, pts) != rhs
    out.append(_record("structural", "A branching", cases, fails))

    # B/C/D branching through the skew weights
    for G in ALL_GROUPS:
        cases = fails = 0
        for N in range(1, max_n):
            for lam in partitions(N + 1, max_part):
                pts = _rand_bc_points(rng, N + 1)
                x, u = pts[:-1], pts[-1]
                lower = partitions(N, max_part)
                rhs = sum(bcd_eval(G, mu, x) * skew_bc(G, lam, mu, u) for mu in lower)
                cases += 1
                fails += bcd_eval(G, lam, pts) != rhs
        out.append(_record("structural", f"{G.value} branching", cases, fails))

    # label-variable duality, type A
    cases = fails = 0
    for N in range(1, max_n + 1):
        sigs = signatures(N, -max_part, max_part)
        for lam, mu in itertools.product(sigs, repeat=2):
            at = lambda a, b: schur_eval(a, [q_power(exact, p + N - 1 - i) for i, p in enumerate(b)]) / \
                schur_principal(a, N, exact)
            cases += 1
            fails += at(lam, mu) != at(mu, lam)
    out.append(_record("structural", "A duality", cases, fails))

    # label-variable duality, B/C/D
    for G in ALL_GROUPS:
        gx = _bc_cfg(G, exact)
        cases = fails = 0
        for N in range(1, max_n + 1):
            parts = partitions(N, max_part)
            for lam, nu in itertools.product(parts, repeat=2):
                at = lambda a, b: bcd_eval(G, a, [q_power(gx, l) for l in G.exponents(b)]) / bcd_principal(G, a, gx)
                cases += 1
                fails += at(lam, nu) != at(nu, lam)
        out.append(_record("structural", f"{G.value} duality q={gx.q}", cases, fails))

    # hook / Giambelli / Jacobi-Trudi / Frobenius against the Weyl ratio
    cases = fails = 0
    for N in range(1, max_n + 1):
        for lam in partitions(N, max_part):
            pts = _rand_points(rng, N)
            cases += 1
            fails += _giambelli_A(lam, pts) != schur_eval(lam, pts)
    out.append(_record("structural", "A Giambelli", cases, fails))
    for G in ALL_GROUPS:
        cases = fails = 0
        for N in range(1, max_n + 1):
            for lam in partitions(N, max_part):
                pts = _rand_bc_points(rng, N)
                ref = bcd_eval(G, lam, pts)
                checks = [jacobi_trudi_eval(G, lam, pts), frobenius_det_eval(G, lam, pts)]
                fc = FrobeniusCoords.from_partition(lam)
                if fc.rank == 1:
                    checks.append(hook_char_eval(G.value, fc.a[0], fc.b[0], N, pts))
                cases += len(checks)
                fails += sum(c != ref for c in checks)
        out.append(_record("structural", f"{G.value} determinantal forms", cases, fails))
    return out


# ---------------------------------------------------------------- kernels


def _random_signature(rng: random.Random, N: int, lo: int, hi: int):
    return sorted((rng.randint(lo, hi) for _ in range(N)), reverse=True)


def suite_stochastic(cfg: EvalConfig, max_n: int = 7, count: int = 500, max_part: int = 4,
                     seed: int = 0) -> list[dict]:
    """Exact row sums and nonnegativity of one-step kernels for random upper signatures."""
    rng = random.Random(seed)
    exact = cfg if cfg.exact else cfg.with_mode("exact")
    out = []
    graphs = [("symA sigma=+", lambda lam, c: kernelA_step(lam, 1, c), -max_part, exact),
              ("symA sigma=-", lambda lam, c: kernelA_step(lam, -1, c), -max_part, exact)]
    for G in ALL_GROUPS:
        graphs.append((f"bc {G.value}", lambda lam, c, G=G: kernelBC_step(G, lam, c), 0, _bc_cfg(G, exact)))
    for name, step, lo, gcfg in graphs:
        fails = 0
        for _ in range(count):
            lam = _random_signature(rng, rng.randint(2, max_n), lo, max_part)
            row = step(lam, gcfg)
            fails += row.total() != 1 or any(v < 0 for v in row.support.values())
        out.append(_record("stochastic", f"{name} q={gcfg.q}", count, fails))
    return out


MULTISTEP_PATTERNS = ("+", "-", "+-", "-+", "++-")


def suite_multistep(cfg: EvalConfig, max_n: int = 6, max_k: int = 3, lo: int = -1, hi: int = 2,
                    patterns=MULTISTEP_PATTERNS) -> list[dict]:
    """Closed-form multi-step rows against composed one-step rows, exact equality."""
    exact = cfg if cfg.exact else cfg.with_mode("exact")
    out = []
    for pat in patterns:
        sigma = SignSequence.parse(pat)
        graph = SymmetricGraph(sigma)
        cases = fails = 0
        for N in range(2, max_n + 1):
            for lam in signatures(N, lo, hi):
                row = KernelRow({lam: Fraction(1)})
                for level in range(N - 1, 0, -1):
                    row = compose(lambda mu: graph.step_row(mu, exact), row)
                    k = level
                    if k <= max_k:
                        cases += 1
                        fails += kernelA_multi_exact(lam, k, sigma, exact).support != row.support
        out.append(_record("multistep", f"sigma={pat}", cases, fails))
    return out


# ---------------------------------------------------------------- Phi and F_mu


def suite_phi(cfg: EvalConfig, tol: float = 1e-8, points=TEST_POINTS) -> list[dict]:
    """Trivial values, normalizations and inversion symmetry of the limit functions."""
    fcfg = cfg if not cfg.exact else cfg.with_mode("float")
    q = float(fcfg.q)
    out = []
    zero_a, zero_bc = BoundaryPointA.constant(0), BoundaryPointBC((0,))
    ts = (BoundaryPointA(0, (1,), 1, 3), BoundaryPointA(0, (), 1, 1), BoundaryPointA(-1, (0, 2), 0, 2))
    ys = (BoundaryPointBC((0, 1, 2)), BoundaryPointBC((1, 1, 3)))

    def check(group, values):
        errs = [abs(complex(a) - complex(b)) for a, b in values]
        out.append(_record("phi", group, len(errs), sum(e > tol for e in errs), max(errs)))

    check("A t=0", [(phiA(zero_a, x, fcfg), 1) for x in points])
    check("A normalization", [(phiA(t, 1.0, fcfg), 1) for t in ts]
          + [(phiA_multivar(t, (1.0, q), fcfg, continuation=True), 1) for t in ts])
    for G in ALL_GROUPS:
        check(f"{G.value} y=0", [(phiBCD(G, zero_bc, m, x, fcfg), 1) for m in (0, 1) for x in points])
        check(f"{G.value} inversion", [(phiBCD(G, y, m, x, fcfg), phiBCD(G, y, m, 1 / x, fcfg))
                                       for y in ys for m in (0, 1) for x in points])
        check(f"{G.value} normalization",
              [(phiBCD(G, y, m, complex(q_power(fcfg, G.epsilon + m)), fcfg, continuation=True), 1)
               for m in (0, 1) for y in ys[:1]])
    return out


def suite_fmu(cfg: EvalConfig, tol: float = 1e-8, max_part: int = 3, grid: int = 40) -> list[dict]:
    """F_mu(s_nu) and F^G_mu(chi^G_nu) against the Kronecker delta for k <= 2."""
    out = []
    for k in (1, 2):
        sigs = signatures(k, -max_part, max_part)
        errs = []
        for mu, nu in itertools.product(sigs, repeat=2):
            v = f_mu_functional("A", mu, lambda *z, nu=nu: complex(schur_eval(nu, list(z))), k, cfg, grid)
            errs.append(abs(v - (mu == nu)))
        out.append(_record("fmu", f"A k={k}", len(errs), sum(e > tol for e in errs), max(errs)))
        for G in ALL_GROUPS:
            parts = partitions(k, max_part)
            errs = []
            for mu, nu in itertools.product(parts, repeat=2):
                v = f_mu_functional(G, mu, lambda *z, nu=nu: complex(bcd_eval(G, nu, list(z))), k, cfg, grid)
                errs.append(abs(v - (mu == nu)))
            out.append(_record("fmu", f"{G.value} k={k}", len(errs), sum(e > tol for e in errs), max(errs)))
    return out


SUITES = {
    "contour-A": suite_contour_A,
    "contour-BC": suite_contour_BC,
    "multivar": suite_multivar,
    "structural": suite_structural,
    "stochastic": suite_stochastic,
    "multistep": suite_multistep,
    "phi": suite_phi,
    "fmu": suite_fmu,
}


def passed(records) -> bool:
    return all(r["failures"] == 0 for r in records)
