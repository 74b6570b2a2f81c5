"""Experiment harness: canonical stabilizing sequences, limit convergence, LLN,
concentration and Martin-boundary stabilization studies.

Every report carries the parameter block that produced it.  Thresholds are
calibration choices of this package and are stated in each report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import EvalConfig
from .chars import GroupType, NonnegSignature, Signature, group
from .contour import (
    DEFAULT_QUAD,
    BoundaryPointA,
    BoundaryPointBC,
    QuadratureSpec,
    bcd_ratio_multi,
    phiA,
    phiA_multivar,
    phiBCD,
    phiBCD_multivar,
    schur_ratio_multi,
)
from .graph import (
    BCGraph,
    KernelRow,
    SignSequence,
    SymmetricGraph,
    _RowTable,
    empirical_row,
    kernelA_multi_exact,
    sample_chains,
)


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    rows: list = field(default_factory=list)
    verdict: bool = True
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "parameters": self.parameters, "rows": self.rows,
                "verdict": "pass" if self.verdict else "fail", "notes": self.notes}


def _family(family):
    """'A' or a GroupType."""
    if isinstance(family, GroupType):
        return family
    if str(family).upper() == "A":
        return "A"
    return group(family)


def _cfg_params(cfg: EvalConfig) -> dict:
    return {"q": str(cfg.q), "mode": cfg.mode, "precision_bits": cfg.float_precision_bits}


# ---------------------------------------------------------------- canonical sequences


def canonical_sequence_A(t: BoundaryPointA, sigma: SignSequence, N: int) -> Signature:
    """lambda(N)_j = t_{b(N)+1-j}, j = 1..N."""
    if N < 1:
        raise ValueError("N must be positive")
    b = sigma.b(N)
    return Signature(t[b + 1 - j] for j in range(1, N + 1))


def canonical_sequence_BC(y: BoundaryPointBC, N: int) -> NonnegSignature:
    """lambda(N)_j = y_{N+1-j}, j = 1..N."""
    if N < 1:
        raise ValueError("N must be positive")
    return NonnegSignature(y[N + 1 - j] for j in range(1, N + 1))


def stabilizes_A(lam, t: BoundaryPointA, b: int) -> bool:
    N = len(lam)
    return all(lam[b + 1 - i - 1] == t[i] for i in range(b + 1 - N, b + 1))


def stabilizes_BC(lam, y: BoundaryPointBC) -> bool:
    N = len(lam)
    return all(lam[N - i] == y[i] for i in range(1, N + 1))


def _weakly_decreasing(values, slack: float = 0.0) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------- convergence


def convergence_experiment(family, point, k: int, xs, N_list, cfg: EvalConfig,
                           quad: QuadratureSpec = DEFAULT_QUAD, *, sigma: SignSequence | None = None,
                           tol: float = 1e-6) -> ExperimentReport:
    """|finite-N normalized character - Phi(xs)| along N_list."""
    fam = _family(family)
    sigma = sigma or SignSequence.alternating()
    xs = tuple(complex(x) for x in xs)[:k]
    if len(xs) != k:
        raise ValueError("need k evaluation points")
    fcfg = cfg if not cfg.exact else cfg.with_mode("float")
    if fam == "A":
        limit = phiA(point, xs[0], fcfg, quad) if k == 1 else phiA_multivar(point, xs, fcfg, quad)
    elif k == 1:
        limit = phiBCD(fam, point, 0, xs[0], fcfg, quad)
    else:
        limit = phiBCD_multivar(fam, point, xs, fcfg, quad)
    limit = complex(limit)
    rows = []
    for N in N_list:
        if fam == "A":
            lam = canonical_sequence_A(point, sigma, N)
            b = sigma.b(N)
            if b + k > N:
                raise ValueError(f"positions b(N)..b(N)+k-1 exceed N = {N}")
            finite = schur_ratio_multi(lam, b, xs, fcfg)
        else:
            lam = canonical_sequence_BC(point, N)
            finite = bcd_ratio_multi(fam, lam, xs, fcfg)
        finite = complex(finite)
        rows.append({"N": N, "finite": finite, "limit": limit, "error": abs(finite - limit)})
    errors = [r["error"] for r in rows]
    verdict = _weakly_decreasing(errors, slack=quad.tol) and errors[-1] <= tol
    params = {"family": str(family), "point": str(point), "k": k, "xs": list(xs), "N_list": list(N_list),
              "tol": tol, "sigma": str(sigma), **_cfg_params(cfg)}
    return ExperimentReport("convergence", params, rows, verdict)


# ---------------------------------------------------------------- law of large numbers


def lln_experiment(family, point, k_max: int, L: int, samples: int, seed: int, cfg: EvalConfig, *,
                   sigma: SignSequence | None = None, N_start: int | None = None,
                   threshold: float = 0.99, threads: int = 1) -> ExperimentReport:
    """Frequency of the stabilized coordinates at level L.

    Type A uses the exact row Lambda^N_L from lambda(N) (no sampling); the
    frequency of {mu_{b(L)+k} = t_{1-k}} is then an exact mass.  BC samples
    chains from lambda(N) down to L and records {mu_{L+1-k} = y_k}.
    """
    fam = _family(family)
    sigma = sigma or SignSequence.alternating()
    N = N_start or 2 * L
    if not k_max < L < N:
        raise ValueError("need k_max < L < N_start")
    rows = []
    if fam == "A":
        row = kernelA_multi_exact(canonical_sequence_A(point, sigma, N), L, sigma, cfg)
        bL = sigma.b(L)
        joint = 0
        hits = {k: 0 for k in range(1, k_max + 1)}
        for mu, p in row.support.items():
            good = [k for k in hits if 1 <= bL + k <= L and mu[bL + k - 1] == point[1 - k]]
            for k in good:
                hits[k] += p
            if len(good) == k_max:
                joint += p
        for k, p in hits.items():
            rows.append({"k": k, "frequency": float(p), "exact": True})
        notes = {"joint_frequency": float(joint)}
    else:
        graph = BCGraph(fam)
        found = sample_chains(graph, canonical_sequence_BC(point, N), L, samples, seed, cfg, threads=threads)
        for k in range(1, k_max + 1):
            hits = sum(1 for mu in found if mu[L - k] == point[k])
            p = hits / samples
            rows.append({"k": k, "frequency": p, "stderr": math.sqrt(p * (1 - p) / samples), "exact": False})
        notes = {}
    verdict = all(r["frequency"] >= threshold for r in rows)
    params = {"family": str(family), "point": str(point), "k_max": k_max, "L": L, "N_start": N,
              "samples": samples, "seed": seed, "threshold": threshold, "sigma": str(sigma), **_cfg_params(cfg)}
    return ExperimentReport("lln", params, rows, verdict, notes)


# ---------------------------------------------------------------- concentration


def _violates_A(mu, lam, sigma: SignSequence, k: int) -> bool:
    N = len(mu)
    b, b1 = sigma.b(N), sigma.b(N + 1)
    for i in range(-k, k + 1):
        j, j1 = b + i, b1 + i
        if 1 <= j <= N and 1 <= j1 <= N + 1 and mu[j - 1] != lam[j1 - 1]:
            return True
    return False


def _violates_BC(mu, lam, k: int) -> bool:
    N = len(mu)
    return any(mu[N - i] != lam[N + 1 - i] for i in range(1, min(k, N) + 1))


def concentration_experiment(family, point, k: int, N_list, samples: int, seed: int, cfg: EvalConfig, *,
                             sigma: SignSequence | None = None, bound: float = 20.0,
                             threads: int = 1) -> ExperimentReport:
    """One-step violation frequencies from the canonical lambda(N+1) and the fitted constant.

    C_hat = max_N frequency(N) / q^{rate(N)} with rate(N) = min(b(N), N - b(N))
    for type A and rate(N) = N for B, C, D.
    """
    fam = _family(family)
    sigma = sigma or SignSequence.alternating()
    graph = SymmetricGraph(sigma) if fam == "A" else BCGraph(fam)
    table = _RowTable(graph, cfg)
    q = float(cfg.q)
    rows = []
    for N in N_list:
        if fam == "A":
            lam = canonical_sequence_A(point, sigma, N + 1)
            bad = lambda mu: _violates_A(mu, lam, sigma, k)
            rate = min(sigma.b(N), N - sigma.b(N))
        else:
            lam = canonical_sequence_BC(point, N + 1)
            bad = lambda mu: _violates_BC(mu, lam, k)
            rate = N
        # chain i of level N uses the substream (seed * 1000 + N, i)
        found = sample_chains(graph, lam, N, samples, seed * 1000 + N, cfg, threads=threads, table=table)
        freq = sum(1 for mu in found if bad(mu)) / samples
        exact = sum(float(p) for mu, p in graph.step_row(lam, cfg).support.items() if bad(mu))
        rows.append({"N": N, "rate": rate, "frequency": freq, "exact_probability": exact,
                     "ratio": freq / q ** rate})
    C_hat = max(r["ratio"] for r in rows)
    params = {"family": str(family), "point": str(point), "k": k, "N_list": list(N_list), "samples": samples,
              "seed": seed, "bound": bound, "sigma": str(sigma), **_cfg_params(cfg)}
    notes = {"C_hat": C_hat, "C_exact": max(r["exact_probability"] / q ** r["rate"] for r in rows)}
    return ExperimentReport("concentration", params, rows, C_hat <= bound, notes)


# ---------------------------------------------------------------- Martin boundary


def martin_experiment(family, point, k: int, N_list, cfg: EvalConfig, *, sigma: SignSequence | None = None,
                      tol: float = 1e-6, samples: int = 100_000, seed: int = 0,
                      threads: int = 1) -> ExperimentReport:
    """Total variation between consecutive rows Lambda^N_k(lambda(N), .) along N_list.

    Type A rows are exact; BC rows are Monte Carlo estimates, so their
    distances bottom out at the sampling noise.
    """
    fam = _family(family)
    sigma = sigma or SignSequence.alternating()
    if fam == "A":
        rows_by_N = [kernelA_multi_exact(canonical_sequence_A(point, sigma, N), k, sigma, cfg) for N in N_list]
    else:
        graph = BCGraph(fam)
        table = _RowTable(graph, cfg)
        rows_by_N = [empirical_row(sample_chains(graph, canonical_sequence_BC(point, N), k, samples, seed, cfg,
                                                 threads=threads, table=table)) for N in N_list]
    rows = []
    for i, N in enumerate(N_list):
        rec = {"N": N, "support": len(rows_by_N[i].support)}
        rec["tv_to_previous"] = None if i == 0 else rows_by_N[i - 1].tv_distance(rows_by_N[i])
        rows.append(rec)
    tvs = [r["tv_to_previous"] for r in rows[1:]]
    verdict = bool(tvs) and _weakly_decreasing(tvs) and tvs[-1] <= tol
    final: KernelRow = rows_by_N[-1]
    params = {"family": str(family), "point": str(point), "k": k, "N_list": list(N_list), "tol": tol,
              "sigma": str(sigma), **_cfg_params(cfg)}
    if fam != "A":
        params.update({"samples": samples, "seed": seed})
    notes = {"M_k": {",".join(map(str, mu)): _mass(p) for mu, p in final.items()}}
    return ExperimentReport("martin", params, rows, verdict, notes)


def _mass(p):
    return p if isinstance(p, Fraction) else float(p)
