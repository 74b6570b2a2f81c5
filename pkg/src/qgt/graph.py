"""Stochastic links of the symmetric and BC q-Gelfand-Tsetlin graphs.

Kernel rows map lower-level signatures to probabilities.  Exact configs
give ``Fraction`` rows summing to exactly 1; float configs give mpmath
rows.  Sampling always runs on float64 cumulative tables built from the
rows.
"""

from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import EvalConfig, q_power
from .chars import (
    GroupType,
    NonnegSignature,
    Signature,
    bcd_eval,
    bcd_principal,
    group,
    interlacing_lower,
    schur_eval,
    schur_principal,
    skew_schur,
)
from .errors import BadShape, GridTooCoarse, NotConverged

# ---------------------------------------------------------------- sign sequences


@dataclass(frozen=True)
class SignSequence:
    """sigma_1, sigma_2, ... in {+1, -1}: an explicit prefix followed by a repeating pattern.

    The default is the alternating sequence +1, -1, +1, ..., for which
    b(n) = floor(n/2).
    """

    pattern: tuple = (1, -1)
    prefix: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(int(s) for s in self.pattern))
        object.__setattr__(self, "prefix", tuple(int(s) for s in self.prefix))
        if not self.pattern:
            raise ValueError("the repeating pattern must be nonempty")
        if any(s not in (1, -1) for s in self.pattern + self.prefix):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def alternating(cls) -> "SignSequence":
        return cls((1, -1))

    @classmethod
    def constant(cls, sign: int) -> "SignSequence":
        return cls((sign,))

    @classmethod
    def parse(cls, text: str) -> "SignSequence":
        """'+-' style pattern, optionally 'prefix|pattern'; commas are ignored."""
        text = text.replace(",", "").replace(" ", "")
        head, _, tail = text.rpartition("|")
        conv = lambda s: tuple(1 if c == "+" else -1 if c == "-" else _bad_sign(c) for c in s)
        return cls(conv(tail), conv(head))

    def __call__(self, n: int) -> int:
        if n < 1:
            raise IndexError("sigma is indexed from 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.pattern[(n - len(self.prefix) - 1) % len(self.pattern)]

    def b(self, n: int) -> int:
        """b(n) = #{i <= n : sigma_i = -1}."""
        return _count_minus(self, n)

    def b_k(self, N: int, k: int) -> int:
        return max(0, self.b(N) - self.b(k))

    def is_generic(self) -> bool:
        """Both b(n) and n - b(n) are unbounded (the pattern holds both signs)."""
        return 1 in self.pattern and -1 in self.pattern

    def __str__(self):
        show = lambda s: "".join("+" if x == 1 else "-" for x in s)
        return f"{show(self.prefix)}|{show(self.pattern)}" if self.prefix else show(self.pattern)


def _bad_sign(c):
    raise ValueError(f"sign characters are '+' and '-', got {c!r}")


@functools.lru_cache(maxsize=4096)
def _count_minus(sigma: SignSequence, n: int) -> int:
    return sum(1 for i in range(1, n + 1) if sigma(i) == -1)


# ---------------------------------------------------------------- kernel rows


@dataclass
class KernelRow:
    """One row of a Markov kernel: lower-level signature -> probability."""

    support: dict
    meta: dict = field(default_factory=dict)

    def total(self):
        return sum(self.support.values())

    def __getitem__(self, mu):
        return self.support.get(Signature(mu), 0)

    def items(self):
        return sorted(self.support.items(), key=lambda kv: tuple(kv[0]), reverse=True)

    def as_floats(self) -> dict:
        return {mu: _real(v) for mu, v in self.support.items()}

    def tv_distance(self, other: "KernelRow") -> float:
        a, b = self.as_floats(), other.as_floats()
        keys = set(a) | set(b)
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def _real(v) -> float:
    if isinstance(v, (int, Fraction)):
        return float(v)
    return float(complex(v).real)


def compose(rows_of, row: KernelRow) -> KernelRow:
    """(row * Lambda)(.) where ``rows_of(mu)`` gives the next kernel row out of mu."""
    out = {}
    for mu, p in row.support.items():
        for nu, r in rows_of(mu).support.items():
            out[nu] = out.get(nu, 0) + p * r
    return KernelRow({k: v for k, v in out.items() if v != 0})


def kernelA_step(lam, sigma: int, cfg: EvalConfig) -> KernelRow:
    """Lambda^{N+1}_N(lam, .) of the symmetric graph for the sign ``sigma`` of this link.

    sigma = -1: s_mu(q, ..., q^N)/s_lam(1, ..., q^N);
    sigma = +1: s_mu(q^-1, ..., q^-N)/s_lam(1, ..., q^-N).
    """
    lam = Signature(lam)
    N = len(lam) - 1
    if N < 1:
        raise BadShape("the upper signature needs at least two parts")
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    top = schur_principal(lam, N + 1, cfg)
    support = {}
    for mu in interlacing_lower(lam):
        # homogeneity turns both cases into q-powers times s_mu(1, ..., q^{N-1})
        shift = mu.size if sigma == -1 else N * (lam.size - mu.size)
        support[mu] = q_power(cfg, shift) * schur_principal(mu, N, cfg) / top
    return KernelRow(support)


def _decreasing(ranges, upper=None):
    """Weakly decreasing tuples with entry i in ranges[i] = (lo, hi)."""
    if not ranges:
        yield ()
        return
    lo, hi = ranges[0]
    if upper is not None:
        hi = min(hi, upper)
    for v in range(hi, lo - 1, -1):
        for rest in _decreasing(ranges[1:], v):
            yield (v,) + rest


def _bc_lower(lam: NonnegSignature) -> list[NonnegSignature]:
    """mu in GT+_N for which some nu in GT+_{N+1} has lam > nu > mu."""
    N = len(lam) - 1
    padded = list(lam) + [0]
    out = []
    for parts in _decreasing([(padded[i + 2], padded[i]) for i in range(N)]):
        if _nu_intervals(lam, parts) is not None:
            out.append(NonnegSignature(parts))
    return out


def _nu_intervals(lam, mu):
    """Integer intervals of nu_1, ..., nu_{N+1} with lam > nu > mu, or None if one is empty."""
    N = len(mu)
    out = []
    for i in range(N + 1):
        lo = max(lam[i + 1] if i + 1 <= N else 0, mu[i] if i < N else 0)
        hi = min(lam[i], mu[i - 1] if i >= 1 else lam[i])
        if lo > hi:
            return None
        out.append((lo, hi))
    return out


def _tau(G: GroupType, u, lam, nu_last: int, mu):
    """tau^G(u; lam, nu, mu); it only sees lam, mu and nu_{N+1}."""
    N = len(mu)
    if G is GroupType.C:
        return 1
    if G is GroupType.B:
        return 1 if nu_last == 0 else 1 + 1 / u
    lam_len = sum(1 for p in lam if p > 0)
    mu_len = sum(1 for p in mu if p > 0)
    if 0 < nu_last < min(mu[-1] if mu else 0, lam[-1]):
        return 0
    if lam_len == N and mu_len == N:
        return 2
    return 1


def skew_bc(G, lam, mu, u, method: str = "factorized"):
    """chi^G_{lam/mu}(u) for lam in GT+_{N+1}, mu in GT+_N.

    ``enumerate`` sums over every nu; ``factorized`` uses that the weight
    is a product over the coordinates of nu with tau coupling only nu_{N+1}.
    """
    G = group(G)
    lam, mu = NonnegSignature(lam), NonnegSignature(mu)
    if len(lam) != len(mu) + 1:
        raise BadShape("need len(lam) = len(mu) + 1")
    ivs = _nu_intervals(lam, mu)
    if ivs is None:
        return 0 * u
    base = lam.size + mu.size
    if method == "enumerate":
        total = 0 * u
        for nu in itertools.product(*(range(lo, hi + 1) for lo, hi in ivs)):
            total += _tau(G, u, lam, nu[-1], mu) * u ** (2 * sum(nu) - base)
        return total
    if method != "factorized":
        raise ValueError(f"unknown method {method!r}")
    out = u ** (-base)
    u2 = u * u
    for lo, hi in ivs[:-1]:
        out *= sum(u2 ** e for e in range(lo, hi + 1))
    lo, hi = ivs[-1]
    return out * sum(_tau(G, u, lam, e, mu) * u2 ** e for e in range(lo, hi + 1))


def kernelBC_step(G, lam, cfg: EvalConfig, method: str = "factorized") -> KernelRow:
    """Lambda^{N+1}_N(lam, .) of the BC graph of type G."""
    G = group(G)
    lam = NonnegSignature(lam)
    N = len(lam) - 1
    if N < 1:
        raise BadShape("the upper signature needs at least two parts")
    u = q_power(cfg, G.epsilon + N)
    top = bcd_principal(G, lam, cfg)
    support = {}
    for mu in _bc_lower(lam):
        w = skew_bc(G, lam, mu, u, method)
        if w != 0:
            support[mu] = bcd_principal(G, mu, cfg) * w / top
    return KernelRow(support)


def kernelA_multi_exact(lam, k: int, sigma: SignSequence, cfg: EvalConfig) -> KernelRow:
    """Lambda^N_k(lam, .) for the symmetric graph in closed form.

    s_mu(1, ..., q^{k-1}) q^{b_k |mu|} s_{lam/mu}(A) / s_lam(1, ..., q^{N-1}) with
    A the points q^0..q^{N-1} other than q^{b_k}, ..., q^{b_k + k - 1}.
    """
    lam = Signature(lam)
    N = len(lam)
    if not 1 <= k < N:
        raise BadShape("need 1 <= k < N")
    bk = sigma.b_k(N, k)
    A = [q_power(cfg, j) for j in range(N) if not bk <= j < bk + k]
    prodA = 1
    for a in A:
        prodA *= a
    c = max(0, -lam[-1])
    top = schur_principal(lam, N, cfg)
    support = {}
    for parts in _decreasing([(lam[N - k + i], lam[i]) for i in range(k)]):
        mu = Signature(parts)
        # skew Schur of signatures: shift both by c, then divide by (prod A)^c
        skew = skew_schur(lam.shifted(c), mu.shifted(c), A) / prodA ** c
        if skew == 0:
            continue
        support[mu] = schur_principal(mu, k, cfg) * q_power(cfg, bk * mu.size) * skew / top
    return KernelRow(support)


# ---------------------------------------------------------------- graphs and sampling


class SymmetricGraph:
    """The symmetric q-GT graph of a sign sequence; the link N+1 -> N uses sigma_{N+1}."""

    def __init__(self, sigma: SignSequence | None = None):
        self.sigma = sigma or SignSequence.alternating()
        self.name = f"symA({self.sigma})"

    def step_row(self, lam, cfg: EvalConfig) -> KernelRow:
        return kernelA_step(lam, self.sigma(len(lam)), cfg)

    def signature(self, parts):
        return Signature(parts)


class BCGraph:
    def __init__(self, G):
        self.G = group(G)
        self.name = f"bc({self.G.value})"

    def step_row(self, lam, cfg: EvalConfig) -> KernelRow:
        return kernelBC_step(self.G, lam, cfg)

    def signature(self, parts):
        return NonnegSignature(parts)


@dataclass
class ChainSample:
    levels: list
    rng_seed: int


class _RowTable:
    """Cached float64 cumulative tables of step rows."""

    def __init__(self, graph, cfg: EvalConfig):
        self.graph, self.cfg = graph, cfg
        self.cache = {}

    def get(self, lam):
        hit = self.cache.get(lam)
        if hit is None:
            row = self.graph.step_row(lam, self.cfg)
            keys = sorted(row.support, reverse=True)
            probs = np.array([_real(row.support[m]) for m in keys])
            cum = np.cumsum(probs)
            cum /= cum[-1]
            hit = (keys, cum)
            self.cache[lam] = hit
        return hit


def _chain_uniforms(seed: int, start: int, count: int, steps: int) -> np.ndarray:
    """Row i holds the uniforms of chain start + i, drawn from its own substream."""
    out = np.empty((count, steps))
    for i in range(count):
        out[i] = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, start + i]))).random(steps)
    return out


def sample_chains(graph, lam_top, k: int, n: int, seed: int, cfg: EvalConfig, *,
                  keep_levels: bool = False, threads: int = 1, table: _RowTable | None = None):
    """Run n chains from lam_top down to level k.

    Returns the level-k signatures (or the whole chains with ``keep_levels``).
    Chain i uses the substream SeedSequence([seed, i]), so the result does
    not depend on ``threads``.
    """
    lam_top = graph.signature(lam_top)
    N = len(lam_top)
    if not 1 <= k < N:
        raise BadShape("need 1 <= k < level of the top signature")
    steps = N - k
    table = table or _RowTable(graph, cfg)
    bounds = np.linspace(0, n, max(1, min(threads, n)) + 1).astype(int)

    def work(lo, hi):
        U = _chain_uniforms(seed, lo, hi - lo, steps)
        states = [lam_top] * (hi - lo)
        history = [list(states)] if keep_levels else None
        for s in range(steps):
            groups = {}
            for i, st in enumerate(states):
                groups.setdefault(st, []).append(i)
            nxt = [None] * len(states)
            for st, idx in groups.items():
                keys, cum = table.get(st)
                pos = np.searchsorted(cum, U[idx, s], side="right")
                for i, p in zip(idx, np.minimum(pos, len(keys) - 1)):
                    nxt[i] = keys[p]
            states = nxt
            if keep_levels:
                history.append(list(states))
        if keep_levels:
            return [[history[s][i] for s in range(steps + 1)] for i in range(hi - lo)]
        return states

    spans = list(zip(bounds[:-1], bounds[1:]))
    if len(spans) == 1:
        parts = [work(*spans[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(lambda sp: work(*sp), spans))
    return [x for part in parts for x in part]


def sample_chain(graph, lam_top, k: int, seed: int, cfg: EvalConfig) -> ChainSample:
    """One chain (substream 0 of ``seed``) from lam_top down to level k."""
    levels = sample_chains(graph, lam_top, k, 1, seed, cfg, keep_levels=True)[0]
    return ChainSample(levels, seed)


def empirical_row(samples) -> KernelRow:
    counts = {}
    for mu in samples:
        counts[mu] = counts.get(mu, 0) + 1
    n = len(samples)
    return KernelRow({mu: Fraction(c, n) for mu, c in counts.items()}, {"samples": n})


# ---------------------------------------------------------------- boundary measures


def boundary_measure(graph, point, k: int, cfg: EvalConfig, method: str = "exact_multi", *,
                     N_trunc: int = 40, samples: int = 100_000, seed: int = 0, tol: float = 1e-6,
                     threads: int = 1) -> KernelRow:
    """Approximate M_k of a boundary point by a row at level N_trunc of its canonical sequence."""
    from .experiments import canonical_sequence_A, canonical_sequence_BC

    if isinstance(graph, SymmetricGraph):
        seq = lambda N: canonical_sequence_A(point, graph.sigma, N)
    else:
        seq = lambda N: canonical_sequence_BC(point, N)
    if method == "exact_multi":
        if not isinstance(graph, SymmetricGraph):
            raise ValueError("exact_multi is only available for the symmetric graph")
        row = kernelA_multi_exact(seq(N_trunc), k, graph.sigma, cfg)
        further = kernelA_multi_exact(seq(N_trunc + 8), k, graph.sigma, cfg)
        tv = row.tv_distance(further)
        if tv > tol:
            raise NotConverged(f"rows at N={N_trunc} and N={N_trunc + 8} differ by {tv:.3e} in total variation")
        row.meta.update({"N_trunc": N_trunc, "tv_to_N_plus_8": tv})
        return row
    if method == "monte_carlo":
        found = sample_chains(graph, seq(N_trunc), k, samples, seed, cfg, threads=threads)
        row = empirical_row(found)
        radius = {mu: 1.96 * math.sqrt(float(p) * (1 - float(p)) / samples) for mu, p in row.support.items()}
        row.meta.update({"N_trunc": N_trunc, "seed": seed, "radius95": radius})
        return row
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- F_mu functionals


def _bc_weight(G: GroupType, zs):
    out = 1.0
    for i, j in itertools.combinations(range(len(zs)), 2):
        out *= abs(zs[i] - zs[j]) ** 2 * abs(1 - zs[i] * zs[j]) ** 2
    for z in zs:
        if G is GroupType.B:
            out *= abs(1 - z) ** 2
        elif G is GroupType.C:
            out *= abs(1 - z) ** 2 * abs(1 + z) ** 2
    return out


def f_mu_functional(family, mu, f, k: int, cfg: EvalConfig, grid: int = 64):
    """F_mu(f) (type A) or F^G_mu(f) (B, C, D) by the trapezoid rule on the k-torus.

    The grid is offset by half a step, so z = 1 and (for even grids)
    z = -1 are never nodes.  Integration is against the normalized Haar
    measure; the BC functionals are normalized by their value at chi_mu.
    """
    if k not in (1, 2):
        raise ValueError("torus quadrature is limited to k <= 2")
    if len(mu) != k:
        raise BadShape("mu must have k parts")
    fam = str(family.value if isinstance(family, GroupType) else family).upper()
    top = max(abs(p) for p in mu)
    need = 2 * (top + k + (0 if fam == "A" else k + 1))
    if grid <= need:
        raise GridTooCoarse(f"grid {grid} cannot resolve degree {need // 2}; use grid > {need}")
    theta = 2 * math.pi * (np.arange(grid) + 0.5) / grid
    nodes = [complex(math.cos(t), math.sin(t)) for t in theta]
    # double precision suffices: the integrands are bounded on the torus
    def weight_and_char(zs):
        if fam == "A":
            w = 1.0
            for i, j in itertools.combinations(range(k), 2):
                w *= abs(zs[i] - zs[j]) ** 2
            # on the torus conj(s_mu(z)) = s_mu(1/z)
            return w, complex(schur_eval(Signature(mu), [1 / z for z in zs]))
        G = group(fam)
        return _bc_weight(G, zs), complex(bcd_eval(G, NonnegSignature(mu), list(zs)))

    num = 0j
    norm = 0j
    for zs in itertools.product(nodes, repeat=k):
        if k == 2 and zs[0] == zs[1]:
            continue
        w, ch = weight_and_char(zs)
        num += complex(f(*zs)) * ch * w
        if fam != "A":
            norm += ch * ch * w
    if fam == "A":
        return num / grid ** k / math.factorial(k)
    return num / norm
