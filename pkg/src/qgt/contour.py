"""Contour-integral formulas for normalized characters and their limits.

Finite-N identities are evaluated either exactly by residues or by
quadrature; the limit functions Phi are evaluated by the strip engine in
:mod:`qgt.strip`.  Direct normalized ratios (the left sides of all the
identities) are provided as well and serve as oracles.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np
from mpmath.calculus.quadrature import GaussLegendre

from .arith import EvalConfig, HalfInt, det, is_exact_value, mp_context, q_power, q_power_float, qpochhammer, to_mpc
from .chars import (
    GroupType,
    NonnegSignature,
    Signature,
    bcd_eval,
    bcd_principal,
    group,
    jacobi_trudi_eval,
    schur_eval,
    schur_jt,
    schur_principal,
    symplectic_vandermonde,
    vandermonde,
)
from .errors import (
    ApparentSingularity,
    CoincidentOrbit,
    CoincidentPoints,
    DomainViolation,
    ExactModeUnsupported,
    NonConvergedQuadrature,
    PoleNeighborhood,
)
from .strip import StripProblem, strip_bracket

POLE_RADIUS = 1e-3


# ---------------------------------------------------------------- boundary points


@dataclass(frozen=True)
class BoundaryPointA:
    """A nondecreasing integer sequence t_i, i in Z, constant outside a finite window."""

    left_tail: int
    middle: tuple
    offset: int
    right_tail: int

    def __post_init__(self):
        mid = tuple(int(t) for t in self.middle)
        object.__setattr__(self, "middle", mid)
        seq = (self.left_tail,) + mid + (self.right_tail,)
        if any(seq[i] > seq[i + 1] for i in range(len(seq) - 1)):
            raise ValueError("boundary point must be nondecreasing")

    @classmethod
    def constant(cls, c: int) -> "BoundaryPointA":
        return cls(c, (), 0, c)

    def __getitem__(self, i: int) -> int:
        j = i - self.offset
        if j < 0:
            return self.left_tail
        if j >= len(self.middle):
            return self.right_tail
        return self.middle[j]

    def shift(self, k: int) -> "BoundaryPointA":
        """The sequence i -> t_{i+k}."""
        return BoundaryPointA(self.left_tail, self.middle, self.offset - k, self.right_tail)

    def __str__(self):
        mid = ",".join(map(str, self.middle))
        return f"{self.left_tail}:{mid}:{self.right_tail}@{self.offset}"


@dataclass(frozen=True)
class BoundaryPointBC:
    """A nondecreasing nonnegative sequence y_1 <= y_2 <= ..., constant from the last head entry on."""

    head: tuple

    def __post_init__(self):
        head = tuple(int(y) for y in self.head) or (0,)
        object.__setattr__(self, "head", head)
        if head[0] < 0 or any(head[i] > head[i + 1] for i in range(len(head) - 1)):
            raise ValueError("boundary point must be nonnegative and nondecreasing")

    @property
    def tail_value(self) -> int:
        return self.head[-1]

    def __getitem__(self, i: int) -> int:
        if i < 1:
            raise IndexError("y is indexed from 1")
        return self.head[i - 1] if i <= len(self.head) else self.tail_value

    def __str__(self):
        return ",".join(map(str, self.head))


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretization of the strip contours.

    ``u_halfwidth`` and ``product_truncation`` are chosen automatically when
    left as None; ``shift`` is the abscissa R of the vertical v-segment.
    """

    v_nodes: int = 64
    u_nodes_per_unit: int = 16
    u_halfwidth: float | None = None
    product_truncation: int | None = None
    tol: float = 1e-10
    shift: float = 0.0
    check: bool = True

    def __post_init__(self):
        if self.v_nodes <= 0 or self.u_nodes_per_unit <= 0 or self.tol <= 0:
            raise ValueError("quadrature parameters must be positive")
        if self.u_halfwidth is not None and self.u_halfwidth <= 0:
            raise ValueError("u_halfwidth must be positive")
        if self.product_truncation is not None and self.product_truncation <= 0:
            raise ValueError("product_truncation must be positive")


DEFAULT_QUAD = QuadratureSpec()


def _float_cfg(cfg: EvalConfig) -> EvalConfig:
    return cfg if not cfg.exact else cfg.with_mode("float")


# ---------------------------------------------------------------- direct ratios


def _guard_bits(cfg: EvalConfig, N: int, top: float) -> int:
    """Extra working precision for determinant ratios whose entries span q^{+-top}."""
    return cfg.float_precision_bits + int(2 * N * top * abs(math.log2(cfg.q))) + 64


def _float_ratio(cfg: EvalConfig, bits: int, compute):
    hi = EvalConfig(cfg.q, cfg.sqrt_q, bits, "float")
    return cfg.ctx.mpc(compute(hi))


def schur_ratio_points(lam, points, cfg: EvalConfig):
    """s_lambda(points)/s_lambda(1, q, ..., q^{N-1}), robust to coincident points."""
    lam = Signature(lam)
    N = len(lam)
    if cfg.exact and all(is_exact_value(x) for x in points):
        return schur_jt(lam, [Fraction(x) for x in points]) / schur_principal(lam, N, cfg)
    top = max([abs(p) for p in lam] + [0]) + N

    def compute(hi):
        pts = [to_mpc(hi.ctx, x) for x in points]
        try:
            val = schur_eval(lam, pts)
        except CoincidentPoints:
            val = schur_jt(lam, pts)
        return val / schur_principal(lam, N, hi)

    return _float_ratio(cfg, _guard_bits(cfg, N, top), compute)


def schur_ratio(lam, pos: int, x, cfg: EvalConfig):
    """Normalized Schur value with the point q^{pos} (0-based) replaced by x."""
    N = len(lam)
    pts = [q_power(cfg, i) for i in range(N)]
    pts[pos] = cfg.num(x) if not cfg.exact else Fraction(x)
    return schur_ratio_points(lam, pts, cfg)


def bcd_ratio_points(G, lam, points, cfg: EvalConfig):
    """chi^G_lambda(points)/chi^G_lambda(q^eps, ..., q^{N-1+eps}), robust to coincident orbits."""
    G = group(G)
    lam = NonnegSignature(lam)
    N = len(lam)
    if cfg.exact and all(is_exact_value(x) for x in points):
        pts = [Fraction(x) for x in points]
        try:
            val = bcd_eval(G, lam, pts)
        except CoincidentOrbit:
            val = jacobi_trudi_eval(G, lam, pts)
        return val / bcd_principal(G, lam, cfg)
    top = (lam[0] if lam else 0) + N + 1

    def compute(hi):
        pts = [to_mpc(hi.ctx, x) for x in points]
        try:
            val = bcd_eval(G, lam, pts)
        except CoincidentOrbit:
            val = jacobi_trudi_eval(G, lam, pts)
        return val / bcd_principal(G, lam, hi)

    return _float_ratio(cfg, _guard_bits(cfg, N, top), compute)


def bcd_ratio(G, lam, pos: int, x, cfg: EvalConfig):
    """Normalized character with the point q^{pos+eps} replaced by x."""
    G = group(G)
    N = len(lam)
    pts = [q_power(cfg, G.epsilon + i) for i in range(N)]
    pts[pos] = Fraction(x) if cfg.exact else cfg.num(x)
    return bcd_ratio_points(G, lam, pts, cfg)


# ---------------------------------------------------------------- type A, exact residues


def _poly_from_roots(roots):
    """Coefficients c_0..c_n of prod (w - r), lowest degree first."""
    coeffs = [1 + 0 * roots[0]] if roots else [1]
    for r in roots:
        shifted = [0 * r] + coeffs
        for i, c in enumerate(coeffs):
            shifted[i] -= r * c
        coeffs = shifted
    return coeffs


def _horner(coeffs, z):
    out = 0 * z
    for c in reversed(coeffs):
        out = out * z + c
    return out


def typeA_finiteN_residue(lam, N: int, b: int, a, cfg: EvalConfig):
    """Right side of the type-A double contour identity, evaluated by residues.

    ``a`` is an integer in exact mode and any real or complex number in float
    mode.  At the apparent singularities of the prefactor the value is the
    limit, computed from the derivative of the residue sum.
    """
    lam = Signature(lam)
    if len(lam) != N:
        raise ValueError("signature length differs from N")
    if not 1 <= b <= N - 1:
        raise ValueError("need 1 <= b <= N - 1")
    exps = [p + N - 1 - i for i, p in enumerate(lam)]
    if cfg.exact:
        if not isinstance(a, int):
            raise ExactModeUnsupported("exact mode needs an integer exponent a")
        X = cfg.q ** a
        poles = [cfg.q ** e for e in exps]
        q = cfg.q
    else:
        ctx = cfg.ctx
        X = q_power_float(cfg, a)
        poles = [ctx.mpc(q_power(cfg, e)) for e in exps]
        q = cfg.fq()
    # inner w-integral around infinity (clockwise): W(z) = sum_{j > b} P_j z^{j-b-1}
    P = _poly_from_roots(poles)
    W = list(P[b + 1 :])
    # outer z-integral: residue sum D(X) = sum_i c_i X^{e_i}
    cs = []
    for i, p in enumerate(poles):
        den = 1
        for k, r in enumerate(poles):
            if k != i:
                den *= p - r
        cs.append(_horner(W, p) / den)

    def D(Xv):
        return sum((c * Xv ** e for c, e in zip(cs, exps)), 0 * Xv)

    def dD(Xv):
        return sum((c * e * Xv ** (e - 1) for c, e in zip(cs, exps) if e), 0 * Xv)

    # prefactor factors (numerator, denominator) as functions of X
    factors = []
    qb = q ** b
    for i in range(1, N - b):
        factors.append((1 - q ** i, lambda Xv, i=i: Xv / qb - q ** i, 1 / qb))
    for i in range(1, b + 1):
        factors.append((1 - q ** i, lambda Xv, i=i: 1 - Xv * q ** i / qb, -(q ** i) / qb))
    vanishing = [f for f in factors if _is_zero(f[1](X), cfg)]
    if not vanishing:
        out = D(X)
        for num, den, _ in factors:
            out *= num / den(X)
        return out
    if len(vanishing) > 1:
        raise ApparentSingularity("several prefactor denominators vanish")
    if not _is_zero(D(X), cfg, scale=sum(abs(c) for c in cs)):
        raise ApparentSingularity("residue sum does not vanish at an apparent singularity")
    out = dD(X)
    for f in factors:
        num, den, slope = f
        out *= num / (slope if f is vanishing[0] else den(X))
    return out


def _is_zero(v, cfg: EvalConfig, scale=1) -> bool:
    if cfg.exact:
        return v == 0
    return abs(v) <= cfg.ctx.mpf(2) ** (-cfg.float_precision_bits + 16) * max(1, abs(scale))


# ---------------------------------------------------------------- strip kernels


def _kernel_A(lnq):
    def k(u, v):
        return 1.0 / (1.0 - np.exp((v - u) * lnq))

    return k


def _kernel_bcd(G: GroupType, m: int, lnq: float):
    if G is GroupType.C:
        def k(u, v):
            return (np.exp((m + 1) * v * lnq) - np.exp(-(m + 1) * v * lnq)) / (np.exp((u - v) * lnq) - 1.0)

        kappa = ((1.0, m + 1.0), (-1.0, -(m + 1.0)))
    elif G is GroupType.B:
        def k(u, v):
            num = (np.exp((u / 2 - (m + 1) * v) * lnq) - np.exp((-u / 2 + (m + 1) * v) * lnq)) * (
                np.exp(v * lnq / 2) - np.exp(-v * lnq / 2)
            )
            den = (np.exp((v - u) * lnq / 2) - np.exp((u - v) * lnq / 2)) * (np.exp(u * lnq / 2) - np.exp(-u * lnq / 2))
            return num / den

        kappa = ((1.0, m + 0.5), (-1.0, -(m + 0.5)))
    else:
        def k(u, v):
            num = np.exp((u / 2 - (m + 0.5) * v) * lnq) + np.exp((-u / 2 + (m + 0.5) * v) * lnq)
            return num / (np.exp((v - u) * lnq / 2) - np.exp((u - v) * lnq / 2))

        kappa = ((-1.0, float(m)), (-1.0, -float(m)))
    return k, kappa


def _log_x(x) -> complex:
    x = complex(x)
    if x.imag == 0 and x.real <= 0:
        raise DomainViolation("x lies on the cut (-inf, 0]")
    return cmath.log(x)


def _check_poles(x, centers, what: str):
    for c in centers:
        if abs(complex(x) - c) < POLE_RADIUS:
            raise PoleNeighborhood(f"x = {x} is within {POLE_RADIUS} of the excluded point {c} ({what})")


def _excluded_A(q: float, lo: int = -60, hi: int = 60):
    return [q ** n for n in range(lo, hi + 1)]


def _excluded_bcd(G: GroupType, q: float):
    eps = float(G.epsilon)
    pts = [q ** (n + eps) for n in range(-60, 61)]
    if G is GroupType.B:
        pts.append(1.0)
    return pts


def _auto_truncation(q: float, tol: float, U: float, extra: int) -> int:
    return int(math.ceil(U + math.log(tol * 1e-6) / math.log(q))) + extra + 2


# ---------------------------------------------------------------- type A, strip forms


def _strip_value(cfg, prefactor, problem, quad: QuadratureSpec):
    res = strip_bracket(
        problem,
        R=quad.shift,
        v_nodes=quad.v_nodes,
        u_nodes_per_unit=quad.u_nodes_per_unit,
        halfwidth=quad.u_halfwidth,
        tol=quad.tol,
        check=quad.check,
    )
    return cfg.ctx.mpc(prefactor) * cfg.ctx.mpc(res.value)


def typeA_finiteN_strip(lam, N: int, b: int, x, cfg: EvalConfig, quad: QuadratureSpec = DEFAULT_QUAD):
    """Strip-contour form of the normalized ratio with q^b x at position b."""
    lam = Signature(lam)
    cfg = _float_cfg(cfg)
    if not 1 <= b <= N - 1 or len(lam) != N:
        raise ValueError("need len(lam) = N and 1 <= b <= N - 1")
    q = float(cfg.q)
    lx = _log_x(x)
    if not q ** (N - b) < abs(complex(x)) < q ** (-(b + 1)):
        raise DomainViolation("need q^{N-b} < |x| < q^{-(b+1)}")
    _check_poles(x, _excluded_A(q), "q^n")
    t = {i: lam[b - i] for i in range(b + 1 - N, b + 1)}
    right = np.array([t[i] + i - 1 for i in range(1, b + 1)], dtype=float)
    left = np.array([j - t[1 - j] for j in range(1, N - b + 1)], dtype=float)
    problem = StripProblem(q, lx, right, left, _kernel_A(math.log(q)), ((1.0, 0.0),), "typeA_finiteN_strip")
    ctx = cfg.ctx
    xm = to_mpc(ctx, x)
    # the bracket as written evaluates to minus the ratio, hence the leading sign
    pref = -xm * cfg.log_q() ** 2 * qpochhammer(cfg, cfg.q, b) * qpochhammer(cfg, cfg.q, N - b - 1)
    pref /= qpochhammer(cfg, xm * cfg.fq(), b) * qpochhammer(cfg, cfg.fq() / xm, N - b - 1)
    return _strip_value(cfg, pref, problem, quad)


def _halfwidth_guess(quad: QuadratureSpec) -> float:
    return quad.u_halfwidth if quad.u_halfwidth is not None else 40.0


def phiA(t: BoundaryPointA, x, cfg: EvalConfig, quad: QuadratureSpec = DEFAULT_QUAD, continuation: bool = False):
    """The limit function Phi^t(x; q).

    With ``continuation=True`` points near the excluded set {q^n} are
    evaluated through the mean value over a small circle around x.
    """
    cfg = _float_cfg(cfg)
    q = float(cfg.q)
    near = [c for c in _excluded_A(q) if c != 1.0 and abs(complex(x) - c) < POLE_RADIUS]
    if near and continuation:
        return _circle_mean(lambda z: phiA(t, z, cfg, quad), x, q, cfg)
    lx = _log_x(x)
    _check_poles(x, [c for c in _excluded_A(q) if c != 1.0], "q^n")
    I = quad.product_truncation or _auto_truncation(q, quad.tol, _halfwidth_guess(quad), 0)
    right = np.array([t[i] + i - 1 for i in range(1, I + 1)], dtype=float)
    left = np.array([j - t[1 - j] for j in range(1, I + 1)], dtype=float)
    problem = StripProblem(q, lx, right, left, _kernel_A(math.log(q)), ((1.0, 0.0),), "phiA")
    ctx = cfg.ctx
    xm = to_mpc(ctx, x)
    fq = cfg.fq()
    tol = ctx.mpf(2) ** (-cfg.float_precision_bits)
    qq = _qpinf(cfg, fq, tol)
    pref = -xm * cfg.log_q() ** 2 * qq * qq / (_qpinf(cfg, fq * xm, tol) * _qpinf(cfg, fq / xm, tol))
    return _strip_value(cfg, pref, problem, quad)


def _qpinf(cfg, a, tol):
    from .arith import qpochhammer_inf

    return qpochhammer_inf(cfg, a, tol)


def _circle_mean(f, x, q: float, cfg: EvalConfig, nodes: int = 32):
    """f(x) as the average of f over a circle around x (f analytic in a disc around x).

    ``q`` is the ratio between neighbouring excluded points, so the circle
    stays clear of them.
    """
    ctx = cfg.ctx
    xc = complex(x)
    r = abs(xc) * (1 - q) / 2
    total = ctx.mpc(0)
    for k in range(nodes):
        z = xc + r * cmath.exp(2j * math.pi * (k + 0.5) / nodes)
        total += f(z)
    return total / nodes


def phiA_multivar(t: BoundaryPointA, xs, cfg: EvalConfig, quad: QuadratureSpec = DEFAULT_QUAD,
                  continuation: bool = False):
    """Phi^t(x_1, ..., x_k; q) by the determinant of shifted single-variable functions."""
    cfg = _float_cfg(cfg)
    ctx = cfg.ctx
    k = len(xs)
    xm = [to_mpc(ctx, x) for x in xs]
    V = vandermonde(xm[::-1])
    if V == 0:
        raise CoincidentPoints("points of the multivariate function must be distinct")
    fq = cfg.fq()
    rows = []
    for i in range(k):
        row = []
        for j in range(1, k + 1):
            entry = phiA(t.shift(1 - j), complex(xm[i] * fq ** (1 - j)), cfg, quad, continuation)
            for s in range(1, k + 1):
                if s != j:
                    entry *= xm[i] * fq ** (1 - s) - 1
            row.append(entry)
        rows.append(row)
    return _typeA_multivar_constant(cfg, k) / V * det(rows)


def _typeA_multivar_constant(cfg: EvalConfig, k: int):
    """q^{k(k-1)(2k-1)/6} / prod_{i<k} (q; q)_i.

    The (q; q)_i factors make the trivial signature give exactly 1.
    """
    q = cfg.q if cfg.exact else cfg.fq()
    out = q ** (k * (k - 1) * (2 * k - 1) // 6)
    for i in range(1, k):
        out /= qpochhammer(cfg, q, i)
    return out


# ---------------------------------------------------------------- types B, C, D


def _bcd_prefactor(G: GroupType, m: int, n, x, cfg: EvalConfig):
    """Prefactor of the strip forms; ``n`` is N - m - 1 or None for the limit."""
    ctx = cfg.ctx
    fq = cfg.fq()
    xm = to_mpc(ctx, x)
    tol = ctx.mpf(2) ** (-cfg.float_precision_bits)

    def poch(a, count):
        return _qpinf(cfg, a, tol) if count is None else qpochhammer(cfg, a, count)

    lq2 = cfg.log_q() ** 2
    if G is GroupType.C:
        top = (fq ** (m + 1) - fq ** (-(m + 1))) * qpochhammer(cfg, fq ** (m + 2), m) * qpochhammer(cfg, fq ** (-m), m)
        top *= poch(fq, n) * poch(fq ** (2 * m + 3), n)
        bot = (xm - 1 / xm) * qpochhammer(cfg, fq * xm, m) * qpochhammer(cfg, fq / xm, m)
        bot *= poch(fq ** (m + 2) * xm, n) * poch(fq ** (m + 2) / xm, n)
    elif G is GroupType.B:
        h = ctx.sqrt(fq)
        sx = ctx.sqrt(xm)
        top = (h ** (m + 0.5) - h ** (-(m + 0.5))) * qpochhammer(cfg, fq ** (m + 1), m) * qpochhammer(cfg, fq ** (-m), m)
        top *= poch(fq, n) * poch(fq ** (2 * m + 2), n)
        bot = (sx - 1 / sx) * qpochhammer(cfg, h * xm, m) * qpochhammer(cfg, h / xm, m)
        bot *= poch(fq ** (m + 1) * h * xm, n) * poch(fq ** (m + 1) * h / xm, n)
    else:
        top = (2 - (m == 0)) * qpochhammer(cfg, fq ** m, m) * qpochhammer(cfg, fq ** (-m), m)
        top *= poch(fq, n) * poch(fq ** (2 * m + 1), n)
        bot = 2 * qpochhammer(cfg, xm, m) * qpochhammer(cfg, 1 / xm, m)
        bot *= poch(fq ** (m + 1) * xm, n) * poch(fq ** (m + 1) / xm, n)
    return lq2 * top / bot


def _bcd_strip(G: GroupType, m: int, exps, n, x, cfg, quad, label):
    q = float(cfg.q)
    lx = _log_x(x)
    _check_poles(x, _excluded_bcd(G, q), "excluded set")
    kern, kappa = _kernel_bcd(G, m, math.log(q))
    arr = np.array(exps, dtype=float)
    problem = StripProblem(q, lx, arr, arr, kern, kappa, label)
    return _strip_value(cfg, _bcd_prefactor(G, m, n, x, cfg), problem, quad)


def phiBCD(G, y: BoundaryPointBC, m: int, x, cfg: EvalConfig, quad: QuadratureSpec = DEFAULT_QUAD,
           continuation: bool = False):
    """The limit function Phi_m^{y,G}(x; q); products use exponents y_i + i - 1 + eps."""
    G = group(G)
    cfg = _float_cfg(cfg)
    if m < 0:
        raise ValueError("m must be nonnegative")
    q = float(cfg.q)
    if continuation and any(abs(complex(x) - c) < POLE_RADIUS for c in _excluded_bcd(G, q)):
        step = math.sqrt(q) if G is GroupType.B else q
        return _circle_mean(lambda z: phiBCD(G, y, m, z, cfg, quad), x, step, cfg)
    eps = float(G.epsilon)
    I = quad.product_truncation or _auto_truncation(q, quad.tol, _halfwidth_guess(quad), 0)
    exps = [y[i] + i - 1 + eps for i in range(1, I + 1)]
    return _bcd_strip(G, m, exps, None, x, cfg, quad, "phiBCD")


def c_kN(G, k: int, N: int, cfg: EvalConfig):
    """The constant c_{k,N}^G(q) of the multivariate determinant identity."""
    G = group(G)
    e2 = 2 * G.epsilon

    def qp(h):
        return q_power(cfg, h)

    out = cfg.num(1)
    for i in range(1, k + 1):
        out *= qpochhammer(cfg, qp(i), N - k) * qpochhammer(cfg, qp(e2 + (k + i - 1)), N - k)
        out /= qpochhammer(cfg, qp(e2 + (i - 1)), i - 1) * qpochhammer(cfg, qp(1 - i), i - 1)
        out /= qpochhammer(cfg, qp(1), N - i) * qpochhammer(cfg, qp(e2 + (2 * i - 1)), N - i)
    return out


def c_k(G, k: int, cfg: EvalConfig):
    """The limit constant c_k^G(q)."""
    G = group(G)
    e2 = 2 * G.epsilon
    out = cfg.num(1)
    for i in range(1, k + 1):
        for h in (e2 + (i - 1), HalfInt.of(1 - i), HalfInt.of(1), e2 + (2 * k - 2 * i + 1)):
            out /= qpochhammer(cfg, q_power(cfg, h), i - 1)
    return out


def _bcd_det_weights(G: GroupType, x, j: int, k: int, cfg: EvalConfig):
    """(q^eps x, q^eps/x; q)_{j-1} (q^{j+eps} x, q^{j+eps}/x; q)_{k-j}."""
    a = q_power(cfg, G.epsilon)
    b = q_power(cfg, G.epsilon + j)
    return (qpochhammer(cfg, a * x, j - 1) * qpochhammer(cfg, a / x, j - 1)
            * qpochhammer(cfg, b * x, k - j) * qpochhammer(cfg, b / x, k - j))


def phiBCD_multivar(G, y: BoundaryPointBC, xs, cfg: EvalConfig, quad: QuadratureSpec = DEFAULT_QUAD,
                    continuation: bool = False):
    """Phi^{y,G}(x_1, ..., x_k; q); column j uses the single-variable function with m = j - 1."""
    G = group(G)
    cfg = _float_cfg(cfg)
    ctx = cfg.ctx
    k = len(xs)
    xm = [to_mpc(ctx, x) for x in xs]
    Vx = symplectic_vandermonde(xm)
    if Vx == 0:
        raise CoincidentOrbit("x_i + 1/x_i values collide")
    rows = [[phiBCD(G, y, j - 1, complex(x), cfg, quad, continuation) * _bcd_det_weights(G, x, j, k, cfg)
             for j in range(1, k + 1)] for x in xm]
    base = [q_power(cfg, G.epsilon + i) for i in range(k)]
    return c_k(G, k, cfg) * symplectic_vandermonde(base) / Vx * det(rows)


# ---------------------------------------------------------------- finite-N B, C, D


def _bcd_w_series(G: GroupType, lam, m: int, cfg: EvalConfig):
    """Closed form of the inner w-integral as polynomials in z.

    Returns (A1, A0) with W(z) = z * A1(z) + A0(z); the integrand's z-dependence
    inside the w-integral is at most linear, through (z - w^{2m+2}) in type B
    and (z + w^{2m+1}) in type D.
    """
    N = len(lam)
    ls = G.exponents(lam)
    roots = []
    for l in ls:
        p = q_power(cfg, l)
        roots += [p, 1 / p]
    base = _poly_from_roots(roots)
    one = cfg.num(1)

    def times_monomial(poly, deg, coef):
        out = [0 * one] * (len(poly) + deg)
        for i, c in enumerate(poly):
            out[i + deg] += coef * c
        return out

    def add(p1, p2):
        n = max(len(p1), len(p2))
        return [(p1[i] if i < len(p1) else 0) + (p2[i] if i < len(p2) else 0) for i in range(n)]

    if G is GroupType.B:
        # (w - 1) * (z - w^{2m+2}) * base / (w^{N+m+2} (w - z))
        wb = add(times_monomial(base, 1, one), times_monomial(base, 0, -one))
        z_part, const_part = wb, times_monomial(wb, 2 * m + 2, -one)
        K = N + m + 2
    elif G is GroupType.C:
        z_part, const_part = [], add(base, times_monomial(base, 2 * m + 2, -one))
        K = N + m + 1
    else:
        z_part, const_part = base, times_monomial(base, 2 * m + 1, one)
        K = N + m + 1

    # int dw/2pi i  Q(w) / (w^K (w - z)) = sum_{j >= K} Q_j z^{j-K}
    def extract(poly):
        return list(poly[K:])

    return extract(z_part), extract(const_part)


def _bcd_z_poles(G: GroupType, lam, cfg):
    ls = G.exponents(lam)
    poles = []
    for l in ls:
        poles += [(l, q_power(cfg, l)), (-l, q_power(cfg, -l))]
    return poles


def _bcd_residue_prefactor(G: GroupType, m: int, N: int, X, Xh, cfg):
    """Finite-N prefactor as a function of X = q^a (and Xh = q^{a/2} in type B)."""
    qp = lambda h: q_power(cfg, h)
    n = N - m - 1
    if G is GroupType.C:
        top = (qp(m + 1) - qp(-(m + 1))) * qpochhammer(cfg, qp(m + 2), m) * qpochhammer(cfg, qp(-m), m)
        top *= qpochhammer(cfg, qp(1), n) * qpochhammer(cfg, qp(2 * m + 3), n)
        bot = (X - 1 / X) * qpochhammer(cfg, qp(1) * X, m) * qpochhammer(cfg, qp(1) / X, m)
        bot *= qpochhammer(cfg, qp(m + 2) * X, n) * qpochhammer(cfg, qp(m + 2) / X, n)
    elif G is GroupType.B:
        h = HalfInt(1)
        top = _quarter_diff(cfg, m) * qpochhammer(cfg, qp(m + 1), m) * qpochhammer(cfg, qp(-m), m)
        top *= qpochhammer(cfg, qp(1), n) * qpochhammer(cfg, qp(2 * m + 2), n)
        bot = (Xh - 1 / Xh) * qpochhammer(cfg, qp(h) * X, m) * qpochhammer(cfg, qp(h) / X, m)
        bot *= qpochhammer(cfg, qp(h + (m + 1)) * X, n) * qpochhammer(cfg, qp(h + (m + 1)) / X, n)
    else:
        top = (2 - (m == 0)) * qpochhammer(cfg, qp(m), m) * qpochhammer(cfg, qp(-m), m)
        top *= qpochhammer(cfg, qp(1), n) * qpochhammer(cfg, qp(2 * m + 1), n)
        bot = 2 * qpochhammer(cfg, X, m) * qpochhammer(cfg, 1 / X, m)
        bot *= qpochhammer(cfg, qp(m + 1) * X, n) * qpochhammer(cfg, qp(m + 1) / X, n)
    if bot == 0:
        raise ApparentSingularity("the prefactor has an apparent singularity at this point")
    return top / bot


def _quarter_diff(cfg: EvalConfig, m: int):
    """q^{(m+1/2)/2} - q^{-(m+1/2)/2}, needing a fourth root of q."""
    if cfg.exact:
        raise ExactModeUnsupported("type B needs q^{1/4}; use the float backend")
    h = cfg.ctx.sqrt(cfg.fq())
    return h ** (m + 0.5) - h ** (-(m + 0.5))


def _bcd_residues(G: GroupType, lam, m: int, X, Xh, cfg):
    """Exact z-residue sum of the finite-N integrand (without prefactor)."""
    N = len(lam)
    A1, A0 = _bcd_w_series(G, lam, m, cfg)
    poles = _bcd_z_poles(G, lam, cfg)
    # z^{a + shift} at z = q^e equals X^e q^{e shift}; shift is N - 1/2 in type B, N - 1 otherwise
    shift = HalfInt.of(N) - (HalfInt(1) if G is GroupType.B else HalfInt(2))
    groups = {}
    for e, p in poles:
        groups.setdefault(p, []).append(e)
    total = 0 * X
    for p, es in groups.items():
        e = es[0]
        mult = len(es)

        def g(z, e=e):
            rest = 1
            for e2, p2 in poles:
                if p2 != p:
                    rest *= z - p2
            if G is GroupType.B:
                rest *= z - 1
            return (z * _horner(A1, z) + _horner(A0, z)) / rest

        def zpow(z_exp):
            # (q^{e})^{a + shift} where z_exp = e
            xa = _xpow(X, Xh, z_exp, cfg)
            e_sh = z_exp.as_fraction() * shift.as_fraction()
            if cfg.exact:
                return xa * q_power(cfg, HalfInt.of(e_sh))
            return xa * q_power_float(cfg, e_sh)

        if mult == 1:
            total += zpow(e) * g(p)
        else:
            total += _double_residue(G, p, e, X, Xh, shift, poles, A1, A0, cfg)
    if G is GroupType.B:
        # simple pole at z = 1 from 1/(z - 1); the factor (w - 1) is already in W
        rest = 1
        for _, p2 in poles:
            rest *= 1 - p2
        total += (_horner(A1, cfg.num(1)) + _horner(A0, cfg.num(1))) / rest
    return total


def _xpow(X, Xh, e: HalfInt, cfg):
    """(q^e)^a = X^e for half-integer e, using Xh = q^{a/2}."""
    if e.is_integral:
        return X ** int(e)
    return Xh ** e.doubled


def _double_residue(G, p, e, X, Xh, shift, poles, A1, A0, cfg):
    """Residue at the double pole z = 1 (type D with lambda_N = 0)."""
    # integrand = z^{a+N-1} W(z) / ((z - 1)^2 prod_{others}(z - p2)); residue = d/dz [z^{a+N-1} W(z) / rest] at z = 1
    one = cfg.num(1)
    others = [p2 for _, p2 in poles if p2 != p]
    rest = 1
    dlog_rest = 0
    for p2 in others:
        rest *= one - p2
        dlog_rest += 1 / (one - p2)
    W = one * _horner(A1, one) + _horner(A0, one)
    dA1 = [i * c for i, c in enumerate(A1)][1:]
    dA0 = [i * c for i, c in enumerate(A0)][1:]
    dW = _horner(A1, one) + _horner(dA1, one) + _horner(dA0, one)
    a_exp = _exponent_of(X, cfg)
    power = a_exp + shift.as_fraction() if cfg.exact else a_exp + float(shift)
    return (power * W + dW - W * dlog_rest) / rest


def _exponent_of(X, cfg):
    """Recover a from X = q^a."""
    if cfg.exact:
        a = 0
        v = Fraction(X)
        if v >= 1:
            while v > 1:
                v /= cfg.q
                a -= 1
        else:
            while v < 1:
                v /= cfg.q
                a += 1
        if v != 1:
            raise ExactModeUnsupported("exact residues need x to be an integer power of q")
        return a
    return cfg.ctx.log(X) / cfg.log_q()


def bcd_finiteN_integral(G, lam, N: int, m: int, x, cfg: EvalConfig, quad: QuadratureSpec = DEFAULT_QUAD,
                         method: str = "contour"):
    """Right side of the finite-N contour identity for types B, C, D.

    method:
      ``residue``  exact residue sum (x an integer power of q in exact mode, any x in float mode);
      ``contour``  closed z-contour quadrature in logarithmic coordinates with the w-integral in closed form;
      ``strip``    the strip double integral (needs q^N < |x| < q^{-N}).
    """
    G = group(G)
    lam = NonnegSignature(lam)
    if len(lam) != N or not 0 <= m <= N - 1:
        raise ValueError("need len(lam) = N and 0 <= m <= N - 1")
    if method == "strip":
        fcfg = _float_cfg(cfg)
        q = float(fcfg.q)
        if not q ** N < abs(complex(x)) < q ** (-N):
            raise DomainViolation("need q^N < |x| < q^{-N}")
        exps = [float(l) for l in G.exponents(lam)]
        return _bcd_strip(G, m, exps, N - m - 1, x, fcfg, quad, "bcd_finiteN_integral")
    if method == "contour" or (method == "residue" and not cfg.exact):
        q = float(cfg.q)
        if any(abs(complex(x) - c) < POLE_RADIUS for c in _excluded_bcd(G, q)):
            # the prefactor is singular here while the ratio is a Laurent polynomial in x
            step = math.sqrt(q) if G is GroupType.B else q
            return _circle_mean(lambda z: bcd_finiteN_integral(G, lam, N, m, z, cfg, quad, method), x, step, cfg)
    if method == "residue":
        if cfg.exact:
            X = Fraction(x)
            a = _exponent_of(X, cfg)
            Xh = q_power(cfg, HalfInt(a)) if G is GroupType.B else None
        else:
            X = to_mpc(cfg.ctx, x)
            Xh = cfg.ctx.sqrt(X)
        pref = _bcd_residue_prefactor(G, m, N, X, Xh, cfg)
        return pref * _bcd_residues(G, lam, m, X, Xh, cfg)
    if method == "contour":
        return _bcd_contour(G, lam, m, x, _float_cfg(cfg), quad)
    raise ValueError(f"unknown method {method!r}")


def _bcd_contour(G: GroupType, lam, m: int, x, cfg: EvalConfig, quad: QuadratureSpec):
    """z-integral over a rectangle in u = log_q z around [-l_1, l_1], w-integral in closed form.

    The residues inside the rectangle cancel heavily, so the quadrature runs
    in multiprecision (gmpy2) with the working precision raised until the
    cancellation leaves at least 64 correct bits.  The result is only ever
    handed back as a complex double, so the starting precision is fixed.
    """
    _check_poles(x, _excluded_bcd(G, float(cfg.q)), "excluded set")
    bits = 128
    while True:
        value, cancel_bits = _bcd_contour_at(G, lam, m, complex(x), cfg, quad, bits)
        if value is not None and cancel_bits + 64 <= bits:
            break
        bits = int(cancel_bits) + 128
    pref = _bcd_prefactor(G, m, len(lam) - m - 1, x, cfg) / cfg.log_q() ** 2
    return cfg.ctx.mpc(pref) * cfg.ctx.mpc(value)


@functools.lru_cache(maxsize=None)
def _gl_rule(degree: int, bits: int):
    """Gauss-Legendre nodes and weights on [-1, 1] (3 * 2^(degree-1) points) as gmpy2 numbers."""
    ctx = mp_context(bits)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return tuple((_to_gmpy(n), _to_gmpy(w)) for n, w in GaussLegendre(ctx).calc_nodes(degree, bits))


def _to_gmpy(v):
    """Exact conversion of an mpmath mpf into a gmpy2 mpfr at the current precision."""
    sign, man, exp, _ = v._mpf_
    out = gmpy2.mul_2exp(gmpy2.mpfr(int(man)), exp)
    return -out if sign else out


def _to_gmpy_c(v):
    return gmpy2.mpc(_to_gmpy(v.real), _to_gmpy(v.imag))


@functools.lru_cache(maxsize=512)
def _rect_nodes(L: float, H: float, q: Fraction, degree: int, bits: int):
    """Quadrature nodes on the boundary of [-L, L] x [-H, H] in u = log_q z.

    Returns (u, z, c) triples with z = q^u and c = weight * du/ds * z ln q, the
    part of the integrand that does not depend on the signature or on x.
    """
    rule = _gl_rule(degree, bits)
    lnq = gmpy2.log(gmpy2.mpfr(gmpy2.mpq(q.numerator, q.denominator)))
    segs = []
    k = int(math.ceil(L))
    for s0 in range(-k, k):
        a, b = max(s0, -L), min(s0 + 1, L)
        if b > a:
            # counterclockwise in u, hence also in z = q^u
            segs.append((gmpy2.mpc(a, -H), gmpy2.mpc(b, -H)))
            segs.append((gmpy2.mpc(b, H), gmpy2.mpc(a, H)))
    # vertical edges pass half a unit from the outermost poles
    n = int(math.ceil(4 * H))
    edges = [-H + 2 * H * i / n for i in range(n + 1)]
    for a, b in zip(edges[:-1], edges[1:]):
        segs.append((gmpy2.mpc(L, a), gmpy2.mpc(L, b)))
        segs.append((gmpy2.mpc(-L, b), gmpy2.mpc(-L, a)))
    out = []
    for a, b in segs:
        mid, rad = (a + b) / 2, (b - a) / 2
        for t, w in rule:
            u = mid + rad * t
            z = gmpy2.exp(u * lnq)
            out.append((u, z, w * rad * z * lnq))
    return tuple(out)


def _bcd_contour_at(G: GroupType, lam, m: int, x: complex, cfg: EvalConfig, quad: QuadratureSpec, bits: int):
    hi = EvalConfig(cfg.q, cfg.sqrt_q, bits, "float")
    N = len(lam)
    A1, A0 = _bcd_w_series(G, lam, m, hi.with_mode("float"))
    ls = [float(l) for l in G.exponents(lam)]
    L = max(ls) + 0.5
    H = math.pi / (2 * abs(math.log(float(cfg.q))))
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        A1 = [_to_gmpy_c(hi.ctx.mpc(c)) for c in A1][::-1]
        A0 = [_to_gmpy_c(hi.ctx.mpc(c)) for c in A0][::-1]
        lnq = gmpy2.log(gmpy2.mpfr(gmpy2.mpq(cfg.q.numerator, cfg.q.denominator)))
        poles = [gmpy2.exp(s * gmpy2.mpfr(l) * lnq) for l in ls for s in (1, -1)]
        if G is GroupType.B:
            poles.append(gmpy2.mpfr(1))
        shift = N - (0.5 if G is GroupType.B else 1.0)
        # z^{a + shift} = x^u q^{u shift}
        expo = gmpy2.log(gmpy2.mpc(x)) + gmpy2.mpfr(shift) * lnq
        two_pi_i = gmpy2.mpc(0, 2 * gmpy2.const_pi())

        def rectangle(degree):
            total = gmpy2.mpc(0)
            mass = gmpy2.mpfr(0)
            for u, z, c in _rect_nodes(L, H, cfg.q, degree, bits):
                den = gmpy2.mpc(1)
                for pz in poles:
                    den *= z - pz
                p1 = gmpy2.mpc(0)
                for cf in A1:
                    p1 = p1 * z + cf
                p0 = gmpy2.mpc(0)
                for cf in A0:
                    p0 = p0 * z + cf
                term = gmpy2.exp(u * expo) * (z * p1 + p0) * c / den
                total += term
                mass += abs(term)
            return total / two_pi_i, mass / abs(two_pi_i)

        degree = 2
        coarse, mass = rectangle(degree)
        if coarse != 0 and float(gmpy2.log2(mass / abs(coarse))) + 64 > bits:
            # not enough working precision; the caller retries higher
            return None, float(gmpy2.log2(mass / abs(coarse)))
        while True:
            fine, mass = rectangle(degree + 1)
            diff = abs(fine - coarse)
            # geometric convergence: the finer value is far inside tol once successive ones agree
            if diff <= quad.tol * 0.1 * max(abs(fine), 1e-300) or degree >= 7:
                break
            degree, coarse = degree + 1, fine
        if diff > quad.tol * max(abs(fine), 1e-300):
            raise NonConvergedQuadrature(f"bcd contour quadrature changed by {float(diff):.3e} under node doubling")
        cancel_bits = max(0.0, float(gmpy2.log2(mass / abs(fine)))) if fine != 0 else float(bits)
        return complex(fine), cancel_bits


# ---------------------------------------------------------------- multivariate determinants


def typeA_multivar_det(lam, N: int, b: int, k: int, xs, cfg: EvalConfig, entry=None):
    """Right side of the multivariate type-A determinant identity.

    Entries are single-variable ratios with q^b x_i at position b + j - 1,
    computed directly unless ``entry(pos, value)`` is supplied.
    """
    lam = Signature(lam)
    if b + k > N or len(xs) != k:
        raise ValueError("need b + k <= N and k points")
    conv = (lambda v: Fraction(v)) if cfg.exact else (lambda v: to_mpc(cfg.ctx, v))
    xs = [conv(x) for x in xs]
    V = vandermonde(xs[::-1])
    if V == 0:
        raise CoincidentPoints("x values must be distinct")
    q = cfg.q if cfg.exact else cfg.fq()
    if entry is None:
        entry = lambda pos, val: schur_ratio(lam, pos, val, cfg)
    rows = []
    for x in xs:
        row = []
        for j in range(1, k + 1):
            val = entry(b + j - 1, q ** b * x)
            for s in range(1, k + 1):
                if s != j:
                    val *= x * q ** (1 - s) - 1
            row.append(val)
        rows.append(row)
    return _typeA_multivar_constant(cfg, k) / V * det(rows)


def bcd_multivar_det(G, lam, N: int, k: int, xs, cfg: EvalConfig, entry=None):
    """Right side of the multivariate B/C/D determinant identity with c_{k,N}^G."""
    G = group(G)
    lam = NonnegSignature(lam)
    if not 1 <= k <= N or len(xs) != k:
        raise ValueError("need 1 <= k <= N and k points")
    conv = (lambda v: Fraction(v)) if cfg.exact else (lambda v: to_mpc(cfg.ctx, v))
    xs = [conv(x) for x in xs]
    Vx = symplectic_vandermonde(xs)
    if Vx == 0:
        raise CoincidentOrbit("x_i + 1/x_i values collide")
    if entry is None:
        entry = lambda pos, val: bcd_ratio(G, lam, pos, val, cfg)
    rows = [[entry(j - 1, x) * _bcd_det_weights(G, x, j, k, cfg) for j in range(1, k + 1)] for x in xs]
    base = [q_power(cfg, G.epsilon + i) for i in range(k)]
    return c_kN(G, k, N, cfg) * symplectic_vandermonde(base) / Vx * det(rows)


def schur_ratio_multi(lam, b: int, xs, cfg: EvalConfig):
    """Direct left side: q^b x_1, ..., q^b x_k placed at positions b..b+k-1."""
    N = len(lam)
    pts = [q_power(cfg, i) for i in range(N)]
    q = cfg.q if cfg.exact else cfg.fq()
    for i, x in enumerate(xs):
        pts[b + i] = q ** b * (Fraction(x) if cfg.exact else to_mpc(cfg.ctx, x))
    return schur_ratio_points(lam, pts, cfg)


def bcd_ratio_multi(G, lam, xs, cfg: EvalConfig):
    """Direct left side: x_1, ..., x_k replacing q^eps, ..., q^{k-1+eps}."""
    G = group(G)
    N = len(lam)
    pts = [q_power(cfg, G.epsilon + i) for i in range(N)]
    for i, x in enumerate(xs):
        pts[i] = Fraction(x) if cfg.exact else to_mpc(cfg.ctx, x)
    return bcd_ratio_points(G, lam, pts, cfg)
