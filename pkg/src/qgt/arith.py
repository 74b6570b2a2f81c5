"""Scalar arithmetic: half-integer exponents, powers of q, q-Pochhammer symbols.

Two backends are supported.  Exact values are ``fractions.Fraction`` (or
``int``); float values are ``mpc`` numbers of an mpmath context whose
precision is fixed by the :class:`EvalConfig` that created them.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import mpmath

from .errors import ExactModeUnsupported, HalfPowerUnavailable

EXACT = "exact"
FLOAT = "float"


@functools.total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An element of (1/2)Z stored as twice its value."""

    doubled: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        v = Fraction(value)
        d = 2 * v
        if d.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(int(d))

    @property
    def is_integral(self) -> bool:
        return self.doubled % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.doubled, 2)

    def __int__(self) -> int:
        if not self.is_integral:
            raise ValueError(f"{self} is not an integer")
        return self.doubled // 2

    def __float__(self) -> float:
        return self.doubled / 2

    def __add__(self, other):
        return HalfInt(self.doubled + HalfInt.of(other).doubled)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.doubled - HalfInt.of(other).doubled)

    def __rsub__(self, other):
        return HalfInt(HalfInt.of(other).doubled - self.doubled)

    def __neg__(self):
        return HalfInt(-self.doubled)

    def __mul__(self, other):
        if not isinstance(other, int):
            return NotImplemented
        return HalfInt(self.doubled * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self.doubled == HalfInt.of(other).doubled
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.doubled < HalfInt.of(other).doubled

    def __hash__(self):
        return hash(Fraction(self.doubled, 2))

    def __str__(self):
        return str(self.doubled // 2) if self.is_integral else f"{self.doubled}/2"


@functools.lru_cache(maxsize=None)
def mp_context(bits: int) -> mpmath.ctx_mp.MPContext:
    """Return a private mpmath context with the given working precision."""
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True)
class EvalConfig:
    """Numeric configuration: the value of q, an optional exact sqrt(q), and the backend."""

    q: Fraction
    sqrt_q: Fraction | None = None
    float_precision_bits: int = 256
    mode: str = EXACT
    ctx: mpmath.ctx_mp.MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        q = Fraction(self.q)
        object.__setattr__(self, "q", q)
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.float_precision_bits < 53:
            raise ValueError("float precision must be at least 53 bits")
        s = self.sqrt_q
        if s is None:
            s = _exact_sqrt(q)
        else:
            s = Fraction(s)
            if s <= 0 or s * s != q:
                raise ValueError("sqrt_q must be the positive square root of q")
        object.__setattr__(self, "sqrt_q", s)
        object.__setattr__(self, "ctx", mp_context(self.float_precision_bits))

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def with_mode(self, mode: str) -> "EvalConfig":
        return EvalConfig(self.q, self.sqrt_q, self.float_precision_bits, mode)

    def num(self, x):
        """Coerce a Python number (int, Fraction, float, complex, mpmath) into this backend."""
        if self.exact:
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise TypeError(f"cannot use {x!r} in exact mode")
        return to_mpc(self.ctx, x)

    def fq(self):
        """q as a float-backend real number."""
        return self.ctx.mpf(self.q.numerator) / self.q.denominator

    def log_q(self):
        return self.ctx.log(self.fq())


def to_mpc(ctx, x):
    if isinstance(x, Rational) and not isinstance(x, int):
        return ctx.mpc(ctx.mpf(x.numerator) / x.denominator)
    return ctx.mpc(x)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_exact_value(x) -> bool:
    return isinstance(x, (int, Fraction))


def q_power(cfg: EvalConfig, a) -> Fraction:
    """q**a for a half-integer a in the configured backend."""
    a = HalfInt.of(a)
    if cfg.exact:
        if a.is_integral:
            return cfg.q ** int(a)
        if cfg.sqrt_q is None:
            raise HalfPowerUnavailable(f"q^{a} needs an exact square root of q={cfg.q}")
        return cfg.sqrt_q ** a.doubled
    ctx = cfg.ctx
    return ctx.mpc(ctx.power(cfg.fq(), ctx.mpf(a.doubled) / 2))


def q_power_float(cfg: EvalConfig, a):
    """q**a for an arbitrary real or complex exponent (float backend only)."""
    if cfg.exact:
        raise ExactModeUnsupported("non half-integral exponent in exact mode")
    ctx = cfg.ctx
    return ctx.exp(to_mpc(ctx, a) * cfg.log_q())


def qpochhammer(cfg: EvalConfig, a, n: int):
    """(a; q)_n = prod_{i=1}^{n} (1 - a q^{i-1})."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = cfg.num(a)
    q = cfg.q if cfg.exact else cfg.fq()
    out = cfg.num(1)
    term = a
    for _ in range(n):
        out *= 1 - term
        term *= q
    return out


def qpochhammer_inf(cfg: EvalConfig, a, tol: float = 1e-40):
    """(a; q)_inf truncated once |a| q^{n-1} < tol."""
    if cfg.exact:
        raise ExactModeUnsupported("infinite q-Pochhammer symbols are float only")
    ctx = cfg.ctx
    a = to_mpc(ctx, a)
    q = cfg.fq()
    out = ctx.mpc(1)
    term = a
    while abs(term) >= tol:
        out *= 1 - term
        term *= q
    return out


def det(matrix):
    """Determinant of a square matrix given as a list of rows.

    Exact entries use Bareiss fraction-free elimination; anything else uses
    Gaussian elimination with partial pivoting.
    """
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if all(is_exact_value(x) for row in a for x in row):
        return _det_bareiss(a)
    return _det_pivot(a)


def _det_bareiss(a):
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) / prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_pivot(a):
    n = len(a)
    out = 1
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(a[r][k]))
        if a[p][k] == 0:
            return 0 * a[k][k]
        if p != k:
            a[k], a[p] = a[p], a[k]
            out = -out
        akk = a[k][k]
        out *= akk
        for i in range(k + 1, n):
            f = a[i][k] / akk
            if f:
                row_i, row_k = a[i], a[k]
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
    return out
