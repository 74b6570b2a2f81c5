"""Signatures and evaluation of Schur and type B/C/D characters.

Every evaluator is generic over the backend: exact points (``int`` or
``Fraction``) give exact results, mpmath points give float results.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .arith import EvalConfig, HalfInt, det, is_exact_value, q_power
from .errors import BadShape, CoincidentOrbit, CoincidentPoints, LengthMismatch, ZeroPoint


class Signature(tuple):
    """A weakly decreasing tuple of integers (a highest weight of GL(N))."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"{parts} is not weakly decreasing")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def n(self) -> int:
        """n(lambda) = sum (i-1) lambda_i."""
        return sum(i * p for i, p in enumerate(self))

    def shifted(self, c: int) -> "Signature":
        return Signature(p + c for p in self)

    def __repr__(self):
        return f"{type(self).__name__}({tuple(self)})"


class NonnegSignature(Signature):
    """A signature with nonnegative parts (a partition padded with zeros)."""

    def __new__(cls, parts=()):
        self = super().__new__(cls, parts)
        if self and self[-1] < 0:
            raise ValueError(f"{tuple(self)} has a negative part")
        return self

    @property
    def length(self) -> int:
        """Number of nonzero parts."""
        return sum(1 for p in self if p > 0)

    def conjugate(self) -> tuple:
        top = self[0] if self else 0
        return tuple(sum(1 for p in self if p >= j) for j in range(1, top + 1))


class GroupType(enum.Enum):
    B = "B"
    C = "C"
    D = "D"

    @property
    def epsilon(self) -> HalfInt:
        return {"B": HalfInt(1), "C": HalfInt(2), "D": HalfInt(0)}[self.value]

    def exponents(self, lam) -> list[HalfInt]:
        """l_i = lambda_i + N - i + epsilon."""
        N = len(lam)
        return [self.epsilon + (p + N - 1 - i) for i, p in enumerate(lam)]


def group(tag) -> GroupType:
    return tag if isinstance(tag, GroupType) else GroupType(str(tag).upper())


@dataclass(frozen=True)
class FrobeniusCoords:
    a: tuple
    b: tuple

    def __post_init__(self):
        for seq in (self.a, self.b):
            if any(x < 0 for x in seq) or any(seq[i] <= seq[i + 1] for i in range(len(seq) - 1)):
                raise ValueError("Frobenius coordinates must be strictly decreasing and nonnegative")
        if len(self.a) != len(self.b):
            raise ValueError("arm and leg tuples differ in length")

    @property
    def rank(self) -> int:
        return len(self.a)

    @classmethod
    def from_partition(cls, lam) -> "FrobeniusCoords":
        lam = NonnegSignature(lam)
        conj = lam.conjugate()
        d = sum(1 for i, p in enumerate(lam) if p > i)
        return cls(tuple(lam[i] - i - 1 for i in range(d)), tuple(conj[i] - i - 1 for i in range(d)))

    def to_partition(self, N: int) -> NonnegSignature:
        cells = set()
        for i, (a, b) in enumerate(zip(self.a, self.b)):
            cells.update((i, i + j) for j in range(a + 1))
            cells.update((i + j, i) for j in range(b + 1))
        rows = [0] * N
        for r, _ in cells:
            if r >= N:
                raise BadShape("partition has more than N rows")
            rows[r] += 1
        return NonnegSignature(rows)


def interlaces(kind: str, upper, lower) -> bool:
    """upper > lower in the GT sense (kind='gt') or the same-length BC sense."""
    if kind == "gt":
        if len(upper) != len(lower) + 1:
            raise LengthMismatch("gt interlacing needs len(upper) = len(lower) + 1")
        return all(upper[i] >= lower[i] >= upper[i + 1] for i in range(len(lower)))
    if kind == "bc_same_length":
        if len(upper) != len(lower):
            raise LengthMismatch("bc interlacing needs equal lengths")
        if (upper and upper[-1] < 0) or (lower and lower[-1] < 0):
            raise ValueError("bc interlacing needs nonnegative signatures")
        n = len(upper)
        return all(upper[i] >= lower[i] and (i + 1 == n or lower[i] >= upper[i + 1]) for i in range(n))
    raise ValueError(f"unknown interlacing kind {kind!r}")


def interlacing_lower(upper) -> list[Signature]:
    """All mu with mu < upper (gt sense)."""
    ranges = [range(upper[i + 1], upper[i] + 1) for i in range(len(upper) - 1)]
    return [Signature(parts) for parts in itertools.product(*ranges)]


def _zero(points):
    return 0 * points[0] if points else 0


def _power(x, e: int):
    if e < 0 and x == 0:
        raise ZeroPoint("negative power of a zero point")
    return x ** e


def vandermonde(points):
    out = 1
    for i, j in itertools.combinations(range(len(points)), 2):
        out *= points[i] - points[j]
    return out


# ---------------------------------------------------------------- type A


def schur_eval(lam, points):
    """s_lambda(points) as the ratio of the alternant to the Vandermonde determinant."""
    lam = Signature(lam)
    N = len(lam)
    if len(points) != N:
        raise LengthMismatch(f"{len(points)} points for a signature of length {N}")
    if N == 0:
        return 1
    if any(p == 0 for p in points) and lam[-1] < 0:
        raise ZeroPoint("a zero point needs nonnegative parts")
    V = vandermonde(points)
    if V == 0:
        raise CoincidentPoints("points are not pairwise distinct")
    exps = [p + N - 1 - j for j, p in enumerate(lam)]
    num = det([[_power(x, e) for e in exps] for x in points])
    return num / V


def schur_principal(lam, N: int, cfg: EvalConfig):
    """s_lambda(1, q, ..., q^{N-1}) by the closed product."""
    lam = Signature(lam)
    if len(lam) != N:
        raise LengthMismatch("signature length differs from N")
    out = q_power(cfg, lam.n)
    for i, j in itertools.combinations(range(N), 2):
        out *= (1 - q_power(cfg, lam[i] - lam[j] + j - i)) / (1 - q_power(cfg, j - i))
    return out


def power_sums(points, m: int) -> list:
    """[p_1, ..., p_m] of the points."""
    out = []
    powers = list(points)
    for _ in range(m):
        out.append(sum(powers, _zero(points)))
        powers = [a * b for a, b in zip(powers, points)]
    return out


def complete_hom(points, m: int) -> list:
    """[h_0, ..., h_m] via the Newton recurrence k h_k = sum p_i h_{k-i}."""
    p = power_sums(points, m)
    h = [1 + _zero(points)]
    for k in range(1, m + 1):
        h.append(sum((p[i - 1] * h[k - i] for i in range(1, k + 1)), _zero(points)) / k)
    return h


def elementary(points, m: int | None = None) -> list:
    """[e_0, ..., e_n] by expanding prod (1 + x_i t) one factor at a time."""
    e = [1 + _zero(points)]
    for x in points:
        e = [a + (x * e[i - 1] if i > 0 else 0) for i, a in enumerate(e)] + [x * e[-1]]
    if m is not None:
        e = (e + [_zero(points)] * (m + 1))[: m + 1]
    return e


def _symbols(kind: str, points) -> list:
    if kind in ("h", "e"):
        return list(points)
    if any(z == 0 for z in points):
        raise ZeroPoint("inverse of a zero point")
    sym = [z for z in points] + [1 / z for z in points]
    if kind in ("HB", "EB"):
        sym.append(1 + _zero(points))
    return sym


def sym_poly_eval(kind: str, m: int, points):
    """h_m, e_m, or their B and CD symbol-set variants H_m, E_m."""
    if kind not in ("h", "e", "HB", "EB", "HCD", "ECD"):
        raise ValueError(f"unknown kind {kind!r}")
    sym = _symbols(kind, points)
    if m < 0:
        return _zero(sym)
    if kind in ("h", "HB", "HCD"):
        return complete_hom(sym, m)[m]
    e = elementary(sym)
    return e[m] if m < len(e) else _zero(sym)


class _Table:
    """Lazily extended h or e table with zero for negative indices."""

    def __init__(self, kind: str, sym):
        self.kind = kind
        self.sym = sym
        self.vals = []

    def __getitem__(self, m: int):
        if m < 0:
            return _zero(self.sym)
        if m >= len(self.vals):
            if self.kind == "h":
                self.vals = complete_hom(self.sym, max(m, 2 * len(self.vals)))
            else:
                self.vals = elementary(self.sym, max(m, len(self.sym)))
        return self.vals[m]


def schur_jt(lam, points):
    """s_lambda by a Jacobi-Trudi determinant; valid for coincident points."""
    lam = Signature(lam)
    N = len(lam)
    if len(points) != N:
        raise LengthMismatch(f"{len(points)} points for a signature of length {N}")
    if N == 0:
        return 1
    c = lam[-1]
    prefactor = 1 + _zero(points)
    for x in points:
        prefactor *= _power(x, c)
    return prefactor * skew_schur(lam.shifted(-c), (), points)


def skew_schur(lam, mu, points):
    """s_{lam/mu}(points) for partitions (mu zero padded) by the smaller Jacobi-Trudi form."""
    lam = [p for p in lam if p > 0]
    mu = [p for p in mu if p > 0]
    if len(mu) > len(lam) or any(m > l for m, l in zip(mu, lam)):
        return _zero(points)
    if not lam:
        return 1 + _zero(points)
    conj = lambda part: [sum(1 for p in part if p >= j) for j in range(1, (part[0] if part else 0) + 1)]
    if len(lam) <= lam[0]:
        n, big, small, table = len(lam), lam, mu, _Table("h", list(points))
    else:
        big, small = conj(lam), conj(mu)
        n, table = len(big), _Table("e", list(points))
    small = small + [0] * (n - len(small))
    return det([[table[big[i] - small[j] - i + j] for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------- types B, C, D


def _point_value(p):
    """Accept either a bare point or a (value, square root) pair."""
    if isinstance(p, tuple):
        z, r = p
        if r * r != z:
            raise ValueError("supplied square root does not square to the point")
        return z
    return p


def symplectic_vandermonde(points):
    out = 1
    for i, j in itertools.combinations(range(len(points)), 2):
        out *= points[i] + 1 / points[i] - points[j] - 1 / points[j]
    return out


def _weyl_entry(G: GroupType, z, e: int):
    """Type-appropriate numerator entry as a Laurent polynomial in z; e = lambda_i + N - i."""
    if G is GroupType.D:
        return z ** e + z ** (-e)
    if G is GroupType.B:
        # (z^{e+1/2} - z^{-e-1/2}) / (z^{1/2} - z^{-1/2}) = sum_{k=-e}^{e} z^k
        if z == 1:
            return 2 * e + 1 + 0 * z
        return (z ** (e + 1) - z ** (-e)) / (z - 1)
    # (z^{e+1} - z^{-e-1}) / (z - 1/z) = sum_{j=0}^{e} z^{e-2j}
    if z == 1 or z == -1:
        return (e + 1) * z ** e
    return (z ** (e + 1) - z ** (-e - 1)) / (z - 1 / z)


def bcd_eval(G, lam, points):
    """chi^G_lambda at the points by the Weyl determinant ratio."""
    G = group(G)
    lam = NonnegSignature(lam)
    N = len(lam)
    pts = [_point_value(p) for p in points]
    if len(pts) != N:
        raise LengthMismatch(f"{len(pts)} points for a signature of length {N}")
    if any(z == 0 for z in pts):
        raise ZeroPoint("characters need nonzero points")
    if N == 0:
        return 1
    Vs = symplectic_vandermonde(pts)
    if Vs == 0:
        raise CoincidentOrbit("z_i + 1/z_i values collide")
    exps = [p + N - 1 - i for i, p in enumerate(lam)]
    return det([[_weyl_entry(G, z, e) for z in pts] for e in exps]) / Vs


def bcd_principal_points(G, N: int, cfg: EvalConfig) -> list:
    """(q^eps, q^{1+eps}, ..., q^{N-1+eps})."""
    G = group(G)
    return [q_power(cfg, G.epsilon + i) for i in range(N)]


def bcd_principal(G, lam, cfg: EvalConfig):
    """chi^G_lambda(q^eps, ..., q^{N-1+eps}) by the closed product formula."""
    G = group(G)
    lam = NonnegSignature(lam)
    N = len(lam)
    if N == 0:
        return cfg.num(1)
    ls = G.exponents(lam)
    rho = G.exponents([0] * N)
    out = cfg.num(2 if G is GroupType.D else 1)
    if G is GroupType.B:
        # prod (q^{-l/2} - q^{l/2}) over the same with l -> rho
        out *= q_power(cfg, HalfInt(-lam.size))
        for l, r in zip(ls, rho):
            out *= (1 - q_power(cfg, l)) / (1 - q_power(cfg, r))
    elif G is GroupType.C:
        out *= q_power(cfg, -lam.size)
        for l, r in zip(ls, rho):
            out *= (1 - q_power(cfg, HalfInt(2 * l.doubled))) / (1 - q_power(cfg, HalfInt(2 * r.doubled)))
    ql = [q_power(cfg, l) for l in ls]
    qr = [q_power(cfg, r) for r in rho]
    return out * symplectic_vandermonde(ql) / symplectic_vandermonde(qr)


def hook_char_eval(family: str, a: int, b: int, N: int, points):
    """Character of the hook (a+1, 1^b, 0^{N-b-1}) by alternating h/e sums."""
    if N < b + 1 or a < 0 or b < 0:
        raise BadShape(f"hook ({a}|{b}) does not fit in {N} rows")
    pts = [_point_value(p) for p in points]
    if len(pts) != N:
        raise LengthMismatch(f"{len(pts)} points for N={N}")
    if family == "schurA":
        h, e = _Table("h", pts), _Table("e", pts)
        return sum(((-1) ** i * h[a + 1 + i] * e[b - i] for i in range(b + 1)), _zero(pts))
    G = group(family)
    sym = _symbols("HB" if G is GroupType.B else "HCD", pts)
    H, E = _Table("h", sym), _Table("e", sym)
    if G is GroupType.C:
        out = H[a + 1] * E[b]
        for i in range(1, b + 1):
            out += (-1) ** i * (H[a + 1 + i] + H[a + 1 - i]) * E[b - i]
        return out
    out = sum(((-1) ** i * (H[a + 1 + i] - H[a - 1 - i]) * E[b - i] for i in range(b + 1)), _zero(sym))
    if G is GroupType.D and b != N - 1:
        out *= 2
    return out


def jacobi_trudi_eval(G, lam, points):
    """chi^G_lambda by the H-determinant of size equal to the number of nonzero parts."""
    G = group(G)
    lam = NonnegSignature(lam)
    N = len(lam)
    pts = [_point_value(p) for p in points]
    if len(pts) != N:
        raise LengthMismatch(f"{len(pts)} points for a signature of length {N}")
    sym = _symbols("HB" if G is GroupType.B else "HCD", pts) if pts else []
    H = _Table("h", sym)
    parts = [p for p in lam if p > 0]
    n = len(parts)
    if G is GroupType.C:
        mat = [[H[parts[i] + j - i] + (H[parts[i] - i - j] if j > 0 else 0) for j in range(n)] for i in range(n)]
    else:
        mat = [[H[parts[i] + j - i] - H[parts[i] - i - j - 2] for j in range(n)] for i in range(n)]
    out = det(mat)
    # the determinant is the O(2N) character; the twin sum doubles it when lambda_N = 0
    if G is GroupType.D and n < N:
        out *= 2
    return out + _zero(sym)


def frobenius_det_eval(G, lam, points):
    """chi^G_lambda as a determinant of hook characters in Frobenius coordinates."""
    G = group(G)
    lam = NonnegSignature(lam)
    N = len(lam)
    fc = FrobeniusCoords.from_partition(lam)
    if any(b > N - 1 for b in fc.b):
        raise BadShape("leg exceeds N - 1")
    d = fc.rank
    if d == 0:
        return (2 if G is GroupType.D else 1) + _zero([_point_value(p) for p in points])
    mat = [[hook_char_eval(G.value, fc.a[i], fc.b[j], N, points) for j in range(d)] for i in range(d)]
    out = det(mat)
    if G is GroupType.D:
        out /= 2 ** (d - 1)
    return out


def ratio_points(N: int, pos: int, x, cfg: EvalConfig, eps=0) -> list:
    """(q^eps, ..., q^{pos-1+eps}, x, q^{pos+1+eps}, ..., q^{N-1+eps})."""
    pts = [q_power(cfg, HalfInt.of(eps) + i) for i in range(N)]
    pts[pos] = x
    return pts


def is_exact(*values) -> bool:
    return all(is_exact_value(v) for v in values)
