"""Numerical engine for the strip double integrals.

All strip formulas share the shape

    prefactor * { int_seg dv/2pi i int_L du/2pi i  x^u K(u, v) G(v)/G(u)
                  - (1/ln q) int_{R+i beta}^{R-i beta} x^v kappa(v) dv/2pi i }

with ``G(v) = prod (1 - q^{a - v}) prod (1 - q^{c + v})``, a kernel ``K`` that
has a simple pole at ``v = u`` (mod the period 2 pi i/ln q) with residue
weight ``kappa(u)``, the vertical segment ``Re v = R`` of one full period,
and the contour L made of the lines ``Im u = -beta`` (left to right) and
``Im u = +beta`` (right to left), ``beta = pi/(2|ln q|)``.  Since ln q < 0
both v-integrals run downward.

The v-integrand is periodic, so the v-quadrature is the trapezoid rule.
Where the pole ``v = u`` comes close to the segment the singular part is
subtracted and integrated in closed form.  The u-lines are integrated with
Gauss-Legendre panels of unit width whose boundaries sit on ``R + Z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergedQuadrature

MAX_HALFWIDTH = 2000.0


@dataclass(frozen=True)
class StripProblem:
    """Everything the engine needs about one strip integral.

    ``kernel(u, v)`` evaluates K on broadcast arrays; ``kappa`` lists the
    residue weight as (coefficient, exponent s) pairs meaning
    sum coefficient * q^{s u}.
    """

    q: float
    log_x: complex
    right: np.ndarray
    left: np.ndarray
    kernel: object
    kappa: tuple
    label: str = ""

    @property
    def lnq(self) -> float:
        return math.log(self.q)

    @property
    def beta(self) -> float:
        return math.pi / (2 * abs(self.lnq))


@dataclass
class StripResult:
    value: complex
    halfwidth: float
    nodes: tuple
    diagnostics: dict = field(default_factory=dict)


def _log_g(p: StripProblem, s: np.ndarray) -> np.ndarray:
    """log G(s) summed over the factor lists (principal logs, any branch is fine for exp)."""
    lnq = p.lnq
    out = np.zeros(s.shape, dtype=complex)
    for a in p.right:
        out += np.log(1 - np.exp((a - s) * lnq))
    for c in p.left:
        out += np.log(1 - np.exp((c + s) * lnq))
    return out


def _kappa(p: StripProblem, s: np.ndarray) -> np.ndarray:
    out = np.zeros(s.shape, dtype=complex)
    for coef, e in p.kappa:
        out += coef * np.exp(e * p.lnq * s)
    return out


def single_integral(p: StripProblem, R: float) -> complex:
    """(1/ln q) int_{R+i beta}^{R-i beta} x^v kappa(v) dv / 2 pi i in closed form."""
    lnq, beta = p.lnq, p.beta
    total = 0j
    for coef, e in p.kappa:
        g = p.log_x + e * lnq
        if abs(g) < 1e-300:
            integral = -2j * beta
        else:
            integral = (np.exp(g * (R - 1j * beta)) - np.exp(g * (R + 1j * beta))) / g
        total += coef * integral
    return total / lnq / (2j * math.pi)


def _inner(p: StripProblem, u: np.ndarray, R: float, v_nodes: int, delta: float) -> np.ndarray:
    """x^u times the v-integral over the segment, for every u node."""
    lnq, beta = p.lnq, p.beta
    period = 4 * beta
    theta = -2 * beta + (np.arange(v_nodes) + 0.5) * (period / v_nodes)
    v = R + 1j * theta
    gv = np.exp(_log_g(p, v))
    log_gu = _log_g(p, u)
    kern = p.kernel(u[:, None], v[None, :])
    body = kern * (gv[None, :] * np.exp(-log_gu)[:, None])
    near = np.abs(u.real - R) < delta
    if near.any():
        kap = _kappa(p, u[near])
        sing = kap[:, None] / (1 - np.exp((v[None, :] - u[near][:, None]) * lnq))
        body[near] -= sing
    # dv/2pi i along the downward segment is -dtheta/2pi
    vals = -(period / v_nodes) / (2 * math.pi) * body.sum(axis=1)
    if near.any():
        # downward over one period, int dv/2pi i of 1/(1 - q^{v-u}) is 1{Re u < R}/ln q
        kap = _kappa(p, u[near])
        vals[near] += kap * (u[near].real < R) / lnq
    return np.exp(p.log_x * u) * vals


def _panels(R: float, U: float, n: int):
    """Gauss-Legendre nodes and weights on [R - U, R + U] in unit panels."""
    x, w = np.polynomial.legendre.leggauss(n)
    k = int(math.ceil(U))
    starts = R + np.arange(-k, k)
    s = (starts[:, None] + 0.5 + 0.5 * x[None, :]).ravel()
    ws = np.tile(0.5 * w, len(starts))
    return s, ws, starts


def _double_integral(p: StripProblem, R, U, v_nodes, n_u, delta):
    beta = p.beta
    s, ws, starts = _panels(R, U, n_u)
    lower = _inner(p, s - 1j * beta, R, v_nodes, delta)
    upper = _inner(p, s + 1j * beta, R, v_nodes, delta)
    contrib = ws * (lower - upper) / (2j * math.pi)
    per_panel = np.abs(contrib.reshape(len(starts), n_u)).sum(axis=1)
    return contrib.sum(), per_panel


def _pick_delta(q: float, v_nodes: int, tol: float) -> float:
    # the trapezoid error for a pole at real distance d is about q^{d * v_nodes}
    need = math.log(tol * 1e-3) / (v_nodes * math.log(q))
    return max(1.0, need)


def strip_bracket(p: StripProblem, *, R: float = 0.0, v_nodes: int = 64, u_nodes_per_unit: int = 16,
                  halfwidth: float | None = None, tol: float = 1e-10, check: bool = True) -> StripResult:
    """Evaluate the braces (double integral minus single integral)."""

    def run(M, n, U):
        d, panels = _double_integral(p, R, U, M, n, _pick_delta(p.q, M, tol))
        return d - single_integral(p, R), panels

    thresh = tol * 1e-3
    if halfwidth is None:
        U = 8.0
        while True:
            val, panels = run(v_nodes, u_nodes_per_unit, U)
            scale = max(abs(val), 1.0)
            if panels[:2].max() < thresh * scale and panels[-2:].max() < thresh * scale:
                break
            if U >= MAX_HALFWIDTH:
                raise NonConvergedQuadrature(f"{p.label}: integrand does not decay by |Re u| = {U}")
            U *= 2
    else:
        U = float(halfwidth)
        val, panels = run(v_nodes, u_nodes_per_unit, U)
        scale = max(abs(val), 1.0)
        if max(panels[0], panels[-1]) >= tol * scale:
            raise NonConvergedQuadrature(f"{p.label}: integrand at |Re u| = {U} exceeds tol")
    nodes = (v_nodes, u_nodes_per_unit)
    diag = {"halfwidth": U}
    if check:
        fine, _ = run(2 * v_nodes, 2 * u_nodes_per_unit, U)
        diff = abs(fine - val)
        diag["doubling_change"] = diff
        if diff > tol * max(abs(fine), 1.0):
            raise NonConvergedQuadrature(f"{p.label}: node doubling changed the value by {diff:.3e}")
        val = fine
        nodes = (2 * v_nodes, 2 * u_nodes_per_unit)
    return StripResult(complex(val), U, nodes, diag)
