"""Variational free-energy and ground-state problems over atomic order parameters.

The finite-temperature functional, for a step overlap CDF x with top support
point q_hat < 1, is

    value(x) = (1/2) [ beta^2 Int_0^1 x(t) xi'(t) dt
                       + Int_0^{q_hat} dt / Int_t^1 x(s) ds
                       + log(1 - q_hat) ]

and the zero-temperature analogue, over nondecreasing step alpha >= 0 and
c > 0, after integrating the middle term by parts, is

    value(alpha, c) = (1/2) [ xi'(1) c + Int_0^1 alpha(t) xi'(t) dt
                              + Int_0^1 dt / (Int_t^1 alpha(s) ds + c) ].

Both are evaluated in closed form (piecewise log/ratio algebra) together
with analytic gradients in the atom positions and levels. Optimality is
certified by first-order conditions of obstacle type: the support of the
order parameter must sit inside the argmax of an explicitly integrable
profile function. Solvers run an unconstrained multistart quasi-Newton pass
in a cumulative-softmax parameterization, canonicalize the resulting atoms,
and polish interior solutions by Newton root-finding on the gradient.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar, root

from ._rng import STREAM_SOLVER, stream
from .errors import (
    BadInputError,
    NotBracketedError,
    RegimeMismatchError,
    SolverFailedError,
)
from .mixtures import Mixture

Q_CAP = 1.0 - 1e-4  # atoms never placed above this; keeps log(1 - q_hat) finite


# ====================================================================== types


@dataclass(frozen=True)
class OrderParameter:
    """Step overlap CDF: x = levels[i] on [q_i, q_{i+1}) with q_0 = 0, and
    x = 1 on [qs[-1], 1]. Empty tuples encode the replica-symmetric point
    (x identically 1, all overlap mass at 0).
    """

    qs: tuple[float, ...] = ()
    levels: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        qs = tuple(float(q) for q in self.qs)
        levels = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "qs", qs)
        object.__setattr__(self, "levels", levels)
        if len(qs) != len(levels):
            raise BadInputError("need one level per atom")
        prev = 0.0
        for q in qs:
            if not prev < q < 1.0:
                raise BadInputError(f"atoms must be strictly increasing in (0,1): {qs}")
            prev = q
        prev = 0.0
        for v in levels:
            if not 0.0 <= v <= 1.0 or v < prev:
                raise BadInputError(f"levels must be nondecreasing in [0,1]: {levels}")
            prev = v
        if levels and levels[-1] >= 1.0:
            raise BadInputError("top level must stay below 1 (the top atom needs mass)")

    @classmethod
    def rs(cls) -> "OrderParameter":
        return cls((), ())

    @property
    def k(self) -> int:
        return len(self.qs)

    @property
    def q_hat(self) -> float:
        return self.qs[-1] if self.qs else 0.0

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.qs, self.levels))

    def measure_atoms(self) -> tuple[tuple[float, float], ...]:
        """(position, mass) pairs of the overlap measure, including 0."""
        lev_ext = (*self.levels, 1.0)
        out = [(0.0, lev_ext[0])]
        for i, q in enumerate(self.qs):
            out.append((q, lev_ext[i + 1] - lev_ext[i]))
        return tuple(out)

    def support(self, mass_tol: float = 1e-12) -> tuple[float, ...]:
        return tuple(p for p, mass in self.measure_atoms() if mass > mass_tol)

    def cdf(self, t):
        """Evaluate x(t); vectorized."""
        t_arr = np.asarray(t, dtype=float)
        lev_ext = np.asarray((*self.levels, 1.0))
        idx = np.searchsorted(np.asarray(self.qs), t_arr, side="right")
        out = lev_ext[idx]
        return float(out) if np.ndim(t) == 0 else out

    def tail_integral(self, t):
        """D(t) = Int_t^1 x(s) ds; piecewise linear, vectorized."""
        qext = np.asarray((0.0, *self.qs, 1.0))
        lev_ext = np.asarray((*self.levels, 1.0))
        d_break = np.zeros(len(qext))
        for j in range(len(qext) - 2, -1, -1):
            d_break[j] = d_break[j + 1] + lev_ext[j] * (qext[j + 1] - qext[j])
        t_arr = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(qext, t_arr, side="right") - 1, 0, len(lev_ext) - 1)
        out = d_break[idx] - lev_ext[idx] * (t_arr - qext[idx])
        return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class ZeroTempOrder:
    """Step function alpha = values[l] on [q_l, q_{l+1}) plus the scalar c.

    steps lists (q_l, a_l) pairs; the first breakpoint must be 0. alpha is
    nondecreasing and nonnegative; unlike the finite-temperature CDF it need
    not reach any particular terminal value.
    """

    steps: tuple[tuple[float, float], ...]
    c: float

    def __post_init__(self) -> None:
        steps = tuple((float(q), float(a)) for q, a in self.steps)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "c", float(self.c))
        if self.c <= 0.0:
            raise BadInputError(f"c must be positive, got {self.c}")
        if not steps or steps[0][0] != 0.0:
            raise BadInputError("steps must start at breakpoint 0")
        prev_q, prev_a = -1.0, 0.0
        for q, a in steps:
            if not (prev_q < q < 1.0):
                raise BadInputError(f"breakpoints must be strictly increasing in [0,1): {steps}")
            if a < prev_a or a < 0.0:
                raise BadInputError(f"step values must be nondecreasing and >= 0: {steps}")
            prev_q, prev_a = q, a

    @classmethod
    def constant(cls, a: float, c: float) -> "ZeroTempOrder":
        return cls(((0.0, a),), c)

    @property
    def k(self) -> int:
        return len(self.steps) - 1

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(q for q, _ in self.steps)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(a for _, a in self.steps)

    def support(self, mass_tol: float = 1e-12) -> tuple[float, ...]:
        """Jump points of alpha (atoms of the associated measure)."""
        out = []
        prev = 0.0
        for q, a in self.steps:
            if a - prev > mass_tol:
                out.append(q)
            prev = a
        return tuple(out)

    def alpha(self, t):
        t_arr = np.asarray(t, dtype=float)
        vals = np.asarray(self.values)
        idx = np.clip(
            np.searchsorted(np.asarray(self.breakpoints), t_arr, side="right") - 1,
            0,
            len(vals) - 1,
        )
        out = vals[idx]
        return float(out) if np.ndim(t) == 0 else out

    def tail_integral(self, t):
        """B(t) = Int_t^1 alpha(s) ds; piecewise linear, vectorized."""
        qext = np.asarray((*self.breakpoints, 1.0))
        vals = np.asarray(self.values)
        b_break = np.zeros(len(qext))
        for j in range(len(qext) - 2, -1, -1):
            b_break[j] = b_break[j + 1] + vals[j] * (qext[j + 1] - qext[j])
        t_arr = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(qext, t_arr, side="right") - 1, 0, len(vals) - 1)
        out = b_break[idx] - vals[idx] * (t_arr - qext[idx])
        return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class OptimalityCertificate:
    """First-order optimality report.

    For finite temperature the profile is phi (an antiderivative of
    beta^2 xi' minus the accumulated inverse-square tail integral); the
    order parameter is optimal iff its support lies in argmax phi. For zero
    temperature the profile is -psi, the conditions being psi >= 0 with
    equality on the support, plus the endpoint identity Psi(1) = 0 whose
    absolute value is reported as edge_residual.
    """

    sup_phi: float
    residuals_at_support: tuple[float, ...]
    max_offsupport_violation: float
    tolerance: float
    support: tuple[float, ...]
    kind: str  # "finite_beta" or "zero_temp"
    edge_residual: float | None = None
    strictly_1rsb: bool | None = None

    @property
    def passes(self) -> bool:
        if any(r > self.tolerance for r in self.residuals_at_support):
            return False
        if self.max_offsupport_violation > self.tolerance:
            return False
        if self.edge_residual is not None and self.edge_residual > self.tolerance:
            return False
        return True


@dataclass(frozen=True)
class SolverConfig:
    k_max: int = 3
    starts: int = 8
    atom_tol: float = 1e-7
    cert_tol: float = 1e-6
    seed: int = 42
    mesh: int = 2000

    @classmethod
    def from_json(cls, text: str) -> "SolverConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise BadInputError(f"solver config parse error: {e}") from e
        known = {f: obj[f] for f in ("k_max", "starts", "atom_tol", "cert_tol", "seed", "mesh") if f in obj}
        return cls(**known)

    def to_json(self) -> str:
        return json.dumps(
            {
                "k_max": self.k_max,
                "starts": self.starts,
                "atom_tol": self.atom_tol,
                "cert_tol": self.cert_tol,
                "seed": self.seed,
                "mesh": self.mesh,
            },
            sort_keys=True,
        )


class CsResult(NamedTuple):
    x_star: OrderParameter
    value: float
    certificate: OptimalityCertificate


class ZtResult(NamedTuple):
    order: ZeroTempOrder
    gs_energy: float
    certificate: OptimalityCertificate


# ============================================================ value closed forms


def _seg_inverse_integral(a: float, ep: float, d: float):
    """Int over one segment of 1/L(t) for linear L with right value ep > 0,
    slope -a <= 0 and width d >= 0, plus partials in (a, ep, d).

    The value is log1p(a d / ep) / a, continued smoothly through a = 0.
    """
    el = ep + a * d
    u = a * d / ep
    if u < 1e-5:
        # series of log1p(u)/u and its a-derivative; exact forms cancel badly here
        val = (d / ep) * (1.0 - u / 2.0 + u * u / 3.0 - u**3 / 4.0 + u**4 / 5.0)
        dval_da = (d * d / (ep * ep)) * (-0.5 + 2.0 * u / 3.0 - 0.75 * u * u + 0.8 * u**3)
    else:
        val = math.log1p(u) / a
        dval_da = (d / el - val) / a
    return val, dval_da, -d / (el * ep), 1.0 / el


def _cs_value_grad(m: Mixture, beta: float, qs: Sequence[float], xs: Sequence[float]):
    """Closed-form functional value with gradient in (q_1..q_k, x_0..x_{k-1})."""
    k = len(qs)
    qext = (0.0, *qs, 1.0)
    lev = (*xs, 1.0)
    xi = [m.eval(t) for t in qext]
    xip = [m.eval(t, 1) for t in qext]

    a_term = sum(lev[l] * (xi[l + 1] - xi[l]) for l in range(k + 1))
    ga_q = [(lev[i - 1] - lev[i]) * xip[i] for i in range(1, k + 1)]
    ga_x = [xi[l + 1] - xi[l] for l in range(k)]

    d_break = [0.0] * (k + 1)
    d_break[k] = 1.0 - qext[k]
    for j in range(k - 1, -1, -1):
        d_break[j] = d_break[j + 1] + xs[j] * (qext[j + 1] - qext[j])

    b_term = 0.0
    gb_q = [0.0] * k
    gb_x = [0.0] * k
    for l in range(k):
        d = qext[l + 1] - qext[l]
        val, dval_da, dval_dep, dval_dd = _seg_inverse_integral(xs[l], d_break[l + 1], d)
        b_term += val
        gb_x[l] += dval_da
        for mi in range(l + 1, k):
            gb_x[mi] += dval_dep * (qext[mi + 1] - qext[mi])
        for i in range(1, k + 1):
            dd = (xs[i - 1] if l + 1 <= i - 1 else 0.0) - (lev[i] if l + 1 <= i else 0.0)
            if dd:
                gb_q[i - 1] += dval_dep * dd
        gb_q[l] += dval_dd
        if l >= 1:
            gb_q[l - 1] -= dval_dd

    c_term = math.log1p(-qext[k]) if k else 0.0
    value = 0.5 * (beta * beta * a_term + b_term + c_term)
    grad_q = np.array([0.5 * (beta * beta * ga_q[i] + gb_q[i]) for i in range(k)])
    if k:
        grad_q[k - 1] -= 0.5 / (1.0 - qext[k])
    grad_x = np.array([0.5 * (beta * beta * ga_x[l] + gb_x[l]) for l in range(k)])
    return value, grad_q, grad_x


def _check_field(m: Mixture, allow_field: bool) -> None:
    if m.has_linear and not allow_field:
        raise RegimeMismatchError(
            "mixture has a degree-1 component; pass allow_field=True to use the "
            "folded-covariance expression (experimental)"
        )


def cs_value(m: Mixture, beta: float, x: OrderParameter, allow_field: bool = False) -> float:
    """Finite-temperature functional value at a step order parameter."""
    if beta <= 0.0:
        raise BadInputError(f"beta must be positive, got {beta}")
    _check_field(m, allow_field)
    value, _, _ = _cs_value_grad(m, beta, x.qs, x.levels)
    return value


def cs_value_with_grad(m: Mixture, beta: float, x: OrderParameter, allow_field: bool = False):
    """Value plus gradient arrays (d/dq_i, d/dx_l); for optimizer and tests."""
    if beta <= 0.0:
        raise BadInputError(f"beta must be positive, got {beta}")
    _check_field(m, allow_field)
    return _cs_value_grad(m, beta, x.qs, x.levels)


def _zt_value_grad(m: Mixture, qs: Sequence[float], avals: Sequence[float], c: float):
    """Zero-temperature value with gradient in (q_1..q_k, a_0..a_k, c)."""
    k = len(qs)
    qext = (0.0, *qs, 1.0)
    xi = [m.eval(t) for t in qext]
    xip = [m.eval(t, 1) for t in qext]

    a_term = sum(avals[l] * (xi[l + 1] - xi[l]) for l in range(k + 1))
    ga_q = [(avals[i - 1] - avals[i]) * xip[i] for i in range(1, k + 1)]
    ga_a = [xi[l + 1] - xi[l] for l in range(k + 1)]

    e_break = [0.0] * (k + 2)
    e_break[k + 1] = c
    for j in range(k, -1, -1):
        e_break[j] = e_break[j + 1] + avals[j] * (qext[j + 1] - qext[j])

    t_term = 0.0
    gt_q = [0.0] * k
    gt_a = [0.0] * (k + 1)
    gt_c = 0.0
    for l in range(k + 1):
        d = qext[l + 1] - qext[l]
        val, dval_da, dval_dep, dval_dd = _seg_inverse_integral(avals[l], e_break[l + 1], d)
        t_term += val
        gt_a[l] += dval_da
        for mi in range(l + 1, k + 1):
            gt_a[mi] += dval_dep * (qext[mi + 1] - qext[mi])
        gt_c += dval_dep
        for i in range(1, k + 1):
            dd = (avals[i - 1] if l + 1 <= i - 1 else 0.0) - (avals[i] if l + 1 <= i else 0.0)
            if dd:
                gt_q[i - 1] += dval_dep * dd
        if l + 1 <= k:
            gt_q[l] += dval_dd
        if l >= 1:
            gt_q[l - 1] -= dval_dd

    xi1p = m.eval(1.0, 1)
    value = 0.5 * (xi1p * c + a_term + t_term)
    grad_q = np.array([0.5 * (ga_q[i] + gt_q[i]) for i in range(k)])
    grad_a = np.array([0.5 * (ga_a[l] + gt_a[l]) for l in range(k + 1)])
    grad_c = 0.5 * (xi1p + gt_c)
    return value, grad_q, grad_a, grad_c


def zt_value(m: Mixture, order: ZeroTempOrder, allow_field: bool = False) -> float:
    """Zero-temperature functional value at a step order parameter."""
    _check_field(m, allow_field)
    value, _, _, _ = _zt_value_grad(m, order.breakpoints[1:], order.values, order.c)
    return value


def zt_value_with_grad(m: Mixture, order: ZeroTempOrder, allow_field: bool = False):
    _check_field(m, allow_field)
    return _zt_value_grad(m, order.breakpoints[1:], order.values, order.c)


def rs_value(m: Mixture, beta: float) -> float:
    """Value at the replica-symmetric point: beta^2 (xi(1) - xi(0)) / 2."""
    return 0.5 * beta * beta * (m.eval(1.0) - m.eval(0.0))


# ======================================================== certificate profiles


class _InverseSquareProfile:
    """Running integrals of 1/P(s)^2 for a piecewise-linear decreasing P.

    P(t) = tail + Int_t^1 lev(s) ds with lev constant on each segment.
    Provides G(t) = Int_0^t ds/P(s)^2 and H(t) = Int_0^t G, both exact per
    segment; with tail = 0 they diverge at t -> 1 and must only be queried
    strictly inside [0, 1).
    """

    def __init__(self, qext: Sequence[float], levels: Sequence[float], tail: float):
        self.qext = np.asarray(qext, dtype=float)
        self.levels = np.asarray(levels, dtype=float)
        n = len(levels)
        p = np.zeros(n + 1)
        p[n] = tail
        for j in range(n - 1, -1, -1):
            p[j] = p[j + 1] + levels[j] * (qext[j + 1] - qext[j])
        self.p_break = p
        g = np.zeros(n + 1)
        h = np.zeros(n + 1)
        for j in range(n):
            d = qext[j + 1] - qext[j]
            if p[j + 1] <= 0.0:
                g[j + 1] = np.inf
                h[j + 1] = np.inf
            else:
                g[j + 1] = g[j] + d / (p[j] * p[j + 1])
                h[j + 1] = h[j] + g[j] * d + self._inner(levels[j], p[j], d)
        self.g_break = g
        self.h_break = h

    @staticmethod
    def _inner(lev, p_left, sigma):
        """Int_0^sigma tau / (P_left (P_left - lev tau)) dtau, vectorized."""
        lev = np.asarray(lev, dtype=float)
        p_left = np.asarray(p_left, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        u = lev * sigma / p_left
        small = u < 1e-4
        u_s = np.where(small, u, 0.0)
        series = (sigma * sigma / (2.0 * p_left * p_left)) * (
            1.0 + 2.0 * u_s / 3.0 + 0.5 * u_s * u_s + 0.4 * u_s**3
        )
        lev_safe = np.where(small, 1.0, lev)
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = (1.0 / lev_safe**2) * np.log(p_left / (p_left - lev_safe * sigma)) - sigma / (
                lev_safe * p_left
            )
        return np.where(small, series, exact)

    def _locate(self, t):
        idx = np.searchsorted(self.qext, t, side="right") - 1
        return np.clip(idx, 0, len(self.levels) - 1)

    def p(self, t):
        t = np.asarray(t, dtype=float)
        j = self._locate(t)
        return self.p_break[j] - self.levels[j] * (t - self.qext[j])

    def g(self, t):
        t = np.asarray(t, dtype=float)
        j = self._locate(t)
        pt = self.p_break[j] - self.levels[j] * (t - self.qext[j])
        return self.g_break[j] + (t - self.qext[j]) / (pt * self.p_break[j])

    def h(self, t):
        t = np.asarray(t, dtype=float)
        j = self._locate(t)
        sigma = t - self.qext[j]
        return self.h_break[j] + self.g_break[j] * sigma + self._inner(
            self.levels[j], self.p_break[j], sigma
        )


def _phi_function(m: Mixture, beta: float, x: OrderParameter):
    prof = _InverseSquareProfile(
        (0.0, *x.qs, 1.0), (*x.levels, 1.0), 0.0
    )
    xi0 = m.eval(0.0)

    def phi(t):
        return beta * beta * (m.eval(t) - xi0) - prof.h(t)

    return phi


def _psi_function(m: Mixture, order: ZeroTempOrder):
    prof = _InverseSquareProfile(
        (*order.breakpoints, 1.0), order.values, order.c
    )
    xi1 = m.eval(1.0)
    h1 = float(prof.h(np.asarray(1.0)))

    def psi(s):
        return (xi1 - m.eval(s)) - (h1 - prof.h(s))

    edge = m.eval(1.0, 1) - float(prof.g(np.asarray(1.0)))
    return psi, edge


def _refined_max(fun, grid_ts, grid_vals):
    """Max over grid plus a bounded local polish around the grid argmax."""
    i = int(np.argmax(grid_vals))
    best_t, best_v = float(grid_ts[i]), float(grid_vals[i])
    lo = float(grid_ts[max(i - 1, 0)])
    hi = float(grid_ts[min(i + 1, len(grid_ts) - 1)])
    if hi > lo:
        res = minimize_scalar(
            lambda t: -float(fun(np.asarray(t))),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if -res.fun > best_v:
            best_t, best_v = float(res.x), float(-res.fun)
    return best_t, best_v


def _certificate_mesh(mesh: int, anchor_pts: Sequence[float], top: float) -> np.ndarray:
    if mesh < 100:
        raise BadInputError(f"certificate mesh must be >= 100, got {mesh}")
    ts = [np.linspace(0.0, top, mesh)]
    offs = np.geomspace(1e-9, 1e-2, 25)
    for q in anchor_pts:
        ts.append(np.clip(q + offs, 0.0, top))
        ts.append(np.clip(q - offs, 0.0, top))
        ts.append(np.asarray([q]))
    # log-dense points near 0 catch maxima that hug the origin
    ts.append(np.geomspace(1e-12, top, 200))
    out = np.unique(np.concatenate(ts))
    return out


def talagrand_certificate(
    m: Mixture,
    beta: float,
    x: OrderParameter,
    mesh: int = 2000,
    tolerance: float = 1e-6,
    allow_field: bool = False,
) -> OptimalityCertificate:
    """First-order optimality check at finite temperature.

    Computes the profile phi exactly on a refined mesh, takes its sup, and
    reports sup - phi(q) at every atom of the overlap measure. The order
    parameter is optimal iff all residuals vanish (support inside argmax).
    """
    if beta <= 0.0:
        raise BadInputError(f"beta must be positive, got {beta}")
    _check_field(m, allow_field)
    phi = _phi_function(m, beta, x)
    support = x.support()
    ts = _certificate_mesh(mesh, support, 1.0 - 1e-9)
    vals = phi(ts)
    _, sup_phi = _refined_max(phi, ts, vals)
    sup_phi = max(sup_phi, 0.0 if not support else -np.inf)
    sup_phi = max(sup_phi, float(np.max(vals)))
    phi_supp = [float(phi(np.asarray(q))) for q in support]
    residuals = tuple(sup_phi - v for v in phi_supp)
    violation = sup_phi - max(phi_supp) if phi_supp else sup_phi
    return OptimalityCertificate(
        sup_phi=sup_phi,
        residuals_at_support=residuals,
        max_offsupport_violation=violation,
        tolerance=tolerance,
        support=support,
        kind="finite_beta",
    )


def zero_temp_certificate(
    m: Mixture,
    order: ZeroTempOrder,
    mesh: int = 2000,
    tolerance: float = 1e-6,
    allow_field: bool = False,
) -> OptimalityCertificate:
    """First-order optimality check at zero temperature.

    Conditions: psi >= 0 on [0,1] with psi = 0 on the jump set of alpha, and
    the endpoint identity Psi(1) = 0. Reported through the shared certificate
    type with phi := -psi, so sup_phi = -min psi.
    """
    if mesh < 100:
        raise BadInputError(f"certificate mesh must be >= 100, got {mesh}")
    _check_field(m, allow_field)
    psi, edge = _psi_function(m, order)
    support = order.support()
    ts = _certificate_mesh(mesh, support, 1.0)
    vals = -psi(ts)
    _, sup_phi = _refined_max(lambda t: -psi(t), ts, vals)
    sup_phi = max(sup_phi, float(np.max(vals)))
    psi_supp = [float(psi(np.asarray(q))) for q in support]
    residuals = tuple(abs(v) for v in psi_supp)
    violation = max(0.0, sup_phi)
    # strict two-level structure: psi vanishes only near the endpoints
    scale = max(1.0, m.eval(1.0, 1))
    zero_tol = max(10.0 * tolerance, 1e-8) * scale
    zero_set = ts[psi(ts) <= zero_tol]
    interior = zero_set[(zero_set > 0.02) & (zero_set < 0.98)]
    flag = bool(len(interior) == 0)
    cert = OptimalityCertificate(
        sup_phi=sup_phi,
        residuals_at_support=residuals,
        max_offsupport_violation=violation,
        tolerance=tolerance,
        support=support,
        kind="zero_temp",
        edge_residual=abs(edge),
        strictly_1rsb=None,
    )
    object.__setattr__(cert, "strictly_1rsb", flag and cert.passes)
    return cert


# ============================================================== solver internals


def _cum_softmax(raw: np.ndarray):
    z = raw - raw.max()
    e = np.exp(z)
    p = e / e.sum()
    partial = np.cumsum(p)[:-1]
    return p, partial


def _cum_softmax_vjp(p: np.ndarray, partial: np.ndarray, g: np.ndarray) -> np.ndarray:
    # d partial_i / d raw_j = p_j (1{j <= i} - partial_i)
    if len(g) == 0:
        return np.zeros_like(p)
    suffix = np.concatenate([np.cumsum(g[::-1])[::-1], [0.0]])
    return p * (suffix - float(g @ partial))


def _cs_raw_objective(raw: np.ndarray, m: Mixture, beta: float, k: int):
    w, v = raw[: k + 1], raw[k + 1 :]
    pq, sq = _cum_softmax(w)
    px, sx = _cum_softmax(v)
    qs = Q_CAP * sq
    value, gq, gx = _cs_value_grad(m, beta, tuple(qs), tuple(sx))
    grad = np.concatenate(
        [Q_CAP * _cum_softmax_vjp(pq, sq, gq), _cum_softmax_vjp(px, sx, gx)]
    )
    return value, grad


def _raw_from_atoms(qs, xs, k):
    """Raw coordinates whose cumulative softmax reproduces (qs, xs)."""
    gq = np.diff(np.concatenate([[0.0], np.asarray(qs) / Q_CAP, [1.0]]))
    gx = np.diff(np.concatenate([[0.0], np.asarray(xs), [1.0]]))
    gq = np.clip(gq, 1e-10, None)
    gx = np.clip(gx, 1e-10, None)
    return np.concatenate([np.log(gq), np.log(gx)])


def _minimize_raw(objective, raw0, args):
    return minimize(
        objective,
        raw0,
        args=args,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 1000, "ftol": 1e-16, "gtol": 1e-12},
    )


def _canonical_atoms(qs, xs, merge_tol: float = 1e-7, mass_tol: float = 1e-6):
    """Merge coincident atoms, drop massless ones, snap boundary levels."""
    qs = list(map(float, qs))
    xs = list(map(float, xs))
    changed = True
    while changed and qs:
        changed = False
        # atom hugging 0: its mass moves to the origin
        if qs[0] < merge_tol:
            qs.pop(0)
            xs.pop(0)
            changed = True
            continue
        # coincident atoms: drop the middle level, pool the mass
        for j in range(len(qs) - 1):
            if qs[j + 1] - qs[j] < merge_tol:
                lev_ext = xs + [1.0]
                m_left = lev_ext[j + 1] - lev_ext[j]
                m_right = lev_ext[j + 2] - lev_ext[j + 1]
                pos = (
                    (qs[j] * m_left + qs[j + 1] * m_right) / (m_left + m_right)
                    if m_left + m_right > 0
                    else 0.5 * (qs[j] + qs[j + 1])
                )
                qs[j] = pos
                qs.pop(j + 1)
                xs.pop(j + 1)
                changed = True
                break
        if changed:
            continue
        # massless atoms: remove the breakpoint, width-average the level
        lev_ext = xs + [1.0]
        for j in range(len(qs)):
            jump = lev_ext[j + 1] - lev_ext[j]
            if jump < mass_tol:
                left_w = qs[j] - (qs[j - 1] if j >= 1 else 0.0)
                right_edge = qs[j + 1] if j + 1 < len(qs) else 1.0
                right_w = right_edge - qs[j]
                merged = (lev_ext[j] * left_w + lev_ext[j + 1] * right_w) / (left_w + right_w)
                if j + 1 == len(lev_ext) - 1:
                    # top atom lost its mass: previous breakpoint becomes the cap
                    qs.pop(j)
                    xs.pop(j)
                else:
                    qs.pop(j)
                    xs.pop(j + 1)
                    xs[j] = merged
                changed = True
                break
        if changed:
            continue
        if xs and 0.0 < xs[0] < mass_tol:
            xs[0] = 0.0
            changed = True
    if not qs:
        return (), ()
    return tuple(qs), tuple(xs)


def _feasible_atoms(qs, xs) -> bool:
    prev = 0.0
    for q in qs:
        if not prev + 1e-12 < q < Q_CAP + 1e-12:
            return False
        prev = q
    prev = 0.0
    for x in xs:
        if x < prev - 1e-14 or x < 0.0:
            return False
        prev = x
    return not xs or xs[-1] < 1.0


def _polish_cs(m: Mixture, beta: float, qs, xs, value: float):
    """Newton polish of the stationarity system over free coordinates.

    Levels pinned at 0 stay pinned. Keeps the result only if it remains
    feasible, stays close, and does not increase the value.
    """
    k = len(qs)
    if k == 0:
        return qs, xs, value
    pin0 = xs[0] == 0.0
    free_x = list(range(1 if pin0 else 0, k))

    def assemble(vec):
        q_new = tuple(vec[:k])
        x_new = list(xs)
        for idx, pos in enumerate(free_x):
            x_new[pos] = vec[k + idx]
        return q_new, tuple(x_new)

    def fun(vec):
        q_new, x_new = assemble(vec)
        if not _feasible_atoms(q_new, x_new):
            return np.full(len(vec), 1e6)
        _, gq, gx = _cs_value_grad(m, beta, q_new, x_new)
        return np.concatenate([gq, gx[free_x]]) if free_x else gq

    v0 = np.concatenate([np.asarray(qs), np.asarray(xs)[free_x]])
    sol = root(fun, v0, method="hybr", tol=1e-13)
    if not sol.success:
        return qs, xs, value
    q_new, x_new = assemble(sol.x)
    if not _feasible_atoms(q_new, x_new):
        return qs, xs, value
    if np.max(np.abs(sol.x - v0)) > 1e-2:
        return qs, xs, value
    new_value, _, _ = _cs_value_grad(m, beta, q_new, x_new)
    if new_value > value + 1e-10:
        return qs, xs, value
    return q_new, x_new, new_value


def _solve_cs_level(m: Mixture, beta: float, k: int, cfg: SolverConfig, warm):
    """Best k-atom candidate from multistart plus warm starts."""
    if k == 0:
        return (), (), rs_value(m, beta)
    raws = []
    for s in range(cfg.starts):
        rng = stream(cfg.seed, STREAM_SOLVER, (k << 10) | s)
        raws.append(rng.normal(0.0, 1.5, 2 * (k + 1)))
    if warm is not None:
        wq, wx = warm
        if len(wq) == k - 1 and k >= 2:
            # split the widest gap; duplicate the adjacent level with a nudge
            gaps = np.diff(np.concatenate([[0.0], wq, [Q_CAP]]))
            j = int(np.argmax(gaps))
            q_new = np.insert(wq, j, (([0.0] + list(wq))[j] + ([*wq, Q_CAP])[j]) / 2.0)
            lev_ext = list(wx) + [1.0]
            x_new = np.insert(wx, j, max(lev_ext[j] - 0.05, lev_ext[j] * 0.5) if j < len(wx) else wx[-1])
            x_new = np.maximum.accumulate(np.clip(x_new, 1e-6, 1.0 - 1e-6))
            raws.append(_raw_from_atoms(q_new, x_new, k))
        elif len(wq) == k:
            raws.append(_raw_from_atoms(np.asarray(wq), np.clip(wx, 1e-8, None), k))
    if k == 1:
        raws.append(_raw_from_atoms([0.5 * Q_CAP], [0.5], 1))
    best = None
    for raw0 in raws:
        res = _minimize_raw(_cs_raw_objective, raw0, (m, beta, k))
        _, sq = _cum_softmax(res.x[: k + 1])
        _, sx = _cum_softmax(res.x[k + 1 :])
        qs, xs = tuple(Q_CAP * sq), tuple(sx)
        value = float(res.fun)
        key = (round(value, 12), qs, xs)
        if best is None or key < best[0]:
            best = (key, qs, xs, value)
    _, qs, xs, value = best
    return qs, xs, value


def cs_minimize(
    m: Mixture,
    beta: float,
    k_max: int | None = None,
    config: SolverConfig | None = None,
    allow_field: bool = False,
) -> CsResult:
    """Minimize the finite-temperature functional over atomic order parameters.

    Refines the atom count k = 0, 1, ... until the optimality certificate
    passes and a further level brings less than atom_tol improvement.
    Raises SolverFailedError when no k up to the cap certifies.
    """
    if beta <= 0.0:
        raise BadInputError(f"beta must be positive, got {beta}")
    _check_field(m, allow_field)
    cfg = config or SolverConfig()
    if k_max is None:
        k_max = cfg.k_max
    history = []
    warm = None
    for k in range(k_max + 1):
        qs, xs, value = _solve_cs_level(m, beta, k, cfg, warm)
        mass_tol = max(cfg.atom_tol * 10, 1e-6)
        # cleanup and polish interleave until the structure is stable
        for _ in range(3):
            qs_c, xs_c = _canonical_atoms(qs, xs, mass_tol=mass_tol)
            value_c = _cs_value_grad(m, beta, qs_c, xs_c)[0]
            qs_c, xs_c, value_c = _polish_cs(m, beta, qs_c, xs_c, value_c)
            stable = qs_c == qs and xs_c == xs
            qs, xs, value = qs_c, xs_c, value_c
            if stable:
                break
        x_cand = OrderParameter(qs, xs)
        cert = talagrand_certificate(
            m, beta, x_cand, mesh=cfg.mesh, tolerance=cfg.cert_tol, allow_field=allow_field
        )
        history.append(CsResult(x_cand, float(value), cert))
        warm = (np.asarray(qs), np.asarray(xs))
        if cert.passes and len(history) >= 2 and history[-2].value - value < cfg.atom_tol:
            break
    passing = [h for h in history if h.certificate.passes]
    if passing:
        best_val = min(h.value for h in passing)
        near = [h for h in passing if h.value <= best_val + cfg.atom_tol]
        return min(near, key=lambda h: (h.x_star.k, h.value))
    best = min(history, key=lambda h: h.value)
    raise SolverFailedError(
        "no atom count up to k_max={} produced a passing certificate; best value "
        "{:.9g} with residuals {}".format(k_max, best.value, best.certificate.residuals_at_support)
    )


# -------------------------------------------------------- zero temperature


def _bounded_exp(z):
    # keeps rogue line-search steps from overflowing
    return np.exp(np.clip(z, -60.0, 60.0))


def _zt_raw_objective(raw: np.ndarray, m: Mixture, k: int):
    if k == 0:
        a0, c = float(_bounded_exp(raw[0])), float(_bounded_exp(raw[1]))
        value, _, ga, gc = _zt_value_grad(m, (), (a0,), c)
        return value, np.array([ga[0] * a0, gc * c])
    w = raw[: k + 1]
    s = raw[k + 1 : 2 * k + 2]
    c = float(_bounded_exp(raw[-1]))
    pq, sq = _cum_softmax(w)
    qs = Q_CAP * sq
    incr = _bounded_exp(s)
    avals = np.cumsum(incr)
    value, gq, ga, gc = _zt_value_grad(m, tuple(qs), tuple(avals), c)
    grad_w = Q_CAP * _cum_softmax_vjp(pq, sq, gq)
    grad_s = incr * np.cumsum(ga[::-1])[::-1]
    return value, np.concatenate([grad_w, grad_s, [gc * c]])


def _canonical_zt(qs, avals, c, merge_tol: float = 1e-7, jump_tol: float = 1e-6):
    qs = list(map(float, qs))
    avals = list(map(float, avals))
    changed = True
    while changed:
        changed = False
        for j in range(len(qs)):
            if (qs[j] - (qs[j - 1] if j >= 1 else 0.0)) < merge_tol:
                qs.pop(j)
                avals.pop(j)
                changed = True
                break
        if changed:
            continue
        for j in range(len(qs)):
            if avals[j + 1] - avals[j] < jump_tol:
                left_edge = qs[j - 1] if j >= 1 else 0.0
                left_w = qs[j] - left_edge
                right_edge = qs[j + 1] if j + 1 < len(qs) else 1.0
                right_w = right_edge - qs[j]
                merged = (avals[j] * left_w + avals[j + 1] * right_w) / (left_w + right_w)
                qs.pop(j)
                avals.pop(j + 1)
                avals[j] = merged
                changed = True
                break
    if avals and 0.0 < avals[0] < jump_tol:
        avals[0] = 0.0
    return tuple(qs), tuple(avals), c


def _polish_zt(m: Mixture, qs, avals, c, value):
    k = len(qs)
    pin0 = avals[0] == 0.0
    free_a = list(range(1 if pin0 else 0, k + 1))

    def assemble(vec):
        q_new = tuple(vec[:k])
        a_new = list(avals)
        for idx, pos in enumerate(free_a):
            a_new[pos] = vec[k + idx]
        return q_new, tuple(a_new), float(vec[-1])

    def feasible(q_new, a_new, c_new):
        prev = 0.0
        for q in q_new:
            if not prev + 1e-12 < q < 1.0:
                return False
            prev = q
        prev = 0.0
        for a in a_new:
            if a < prev - 1e-14 or a < 0.0:
                return False
            prev = a
        return c_new > 0.0

    def fun(vec):
        q_new, a_new, c_new = assemble(vec)
        if not feasible(q_new, a_new, c_new):
            return np.full(len(vec), 1e6)
        _, gq, ga, gc = _zt_value_grad(m, q_new, a_new, c_new)
        return np.concatenate([gq, ga[free_a], [gc]])

    v0 = np.concatenate([np.asarray(qs), np.asarray(avals)[free_a], [c]])
    sol = root(fun, v0, method="hybr", tol=1e-13)
    if not sol.success:
        return qs, avals, c, value
    q_new, a_new, c_new = assemble(sol.x)
    if not feasible(q_new, a_new, c_new) or np.max(np.abs(sol.x - v0)) > 1e-2:
        return qs, avals, c, value
    new_value, _, _, _ = _zt_value_grad(m, q_new, a_new, c_new)
    if new_value > value + 1e-10:
        return qs, avals, c, value
    return q_new, a_new, c_new, new_value


def zt_minimize(
    m: Mixture,
    k_max: int = 2,
    config: SolverConfig | None = None,
    allow_field: bool = False,
) -> ZtResult:
    """Minimize the zero-temperature functional over step order parameters.

    Returns the order parameter, the limiting normalized maximum of the
    field (the ground-state energy density), and the optimality certificate
    with the strict two-level flag filled in.
    """
    _check_field(m, allow_field)
    cfg = config or SolverConfig()
    history = []
    warm = None
    for k in range(k_max + 1):
        raws = []
        for s in range(cfg.starts):
            rng = stream(cfg.seed, STREAM_SOLVER, (1 << 20) | (k << 10) | s)
            dim = 2 if k == 0 else 2 * k + 3
            raws.append(rng.normal(0.0, 1.0, dim))
        if warm is not None and k >= 1:
            wq, wa, wc = warm
            if len(wq) == k - 1:
                gaps = np.diff(np.concatenate([[0.0], wq, [1.0]]))
                j = int(np.argmax(gaps))
                q_new = np.insert(wq, j, ([0.0, *wq][j] + [*wq, 1.0][j]) / 2.0)
                a_new = np.insert(wa, j, wa[j])
                a_new[j] = max(a_new[j] * 0.9, a_new[j] - 0.05)
                incr = np.clip(np.diff(np.concatenate([[0.0], a_new])), 1e-8, None)
                gq = np.clip(np.diff(np.concatenate([[0.0], q_new / Q_CAP, [1.0]])), 1e-10, None)
                raws.append(np.concatenate([np.log(gq), np.log(incr), [math.log(max(wc, 1e-8))]]))
        best = None
        for raw0 in raws:
            res = _minimize_raw(_zt_raw_objective, raw0, (m, k))
            if k == 0:
                qs, avals = (), (float(_bounded_exp(res.x[0])),)
                c = float(_bounded_exp(res.x[1]))
            else:
                _, sq = _cum_softmax(res.x[: k + 1])
                qs = tuple(Q_CAP * sq)
                avals = tuple(np.cumsum(_bounded_exp(res.x[k + 1 : 2 * k + 2])))
                c = float(_bounded_exp(res.x[-1]))
            value = float(res.fun)
            key = (round(value, 12), qs, avals, c)
            if best is None or key < best[0]:
                best = (key, qs, avals, c, value)
        _, qs, avals, c, value = best
        for _ in range(3):
            qs_c, avals_c, c_c = _canonical_zt(qs, avals, c)
            value_c = _zt_value_grad(m, qs_c, avals_c, c_c)[0]
            qs_c, avals_c, c_c, value_c = _polish_zt(m, qs_c, avals_c, c_c, value_c)
            stable = qs_c == qs and avals_c == avals and c_c == c
            qs, avals, c, value = qs_c, avals_c, c_c, value_c
            if stable:
                break
        order = ZeroTempOrder(tuple(zip((0.0, *qs), avals)), c)
        cert = zero_temp_certificate(m, order, mesh=cfg.mesh, tolerance=cfg.cert_tol, allow_field=allow_field)
        history.append(ZtResult(order, float(value), cert))
        warm = (np.asarray(qs), np.asarray(avals), c)
        if cert.passes and len(history) >= 2 and history[-2].gs_energy - value < cfg.atom_tol:
            break
    passing = [h for h in history if h.certificate.passes]
    if passing:
        best_val = min(h.gs_energy for h in passing)
        near = [h for h in passing if h.gs_energy <= best_val + cfg.atom_tol]
        return min(near, key=lambda h: (h.order.k, h.gs_energy))
    best = min(history, key=lambda h: h.gs_energy)
    raise SolverFailedError(
        "zero-temperature solver found no passing certificate up to k_max={}; "
        "best value {:.9g}".format(k_max, best.gs_energy)
    )


# ================================================================ criticality


def _rs_profile_sup(m: Mixture, beta: float) -> float:
    """sup over [0,1) of beta^2 (xi(s) - xi(0)) + s + log(1 - s)."""
    xi0 = m.eval(0.0)

    def f(s):
        s = np.asarray(s, dtype=float)
        return beta * beta * (m.eval(s) - xi0) + s + np.log1p(-s)

    ts = np.unique(
        np.concatenate(
            [np.geomspace(1e-12, 0.5, 1500), np.linspace(0.5, 1.0 - 1e-12, 1500)]
        )
    )
    vals = f(ts)
    _, sup = _refined_max(f, ts, vals)
    return max(sup, float(np.max(vals)))


def beta_c(m: Mixture, tol: float = 1e-8, beta_max: float = 64.0) -> float:
    """Critical inverse temperature: largest beta at which the minimum is
    attained at the replica-symmetric point, located by bisection on the
    replica-symmetric optimality test.
    """
    if m.has_linear:
        raise NotBracketedError(
            "a degree-1 component destabilizes the replica-symmetric point at "
            "every positive beta; no critical temperature exists"
        )
    lo = 1e-9
    if _rs_profile_sup(m, lo) > 0.0:
        raise NotBracketedError("replica-symmetric point already unstable at beta ~ 0")
    if _rs_profile_sup(m, beta_max) <= 0.0:
        raise NotBracketedError(f"no symmetry breaking detected up to beta_max={beta_max}")
    hi = beta_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _rs_profile_sup(m, mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ============================================================= pushforward law


def _step_l1(breaks_a, vals_a, breaks_b, vals_b) -> float:
    """Exact L1 distance on [0,1] of two step functions given as
    (interior breakpoints, per-segment values with len = breaks + 1)."""
    cuts = np.unique(np.concatenate([[0.0, 1.0], breaks_a, breaks_b]))
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        va = vals_a[np.searchsorted(breaks_a, mid, side="right")]
        vb = vals_b[np.searchsorted(breaks_b, mid, side="right")]
        total += abs(va - vb) * (hi - lo)
    return float(total)


def _atom_match_dev(atoms_a, atoms_b):
    """Hausdorff-style position deviation and matched mass deviation."""
    if not atoms_a and not atoms_b:
        return 0.0, 0.0
    if not atoms_a or not atoms_b:
        return 1.0, 1.0
    pos_dev = 0.0
    mass_dev = 0.0
    for src, dst in ((atoms_a, atoms_b), (atoms_b, atoms_a)):
        for p, mass in src:
            j = int(np.argmin([abs(p - p2) for p2, _ in dst]))
            pos_dev = max(pos_dev, abs(p - dst[j][0]))
            mass_dev = max(mass_dev, abs(mass - dst[j][1]))
    return pos_dev, mass_dev


@dataclass(frozen=True)
class PushforwardReport:
    """Agreement between independently solved reduced problems and the
    transport formulas applied to the base solution."""

    q: float
    x_l1_dev: float
    x_atom_pos_dev: float
    x_atom_mass_dev: float
    alpha_l1_dev: float | None
    c_dev: float | None
    support_relation_dev: float
    base: CsResult
    band_solution: CsResult
    radial_solution: ZtResult | None

    @property
    def max_dev(self) -> float:
        devs = [self.x_l1_dev, self.x_atom_pos_dev, self.x_atom_mass_dev, self.support_relation_dev]
        if self.alpha_l1_dev is not None:
            devs.append(self.alpha_l1_dev)
        if self.c_dev is not None:
            devs.append(self.c_dev)
        return max(devs)


def pushforward_check(
    m: Mixture,
    beta: float,
    q: float,
    k_max: int = 3,
    config: SolverConfig | None = None,
) -> PushforwardReport:
    """Check the transport of the minimizer to the band and radial problems.

    The base minimizer x at (m, beta) predicts, for any support point q > 0:
    the band problem (covariance recentered at q, rescaled to unit overlap)
    has minimizer t -> x(q + (1-q) t), and the radial problem (covariance
    restricted to radius sqrt(q)) has zero-temperature minimizer
    alpha(t) = beta x(q t) with c = (beta / q) Int_q^1 x.
    Both reduced problems are solved from scratch and compared.
    """
    cfg = config or SolverConfig()
    base = cs_minimize(m, beta, k_max=k_max, config=cfg)
    supp = base.x_star.support()
    dists = [abs(q - s) for s in supp]
    if not dists or min(dists) > 1e-6:
        raise BadInputError(
            f"q={q} is not a support point of the minimizer (support {supp})"
        )
    q = supp[int(np.argmin(dists))]

    xi_q, xi_bar, xi_hat = m.shift_restrict(q)
    band = cs_minimize(xi_bar, beta, k_max=k_max, config=cfg)

    # predicted band CDF: t -> x(q + (1-q) t)
    pred_breaks = tuple(
        (qi - q) / (1.0 - q) for qi in base.x_star.qs if qi > q + 1e-12
    )
    base_lev_ext = (*base.x_star.levels, 1.0)
    n_below = sum(1 for qi in base.x_star.qs if qi <= q + 1e-12)
    pred_vals = base_lev_ext[n_below:]
    ind_breaks = band.x_star.qs
    ind_vals = (*band.x_star.levels, 1.0)
    x_l1 = _step_l1(
        np.asarray(pred_breaks), np.asarray(pred_vals), np.asarray(ind_breaks), np.asarray(ind_vals)
    )
    pred_atoms = [(0.0, pred_vals[0])] + [
        (b, pred_vals[i + 1] - pred_vals[i]) for i, b in enumerate(pred_breaks)
    ]
    ind_atoms = list(OrderParameter(ind_breaks, band.x_star.levels).measure_atoms())
    pos_dev, mass_dev = _atom_match_dev(
        [a for a in pred_atoms if a[1] > 1e-9], [a for a in ind_atoms if a[1] > 1e-9]
    )

    # support relation: lift independent band atoms back to [q, 1]
    rel_dev = 0.0
    for t in (0.0, *ind_breaks):
        lifted = q + (1.0 - q) * t
        rel_dev = max(rel_dev, min(abs(lifted - s) for s in supp))
    for s in supp:
        if s >= q - 1e-12:
            t = (s - q) / (1.0 - q)
            rel_dev = max(rel_dev, min(abs(t - u) for u in (0.0, *ind_breaks)))

    alpha_l1 = c_dev = None
    radial = None
    if q > 0.0:
        radial = zt_minimize(xi_hat, k_max=max(k_max - 1, 1), config=cfg)
        pred_a_breaks = tuple(qi / q for qi in base.x_star.qs if qi < q - 1e-12)
        pred_a_vals = tuple(beta * v for v in base_lev_ext[: len(pred_a_breaks) + 1])
        alpha_l1 = _step_l1(
            np.asarray(pred_a_breaks),
            np.asarray(pred_a_vals),
            np.asarray(radial.order.breakpoints[1:]),
            np.asarray(radial.order.values),
        )
        c_pred = (beta / q) * base.x_star.tail_integral(q)
        c_dev = abs(radial.order.c - c_pred)

    return PushforwardReport(
        q=q,
        x_l1_dev=x_l1,
        x_atom_pos_dev=pos_dev,
        x_atom_mass_dev=mass_dev,
        alpha_l1_dev=alpha_l1,
        c_dev=c_dev,
        support_relation_dev=rel_dev,
        base=base,
        band_solution=band,
        radial_solution=radial,
    )
