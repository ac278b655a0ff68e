"""Dynamic-programming residuals for candidate value fields.

The combined complex equation reads

    -dJ/dtau = min_w ( L + sum w^mu dJ/dz^mu ) + (1/2) sum sigma^mu sigma^mu d2J/dz^mu dz^mu

with terminal condition J(tau_f, z) = 0. The minimization is removed by
substituting the stationary control before evaluation, so the residual is

    residual = -dJ/dtau - [ L(w*) + sum w*^mu dJ/dz^mu ] - (1/2) sum sigmasq^mu d2J^mu.

For the EM Lagrangian the stationary control is the closed form
w*_mu = -(dJ/dz^mu + q A_mu)/m. When dJ + qA vanishes the closed form lands
on the square-root branch point; the shell-restricted minimization is then
degenerate, every shell velocity gives the same bracket, and the evaluator
substitutes the representative shell velocity w* = (c, 0, 0, 0), which is on
shell in both metric conventions.

The paired real form is evaluated by hjb_residual_pair from independent
stencils of two real fields J_R(tau, x, y) and J_I(tau, x, y); for analytic
J = J_R + i J_I the pair residuals recombine into the complex residual, and
their numerical difference is pure stencil error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import DomainError
from .spacetime import Metric
from .wiener import DiffusionSpec, complex_sigma_squared
from .ccalc import (DomainBox, complex_derivative, default_step,
                    second_complex_derivative, tau_derivative)
from .lagrangian import Lagrangian
from .control import solve_optimal_control

PairFieldFn = Callable[[float, np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class HJBProblem:
    """A Lagrangian, a diffusion and a horizon, sharing one metric."""

    lagrangian: Lagrangian
    diffusion: DiffusionSpec
    tau_f: float
    box: Optional[DomainBox] = None

    def __post_init__(self):
        cfg = self.lagrangian.params.get("config")
        if cfg is not None and cfg.metric != self.diffusion.metric:
            raise DomainError("lagrangian and diffusion disagree on the metric")
        if not np.isfinite(self.tau_f):
            raise DomainError("tau_f must be finite")

    @property
    def metric(self) -> Metric:
        return self.diffusion.metric


def rest_shell_velocity(metric: Metric, c: float) -> np.ndarray:
    """The representative shell point (c, 0, 0, 0), on shell either convention."""
    w = np.zeros(4, dtype=np.complex128)
    w[0] = c
    return w


def optimal_control_at(problem: HJBProblem, dJ: np.ndarray, tau: float, z,
                       degenerate_tol: float = 1e-8) -> tuple[np.ndarray, str]:
    """Stationary control for the residual, upper index.

    Uses the Lagrangian's closed form when it has one; a vanishing
    dJ + qA triggers the degenerate shell fallback. Generic Lagrangians go
    through the Newton solver.
    """
    z = np.asarray(getattr(z, "components", z), dtype=np.complex128)
    cfg = problem.lagrangian.params.get("config")
    closed_form = problem.lagrangian.params.get("closed_form_control")
    if closed_form is not None and cfg is not None:
        p = dJ + cfg.q * cfg.potential(tau, z)
        if float(np.abs(p).max()) < degenerate_tol * cfg.m * cfg.c:
            return rest_shell_velocity(problem.metric, cfg.c), "shell-degenerate"
        return np.asarray(closed_form(tau, z, dJ), dtype=np.complex128), "closed-form"
    result = solve_optimal_control(problem.lagrangian, dJ, tau=tau, z=z)
    return result.w_star.components, "newton"


@dataclass(frozen=True)
class ResidualProbe:
    """Everything the residual evaluation saw at one probe."""

    tau: float
    z: np.ndarray
    residual: complex
    w_star: np.ndarray
    control_method: str
    dJ: np.ndarray
    d2J: np.ndarray

    def to_record(self) -> dict:
        """The per-probe JSON record shape used by the CLI."""
        return {
            "tau": self.tau,
            "z_re": [float(v) for v in self.z.real],
            "z_im": [float(v) for v in self.z.imag],
            "residual_re": float(self.residual.real),
            "residual_im": float(self.residual.imag),
            "w_star_re": [float(v) for v in self.w_star.real],
            "w_star_im": [float(v) for v in self.w_star.imag],
        }


def hjb_residual_probe(problem: HJBProblem, value_field, tau: float, z,
                       h: Optional[float] = None) -> ResidualProbe:
    """Complex-route residual with its ingredients at one interior probe."""
    z = np.asarray(getattr(z, "components", z), dtype=np.complex128)
    rep = complex_derivative(value_field, tau, z, h=h)
    rep2 = second_complex_derivative(value_field, tau, z, h=h)
    dj = rep.d_z
    w_star, method = optimal_control_at(problem, dj, tau, z)
    lval = complex(np.asarray(problem.lagrangian.value(tau, z, w_star)))
    bracket = lval + complex(np.sum(w_star * dj))
    dtau_j = tau_derivative(value_field, tau, z, h=h)
    sigsq = complex_sigma_squared(problem.diffusion)
    second = 0.5 * complex(np.sum(sigsq * rep2.d2_z))
    residual = -dtau_j - bracket - second
    return ResidualProbe(tau=float(tau), z=z, residual=residual, w_star=w_star,
                         control_method=method, dJ=dj, d2J=rep2.d2_z)


def hjb_residual_complex(problem: HJBProblem, value_field, tau: float, z,
                         h: Optional[float] = None) -> complex:
    """The combined complex-equation residual at one probe."""
    return hjb_residual_probe(problem, value_field, tau, z, h=h).residual


def _pair_first(field: PairFieldFn, tau: float, x: np.ndarray, y: np.ndarray,
                h: float) -> tuple[np.ndarray, np.ndarray]:
    dx = np.empty(4)
    dy = np.empty(4)
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        dx[mu] = (field(tau, x + e, y) - field(tau, x - e, y)) / (2 * h)
        dy[mu] = (field(tau, x, y + e) - field(tau, x, y - e)) / (2 * h)
    return dx, dy


def _pair_second(field: PairFieldFn, tau: float, x: np.ndarray, y: np.ndarray,
                 h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    f0 = field(tau, x, y)
    dxx = np.empty(4)
    dyy = np.empty(4)
    dxy = np.empty(4)
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        dxx[mu] = (field(tau, x + e, y) - 2 * f0 + field(tau, x - e, y)) / (h * h)
        dyy[mu] = (field(tau, x, y + e) - 2 * f0 + field(tau, x, y - e)) / (h * h)
        dxy[mu] = (field(tau, x + e, y + e) - field(tau, x + e, y - e)
                   - field(tau, x - e, y + e) + field(tau, x - e, y - e)) / (4 * h * h)
    return dxx, dyy, dxy


def hjb_residual_pair(problem: HJBProblem, field_r: PairFieldFn, field_i: PairFieldFn,
                      tau: float, x, y, h: Optional[float] = None) -> tuple[float, float]:
    """Residuals of the paired real equations at one probe.

    field_r and field_i are real fields of (tau, x, y). All their partials
    come from real stencils; the stationary control is built from the pair
    gradient dJ = dJ_R/dx + i dJ_I/dx.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (4,) or y.shape != (4,):
        raise DomainError("x and y must each have 4 components")
    if h is None:
        h = default_step(max(1.0, float(np.abs(x).max()), float(np.abs(y).max())))
    dxr, dyr = _pair_first(field_r, tau, x, y, h)
    dxi, dyi = _pair_first(field_i, tau, x, y, h)
    dxxr, dyyr, dxyr = _pair_second(field_r, tau, x, y, h)
    dxxi, dyyi, dxyi = _pair_second(field_i, tau, x, y, h)

    dj = dxr + 1j * dxi
    z = x + 1j * y
    w_star, _ = optimal_control_at(problem, dj, tau, z)
    v, u = w_star.real, w_star.imag
    lval = complex(np.asarray(problem.lagrangian.value(tau, z, w_star)))

    ht = default_step(max(1.0, abs(tau)))
    dtau_r = (field_r(tau + ht, x, y) - field_r(tau - ht, x, y)) / (2 * ht)
    dtau_i = (field_i(tau + ht, x, y) - field_i(tau - ht, x, y)) / (2 * ht)

    spec = problem.diffusion
    sx2 = spec.sigma_x * spec.sigma_x
    sy2 = spec.sigma_y * spec.sigma_y
    mix = 2.0 * spec.epsilon * problem.metric.eta * spec.sigma_x * spec.sigma_y

    bracket_r = lval.real + float(np.sum(v * dxr)) + float(np.sum(u * dyr))
    second_r = 0.5 * float(np.sum(sx2 * dxxr + mix * dxyr + sy2 * dyyr))
    residual_r = -dtau_r - bracket_r - second_r

    bracket_i = lval.imag + float(np.sum(v * dxi)) + float(np.sum(u * dyi))
    second_i = 0.5 * float(np.sum(sx2 * dxxi + mix * dxyi + sy2 * dyyi))
    residual_i = -dtau_i - bracket_i - second_i
    return float(residual_r), float(residual_i)


def dalembertian(value_field, tau: float, z, metric: Metric,
                 h: Optional[float] = None) -> complex:
    """sum eta^{mumu} d2J/dz^mu dz^mu via the xx-route stencils."""
    rep2 = second_complex_derivative(value_field, tau, z, h=h)
    return complex(np.sum(metric.eta * rep2.d2_z))


def covariance_check(value_field, metric: Metric, rapidity: float, axis: int,
                     tau: float, z, h: Optional[float] = None) -> float:
    """|d'Alembertian at z - d'Alembertian of the boosted field at the boosted point|."""
    from .spacetime import boost_matrix

    z = np.asarray(getattr(z, "components", z), dtype=np.complex128)
    lam = boost_matrix(rapidity, axis)
    lam_inv = boost_matrix(-rapidity, axis)

    def boosted(tau_: float, zp: np.ndarray) -> complex:
        return value_field(tau_, lam_inv @ zp)

    d_plain = dalembertian(value_field, tau, z, metric, h=h)
    d_boost = dalembertian(boosted, tau, lam @ z, metric, h=h)
    return float(abs(d_plain - d_boost))


def boundary_residual(problem: HJBProblem, value_field,
                      points: Sequence[np.ndarray]) -> float:
    """max |J(tau_f, z)| over the probe points."""
    worst = 0.0
    for z in points:
        z = np.asarray(getattr(z, "components", z), dtype=np.complex128)
        worst = max(worst, abs(complex(value_field(problem.tau_f, z))))
    return worst


def probe_points(box: DomainBox, n: int = 64,
                 shrink: float = 0.05) -> list[tuple[float, np.ndarray]]:
    """Deterministic low-discrepancy probes strictly inside the box.

    Unscrambled 9-dimensional Sobol points mapped into the box shrunk by the
    given fraction of each span, so stencils of moderate step stay interior.
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not 0.0 <= shrink < 0.5:
        raise DomainError(f"shrink must be in [0, 0.5), got {shrink}")
    sampler = qmc.Sobol(d=9, scramble=False)
    if n & (n - 1) == 0:
        unit = sampler.random_base2(int(np.log2(n)))
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            unit = sampler.random(n)
    lo = np.array([box.tau_lo, *box.x_lo, *box.y_lo])
    hi = np.array([box.tau_hi, *box.x_hi, *box.y_hi])
    span = hi - lo
    lo_s = lo + shrink * span
    hi_s = hi - shrink * span
    pts = qmc.scale(unit, lo_s, hi_s)
    out = []
    for row in pts:
        tau = float(row[0])
        z = row[1:5] + 1j * row[5:9]
        out.append((tau, z))
    return out
