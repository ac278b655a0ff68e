"""Analytically continued Lagrangians of complex four-velocity.

The electromagnetic Lagrangian is

    L(tau, z, w) = sigma_tilde m c sqrt(sigma_tilde sum w^mu w_mu) + q sum A_mu(tau, z) w^mu

with the principal square root (branch cut on the negative real axis). Its
velocity normalization, sum w^mu w_mu = sigma_tilde c^2, is a weak equation:
it is imposed only after differentiation. The published gradient is therefore
the on-shell simplification

    dL/dw^mu = m w_mu + q A_mu

which is what gradient_w returns and what the control solver drives to zero.
The raw unconstrained gradient of the square-root term,
m c w_mu / sqrt(sigma_tilde sum w^mu w_mu) + q A_mu, is exposed separately and
agrees with gradient_w exactly on the shell; check_weak_gradient verifies that
against finite differences of the value.

Vector potentials are callables A(tau, z) -> (..., 4) lower-index components,
analytic in z and broadcasting over leading axes of z.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, SingularityError
from .spacetime import Metric, MOSTLY_PLUS
from .ccalc import default_step

AFn = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Lagrangian:
    """Value callable with an optional closed-form velocity gradient.

    value(tau, z, w) maps (..., 4) complex z, w to (...) complex;
    gradient_w(tau, z, w), when present, returns the lower-index gradient
    dL/dw^mu with the same leading shape.
    """

    value: Callable
    gradient_w: Optional[Callable] = None
    name: str = ""
    params: dict = field(default_factory=dict)

    def grad(self, tau: float, z: np.ndarray, w: np.ndarray,
             h: Optional[float] = None) -> np.ndarray:
        """Closed-form gradient when available, else central differences in w."""
        if self.gradient_w is not None:
            return np.asarray(self.gradient_w(tau, z, w), dtype=np.complex128)
        w = np.asarray(w, dtype=np.complex128)
        if h is None:
            h = default_step(max(1.0, float(np.abs(w).max())))
        g = np.empty(w.shape, dtype=np.complex128)
        for mu in range(4):
            e = np.zeros(4, dtype=np.complex128)
            e[mu] = 1.0
            g[..., mu] = (self.value(tau, z, w + h * e) - self.value(tau, z, w - h * e)) / (2 * h)
        return g


@dataclass(frozen=True)
class EMFieldConfig:
    """Charge, mass, light speed and vector potential for the EM Lagrangian."""

    q: float = 0.0
    m: float = 1.0
    c: float = 1.0
    A: Optional[AFn] = None
    metric: Metric = MOSTLY_PLUS

    def __post_init__(self):
        if self.m <= 0:
            raise DomainError(f"mass must be positive, got {self.m}")
        if self.c <= 0:
            raise DomainError(f"c must be positive, got {self.c}")

    def potential(self, tau: float, z: np.ndarray) -> np.ndarray:
        """Lower-index A_mu at (tau, z), zeros when no potential is set."""
        z = np.asarray(z, dtype=np.complex128)
        if self.A is None:
            return np.zeros(z.shape, dtype=np.complex128)
        a = np.asarray(self.A(tau, z), dtype=np.complex128)
        if a.shape != z.shape:
            raise DomainError(f"potential returned shape {a.shape}, expected {z.shape}")
        return a


def _sum_ww(metric: Metric, w: np.ndarray) -> np.ndarray:
    return np.sum(metric.eta * w * w, axis=-1)


def em_lagrangian(cfg: EMFieldConfig) -> Lagrangian:
    """The electromagnetic square-root Lagrangian for a configuration."""
    st = cfg.metric.sigma_tilde
    eta = cfg.metric.eta

    def value(tau, z, w):
        w = np.asarray(w, dtype=np.complex128)
        core = st * cfg.m * cfg.c * np.sqrt(st * _sum_ww(cfg.metric, w) + 0j)
        if cfg.q == 0.0 and cfg.A is None:
            return core
        a = cfg.potential(tau, np.asarray(z, dtype=np.complex128))
        return core + cfg.q * np.sum(a * w, axis=-1)

    def gradient_w(tau, z, w):
        w = np.asarray(w, dtype=np.complex128)
        g = cfg.m * (eta * w)  # m w_mu, the weak-equation-simplified gradient
        if cfg.q != 0.0 or cfg.A is not None:
            g = g + cfg.q * cfg.potential(tau, np.asarray(z, dtype=np.complex128))
        return g

    def closed_form_control(tau, z, dJ):
        """Upper-index stationary velocity -(dJ_mu + q A_mu)/m raised."""
        p = np.asarray(dJ, dtype=np.complex128) + cfg.q * cfg.potential(tau, np.asarray(z, dtype=np.complex128))
        return eta * (-p / cfg.m)

    params = {"q": cfg.q, "m": cfg.m, "c": cfg.c, "config": cfg,
              "sqrt_branch": True, "closed_form_control": closed_form_control}
    return Lagrangian(value=value, gradient_w=gradient_w, name="em", params=params)


def free_particle_lagrangian(m: float = 1.0, c: float = 1.0,
                             metric: Metric = MOSTLY_PLUS) -> Lagrangian:
    return em_lagrangian(EMFieldConfig(q=0.0, m=m, c=c, A=None, metric=metric))


def quadratic_lagrangian(a: float = 1.0, metric: Metric = MOSTLY_PLUS) -> Lagrangian:
    """L = (a/2) sum w^mu w_mu, an unconstrained test Lagrangian."""
    eta = metric.eta

    def value(tau, z, w):
        w = np.asarray(w, dtype=np.complex128)
        return 0.5 * a * _sum_ww(metric, w)

    def gradient_w(tau, z, w):
        return a * (eta * np.asarray(w, dtype=np.complex128))

    return Lagrangian(value=value, gradient_w=gradient_w, name="quadratic",
                      params={"a": a})


def zero_lagrangian() -> Lagrangian:
    def value(tau, z, w):
        w = np.asarray(w, dtype=np.complex128)
        return np.zeros(w.shape[:-1], dtype=np.complex128) if w.ndim > 1 else 0j

    def gradient_w(tau, z, w):
        return np.zeros(np.asarray(w).shape, dtype=np.complex128)

    return Lagrangian(value=value, gradient_w=gradient_w, name="zero", params={})


def unconstrained_sqrt_gradient(cfg: EMFieldConfig, tau: float, z, w,
                                branch_tol: float = 1e-12) -> np.ndarray:
    """Raw gradient m c w_mu / sqrt(sigma_tilde sum w^mu w_mu) + q A_mu.

    Raises SingularityError at the branch point sum w^mu w_mu = 0, where the
    square root is not differentiable.
    """
    w = np.asarray(w, dtype=np.complex128)
    st = cfg.metric.sigma_tilde
    ww = _sum_ww(cfg.metric, w)
    if np.any(np.abs(ww) < branch_tol * (cfg.c * cfg.c)):
        raise SingularityError("velocity at the square-root branch point, sum w^mu w_mu = 0")
    root = np.sqrt(st * ww + 0j)
    g = cfg.m * cfg.c * (cfg.metric.eta * w) / root[..., None] if w.ndim > 1 \
        else cfg.m * cfg.c * (cfg.metric.eta * w) / root
    if cfg.q != 0.0 or cfg.A is not None:
        g = g + cfg.q * cfg.potential(tau, np.asarray(z, dtype=np.complex128))
    return g


@dataclass(frozen=True)
class WeakGradientCheck:
    passed: bool
    max_abs_error: float
    fd_gradient: np.ndarray
    shell_gradient: np.ndarray


def check_weak_gradient(cfg: EMFieldConfig, w, tau: float = 0.0, z=None,
                        tol: float = 1e-6, h: Optional[float] = None,
                        shell_tol: float = 1e-8) -> WeakGradientCheck:
    """Compare finite differences of the square-root term against m w_mu.

    Precondition: w lies on the weak-equation shell, sum w^mu w_mu close to
    sigma_tilde c^2 (checked to shell_tol). The finite-difference gradient of
    the square-root term then equals the simplified gradient m w_mu.
    """
    from .spacetime import weak_equation_residual

    w = np.asarray(getattr(w, "components", w), dtype=np.complex128)
    if z is None:
        z = np.zeros(4, dtype=np.complex128)
    res = weak_equation_residual(w, cfg.metric, cfg.c)
    if abs(res) > shell_tol:
        raise DomainError(f"w is off the weak-equation shell, residual {res}")
    st = cfg.metric.sigma_tilde
    sqrt_only = Lagrangian(
        value=lambda tau_, z_, w_: st * cfg.m * cfg.c * np.sqrt(
            st * _sum_ww(cfg.metric, np.asarray(w_, dtype=np.complex128)) + 0j),
        gradient_w=None)
    fd = sqrt_only.grad(tau, z, w, h=h)
    shell = cfg.m * (cfg.metric.eta * w)
    err = float(np.abs(fd - shell).max())
    scale = max(1.0, float(np.abs(shell).max()))
    return WeakGradientCheck(passed=err < tol * scale, max_abs_error=err,
                             fd_gradient=fd, shell_gradient=shell)


_PRESET_RE = re.compile(r"^\s*([a-z-]+)\s*(?:\(([^)]*)\))?\s*$")


def vector_potential_preset(text: str) -> tuple[Optional[AFn], dict]:
    """Parse a potential preset string into a callable and an echo dict.

    Supported: "zero", "constant(a0,a1,a2,a3)", "linear-electric(E)" where
    the linear-electric potential is A_0 = -E z^1 (analytic continuation of
    a uniform electric field along axis 1), other components zero.
    """
    m = _PRESET_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse potential preset {text!r}")
    name, argtext = m.group(1), m.group(2)
    args: list[float] = []
    if argtext is not None and argtext.strip():
        try:
            args = [float(s) for s in argtext.split(",")]
        except ValueError as exc:
            raise DomainError(f"bad numeric arguments in preset {text!r}") from exc
    if name == "zero":
        if args:
            raise DomainError("zero preset takes no arguments")
        return None, {"potential": "zero"}
    if name == "constant":
        if len(args) != 4:
            raise DomainError("constant preset needs 4 components")
        a = np.array(args, dtype=np.complex128)

        def const_potential(tau, z):
            z = np.asarray(z, dtype=np.complex128)
            return np.broadcast_to(a, z.shape).copy()

        return const_potential, {"potential": "constant", "components": args}
    if name == "linear-electric":
        if len(args) != 1:
            raise DomainError("linear-electric preset needs 1 field strength")
        e_field = args[0]

        def linear_potential(tau, z):
            z = np.asarray(z, dtype=np.complex128)
            a = np.zeros(z.shape, dtype=np.complex128)
            a[..., 0] = -e_field * z[..., 1]
            return a

        return linear_potential, {"potential": "linear-electric", "E": e_field}
    raise DomainError(f"unknown potential preset {name!r}")
