"""Stationary optimal controls and the real/imaginary equivalence audit.

The stationarity condition is dL/dw^mu + dJ/dz^mu = 0, four complex equations
solved as a damped Newton iteration over the 8 real unknowns (v, u),
w^mu = v^mu + i u^mu. On convergence the result carries both the complex
residual vector and the real-pair residual vector

    [ Re(dL/dw) + dJ_R/dx ;  -Im(dL/dw) + dJ_R/dy ]

(the real-part condition set written through dL/dv = dL/dw and
dL/du = i dL/dw), related to the complex residual Z by Z = re(Z) - i re(iZ).

equivalence_audit realizes the two-route check: at each probe it solves the
real-part condition set and the imaginary-part condition set independently,
with the field partials taken from separate x- and y-stencils of J_R and J_I
(no Cauchy-Riemann substitution), and asserts that the two roots coincide.
Non-analytic value fields are refused up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AnalyticityError, DomainError, NonConvergenceError
from .spacetime import ComplexFourVector, LOWER, UPPER
from .ccalc import analyticity_scan, complex_derivative, default_step
from .lagrangian import Lagrangian


@dataclass(frozen=True)
class StationarityResult:
    w_star: ComplexFourVector                # upper index
    residual_complex: np.ndarray             # 4 complex, dL/dw + dJ at w_star
    residual_real_pair: np.ndarray           # 8 reals, real-part condition set
    iterations: int
    converged: bool


def _newton8(residual_fn: Callable[[np.ndarray], np.ndarray], theta0: np.ndarray,
             tol: float, max_iter: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Damped Newton with finite-difference Jacobian on an 8-real system."""
    theta = np.asarray(theta0, dtype=float).copy()
    r = residual_fn(theta)
    norm = float(np.abs(r).max())
    for it in range(1, max_iter + 1):
        if norm < tol:
            return theta, r, it - 1
        jac = np.empty((8, 8))
        for k in range(8):
            step = default_step(max(1.0, abs(theta[k])))
            tp = theta.copy()
            tp[k] += step
            tm = theta.copy()
            tm[k] -= step
            jac[:, k] = (residual_fn(tp) - residual_fn(tm)) / (2 * step)
        try:
            delta = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise NonConvergenceError(f"singular Jacobian after {it - 1} iterations",
                                      residual=norm, iterations=it - 1) from exc
        scale = 1.0
        accepted = False
        for _ in range(12):  # step halving on residual increase
            cand = theta + scale * delta
            rc = residual_fn(cand)
            nc = float(np.abs(rc).max())
            if np.isfinite(nc) and (nc <= norm or nc < tol):
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            raise NonConvergenceError(f"damping stalled at residual {norm}",
                                      residual=norm, iterations=it)
        theta, r, norm = cand, rc, nc
    if norm < tol:
        return theta, r, max_iter
    raise NonConvergenceError(f"no convergence in {max_iter} iterations, residual {norm}",
                              residual=norm, iterations=max_iter)


def _theta_to_w(theta: np.ndarray) -> np.ndarray:
    return theta[:4] + 1j * theta[4:]


def _dj_lower(dJ) -> np.ndarray:
    if isinstance(dJ, ComplexFourVector):
        if dJ.index != LOWER:
            raise DomainError("dJ must carry a lower index")
        return dJ.components
    dJ = np.asarray(dJ, dtype=np.complex128)
    if dJ.shape != (4,):
        raise DomainError(f"dJ must have 4 components, got shape {dJ.shape}")
    return dJ


def solve_optimal_control(lagrangian: Lagrangian, dJ, tau: float = 0.0, z=None,
                          guess=None, tol: float = 1e-10,
                          max_iter: int = 100) -> StationarityResult:
    """Newton solve of dL/dw + dJ = 0 over the 8 real velocity components."""
    dj = _dj_lower(dJ)
    if z is None:
        z = np.zeros(4, dtype=np.complex128)
    z = np.asarray(getattr(z, "components", z), dtype=np.complex128)
    if guess is None:
        theta0 = np.zeros(8)
    else:
        g = np.asarray(getattr(guess, "components", guess), dtype=np.complex128)
        theta0 = np.concatenate([g.real, g.imag])

    def residual(theta: np.ndarray) -> np.ndarray:
        g_c = lagrangian.grad(tau, z, _theta_to_w(theta)) + dj
        return np.concatenate([g_c.real, g_c.imag])

    theta, _, iterations = _newton8(residual, theta0, tol, max_iter)
    w = _theta_to_w(theta)
    g_c = lagrangian.grad(tau, z, w) + dj
    real_pair = np.concatenate([g_c.real, -g_c.imag])
    return StationarityResult(
        w_star=ComplexFourVector(w, UPPER),
        residual_complex=g_c,
        residual_real_pair=real_pair,
        iterations=iterations,
        converged=bool(np.abs(g_c).max() < tol),
    )


@dataclass(frozen=True)
class AuditProbe:
    tau: float
    z: np.ndarray
    w_real_set: Optional[np.ndarray]
    w_imag_set: Optional[np.ndarray]
    disagreement: float
    closed_form_disagreement: float
    singular: bool
    note: str = ""


@dataclass(frozen=True)
class AuditReport:
    probes: tuple[AuditProbe, ...]
    tol: float
    passed: bool

    @property
    def max_disagreement(self) -> float:
        vals = [p.disagreement for p in self.probes if not p.singular]
        return max(vals) if vals else 0.0

    @property
    def max_closed_form_disagreement(self) -> float:
        vals = [p.closed_form_disagreement for p in self.probes if not p.singular]
        return max(vals) if vals else 0.0

    @property
    def singular_probes(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.probes) if p.singular)


def equivalence_audit(lagrangian: Lagrangian, value_field,
                      probes: Sequence[tuple[float, np.ndarray]],
                      h: Optional[float] = None, tol: float = 1e-8,
                      scan_tol: float = 1e-6, solver_tol: float = 1e-12,
                      branch_tol: float = 1e-10) -> AuditReport:
    """Solve both real-pair condition sets at every probe and compare roots.

    Refuses (AnalyticityError) when the value field fails its analyticity
    scan. Probes whose root lands on the square-root branch point of a
    shell-constrained Lagrangian (sum w^mu w_mu ~ 0) are flagged singular,
    "no interior stationary point", and excluded from the pass criterion.
    """
    scan = analyticity_scan(value_field, probes, h=h, tol=scan_tol)
    if not scan.passed:
        worst = scan.worst
        raise AnalyticityError(
            f"value field failed analyticity scan at tau={worst.tau}, z={worst.z}: "
            f"scaled residual {worst.scaled_residual:.3e} >= {scan_tol:.3e}")

    metric = None
    cfg = lagrangian.params.get("config")
    if cfg is not None:
        metric = cfg.metric
    has_branch = bool(lagrangian.params.get("sqrt_branch"))
    closed_form = lagrangian.params.get("closed_form_control")

    out: list[AuditProbe] = []
    all_ok = True
    for tau, z in probes:
        tau = float(tau)
        z = np.asarray(getattr(z, "components", z), dtype=np.complex128)
        rep = complex_derivative(value_field, tau, z, h=h)
        dx_r, dx_i = rep.d_x.real, rep.d_x.imag
        dy_r, dy_i = rep.d_y.real, rep.d_y.imag

        def real_set(theta: np.ndarray) -> np.ndarray:
            g = lagrangian.grad(tau, z, _theta_to_w(theta))
            return np.concatenate([g.real + dx_r, -g.imag + dy_r])

        def imag_set(theta: np.ndarray) -> np.ndarray:
            g = lagrangian.grad(tau, z, _theta_to_w(theta))
            return np.concatenate([g.imag + dx_i, g.real + dy_i])

        try:
            theta_r, _, _ = _newton8(real_set, np.zeros(8), solver_tol, 100)
            theta_i, _, _ = _newton8(imag_set, np.zeros(8), solver_tol, 100)
        except NonConvergenceError as exc:
            out.append(AuditProbe(tau=tau, z=z, w_real_set=None, w_imag_set=None,
                                  disagreement=float("nan"),
                                  closed_form_disagreement=float("nan"),
                                  singular=True,
                                  note=f"no interior stationary point: {exc}"))
            continue
        w_r, w_i = _theta_to_w(theta_r), _theta_to_w(theta_i)

        if has_branch and metric is not None:
            ww = complex(np.sum(metric.eta * w_r * w_r))
            if abs(ww) < branch_tol * (cfg.c * cfg.c):
                out.append(AuditProbe(tau=tau, z=z, w_real_set=w_r, w_imag_set=w_i,
                                      disagreement=float("nan"),
                                      closed_form_disagreement=float("nan"),
                                      singular=True,
                                      note="no interior stationary point "
                                           "(root at the square-root branch point)"))
                continue

        disagreement = float(np.abs(w_r - w_i).max())
        cf_dis = 0.0
        if closed_form is not None:
            w_cf = np.asarray(closed_form(tau, z, rep.d_z), dtype=np.complex128)
            cf_dis = float(max(np.abs(w_r - w_cf).max(), np.abs(w_i - w_cf).max()))
        ok = disagreement < tol
        all_ok = all_ok and ok
        out.append(AuditProbe(tau=tau, z=z, w_real_set=w_r, w_imag_set=w_i,
                              disagreement=disagreement,
                              closed_form_disagreement=cf_dis, singular=False))
    return AuditReport(probes=tuple(out), tol=float(tol), passed=all_ok)
