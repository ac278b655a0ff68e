"""Euler-Maruyama integration of the paired coordinate SDEs.

State per path is (x^0..x^3, y^0..y^3), advanced by

    x^mu_{t+1} = x^mu_t + v^mu(tau_t, z_t) d_tau + sigma_x^mu dWx^mu_t
    y^mu_{t+1} = y^mu_t + u^mu(tau_t, z_t) d_tau + sigma_y^mu dWy^mu_t

with dWy the bit-exact signed copy of dWx (see wiener). The noise is additive,
so Euler-Maruyama is strong order 1 here.

Policies are Markov feedback controls w(tau, z) = v + iu, supplied as
vectorized callables: policy(tau, z) takes z of shape (n, 4) complex and
returns w of shape (n, 4) complex. Use pointwise_policy to adapt a scalar
per-point function.

Each path draws its increments from an independent substream derived from
(seed, path index), so ensembles are reproducible regardless of scheduling
and paths can be regenerated in isolation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .spacetime import ComplexFourVector
from .wiener import DiffusionSpec, path_generator

PolicyFn = Callable[[float, np.ndarray], np.ndarray]

_CSV_FIELDS = ["path", "step", "tau",
               "x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3"]


def constant_policy(w) -> PolicyFn:
    """Policy returning the same complex four-velocity for every path."""
    w = np.asarray(getattr(w, "components", w), dtype=np.complex128)
    if w.shape != (4,):
        raise DomainError(f"constant policy needs 4 components, got {w.shape}")

    def policy(tau: float, z: np.ndarray) -> np.ndarray:
        return np.broadcast_to(w, z.shape)

    return policy


def zero_policy() -> PolicyFn:
    return constant_policy(np.zeros(4, dtype=np.complex128))


def linear_policy(matrix) -> PolicyFn:
    """w(tau, z) = matrix @ z, a state-feedback test policy."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (4, 4):
        raise DomainError(f"linear policy needs a 4x4 matrix, got {m.shape}")

    def policy(tau: float, z: np.ndarray) -> np.ndarray:
        return z @ m.T

    return policy


def pointwise_policy(f: Callable[[float, np.ndarray], np.ndarray]) -> PolicyFn:
    """Adapt a per-point callable (tau, z (4,)) -> w (4,) to the batch protocol."""

    def policy(tau: float, z: np.ndarray) -> np.ndarray:
        return np.array([f(tau, zp) for zp in z], dtype=np.complex128)

    return policy


def path_increments(spec: DiffusionSpec, d_tau: float, n_steps: int,
                    seed: int, path: int) -> tuple[np.ndarray, np.ndarray]:
    """All increments for one path, shape (n_steps, 4) each."""
    rng = path_generator(seed, path)
    dWx = rng.normal(0.0, np.sqrt(d_tau), size=(n_steps, 4))
    dWy = dWx * spec.sign_copy
    return dWx, dWy


def ensemble_increments(spec: DiffusionSpec, d_tau: float, n_steps: int,
                        n_paths: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Increments for the whole ensemble, shape (n_paths, n_steps, 4) each."""
    dWx = np.empty((n_paths, n_steps, 4))
    for p in range(n_paths):
        rng = path_generator(seed, p)
        dWx[p] = rng.normal(0.0, np.sqrt(d_tau), size=(n_steps, 4))
    dWy = dWx * spec.sign_copy
    return dWx, dWy


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Integrated ensemble. states has shape (n_paths, n_steps+1, 8)."""

    states: np.ndarray
    d_tau: float
    tau0: float
    seed: int
    failed_paths: tuple[int, ...]

    @property
    def n_paths(self) -> int:
        return self.states.shape[0]

    @property
    def n_steps(self) -> int:
        return self.states.shape[1] - 1

    @property
    def x(self) -> np.ndarray:
        return self.states[..., 0:4]

    @property
    def y(self) -> np.ndarray:
        return self.states[..., 4:8]

    def z(self, step: Optional[int] = None) -> np.ndarray:
        """Complex coordinates, all steps or one step."""
        s = self.states if step is None else self.states[:, step]
        return s[..., 0:4] + 1j * s[..., 4:8]

    def taus(self) -> np.ndarray:
        return self.tau0 + self.d_tau * np.arange(self.n_steps + 1)

    def to_csv(self, path) -> None:
        """One row per (path, step): path, step, tau, x0..x3, y0..y3.

        Floats are written with 17 significant digits (round-trip exact).
        """
        taus = self.taus()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_FIELDS)
            for p in range(self.n_paths):
                for t in range(self.n_steps + 1):
                    row = [str(p), str(t), "%.17g" % taus[t]]
                    row += ["%.17g" % v for v in self.states[p, t]]
                    writer.writerow(row)


def _check_grid(d_tau: float, n_steps: int, n_paths: int):
    if d_tau <= 0:
        raise DomainError(f"d_tau must be positive, got {d_tau}")
    if n_steps < 1 or n_paths < 1:
        raise DomainError("n_steps and n_paths must be at least 1")


def _z0_array(z0) -> np.ndarray:
    if isinstance(z0, ComplexFourVector):
        return z0.components
    z = np.asarray(z0, dtype=np.complex128)
    if z.shape != (4,):
        raise DomainError(f"z0 must have 4 components, got shape {z.shape}")
    return z


def integrate_with_increments(policy: PolicyFn, spec: DiffusionSpec, z0,
                              d_tau: float, dWx: np.ndarray, dWy: np.ndarray,
                              tau0: float = 0.0, seed: int = 0) -> TrajectoryEnsemble:
    """Core stepper against externally supplied increments.

    Exposed so refinement studies can integrate coarse and fine grids against
    the same Brownian path (coarse increments as sums of fine ones).
    """
    n_paths, n_steps = dWx.shape[0], dWx.shape[1]
    z = np.broadcast_to(_z0_array(z0), (n_paths, 4)).copy()
    states = np.empty((n_paths, n_steps + 1, 8))
    states[:, 0, 0:4] = z.real
    states[:, 0, 4:8] = z.imag
    alive = np.ones(n_paths, dtype=bool)
    failed: list[int] = []
    x = z.real.copy()
    y = z.imag.copy()
    for t in range(n_steps):
        tau = tau0 + t * d_tau
        idx = np.flatnonzero(alive)
        if idx.size:
            w = np.asarray(policy(tau, x[idx] + 1j * y[idx]), dtype=np.complex128)
            if w.shape != (idx.size, 4):
                raise DomainError(f"policy returned shape {w.shape}, expected {(idx.size, 4)}")
            x[idx] = x[idx] + w.real * d_tau + spec.sigma_x * dWx[idx, t]
            y[idx] = y[idx] + w.imag * d_tau + spec.sigma_y * dWy[idx, t]
            ok = np.isfinite(x[idx]).all(axis=1) & np.isfinite(y[idx]).all(axis=1)
            newly_dead = idx[~ok]
            if newly_dead.size:
                failed.extend(int(i) for i in newly_dead)
                x[newly_dead] = np.nan
                y[newly_dead] = np.nan
                alive[newly_dead] = False
        states[:, t + 1, 0:4] = x
        states[:, t + 1, 4:8] = y
    states.flags.writeable = False
    return TrajectoryEnsemble(states=states, d_tau=float(d_tau), tau0=float(tau0),
                              seed=seed, failed_paths=tuple(sorted(failed)))


def integrate(policy: PolicyFn, spec: DiffusionSpec, z0, d_tau: float,
              n_steps: int, n_paths: int, seed: int,
              tau0: float = 0.0) -> TrajectoryEnsemble:
    """Integrate the ensemble forward from a shared initial point."""
    _check_grid(d_tau, n_steps, n_paths)
    dWx, dWy = ensemble_increments(spec, d_tau, n_steps, n_paths, seed)
    return integrate_with_increments(policy, spec, z0, d_tau, dWx, dWy,
                                     tau0=tau0, seed=seed)


@dataclass(frozen=True)
class ActionEstimate:
    """Monte Carlo action integral with per-part standard errors."""

    mean: complex
    stderr_re: float
    stderr_im: float
    n_paths: int
    n_failed: int
    valid: bool  # False when more than 0.1% of paths were excluded


def estimate_action(lagrangian, policy: PolicyFn, spec: DiffusionSpec, z0,
                    d_tau: float, n_steps: int, n_paths: int, seed: int,
                    tau0: float = 0.0) -> ActionEstimate:
    """Estimate E[integral of L dtau] along policy-driven paths.

    Ito (left endpoint) quadrature: each step contributes
    L(tau_t, z_t, w_t) d_tau with w_t the same control used for stepping.
    Failed (non-finite) paths are excluded from the estimate and counted;
    the estimate is marked invalid when they exceed 0.1% of the ensemble.
    """
    _check_grid(d_tau, n_steps, n_paths)
    dWx, dWy = ensemble_increments(spec, d_tau, n_steps, n_paths, seed)
    z = np.broadcast_to(_z0_array(z0), (n_paths, 4)).copy()
    action = np.zeros(n_paths, dtype=np.complex128)
    alive = np.ones(n_paths, dtype=bool)
    for t in range(n_steps):
        tau = tau0 + t * d_tau
        idx = np.flatnonzero(alive)
        if not idx.size:
            break
        w = np.asarray(policy(tau, z[idx]), dtype=np.complex128)
        lval = np.asarray(lagrangian.value(tau, z[idx], w), dtype=np.complex128)
        action[idx] += lval * d_tau
        z[idx] = z[idx] + w * d_tau + spec.sigma_x * dWx[idx, t] + 1j * (spec.sigma_y * dWy[idx, t])
        ok = np.isfinite(z[idx].view(float).reshape(idx.size, 8)).all(axis=1)
        ok &= np.isfinite(action[idx].view(float).reshape(idx.size, 2)).all(axis=1)
        alive[idx[~ok]] = False
    n_failed = int((~alive).sum())
    good = action[alive]
    n_good = good.size
    if n_good == 0:
        raise DomainError("all paths failed, no action estimate available")
    mean = complex(good.mean())
    se_re = float(good.real.std(ddof=1) / np.sqrt(n_good)) if n_good > 1 else 0.0
    se_im = float(good.imag.std(ddof=1) / np.sqrt(n_good)) if n_good > 1 else 0.0
    return ActionEstimate(mean=mean, stderr_re=se_re, stderr_im=se_im,
                          n_paths=n_paths, n_failed=n_failed,
                          valid=n_failed <= 0.001 * n_paths)


@dataclass(frozen=True)
class BellmanResidual:
    """J(tau, z) - <L d_tau + J(tau + d_tau, z + dz)> over one Euler step."""

    residual: complex
    stderr_re: float
    stderr_im: float
    n_paths: int


def bellman_consistency(value_field, lagrangian, policy: PolicyFn,
                        spec: DiffusionSpec, tau: float, z0, d_tau: float,
                        n_paths: int, seed: int) -> BellmanResidual:
    """One-step dynamic-programming residual of a candidate value field.

    value_field is a callable (tau, z (4,) complex) -> complex. For the
    optimal policy and a field solving the dynamic program the residual is
    O(d_tau^2) plus sampling error; a suboptimal policy shows up as a
    residual beyond its standard error.
    """
    _check_grid(d_tau, 1, n_paths)
    z0 = _z0_array(z0)
    dWx, dWy = ensemble_increments(spec, d_tau, 1, n_paths, seed)
    zb = np.broadcast_to(z0, (n_paths, 4))
    w = np.asarray(policy(tau, zb), dtype=np.complex128)
    if w.shape != (n_paths, 4):
        raise DomainError(f"policy returned shape {w.shape}, expected {(n_paths, 4)}")
    lval = np.asarray(lagrangian.value(tau, zb, w), dtype=np.complex128)
    lval = np.broadcast_to(lval, (n_paths,))
    z1 = zb + w * d_tau + spec.sigma_x * dWx[:, 0] + 1j * (spec.sigma_y * dWy[:, 0])
    j1 = np.array([value_field(tau + d_tau, zp) for zp in z1], dtype=np.complex128)
    samples = lval * d_tau + j1
    j0 = complex(value_field(tau, z0))
    mean = complex(samples.mean())
    se_re = float(samples.real.std(ddof=1) / np.sqrt(n_paths)) if n_paths > 1 else 0.0
    se_im = float(samples.imag.std(ddof=1) / np.sqrt(n_paths)) if n_paths > 1 else 0.0
    return BellmanResidual(residual=j0 - mean, stderr_re=se_re, stderr_im=se_im,
                           n_paths=n_paths)
