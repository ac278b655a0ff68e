"""Perfectly correlated Wiener increments for the paired real and imaginary sheets.

The imaginary-sheet increment is a signed copy of the real-sheet one,
dWy^mu = epsilon * eta^{mumu} * dWx^mu, realized bit-exactly by construction
(one Gaussian stream, multiplied by +-1). The complex diffusion coefficient
product is

    sigma^mu sigma^mu = sigma_x^2 - sigma_y^2 + 2i epsilon eta^{mumu} sigma_x sigma_y

per axis; only this product is exposed, never an individual complex factor.
Defaults are natural units, hbar = m = c = 1.

RNG: counter-based Philox (4x64, 10 rounds) seeded through numpy SeedSequence.
Batch sampling uses SeedSequence(seed); ensemble integration elsewhere derives
per-path substreams from (seed, path index). The algorithm name is recorded in
CLI run manifests as RNG_ALGORITHM.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .spacetime import Metric, MOSTLY_PLUS

RNG_ALGORITHM = "philox4x64-10 (numpy Philox, SeedSequence keyed)"


def generator(seed: int) -> np.random.Generator:
    """Deterministic generator for a flat batch."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def path_generator(seed: int, path: int) -> np.random.Generator:
    """Independent substream for one path, derived from (seed, path index)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(path,))
    return np.random.Generator(np.random.Philox(ss))


def _sigma_array(sigma, name: str) -> np.ndarray:
    a = np.asarray(sigma, dtype=float)
    if a.shape == ():
        a = np.full(4, float(a))
    if a.shape != (4,):
        raise DomainError(f"{name} must have 4 entries, got shape {a.shape}")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise DomainError(f"{name} entries must be finite and nonnegative")
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DiffusionSpec:
    """Per-axis diffusion amplitudes for the two sheets plus the correlation sign.

    sigma_x, sigma_y: nonnegative per-axis amplitudes (scalars broadcast).
    epsilon: +1 or -1, the sheet correlation sign.
    """

    sigma_x: np.ndarray = field(default=1.0)
    sigma_y: np.ndarray = field(default=1.0)
    epsilon: int = 1
    metric: Metric = MOSTLY_PLUS

    def __post_init__(self):
        object.__setattr__(self, "sigma_x", _sigma_array(self.sigma_x, "sigma_x"))
        object.__setattr__(self, "sigma_y", _sigma_array(self.sigma_y, "sigma_y"))
        if self.epsilon not in (1, -1):
            raise DomainError(f"epsilon must be +1 or -1, got {self.epsilon!r}")

    @classmethod
    def natural(cls, hbar: float = 1.0, m: float = 1.0, epsilon: int = 1,
                metric: Metric = MOSTLY_PLUS) -> "DiffusionSpec":
        """sigma_x = sigma_y = sqrt(hbar/m) on every axis."""
        if hbar <= 0 or m <= 0:
            raise DomainError("hbar and m must be positive")
        s = float(np.sqrt(hbar / m))
        return cls(sigma_x=s, sigma_y=s, epsilon=epsilon, metric=metric)

    @classmethod
    def noiseless(cls, metric: Metric = MOSTLY_PLUS, epsilon: int = 1) -> "DiffusionSpec":
        return cls(sigma_x=0.0, sigma_y=0.0, epsilon=epsilon, metric=metric)

    @property
    def sign_copy(self) -> np.ndarray:
        """The per-axis factor epsilon * eta^{mumu} mapping dWx to dWy."""
        return self.epsilon * self.metric.eta


def complex_sigma_squared(spec: DiffusionSpec) -> np.ndarray:
    """Per-axis product sigma^mu sigma^mu (4 complex values)."""
    sx, sy = spec.sigma_x, spec.sigma_y
    return sx * sx - sy * sy + 2j * spec.epsilon * spec.metric.eta * sx * sy


@dataclass(frozen=True)
class IncrementBatch:
    """One batch of paired increments. dWy is a bit-exact signed copy of dWx."""

    d_tau: float
    dWx: np.ndarray  # shape (n, 4)
    dWy: np.ndarray  # shape (n, 4)
    seed: int

    @property
    def n(self) -> int:
        return self.dWx.shape[0]


def sample_increments(spec: DiffusionSpec, d_tau: float, n: int, seed: int) -> IncrementBatch:
    """Draw n paired Wiener increments over one step of size d_tau.

    dWx^mu ~ N(0, d_tau) i.i.d. per axis; dWy^mu = epsilon eta^{mumu} dWx^mu
    exactly (sign copy of the same floats).
    """
    if d_tau <= 0:
        raise DomainError(f"d_tau must be positive, got {d_tau}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    rng = generator(seed)
    dWx = rng.normal(0.0, np.sqrt(d_tau), size=(n, 4))
    dWy = dWx * spec.sign_copy  # multiplication by +-1 is exact
    dWx.flags.writeable = False
    dWy.flags.writeable = False
    return IncrementBatch(d_tau=float(d_tau), dWx=dWx, dWy=dWy, seed=seed)


@dataclass(frozen=True)
class MomentLine:
    """One estimated moment against its order-d_tau target."""

    name: str
    estimate: float
    target: float
    stderr: float
    zscore: float
    flagged: bool


@dataclass(frozen=True)
class MomentReport:
    lines: tuple[MomentLine, ...]
    n: int
    d_tau: float
    z_max: float

    @property
    def n_flagged(self) -> int:
        return sum(1 for ln in self.lines if ln.flagged)

    @property
    def worst(self) -> MomentLine:
        return max(self.lines, key=lambda ln: abs(ln.zscore))

    @property
    def passed(self) -> bool:
        return self.n_flagged == 0


def _zscore(estimate: float, target: float, stderr: float) -> float:
    if stderr == 0.0:
        return 0.0 if estimate == target else float("inf")
    return (estimate - target) / stderr


def moment_check(spec: DiffusionSpec, v: Sequence[float], u: Sequence[float],
                 d_tau: float, n: int, seed: int, z_max: float = 5.0) -> MomentReport:
    """Estimate all first and second increment moments and flag outliers.

    Targets are the order-d_tau values: <dx^mu> = v^mu d_tau,
    <dy^mu> = u^mu d_tau, <dx dx> and <dy dy> diagonal sigma^2 d_tau
    (off-diagonal 0), and <dx^mu dy^nu> = epsilon eta^{mumu} sigma_x sigma_y
    d_tau on the diagonal (0 off it). Standard errors are sample standard
    deviations over the batch divided by sqrt(n); a line is flagged when
    |z| > z_max.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape != (4,) or u.shape != (4,):
        raise DomainError("v and u must have 4 entries each")
    if n < 10_000:
        raise DomainError(f"n must be at least 10000 for stable moments, got {n}")
    batch = sample_increments(spec, d_tau, n, seed)
    dx = v * d_tau + spec.sigma_x * batch.dWx
    dy = u * d_tau + spec.sigma_y * batch.dWy

    lines: list[MomentLine] = []

    def add(name: str, samples: np.ndarray, target: float):
        est = float(samples.mean())
        se = float(samples.std(ddof=1) / np.sqrt(n))
        z = _zscore(est, target, se)
        lines.append(MomentLine(name, est, float(target), se, z, abs(z) > z_max))

    for mu in range(4):
        add(f"dx{mu}", dx[:, mu], v[mu] * d_tau)
    for mu in range(4):
        add(f"dy{mu}", dy[:, mu], u[mu] * d_tau)
    sx, sy = spec.sigma_x, spec.sigma_y
    eta = spec.metric.eta
    for mu in range(4):
        for nu in range(mu, 4):
            target = sx[mu] * sx[mu] * d_tau if mu == nu else 0.0
            add(f"dx{mu}dx{nu}", dx[:, mu] * dx[:, nu], target)
    for mu in range(4):
        for nu in range(mu, 4):
            target = sy[mu] * sy[mu] * d_tau if mu == nu else 0.0
            add(f"dy{mu}dy{nu}", dy[:, mu] * dy[:, nu], target)
    for mu in range(4):
        for nu in range(4):
            target = spec.epsilon * eta[mu] * sx[mu] * sy[mu] * d_tau if mu == nu else 0.0
            add(f"dx{mu}dy{nu}", dx[:, mu] * dy[:, nu], target)

    return MomentReport(lines=tuple(lines), n=n, d_tau=float(d_tau), z_max=float(z_max))
