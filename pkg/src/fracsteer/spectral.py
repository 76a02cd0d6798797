"""Truncated spectral model: states, operator families, and multipliers.

The state space is the span of the first N sine modes on [0, pi]; the
generator is diagonal with eigenvalues lambda_n (default n^2), so the
semigroup and the fractional operator families act by per-mode scalar
factors.  ``ModelSpec`` bundles the generator data with the delay
functions, the per-mode state/control multipliers, the nonlocal weights,
and the nonlinearity descriptor, and validates the standing hypotheses
at construction time.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModelValidationError
from .fractional import FracOrder, _as_alpha
from .gammafn import gamma
from .special import ml_array

_DELAY_KINDS = ("identity", "scaled_sine", "constant_lag")
_NONLINEARITY_KINDS = ("zero", "bounded_tanh", "linear_feedback")
_H5_SAMPLES = 1001


@dataclass(frozen=True)
class SpectralState:
    """Coefficient vector on the truncated sine eigenbasis."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise DomainError("a state needs a 1-d, nonempty coefficient vector")
        if not np.all(np.isfinite(c)):
            raise DomainError("state coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @staticmethod
    def zero(n: int) -> "SpectralState":
        return SpectralState(np.zeros(n))


def _check_same_truncation(u: SpectralState, v: SpectralState):
    if u.truncation != v.truncation:
        raise ModelValidationError(
            f"states have truncations {u.truncation} and {v.truncation}")


@dataclass(frozen=True)
class DelayFn:
    """Named delay function from the closed vocabulary.

    identity: t -> t; scaled_sine(tau): t -> sin(t/tau);
    constant_lag(ell): t -> max(t - ell, 0).
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in _DELAY_KINDS:
            raise ModelValidationError(
                f"unknown delay kind {self.kind!r}; choose from {_DELAY_KINDS}")
        if self.kind == "scaled_sine" and self.param <= 0.0:
            raise ModelValidationError("scaled_sine needs a positive scale")
        if self.kind == "constant_lag" and self.param < 0.0:
            raise ModelValidationError("constant_lag needs a nonnegative lag")

    def __call__(self, t: float) -> float:
        if self.kind == "identity":
            return t
        if self.kind == "scaled_sine":
            return math.sin(t / self.param)
        return max(t - self.param, 0.0)

    @property
    def invertible_on(self) -> float:
        """Upper end of the interval [0, b] on which the delay is
        strictly increasing from 0 (inf if everywhere)."""
        if self.kind == "scaled_sine":
            return 0.5 * math.pi * self.param
        if self.kind == "identity":
            return math.inf
        return 0.0  # constant_lag is flat near 0: not invertible from 0

    def invert(self, s: float) -> float:
        """t with delay(t) = s, on the strictly increasing branch."""
        if self.kind == "identity":
            return s
        if self.kind == "scaled_sine":
            if not (0.0 <= s <= 1.0):
                raise DomainError(f"scaled_sine value {s} outside [0, 1]")
            return self.param * math.asin(s)
        raise DomainError(f"delay kind {self.kind!r} is not invertible")


@dataclass(frozen=True)
class NonlinearityFn:
    """Named nonlinearity acting on the averaged delayed-state channels.

    zero: F = 0.  bounded_tanh(kappa): F = kappa * tanh per mode, with a
    finite norm bound kappa*sqrt(N).  linear_feedback(c): F = c * (the
    channel average), an unbounded test descriptor used by the
    grid-convergence oracles.
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in _NONLINEARITY_KINDS:
            raise ModelValidationError(
                f"unknown nonlinearity {self.kind!r}; choose from {_NONLINEARITY_KINDS}")

    def bound(self, truncation: int) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "bounded_tanh":
            return abs(self.param) * math.sqrt(truncation)
        return math.inf

    def __call__(self, avg: np.ndarray) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros_like(avg)
        if self.kind == "bounded_tanh":
            return self.param * np.tanh(avg)
        return self.param * avg


@dataclass(frozen=True)
class ModelSpec:
    """Immutable model description; all hypothesis checks run here."""

    truncation: int
    alpha: float
    horizon: float
    u0: SpectralState
    v0: SpectralState
    eigenvalues: np.ndarray = None
    big_m: float = 1.0
    state_delays: tuple = ()
    state_multipliers: tuple = ()
    control_delays: tuple = ()
    control_multipliers: tuple = ()
    nonlocal_terms: tuple = ()
    nonlinearity: NonlinearityFn = field(default_factory=lambda: NonlinearityFn("zero"))

    def __post_init__(self):
        n = int(self.truncation)
        if n < 1:
            raise ModelValidationError(f"truncation must be >= 1, got {self.truncation}")
        object.__setattr__(self, "truncation", n)
        object.__setattr__(self, "alpha", _as_alpha(self.alpha))
        if self.horizon <= 0.0:
            raise ModelValidationError(f"horizon must be positive, got {self.horizon}")
        if self.eigenvalues is None:
            lam = np.arange(1, n + 1, dtype=float) ** 2
        else:
            lam = np.asarray(self.eigenvalues, dtype=float)
        if lam.shape != (n,) or np.any(lam <= 0.0):
            raise ModelValidationError(
                "need exactly one positive eigenvalue per mode", hypothesis="(H1)")
        object.__setattr__(self, "eigenvalues", lam)
        if self.big_m < 1.0:
            raise ModelValidationError(f"semigroup bound must be >= 1, got {self.big_m}")
        for s in (self.u0, self.v0):
            if s.truncation != n:
                raise ModelValidationError(
                    f"initial state truncation {s.truncation} != model truncation {n}")

        object.__setattr__(self, "state_delays", tuple(self.state_delays))
        object.__setattr__(self, "control_delays", tuple(self.control_delays))
        sm = tuple(np.asarray(a, dtype=float) for a in self.state_multipliers)
        cm = tuple(np.asarray(b, dtype=float) for b in self.control_multipliers)
        if not sm:
            sm = tuple(-lam for _ in self.state_delays)
        if not cm:
            cm = tuple(np.ones(n) for _ in self.control_delays)
        if len(sm) != len(self.state_delays):
            raise ModelValidationError(
                f"{len(self.state_delays)} state delays but {len(sm)} multipliers")
        if len(cm) != len(self.control_delays):
            raise ModelValidationError(
                f"{len(self.control_delays)} control delays but {len(cm)} multipliers")
        for a in sm + cm:
            if a.shape != (n,):
                raise ModelValidationError(
                    f"multiplier shape {a.shape} != ({n},)")
        object.__setattr__(self, "state_multipliers", sm)
        object.__setattr__(self, "control_multipliers", cm)

        for d in self.state_delays + self.control_delays:
            self._check_delay_bound(d)

        terms = tuple((float(c), float(tk)) for c, tk in self.nonlocal_terms)
        times = [tk for _, tk in terms]
        if any(not (0.0 < tk < self.horizon) for tk in times):
            raise ModelValidationError(
                "nonlocal times must lie strictly inside (0, horizon)")
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ModelValidationError("nonlocal times must be strictly increasing")
        object.__setattr__(self, "nonlocal_terms", terms)

    def _check_delay_bound(self, d: DelayFn):
        # |delay(t)| <= t sampled over the horizon
        ts = np.linspace(0.0, self.horizon, _H5_SAMPLES)
        for t in ts:
            if abs(d(t)) > t + 1e-12:
                raise ModelValidationError(
                    f"delay {d.kind}({d.param}) exceeds t at t={t:.6g}",
                    hypothesis="(H5)")

    @property
    def state_delay_count(self) -> int:
        return len(self.state_delays)

    @property
    def control_delay_count(self) -> int:
        return len(self.control_delays)

    def f_bound_total(self) -> float:
        if not self.state_delays:
            return 0.0
        return self.nonlinearity.bound(self.truncation)

    # --- per-mode eigenfactors -------------------------------------------

    def semigroup_factors(self, t: float) -> np.ndarray:
        return np.exp(-self.eigenvalues * t)

    def s_alpha_factors(self, t: float) -> np.ndarray:
        if t == 0.0:
            return np.ones(self.truncation)
        return ml_array(self.alpha, 1.0, -self.eigenvalues * t ** self.alpha)

    def t_alpha_factors(self, t: float) -> np.ndarray:
        if t == 0.0:
            return np.full(self.truncation, 1.0 / gamma(self.alpha))
        return ml_array(self.alpha, self.alpha, -self.eigenvalues * t ** self.alpha)

    def evaluate_nonlinearity(self, channels) -> np.ndarray:
        """F(s, W_delta): per-mode nonlinearity of the channel average.

        ``channels`` holds one multiplier-applied delayed-state vector
        per state-delay channel; with no channels F is identically 0.
        The configured norm bound is asserted on every evaluation.
        """
        if not channels:
            return np.zeros(self.truncation)
        avg = np.mean(channels, axis=0)
        out = self.nonlinearity(avg)
        limit = self.f_bound_total()
        if math.isfinite(limit):
            nrm = float(np.linalg.norm(out))
            if nrm > limit * (1.0 + 1e-12):
                raise ModelValidationError(
                    f"nonlinearity norm {nrm} exceeds its bound {limit}",
                    hypothesis="(H6)")
        return out


def apply_semigroup(m: ModelSpec, t: float, u: SpectralState) -> SpectralState:
    """Heat semigroup Q(t): per-mode decay e^{-lambda_n t}."""
    if t < 0.0:
        raise DomainError(f"semigroup time must be nonnegative, got {t}")
    if u.truncation != m.truncation:
        raise ModelValidationError(
            f"state truncation {u.truncation} != model truncation {m.truncation}")
    return SpectralState(m.semigroup_factors(t) * u.coeffs)


def apply_S_alpha(m: ModelSpec, t: float, u: SpectralState) -> SpectralState:
    """Fractional solution family: per-mode factor E_{a,1}(-lambda_n t^a)."""
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if u.truncation != m.truncation:
        raise ModelValidationError(
            f"state truncation {u.truncation} != model truncation {m.truncation}")
    return SpectralState(m.s_alpha_factors(t) * u.coeffs)


def apply_T_alpha(m: ModelSpec, t: float, u: SpectralState) -> SpectralState:
    """Fractional forcing family: per-mode factor E_{a,a}(-lambda_n t^a).

    Diagonal with real entries, hence self-adjoint: the adjoint used by
    the control law coincides with the operator itself.
    """
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if u.truncation != m.truncation:
        raise ModelValidationError(
            f"state truncation {u.truncation} != model truncation {m.truncation}")
    return SpectralState(m.t_alpha_factors(t) * u.coeffs)


def apply_state_multiplier(m: ModelSpec, i: int, u: SpectralState) -> SpectralState:
    if not (0 <= i < m.state_delay_count):
        raise DomainError(f"state channel {i} outside 0..{m.state_delay_count - 1}")
    return SpectralState(m.state_multipliers[i] * u.coeffs)


def apply_control_multiplier(m: ModelSpec, j: int, u: SpectralState) -> SpectralState:
    if not (0 <= j < m.control_delay_count):
        raise DomainError(f"control channel {j} outside 0..{m.control_delay_count - 1}")
    return SpectralState(m.control_multipliers[j] * u.coeffs)


def synthesize_physical(u: SpectralState, x_grid) -> np.ndarray:
    """Evaluate sum_n c_n sqrt(2/pi) sin(n x) on the given x points."""
    x = np.asarray(x_grid, dtype=float)
    n = np.arange(1, u.truncation + 1)
    basis = math.sqrt(2.0 / math.pi) * np.sin(np.outer(x, n))
    return basis @ u.coeffs
