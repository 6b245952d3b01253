"""Shared data model: oracles, domains, trajectories, and rate certificates.

Vectors are plain ``numpy.float64`` arrays.  Oracles evaluate a scalar
objective h and its gradient; both callables must broadcast over leading
axes, i.e. accept ``(..., dim)`` input and return ``(...)`` / ``(..., dim)``.
Everything here is immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]

# Multiplicative slack applied when comparing empirical against theoretical
# rates: the theoretical numbers are bounds, and an empirical rate may sit
# exactly at the bound under roundoff.
RATE_SLACK = 0.05


class SqcflowError(Exception):
    """Base class for all toolkit errors."""


class DomainViolation(SqcflowError):
    """A point (or a perturbation of one) left the oracle's domain."""


class InvalidParameter(SqcflowError):
    """A constructor or operation received an out-of-range parameter."""


class NonPositiveSequence(SqcflowError):
    """Rate fitting needs strictly positive values; shift by h* first."""


class DomainSamplingFailure(SqcflowError):
    """Rejection sampling could not hit the domain (1000 consecutive misses)."""


class MissingMinimizer(SqcflowError):
    """The operation needs a known minimizer on the oracle."""


class ParameterWindowViolation(SqcflowError):
    """Step-size / momentum parameters fall outside the certified window."""


class InsufficientSamples(SqcflowError):
    """Too few valid samples survived filtering to form an estimate."""


class StagnationFailure(SqcflowError):
    """The reference-minimizer search stopped making progress."""


class NumericalBlowup(SqcflowError):
    """An iteration or flow produced a non-finite state."""

    def __init__(self, where: float, message: str = ""):
        self.where = where
        super().__init__(message or f"non-finite state at {where!r}")


class DomainExit(SqcflowError):
    """An iteration or flow left the oracle's domain."""

    def __init__(self, where: float, message: str = ""):
        self.where = where
        super().__init__(message or f"state left the domain at {where!r}")


class UnverifiedPremiseWarning(UserWarning):
    """A constructor's sign premise could not be confirmed by sampling."""


def as_point(x, dim: Optional[int] = None) -> Vector:
    """Validate and convert to a finite float64 vector."""
    p = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if p.ndim != 1:
        raise InvalidParameter(f"point must be one-dimensional, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidParameter("point has non-finite entries")
    if dim is not None and p.shape[0] != dim:
        raise InvalidParameter(f"expected dimension {dim}, got {p.shape[0]}")
    return p


def grad_zero_tol(x_bar: Vector) -> float:
    """Tolerance for treating a gradient as zero at a claimed minimizer."""
    return 1e-8 * (1.0 + float(np.linalg.norm(x_bar)))


@dataclass(frozen=True)
class DomainSpec:
    """Convex domain: all of R^n, a closed ball, or an axis-aligned box.

    An optional ``predicate`` restricts membership further (used for
    domains given implicitly through inequalities); the base kind then
    acts as the bounding region for samplers.
    """

    kind: str  # "all_space" | "ball" | "box"
    center: Optional[Vector] = None
    radius: Optional[float] = None
    lower: Optional[Vector] = None
    upper: Optional[Vector] = None
    predicate: Optional[Callable[[Vector], bool]] = None

    @staticmethod
    def all_space(predicate=None) -> "DomainSpec":
        return DomainSpec(kind="all_space", predicate=predicate)

    @staticmethod
    def ball(center, radius: float, predicate=None) -> "DomainSpec":
        if radius <= 0:
            raise InvalidParameter("ball radius must be strictly positive")
        return DomainSpec(kind="ball", center=as_point(center),
                          radius=float(radius), predicate=predicate)

    @staticmethod
    def box(lower, upper, predicate=None) -> "DomainSpec":
        lo, hi = as_point(lower), as_point(upper)
        if lo.shape != hi.shape or np.any(lo > hi):
            raise InvalidParameter("box needs lower <= upper componentwise")
        return DomainSpec(kind="box", lower=lo, upper=hi, predicate=predicate)

    def contains(self, x: Vector) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "ball":
            ok = float(np.linalg.norm(x - self.center)) <= self.radius * (1 + 1e-12)
        elif self.kind == "box":
            ok = bool(np.all(x >= self.lower) and np.all(x <= self.upper))
        else:
            ok = True
        if ok and self.predicate is not None:
            ok = bool(self.predicate(x))
        return ok

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (n, dim) array of points."""
        X = np.asarray(X, dtype=np.float64)
        if self.kind == "ball":
            ok = np.linalg.norm(X - self.center, axis=-1) <= self.radius * (1 + 1e-12)
        elif self.kind == "box":
            ok = np.all(X >= self.lower, axis=-1) & np.all(X <= self.upper, axis=-1)
        else:
            ok = np.ones(X.shape[0], dtype=bool)
        if self.predicate is not None:
            pred = np.array([bool(self.predicate(x)) for x in X])
            ok = ok & pred
        return ok


@dataclass(frozen=True)
class FunctionOracle:
    """Evaluates h(x) and its gradient, plus whatever constants are known.

    ``value`` and ``grad`` must be deterministic and broadcast over leading
    axes.  ``known_modulus`` is a strong-quasiconvexity modulus valid on
    ``domain``; ``known_lipschitz`` a gradient Lipschitz constant there.
    """

    dim: int
    value: Callable[[Vector], float]
    grad: Callable[[Vector], Vector]
    known_modulus: Optional[float] = None
    known_lipschitz: Optional[float] = None
    known_minimizer: Optional[Vector] = None
    domain: DomainSpec = field(default_factory=DomainSpec.all_space)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameter("oracle dimension must be >= 1")
        if self.known_modulus is not None and self.known_modulus <= 0:
            raise InvalidParameter("known modulus must be positive")
        if self.known_lipschitz is not None and self.known_lipschitz <= 0:
            raise InvalidParameter("known Lipschitz constant must be positive")
        if self.known_minimizer is not None:
            object.__setattr__(self, "known_minimizer",
                               as_point(self.known_minimizer, self.dim))

    def minimum_value(self) -> float:
        if self.known_minimizer is None:
            raise MissingMinimizer("oracle has no known minimizer")
        return float(self.value(self.known_minimizer))


@dataclass
class Trajectory:
    """Time- or iteration-indexed states with per-sample diagnostics.

    ``times`` is strictly increasing (continuous time for flows, the
    iteration counter for solvers).  ``diagnostics`` maps a name to an
    array aligned with ``times``; entries may be NaN where undefined.
    """

    times: np.ndarray
    states: np.ndarray
    h_values: np.ndarray
    grad_norms: np.ndarray
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.states = np.asarray(self.states, dtype=np.float64)
        if np.any(np.diff(self.times) <= 0):
            raise InvalidParameter("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def final_state(self) -> Vector:
        return self.states[-1]

    def diagnostic(self, name: str) -> np.ndarray:
        if name not in self.diagnostics:
            raise KeyError(f"trajectory has no diagnostic {name!r}")
        return self.diagnostics[name]


@dataclass
class RateCertificate:
    """Closed-form convergence constants next to the observed rate.

    ``theoretical_rate`` is a per-step contraction factor in ]0,1[ for the
    discrete kinds and a positive decay exponent for the flow kinds.
    ``satisfied`` means the per-sample envelope held everywhere and the
    empirical rate does not beat the bound the wrong way by more than
    RATE_SLACK.
    """

    kind: str  # gd_contraction | gd_value | hb_energy | flow_first | flow_second
    constants: dict[str, float]
    theoretical_rate: float
    empirical_rate: float
    satisfied: bool
    first_violation: Optional[float] = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "constants": {k: float(v) for k, v in sorted(self.constants.items())},
            "theoretical_rate": float(self.theoretical_rate),
            "empirical_rate": float(self.empirical_rate),
            "satisfied": bool(self.satisfied),
            "first_violation": None if self.first_violation is None
            else float(self.first_violation),
            "notes": self.notes,
        }


def finite_difference_gradient(oracle: FunctionOracle, x, step: float = 1e-6) -> Vector:
    """Central-difference gradient, used to validate oracle gradients.

    Componentwise (h(x + step e_i) - h(x - step e_i)) / (2 step).  Raises
    DomainViolation if a perturbed point leaves the oracle's domain.
    """
    if step <= 0:
        raise InvalidParameter("finite-difference step must be positive")
    x = as_point(x, oracle.dim)
    out = np.empty(oracle.dim)
    for i in range(oracle.dim):
        e = np.zeros(oracle.dim)
        e[i] = step
        xp, xm = x + e, x - e
        if not (oracle.domain.contains(xp) and oracle.domain.contains(xm)):
            raise DomainViolation(
                f"perturbation along coordinate {i} leaves the domain")
        out[i] = (float(oracle.value(xp)) - float(oracle.value(xm))) / (2.0 * step)
    return out


def fit_linear_rate(values) -> float:
    """Per-step geometric factor fitted to a positive sequence.

    Least-squares slope of log(values[k]) against k, exponentiated.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 3:
        raise InvalidParameter("need at least 3 values to fit a rate")
    if np.any(v <= 0):
        raise NonPositiveSequence("values must be strictly positive")
    k = np.arange(v.shape[0], dtype=np.float64)
    slope = np.polyfit(k, np.log(v), 1)[0]
    return float(np.exp(slope))


def fit_decay_exponent(times, values) -> float:
    """Continuous-time analogue of fit_linear_rate.

    Returns the positive exponent c of the best-fitting values ~ exp(-c t).
    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if t.shape != v.shape or t.shape[0] < 3:
        raise InvalidParameter("need at least 3 aligned samples to fit an exponent")
    if np.any(v <= 0):
        raise NonPositiveSequence("values must be strictly positive")
    slope = np.polyfit(t, np.log(v), 1)[0]
    return float(-slope)
