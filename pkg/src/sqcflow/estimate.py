"""Empirical estimation of the constants the theory takes as given.

Sampled extrema are biased optimistically, so every estimator applies a
one-sided safety factor before the value feeds a certificate: Lipschitz
constants are inflated by 1.1, moduli and curvature ratios deflated by
0.95.  Streams are nested (same seed, prefix property), so doubling the
sample count can only tighten an estimate in the safe direction.
"""

from __future__ import annotations

import numpy as np

from .core import (DomainSamplingFailure, FunctionOracle, InsufficientSamples,
                   InvalidParameter, StagnationFailure, as_point)
from .core import DomainSpec
from .sampling import NestedSampler, sample_pairs, sample_points

SAFETY_LIPSCHITZ = 1.1
SAFETY_MODULUS = 0.95
SAFETY_KAPPA = 0.95

# Interpolation weights below carry no information about the modulus at the
# interval ends, and the ratio denominator blows up there.
_LAMBDA_RANGE = (0.05, 0.95)

_PAIR_CHUNK = 512


def _sublevel_region(oracle: FunctionOracle, x0, level: float) -> DomainSpec:
    """Axis-aligned box guaranteed to meet the sublevel set.

    Bounded oracle domains are used directly.  Otherwise the box is grown
    by doubling along each axis from the best-known center until the value
    exceeds the level; unbounded growth means the sublevel set is not
    compact and sampling it is hopeless.
    """
    dom = oracle.domain
    if dom.kind != "all_space":
        return dom
    center = oracle.known_minimizer if oracle.known_minimizer is not None else x0
    halfwidth = np.empty(oracle.dim)
    for i in range(oracle.dim):
        t = 1.0
        e = np.zeros(oracle.dim)
        e[i] = 1.0
        for _ in range(60):
            if (oracle.value(center + t * e) > level + 1e-12
                    and oracle.value(center - t * e) > level + 1e-12):
                break
            t *= 2.0
        else:
            raise DomainSamplingFailure(
                f"sublevel set appears unbounded along coordinate {i}")
        halfwidth[i] = t
    return DomainSpec.box(center - halfwidth, center + halfwidth,
                          predicate=dom.predicate)


def estimate_lipschitz_sublevel(oracle: FunctionOracle, x0,
                                samples: int = 2000, seed: int = 0) -> float:
    """Gradient Lipschitz constant on the sublevel set of h(x0), inflated by 1.1.

    Takes the largest difference quotient |g(x)-g(y)| / |x-y| over all
    pairs of sampled sublevel points (x0 included).
    """
    if samples < 2:
        raise InvalidParameter("need at least 2 samples")
    x0 = as_point(x0, oracle.dim)
    level = float(oracle.value(x0))
    region = _sublevel_region(oracle, x0, level)
    pts = sample_points(region, oracle.dim, samples, NestedSampler(seed),
                        accept=lambda X: np.asarray(oracle.value(X)) <= level)
    pts = np.concatenate([x0[None, :], pts])
    grads = np.asarray(oracle.grad(pts))

    best = 0.0
    for i in range(1, pts.shape[0], _PAIR_CHUNK):
        block = slice(i, min(i + _PAIR_CHUNK, pts.shape[0]))
        dx = pts[block, None, :] - pts[None, :block.start, :]
        dg = grads[block, None, :] - grads[None, :block.start, :]
        dist = np.linalg.norm(dx, axis=-1)
        ratio = np.linalg.norm(dg, axis=-1) / np.where(dist < 1e-12, np.inf, dist)
        inner = _pairs_within(pts[block], grads[block])
        best = max(best, float(ratio.max()), inner)
    return best * SAFETY_LIPSCHITZ


def _pairs_within(pts, grads) -> float:
    if pts.shape[0] < 2:
        return 0.0
    dx = pts[:, None, :] - pts[None, :, :]
    dg = grads[:, None, :] - grads[None, :, :]
    dist = np.linalg.norm(dx, axis=-1)
    ratio = np.linalg.norm(dg, axis=-1) / np.where(dist < 1e-12, np.inf, dist)
    return float(ratio.max())


def empirical_modulus(oracle: FunctionOracle, region: DomainSpec | None = None,
                      samples: int = 20000, seed: int = 0) -> float:
    """Largest gamma compatible with the sampled interpolation inequalities.

    For each sampled (x, y, lam) with x != y the inequality is tight at

        gamma(x, y, lam) = 2 (max{h(x), h(y)} - h(x + lam (y-x)))
                           / (lam (1-lam) |x-y|^2),

    and the estimate is the minimum over the sample, clamped at zero.  The
    estimate can only overestimate the true modulus; multiply by 0.95
    (SAFETY_MODULUS) before certification use.
    """
    region = region if region is not None else oracle.domain
    X, Y, LAM = sample_pairs(region, oracle.dim, samples, 1,
                             NestedSampler(seed), lam_range=_LAMBDA_RANGE)
    lam = LAM[:, 0]
    d2 = np.sum((X - Y) ** 2, axis=-1)
    valid = d2 >= 1e-12
    if np.count_nonzero(valid) < 10:
        raise InsufficientSamples("fewer than 10 distinct sampled pairs")
    hx, hy = np.asarray(oracle.value(X)), np.asarray(oracle.value(Y))
    mid = X + lam[:, None] * (Y - X)
    h_mid = np.asarray(oracle.value(mid))
    ratio = 2.0 * (np.maximum(hx, hy) - h_mid) / (lam * (1.0 - lam) * d2)
    return max(float(ratio[valid].min()), 0.0)


def estimate_kappa(oracle: FunctionOracle, traj, x_bar) -> float:
    """Smallest sampled ratio <grad h(x), x - x_bar> / (h(x) - h(x_bar)).

    Evaluated along a trajectory, times the 0.95 safety factor.  Samples
    closer than 1e-12 to the optimal value are skipped.
    """
    x_bar = as_point(x_bar, oracle.dim)
    h_star = float(oracle.value(x_bar))
    gaps = traj.h_values - h_star
    valid = gaps > 1e-12
    if not np.any(valid):
        raise InsufficientSamples("no trajectory samples above the optimal value")
    X = traj.states[valid]
    grads = np.asarray(oracle.grad(X))
    inner = np.sum(grads * (X - x_bar), axis=-1)
    return float((inner / gaps[valid]).min()) * SAFETY_KAPPA


def reference_minimizer(oracle: FunctionOracle, x0,
                        grad_tol: float = 1e-12,
                        max_iters: int = 1_000_000) -> np.ndarray:
    """Long conservative gradient run used when no minimizer is known.

    Step 1/(2 L-hat) with L-hat estimated on the initial sublevel set;
    returns the best iterate found.  Raises StagnationFailure if the best
    value stops improving for 10^4 consecutive iterations.
    """
    x = as_point(x0, oracle.dim)
    L_hat = estimate_lipschitz_sublevel(oracle, x, samples=512, seed=0)
    beta = 0.5 / L_hat
    best_x, best_h = x.copy(), float(oracle.value(x))
    ref_h = best_h  # value at the last decrease visible above roundoff
    since_improvement = 0
    for _ in range(max_iters):
        g = np.asarray(oracle.grad(x))
        if float(np.linalg.norm(g)) <= grad_tol:
            break
        x = x - beta * g
        h = float(oracle.value(x))
        if h < best_h:
            best_x, best_h = x.copy(), h
        if h < ref_h - 1e-15 * (1.0 + abs(ref_h)):
            ref_h = h
            since_improvement = 0
        else:
            since_improvement += 1
            if since_improvement >= 10_000:
                raise StagnationFailure(
                    "no decrease over 10000 consecutive iterations")
    return best_x
