"""Seeded, nested sample streams over domains.

All randomness is drawn as one sequential stream of uniforms from a
counter-based generator (Philox), one fixed-width row per sample.  The
stream position after n rows does not depend on chunking, so a run with a
larger budget reproduces the smaller run's samples as a prefix.  That
makes refinement monotone (min/max estimates only improve) and keeps every
report reproducible from its seed.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from .core import DomainSamplingFailure, DomainSpec, InvalidParameter

# Sampling window used for unbounded domains.
DEFAULT_HALFWIDTH = 3.0

_CHUNK = 4096
_MAX_CONSECUTIVE_REJECTS = 1000


class NestedSampler:
    """Sequential uniform row source with a reproducible prefix property."""

    def __init__(self, seed: int):
        self._gen = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))

    def rows(self, n: int, width: int) -> np.ndarray:
        u = self._gen.random((n, width))
        # ndtri(0) is -inf; keep uniforms strictly inside (0, 1)
        return np.clip(u, 1e-15, 1.0 - 1e-15)


def point_width(domain: DomainSpec, dim: int) -> int:
    """Uniform draws consumed per point for the given domain kind."""
    if domain.kind == "ball":
        return dim + 1
    return dim


def points_from_rows(domain: DomainSpec, dim: int, rows: np.ndarray) -> np.ndarray:
    """Map uniform rows to points in the domain's base region.

    Box and all-space map affinely; balls use a Gaussian direction (via the
    normal inverse CDF) and a volume-correct radial factor, so no draws are
    wasted on rejection.  The optional predicate is NOT applied here.
    """
    if domain.kind == "box":
        lo, hi = domain.lower, domain.upper
        return lo + rows[:, :dim] * (hi - lo)
    if domain.kind == "all_space":
        return -DEFAULT_HALFWIDTH + rows[:, :dim] * (2.0 * DEFAULT_HALFWIDTH)
    if domain.kind == "ball":
        g = ndtri(rows[:, :dim])
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        r = domain.radius * rows[:, dim:dim + 1] ** (1.0 / dim)
        return domain.center + r * (g / norms)
    raise InvalidParameter(f"unknown domain kind {domain.kind!r}")


def _predicate_mask(domain: DomainSpec, X: np.ndarray) -> np.ndarray:
    if domain.predicate is None:
        return np.ones(X.shape[0], dtype=bool)
    return np.array([bool(domain.predicate(x)) for x in X])


def sample_points(domain: DomainSpec, dim: int, n: int,
                  sampler: NestedSampler,
                  accept=None) -> np.ndarray:
    """Draw n points from the domain, rejecting on predicate and ``accept``.

    ``accept`` is an optional vectorized (n, dim) -> bool mask used e.g. for
    sublevel-set restriction.  Raises DomainSamplingFailure after 1000
    consecutive rejected candidates.
    """
    w = point_width(domain, dim)
    out = []
    got = 0
    consecutive = 0
    while got < n:
        rows = sampler.rows(min(_CHUNK, max(n - got, 64)), w)
        X = points_from_rows(domain, dim, rows)
        keep = _predicate_mask(domain, X)
        if accept is not None:
            keep = keep & np.asarray(accept(X), dtype=bool)
        consecutive = _update_rejects(keep, consecutive)
        kept = X[keep]
        if kept.shape[0]:
            out.append(kept[: n - got])
            got += min(kept.shape[0], n - got)
    return np.concatenate(out, axis=0)


def sample_pairs(domain: DomainSpec, dim: int, pairs: int, n_lambdas: int,
                 sampler: NestedSampler,
                 lam_range: tuple[float, float] = (0.0, 1.0)):
    """Draw (x, y, lambda...) triples; both points must lie in the domain.

    Returns arrays X (pairs, dim), Y (pairs, dim), LAM (pairs, n_lambdas).
    One row of the stream covers one candidate triple, so rejection keeps
    the nested-prefix property.
    """
    w = point_width(domain, dim)
    width = 2 * w + n_lambdas
    lo, span = lam_range[0], lam_range[1] - lam_range[0]
    xs, ys, ls = [], [], []
    got = 0
    consecutive = 0
    while got < pairs:
        rows = sampler.rows(min(_CHUNK, max(pairs - got, 64)), width)
        X = points_from_rows(domain, dim, rows[:, :w])
        Y = points_from_rows(domain, dim, rows[:, w:2 * w])
        LAM = lo + span * rows[:, 2 * w:]
        keep = _predicate_mask(domain, X) & _predicate_mask(domain, Y)
        consecutive = _update_rejects(keep, consecutive)
        take = min(int(np.count_nonzero(keep)), pairs - got)
        if take:
            idx = np.nonzero(keep)[0][:take]
            xs.append(X[idx])
            ys.append(Y[idx])
            ls.append(LAM[idx])
            got += take
    return (np.concatenate(xs), np.concatenate(ys),
            np.concatenate(ls) if n_lambdas else np.empty((pairs, 0)))


def _update_rejects(keep: np.ndarray, consecutive: int) -> int:
    """Track the longest run of rejected candidates across chunks."""
    if keep.all():
        return 0
    if not keep.any():
        consecutive += keep.shape[0]
    else:
        last_accept = np.nonzero(keep)[0][-1]
        consecutive = keep.shape[0] - 1 - int(last_accept)
    if consecutive >= _MAX_CONSECUTIVE_REJECTS:
        raise DomainSamplingFailure(
            f"{consecutive} consecutive candidates rejected; "
            "domain appears unreachable by the sampler")
    return consecutive
