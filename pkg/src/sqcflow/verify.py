"""Sampling-based verifiers for convexity classes and gradient monotonicity.

Each checker draws a seeded sample of points/pairs from the oracle's
domain, evaluates one inequality family, and returns a ClassReport with
explicit witnesses for every violation.  A passing report means "holds on
these samples", never "proved": the properties are universally quantified
and sampling can only refute them.

Margins follow one convention throughout: an inequality is stored as
``lhs >= rhs`` and its margin is ``lhs - rhs``; a sample is a violation
exactly when ``margin < -tol`` with the one-sided relative tolerance
``tol = 1e-9 (1 + |lhs| + |rhs|)``.  The tolerance is applied so that
roundoff can never manufacture a violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import FunctionOracle, InvalidParameter, MissingMinimizer
from .sampling import NestedSampler, sample_pairs, sample_points

INEQ_TOL_COEFF = 1e-9
MAX_WITNESSES = 25

_FIXED_LAMBDAS = np.array([0.0, 0.5, 1.0])


def ineq_tol(lhs, rhs):
    return INEQ_TOL_COEFF * (1.0 + np.abs(lhs) + np.abs(rhs))


@dataclass(frozen=True)
class SampleBudget:
    """How much to sample: pairs, interpolation points per pair, seed."""

    pairs: int = 2000
    lambdas_per_pair: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.pairs < 1 or self.lambdas_per_pair < 1:
            raise InvalidParameter("budget needs pairs >= 1 and lambdas >= 1")


@dataclass
class Witness:
    """One violated inequality instance, reproducible from scratch."""

    x: np.ndarray
    y: Optional[np.ndarray]
    lam: Optional[float]
    lhs: float
    rhs: float
    margin: float
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in np.atleast_1d(self.x)],
            "y": None if self.y is None else [float(v) for v in np.atleast_1d(self.y)],
            "lambda": None if self.lam is None else float(self.lam),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "margin": float(self.margin),
            "note": self.note,
        }


@dataclass
class ClassReport:
    """Outcome of one sampled property check."""

    property_name: str
    holds_on_samples: bool
    violations: list[Witness]
    samples_tested: int
    violations_count: int = 0
    params: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "property": self.property_name,
            "params": {k: float(v) for k, v in sorted(self.params.items())},
            "holds_on_samples": bool(self.holds_on_samples),
            "samples_tested": int(self.samples_tested),
            "violations_count": int(self.violations_count),
            "violations": [w.to_dict() for w in self.violations],
        }


def derive_pl_modulus(gamma: float, L: float) -> float:
    """PL constant implied by a strong-quasiconvexity modulus and L-smoothness."""
    if gamma <= 0 or L <= 0:
        raise InvalidParameter("need gamma > 0 and L > 0")
    return gamma * gamma / (2.0 * L)


def _build_report(name, params, margin, tol, active, witnesses_of) -> ClassReport:
    """Assemble a report from vectorized margins.

    ``witnesses_of(flat_indices)`` materializes Witness objects for the
    given flattened violation positions, in sample order.
    """
    viol = active & (margin < -tol)
    flat = np.flatnonzero(viol)
    report = ClassReport(
        property_name=name,
        holds_on_samples=flat.size == 0,
        violations=witnesses_of(flat[:MAX_WITNESSES]),
        samples_tested=int(np.count_nonzero(active)),
        violations_count=int(flat.size),
        params=params,
    )
    return report


def _interpolation_margins(oracle, gamma, X, Y, LAM, chord_upper):
    """lhs/rhs for the interpolation inequalities (quasiconvex family).

    ``chord_upper(hx, hy, lam)`` gives the upper bound before the quadratic
    penalty: max{hx, hy} for the quasiconvex family, the chord for the
    convex family.
    """
    hx, hy = np.asarray(oracle.value(X)), np.asarray(oracle.value(Y))
    d2 = np.sum((X - Y) ** 2, axis=-1)
    mid = X[:, None, :] + LAM[:, :, None] * (Y - X)[:, None, :]
    h_mid = np.asarray(oracle.value(mid))
    lhs = chord_upper(hx[:, None], hy[:, None], LAM) \
        - LAM * (1.0 - LAM) * (0.5 * gamma) * d2[:, None]
    return lhs, h_mid


def _lambda_grid(budget: SampleBudget, LAM_random: np.ndarray) -> np.ndarray:
    fixed = np.broadcast_to(_FIXED_LAMBDAS, (LAM_random.shape[0], 3))
    return np.concatenate([LAM_random, fixed], axis=1)


def _pair_witnesses(X, Y, LAM, lhs, rhs, note=""):
    def make(flat_idx):
        pairs_idx, lam_idx = np.unravel_index(flat_idx, lhs.shape)
        return [Witness(x=X[i].copy(), y=Y[i].copy(), lam=float(LAM[i, j]),
                        lhs=float(lhs[i, j]), rhs=float(rhs[i, j]),
                        margin=float(lhs[i, j] - rhs[i, j]), note=note)
                for i, j in zip(pairs_idx, lam_idx)]
    return make


def check_strong_quasiconvexity(oracle: FunctionOracle, gamma: float,
                                budget: SampleBudget) -> ClassReport:
    """h(x + lam (y-x)) <= max{h(x), h(y)} - lam(1-lam)(gamma/2)|x-y|^2.

    gamma = 0 degenerates to the plain quasiconvexity test.
    """
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    X, Y, LAM_r = sample_pairs(oracle.domain, oracle.dim, budget.pairs,
                               budget.lambdas_per_pair, NestedSampler(budget.seed))
    LAM = _lambda_grid(budget, LAM_r)
    lhs, rhs = _interpolation_margins(
        oracle, gamma, X, Y, LAM, lambda hx, hy, lam: np.maximum(hx, hy))
    margin = lhs - rhs
    name = "strong_quasiconvexity" if gamma > 0 else "quasiconvexity"
    return _build_report(name, {"gamma": gamma}, margin, ineq_tol(lhs, rhs),
                         np.ones_like(margin, dtype=bool),
                         _pair_witnesses(X, Y, LAM, lhs, rhs))


def check_convexity(oracle: FunctionOracle, gamma: float,
                    budget: SampleBudget) -> ClassReport:
    """Chord inequality with quadratic penalty: strong convexity (gamma > 0)
    or plain convexity (gamma = 0)."""
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    X, Y, LAM_r = sample_pairs(oracle.domain, oracle.dim, budget.pairs,
                               budget.lambdas_per_pair, NestedSampler(budget.seed))
    LAM = _lambda_grid(budget, LAM_r)
    lhs, rhs = _interpolation_margins(
        oracle, gamma, X, Y, LAM,
        lambda hx, hy, lam: lam * hy + (1.0 - lam) * hx)
    margin = lhs - rhs
    name = "strong_convexity" if gamma > 0 else "convexity"
    return _build_report(name, {"gamma": gamma}, margin, ineq_tol(lhs, rhs),
                         np.ones_like(margin, dtype=bool),
                         _pair_witnesses(X, Y, LAM, lhs, rhs))


def _ordered_pair_data(oracle, budget):
    """Sampled pairs with values and gradients, doubled to both orderings."""
    X, Y, _ = sample_pairs(oracle.domain, oracle.dim, budget.pairs, 1,
                           NestedSampler(budget.seed))
    A = np.concatenate([X, Y])
    B = np.concatenate([Y, X])
    hA, hB = np.asarray(oracle.value(A)), np.asarray(oracle.value(B))
    gA, gB = np.asarray(oracle.grad(A)), np.asarray(oracle.grad(B))
    return A, B, hA, hB, gA, gB


def _point_witnesses(A, B, lhs, rhs, note=""):
    def make(flat_idx):
        return [Witness(x=A[i].copy(),
                        y=None if B is None else B[i].copy(),
                        lam=None, lhs=float(lhs[i]), rhs=float(rhs[i]),
                        margin=float(lhs[i] - rhs[i]), note=note)
                for i in flat_idx]
    return make


def check_gradient_characterization(oracle: FunctionOracle, gamma: float,
                                    budget: SampleBudget) -> ClassReport:
    """h(x) <= h(y) implies <grad h(y), x - y> <= -(gamma/2)|y - x|^2.

    Equivalent to strong quasiconvexity with the same modulus for
    differentiable h on a convex set; gamma = 0 is the classical
    quasiconvexity characterization.  The witness stores the sublevel
    point in ``x`` and the point where the gradient was taken in ``y``.
    """
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    A, B, hA, hB, gA, gB = _ordered_pair_data(oracle, budget)
    # direction: gradient at B, premise h(A) <= h(B)
    active = hA <= hB
    d2 = np.sum((A - B) ** 2, axis=-1)
    rhs = np.sum(gB * (A - B), axis=-1)
    lhs = -(0.5 * gamma) * d2
    margin = lhs - rhs
    return _build_report("gradient_characterization", {"gamma": gamma},
                         margin, ineq_tol(lhs, rhs), active,
                         _point_witnesses(A, B, lhs, rhs))


def check_offset_monotonicity(oracle: FunctionOracle, gamma: float,
                              budget: SampleBudget) -> ClassReport:
    """Monotonicity with both sides offset by the half-gamma quadratic.

    Strict form:   <g(x), y-x> >  -(gamma/2)|y-x|^2  implies
                   <g(y), x-y> <= -(gamma/2)|y-x|^2.
    Both the strict-premise form and the non-strict variant (premise with
    >=) are evaluated; witnesses are tagged "strict" / "non_strict".
    The strict premise is applied with a +tol guard so that near-equality
    cases are routed to the non-strict variant only.  gamma = 0 reduces to
    quasimonotonicity of the gradient.
    """
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    A, B, hA, hB, gA, gB = _ordered_pair_data(oracle, budget)
    d2 = np.sum((A - B) ** 2, axis=-1)
    pen = -(0.5 * gamma) * d2
    p = np.sum(gA * (B - A), axis=-1)
    q = np.sum(gB * (A - B), axis=-1)
    tol_p = ineq_tol(p, pen)
    lhs, rhs = pen, q
    margin = lhs - rhs
    tol_c = ineq_tol(lhs, rhs)

    strict = p > pen + tol_p
    non_strict = p >= pen - tol_p
    rep_strict = _build_report("offset_monotonicity", {"gamma": gamma},
                               margin, tol_c, strict,
                               _point_witnesses(A, B, lhs, rhs, note="strict"))
    rep_ns = _build_report("offset_monotonicity", {"gamma": gamma},
                           margin, tol_c, non_strict,
                           _point_witnesses(A, B, lhs, rhs, note="non_strict"))
    return ClassReport(
        property_name="offset_monotonicity",
        holds_on_samples=rep_strict.holds_on_samples and rep_ns.holds_on_samples,
        violations=(rep_strict.violations + rep_ns.violations)[:MAX_WITNESSES],
        samples_tested=rep_strict.samples_tested + rep_ns.samples_tested,
        violations_count=rep_strict.violations_count + rep_ns.violations_count,
        params={"gamma": gamma},
    )


def check_strong_pseudomonotonicity(oracle: FunctionOracle, gamma_half: float,
                                    budget: SampleBudget) -> ClassReport:
    """<g(y), x-y> >= 0 implies <g(x), y-x> <= -gamma_half |y-x|^2."""
    if gamma_half < 0:
        raise InvalidParameter("modulus must be nonnegative")
    A, B, hA, hB, gA, gB = _ordered_pair_data(oracle, budget)
    d2 = np.sum((A - B) ** 2, axis=-1)
    prem = np.sum(gB * (A - B), axis=-1)
    active = prem >= -ineq_tol(prem, 0.0)
    rhs = np.sum(gA * (B - A), axis=-1)
    lhs = -gamma_half * d2
    margin = lhs - rhs
    return _build_report("strong_pseudomonotonicity", {"gamma_half": gamma_half},
                         margin, ineq_tol(lhs, rhs), active,
                         _point_witnesses(A, B, lhs, rhs))


def check_strong_quasimonotonicity(oracle: FunctionOracle, gamma: float,
                                   budget: SampleBudget) -> ClassReport:
    """<g(y), x-y> > 0 implies <g(x), y-x> <= -gamma |y-x|^2.

    gamma = 0 is plain quasimonotonicity of the gradient.  The strict
    premise carries a +tol guard so roundoff cannot activate it.
    """
    if gamma < 0:
        raise InvalidParameter("modulus must be nonnegative")
    A, B, hA, hB, gA, gB = _ordered_pair_data(oracle, budget)
    d2 = np.sum((A - B) ** 2, axis=-1)
    prem = np.sum(gB * (A - B), axis=-1)
    active = prem > ineq_tol(prem, 0.0)
    rhs = np.sum(gA * (B - A), axis=-1)
    lhs = -gamma * d2
    margin = lhs - rhs
    name = "strong_quasimonotonicity" if gamma > 0 else "quasimonotonicity"
    return _build_report(name, {"gamma": gamma}, margin, ineq_tol(lhs, rhs),
                         active, _point_witnesses(A, B, lhs, rhs))


def check_monotone_operator(oracle: FunctionOracle, gamma: float,
                            budget: SampleBudget) -> ClassReport:
    """<g(y) - g(x), y - x> >= gamma |y - x|^2 (monotone when gamma = 0)."""
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    X, Y, _ = sample_pairs(oracle.domain, oracle.dim, budget.pairs, 1,
                           NestedSampler(budget.seed))
    gX, gY = np.asarray(oracle.grad(X)), np.asarray(oracle.grad(Y))
    d2 = np.sum((X - Y) ** 2, axis=-1)
    lhs = np.sum((gY - gX) * (Y - X), axis=-1)
    rhs = gamma * d2
    margin = lhs - rhs
    name = "strong_monotonicity" if gamma > 0 else "monotonicity"
    return _build_report(name, {"gamma": gamma}, margin, ineq_tol(lhs, rhs),
                         np.ones_like(margin, dtype=bool),
                         _point_witnesses(X, Y, lhs, rhs))


def check_pl(oracle: FunctionOracle, mu: float,
             budget: SampleBudget) -> ClassReport:
    """|grad h(x)|^2 >= mu (h(x) - h(x_bar)) on sampled points."""
    if mu <= 0:
        raise InvalidParameter("mu must be positive")
    if oracle.known_minimizer is None:
        raise MissingMinimizer("check_pl needs a known minimizer")
    h_star = oracle.minimum_value()
    X = sample_points(oracle.domain, oracle.dim, budget.pairs,
                      NestedSampler(budget.seed))
    g = np.asarray(oracle.grad(X))
    lhs = np.sum(g * g, axis=-1)
    rhs = mu * (np.asarray(oracle.value(X)) - h_star)
    margin = lhs - rhs
    return _build_report("pl", {"mu": mu}, margin, ineq_tol(lhs, rhs),
                         np.ones_like(margin, dtype=bool),
                         _point_witnesses(X, None, lhs, rhs))


def check_quasi_strong_convexity(oracle: FunctionOracle, mu: float,
                                 budget: SampleBudget) -> ClassReport:
    """<grad h(x), x - x_bar> >= h(x) - h(x_bar) + (mu/2)|x - x_bar|^2."""
    if mu <= 0:
        raise InvalidParameter("mu must be positive")
    if oracle.known_minimizer is None:
        raise MissingMinimizer("check_quasi_strong_convexity needs a minimizer")
    x_bar = oracle.known_minimizer
    h_star = oracle.minimum_value()
    X = sample_points(oracle.domain, oracle.dim, budget.pairs,
                      NestedSampler(budget.seed))
    g = np.asarray(oracle.grad(X))
    diff = X - x_bar
    lhs = np.sum(g * diff, axis=-1)
    rhs = np.asarray(oracle.value(X)) - h_star \
        + (0.5 * mu) * np.sum(diff * diff, axis=-1)
    margin = lhs - rhs
    return _build_report("quasi_strong_convexity", {"mu": mu}, margin,
                         ineq_tol(lhs, rhs), np.ones_like(margin, dtype=bool),
                         _point_witnesses(X, None, lhs, rhs))


def check_sharp_quasiconvexity(oracle: FunctionOracle, gamma: float,
                               budget: SampleBudget) -> ClassReport:
    """Strong-quasiconvexity inequality required only under the premise
    <grad h(y), x - y> >= 0."""
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    X, Y, LAM_r = sample_pairs(oracle.domain, oracle.dim, budget.pairs,
                               budget.lambdas_per_pair, NestedSampler(budget.seed))
    A = np.concatenate([X, Y])
    B = np.concatenate([Y, X])
    LAM = _lambda_grid(budget, np.concatenate([LAM_r, LAM_r]))
    gB = np.asarray(oracle.grad(B))
    prem = np.sum(gB * (A - B), axis=-1)
    active_pair = prem >= -ineq_tol(prem, 0.0)
    lhs, rhs = _interpolation_margins(
        oracle, gamma, A, B, LAM, lambda ha, hb, lam: np.maximum(ha, hb))
    margin = lhs - rhs
    active = np.broadcast_to(active_pair[:, None], margin.shape)
    return _build_report("sharp_quasiconvexity", {"gamma": gamma}, margin,
                         ineq_tol(lhs, rhs), active,
                         _pair_witnesses(A, B, LAM, lhs, rhs))


# Forward implications asserted on samples: (upper property, lower property).
# If the upper one holds on the sampled set, the lower one must as well.
LADDER_EDGES = [
    ("strong_convexity", "convexity"),
    ("strong_convexity", "strong_quasiconvexity"),
    ("strong_convexity", "strong_monotonicity"),
    ("strong_quasiconvexity", "quasiconvexity"),
    ("strong_quasiconvexity", "gradient_characterization"),
    ("strong_quasiconvexity", "sharp_quasiconvexity"),
    ("strong_quasiconvexity", "offset_monotonicity"),
    ("strong_monotonicity", "monotonicity"),
    ("strong_monotonicity", "offset_monotonicity"),
    ("offset_monotonicity", "strong_pseudomonotonicity"),
    ("strong_pseudomonotonicity", "strong_quasimonotonicity"),
    ("strong_quasiconvexity", "pl"),
]


def check_implication_ladder(oracle: FunctionOracle, gamma: float,
                             budget: SampleBudget) -> list[ClassReport]:
    """Run the full battery of class checks at one modulus.

    Returns reports for the value inequalities (convexity family) and the
    gradient inequalities (monotonicity family), all at the given gamma
    (the pseudomonotonicity check runs at gamma/2, the PL check at
    gamma^2 / 2L when the oracle knows L and a minimizer).
    """
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    reports = []
    if gamma > 0:
        reports.append(check_convexity(oracle, gamma, budget))
    reports.append(check_convexity(oracle, 0.0, budget))
    if gamma > 0:
        reports.append(check_strong_quasiconvexity(oracle, gamma, budget))
    reports.append(check_strong_quasiconvexity(oracle, 0.0, budget))
    reports.append(check_gradient_characterization(oracle, gamma, budget))
    reports.append(check_sharp_quasiconvexity(oracle, gamma, budget))
    if gamma > 0:
        reports.append(check_monotone_operator(oracle, gamma, budget))
    reports.append(check_monotone_operator(oracle, 0.0, budget))
    reports.append(check_offset_monotonicity(oracle, gamma, budget))
    reports.append(check_strong_pseudomonotonicity(oracle, 0.5 * gamma, budget))
    if gamma > 0:
        reports.append(check_strong_quasimonotonicity(oracle, 0.5 * gamma, budget))
    reports.append(check_strong_quasimonotonicity(oracle, 0.0, budget))
    if (gamma > 0 and oracle.known_lipschitz is not None
            and oracle.known_minimizer is not None):
        mu = derive_pl_modulus(gamma, oracle.known_lipschitz)
        reports.append(check_pl(oracle, mu, budget))
    return reports


def ladder_soundness(reports: list[ClassReport]) -> list[str]:
    """Names of forward implications violated by the sampled reports."""
    by_name = {}
    for r in reports:
        by_name.setdefault(r.property_name, r)
    broken = []
    for upper, lower in LADDER_EDGES:
        if upper in by_name and lower in by_name:
            if by_name[upper].holds_on_samples and not by_name[lower].holds_on_samples:
                broken.append(f"{upper} holds but {lower} fails")
    return broken


def witness_margin(oracle: FunctionOracle, report: ClassReport,
                   witness: Witness) -> tuple[float, float]:
    """Recompute (margin, tol) for a stored witness from scratch.

    Used to confirm that every reported violation reproduces
    margin < -tol independently of the bulk evaluation.
    """
    name, params = report.property_name, report.params
    x = np.asarray(witness.x, dtype=np.float64)
    y = None if witness.y is None else np.asarray(witness.y, dtype=np.float64)
    gamma = params.get("gamma", params.get("gamma_half", params.get("mu", 0.0)))

    if name in ("strong_quasiconvexity", "quasiconvexity", "sharp_quasiconvexity",
                "strong_convexity", "convexity"):
        lam = witness.lam
        mid = x + lam * (y - x)
        d2 = float(np.sum((x - y) ** 2))
        h_mid = float(oracle.value(mid))
        hx, hy = float(oracle.value(x)), float(oracle.value(y))
        if name in ("strong_convexity", "convexity"):
            upper = lam * hy + (1.0 - lam) * hx
        else:
            upper = max(hx, hy)
        lhs = upper - lam * (1.0 - lam) * 0.5 * gamma * d2
        rhs = h_mid
    elif name == "gradient_characterization":
        d2 = float(np.sum((x - y) ** 2))
        lhs = -0.5 * gamma * d2
        rhs = float(np.sum(np.asarray(oracle.grad(y)) * (x - y)))
    elif name == "offset_monotonicity":
        d2 = float(np.sum((x - y) ** 2))
        lhs = -0.5 * gamma * d2
        rhs = float(np.sum(np.asarray(oracle.grad(y)) * (x - y)))
    elif name == "strong_pseudomonotonicity":
        d2 = float(np.sum((x - y) ** 2))
        lhs = -params["gamma_half"] * d2
        rhs = float(np.sum(np.asarray(oracle.grad(x)) * (y - x)))
    elif name in ("strong_quasimonotonicity", "quasimonotonicity"):
        d2 = float(np.sum((x - y) ** 2))
        lhs = -gamma * d2
        rhs = float(np.sum(np.asarray(oracle.grad(x)) * (y - x)))
    elif name in ("monotonicity", "strong_monotonicity"):
        d2 = float(np.sum((x - y) ** 2))
        gx, gy = np.asarray(oracle.grad(x)), np.asarray(oracle.grad(y))
        lhs = float(np.sum((gy - gx) * (y - x)))
        rhs = gamma * d2
    elif name == "pl":
        g = np.asarray(oracle.grad(x))
        lhs = float(np.sum(g * g))
        rhs = params["mu"] * (float(oracle.value(x)) - oracle.minimum_value())
    elif name == "quasi_strong_convexity":
        x_bar = oracle.known_minimizer
        diff = x - x_bar
        lhs = float(np.sum(np.asarray(oracle.grad(x)) * diff))
        rhs = (float(oracle.value(x)) - oracle.minimum_value()
               + 0.5 * params["mu"] * float(np.sum(diff * diff)))
    else:
        raise InvalidParameter(f"unknown property {name!r}")
    return lhs - rhs, float(ineq_tol(lhs, rhs))
