"""End-to-end coverage experiments on mixtures with analytically known error.

A two-class Gaussian mixture plus a fixed threshold or linear rule gives a
model whose expected 0-1 loss is available in closed form through the normal
CDF, so repeated draws can measure how often the certified bound really
dominates the truth.  Interval partitions of the line are provided next to
k-means because their true cell masses integrate exactly, which feeds the
known-masses certificate.

The classifier is fixed before each trial's sample is drawn, matching the
setting of the guarantee; an optional trained-threshold mode refits the rule
on the sample to probe the data-dependent case and is experimental.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .augment import certify_aug, gaussian_transform
from .bounds import (
    BoundParams,
    CellCounts,
    GeneralParams,
    SampleTable,
    certify,
    certify_general,
)
from .errors import InvalidInputError, ParameterError
from .partition import Assignment, FeatureTable, assign, counts, fit
from .rng import derive_seed, philox_gen


def _phi(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


@dataclass(frozen=True)
class MixtureSpec:
    """Two-class Gaussian mixture with a linear decision rule.

    Class y has an isotropic Gaussian with mean ``means[y]`` and standard
    deviation ``stds[y]`` (0 gives a point mass, for separable fixtures).
    The rule predicts class 1 iff ``weights . x > bias``; the loss is 0-1.
    """

    means: tuple[tuple[float, ...], tuple[float, ...]]
    stds: tuple[float, float]
    priors: tuple[float, float]
    weights: tuple[float, ...]
    bias: float

    def __post_init__(self):
        m0, m1 = (tuple(float(v) for v in m) for m in self.means)
        if len(m0) != len(m1) or not m0:
            raise InvalidInputError("class means must share a dimension d >= 1")
        if len(self.weights) != len(m0):
            raise InvalidInputError("rule weights must match the feature dimension")
        if any(s < 0 for s in self.stds):
            raise ParameterError("stds must be nonnegative")
        if any(p <= 0 for p in self.priors) or abs(math.fsum(self.priors) - 1.0) > 1e-12:
            raise ParameterError("priors must be positive and sum to 1")
        if all(w == 0.0 for w in self.weights):
            raise ParameterError("rule weights must not all vanish")
        object.__setattr__(self, "means", (m0, m1))
        object.__setattr__(self, "stds", tuple(float(s) for s in self.stds))
        object.__setattr__(self, "priors", tuple(float(p) for p in self.priors))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @property
    def dim(self) -> int:
        return len(self.means[0])


def threshold_spec(
    mu0: float,
    mu1: float,
    s0: float = 1.0,
    s1: float = 1.0,
    prior0: float = 0.5,
    threshold: float = 0.0,
) -> MixtureSpec:
    """1-D mixture with the rule `predict 1 iff x > threshold`."""
    return MixtureSpec(
        means=((mu0,), (mu1,)),
        stds=(s0, s1),
        priors=(prior0, 1.0 - prior0),
        weights=(1.0,),
        bias=threshold,
    )


def true_error(spec: MixtureSpec) -> float:
    """Expected 0-1 loss of the rule, via the normal CDF."""
    w = np.asarray(spec.weights)
    wnorm = float(np.sqrt(np.dot(w, w)))
    errs = []
    for y in (0, 1):
        proj_mean = float(np.dot(w, spec.means[y])) - spec.bias
        scale = spec.stds[y] * wnorm
        if scale == 0.0:
            p_one = 1.0 if proj_mean > 0.0 else 0.0
        else:
            p_one = 1.0 - _phi(-proj_mean / scale)
        errs.append(p_one if y == 0 else 1.0 - p_one)
    return spec.priors[0] * errs[0] + spec.priors[1] * errs[1]


def rule_losses(spec: MixtureSpec, x: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """0-1 losses of the spec's rule on features x with the given labels."""
    w = np.asarray(spec.weights)
    predicted = (x @ w - spec.bias) > 0.0
    return (predicted != labels.astype(bool)).astype(np.float64)


def true_error_mc(spec: MixtureSpec, n: int = 10**6, seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo estimate of the expected loss with its standard error."""
    d = draw(spec, n, seed)
    est = float(d.losses.mean())
    return est, math.sqrt(max(est * (1.0 - est), 1.0 / n) / n)


@dataclass(frozen=True)
class SyntheticDraw:
    features: FeatureTable
    labels: np.ndarray
    losses: np.ndarray


def draw(spec: MixtureSpec, n: int, seed: int) -> SyntheticDraw:
    """Sample n labeled points and their losses under the spec's rule."""
    gen = philox_gen("mixture-draw", seed)
    labels = (gen.random(n) < spec.priors[1]).astype(np.int64)
    x = gen.standard_normal((n, spec.dim))
    stds = np.asarray(spec.stds)[labels][:, np.newaxis]
    means = np.asarray(spec.means)[labels]
    x = means + stds * x
    ids = tuple(f"s{i:06d}" for i in range(n))
    return SyntheticDraw(
        features=FeatureTable(ids=ids, vectors=x),
        labels=labels,
        losses=rule_losses(spec, x, labels),
    )


def fit_threshold(x: np.ndarray, labels: np.ndarray) -> float:
    """Training-error-minimizing threshold for `predict 1 iff x > t` (1-D)."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], labels[order]
    # errors(t) for t below all points, then after each point
    wrong_right_ones = np.concatenate(([0], np.cumsum(ys == 1)))  # ones not predicted 1
    wrong_left_zeros = (ys == 0).sum() - np.concatenate(([0], np.cumsum(ys == 0)))
    errors = wrong_right_ones + wrong_left_zeros
    best = int(np.argmin(errors))
    if best == 0:
        return float(xs[0] - 1.0)
    if best == len(xs):
        return float(xs[-1] + 1.0)
    return float(0.5 * (xs[best - 1] + xs[best]))


@dataclass(frozen=True)
class IntervalPartition:
    """K cells of the line: (-inf, e_1], (e_1, e_2], ..., (e_{K-1}, inf)."""

    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.float64)
        if e.ndim != 1:
            raise InvalidInputError("edges must be 1-D")
        if e.size and (not np.all(np.isfinite(e)) or np.any(np.diff(e) <= 0)):
            raise InvalidInputError("edges must be finite and strictly increasing")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def k(self) -> int:
        return self.edges.size + 1

    def assign_cells(self, x: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.edges, x, side="left").astype(np.int64)

    def to_assignment(self, ids, x: np.ndarray) -> Assignment:
        return Assignment(ids=tuple(ids), cells=self.assign_cells(x))


def equal_width_partition(lo: float, hi: float, k: int) -> IntervalPartition:
    if k < 1 or not (hi > lo):
        raise InvalidInputError("need k >= 1 and hi > lo")
    return IntervalPartition(edges=np.linspace(lo, hi, k + 1)[1:-1])


def mixture_cdf(spec: MixtureSpec, x: float) -> float:
    if spec.dim != 1:
        raise InvalidInputError("interval partitions require 1-D features")
    total = 0.0
    for y in (0, 1):
        if spec.stds[y] == 0.0:
            total += spec.priors[y] * (1.0 if spec.means[y][0] <= x else 0.0)
        else:
            total += spec.priors[y] * _phi((x - spec.means[y][0]) / spec.stds[y])
    return total


def equal_mass_partition(spec: MixtureSpec, k: int) -> IntervalPartition:
    """Interval cells with equal mass 1/k under the mixture."""
    if spec.dim != 1:
        raise InvalidInputError("interval partitions require 1-D features")
    if all(s == 0.0 for s in spec.stds):
        raise InvalidInputError("equal-mass cells need a nondegenerate mixture")
    span = 12.0 * max(spec.stds) + max(abs(m[0]) for m in spec.means) + 1.0
    edges = [
        brentq(lambda t, q=q: mixture_cdf(spec, t) - q, -span, span, xtol=1e-12)
        for q in (i / k for i in range(1, k))
    ]
    return IntervalPartition(edges=np.asarray(edges))


def cell_masses(spec: MixtureSpec, part: IntervalPartition) -> np.ndarray:
    """True mass of each interval cell under the mixture."""
    cdf = np.asarray([0.0] + [mixture_cdf(spec, e) for e in part.edges] + [1.0])
    return np.diff(cdf)


@dataclass(frozen=True)
class CoverageResult:
    true_error: float
    coverage: float
    mean_bound: float
    mean_gap: float
    bounds: np.ndarray
    masses_coverage: float | None = None
    masses_mean_bound: float | None = None
    masses_bounds: np.ndarray | None = None


def coverage_run(
    spec: MixtureSpec,
    n: int,
    trials: int,
    k: int,
    delta: float,
    alpha: float,
    eps_gamma: float,
    c_sup: float = 1.0,
    seed: int = 0,
    partition: str = "kmeans",
    known_masses: bool = False,
    max_iters: int = 50,
    trained_threshold: bool = False,
) -> CoverageResult:
    """Repeatedly sample, partition, certify, and compare against the truth.

    ``coverage`` is the fraction of trials whose bound dominates the true
    error; it should be at least ``1 - eps_gamma - delta`` and in practice
    sits at 1 because the certificate is conservative.  With
    ``partition="intervals"`` the cells are fixed equal-mass intervals chosen
    before sampling, and ``known_masses=True`` additionally runs the true-mass
    certificate on the same trials (its uniform masses make u minimal).
    """
    if partition not in ("kmeans", "intervals"):
        raise InvalidInputError(f"unknown partition {partition!r}")
    if known_masses and partition != "intervals":
        raise InvalidInputError("known_masses requires interval cells")
    if trained_threshold and spec.dim != 1:
        raise InvalidInputError("trained-threshold mode is 1-D only")
    truth = true_error(spec)
    part = masses = None
    if partition == "intervals":
        part = equal_mass_partition(spec, k)
        masses = cell_masses(spec, part)
    bounds = np.empty(trials)
    bounds3 = np.empty(trials) if known_masses else None
    params = BoundParams(n=n, k=k, delta=delta, alpha=alpha, c_sup=c_sup,
                         eps_gamma=eps_gamma)
    for t in range(trials):
        dr = draw(spec, n, derive_seed("coverage-draw", seed, t))
        losses = dr.losses
        if trained_threshold:
            tau = fit_threshold(dr.features.vectors[:, 0], dr.labels)
            predicted = dr.features.vectors[:, 0] > tau
            losses = (predicted != dr.labels.astype(bool)).astype(np.float64)
        if partition == "kmeans":
            cents = fit(dr.features, k, derive_seed("coverage-fit", seed, t),
                        max_iters=max_iters)
            cc = counts(assign(dr.features, cents), k)
        else:
            cells = part.assign_cells(dr.features.vectors[:, 0])
            cc = CellCounts(np.bincount(cells, minlength=k))
        bounds[t] = certify(losses, cc, params).bound
        if known_masses:
            gp = GeneralParams(p=masses, delta1=params.residual, delta2=delta)
            bounds3[t] = certify_general(losses, cc, gp, params).bound
    extra = {}
    if known_masses:
        extra = dict(
            masses_coverage=float(np.mean(bounds3 >= truth)),
            masses_mean_bound=float(bounds3.mean()),
            masses_bounds=bounds3,
        )
    return CoverageResult(
        true_error=truth,
        coverage=float(np.mean(bounds >= truth)),
        mean_bound=float(bounds.mean()),
        mean_gap=float(bounds.mean() - truth),
        bounds=bounds,
        **extra,
    )


def noise_sweep(
    spec: MixtureSpec,
    n: int,
    k: int,
    sigmas,
    reps: int,
    delta: float,
    alpha: float,
    eps_gamma: float,
    c_sup: float = 1.0,
    seed: int = 0,
    max_iters: int = 50,
) -> list[dict]:
    """Sensitivity-certificate sweep over noise levels.

    For each repetition a sample is drawn and partitioned once; each sigma
    then perturbs the features, re-evaluates the rule, and produces one
    augmented certificate.  Rows carry sigma, rep, main_part, sensitivity,
    aug_loss, bound, corrected.
    """
    rows = []
    params_proto = dict(delta=delta, alpha=alpha, c_sup=c_sup, eps_gamma=eps_gamma)
    for rep in range(reps):
        dr = draw(spec, n, derive_seed("sweep-draw", seed, rep))
        cents = fit(dr.features, k, derive_seed("sweep-fit", seed, rep),
                    max_iters=max_iters)
        orig_assign = assign(dr.features, cents)
        cc = counts(orig_assign, k)
        orig = SampleTable(ids=dr.features.ids, losses=dr.losses)
        params = BoundParams(n=n, k=k, **params_proto)
        for j, sigma in enumerate(sigmas):
            aug_feat = gaussian_transform(
                dr.features, float(sigma), derive_seed("sweep-noise", seed, rep, j)
            )
            aug = SampleTable(
                ids=aug_feat.ids,
                losses=rule_losses(spec, aug_feat.vectors, dr.labels),
            )
            report = certify_aug(
                orig, orig_assign, aug, assign(aug_feat, cents), cc, params
            )
            rows.append({
                "sigma": float(sigma),
                "rep": rep,
                "main_part": report.main_part,
                "sensitivity": report.sensitivity,
                "aug_loss": report.aug_loss,
                "bound": report.bound,
                "corrected": report.corrected,
            })
    return rows
