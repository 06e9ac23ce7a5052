"""Closed-form certificate arithmetic for partition-based error bounds.

A certificate for a fixed model states that its expected loss is at most the
observed mean loss plus an uncertainty term

    Unc = C * sqrt(u_hat * alpha * ln(gamma)) + g(delta / 2)

holding with probability at least ``1 - gamma**(-alpha) - delta``.  Both
``u_hat`` and ``g`` are assembled from the per-cell sample counts of a
partition of the instance space with K cells:

    u_hat    = gamma/(2n) + (gamma**2 / 2) * sum_i (n_i/n)**2
               + gamma**2 * sqrt((2/n) * ln(2K/delta))
    g(delta) = C*(sqrt(2)+1) * sqrt(|T| * ln(2K/delta) / n)
               + 2*C*|T| * ln(2K/delta) / n

where ``n_i`` is the count in cell i and T is the set of occupied cells.  A
companion form (:func:`certify_general`) replaces the count-based estimate by
the true cell masses ``p_i`` when those are known.

Everything here is a pure function of its inputs, evaluated in 64-bit floats;
logarithms are natural throughout.  When ``gamma`` is derived from the target
residual ``eps_gamma = gamma**(-alpha)``, the product ``alpha * ln(gamma)`` is
carried as ``ln(1/eps_gamma)`` exactly, so certificates at different ``alpha``
share one confidence level and lose no precision as gamma approaches 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaValidityError,
    InvalidInputError,
    LossCapError,
    ParameterError,
)

_SQRT2P1 = math.sqrt(2.0) + 1.0


@dataclass(frozen=True)
class BoundParams:
    """Parameters governing one certificate evaluation.

    Exactly one of ``eps_gamma`` and ``gamma`` must be given.  The usual route
    is ``eps_gamma`` (default 0.04 in the CLI): gamma is then derived as
    ``eps_gamma**(-1/alpha)`` and the confidence is ``1 - eps_gamma - delta``
    regardless of alpha.  A raw ``gamma >= 1`` override exists for the
    concentration checks.
    """

    n: int
    k: int
    delta: float
    alpha: float
    c_sup: float
    eps_gamma: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n}")
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"K must be a positive integer, got {self.k}")
        if not (0.0 < self.delta < 1.0):
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be finite and nonnegative, got {self.alpha}")
        if not (self.c_sup > 0.0 and math.isfinite(self.c_sup)):
            raise ParameterError(f"c_sup must be positive and finite, got {self.c_sup}")
        if (self.eps_gamma is None) == (self.gamma is None):
            raise ParameterError("exactly one of eps_gamma and gamma must be given")
        if self.eps_gamma is not None:
            if not (0.0 < self.eps_gamma < 1.0):
                raise ParameterError(f"eps_gamma must lie in (0, 1), got {self.eps_gamma}")
            if self.alpha <= 0.0:
                raise ParameterError("deriving gamma from eps_gamma requires alpha > 0")
        else:
            if not (self.gamma >= 1.0 and math.isfinite(self.gamma)):
                raise ParameterError(f"gamma must be >= 1, got {self.gamma}")

    @property
    def ln_gamma(self) -> float:
        if self.eps_gamma is not None:
            return -math.log(self.eps_gamma) / self.alpha
        return math.log(self.gamma)

    @property
    def gamma_value(self) -> float:
        if self.eps_gamma is not None:
            return math.exp(self.ln_gamma)
        return self.gamma

    @property
    def alpha_ln_gamma(self) -> float:
        """alpha * ln(gamma); equals ln(1/eps_gamma) exactly in eps_gamma mode."""
        if self.eps_gamma is not None:
            return -math.log(self.eps_gamma)
        return self.alpha * math.log(self.gamma)

    @property
    def residual(self) -> float:
        """gamma**(-alpha), the non-delta part of the failure mass."""
        if self.eps_gamma is not None:
            return self.eps_gamma
        return math.exp(-self.alpha_ln_gamma)

    @property
    def confidence(self) -> float:
        return 1.0 - self.residual - self.delta


@dataclass(frozen=True)
class CellCounts:
    """Per-cell sample histogram ``n_i`` over a K-cell partition."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInputError("counts must be a nonempty 1-D vector")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(arr == np.floor(arr)):
                raise InvalidInputError("counts must be integers")
        arr = arr.astype(np.int64)
        if (arr < 0).any():
            raise InvalidInputError("counts must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def k(self) -> int:
        return int(self.counts.size)

    @property
    def t_size(self) -> int:
        """Number of occupied cells, |T|."""
        return int(np.count_nonzero(self.counts))

    @property
    def occupied(self) -> np.ndarray:
        return np.flatnonzero(self.counts)


@dataclass(frozen=True)
class BoundTerms:
    """Intermediate quantities of one certificate, kept for audit."""

    u_hat: float
    g_val: float
    unc: float
    sum_sq: float
    alpha_max: float


@dataclass(frozen=True)
class SampleTable:
    """Per-sample records: an id, a loss, and optionally a feature vector."""

    ids: tuple[str, ...]
    losses: np.ndarray
    vectors: np.ndarray | None = None

    def __post_init__(self):
        ids = tuple(str(s) for s in self.ids)
        losses = np.asarray(self.losses, dtype=np.float64)
        if losses.ndim != 1 or len(ids) != losses.size:
            raise InvalidInputError("ids and losses must be 1-D and of equal length")
        if len(set(ids)) != len(ids):
            raise InvalidInputError("duplicate sample ids")
        if losses.size and (not np.all(np.isfinite(losses)) or losses.min() < 0.0):
            raise InvalidInputError("losses must be finite and nonnegative")
        losses = losses.copy()
        losses.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "losses", losses)
        if self.vectors is not None:
            vec = np.asarray(self.vectors, dtype=np.float64)
            if vec.ndim != 2 or vec.shape[0] != losses.size:
                raise InvalidInputError("vectors must be an (n, d) matrix aligned with ids")
            object.__setattr__(self, "vectors", vec)

    def __len__(self) -> int:
        return self.losses.size


@dataclass(frozen=True)
class GeneralParams:
    """True cell masses and failure split for the known-masses certificate."""

    p: np.ndarray
    delta1: float
    delta2: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise InvalidInputError("p must be a nonempty 1-D probability vector")
        if not np.all(np.isfinite(p)) or p.min() < 0.0:
            raise InvalidInputError("cell masses must be finite and nonnegative")
        if abs(math.fsum(p.tolist()) - 1.0) > 1e-12:
            raise InvalidInputError("cell masses must sum to 1 within 1e-12")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        for name, val in (("delta1", self.delta1), ("delta2", self.delta2)):
            if not (0.0 < val < 1.0):
                raise ParameterError(f"{name} must lie in (0, 1), got {val}")


@dataclass(frozen=True)
class BoundReport:
    """A full certificate: parameters, intermediate terms, and the bound.

    ``bound`` always equals ``train_loss + terms.unc`` for empirical and
    known-masses certificates, and ``main_part + terms.unc`` for augmented
    ones.  Bounds above ``c_sup`` are reported with ``vacuous=True`` rather
    than clipped.
    """

    params: BoundParams
    terms: BoundTerms
    t_size: int
    train_loss: float
    bound: float
    confidence: float
    vacuous: bool
    kind: str = "empirical"
    corrected: bool = False
    main_part: float | None = None
    sensitivity: float | None = None
    aug_loss: float | None = None
    correction: float | None = None
    dropped_aug: int | None = None
    empty_aug_cells: int | None = None
    delta1: float | None = None
    delta2: float | None = None

    def to_dict(self, seeds: dict | None = None) -> dict:
        d = {
            "n": self.params.n,
            "K": self.params.k,
            "T_size": self.t_size,
            "sum_sq": self.terms.sum_sq,
            "u_hat": self.terms.u_hat,
            "g": self.terms.g_val,
            "unc": self.terms.unc,
            "alpha": self.params.alpha,
            "gamma": self.params.gamma_value,
            "delta": self.params.delta,
            "eps_gamma": self.params.residual,
            "c_sup": self.params.c_sup,
            "train_loss": self.train_loss,
            "bound": self.bound,
            "confidence": self.confidence,
            "vacuous": self.vacuous,
            "corrected": self.corrected,
            "seeds": dict(seeds or {}),
        }
        if self.kind == "augmented":
            d.update(
                main_part=self.main_part,
                sensitivity=self.sensitivity,
                aug_loss=self.aug_loss,
                correction=self.correction,
                dropped_aug=self.dropped_aug,
                empty_aug_cells=self.empty_aug_cells,
            )
        if self.kind == "known-masses":
            d.update(delta1=self.delta1, delta2=self.delta2)
        return d


def _loss_vector(losses) -> np.ndarray:
    if isinstance(losses, SampleTable):
        return losses.losses
    vals = np.asarray(losses, dtype=np.float64)
    if vals.ndim != 1:
        raise InvalidInputError("losses must be a 1-D vector")
    if vals.size and (not np.all(np.isfinite(vals)) or vals.min() < 0.0):
        raise InvalidInputError("losses must be finite and nonnegative")
    return vals


def _check_counts_params(counts: CellCounts, params: BoundParams) -> None:
    if counts.n != params.n:
        raise InvalidInputError(f"counts total {counts.n} != n {params.n}")
    if counts.k != params.k:
        raise InvalidInputError(f"counts length {counts.k} != K {params.k}")


def compute_sum_sq(counts: CellCounts) -> float:
    """Sum of squared cell fractions, sum_i (n_i / n)**2.

    The numerator is integer arithmetic, so the only rounding is the final
    division.  Lies in [1/K, 1]: exactly 1/K for uniform counts and exactly 1
    when a single cell holds every sample.
    """
    n = counts.n
    if n == 0:
        raise InvalidInputError("counts sum to zero")
    c = counts.counts
    if int(c.max()) < 2**31:
        ssq = int(np.dot(c, c))
    else:
        ssq = sum(int(v) * int(v) for v in c)
    return ssq / (n * n)


def compute_uhat(counts: CellCounts, params: BoundParams) -> float:
    """The dimensionless factor u_hat of the uncertainty term.

    u_hat = gamma/(2n) + (gamma**2/2) * sum_i (n_i/n)**2
            + gamma**2 * sqrt((2/n) * ln(2K/delta))
    """
    _check_counts_params(counts, params)
    gam = params.gamma_value
    n = params.n
    tail = math.sqrt((2.0 / n) * math.log(2.0 * params.k / params.delta))
    return gam / (2.0 * n) + 0.5 * gam * gam * compute_sum_sq(counts) + gam * gam * tail


def compute_g(t_size: int, k: int, n: int, delta: float, c_sup: float) -> float:
    """Occupied-cell deviation term.

    g(delta) = C*(sqrt(2)+1)*sqrt(|T| * ln(2K/delta) / n)
               + 2*C*|T| * ln(2K/delta) / n

    Callers assembling a full certificate pass ``delta/2`` here.
    """
    if int(t_size) != t_size or t_size < 0:
        raise InvalidInputError(f"|T| must be a nonnegative integer, got {t_size}")
    if t_size > k or t_size > n:
        raise InvalidInputError(f"|T|={t_size} exceeds min(K={k}, n={n})")
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if not (c_sup >= 0.0 and math.isfinite(c_sup)):
        raise ParameterError(f"c_sup must be finite and nonnegative, got {c_sup}")
    lt = math.log(2.0 * k / delta)
    return c_sup * _SQRT2P1 * math.sqrt(t_size * lt / n) + 2.0 * c_sup * t_size * lt / n


def alpha_max(n: int, k: int, gamma: float) -> float:
    """Validity ceiling for alpha: gamma*n*(K + gamma*n) / (K*(4n - 3))."""
    if n < 1 or k < 1:
        raise ParameterError("n and K must be positive integers")
    if not (gamma >= 1.0):
        raise ParameterError(f"gamma must be >= 1, got {gamma}")
    return gamma * n * (k + gamma * n) / (k * (4.0 * n - 3.0))


def bound_terms(counts: CellCounts, params: BoundParams) -> BoundTerms:
    """All intermediate terms of the count-based certificate.

    Raises :class:`AlphaValidityError` when alpha exceeds its ceiling for the
    derived gamma; the violation is a hard error, never a clamp.
    """
    _check_counts_params(counts, params)
    gam = params.gamma_value
    ceiling = alpha_max(params.n, params.k, gam)
    if params.alpha > ceiling:
        raise AlphaValidityError(
            f"alpha={params.alpha} exceeds its validity ceiling {ceiling:.6g} "
            f"for (n={params.n}, K={params.k}, gamma={gam:.8g})"
        )
    u_hat = compute_uhat(counts, params)
    g_val = compute_g(counts.t_size, params.k, params.n, params.delta / 2.0, params.c_sup)
    unc = params.c_sup * math.sqrt(u_hat * params.alpha_ln_gamma) + g_val
    return BoundTerms(
        u_hat=u_hat,
        g_val=g_val,
        unc=unc,
        sum_sq=compute_sum_sq(counts),
        alpha_max=ceiling,
    )


def certify(losses, counts: CellCounts, params: BoundParams) -> BoundReport:
    """Count-based certificate on the expected loss of a fixed model.

    ``losses`` is a :class:`SampleTable` or a plain vector of per-sample
    losses in [0, c_sup]; ``counts`` must be the histogram of the same samples
    over the partition.  The returned bound is
    ``mean(losses) + C*sqrt(u_hat*alpha*ln(gamma)) + g(delta/2)`` at
    confidence ``1 - gamma**(-alpha) - delta``.
    """
    vals = _loss_vector(losses)
    _check_counts_params(counts, params)
    if vals.size != params.n:
        raise InvalidInputError(f"{vals.size} losses but n={params.n}")
    if vals.size and float(vals.max()) > params.c_sup:
        raise LossCapError(
            f"max observed loss {float(vals.max())} exceeds c_sup={params.c_sup}"
        )
    terms = bound_terms(counts, params)
    train = float(vals.mean())
    bound = train + terms.unc
    return BoundReport(
        params=params,
        terms=terms,
        t_size=counts.t_size,
        train_loss=train,
        bound=bound,
        confidence=params.confidence,
        vacuous=bound > params.c_sup,
    )


def general_u(p, gamma: float, n: int) -> float:
    """u = sum_i gamma*n*p_i * (1 + gamma*n*p_i).

    For uniform masses p_i = 1/K this is gamma*n + gamma**2 * n**2 / K, the
    minimum over all probability vectors of length K.
    """
    gnp = gamma * n * np.asarray(p, dtype=np.float64)
    return math.fsum((gnp * (1.0 + gnp)).tolist())


def certify_general(
    losses, counts: CellCounts, general: GeneralParams, params: BoundParams
) -> BoundReport:
    """Known-masses certificate using the true cell measures p_i.

    bound = mean(losses) + C*sqrt(u/(2n**2) * ln(1/delta1)) + g(delta2)

    at confidence ``1 - delta1 - delta2``, where u = sum gamma*n*p_i*(1 +
    gamma*n*p_i).  Requires ``delta1 >= exp(-u*ln(gamma)/(4n-3))``; a delta1
    below that floor is a precondition error reporting the floor.  |T| in g
    is the observed occupied count.  No estimation of p_i from data happens
    here; the count-based :func:`certify` exists precisely to avoid needing
    the true masses.
    """
    vals = _loss_vector(losses)
    _check_counts_params(counts, params)
    if general.p.size != params.k:
        raise InvalidInputError(f"p has length {general.p.size} but K={params.k}")
    if vals.size != params.n:
        raise InvalidInputError(f"{vals.size} losses but n={params.n}")
    if vals.size and float(vals.max()) > params.c_sup:
        raise LossCapError(
            f"max observed loss {float(vals.max())} exceeds c_sup={params.c_sup}"
        )
    n = params.n
    gam = params.gamma_value
    u = general_u(general.p, gam, n)
    floor = math.exp(-u * params.ln_gamma / (4.0 * n - 3.0))
    if general.delta1 < floor:
        raise ParameterError(
            f"delta1={general.delta1} is below its admissible floor "
            f"{floor!r} = exp(-u*ln(gamma)/(4n-3))"
        )
    dev = params.c_sup * math.sqrt(u / (2.0 * n * n) * math.log(1.0 / general.delta1))
    g_val = compute_g(counts.t_size, params.k, n, general.delta2, params.c_sup)
    unc = dev + g_val
    terms = BoundTerms(
        u_hat=u / (2.0 * n * n),
        g_val=g_val,
        unc=unc,
        sum_sq=float(math.fsum(np.square(general.p).tolist())),
        alpha_max=alpha_max(n, params.k, gam),
    )
    train = float(vals.mean())
    bound = train + unc
    return BoundReport(
        params=params,
        terms=terms,
        t_size=counts.t_size,
        train_loss=train,
        bound=bound,
        confidence=1.0 - general.delta1 - general.delta2,
        vacuous=bound > params.c_sup,
        kind="known-masses",
        delta1=general.delta1,
        delta2=general.delta2,
    )
