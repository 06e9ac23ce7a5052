"""Empirical verification of the concentration inequalities behind the certificates.

Every check pits a closed-form bound against an independent estimate of its
left-hand side.  Exact mode enumerates small discrete models in rational
arithmetic (probability weights as exact fractions, integrand values rounded
once to float64), so a proven inequality must hold with zero slack and any
violation is an implementation bug.  Monte-Carlo mode handles larger models
and adds a three-sigma sampling allowance so that noise cannot raise false
alarms.

Checked inequalities, in the notation of the certificate arithmetic:

* squared-sum MGF: for independent x_i in [0, 1] with mean <= nu, and c >= 1,
  E exp(lam * (x_1 + ... + x_n)**2) <= exp(lam * c*n*nu * (1 + c*n*nu)); the
  admissible lam range is [0, ln(c)/(4n-3)] in general, any lam >= 0 once
  c*nu >= 1, and [0, ln(c)/((1-c*nu)(4n-3))] when c*nu < 1.
* small-variable MGF mix: E exp(lam*(a*X**2 + b*X)) <= exp(c*(a+b)*nu*lam)
  under the analogous regimes with (a+b) in place of (4n-3).
* conditional MGF: E[exp(lam*(X - E[X|Y])) | Y] <= exp(lam**2 (b-a)**2 / 8)
  for any X in [a, b], any conditioning Y, and every real lam.
* conditional tails: with v_i ~ Binomial(n, mu_i) independent, a latent h
  choosing per-cell loss distributions on [0, 1], X_i the sum of v_i i.i.d.
  losses, and u = sum gamma*n*mu_i*(1 + gamma*n*mu_i),
  Pr(V - E >= t) and Pr(E - V >= t) are both <= exp(-2 t**2 / u) for
  deviations t up to u*sqrt(ln(gamma)/(8n-6)); up to that ceiling divided by
  sqrt(1 - gamma*mu_min) when gamma*mu_min < 1, and unrestricted when
  gamma*mu_min >= 1.
* multinomial squares: for (n_1..n_K) multinomial(n, p),
  Pr(sum p_i**2 > sum (n_i/n)**2 + 2*sqrt((2/n) ln(K/delta))) < delta.

The tail simulation instantiates exactly the structure the count-based
certificate relies on: cell counts as the binomial widths and per-cell loss
sums as the conditionally independent variables.  The theorem asks for
independent widths while the certificate application has multinomial
(dependent) counts; both settings are exercised and reported separately by
the suite rather than papered over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import InvalidInputError, RangeError
from .rng import philox_gen

EXACT_MAX_N = 20


@dataclass(frozen=True)
class CheckResult:
    check: str
    params: str
    estimate: float
    bound: float
    margin: float  # bound - estimate, before any sampling allowance
    passed: bool
    mode: str  # "exact" | "mc"
    stderr: float = 0.0


@dataclass(frozen=True)
class MgfCheckSpec:
    """One squared-sum MGF configuration over i.i.d. Bernoulli(nu) variables."""

    n: int
    nu: float
    c: float
    lam: float
    trials: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("n must be >= 1")
        if not (0.0 <= self.nu <= 1.0):
            raise InvalidInputError(f"nu must lie in [0, 1], got {self.nu}")
        if self.c < 1.0:
            raise InvalidInputError(f"c must be >= 1, got {self.c}")
        if self.lam < 0.0:
            raise RangeError(f"lambda must be >= 0, got {self.lam}")
        if self.c * self.nu < 1.0:
            lam_max = mgf_lambda_ceiling(self.n, self.nu, self.c)
            if self.lam > lam_max:
                raise RangeError(
                    f"small-mean regime (c*nu = {self.c * self.nu:g} < 1): "
                    f"lambda must be <= ln(c)/((1-c*nu)(4n-3)) = {lam_max:g}, "
                    f"got {self.lam:g}"
                )


@dataclass(frozen=True)
class TailCheckSpec:
    """One conditional-tail configuration.

    ``mu`` are the binomial width means; ``h_weights`` the latent model mix;
    ``loss_probs[h][i]`` the Bernoulli loss rate of cell i under model h.
    Entries of ``t_grid`` are deviation magnitudes; both one-sided tails are
    checked at each.
    """

    m: int
    n: int
    mu: tuple[float, ...]
    gamma: float
    t_grid: tuple[float, ...]
    trials: int = 100_000
    seed: int = 0
    h_weights: tuple[float, ...] = (0.5, 0.5)
    loss_probs: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.m < 1 or len(self.mu) != self.m:
            raise InvalidInputError("mu must have length m >= 1")
        if self.n < 1:
            raise InvalidInputError("n must be >= 1")
        if any(not (0.0 <= v <= 1.0) for v in self.mu):
            raise InvalidInputError("each mu_i must lie in [0, 1]")
        if self.gamma < 1.0:
            raise InvalidInputError(f"gamma must be >= 1, got {self.gamma}")
        if abs(math.fsum(self.h_weights) - 1.0) > 1e-12:
            raise InvalidInputError("h_weights must sum to 1")
        if self.loss_probs is None:
            base = (0.25, 0.75)
            object.__setattr__(
                self,
                "loss_probs",
                tuple(tuple(base[h % 2] for _ in range(self.m))
                      for h in range(len(self.h_weights))),
            )
        if len(self.loss_probs) != len(self.h_weights):
            raise InvalidInputError("loss_probs must have one row per latent model")
        if any(len(row) != self.m for row in self.loss_probs):
            raise InvalidInputError("each loss_probs row must have length m")
        ceiling = tail_t_ceiling(self.mu, self.n, self.gamma)
        for t in self.t_grid:
            if abs(t) > ceiling:
                raise RangeError(
                    f"t={t:g} outside the admissible range +-{ceiling:g} in the "
                    f"small-gamma regime (gamma*mu_min = "
                    f"{self.gamma * min(self.mu):g} < 1)"
                )


def tail_u(mu, n: int, gamma: float) -> float:
    """u = sum_i gamma*n*mu_i * (1 + gamma*n*mu_i)."""
    return math.fsum(gamma * n * v * (1.0 + gamma * n * v) for v in mu)


def tail_t_unified(mu, n: int, gamma: float) -> float:
    """Deviation ceiling u*sqrt(ln(gamma)/(8n-6)) valid in every regime."""
    u = tail_u(mu, n, gamma)
    return u * math.sqrt(math.log(gamma) / (8.0 * n - 6.0))


def tail_t_ceiling(mu, n: int, gamma: float) -> float:
    """Largest admissible deviation: infinite when gamma*mu_min >= 1, else the
    refined small-mean ceiling (which contains the unified one)."""
    mu_min = min(mu)
    if gamma * mu_min >= 1.0:
        return math.inf
    u = tail_u(mu, n, gamma)
    return u * math.sqrt(
        math.log(gamma) / (2.0 * (1.0 - gamma * mu_min) * (4.0 * n - 3.0))
    )


def mgf_lambda_ceiling(n: int, nu: float, c: float) -> float:
    """Largest admissible lambda for the squared-sum MGF bound."""
    if c * nu >= 1.0:
        return math.inf
    if c <= 1.0:
        return 0.0
    return math.log(c) / ((1.0 - c * nu) * (4.0 * n - 3.0))


def _binom_pmf_fractions(n: int, p: Fraction) -> list[Fraction]:
    q = 1 - p
    out = []
    for k in range(n + 1):
        out.append(math.comb(n, k) * p**k * q ** (n - k))
    return out


def _fmt(**kv) -> str:
    parts = []
    for key, val in kv.items():
        if isinstance(val, float):
            parts.append(f"{key}={val:.6g}")
        elif isinstance(val, (tuple, list)):
            parts.append(f"{key}=({','.join(f'{v:.4g}' for v in val)})")
        else:
            parts.append(f"{key}={val}")
    return " ".join(parts)


def mgf_square_check(spec: MgfCheckSpec) -> CheckResult:
    """Verify the squared-sum MGF bound for a Bernoulli(nu) sample.

    Exact enumeration of the binomial total for n <= 20, Monte Carlo beyond.
    """
    bound = math.exp(spec.lam * spec.c * spec.n * spec.nu * (1.0 + spec.c * spec.n * spec.nu))
    params = _fmt(n=spec.n, nu=spec.nu, c=spec.c, lam=spec.lam)
    if spec.n <= EXACT_MAX_N:
        p = Fraction(spec.nu)
        pmf = _binom_pmf_fractions(spec.n, p)
        est = Fraction(0)
        for y, w in enumerate(pmf):
            est += w * Fraction(math.exp(spec.lam * y * y))
        passed = est <= Fraction(bound)
        estimate = float(est)
        return CheckResult(
            check="mgf-square", params=params, estimate=estimate, bound=bound,
            margin=bound - estimate, passed=bool(passed), mode="exact",
        )
    gen = philox_gen("mgf-square", spec.seed, spec.n, spec.nu, spec.c, spec.lam)
    y = gen.binomial(spec.n, spec.nu, size=spec.trials).astype(np.float64)
    vals = np.exp(spec.lam * y * y)
    estimate = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(spec.trials))
    passed = estimate <= bound * (1.0 + 3.0 * stderr / estimate)
    return CheckResult(
        check="mgf-square", params=params, estimate=estimate, bound=bound,
        margin=bound - estimate, passed=bool(passed), mode="mc", stderr=stderr,
    )


def exp_mix_check(
    a: float,
    b: float,
    c: float,
    nu: float,
    lam: float,
    trials: int = 100_000,
    seed: int = 0,
    dist: str = "bernoulli",
) -> CheckResult:
    """Verify E exp(lam*(a*X**2 + b*X)) <= exp(c*(a+b)*nu*lam) for one X.

    ``dist="bernoulli"`` is evaluated exactly; ``dist="uniform"`` draws
    X ~ U(0, 2*nu) by Monte Carlo (requires nu <= 1/2).  With a=0, b=1 this
    specializes to the plain small-variable bound E e^(lam X) <= e^(c nu lam).
    """
    if a < 0.0 or b < 0.0:
        raise InvalidInputError("a and b must be nonnegative")
    if c < 1.0:
        raise InvalidInputError(f"c must be >= 1, got {c}")
    if not (0.0 <= nu <= 1.0):
        raise InvalidInputError(f"nu must lie in [0, 1], got {nu}")
    if lam < 0.0:
        raise RangeError(f"lambda must be >= 0, got {lam}")
    if a + b > 0.0 and c * nu < 1.0:
        lam_max = math.log(c) / ((1.0 - c * nu) * (a + b)) if c > 1.0 else 0.0
        if lam > lam_max:
            raise RangeError(
                f"small-mean regime (c*nu = {c * nu:g} < 1): lambda must be "
                f"<= ln(c)/((1-c*nu)(a+b)) = {lam_max:g}, got {lam:g}"
            )
    bound = math.exp(c * (a + b) * nu * lam)
    params = _fmt(a=a, b=b, c=c, nu=nu, lam=lam, dist=dist)
    if dist == "bernoulli":
        p = Fraction(nu)
        est = (1 - p) + p * Fraction(math.exp(lam * (a + b)))
        estimate = float(est)
        return CheckResult(
            check="mgf-mix", params=params, estimate=estimate, bound=bound,
            margin=bound - estimate, passed=bool(est <= Fraction(bound)),
            mode="exact",
        )
    if dist != "uniform":
        raise InvalidInputError(f"unknown dist {dist!r}")
    if nu > 0.5:
        raise InvalidInputError("uniform variant requires nu <= 1/2")
    gen = philox_gen("mgf-mix", seed, a, b, c, nu, lam)
    x = gen.uniform(0.0, 2.0 * nu, size=trials)
    vals = np.exp(lam * (a * x * x + b * x))
    estimate = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials))
    passed = estimate <= bound * (1.0 + 3.0 * stderr / max(estimate, 1e-300))
    return CheckResult(
        check="mgf-mix", params=params, estimate=estimate, bound=bound,
        margin=bound - estimate, passed=bool(passed), mode="mc", stderr=stderr,
    )


def hoeffding_lemma_check(
    a: float,
    b: float,
    lambda_grid,
    conditions=(("two_point", 0.5),),
    trials: int = 100_000,
    seed: int = 0,
) -> list[CheckResult]:
    """Verify the conditional MGF bound exp(lam**2 (b-a)**2 / 8).

    Each entry of ``conditions`` plays the role of one sampled conditioning
    value Y and fixes the conditional law of X in [a, b]:
    ``("two_point", q)`` puts mass q on b and 1-q on a (evaluated exactly);
    ``("beta", al, be)`` rescales a Beta(al, be) draw (Monte Carlo).  Every
    real lambda is admissible.
    """
    if not (b >= a):
        raise InvalidInputError("need b >= a")
    width2 = (b - a) ** 2
    out = []
    for cond in conditions:
        kind = cond[0]
        for lam in lambda_grid:
            bound = math.exp(lam * lam * width2 / 8.0)
            if kind == "two_point":
                q = Fraction(cond[1])
                mean = Fraction(a) + (Fraction(b) - Fraction(a)) * q
                lo = Fraction(math.exp(lam * float(Fraction(a) - mean)))
                hi = Fraction(math.exp(lam * float(Fraction(b) - mean)))
                est = (1 - q) * lo + q * hi
                estimate = float(est)
                out.append(CheckResult(
                    check="cond-mgf",
                    params=_fmt(a=a, b=b, cond=f"two_point(q={cond[1]:g})", lam=lam),
                    estimate=estimate, bound=bound, margin=bound - estimate,
                    passed=bool(est <= Fraction(bound)), mode="exact",
                ))
            elif kind == "beta":
                al, be = cond[1], cond[2]
                gen = philox_gen("cond-mgf", seed, a, b, al, be, lam)
                x = a + (b - a) * gen.beta(al, be, size=trials)
                mean = a + (b - a) * al / (al + be)
                vals = np.exp(lam * (x - mean))
                estimate = float(vals.mean())
                stderr = float(vals.std(ddof=1) / math.sqrt(trials))
                out.append(CheckResult(
                    check="cond-mgf",
                    params=_fmt(a=a, b=b, cond=f"beta({al:g},{be:g})", lam=lam),
                    estimate=estimate, bound=bound, margin=bound - estimate,
                    passed=bool(estimate <= bound + 3.0 * stderr),
                    mode="mc", stderr=stderr,
                ))
            else:
                raise InvalidInputError(f"unknown condition kind {kind!r}")
    return out


def _convolve_fr(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _tail_exact(spec: TailCheckSpec) -> list[tuple[float, Fraction, Fraction]]:
    """Exact (upper, lower) tail mass per deviation, by joint enumeration."""
    mus = [Fraction(v) for v in spec.mu]
    width_pmf = [_binom_pmf_fractions(spec.n, mu) for mu in mus]
    uppers = [Fraction(0)] * len(spec.t_grid)
    lowers = [Fraction(0)] * len(spec.t_grid)
    t_fracs = [Fraction(abs(t)) for t in spec.t_grid]
    for h, w_h in enumerate(spec.h_weights):
        wh = Fraction(w_h)
        if wh == 0:
            continue
        q = [Fraction(v) for v in spec.loss_probs[h]]
        loss_pmf = [
            [_binom_pmf_fractions(v, q[i]) for v in range(spec.n + 1)]
            for i in range(spec.m)
        ]
        for widths in product(range(spec.n + 1), repeat=spec.m):
            w_v = wh
            for i, v in enumerate(widths):
                w_v *= width_pmf[i][v]
            if w_v == 0:
                continue
            dist = loss_pmf[0][widths[0]]
            for i in range(1, spec.m):
                dist = _convolve_fr(dist, loss_pmf[i][widths[i]])
            e_m = sum(q[i] * widths[i] for i in range(spec.m))
            suffix = list(dist)
            for j in range(len(suffix) - 2, -1, -1):
                suffix[j] += suffix[j + 1]
            prefix = list(dist)
            for j in range(1, len(prefix)):
                prefix[j] += prefix[j - 1]
            for ti, t in enumerate(t_fracs):
                x_up = math.ceil(e_m + t)
                if x_up < len(suffix):
                    uppers[ti] += w_v * suffix[max(x_up, 0)]
                x_lo = math.floor(e_m - t)
                if x_lo >= 0:
                    lowers[ti] += w_v * prefix[min(x_lo, len(prefix) - 1)]
    return [(spec.t_grid[i], uppers[i], lowers[i]) for i in range(len(spec.t_grid))]


def hoeffding_conditional_check(spec: TailCheckSpec, mode: str = "mc") -> list[CheckResult]:
    """Verify both one-sided conditional tails against exp(-2 t**2 / u).

    Exact mode enumerates (latent model, widths, loss sums) jointly in
    rational arithmetic; Monte Carlo draws the same hierarchy.  One result
    per (deviation, side).
    """
    u = tail_u(spec.mu, spec.n, spec.gamma)
    base = _fmt(m=spec.m, n=spec.n, mu=spec.mu, gamma=spec.gamma)
    out = []
    if mode == "exact":
        for t, up, lo in _tail_exact(spec):
            bound = math.exp(-2.0 * t * t / u)
            for side, mass in (("upper", up), ("lower", lo)):
                estimate = float(mass)
                out.append(CheckResult(
                    check=f"cond-tail-{side}", params=f"{base} t={t:.6g}",
                    estimate=estimate, bound=bound, margin=bound - estimate,
                    passed=bool(mass <= Fraction(bound)), mode="exact",
                ))
        return out
    if mode != "mc":
        raise InvalidInputError(f"unknown mode {mode!r}")
    gen = philox_gen("cond-tail", spec.seed, spec.m, spec.n, spec.gamma, *spec.mu)
    hs = gen.choice(len(spec.h_weights), size=spec.trials, p=np.asarray(spec.h_weights))
    widths = gen.binomial(spec.n, np.asarray(spec.mu), size=(spec.trials, spec.m))
    q = np.asarray(spec.loss_probs, dtype=np.float64)[hs]
    x = gen.binomial(widths, q)
    dev = x.sum(axis=1) - (widths * q).sum(axis=1)
    for t in spec.t_grid:
        t = abs(t)
        bound = math.exp(-2.0 * t * t / u)
        slack = 3.0 * math.sqrt(bound * (1.0 - bound) / spec.trials)
        for side, freq in (
            ("upper", float(np.mean(dev >= t))),
            ("lower", float(np.mean(-dev >= t))),
        ):
            out.append(CheckResult(
                check=f"cond-tail-{side}", params=f"{base} t={t:.6g}",
                estimate=freq, bound=bound, margin=bound - freq,
                passed=bool(freq <= bound + slack), mode="mc",
                stderr=math.sqrt(max(freq * (1.0 - freq), 1.0 / spec.trials) / spec.trials),
            ))
    return out


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def multinomial_square_check(
    n: int,
    p,
    delta: float,
    trials: int = 100_000,
    seed: int = 0,
    mode: str = "auto",
) -> CheckResult:
    """Verify the multinomial squared-frequency estimate.

    The failure event is sum p_i**2 > sum (n_i/n)**2 + 2*sqrt((2/n) ln(K/delta))
    and must have probability below delta.  Exact enumeration when feasible
    (mode="auto" picks it for K <= 4, n <= 12), Monte Carlo otherwise with at
    least 10**4 trials.
    """
    p = np.asarray(p, dtype=np.float64)
    k = p.size
    if k < 1 or p.min() < 0.0 or abs(math.fsum(p.tolist()) - 1.0) > 1e-12:
        raise InvalidInputError("p must be a probability vector")
    if not (0.0 < delta < 1.0):
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    threshold = 2.0 * math.sqrt((2.0 / n) * math.log(k / delta))
    params = _fmt(n=n, K=k, p=tuple(p.tolist()), delta=delta)
    exact = mode == "exact" or (mode == "auto" and k <= 4 and n <= 12)
    if exact:
        pf = [Fraction(v) for v in p.tolist()]
        sum_p2 = sum(v * v for v in pf)
        thr = Fraction(threshold)
        fail = Fraction(0)
        n_fact = math.factorial(n)
        for combo in _compositions(n, k):
            w = Fraction(n_fact)
            for cnt, pv in zip(combo, pf):
                w = w * pv**cnt / math.factorial(cnt)
            if w == 0:
                continue
            counts_sq = Fraction(sum(c * c for c in combo), n * n)
            if sum_p2 > counts_sq + thr:
                fail += w
        estimate = float(fail)
        return CheckResult(
            check="multinomial-square", params=params, estimate=estimate,
            bound=delta, margin=delta - estimate,
            passed=bool(fail < Fraction(delta)), mode="exact",
        )
    if trials < 10_000:
        raise InvalidInputError("Monte-Carlo mode requires trials >= 10000")
    gen = philox_gen("multinomial-square", seed, n, delta, *p.tolist())
    draws = gen.multinomial(n, p, size=trials)
    counts_sq = (draws.astype(np.float64) ** 2).sum(axis=1) / (n * n)
    sum_p2 = math.fsum((p * p).tolist())
    freq = float(np.mean(sum_p2 > counts_sq + threshold))
    passed = freq < delta + 3.0 * math.sqrt(delta / trials)
    return CheckResult(
        check="multinomial-square", params=params, estimate=freq, bound=delta,
        margin=delta - freq, passed=bool(passed), mode="mc",
        stderr=math.sqrt(max(freq * (1.0 - freq), 1.0 / trials) / trials),
    )


# --- suite -----------------------------------------------------------------


def _exact_mgf_rows() -> list[CheckResult]:
    rows = []
    for n in (1, 2, 3, 5, 8, 12, 16, 20):
        for nu in (0.25, 0.5, 0.75):
            for c in (1.0, 1.5, 2.0, 4.0):
                lams = {0.0}
                if c * nu >= 1.0:
                    lams.add(0.05)
                    lams.add(min(0.5, 400.0 / (n * n)))
                    if c > 1.0:
                        lams.add(math.log(c) / (4.0 * n - 3.0))
                elif c > 1.0:
                    lam_l1 = math.log(c) / (4.0 * n - 3.0)
                    lam_b = mgf_lambda_ceiling(n, nu, c)
                    lams.update((lam_l1, lam_b / 2.0, lam_b))
                for lam in sorted(lams):
                    rows.append(mgf_square_check(MgfCheckSpec(n=n, nu=nu, c=c, lam=lam)))
    return rows


def _exact_mix_rows() -> list[CheckResult]:
    rows = []
    for a, b in ((0.0, 1.0), (1.0, 0.0), (1.0, 1.0), (2.0, 0.5)):
        for nu in (0.25, 0.5, 1.0):
            for c in (1.0, 2.0):
                lams = {0.0}
                if c * nu >= 1.0:
                    lams.update((0.5, 2.0))
                elif c > 1.0:
                    cap = math.log(c) / ((1.0 - c * nu) * (a + b))
                    lams.update((cap / 2.0, cap))
                for lam in sorted(lams):
                    rows.append(exp_mix_check(a, b, c, nu, lam))
    return rows


def _exact_lemma_rows() -> list[CheckResult]:
    rows = []
    for a, b in ((0.0, 1.0), (-1.0, 1.0), (0.0, 0.5)):
        for q in (0.25, 0.5, 0.875):
            rows.extend(hoeffding_lemma_check(
                a, b, (-2.0, -0.5, 0.0, 0.5, 1.0, 2.0),
                conditions=(("two_point", q),),
            ))
    return rows


def _exact_multinomial_rows() -> list[CheckResult]:
    configs = [
        (6, (1.0,)),
        (6, (0.5, 0.5)),
        (12, (0.5, 0.5)),
        (12, (0.75, 0.25)),
        (8, (0.5, 0.25, 0.25)),
        (12, (0.5, 0.25, 0.25)),
        (12, (0.25, 0.25, 0.25, 0.25)),
        (12, (0.625, 0.125, 0.125, 0.125)),
    ]
    rows = []
    for n, p in configs:
        for delta in (0.05, 0.3):
            rows.append(multinomial_square_check(n, p, delta, mode="exact"))
    return rows


def _exact_tail_rows() -> list[CheckResult]:
    rows = []
    # small-gamma regime: t up to the refined ceiling, past the unified one
    for m, n, mu, gamma in (
        (2, 12, (0.25, 0.5), 2.0),
        (3, 8, (0.25, 0.25, 0.5), 1.5),
        (1, 20, (0.5,), 1.25),
    ):
        tu = tail_t_unified(mu, n, gamma)
        ta = tail_t_ceiling(mu, n, gamma)
        spec = TailCheckSpec(
            m=m, n=n, mu=mu, gamma=gamma,
            t_grid=(0.0, 0.5 * tu, tu, min(ta, 2.0 * tu)),
            loss_probs=tuple((0.25,) * m if h == 0 else (0.75,) * m for h in range(2)),
        )
        rows.extend(hoeffding_conditional_check(spec, mode="exact"))
    # large-gamma regime: every deviation is admissible
    mu = (0.5, 0.75)
    gamma = 4.0
    tu = tail_t_unified(mu, 12, gamma)
    spec = TailCheckSpec(
        m=2, n=12, mu=mu, gamma=gamma, t_grid=(0.0, tu, 3.0 * tu),
        loss_probs=((0.25, 0.5), (0.75, 0.25)),
    )
    rows.extend(hoeffding_conditional_check(spec, mode="exact"))
    # degenerate losses: V == E, every positive deviation has zero mass
    mu = (0.5, 0.5)
    spec = TailCheckSpec(
        m=2, n=10, mu=mu, gamma=2.0,
        t_grid=(0.0, 0.5 * tail_t_unified(mu, 10, 2.0)),
        h_weights=(1.0,), loss_probs=((1.0, 1.0),),
    )
    rows.extend(hoeffding_conditional_check(spec, mode="exact"))
    return rows


def _mc_tail_rows(trials: int, seed: int) -> list[CheckResult]:
    rows = []
    mu_patterns = ((0.2, 0.3, 0.5, 0.4, 0.25), None, (0.05,))
    idx = 0
    for m in (1, 2, 3, 5):
        for n in (30, 120):
            for gamma in (1.5, 4.0):
                pat = mu_patterns[idx % 3]
                idx += 1
                if pat is None:
                    mu = (0.3,) * m
                elif len(pat) >= m:
                    mu = pat[:m]
                else:
                    mu = tuple(pat[0] for _ in range(m))
                ceiling = tail_t_ceiling(mu, n, gamma)
                tu = min(tail_t_unified(mu, n, gamma), ceiling)
                sigma = math.sqrt(sum(n * v * 0.25 for v in mu))
                t_grid = tuple(
                    min(t, 0.95 * ceiling)
                    for t in (0.0, sigma, 3.0 * sigma, 0.5 * tu)
                )
                spec = TailCheckSpec(
                    m=m, n=n, mu=mu, gamma=gamma, t_grid=t_grid,
                    trials=trials, seed=seed,
                )
                rows.extend(hoeffding_conditional_check(spec, mode="mc"))
    return rows


def _mc_other_rows(trials: int, seed: int) -> list[CheckResult]:
    rows = []
    for n in (50, 200):
        for nu, c in ((0.3, 1.5), (0.05, 3.0), (0.4, 3.0)):
            cap = mgf_lambda_ceiling(n, nu, c)
            lam = min(cap, 400.0 / (n * n)) if math.isfinite(cap) else 100.0 / (n * n)
            rows.append(mgf_square_check(
                MgfCheckSpec(n=n, nu=nu, c=c, lam=lam / 2.0, trials=trials, seed=seed)
            ))
    for al, be in ((2.0, 5.0), (5.0, 2.0), (1.0, 1.0)):
        rows.extend(hoeffding_lemma_check(
            0.0, 1.0, (-1.0, 0.5, 1.0), conditions=(("beta", al, be),),
            trials=trials, seed=seed,
        ))
    for a, b, c, nu, lam_scale in ((0.0, 1.0, 2.0, 0.25, 0.5), (1.0, 1.0, 1.5, 0.4, 0.9)):
        cap = math.log(c) / ((1.0 - c * nu) * (a + b))
        rows.append(exp_mix_check(
            a, b, c, nu, cap * lam_scale, trials=trials, seed=seed, dist="uniform"
        ))
    mc_trials = max(trials, 10_000)
    for n, p, delta in (
        (100, (0.1,) * 10, 0.05),
        (50, (0.97, 0.01, 0.01, 0.01), 0.05),
        (200, (0.4, 0.3, 0.2, 0.1), 0.1),
        (50, (0.99, 0.01), 0.05),
    ):
        rows.append(multinomial_square_check(
            n, p, delta, trials=mc_trials, seed=seed, mode="mc"
        ))
    return rows


def run_suite(suite: str = "full", trials: int = 100_000, seed: int = 0) -> list[CheckResult]:
    """Run the verification suite; returns one row per checked inequality.

    ``suite`` is "exact" (rational enumeration, zero slack), "mc"
    (Monte Carlo with three-sigma allowance), or "full" (both).
    """
    if suite not in ("full", "exact", "mc"):
        raise InvalidInputError(f"unknown suite {suite!r}")
    rows: list[CheckResult] = []
    if suite in ("full", "exact"):
        rows.extend(_exact_mgf_rows())
        rows.extend(_exact_mix_rows())
        rows.extend(_exact_lemma_rows())
        rows.extend(_exact_multinomial_rows())
        rows.extend(_exact_tail_rows())
    if suite in ("full", "mc"):
        rows.extend(_mc_tail_rows(trials, seed))
        rows.extend(_mc_other_rows(trials, seed))
    return rows
