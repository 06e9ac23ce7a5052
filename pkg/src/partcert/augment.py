"""Sample transformation and the sensitivity-augmented certificate.

Transforming every sample with a model-independent perturbation and comparing
losses inside each partition cell yields per-cell sensitivities

    eps_i = (1 / (m_i * n_i)) * sum_{z in S_i, s in S^_i} |loss(z) - loss(s)|

whose weighted aggregate eps_bar = sum_{i in T} (m_i / m) * eps_i enters the
augmented certificate

    bound = eps_bar + mean(aug losses over T) + Unc.

When the cell proportions of the two samples differ (checked exactly on
integers, n_i * m == m_i * n), the additive correction
sum_{i in T} (n_i/n - m_i/m) * mean(S_i losses) is included and the report is
flagged ``corrected``.  Only augmented samples landing in occupied cells count
toward m; strays are dropped and reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import (
    BoundParams,
    BoundReport,
    CellCounts,
    LossCapError,
    SampleTable,
    bound_terms,
)
from .errors import InvalidInputError, ParameterError
from .partition import Assignment, FeatureTable
from .rng import philox_gen

_PAIR_BLOCK = 2_000_000  # elements per |a - b| block


def gaussian_transform(features: FeatureTable, sigma: float, seed: int) -> FeatureTable:
    """Perturb every coordinate with i.i.d. N(0, sigma**2) noise.

    The noise for a sample is a counter-based stream keyed by (seed, id), so
    it does not depend on row order or on which other samples are present.
    The seed must be chosen independently of the model being certified.
    """
    if not (sigma >= 0.0 and math.isfinite(sigma)):
        raise ParameterError(f"sigma must be finite and nonnegative, got {sigma}")
    if sigma == 0.0:
        return FeatureTable(ids=features.ids, vectors=features.vectors.copy())
    out = features.vectors.copy()
    d = out.shape[1]
    for i, sid in enumerate(features.ids):
        gen = philox_gen("gauss", seed, sid)
        out[i] += gen.normal(0.0, sigma, size=d)
    return FeatureTable(ids=features.ids, vectors=out)


@dataclass(frozen=True)
class PairStats:
    """Per-cell cross-sample sensitivity statistics."""

    orig_counts: np.ndarray  # n_i
    aug_counts: np.ndarray  # m_i
    eps_cells: np.ndarray  # eps_i, zero where undefined
    eps_bar: float
    m: int  # augmented samples inside occupied cells
    undefined_cells: tuple[int, ...]  # n_i > 0 but m_i == 0
    approximate: bool = False


def _cross_abs_mean(a: np.ndarray, b: np.ndarray) -> float:
    """Exact all-pairs mean |a_j - b_l| (double loop over the cross product),
    evaluated in blocks."""
    total = 0.0
    step = max(1, _PAIR_BLOCK // max(b.size, 1))
    for lo in range(0, a.size, step):
        total += float(np.abs(a[lo : lo + step, np.newaxis] - b[np.newaxis, :]).sum())
    return total / (a.size * b.size)


def _group_indices(cells: np.ndarray, k: int) -> list[np.ndarray]:
    order = np.argsort(cells, kind="stable")
    bounds = np.searchsorted(cells[order], np.arange(k + 1))
    return [order[bounds[i] : bounds[i + 1]] for i in range(k)]


def pair_stats(
    orig: SampleTable,
    orig_assign: Assignment,
    aug: SampleTable,
    aug_assign: Assignment,
    k: int,
    max_pairs_per_cell: int | None = None,
    seed: int = 0,
) -> PairStats:
    """Exact per-cell sensitivities between a sample and its transformation.

    Both assignments must come from the same centroids.  ``max_pairs_per_cell``
    caps the all-pairs work by subsampling each side of oversized cells; the
    result is then an approximation and voids the certificate (profiling
    only), which the ``approximate`` flag records.
    """
    if orig.ids != orig_assign.ids or aug.ids != aug_assign.ids:
        raise InvalidInputError("sample tables and assignments must agree on ids and order")
    oc, ac = orig_assign.cells, aug_assign.cells
    for name, cells in (("original", oc), ("augmented", ac)):
        if cells.size and int(cells.max()) >= k:
            raise InvalidInputError(f"{name} assignment has a cell index >= K={k}")
    n_i = np.bincount(oc, minlength=k)
    m_i = np.bincount(ac, minlength=k)
    occupied = np.flatnonzero(n_i)
    m = int(m_i[occupied].sum())

    o_groups = _group_indices(oc, k)
    a_groups = _group_indices(ac, k)
    eps_cells = np.zeros(k, dtype=np.float64)
    undefined = []
    approximate = False
    for i in occupied:
        if m_i[i] == 0:
            undefined.append(int(i))
            continue
        a = orig.losses[o_groups[i]]
        b = aug.losses[a_groups[i]]
        if max_pairs_per_cell is not None and a.size * b.size > max_pairs_per_cell:
            cap = max(1, math.isqrt(max_pairs_per_cell))
            gen = philox_gen("paircap", seed, int(i))
            if a.size > cap:
                a = a[np.sort(gen.choice(a.size, size=cap, replace=False))]
            if b.size > cap:
                b = b[np.sort(gen.choice(b.size, size=cap, replace=False))]
            approximate = True
        eps_cells[i] = _cross_abs_mean(a, b)

    eps_bar = 0.0
    if m > 0:
        eps_bar = float(
            math.fsum((m_i[i] / m) * eps_cells[i] for i in occupied if m_i[i] > 0)
        )
    return PairStats(
        orig_counts=n_i,
        aug_counts=m_i,
        eps_cells=eps_cells,
        eps_bar=eps_bar,
        m=m,
        undefined_cells=tuple(undefined),
        approximate=approximate,
    )


def certify_aug(
    orig: SampleTable,
    orig_assign: Assignment,
    aug: SampleTable,
    aug_assign: Assignment,
    counts: CellCounts,
    params: BoundParams,
    max_pairs_per_cell: int | None = None,
) -> BoundReport:
    """Certificate with the sensitivity of the model to a transformation.

    ``main_part`` is eps_bar + mean augmented loss (+ proportion correction),
    the model-dependent quantity; the bound adds the count-based uncertainty
    term, which is common to all models on the same partition.  With the
    identity transformation and per-cell-constant losses this reduces exactly
    to :func:`certify` on the original sample.
    """
    if counts.k != params.k:
        raise InvalidInputError(f"counts length {counts.k} != K {params.k}")
    if len(orig) != params.n:
        raise InvalidInputError(f"{len(orig)} original losses but n={params.n}")
    recount = np.bincount(orig_assign.cells, minlength=params.k)
    if recount.size != counts.counts.size or not np.array_equal(recount, counts.counts):
        raise InvalidInputError("counts are inconsistent with the original assignment")
    for name, table in (("original", orig), ("augmented", aug)):
        if len(table) and float(table.losses.max()) > params.c_sup:
            raise LossCapError(
                f"max {name} loss {float(table.losses.max())} exceeds c_sup={params.c_sup}"
            )

    stats = pair_stats(
        orig, orig_assign, aug, aug_assign, params.k,
        max_pairs_per_cell=max_pairs_per_cell,
    )
    in_occupied = counts.counts[aug_assign.cells] > 0
    m = int(in_occupied.sum())
    if m == 0:
        raise InvalidInputError("no augmented sample falls in an occupied cell")
    f_aug = float(aug.losses[in_occupied].mean())

    n = params.n
    occupied = counts.occupied
    n_i = counts.counts
    m_i = stats.aug_counts
    matched = all(int(n_i[i]) * m == int(m_i[i]) * n for i in occupied)
    correction = 0.0
    if not matched:
        o_groups = _group_indices(orig_assign.cells, params.k)
        correction = float(
            math.fsum(
                (n_i[i] / n - m_i[i] / m) * float(orig.losses[o_groups[i]].mean())
                for i in occupied
            )
        )
    main_part = stats.eps_bar + f_aug + correction

    terms = bound_terms(counts, params)
    bound = main_part + terms.unc
    return BoundReport(
        params=params,
        terms=terms,
        t_size=counts.t_size,
        train_loss=float(orig.losses.mean()),
        bound=bound,
        confidence=params.confidence,
        vacuous=bound > params.c_sup,
        kind="augmented",
        corrected=not matched,
        main_part=main_part,
        sensitivity=stats.eps_bar,
        aug_loss=f_aug,
        correction=correction,
        dropped_aug=len(aug) - m,
        empty_aug_cells=len(stats.undefined_cells),
    )
