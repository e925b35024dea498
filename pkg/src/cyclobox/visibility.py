"""Lattice-point visibility and concentration of self-visible polytopes.

Two box points see each other when no third lattice point of the box lies
strictly between them on the segment.  In coefficient space that is exactly
primitivity of the difference vector: if g = gcd of the coefficient
differences were larger than 1, the point alpha + (beta - alpha)/g would be
an intervening lattice point (its coefficients sit between the endpoints',
so it stays inside the box); if g = 1 no intermediate integer point exists.

Pairwise distances between uniform box points concentrate at 1/sqrt(6): the
exact mean of the normalized squared distance is

    (N+1) * (p^2 - p - 1) / (6 * N * p^2)  ->  1/6  as p, N -> infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import rng
from .concentration import (
    CounterStream,
    IntervalSpec,
    SamplerConfig,
    _exact_sum,
    _IntervalTester,
    _norm_vals_checked,
    _run_chunks,
)
from .core import BoxSpec, CyclotomicInt, FieldMismatchError, GuardError

__all__ = [
    "VisibilityReport",
    "is_visible",
    "mean_box_pair_dist_sq",
    "oracle_mean_box_pair_dist_sq",
    "box_pair_mean_report",
    "sample_self_visible_polytope",
    "visibility_concentration_report",
]


def is_visible(alpha: CyclotomicInt, beta: CyclotomicInt) -> bool:
    """True iff the coefficient difference vector is primitive (gcd 1)."""
    if alpha.p != beta.p:
        raise FieldMismatchError("points live in different fields")
    diffs = [abs(b - a) for a, b in zip(alpha.coeffs, beta.coeffs)]
    if not any(diffs):
        raise ValueError("visibility undefined for a degenerate (equal) pair")
    return math.gcd(*diffs) == 1


def mean_box_pair_dist_sq(box: BoxSpec) -> Fraction:
    """Exact mean of d^2 over independent uniform box-point pairs."""
    p, N = box.p, box.N
    return Fraction((N + 1) * (p * p - p - 1), 6 * N * p * p)


def oracle_mean_box_pair_dist_sq(box: BoxSpec) -> Fraction:
    """The same mean by full enumeration of ordered box-point pairs."""
    npts = box.num_points()
    if npts > 1 << 12:
        raise GuardError(f"pair enumeration refuses {npts}^2 ordered pairs")
    pts = np.array([pt.coeffs for pt in box.points()], dtype=np.int64)
    total = 0
    for row in pts:
        nvals = _norm_vals_checked(box.p, pts - row[None, :], 2 * box.N, box.dim)
        total += _exact_sum(nvals)
    return Fraction(total, npts * npts * box.diameter_sq())


def box_pair_mean_report(box: BoxSpec, cfg: SamplerConfig) -> Fraction:
    """Exact sample mean of d^2 over cfg.sample_count uniform box-point pairs."""

    def work(start, stop):
        cnt = stop - start
        pts = rng.box_offsets(cfg.seed, 2 * start, 2 * cnt, box.dim, box.N)
        nvals = _norm_vals_checked(box.p, pts[0::2] - pts[1::2], 2 * box.N, box.dim)
        return _exact_sum(nvals)

    total = sum(_run_chunks(work, cfg.sample_count, cfg.worker_count, 2 * box.dim))
    return Fraction(total, cfg.sample_count * box.diameter_sq())


def _pairwise_visible(pts: np.ndarray) -> np.ndarray:
    """(count,) mask: all C(K,2) difference vectors of each tuple primitive."""
    count, k, _ = pts.shape
    ok = np.ones(count, dtype=bool)
    for j in range(k):
        for m in range(j + 1, k):
            g = np.gcd.reduce(np.abs(pts[:, j] - pts[:, m]), axis=-1)
            ok &= g == 1
    return ok


def _sample_visible_tuples(seed: int, box: BoxSpec, K: int, start: int, stop: int,
                           max_attempts: int):
    """Self-visible K-tuples for tuple indices [start, stop).

    Tuple t, retry a, member m reads stream (t*max_attempts + a)*K + m, so
    the result is a pure function of (seed, t).  Returns the points and the
    number of draw attempts made per tuple.
    """
    count = stop - start
    dim, n_box = box.dim, box.N
    pts = np.empty((count, K, dim), dtype=np.int64)
    attempts = np.zeros(count, dtype=np.int64)
    active = np.arange(count)
    members = np.arange(K, dtype=np.uint64)
    while active.size:
        if attempts[active[0]] >= max_attempts:
            raise GuardError(
                f"no self-visible {K}-tuple within {max_attempts} attempts "
                f"(p={box.p}, N={box.N})"
            )
        with np.errstate(over="ignore"):
            tuple_ids = (np.uint64(start) + active.astype(np.uint64))
            bases = (tuple_ids * np.uint64(max_attempts)
                     + attempts[active].astype(np.uint64)) * np.uint64(K)
            streams = (bases[:, None] + members[None, :]).ravel()
        fresh = rng.box_offsets_at(seed, streams, dim, n_box).reshape(len(active), K, dim)
        pts[active] = fresh
        attempts[active] += 1
        ok = _pairwise_visible(fresh)
        active = active[~ok]
    return pts, attempts


def sample_self_visible_polytope(box: BoxSpec, K: int, stream: CounterStream,
                                 max_attempts: int = 64) -> tuple:
    """One self-visible K-tuple of box points, by rejection sampling."""
    if K < 2:
        raise ValueError("need K >= 2")
    t = stream.take()
    pts, _ = _sample_visible_tuples(stream.seed, box, K, t, t + 1, max_attempts)
    return tuple(CyclotomicInt(box.p, tuple(int(c) for c in row)) for row in pts[0])


@dataclass(frozen=True)
class VisibilityReport:
    p: int
    N: int
    K: int
    sample_count: int
    visible_fraction: float
    proportion_near_center: float
    center: float
    center_sq: str
    epsilon: float
    target: float
    passed: bool
    seed: int
    worker_count: int
    np_ratio: float
    np_ratio_warning: bool
    mean_dist_sq: str
    mean_dist_sq_float: float
    extra: dict = field(default_factory=dict)


def visibility_concentration_report(box: BoxSpec, K: int, eps: float,
                                    cfg: SamplerConfig,
                                    max_attempts: int = 64) -> VisibilityReport:
    """Sample self-visible K-tuples and count those with every pairwise
    normalized distance within eps of 1/sqrt(6).

    The acceptance target is the property-style 1 - eps; the constant in the
    underlying limit law is not effective, so small p or small N/p can fall
    short of it, and the report records N/p (with a warning below 10).
    """
    if K < 2:
        raise ValueError("need K >= 2")
    eps_frac = Fraction(eps)
    d2 = box.diameter_sq()
    tester = _IntervalTester(IntervalSpec(Fraction(1, 6), eps_frac), d2)

    def work(start, stop):
        pts, attempts = _sample_visible_tuples(cfg.seed, box, K, start, stop, max_attempts)
        ok = np.ones(stop - start, dtype=bool)
        total_d2 = 0
        n_edges = 0
        for j in range(K):
            for m in range(j + 1, K):
                nvals = _norm_vals_checked(box.p, pts[:, j] - pts[:, m], 2 * box.N, box.dim)
                ok &= tester.mask(nvals)
                total_d2 += _exact_sum(nvals)
                n_edges += len(nvals)
        return int(np.sum(ok)), int(np.sum(attempts)), total_d2, n_edges

    parts = _run_chunks(work, cfg.sample_count, cfg.worker_count, K * box.dim)
    hits = sum(x[0] for x in parts)
    attempts = sum(x[1] for x in parts)
    total_d2 = sum(x[2] for x in parts)
    n_edges = sum(x[3] for x in parts)
    proportion = hits / cfg.sample_count
    mean_d2 = Fraction(total_d2, n_edges * d2)
    target = 1.0 - float(eps)
    np_ratio = box.N / box.p
    return VisibilityReport(
        p=box.p,
        N=box.N,
        K=K,
        sample_count=cfg.sample_count,
        visible_fraction=cfg.sample_count / attempts,
        proportion_near_center=proportion,
        center=1.0 / math.sqrt(6.0),
        center_sq="1/6",
        epsilon=float(eps),
        target=target,
        passed=proportion >= target,
        seed=cfg.seed,
        worker_count=cfg.worker_count,
        np_ratio=np_ratio,
        np_ratio_warning=np_ratio < 10.0,
        mean_dist_sq=f"{mean_d2.numerator}/{mean_d2.denominator}",
        mean_dist_sq_float=float(mean_d2),
    )
