"""Deterministic Monte Carlo verification of the distance concentration laws.

Each report function samples vertices or box points with counter-based
streams (see `rng`): the randomness of sample i depends only on
(seed, i), so a run gives bit-identical tallies for any worker count, and
workers merge by plain summation.

Interval membership |sqrt(d^2) - sqrt(A)| <= eps is decided in exact
rational arithmetic (no square roots are ever taken); floats appear only in
the reported proportions, bounds and cosines.

Bound arithmetic: the concentration laws are stated with eps = p^(-eta), so
p^(1-2*eta) = p*eps^2 and the explicit bounds evaluate as

  single distance to a fixed point:   1 - 22 / (p * eps^2)
  pair of distances to a fixed point: 1 - 44 / (p * eps^2)
  vertex-to-vertex distance:          1 -  2 / (p * eps^2)
  K-polytope (all C(K,2) edges):      1 - K(K-1) / (p * eps^2)

A bound <= 0 is vacuous: the report passes but is flagged and should be
excluded from aggregates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import rng
from .core import (
    BoxSpec,
    CyclotomicInt,
    DegenerateAngleError,
    FieldMismatchError,
    GuardError,
    north_pole_point,
)
from .moments import _vertex_matrix, avg_point_to_vertices, avg_vertex_pairs

__all__ = [
    "SamplerConfig",
    "IntervalSpec",
    "ConcentrationReport",
    "CounterStream",
    "within_sqrt_interval",
    "sample_vertex",
    "sample_box_point",
    "theorem4_report",
    "isosceles_report",
    "vertex_pair_report",
    "polytope_report",
    "right_angle_report",
    "pyramid_report",
]

EXHAUSTIVE_MAX_P = 17        # full vertex sweep
EXHAUSTIVE_MAX_P_PAIRS = 13  # full ordered-pair sweep


@dataclass(frozen=True)
class SamplerConfig:
    """Reproducible sampling run: same (seed, sample_count, worker_count)
    means bit-identical reports, and tallies do not depend on worker_count."""

    seed: int
    sample_count: int
    worker_count: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")


@dataclass(frozen=True)
class IntervalSpec:
    """Membership test |sqrt(d_sq) - sqrt(center_sq)| <= epsilon."""

    center_sq: Fraction
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center_sq", Fraction(self.center_sq))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.center_sq < 0:
            raise ValueError("center_sq must be nonnegative")


def within_sqrt_interval(d_sq, spec: IntervalSpec) -> bool:
    """Exact test of |sqrt(d_sq) - sqrt(A)| <= eps, A = spec.center_sq.

    Equivalent to: d + A - eps^2 <= 0, or (d + A - eps^2)^2 <= 4*A*d.
    """
    d = Fraction(d_sq)
    if d < 0:
        raise ValueError("d_sq must be nonnegative")
    lhs = d + spec.center_sq - spec.epsilon * spec.epsilon
    if lhs <= 0:
        return True
    return lhs * lhs <= 4 * spec.center_sq * d


class _IntervalTester:
    """Integer-only membership test for d^2 = n / d2 with fixed interval."""

    def __init__(self, spec: IntervalSpec, d2: int):
        a, e2 = spec.center_sq, spec.epsilon * spec.epsilon
        an, ad = a.numerator, a.denominator
        fn, fd = e2.numerator, e2.denominator
        self.c1 = ad * fd
        self.c0 = (an * fd - fn * ad) * d2
        self.c2 = 4 * an * ad * fd * fd * d2

    def member(self, n: int) -> bool:
        lhs = n * self.c1 + self.c0
        return lhs <= 0 or lhs * lhs <= self.c2 * n

    def mask(self, nvals: np.ndarray) -> np.ndarray:
        uniq, inv = np.unique(nvals, return_inverse=True)
        ok = np.array([self.member(int(u)) for u in uniq], dtype=bool)
        return ok[inv]


@dataclass(frozen=True)
class ConcentrationReport:
    theorem: str
    p: int
    N: int
    hits: int
    trials: int
    empirical_proportion: float
    bound: Optional[float]
    bound_formula: str
    passed: bool
    vacuous: bool
    seed: int
    sample_count: int
    worker_count: int
    exhaustive: bool = False
    alpha: Optional[str] = None
    K: Optional[int] = None
    T: Optional[float] = None
    epsilon: Optional[str] = None
    epsilon_float: Optional[float] = None
    eta: Optional[float] = None
    center_sq: Optional[str] = None
    extra: dict = field(default_factory=dict)


# --- streams and single-point sampling ---------------------------------------

class CounterStream:
    """Hands out consecutive per-point stream indices for a fixed seed."""

    def __init__(self, seed: int, start: int = 0):
        self.seed = seed
        self.index = start

    def take(self, n: int = 1) -> int:
        first = self.index
        self.index += n
        return first


def sample_vertex(box: BoxSpec, stream: CounterStream) -> CyclotomicInt:
    """Uniform vertex: p-1 independent sign bits scaled by N."""
    signs = rng.vertex_signs(stream.seed, stream.take(), 1, box.dim)[0]
    return CyclotomicInt(box.p, tuple(int(s) * box.N for s in signs))


def sample_box_point(box: BoxSpec, stream: CounterStream) -> CyclotomicInt:
    """Uniform box point: coefficients i.i.d. uniform on {-N, ..., N}."""
    offs = rng.box_offsets(stream.seed, stream.take(), 1, box.dim, box.N)[0]
    return CyclotomicInt(box.p, tuple(int(o) for o in offs))


# --- engine -------------------------------------------------------------------

_BATCH_ELEMENTS = 1 << 21  # per-batch int64 budget, ~16 MB per temporary


def _chunk_ranges(total: int, unit_dim: int) -> list:
    """Split [0, total) into batches small enough to keep temporaries bounded.

    The split depends only on `total` and the row width, never on the worker
    count, and tallies are summed, so results are worker-count independent.
    """
    batch = max(1, _BATCH_ELEMENTS // max(unit_dim, 1))
    return [(lo, min(lo + batch, total)) for lo in range(0, total, batch)]


def _run_chunks(fn, total: int, workers: int, unit_dim: int = 1) -> list:
    ranges = _chunk_ranges(total, unit_dim)
    if workers <= 1 or len(ranges) <= 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(fn, a, b) for a, b in ranges]
        return [f.result() for f in futures]


def _norm_vals(p: int, diff: np.ndarray) -> np.ndarray:
    q = np.sum(diff * diff, axis=-1)
    s = np.sum(diff, axis=-1)
    return p * p * q - (p + 1) * s * s


def _norm_vals_checked(p: int, diff: np.ndarray, diff_max: int, dim: int) -> np.ndarray:
    bound = p * p * dim * diff_max * diff_max + (p + 1) * (dim * diff_max) ** 2
    if bound < 2 ** 62:
        return _norm_vals(p, diff)
    return _norm_vals(p, diff.astype(object))


def _exact_sum(nvals: np.ndarray) -> int:
    if nvals.dtype == object:
        return int(sum(int(v) for v in nvals))
    if len(nvals) == 0:
        return 0
    if len(nvals) * int(np.max(np.abs(nvals))) < 2 ** 62:
        return int(np.sum(nvals))
    return int(sum(int(v) for v in nvals))


def _eta_of(p: int, eps: Fraction) -> float:
    return math.log(1.0 / float(eps)) / math.log(p)


def _bound(p: int, eps: Fraction, constant: float):
    """1 - constant / p^(1-2*eta) with eps = p^(-eta); p^(1-2*eta) = p*eps^2."""
    return 1.0 - constant / (p * float(eps) ** 2)


def _alpha_label(alpha: CyclotomicInt) -> str:
    if alpha.is_zero():
        return "origin"
    box_n = max(abs(c) for c in alpha.coeffs)
    if alpha.coeffs == north_pole_point(BoxSpec(alpha.p, box_n)).coeffs:
        return "north-pole"
    if len(alpha.coeffs) <= 16:
        return "coeffs:" + ",".join(str(c) for c in alpha.coeffs)
    return f"custom(trace={alpha.trace()},eucl_sq={alpha.euclid_norm_sq()})"


def _finish(theorem, box, cfg, hits, trials, bound, formula, *, exhaustive=False,
            alpha=None, K=None, T=None, eps=None, eta=None, center_sq=None, extra=None):
    proportion = hits / trials if trials else float("nan")
    vacuous = bound is not None and bound <= 0.0
    passed = vacuous or (bound is not None and proportion >= bound)
    return ConcentrationReport(
        theorem=theorem,
        p=box.p,
        N=box.N,
        hits=int(hits),
        trials=int(trials),
        empirical_proportion=proportion,
        bound=bound,
        bound_formula=formula,
        passed=bool(passed),
        vacuous=bool(vacuous),
        seed=cfg.seed,
        sample_count=cfg.sample_count,
        worker_count=cfg.worker_count,
        exhaustive=exhaustive,
        alpha=alpha,
        K=K,
        T=T,
        epsilon=None if eps is None else f"{eps.numerator}/{eps.denominator}",
        epsilon_float=None if eps is None else float(eps),
        eta=eta,
        center_sq=None if center_sq is None else f"{center_sq.numerator}/{center_sq.denominator}",
        extra=extra or {},
    )


# --- theorem reports ----------------------------------------------------------

def theorem4_report(alpha: CyclotomicInt, box: BoxSpec, eps, cfg: SamplerConfig,
                    exhaustive: bool = False) -> ConcentrationReport:
    """Distances from a fixed point to vertices concentrate at sqrt(A(alpha))."""
    if alpha.p != box.p:
        raise FieldMismatchError("alpha and box disagree on p")
    eps = Fraction(eps)
    a_val = avg_point_to_vertices(alpha, box)
    tester = _IntervalTester(IntervalSpec(a_val, eps), box.diameter_sq())
    amax = max(abs(c) for c in alpha.coeffs)
    avec = np.array(alpha.coeffs, dtype=np.int64 if amax < 2 ** 53 else object)
    diff_max = box.N + amax

    if exhaustive:
        v = _vertex_matrix(box)  # guards p <= 17
        nvals = _norm_vals_checked(box.p, v - avec[None, :], diff_max, box.dim)
        hits, trials = int(np.sum(tester.mask(nvals))), len(v)
    else:
        def work(start, stop):
            x = rng.vertex_signs(cfg.seed, start, stop - start, box.dim) * box.N
            nvals = _norm_vals_checked(box.p, x - avec[None, :], diff_max, box.dim)
            return int(np.sum(tester.mask(nvals)))

        hits = sum(_run_chunks(work, cfg.sample_count, cfg.worker_count, box.dim))
        trials = cfg.sample_count

    return _finish(
        "T4", box, cfg, hits, trials, _bound(box.p, eps, 22.0),
        "1 - 22/p^(1-2*eta)", exhaustive=exhaustive, alpha=_alpha_label(alpha),
        eps=eps, eta=_eta_of(box.p, eps), center_sq=a_val,
    )


def isosceles_report(alpha: CyclotomicInt, box: BoxSpec, eps, cfg: SamplerConfig) -> ConcentrationReport:
    """Both legs from a fixed point to two random vertices share the interval."""
    if alpha.p != box.p:
        raise FieldMismatchError("alpha and box disagree on p")
    eps = Fraction(eps)
    a_val = avg_point_to_vertices(alpha, box)
    tester = _IntervalTester(IntervalSpec(a_val, eps), box.diameter_sq())
    amax = max(abs(c) for c in alpha.coeffs)
    avec = np.array(alpha.coeffs, dtype=np.int64 if amax < 2 ** 53 else object)
    diff_max = box.N + amax

    def work(start, stop):
        cnt = stop - start
        signs = rng.vertex_signs(cfg.seed, 2 * start, 2 * cnt, box.dim) * box.N
        m1 = tester.mask(_norm_vals_checked(box.p, signs[0::2] - avec, diff_max, box.dim))
        m2 = tester.mask(_norm_vals_checked(box.p, signs[1::2] - avec, diff_max, box.dim))
        return int(np.sum(m1 & m2))

    hits = sum(_run_chunks(work, cfg.sample_count, cfg.worker_count, 2 * box.dim))
    return _finish(
        "isosceles", box, cfg, hits, cfg.sample_count, _bound(box.p, eps, 44.0),
        "1 - 44/p^(1-2*eta)", alpha=_alpha_label(alpha),
        eps=eps, eta=_eta_of(box.p, eps), center_sq=a_val,
    )


def vertex_pair_report(box: BoxSpec, eps, cfg: SamplerConfig,
                       exhaustive: bool = False) -> ConcentrationReport:
    """Vertex-to-vertex distances concentrate at sqrt(A(V,V)) ~ 1/sqrt(2).

    The report also counts membership in the interval centered at the limit
    value 1/sqrt(2) (`hits_half`), and carries the exact sample mean of the
    normalized squared distance.
    """
    eps = Fraction(eps)
    a_vv = avg_vertex_pairs(box)
    d2 = box.diameter_sq()
    tester = _IntervalTester(IntervalSpec(a_vv, eps), d2)
    tester_half = _IntervalTester(IntervalSpec(Fraction(1, 2), eps), d2)

    if exhaustive:
        if box.p > EXHAUSTIVE_MAX_P_PAIRS:
            raise GuardError(f"pairwise sweep refuses p={box.p} > {EXHAUSTIVE_MAX_P_PAIRS}")
        v = _vertex_matrix(box)
        n = len(v)
        hits = hits_half = 0
        total_d2 = 0
        chunk = max(1, (1 << 22) // (n * box.dim))
        for lo in range(0, n, chunk):
            diff = v[lo : lo + chunk, None, :] - v[None, :, :]
            nvals = _norm_vals_checked(box.p, diff, 2 * box.N, box.dim).reshape(-1)
            hits += int(np.sum(tester.mask(nvals)))
            hits_half += int(np.sum(tester_half.mask(nvals)))
            total_d2 += _exact_sum(nvals)
        trials = n * n
    else:
        def work(start, stop):
            cnt = stop - start
            signs = rng.vertex_signs(cfg.seed, 2 * start, 2 * cnt, box.dim) * box.N
            nvals = _norm_vals_checked(box.p, signs[0::2] - signs[1::2], 2 * box.N, box.dim)
            return (
                int(np.sum(tester.mask(nvals))),
                int(np.sum(tester_half.mask(nvals))),
                _exact_sum(nvals),
            )

        parts = _run_chunks(work, cfg.sample_count, cfg.worker_count, 2 * box.dim)
        hits = sum(x[0] for x in parts)
        hits_half = sum(x[1] for x in parts)
        total_d2 = sum(x[2] for x in parts)
        trials = cfg.sample_count

    mean_d2 = Fraction(total_d2, trials * d2)
    return _finish(
        "T5", box, cfg, hits, trials, _bound(box.p, eps, 2.0),
        "1 - 2/p^(1-2*eta)", exhaustive=exhaustive,
        eps=eps, eta=_eta_of(box.p, eps), center_sq=a_vv,
        extra={
            "hits_half": hits_half,
            "proportion_half": hits_half / trials,
            "mean_dist_sq": f"{mean_d2.numerator}/{mean_d2.denominator}",
            "mean_dist_sq_float": float(mean_d2),
        },
    )


def polytope_report(box: BoxSpec, K: int, T: float, cfg: SamplerConfig) -> ConcentrationReport:
    """All C(K,2) edges of a random K-polytope land within 1/T of 1/sqrt(2)."""
    if K < 2:
        raise ValueError("a K-polytope needs K >= 2")
    if not T > 1:
        raise ValueError("need T > 1")
    eps = 1 / Fraction(T)  # exact reciprocal of the given (possibly float) T
    tester = _IntervalTester(IntervalSpec(Fraction(1, 2), eps), box.diameter_sq())

    def work(start, stop):
        cnt = stop - start
        signs = rng.vertex_signs(cfg.seed, K * start, K * cnt, box.dim) * box.N
        pts = signs.reshape(cnt, K, box.dim)
        ok = np.ones(cnt, dtype=bool)
        for j in range(K):
            for k in range(j + 1, K):
                nvals = _norm_vals_checked(box.p, pts[:, j] - pts[:, k], 2 * box.N, box.dim)
                ok &= tester.mask(nvals)
        return int(np.sum(ok))

    hits = sum(_run_chunks(work, cfg.sample_count, cfg.worker_count, K * box.dim))
    eta = math.log(float(T)) / math.log(box.p)
    bound = 1.0 - K * (K - 1) * float(T) ** 2 / box.p
    return _finish(
        "k_polytope", box, cfg, hits, cfg.sample_count, bound,
        "1 - K(K-1)/p^(1-2*eta) (union bound over C(K,2) edges)",
        K=K, T=float(T), eps=eps, eta=eta, center_sq=Fraction(1, 2),
    )


def right_angle_report(alpha: CyclotomicInt, box: BoxSpec, eps_cos: float,
                       cfg: SamplerConfig, target: float = 0.95) -> ConcentrationReport:
    """Central angles between a fixed point and random vertices are near 90 deg.

    Counts |cos(angle)| <= eps_cos exactly (squared comparison on integers).
    The decay constant of the underlying theorem is not numeric, so `target`
    is a pilot-calibrated acceptance proportion; the report also carries the
    theoretical decay proxy 2*sqrt(3/p) and the median observed |cos|.
    """
    if alpha.p != box.p:
        raise FieldMismatchError("alpha and box disagree on p")
    na = alpha.norm_sq()
    if na == 0:
        raise DegenerateAngleError("alpha must be nonzero")
    eps_frac = Fraction(eps_cos)
    if eps_frac <= 0:
        raise ValueError("eps_cos must be positive")
    en2 = eps_frac.numerator ** 2
    ed2 = eps_frac.denominator ** 2
    p, n_box = box.p, box.N
    tr_a = alpha.trace()
    amax = max(abs(c) for c in alpha.coeffs)
    inner_bound = p * p * box.dim * n_box * amax + (p + 1) * box.dim * n_box * box.dim * amax
    dtype = np.int64 if inner_bound < 2 ** 62 else object
    avec = np.array(alpha.coeffs, dtype=dtype)

    def work(start, stop):
        signs = rng.vertex_signs(cfg.seed, start, stop - start, box.dim)
        x = (signs * n_box).astype(dtype)
        tr_x = -np.sum(x, axis=1)
        inner = p * p * (x @ avec) - (p + 1) * tr_x * tr_a
        nb = p * p * (p - 1) * n_box * n_box - (p + 1) * tr_x * tr_x
        inner_o = inner.astype(object)
        nb_o = nb.astype(object)
        ok = (inner_o * inner_o) * ed2 <= en2 * na * nb_o
        cos_abs = np.abs(inner.astype(np.float64)) / np.sqrt(float(na) * nb.astype(np.float64))
        return int(np.sum(ok)), cos_abs

    parts = _run_chunks(work, cfg.sample_count, cfg.worker_count, box.dim)
    hits = sum(x[0] for x in parts)
    cos_all = np.concatenate([x[1] for x in parts])
    d_origin = Fraction(na, box.diameter_sq())
    return _finish(
        "right_angle", box, cfg, hits, cfg.sample_count, float(target),
        "pilot-calibrated target (decay proxy 2*sqrt(3/p))",
        alpha=_alpha_label(alpha), eps=eps_frac,
        extra={
            "eps_cos": float(eps_cos),
            "median_abs_cos": float(np.median(cos_all)),
            "origin_dist_sq": f"{d_origin.numerator}/{d_origin.denominator}",
            "origin_dist": math.sqrt(d_origin),
            "decay_proxy": 2.0 * math.sqrt(3.0 / box.p),
        },
    )


def pyramid_report(apex: CyclotomicInt, box: BoxSpec, K: int, eps,
                   cfg: SamplerConfig) -> ConcentrationReport:
    """Pyramids over random K-polytope bases with a fixed apex in the box.

    A pyramid counts as a hit when every base edge/diagonal is within eps of
    1/sqrt(2) and every lateral edge is within eps of its own center: the
    apex average sqrt(A(apex)) in general, or 1/2 when the apex sits within
    eps of the origin (then (1/2)^2 + (1/2)^2 = (1/sqrt(2))^2 holds exactly,
    and the report annotates the Pythagorean identity).
    """
    if K < 2:
        raise ValueError("a pyramid needs a base polytope with K >= 2")
    if not box.contains(apex):
        raise ValueError("apex must lie inside the box")
    eps = Fraction(eps)
    d2 = box.diameter_sq()
    d_apex_sq = Fraction(apex.norm_sq(), d2)
    apex_near_origin = d_apex_sq <= eps * eps
    lateral_center = Fraction(1, 4) if apex_near_origin else avg_point_to_vertices(apex, box)
    base_tester = _IntervalTester(IntervalSpec(Fraction(1, 2), eps), d2)
    lat_tester = _IntervalTester(IntervalSpec(lateral_center, eps), d2)
    avec = np.array(apex.coeffs, dtype=np.int64)
    diff_max = 2 * box.N

    def work(start, stop):
        cnt = stop - start
        signs = rng.vertex_signs(cfg.seed, K * start, K * cnt, box.dim) * box.N
        pts = signs.reshape(cnt, K, box.dim)
        ok = np.ones(cnt, dtype=bool)
        for j in range(K):
            for k in range(j + 1, K):
                nvals = _norm_vals_checked(box.p, pts[:, j] - pts[:, k], diff_max, box.dim)
                ok &= base_tester.mask(nvals)
        for j in range(K):
            nvals = _norm_vals_checked(box.p, pts[:, j] - avec[None, :], diff_max, box.dim)
            ok &= lat_tester.mask(nvals)
        return int(np.sum(ok))

    hits = sum(_run_chunks(work, cfg.sample_count, cfg.worker_count, K * box.dim))
    bound = _bound(box.p, eps, float(K * (K - 1) + 22 * K))
    return _finish(
        "pyramid", box, cfg, hits, cfg.sample_count, bound,
        "1 - (K(K-1) + 22K)/p^(1-2*eta) (base union bound + lateral bound)",
        alpha=_alpha_label(apex), K=K, eps=eps, eta=_eta_of(box.p, eps),
        center_sq=lateral_center,
        extra={
            "apex_near_origin": bool(apex_near_origin),
            "pythagorean_exact": Fraction(1, 4) + Fraction(1, 4) == Fraction(1, 2),
            "apex_dist_sq": f"{d_apex_sq.numerator}/{d_apex_sq.denominator}",
        },
    )
