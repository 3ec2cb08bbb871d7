"""Root counting, fold curves, the n = 3 maximum study and the lemma checks.

Counts refer to solutions x of the reduced shape equation: each x is one
equivalence class (up to rotation and scaling) of the symmetric family.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import potential as pc
from .errors import FoldNotFoundError
from .rootfind import (
    Bracket,
    FoldPoint,
    Root,
    RootSet,
    bracket_roots,
    find_folds,
    refine_root,
    unit_grid,
)

LEMMA_IDS = (
    "A_n_negative",
    "kn_lower_bound",
    "lemma_main_smalln",
    "lemma_main_largen",
    "h3_positive",
    "n2_unique",
    "theorem2_counts",
    "n3_thresholds",
    "n3_monotone",
)

# lower end of every shape grid; F and h are flat near 0, so nothing is lost
_X_MIN = 2.0**-40
# the large-n argument works on (LEFT_END, 1)
LEFT_END = 0.54


def _workers() -> int:
    raw = os.environ.get("ROSETTE_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        k = 0
    return k if k > 0 else (os.cpu_count() or 1)


def _pmap(func: Callable, items: Sequence) -> list:
    """Ordered map, threaded when ROSETTE_THREADS allows more than one worker."""
    items = list(items)
    k = min(_workers(), len(items))
    if k <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(func, items))


# ---------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class CountResult:
    params: pc.RosetteParams
    count: int
    roots: RootSet
    used_duality: bool


def _shape_roots_unit(params: pc.RosetteParams, cells: int) -> list[float]:
    """Roots in (0, 1) of the shape equation, excluding x = 1 itself."""
    scale = max(1.0, params.mu)
    grid = unit_grid(cells)
    if params.epsilon == 1.0:
        # F vanishes identically at x = 1; track mu - h0 instead, which is smooth there
        def f(x):
            return (params.mu - pc.equal_mass_part(x, params.n)) / scale

        hi = 1.0
    else:
        def f(x):
            return pc.shape_residual(x, params) / scale

        hi = 1.0
    out = []
    for br in bracket_roots(f, _X_MIN, hi, grid=grid, vectorized=True):
        x, _ = refine_root(f, br)
        if params.epsilon == 1.0 and abs(x - 1.0) < 1e-9:
            continue
        out.append(x)
    return out


def _residual(x: float, params: pc.RosetteParams) -> float:
    return float(pc.shape_residual(x, params)) / max(1.0, params.mu)


def count_configurations(params: pc.RosetteParams, cells: int = 2048) -> CountResult:
    """All rosette central configurations for the given masses.

    epsilon > 1 is solved in the swapped frame (see ``RosetteParams.dual``)
    and mapped back.  For epsilon = 1 the symmetric shape x = 1 is always a
    root and is added explicitly.  The part of (1, inf) is searched as
    (0, 1) in the swapped frame, t = 1/x.
    """
    if params.epsilon > 1.0:
        inner = count_configurations(params.dual(), cells)
        flip = {"below_one": "above_one", "above_one": "below_one", "at_one": "at_one"}
        roots = tuple(
            Root(1.0 / r.x, _residual(1.0 / r.x, params), flip[r.interval_tag])
            for r in reversed(inner.roots.roots)
        )
        rs = RootSet(roots, params, inner.roots.grid_resolution)
        return CountResult(params, len(roots), rs, True)

    below = _shape_roots_unit(params, cells)
    above = [1.0 / t for t in reversed(_shape_roots_unit(params.dual(), cells))]
    roots = [Root(x, _residual(x, params), "below_one") for x in below]
    if params.epsilon == 1.0:
        roots.append(Root(1.0, _residual(1.0, params), "at_one"))
    roots += [Root(x, _residual(x, params), "above_one") for x in above]
    rs = RootSet(tuple(roots), params, 1.0 / cells)
    return CountResult(params, len(roots), rs, False)


# ---------------------------------------------------------------------------
# fold curves


@dataclass(frozen=True)
class CurvePoint:
    """One epsilon of a bifurcation curve.

    ``status`` is ``"fold"`` (a positive-mu fold), ``"negative"`` (the
    largest fold value is <= 0, so unreachable for a physical mass) or
    ``"not_found"`` (h monotone on (0, 1)).
    """

    epsilon: float
    mu0: float
    x_star: float
    status: str
    folds: tuple[FoldPoint, ...] = ()


def fold_on_unit(epsilon: float, n: int) -> CurvePoint:
    folds = tuple(find_folds(epsilon, n, (0.0, 1.0)))
    if not folds:
        return CurvePoint(epsilon, math.nan, math.nan, "not_found")
    top = max(folds, key=lambda fp: fp.mu0)
    status = "fold" if top.mu0 > 0 else "negative"
    return CurvePoint(epsilon, top.mu0, top.x_star, status, folds)


def bifurcation_curve(n: int, epsilon_grid: Iterable[float]) -> list[CurvePoint]:
    """mu0(epsilon) for the fold in (0, 1); non-positive and missing folds are recorded, not raised."""
    return _pmap(lambda e: fold_on_unit(float(e), n), list(epsilon_grid))


def default_epsilon_grid(count: int = 512) -> np.ndarray:
    return np.geomspace(1e-5, 1 - 1e-5, count)


# ---------------------------------------------------------------------------
# maximum of h on (0, 1)


def hmax(epsilon: float, n: int = 3, resolution: float = 1e-4) -> tuple[float, float]:
    """``(max_{x in [0,1)} h(x, eps), argmax)``: grid scan then refinement of h' = 0."""
    j = np.arange(1, 31, dtype=float)
    xs = np.unique(np.concatenate([np.arange(0.0, 1.0, resolution), 1.0 - 2.0**-j]))
    xs = xs[xs < 1.0 - 1e-12]
    vals = pc.center_mass(xs, epsilon, n)
    i = int(np.argmax(vals))
    if i == 0 or i == len(xs) - 1:
        return float(vals[i]), float(xs[i])

    def dh(x):
        return pc.center_mass_dx(x, epsilon, n)

    lo, hi = xs[i - 1], xs[i + 1]
    d_lo, d_hi = dh(lo), dh(hi)
    if not d_lo * d_hi < 0:
        return float(vals[i]), float(xs[i])
    x, _ = refine_root(dh, Bracket(lo, hi, d_lo, d_hi), tol_x=1e-12, tol_f=math.inf)
    value = pc.center_mass(x, epsilon, n)
    return float(max(value, vals[i])), float(x if value >= vals[i] else xs[i])


@dataclass(frozen=True)
class HmaxCurve:
    epsilon_grid: list[float]
    hmax_values: list[float]
    argmax_x: list[float]
    eps1: float
    eps2: float


def locate_sign_thresholds(n: int = 3, resolution: float = 1e-4) -> tuple[float, float]:
    """The two masses ratios where max_x h(x, eps) on (0, 1) crosses zero.

    Sign changes are bracketed on a log grid near 0 and a linear grid near
    1, then refined by bisection-safeguarded false position in epsilon.
    """

    def f(e):
        return hmax(e, n, resolution)[0]

    grids = (np.geomspace(1e-5, 0.5, 48), np.linspace(0.5, 1 - 1e-4, 48))
    found = []
    for g in grids:
        for br in bracket_roots(f, float(g[0]), float(g[-1]), grid=g, max_depth=0):
            e, _ = refine_root(f, br, tol_x=1e-14, tol_f=math.inf)
            found.append(e)
    if len(found) != 2:
        raise FoldNotFoundError(f"expected two sign changes of h_max, found {len(found)}")
    return found[0], found[1]


def scan_hmax_n3(epsilon_grid: Iterable[float], x_grid_resolution: float = 1e-4) -> HmaxCurve:
    eps = [float(e) for e in epsilon_grid]
    pairs = _pmap(lambda e: hmax(e, 3, x_grid_resolution), eps)
    e1, e2 = locate_sign_thresholds(3, x_grid_resolution)
    return HmaxCurve(eps, [p[0] for p in pairs], [p[1] for p in pairs], e1, e2)


# ---------------------------------------------------------------------------
# verification reports


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of one numerical check; ``passed`` holds exactly when ``worst_margin > 0``."""

    lemma_id: str
    n_range: tuple[int, int]
    passed: bool
    worst_margin: float
    worst_location: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lemma_id": self.lemma_id,
            "n_range": list(self.n_range),
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "worst_location": self.worst_location,
            "details": self.details,
        }


def _report(lemma_id, n_range, margins: Sequence[tuple[float, str]], **details) -> LemmaReport:
    if lemma_id not in LEMMA_IDS:
        raise ValueError(lemma_id)
    margin, where = min(margins, key=lambda m: m[0])
    return LemmaReport(lemma_id, tuple(n_range), bool(margin > 0), float(margin), where, details)


def verify_pole_coefficient(n_lo: int = 2, n_hi: int = 1000) -> LemmaReport:
    margins = [(-pc.pole_coefficient(n), f"n={n}") for n in range(n_lo, n_hi + 1)]
    return _report("A_n_negative", (n_lo, n_hi), margins)


def verify_polygon_lower_bound(n_lo: int = 3, n_hi: int = 1000) -> LemmaReport:
    lows = {n: pc.polygon_potential_lower(n) for n in range(n_lo, n_hi + 2)}
    margins = []
    for n in range(n_lo, n_hi + 1):
        margins.append((pc.polygon_potential(n) - lows[n], f"k_n - k_n^- at n={n}"))
        if n < n_hi:
            margins.append((lows[n + 1] - lows[n], f"k^- increment at n={n}"))
    return _report("kn_lower_bound", (n_lo, n_hi), margins)


def mismatch_roots(n: int, lo: float = LEFT_END, hi: float = 1.0, cells: int = 1024) -> list[float]:
    """Roots of h1 (equivalently of (1 - x^3) h1) on (lo, hi)."""

    def f(x):
        return pc.mismatch_numerator(x, n)

    return [
        refine_root(f, br, tol_f=math.inf)[0]
        for br in bracket_roots(f, lo, hi, initial_cells=cells, vectorized=True)
    ]


def _lemma_main_row(n: int) -> tuple[int, float, float, float, str]:
    roots = mismatch_roots(n)
    if not roots:
        return n, math.nan, math.nan, -1.0, f"no root of h1 in ({LEFT_END}, 1) at n={n}"
    h0s = [pc.equal_mass_part(x, n) for x in roots]
    k = int(np.argmax(h0s))
    x, h0 = roots[k], h0s[k]
    margin = min(h0, x - LEFT_END, 1.0 - x)
    return n, x, h0, margin, f"n={n}, x={x:.12g}"


def h3_samples(count: int = 4600) -> np.ndarray:
    """``count`` equally spaced interior points of (0.54, 1)."""
    return LEFT_END + (1.0 - LEFT_END) * np.arange(1, count + 1) / (count + 1)


def verify_h3_positive(n: int = 107, count: int = 4600) -> LemmaReport:
    xs = h3_samples(count)
    h3 = pc.lemma_bounds(xs, n).h3
    i = int(np.argmin(h3))
    return _report("h3_positive", (n, n), [(float(h3[i]), f"x={xs[i]:.12g}")], samples=int(count))


def _large_n_chain(n: int) -> list[tuple[float, str]]:
    low = pc.polygon_potential_lower(n)
    a_n = pc.pole_coefficient(n)
    tilde_left = pc.mismatch_numerator(LEFT_END, n)
    tilde_one = pc.mismatch_numerator(1.0, n)
    crude = n * (pc.polygon_potential(n) - LEFT_END**3 / (1 - LEFT_END) ** 2)
    floor = n * (low - 0.75)
    return [
        (floor, f"n(k_n^- - 3/4) at n={n}"),
        (tilde_left - crude, f"h1~(0.54) > n(k_n - 0.54^3/0.46^2) at n={n}"),
        (crude - floor, f"n(k_n - 0.54^3/0.46^2) > n(k_n^- - 3/4) at n={n}"),
        (1e-12 * max(1.0, abs(a_n)) - abs(tilde_one - a_n), f"h1~(1) = A_n at n={n}"),
        (-a_n, f"A_n < 0 at n={n}"),
    ]


def verify_lemma_main(n_lo: int = 4, n_hi: int = 106) -> tuple[LemmaReport, list[tuple[int, float, float]]]:
    """Root x_n* of h1 in (0.54, 1) with h0(x_n*) > 0, for each n in the range.

    For n >= 107 the analytic chain (k_n^- floor, h1~ at both ends and
    h3 > 0 at the smallest such n) is checked as well.  Returns the report
    and the rows ``(n, x_n_star, h0_at_root)``.
    """
    if n_lo < 4 or n_hi < n_lo:
        raise ValueError("need 4 <= n_lo <= n_hi")
    results = _pmap(_lemma_main_row, range(n_lo, n_hi + 1))
    margins = [(r[3], r[4]) for r in results]
    rows = [(r[0], r[1], r[2]) for r in results]
    large = [n for n in range(max(n_lo, 107), n_hi + 1)]
    for n in large:
        margins += _large_n_chain(n)
    if large:
        h3 = verify_h3_positive(large[0])
        margins.append((h3.worst_margin, f"h3 at n={large[0]}, {h3.worst_location}"))
    lemma_id = "lemma_main_largen" if n_lo >= 107 else "lemma_main_smalln"
    return _report(lemma_id, (n_lo, n_hi), margins), rows


def n3_exception() -> tuple[float, float]:
    """(x_3*, h0(x_3*)) for n = 3, where the root of h1 exists but h0 there is negative."""
    (x,) = mismatch_roots(3)
    return x, pc.equal_mass_part(x, 3)


def _count_margin(params: pc.RosetteParams, expected: int) -> tuple[float, str]:
    got = count_configurations(params).count
    return (1.0 if got == expected else -1.0), (
        f"n={params.n}, eps={params.epsilon:g}, mu={params.mu:.6g}: count {got}, expected {expected}"
    )


def verify_theorem2(n_lo: int = 3, n_hi: int = 8) -> LemmaReport:
    """Equal masses: 3 configurations below the critical central mass, 1 above; fold recovers it."""
    cases = []
    for n in range(n_lo, n_hi + 1):
        mc = pc.critical_center_mass(n)
        for factor, expected in ((0.25, 3), (0.5, 3), (2.0, 1), (10.0, 1)):
            cases.append((pc.RosetteParams(n, 1.0, factor * mc), expected))
    margins = _pmap(lambda c: _count_margin(*c), cases)
    for n in range(n_lo, n_hi + 1):
        mu0 = fold_on_unit(1.0, n).mu0
        margins.append((1e-8 - abs(mu0 - pc.critical_center_mass(n)), f"fold mu0 at n={n}"))
    return _report("theorem2_counts", (n_lo, n_hi), margins)


N2_MUS = (0.1, 0.5, 1.0, 1.74, 1.76, 5.0)
N2_EPSILONS = (0.05, 0.3, 0.6, 0.85, 0.9, 0.99)


def verify_n2_unique(mus=N2_MUS, epsilons=N2_EPSILONS) -> LemmaReport:
    cases = [pc.RosetteParams(2, e, m) for m in mus for e in epsilons]
    margins = _pmap(lambda p: _count_margin(p, 1), cases)
    return _report("n2_unique", (2, 2), margins, cases=len(cases))


def verify_n3_monotone_above_one(
    x_count: int = 400, epsilons: Sequence[float] = tuple(np.linspace(0.01, 0.99, 50))
) -> LemmaReport:
    """h decreasing in x on (1, inf) for n = 3, plus the sufficient pair h0' < 0, h0' + h1' < 0."""
    xs = np.geomspace(1 + 1e-6, 1e3, x_count)
    dh0, dh1 = pc.center_mass_parts_dx(xs, 3)
    margins = []
    i = int(np.argmax(dh0))
    margins.append((-float(dh0[i]), f"h0' at x={xs[i]:.6g}"))
    s = dh0 + dh1
    i = int(np.argmax(s))
    margins.append((-float(s[i]), f"h0'+h1' at x={xs[i]:.6g}"))
    for e in epsilons:
        d = pc.center_mass_dx(xs, e, 3)
        i = int(np.argmax(d))
        margins.append((-float(d[i]), f"h' at eps={e:.6g}, x={xs[i]:.6g}"))
    return _report("n3_monotone", (3, 3), margins)


def verify_n3_thresholds(resolution: float = 1e-4) -> LemmaReport:
    """Sign pattern of h_max for n = 3: positive, negative, positive across eps1 < eps2."""
    e1, e2 = locate_sign_thresholds(3, resolution)
    probe = np.concatenate([np.geomspace(1e-5, 0.999, 80)])
    margins = [(e2 - e1, "eps1 < eps2")]
    for e in probe:
        v = hmax(float(e), 3, resolution)[0]
        if e < e1 or e > e2:
            margins.append((v, f"h_max > 0 at eps={e:.6g}"))
        else:
            margins.append((-v, f"h_max < 0 at eps={e:.6g}"))
    x3, h03 = n3_exception()
    return _report("n3_thresholds", (3, 3), margins, eps1=e1, eps2=e2, x3_star=x3, h0_at_x3_star=h03)


# ---------------------------------------------------------------------------
# figure data


FIGURES = ("fig2", "fig3", "fig4a", "fig4b")


def figure_data(figure_id: str) -> tuple[list[str], list[tuple]]:
    """Column names and rows reproducing one of the figures."""
    if figure_id == "fig2":
        _, rows = verify_lemma_main(4, 106)
        return ["n", "x_n_star", "h0_at_root"], rows
    if figure_id == "fig3":
        xs = LEFT_END + 1e-3 * np.arange(1, 460)
        h3 = pc.lemma_bounds(xs, 107).h3
        return ["x", "h3"], list(zip(xs.tolist(), h3.tolist()))
    if figure_id in ("fig4a", "fig4b"):
        if figure_id == "fig4a":
            eps = 1e-3 * np.arange(1, 1000)
        else:
            eps = np.geomspace(1e-5, 2e-3, 200)
        vals = _pmap(lambda e: hmax(float(e), 3)[0], eps)
        return ["epsilon", "hmax"], list(zip(eps.tolist(), vals))
    raise ValueError(f"unknown figure {figure_id!r}; choose from {FIGURES}")
