"""Deterministic one-dimensional root machinery.

Sign-change bracketing on fixed (optionally adaptive) grids, bracketed
refinement by Illinois false position with a bisection safeguard, and the
fold solver for the simultaneous system F = 0, dF/dx = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from . import potential as pc
from .errors import ConvergenceError, DomainError, EvaluationError, FoldNotFoundError, FoldSuspectedError

TOL_X = 1e-13
TOL_F = 1e-11
MAX_ITER = 200
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if not self.f_lo * self.f_hi < 0:
            raise DomainError("bracket needs a strict sign change")


IntervalTag = Literal["below_one", "at_one", "above_one"]


@dataclass(frozen=True)
class Root:
    x: float
    residual: float
    interval_tag: IntervalTag


@dataclass(frozen=True)
class RootSet:
    """Transversal roots of the shape equation, sorted by x.

    ``residual`` is ``F(x, params) / max(1, mu)``.
    """

    roots: tuple[Root, ...]
    params: pc.RosetteParams
    grid_resolution: float

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def xs(self) -> list[float]:
        return [r.x for r in self.roots]


@dataclass(frozen=True)
class FoldPoint:
    """A double root of the shape equation: h(x*) = mu0 and h'(x*) = 0.

    ``curvature`` is h''(x*); the fold is flagged ``degenerate`` when it is
    numerically zero.
    """

    x_star: float
    mu0: float
    epsilon: float
    n: int
    condition_residuals: tuple[float, float]
    curvature: float
    degenerate: bool

    @property
    def kind(self) -> str:
        return "max" if self.curvature < 0 else "min"


# ---------------------------------------------------------------------------
# bracketing


def _evaluate(f, xs: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        fs = np.asarray(f(xs), dtype=float)
    else:
        fs = np.array([f(float(x)) for x in xs], dtype=float)
    bad = ~np.isfinite(fs)
    if bad.any():
        raise EvaluationError("non-finite function value", float(xs[np.argmax(bad)]))
    return fs


def _refine_minima(f, xs, fs, depth, max_depth, vectorized):
    """Subdivide around interior local minima of |f| that show no sign change."""
    if depth >= max_depth or len(xs) < 3:
        return xs, fs
    a = np.abs(fs)
    same = (np.sign(fs[:-2]) == np.sign(fs[1:-1])) & (np.sign(fs[1:-1]) == np.sign(fs[2:]))
    is_min = same & (a[1:-1] < a[:-2]) & (a[1:-1] < a[2:])
    # an exact zero flanked by one sign may hide a second, nearby root
    is_min |= (fs[1:-1] == 0) & (np.sign(fs[:-2]) * np.sign(fs[2:]) > 0)
    idx = np.nonzero(is_min)[0] + 1
    if idx.size == 0:
        return xs, fs
    new_x = []
    for i in idx:
        lo, hi = xs[i - 1], xs[i + 1]
        if hi - lo < 64 * _EPS * max(1.0, abs(hi)):
            continue
        new_x.append(np.linspace(lo, hi, 9)[1:-1])
    if not new_x:
        return xs, fs
    add = np.setdiff1d(np.concatenate(new_x), xs)
    if add.size == 0:
        return xs, fs
    fa = _evaluate(f, add, vectorized)
    order = np.argsort(np.concatenate([xs, add]), kind="stable")
    xs = np.concatenate([xs, add])[order]
    fs = np.concatenate([fs, fa])[order]
    return _refine_minima(f, xs, fs, depth + 1, max_depth, vectorized)


def bracket_roots(
    f: Callable,
    lo: float,
    hi: float,
    initial_cells: int = 64,
    max_depth: int = 12,
    *,
    grid: Sequence[float] | None = None,
    vectorized: bool = False,
) -> list[Bracket]:
    """Disjoint sign-change brackets of ``f`` on ``[lo, hi]``.

    The search grid is ``initial_cells`` uniform cells unless ``grid`` is
    given (it is then clipped to [lo, hi] and the endpoints added).  Around
    every interior local minimum of ``|f|`` without a sign change the grid
    is subdivided, up to ``max_depth`` times, so that two close roots are
    separated.  With ``vectorized=True`` ``f`` is called once per pass on an
    array.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    if initial_cells < 8:
        raise DomainError("initial_cells must be >= 8")
    if grid is None:
        xs = np.linspace(lo, hi, initial_cells + 1)
    else:
        g = np.asarray(grid, dtype=float)
        xs = np.unique(np.concatenate([[lo, hi], g[(g > lo) & (g < hi)]]))
    fs = _evaluate(f, xs, vectorized)
    xs, fs = _refine_minima(f, xs, fs, 0, max_depth, vectorized)

    s = np.sign(fs)
    out: list[Bracket] = []
    i = 0
    while i < len(xs) - 1:
        if s[i] * s[i + 1] < 0:
            out.append(Bracket(float(xs[i]), float(xs[i + 1]), float(fs[i]), float(fs[i + 1])))
        elif s[i + 1] == 0 and 0 < i + 2 < len(xs) and s[i] * s[i + 2] < 0:
            # sample landed exactly on a root
            out.append(Bracket(float(xs[i]), float(xs[i + 2]), float(fs[i]), float(fs[i + 2])))
            i += 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# refinement


def refine_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol_x: float = TOL_X,
    tol_f: float = TOL_F,
    max_iter: int = MAX_ITER,
) -> tuple[float, float]:
    """Refine a bracketed root; returns ``(x, f(x))``.

    Illinois false position, falling back to bisection whenever the bracket
    fails to halve over three steps.  Stops when the bracket is narrower
    than ``tol_x`` (plus a few ulps of x) or f hits zero exactly.

    Raises :class:`FoldSuspectedError` when the bracket has collapsed but
    both endpoint residuals stay above ``tol_f`` (a jump rather than a
    crossing), and :class:`ConvergenceError` after ``max_iter`` steps.
    """
    a, b, fa, fb = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    side = 0
    width_ref = b - a
    stale = 0
    for _ in range(max_iter):
        width = b - a
        if width <= tol_x + 4 * _EPS * max(abs(a), abs(b)):
            break
        if stale >= 3:
            c = 0.5 * (a + b)
            stale = 0
            width_ref = width
        else:
            c = (a * fb - b * fa) / (fb - fa)
            if not a < c < b:
                c = 0.5 * (a + b)
        fc = float(f(c))
        if not math.isfinite(fc):
            raise EvaluationError("non-finite function value", c)
        if fc == 0.0:
            return c, 0.0
        if (fc > 0) == (fb > 0):
            b, fb = c, fc
            if side == 1:
                fa *= 0.5
            side = 1
        else:
            a, fa = c, fc
            if side == -1:
                fb *= 0.5
            side = -1
        if b - a > 0.5 * width_ref:
            stale += 1
        else:
            width_ref = b - a
            stale = 0
    else:
        best = a if abs(fa) < abs(fb) else b
        raise ConvergenceError("iteration cap reached", best)
    # fa may have been damped by the Illinois step; use true values
    fa_true, fb_true = float(f(a)), float(f(b))
    x, fx = (a, fa_true) if abs(fa_true) <= abs(fb_true) else (b, fb_true)
    if abs(fa_true) > tol_f and abs(fb_true) > tol_f:
        raise FoldSuspectedError(
            f"bracket collapsed with |f| = {abs(fx):.3e} > tol_f; tangency or discontinuity", x
        )
    return x, fx


# ---------------------------------------------------------------------------
# grids and the fold solver


def unit_grid(cells: int = 2048, depth: int = 48) -> np.ndarray:
    """Points on [0, 1]: uniform cells plus geometric clusters 1 - 2^-j and 2^-j."""
    j = np.arange(1, depth + 1, dtype=float)
    g = np.concatenate([np.linspace(0.0, 1.0, cells + 1), 1.0 - 2.0**-j, 2.0**-j])
    return np.unique(g)


def _fold_grid(lo: float, hi: float, cells: int) -> np.ndarray:
    g = lo + (hi - lo) * unit_grid(cells, depth=40)
    return g


def _fold_point(x: float, epsilon: float, n: int, equal: bool) -> FoldPoint:
    if equal:
        mu0 = pc.equal_mass_part(x, n)
        dh = lambda t: pc.equal_mass_part_dx(t, n)  # noqa: E731
    else:
        mu0 = pc.center_mass(x, epsilon, n)
        dh = lambda t: pc.center_mass_dx(t, epsilon, n)  # noqa: E731
    step = 1e-5 * max(1e-3, min(x, abs(1 - x) if not equal else 1.0))
    curvature = (dh(x + step) - dh(x - step)) / (2 * step)
    params = pc.RosetteParams(n, epsilon, max(mu0, 0.0))
    # residuals of the original system at (x*, mu0); mu0 may be negative so add it back linearly
    shift = (mu0 - params.mu) / n
    f_res = pc.shape_residual(x, params) + shift * (1 - x**3)
    df_res = pc.shape_residual_dx(x, params) - 3 * x**2 * shift
    return FoldPoint(
        x_star=float(x),
        mu0=float(mu0),
        epsilon=float(epsilon),
        n=n,
        condition_residuals=(abs(float(f_res)), abs(float(df_res))),
        curvature=float(curvature),
        degenerate=abs(curvature) < 1e-8 * max(1.0, abs(mu0)),
    )


def find_folds(
    epsilon: float, n: int, search_interval: tuple[float, float] = (0.0, 1.0), cells: int = 2048
) -> list[FoldPoint]:
    """Every critical point of ``x -> h(x, epsilon)`` on the interval, sorted by x.

    For ``epsilon == 1`` h has no pole and an interval ending at 1 is
    extended through it: the symmetry x -> 1/x then puts a critical point
    exactly at x = 1, which is the equal-mass transition.
    """
    lo, hi = search_interval
    if n < 3:
        raise DomainError("fold search needs n >= 3")
    if not 0 <= lo < hi:
        raise DomainError(f"bad search interval {search_interval!r}")
    equal = epsilon == 1.0
    if equal:
        if lo < 1.0 <= hi or hi == 1.0:
            hi = max(hi, 1.0 + (1.0 - lo) / 2)
        dh = lambda t: pc.equal_mass_part_dx(t, n)  # noqa: E731
    else:
        if lo < 1.0 < hi:
            raise DomainError("search interval must not contain the pole at x = 1")
        guard = 1e-9
        if hi == 1.0:
            hi = 1.0 - guard
        if lo == 1.0:
            lo = 1.0 + guard
        dh = lambda t: pc.center_mass_dx(t, epsilon, n)  # noqa: E731
    if math.isinf(hi):
        raise DomainError("use a finite search interval; map (1, inf) through the dual parameters")
    brackets = bracket_roots(dh, lo, hi, grid=_fold_grid(lo, hi, cells), vectorized=True, max_depth=6)
    folds = []
    for br in brackets:
        x, _ = refine_root(dh, br, tol_x=1e-14, tol_f=math.inf)
        folds.append(_fold_point(x, epsilon, n, equal))
    return folds


def find_fold(
    epsilon: float, n: int, search_interval: tuple[float, float] = (0.0, 1.0), cells: int = 2048
) -> FoldPoint:
    """The fold with the largest mu0 in the interval.

    That value is where the last pair of roots inside the interval appears
    or disappears as mu decreases.  Raises :class:`FoldNotFoundError` if h
    is monotone on the interval.
    """
    folds = find_folds(epsilon, n, search_interval, cells)
    if not folds:
        raise FoldNotFoundError(f"h(., {epsilon}) is monotone on {search_interval} for n={n}")
    return max(folds, key=lambda fp: fp.mu0)
