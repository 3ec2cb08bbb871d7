"""Closed-form scalar functions of the rosette (2n+1)-body family.

Two concentric regular n-gons (inner radius r1 with masses m1, outer radius
r2 = x*r1 with masses m2, rotated by pi/n) plus a central mass m0.  The
dimensionless parameters are ``epsilon = m2/m1`` and ``mu = m0/m1``.

Every function taking a shape ratio ``x`` accepts a scalar or a numpy array
and returns the same shape.  All sums over the polygon index run through
``numpy.sum`` along the contiguous axis, which uses pairwise summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PoleError

# h is rejected inside this distance of its pole
POLE_GUARD = 1e-12


def _check_n(n: int, minimum: int) -> int:
    if int(n) != n or n < minimum:
        raise DomainError(f"n must be an integer >= {minimum}, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class RosetteParams:
    """Problem instance: polygon size ``n`` and the two mass ratios."""

    n: int
    epsilon: float
    mu: float

    def __post_init__(self):
        _check_n(self.n, 2)
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise DomainError(f"epsilon must be > 0, got {self.epsilon!r}")
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise DomainError(f"mu must be >= 0, got {self.mu!r}")

    def dual(self) -> RosetteParams:
        """Parameters of the same physical configuration with the polygons swapped.

        The outer polygon becomes the inner one, so the mass unit changes
        from m1 to m2: epsilon -> 1/epsilon and mu = m0/m1 -> m0/m2 = mu/epsilon.
        Roots map as x -> 1/x.
        """
        return RosetteParams(self.n, 1.0 / self.epsilon, self.mu / self.epsilon)

    @property
    def angles(self) -> AngleTable:
        return angle_table(self.n)


@dataclass(frozen=True)
class AngleTable:
    """Relative angles phi_k = (2k-1)pi/n between the two polygons and their cosines."""

    n: int
    phi: np.ndarray
    u: np.ndarray


@lru_cache(maxsize=None)
def angle_table(n: int) -> AngleTable:
    n = _check_n(n, 2)
    phi = (2.0 * np.arange(1, n + 1) - 1.0) * np.pi / n
    u = np.cos(phi)
    phi.flags.writeable = False
    u.flags.writeable = False
    return AngleTable(n, phi, u)


@lru_cache(maxsize=None)
def polygon_potential(n: int) -> float:
    """Mutual potential per squared mass of a unit regular n-gon.

    ``k_n = (1/4n) * sum_{k=1}^{n-1} csc(k*pi/n)``; for unit masses on the
    unit circle the n-gon's potential energy is ``n**2 * k_n``.
    """
    n = _check_n(n, 2)
    k = np.arange(1, n)
    return float(np.sum(1.0 / np.sin(k * np.pi / n))) / (4 * n)


def polygon_potential_lower(n: int) -> float:
    """Trapezoidal lower bound of :func:`polygon_potential`, valid for n >= 3.

    The csc sum is bounded below by the integral of csc(pi*u/n) over
    [1, n-1] plus the two half end-weights, which gives
    ``(1/4pi) ln((1+cos(pi/n))/(1-cos(pi/n))) + 1/(4n sin(pi/n))``.
    The log ratio is evaluated as ``-2 ln tan(pi/2n)`` to avoid the
    cancellation in ``1 - cos(pi/n)`` for large n.
    """
    n = _check_n(n, 3)
    t = math.pi / n
    return -2.0 * math.log(math.tan(t / 2)) / (4 * math.pi) + 1.0 / (4 * n * math.sin(t))


def pole_coefficient(n: int) -> float:
    """``n*k_n - (1/4) sum csc(phi_k/2)``; the residue of h at x = 1 is ``-(1-eps)*A_n/3``."""
    n = _check_n(n, 2)
    half = angle_table(n).phi / 2
    return n * polygon_potential(n) - float(np.sum(1.0 / np.sin(half))) / 4


def critical_center_mass(n: int) -> float:
    """Central mass ratio at which the equal-mass (epsilon = 1) family loses two configurations.

    Equals the symmetric-family value h0(1).
    """
    n = _check_n(n, 3)
    phi = angle_table(n).phi
    s = np.sin(phi / 2)
    return float(np.sum(np.cos(phi) / s**3)) / 12 - n * polygon_potential(n)


# ---------------------------------------------------------------------------
# shape equation


def _as_x(x, allow_zero: bool = False):
    x = np.asarray(x, dtype=float)
    bad = (x < 0) if allow_zero else (x <= 0)
    if np.any(bad) or not np.all(np.isfinite(x)):
        raise DomainError(f"shape ratio must be {'>= 0' if allow_zero else '> 0'} and finite")
    return x


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def _flag(a):
    return bool(a) if np.ndim(a) == 0 else a


def _cols(x, n):
    """Broadcast helper: x as a column against the cosine row, and D_k = 1 + x^2 - 2x u_k."""
    u = angle_table(n).u
    xc = x[..., None]
    d = 1.0 + xc * xc - 2.0 * xc * u
    return xc, u, d


def shape_residual(x, params: RosetteParams):
    """Residual of the reduced central-configuration equation.

    ``F = mu/n (1-x^3) + k_n (eps - x^3) + (1/n) sum P_k / D_k^{3/2}`` with
    ``P_k = x^3 (1-eps) - x^2 (1 - eps x^2) u_k``.  Zero exactly at the
    rosette central configurations; smooth on (0, inf), including x = 1.

    As x -> 0 this tends to ``mu/n + k_n*eps``.
    """
    x = _as_x(x)
    n, eps, mu = params.n, params.epsilon, params.mu
    xc, u, d = _cols(x, n)
    p = xc**3 * (1 - eps) - xc**2 * (1 - eps * xc**2) * u
    s = np.sum(p / d**1.5, axis=-1)
    x3 = x**3
    return _out(mu / n * (1 - x3) + polygon_potential(n) * (eps - x3) + s / n)


def shape_residual_dx(x, params: RosetteParams):
    """Analytic derivative of :func:`shape_residual` with respect to x."""
    x = _as_x(x)
    n, eps, mu = params.n, params.epsilon, params.mu
    xc, u, d = _cols(x, n)
    p = xc**3 * (1 - eps) - xc**2 * (1 - eps * xc**2) * u
    dp = 3 * xc**2 * (1 - eps) - 2 * xc * u + 4 * eps * xc**3 * u
    s = np.sum(dp / d**1.5 - 3 * p * (xc - u) / d**2.5, axis=-1)
    return _out(-3 * x**2 * (mu / n + polygon_potential(n)) + s / n)


# ---------------------------------------------------------------------------
# mu as a function of the shape: mu = h(x, eps) = h0(x) + (1 - eps) h1(x)


def _check_pole(x):
    if np.any(np.abs(x - 1.0) < POLE_GUARD):
        raise PoleError("h has a pole at x = 1; use shape_residual or mismatch_numerator there")


def _sums(x, n):
    """S_a = sum u/D^{3/2}, S_b = sum (1 - x u)/D^{3/2} and their x-derivatives."""
    xc, u, d = _cols(x, n)
    d15 = d**-1.5
    d25 = d**-2.5
    sa = np.sum(u * d15, axis=-1)
    sb = np.sum((1 - xc * u) * d15, axis=-1)
    dsa = np.sum(-3 * u * (xc - u) * d25, axis=-1)
    dsb = np.sum(-u * d15 - 3 * (1 - xc * u) * (xc - u) * d25, axis=-1)
    return sa, sb, dsa, dsb


def _prefactor(x):
    """x^2 (1 - x^2)/(1 - x^3) written without the removable singularity at x = 1."""
    num = x**2 * (1 + x)
    den = 1 + x + x**2
    dnum = 2 * x + 3 * x**2
    dden = 1 + 2 * x
    return num / den, (dnum * den - num * dden) / den**2


def center_mass(x, epsilon: float, n: int):
    """The central mass ratio mu for which shape ``x`` is a central configuration.

    Direct evaluation of ``-n k_n (eps - x^3)/(1 - x^3) - x^2/(1 - x^3) *
    sum (x(1-eps) - (1 - eps x^2) u_k)/D_k^{3/2}``.  Raises :class:`PoleError`
    within ``POLE_GUARD`` of x = 1.  At x = 0 the formula yields the exact
    limit ``-n k_n eps``.
    """
    x = _as_x(x, allow_zero=True)
    _check_pole(x)
    nk = n * polygon_potential(n)
    eps = epsilon
    xc, u, d = _cols(x, n)
    s = np.sum((xc * (1 - eps) - (1 - eps * xc**2) * u) / d**1.5, axis=-1)
    x3 = x**3
    return _out(-nk * (eps - x3) / (1 - x3) - x**2 / (1 - x3) * s)


class MassParts(NamedTuple):
    """``h = equal + (1 - eps) * mismatch``; ``equal`` is h at eps = 1."""

    equal: object
    mismatch: object


def center_mass_parts(x, n: int) -> MassParts:
    """The pair (h0, h1) splitting :func:`center_mass` linearly in (1 - eps).

    ``h0 = -n k_n + x^2 (1-x^2)/(1-x^3) sum u_k/D_k^{3/2}`` is smooth at x = 1;
    ``h1 = (n k_n - x^3 sum (1 - x u_k)/D_k^{3/2})/(1 - x^3)`` carries the pole.
    """
    x = _as_x(x, allow_zero=True)
    _check_pole(x)
    nk = n * polygon_potential(n)
    sa, sb, _, _ = _sums(x, n)
    r, _ = _prefactor(x)
    h0 = -nk + r * sa
    h1 = (nk - x**3 * sb) / (1 - x**3)
    return MassParts(_out(h0), _out(h1))


def equal_mass_part(x, n: int):
    """h0 alone; defined at x = 1 where it equals :func:`critical_center_mass`."""
    x = _as_x(x, allow_zero=True)
    sa, _, _, _ = _sums(x, n)
    r, _ = _prefactor(x)
    return _out(-n * polygon_potential(n) + r * sa)


def center_mass_parts_dx(x, n: int) -> MassParts:
    """Analytic x-derivatives (h0', h1')."""
    x = _as_x(x, allow_zero=True)
    _check_pole(x)
    nk = n * polygon_potential(n)
    sa, sb, dsa, dsb = _sums(x, n)
    r, dr = _prefactor(x)
    dh0 = dr * sa + r * dsa
    x3 = x**3
    tilde = nk - x3 * sb
    dtilde = -3 * x**2 * sb - x3 * dsb
    dh1 = dtilde / (1 - x3) + 3 * x**2 * tilde / (1 - x3) ** 2
    return MassParts(_out(dh0), _out(dh1))


def center_mass_dx(x, epsilon: float, n: int):
    """Analytic derivative of :func:`center_mass` with respect to x."""
    dh0, dh1 = center_mass_parts_dx(x, n)
    return dh0 + (1 - epsilon) * dh1


def equal_mass_part_dx(x, n: int):
    """h0' valid through x = 1 (vanishes there by the x -> 1/x symmetry)."""
    x = _as_x(x, allow_zero=True)
    sa, _, dsa, _ = _sums(x, n)
    r, dr = _prefactor(x)
    return _out(dr * sa + r * dsa)


def mismatch_numerator(x, n: int):
    """``(1 - x^3) h1(x) = n k_n - x^3 sum (1 - x u_k)/D_k^{3/2}``; finite at x = 1 where it equals A_n."""
    x = _as_x(x)
    _, sb, _, _ = _sums(x, n)
    return _out(n * polygon_potential(n) - x**3 * sb)


def center_mass_parts_n3(x) -> MassParts:
    """Closed forms of (h0, h1) for n = 3, kept separate from the general path as a cross-check."""
    x = _as_x(x, allow_zero=True)
    _check_pole(x)
    r3 = math.sqrt(3.0) / 3
    q = (1 - x + x**2) ** 1.5
    h0 = -r3 + x**2 * (1 + x) / (1 + x + x**2) * (1 / q - 1 / (1 + x) ** 3)
    h1 = r3 / (1 - x**3) - x**3 / (1 - x**3) * (1 / (1 + x) ** 2 + (2 - x) / q)
    return MassParts(_out(h0), _out(h1))


# ---------------------------------------------------------------------------
# lower-bound chain used for the large-n existence argument


class BoundTerms(NamedTuple):
    """Auxiliary quantities of the h0 > 0 argument at a given x in (0, 1).

    ``u_minus`` is the unconstrained minimiser of g(x, .); ``u_used`` is the
    value actually plugged into g after clamping to [-1, 1], and ``clamped``
    records whether that happened.
    """

    r1: object
    r2: object
    u_minus: object
    u_used: object
    clamped: object
    g_at_u_minus: object
    g_at_r2: object
    h2: object
    h3: object


def _r1(x):
    return x * (1 + x + x**2) / (1 + x + x**2 + x**3 + x**4)


def g_ratio(x, u):
    """``g(x, u) = (u - R1(x)) / (1 + x^2 - 2 x u)^{3/2}``."""
    x = np.asarray(x, dtype=float)
    return _out((u - _r1(x)) / (1 + x**2 - 2 * x * u) ** 1.5)


def lemma_bounds(x, n: int) -> BoundTerms:
    """R1, R2, u_-, g at both points, h2 and the n-dependent lower bound h3 for x in (0, 1)."""
    x = _as_x(x)
    if np.any(x >= 1):
        raise DomainError("lemma_bounds needs x in (0, 1)")
    n = _check_n(n, 2)
    r1 = _r1(x)
    r2 = 0.15 * r1 + 0.85
    u_minus = (3 * x * r1 - 1 - x**2) / x
    u_used = np.clip(u_minus, -1.0, 1.0)
    g_min = g_ratio(x, u_used)
    g_r2 = g_ratio(x, r2)
    h0, h1 = center_mass_parts(x, n)
    h2 = (1 - x**3) / (x**2 * (1 - x**5)) * (h0 + (1 - x**3) * h1)
    h3 = n / math.pi * ((math.pi - np.arccos(r1)) * g_min + np.arccos(r2) * g_r2) - g_r2
    return BoundTerms(
        _out(r1), _out(r2), _out(u_minus), _out(u_used), _flag(u_used != u_minus),
        g_min, g_r2, _out(h2), _out(h3),
    )


def n2_slope_profile(x, epsilon: float):
    """``eta(x) = (1 - eps)/(1 + x^2)^{5/2}``; for n = 2, ``F' = 3x^2 (eta - mu/2 - 1/8)``."""
    x = _as_x(x, allow_zero=True)
    return _out((1 - epsilon) / (1 + x**2) ** 2.5)
