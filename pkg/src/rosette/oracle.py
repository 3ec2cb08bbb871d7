"""First-principles n-body check of the rosette configurations.

Builds the explicit 2n+1 positions, evaluates the Newtonian potential and
its gradient by direct pair sums, and tests M^-1 dU/dq = lambda q.  Nothing
here uses the reduced shape equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, DomainError
from .potential import RosetteParams

# bodies closer than this to the origin are checked with an absolute residual
_ORIGIN = 1e-12


@dataclass(frozen=True)
class PlanarConfiguration:
    """Positions (shape (N, 2)) and masses (m0, n copies of m1 = 1, n copies of m2 = eps)."""

    positions: np.ndarray
    masses: np.ndarray
    n: int

    @property
    def center_of_mass(self) -> np.ndarray:
        return self.masses @ self.positions / self.masses.sum()

    def rotated(self, angle: float) -> PlanarConfiguration:
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return PlanarConfiguration(self.positions @ rot.T, self.masses, self.n)

    def scaled(self, factor: float) -> PlanarConfiguration:
        return PlanarConfiguration(self.positions * factor, self.masses, self.n)


@dataclass(frozen=True)
class OracleResult:
    lambda_fit: float
    max_relative_residual: float
    U_value: float
    I_value: float


def build_configuration(x: float, params: RosetteParams, r1: float = 1.0) -> PlanarConfiguration:
    """Inner n-gon at angles 2*pi*k/n (radius r1), outer at 2*pi*k/n + pi/n (radius x*r1), m0 at the origin."""
    if not x > 0 or not r1 > 0:
        raise DomainError("need x > 0 and r1 > 0")
    n = params.n
    base = 2 * np.pi * np.arange(n) / n
    inner = r1 * np.column_stack([np.cos(base), np.sin(base)])
    outer = x * r1 * np.column_stack([np.cos(base + np.pi / n), np.sin(base + np.pi / n)])
    positions = np.vstack([np.zeros((1, 2)), inner, outer])
    masses = np.concatenate([[params.mu], np.ones(n), np.full(n, params.epsilon)])
    return PlanarConfiguration(positions, masses, n)


def newtonian(config: PlanarConfiguration) -> tuple[float, np.ndarray, float]:
    """``(U, dU/dq, I)`` by direct summation over pairs i < j.

    ``U = sum m_i m_j / |q_i - q_j|``, ``I = sum m_i |q_i|^2``.
    """
    q, m = config.positions, config.masses
    count = len(m)
    U = 0.0
    grad = np.zeros_like(q)
    for i in range(count):
        for j in range(i + 1, count):
            d = q[j] - q[i]
            r = math.hypot(d[0], d[1])
            if r == 0.0:
                raise CollisionError(f"bodies {i} and {j} coincide")
            mm = m[i] * m[j]
            U += mm / r
            pull = mm * d / r**3
            grad[i] += pull
            grad[j] -= pull
    I = float(np.sum(m * np.sum(q * q, axis=1)))
    return U, grad, I


def _field(config: PlanarConfiguration, i: int) -> np.ndarray:
    """Acceleration of body i from the others; used where m_i = 0 and M^-1 is undefined."""
    q, m = config.positions, config.masses
    acc = np.zeros(2)
    for j in range(len(m)):
        if j != i:
            d = q[j] - q[i]
            acc += m[j] * d / np.hypot(*d) ** 3
    return acc


def check_central(x: float, params: RosetteParams, r1: float = 1.0) -> OracleResult:
    """Fit lambda in M^-1 dU/dq ~ lambda q and report the worst per-body relative residual.

    Bodies at the origin contribute their absolute residual.
    """
    config = build_configuration(x, params, r1)
    U, grad, I = newtonian(config)
    m = config.masses
    acc = np.empty_like(grad)
    for i in range(len(m)):
        acc[i] = grad[i] / m[i] if m[i] > 0 else _field(config, i)
    q = config.positions
    lam = float(np.sum(acc * q) / np.sum(q * q))
    worst = 0.0
    for i in range(len(m)):
        miss = float(np.hypot(*(acc[i] - lam * q[i])))
        size = abs(lam) * float(np.hypot(*q[i]))
        worst = max(worst, miss if size < _ORIGIN else miss / size)
    return OracleResult(lam, worst, U, I)

