"""Truncation penalties and the weight functionals behind them.

The three inclusion-set methods inflate the pseudospectral level of each
submatrix by a penalty: ``2 r sin(theta_n / 2) + ||C||`` for square
truncations (theta_n a transcendental root), ``2 r sin(pi/(2n)) + ||C||``
for periodised ones, ``2 r sin(pi/(2n+2)) + ||C||`` for rectangular ones.
The weight functionals let tests verify those closed forms as minima over
weight profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError

__all__ = [
    "PenaltyParams",
    "solve_theta",
    "eps_tau",
    "eps_pi",
    "eps_tau1",
    "as_weights",
    "functionals",
    "eta",
    "optimal_weights",
]

_R_SUM_TOL = 1e-14


@dataclass(frozen=True)
class PenaltyParams:
    """Off-diagonal norms, remainder-norm bound, and the truncation size."""

    r_L: float
    r_U: float
    r: float
    c_norm: float
    n: int

    def __post_init__(self):
        vals = (self.r_L, self.r_U, self.r, self.c_norm)
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise DomainError("penalty parameters must be finite and >= 0")
        if abs(self.r - (self.r_L + self.r_U)) > _R_SUM_TOL * max(1.0, self.r):
            raise DomainError("r must equal r_L + r_U")
        if self.n < 1:
            raise DomainError("n must be a positive integer")

    @classmethod
    def from_offdiag(cls, r_L: float, r_U: float, c_norm: float, n: int):
        return cls(float(r_L), float(r_U), float(r_L) + float(r_U),
                   float(c_norm), int(n))


def _theta_equation(t: float, n: int, q: float) -> float:
    return 2.0 * math.sin(t / 2.0) * math.cos((n + 0.5) * t) \
        + q * math.sin((n - 1) * t)


def solve_theta(n: int, r_L: float, r_U: float) -> float:
    """Root angle of the square-truncation penalty.

    Solves ``2 sin(t/2) cos((n + 1/2) t) + (r_L r_U / r^2) sin((n-1) t) = 0``
    on the bracket ``[pi/(2n+1), pi/(n+2)]`` by bisection with a secant
    polish, to well under 1e-12 absolute.  With one off-diagonal absent the
    product term vanishes and the root is the left endpoint exactly; n = 1
    collapses the bracket to pi/3.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if r_L < 0 or r_U < 0:
        raise DomainError("off-diagonal norms must be nonnegative")
    r = r_L + r_U
    if r == 0.0:
        raise DegenerateError("theta undefined when r = 0 (penalty is just ||C||)")
    if n == 1:
        return math.pi / 3.0
    if r_L == 0.0 or r_U == 0.0:
        return math.pi / (2 * n + 1)

    q = (r_L * r_U) / (r * r)
    lo = math.pi / (2 * n + 1)
    hi = math.pi / (n + 2)
    flo = _theta_equation(lo, n, q)
    fhi = _theta_equation(hi, n, q)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        # the root is interior and unique; locate a sign change by scanning
        ts = np.linspace(lo, hi, 257)
        fs = np.array([_theta_equation(t, n, q) for t in ts])
        idx = np.nonzero(fs[:-1] * fs[1:] <= 0)[0]
        if idx.size == 0:
            raise DomainError(
                f"no sign change for theta equation at n={n}, q={q}"
            )
        lo, hi = float(ts[idx[0]]), float(ts[idx[0] + 1])
        flo = _theta_equation(lo, n, q)
        fhi = _theta_equation(hi, n, q)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = _theta_equation(mid, n, q)
        if fmid == 0.0 or (hi - lo) < 1e-15:
            lo = hi = mid
            break
        if flo * fmid <= 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    t = 0.5 * (lo + hi)
    # secant polish squeezes the last bits out of the bisection interval
    t0, t1 = lo, hi if hi > lo else lo + 1e-15
    f0, f1 = _theta_equation(t0, n, q), _theta_equation(t1, n, q)
    for _ in range(4):
        if f1 == f0:
            break
        t2 = t1 - f1 * (t1 - t0) / (f1 - f0)
        if not (math.pi / (2 * n + 1) <= t2 <= math.pi / (n + 2)):
            break
        t0, f0, t1, f1 = t1, f1, t2, _theta_equation(t2, n, q)
        t = t2
    return t


def eps_tau(params: PenaltyParams) -> float:
    """Square-truncation penalty ``2 r sin(theta_n/2) + ||C||``."""
    if params.r == 0.0:
        return params.c_norm
    theta = solve_theta(params.n, params.r_L, params.r_U)
    return 2.0 * params.r * math.sin(theta / 2.0) + params.c_norm


def eps_pi(params: PenaltyParams) -> float:
    """Periodised-truncation penalty ``2 r sin(pi/(2n)) + ||C||``."""
    return 2.0 * params.r * math.sin(math.pi / (2 * params.n)) + params.c_norm


def eps_tau1(params: PenaltyParams) -> float:
    """Rectangular-truncation penalty ``2 r sin(pi/(2n+2)) + ||C||``."""
    return 2.0 * params.r * math.sin(math.pi / (2 * params.n + 2)) + params.c_norm


def as_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.size == 0 or not np.any(w):
        raise DomainError("weight vector must have a nonzero component")
    if not np.all(np.isfinite(w)):
        raise DomainError("weights must be finite")
    return w


def functionals(w) -> tuple[float, float, float, float, float]:
    """The five weight functionals (S, T-, T+, Tper, T), with the convention
    that the weights are padded by zeros at both ends."""
    w = as_weights(w)
    n = w.size
    ext = np.zeros(n + 2)
    ext[1:n + 1] = w
    S = float(np.sum(w * w))
    T_minus = float(np.sum((ext[0:n] - ext[1:n + 1]) ** 2))
    T_plus = float(np.sum((ext[2:n + 2] - ext[1:n + 1]) ** 2))
    diffs = float(np.sum((w[1:] - w[:-1]) ** 2))
    T_per = float((w[0] + w[-1]) ** 2) + diffs
    T = float(w[0] ** 2 + w[-1] ** 2) + diffs
    return S, T_minus, T_plus, T_per, T


def eta(w, r_L: float, r_U: float, variant: str) -> float:
    """Penalty functional of a weight profile for one truncation flavour."""
    S, T_minus, T_plus, T_per, T = functionals(w)
    r = r_L + r_U
    if variant == "tau":
        return r_L * math.sqrt(T_minus / S) + r_U * math.sqrt(T_plus / S)
    if variant == "pi":
        return r * math.sqrt(T_per / S)
    if variant == "tau1":
        return r * math.sqrt(T / S)
    raise DomainError(f"unknown eta variant {variant!r}")


def optimal_weights(n: int, variant: str, r_L: float = 1.0,
                    r_U: float = 1.0) -> np.ndarray:
    """Minimizer profiles of the eta functionals.

    'pi' and 'tau1' have exact sine-profile minimizers.  For 'tau' the
    stationarity conditions force an interior sinusoid with boundary-mixed
    phase: with one off-diagonal absent the profile is the one-sided cosine
    chain eigenvector (exact), with balanced off-diagonals the cosine
    centered on the window (exact), and otherwise the phase and frequency of
    ``sin(j t + phi)`` are tuned numerically, which lands at or below the
    ``2 r sin(theta_n / 2)`` bound.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    j = np.arange(1, n + 1, dtype=np.float64)
    if variant == "pi":
        return np.sin((2 * j - 1) * math.pi / (2 * n))
    if variant == "tau1":
        return np.sin(j * math.pi / (n + 1))
    if variant == "tau":
        if r_U == 0.0 and r_L == 0.0:
            raise DegenerateError("tau weights undefined when r = 0")
        if r_L == 0.0 or r_U == 0.0:
            w = np.cos((j - 0.5) * math.pi / (2 * n + 1))
            return w[::-1].copy() if r_U == 0.0 else w
        theta = solve_theta(n, r_L, r_U)
        if r_L == r_U or n == 1:
            return np.cos((j - (n + 1) / 2) * theta)
        return _tuned_tau_weights(n, r_L, r_U, theta)
    raise DomainError(f"unknown eta variant {variant!r}")


def _tuned_tau_weights(n: int, r_L: float, r_U: float,
                       theta: float) -> np.ndarray:
    from scipy.optimize import minimize

    j = np.arange(1, n + 1, dtype=np.float64)

    def objective(x):
        w = np.sin(j * x[0] + x[1])
        if not np.any(w):
            return np.inf
        return eta(w, r_L, r_U, "tau")

    best_val, best_x = np.inf, None
    for t0 in (theta, 0.75 * theta, 1.25 * theta):
        for p0 in (0.0, (math.pi - (n + 1) * theta) / 2, 1.2):
            res = minimize(objective, [t0, p0], method="Nelder-Mead",
                           options={"xatol": 1e-13, "fatol": 1e-15,
                                    "maxiter": 4000})
            if res.fun < best_val:
                best_val, best_x = res.fun, res.x
    return np.sin(j * best_x[0] + best_x[1])
