"""Phase-invariant classicality of a photon-number distribution.

With q_n = n! p(n), the distribution is classical (nonnegative intensity
density) iff every Hankel matrix

    L(N)       = [q_{n+m}]_{n,m=0..N}
    L_tilde(N) = [q_{n+m+1}]_{n,m=0..N}

is positive semidefinite.  The raw q_n overflow a double near n = 170, so
all PSD tests run on the diagonally rescaled forms

    L:       q_{n+m}   / (2^{n+m}   n! m!)                      = p(n+m) C(n+m, n) / 2^{n+m}
    L_tilde: q_{n+m+1} / (2^{n+m+1} sqrt((n+1)! n! (m+1)! m!))

whose entries never exceed 1.  A congruence by a positive diagonal keeps
the inertia, so the PSD verdict is unchanged.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OrderTooLarge
from .fock_core import PhotonNumberDistribution

DEFAULT_TOL = 1e-10
MAX_DEFAULT_ORDER = 20
LN2 = math.log(2.0)


class Kind(str, enum.Enum):
    L = "L"
    L_TILDE = "L_tilde"


class Verdict(str, enum.Enum):
    CLASSICAL = "classical_up_to_order"
    NONCLASSICAL = "nonclassical"


@lru_cache(maxsize=None)
def log_factorial(n: int) -> float:
    return math.log(math.factorial(n)) if n > 1 else 0.0


def log_factorials(n_max: int) -> np.ndarray:
    return np.array([log_factorial(n) for n in range(n_max + 1)])


@dataclass(frozen=True)
class MomentSequence:
    """q_n = n! p(n) held as ln q_n, with ``is_zero`` marking q_n = 0.

    For an exact distribution (tail_bound 0) the moments past n_max are known
    to vanish; otherwise they are unknown and may not be used.
    """

    log_q: np.ndarray
    is_zero: np.ndarray
    n_max: int
    exact: bool

    def available(self, n: int) -> bool:
        return n <= self.n_max or self.exact

    def log_value(self, n: int) -> float:
        """ln q_n, -inf when q_n = 0."""
        if n > self.n_max:
            if not self.exact:
                raise OrderTooLarge(f"moment q_{n} lies beyond n_max = {self.n_max}")
            return -math.inf
        return -math.inf if self.is_zero[n] else float(self.log_q[n])

    def padded_log_q(self, n: int) -> np.ndarray:
        """ln q_0..ln q_n with -inf for zero (or vanishing out-of-range) moments."""
        if not self.available(n):
            raise OrderTooLarge(f"moment q_{n} lies beyond n_max = {self.n_max}")
        out = np.full(n + 1, -np.inf)
        k = min(n, self.n_max) + 1
        out[:k] = np.where(self.is_zero[:k], -np.inf, self.log_q[:k])
        return out

    def values(self) -> np.ndarray:
        """q_n as plain floats (overflows to inf past n of about 170)."""
        with np.errstate(over="ignore"):
            return np.where(self.is_zero, 0.0, np.exp(self.log_q))


def moment_sequence(pnd: PhotonNumberDistribution) -> MomentSequence:
    p = np.asarray(pnd.probs, dtype=float)
    is_zero = p == 0.0
    with np.errstate(divide="ignore"):
        log_q = np.log(p) + log_factorials(pnd.n_max)
    log_q[is_zero] = -np.inf
    return MomentSequence(log_q=log_q, is_zero=is_zero, n_max=pnd.n_max, exact=pnd.exact)


@dataclass(frozen=True)
class MandelStatistics:
    mean: float
    second_moment: float
    antibunching_value: float
    mandel_q: float | None
    tail_mass: float = 0.0


def tail_extension(pnd: PhotonNumberDistribution) -> tuple[float, float, float]:
    """(mass, E[k], E[k(k-1)]) of the probability missing beyond n_max.

    Dropping the tail biases <n(n-1)> - <n>^2 low by roughly
    mass * n_max^2, enough to make a truncated Poisson look antibunched.
    The missing mass 1 - sum(p), capped at tail_bound, is placed on
    k = n_max+1, n_max+2, ... geometrically, continuing the last stored
    ratio p(n_max)/p(n_max-1) (a point mass at n_max+1 if that ratio is
    unusable).  Exact for thermal tails, second-order accurate for Poisson.
    """
    if pnd.exact:
        return 0.0, 0.0, 0.0
    p = pnd.probs
    mass = min(pnd.tail_bound, max(0.0, 1.0 - math.fsum(p)))
    if mass == 0.0:
        return 0.0, 0.0, 0.0
    n = pnd.n_max
    r = p[n] / p[n - 1] if p[n - 1] > 0 else 0.0
    if not 0.0 <= r < 1.0:
        r = 0.0
    ej = r / (1.0 - r)
    ej2 = r * (1.0 + r) / (1.0 - r) ** 2
    ek = n + 1 + ej
    ek2 = (n + 1) ** 2 + 2 * (n + 1) * ej + ej2
    return mass, ek, ek2 - ek


def mandel_statistics(pnd: PhotonNumberDistribution) -> MandelStatistics:
    """Mean, second moment and <(dn)^2> - <n> of the distribution.

    The antibunching value is formed as <n(n-1)> - <n>^2 rather than from
    the variance, which avoids one cancellation.  Truncated inputs include
    the extrapolated tail from ``tail_extension``.
    """
    p = np.asarray(pnd.probs, dtype=float)
    n = np.arange(p.size, dtype=float)
    mass, ek, ekk = tail_extension(pnd)
    mean = math.fsum([*(n * p), mass * ek])
    factorial2 = math.fsum([*(n * (n - 1) * p), mass * ekk])
    antibunching = factorial2 - mean * mean
    mandel_q = antibunching / mean if mean > 0 else None
    return MandelStatistics(
        mean=mean,
        second_moment=factorial2 + mean,
        antibunching_value=antibunching,
        mandel_q=mandel_q,
        tail_mass=mass,
    )


def _moments_needed(kind: Kind, N: int) -> int:
    return 2 * N + (1 if Kind(kind) is Kind.L_TILDE else 0)


def order_feasible(ms: MomentSequence, kind: Kind, N: int) -> bool:
    return N >= 0 and ms.available(_moments_needed(kind, N))


def default_max_order(pnd: PhotonNumberDistribution) -> int:
    """Highest order scanned when the caller does not choose one.

    Truncated input: floor((n_max - 1) / 2), past which the cut tail
    dominates.  Exact input with support up to n_max = K: a row of L(N)
    with zero diagonal but a nonzero q_K off the diagonal appears by
    N = floor(K/2) + 1, so that order settles the question.  Capped at 20.
    """
    if pnd.exact:
        top = pnd.n_max // 2 + 1
    else:
        top = (pnd.n_max - 1) // 2
    return min(MAX_DEFAULT_ORDER, max(1, top))


def hankel_scaled(ms: MomentSequence, kind: Kind, N: int) -> np.ndarray:
    """Congruence-scaled Hankel matrix of size N+1 (see module docstring)."""
    kind = Kind(kind)
    if not order_feasible(ms, kind, N):
        raise OrderTooLarge(
            f"{kind.value}({N}) needs q_{_moments_needed(kind, N)}, beyond n_max = {ms.n_max}"
        )
    log_q = ms.padded_log_q(_moments_needed(kind, N))
    idx = np.arange(N + 1)
    lf = log_factorials(N + 1)
    s = idx[:, None] + idx[None, :]
    if kind is Kind.L:
        log_entry = log_q[s] - s * LN2 - lf[idx][:, None] - lf[idx][None, :]
    else:
        half = 0.5 * (lf[idx + 1] + lf[idx])
        log_entry = log_q[s + 1] - (s + 1) * LN2 - half[:, None] - half[None, :]
    upper = np.triu(np.exp(log_entry))
    return upper + np.triu(upper, 1).T


@dataclass(frozen=True)
class ClassicalityCertificate:
    verdict: Verdict
    detecting_kind: Kind | None
    detecting_order: int | None
    min_eigenvalue: float
    max_order_tested: int

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "detecting_kind": self.detecting_kind.value if self.detecting_kind else "none",
            "detecting_order": self.detecting_order,
            "min_eigenvalue": self.min_eigenvalue,
            "max_order_tested": self.max_order_tested,
        }


def psd_threshold(matrix: np.ndarray, tol: float) -> float:
    """Eigenvalues below minus this count as genuinely negative."""
    return tol * max(1.0, float(np.max(np.abs(matrix), initial=0.0)))


def classicality_check(
    pnd: PhotonNumberDistribution, max_order: int | None = None, tol: float = DEFAULT_TOL
) -> ClassicalityCertificate:
    """Scan L(N), L_tilde(N) for N = 0..max_order and report the first non-PSD one.

    Smaller N wins; at equal N, L is tried before L_tilde.  Orders that need
    moments beyond a truncated distribution's n_max are skipped.  For a
    classical verdict ``min_eigenvalue`` is the smallest eigenvalue seen.
    """
    if max_order is None:
        max_order = default_max_order(pnd)
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")

    ms = moment_sequence(pnd)
    if not order_feasible(ms, Kind.L, 1):
        raise OrderTooLarge(f"n_max = {pnd.n_max} is too small to test even order 1")

    lowest = math.inf
    tested = 0
    for N in range(max_order + 1):
        any_tested = False
        for kind in (Kind.L, Kind.L_TILDE):
            if not order_feasible(ms, kind, N):
                continue
            any_tested = True
            mat = hankel_scaled(ms, kind, N)
            eig = float(np.linalg.eigvalsh(mat)[0])
            lowest = min(lowest, eig)
            if eig < -psd_threshold(mat, tol):
                return ClassicalityCertificate(Verdict.NONCLASSICAL, kind, N, eig, N)
        if not any_tested:
            break
        tested = N
    return ClassicalityCertificate(Verdict.CLASSICAL, None, None, lowest, tested)
