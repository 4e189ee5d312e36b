"""Truncated two-mode Fock space: photon-number distributions, index maps, states.

Basis ordering
--------------
Two-mode basis vectors |n_a, n_b> are ordered block by block in the total
photon number t = n_a + n_b, and within a block by ascending n_a::

    (0,0) | (0,1) (1,0) | (0,2) (1,1) (2,0) | ...

The *triangle* basis of cutoff N holds every pair with n_a + n_b <= N and is
where beam-splitter output states live.  The *box* basis holds every pair
with n_a, n_b <= N, using the same ordering, so the triangle is a leading
block of the box.  Partially transposed output states need the box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    EmptyInput,
    NegativeDiagonal,
    NegativeProbability,
    NonHermitian,
    NormalizationError,
)

NEGATIVE_ZERO_CLAMP = 1e-15
NORMALIZATION_SLACK = 1e-12
HERMITIAN_TOL = 1e-14

TRIANGLE = "triangle"
BOX = "box"


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Probabilities p(0..n_max) with a declared bound on the mass beyond n_max.

    Build instances through :func:`validate_pnd`; the constructor itself does
    not check anything.
    """

    probs: np.ndarray
    tail_bound: float = 0.0

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    @property
    def exact(self) -> bool:
        """True when nothing is truncated, so p(n) = 0 for every n > n_max."""
        return self.tail_bound == 0.0

    def padded(self, n_max: int) -> np.ndarray:
        """Probabilities extended with zeros (or cut) to length n_max + 1."""
        out = np.zeros(n_max + 1)
        k = min(n_max, self.n_max) + 1
        out[:k] = self.probs[:k]
        return out

    def __eq__(self, other):
        if not isinstance(other, PhotonNumberDistribution):
            return NotImplemented
        return self.tail_bound == other.tail_bound and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.probs.tobytes(), self.tail_bound))


def validate_pnd(raw_probs: Sequence[float], tail_bound: float = 0.0) -> PhotonNumberDistribution:
    """Check a raw probability list and freeze it into a PhotonNumberDistribution.

    Values in [-1e-15, 0) are clamped to zero.  The total mass must lie in
    [1 - tail_bound, 1 + 1e-12], with an extra 1e-12 of slack at the lower
    end to absorb summation rounding.  A single-entry input is padded to
    n_max = 1.
    """
    probs = np.array(raw_probs, dtype=float).ravel()
    if probs.size == 0:
        raise EmptyInput("photon-number distribution is empty")
    if not np.all(np.isfinite(probs)):
        raise NormalizationError("photon-number distribution contains non-finite values")
    tail_bound = float(tail_bound)
    if not (tail_bound >= 0.0 and math.isfinite(tail_bound)):
        raise NormalizationError(f"tail_bound must be a finite number >= 0, got {tail_bound}")

    bad = np.flatnonzero(probs < -NEGATIVE_ZERO_CLAMP)
    if bad.size:
        n = int(bad[0])
        raise NegativeProbability(f"p({n}) = {probs[n]!r} is negative")
    probs[probs < 0] = 0.0

    total = math.fsum(probs)
    lo = 1.0 - tail_bound - NORMALIZATION_SLACK
    hi = 1.0 + NORMALIZATION_SLACK
    if not lo <= total <= hi:
        raise NormalizationError(
            f"probabilities sum to {total!r}, outside [{1.0 - tail_bound!r}, {hi!r}]"
        )

    if probs.size == 1:
        probs = np.append(probs, 0.0)
    probs.setflags(write=False)
    return PhotonNumberDistribution(probs=probs, tail_bound=tail_bound)


def triangle_dim(n_tot: int) -> int:
    return (n_tot + 1) * (n_tot + 2) // 2


def pair_index(n_a: int, n_b: int) -> int:
    """Position of |n_a, n_b> in the triangle ordering (and the box ordering, when total <= cutoff)."""
    t = n_a + n_b
    return t * (t + 1) // 2 + n_a


@lru_cache(maxsize=64)
def index_map(n_tot: int) -> tuple[tuple[int, int], ...]:
    """All (n_a, n_b) with n_a + n_b <= n_tot, in block order."""
    if n_tot < 0:
        raise ValueError(f"n_tot must be >= 0, got {n_tot}")
    return tuple((n_a, t - n_a) for t in range(n_tot + 1) for n_a in range(t + 1))


@lru_cache(maxsize=64)
def box_index_map(n_max: int) -> tuple[tuple[int, int], ...]:
    """All (n_a, n_b) with both entries <= n_max, in block order."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    return tuple(
        (n_a, t - n_a)
        for t in range(2 * n_max + 1)
        for n_a in range(max(0, t - n_max), min(t, n_max) + 1)
    )


def basis_for(support: str, n_tot: int) -> tuple[tuple[int, int], ...]:
    if support == TRIANGLE:
        return index_map(n_tot)
    if support == BOX:
        return box_index_map(n_tot)
    raise ValueError(f"unknown support {support!r}")


def lookup_table(support: str, n_tot: int) -> np.ndarray:
    """(n_tot+1, n_tot+1) integer array: position of (n_a, n_b) in the basis, or -1."""
    lut = np.full((n_tot + 1, n_tot + 1), -1, dtype=np.int64)
    for i, (a, b) in enumerate(basis_for(support, n_tot)):
        lut[a, b] = i
    return lut


@dataclass(frozen=True)
class TwoModeState:
    """Dense Hermitian matrix over a truncated two-mode Fock basis.

    ``support`` selects the basis (triangle or box) and ``n_tot`` its cutoff.
    """

    matrix: np.ndarray
    n_tot: int
    tail_bound: float = 0.0
    support: str = TRIANGLE
    _check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        dim = len(basis_for(self.support, self.n_tot))
        if self.matrix.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match {self.support} basis of size {dim}"
            )
        if self._check:
            check_hermitian(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def basis(self) -> tuple[tuple[int, int], ...]:
        return basis_for(self.support, self.n_tot)

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def element(self, bra: tuple[int, int], ket: tuple[int, int]) -> complex:
        """<bra| rho |ket>, zero for pairs outside the stored basis."""
        lut = lookup_table(self.support, self.n_tot)
        try:
            i, j = lut[bra], lut[ket]
        except IndexError:
            return 0.0
        if i < 0 or j < 0:
            return 0.0
        return self.matrix[i, j]

    def embed(self, support: str = BOX, n_tot: int | None = None) -> "TwoModeState":
        """Same operator expressed on another (larger) basis; dropped entries must be zero."""
        n_tot = self.n_tot if n_tot is None else n_tot
        src = self.basis
        lut = lookup_table(support, n_tot)
        pos = np.array(
            [lut[a, b] if a <= n_tot and b <= n_tot else -1 for a, b in src], dtype=np.int64
        )
        keep = pos >= 0
        if np.any(self.matrix[~keep, :] != 0) or np.any(self.matrix[:, ~keep] != 0):
            raise ValueError("target basis does not hold the state's support")
        dim = len(basis_for(support, n_tot))
        out = np.zeros((dim, dim), dtype=self.matrix.dtype)
        out[np.ix_(pos[keep], pos[keep])] = self.matrix[np.ix_(keep, keep)]
        return TwoModeState(out, n_tot, self.tail_bound, support, _check=False)


def check_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = np.max(np.abs(matrix - matrix.conj().T), initial=0.0)
    if dev > tol:
        raise NonHermitian(f"matrix deviates from Hermitian by {dev:.3e} (> {tol:.0e})")


def marginal_pnd_a(state: TwoModeState) -> PhotonNumberDistribution:
    """Photon-number distribution of mode a: p_a(k) = sum_{n_b} <k, n_b|rho|k, n_b>."""
    check_hermitian(state.matrix)
    diag = np.real(np.diag(state.matrix))
    if np.any(diag < -NEGATIVE_ZERO_CLAMP):
        i = int(np.argmin(diag))
        raise NegativeDiagonal(f"diagonal entry at {state.basis[i]} is {diag[i]!r}")
    n_a = np.array([a for a, _ in state.basis])
    p_a = np.bincount(n_a, weights=diag, minlength=state.n_tot + 1)
    return validate_pnd(p_a, state.tail_bound)
