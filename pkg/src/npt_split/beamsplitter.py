"""50:50 beam splitter acting on rho_a (x) |0><0|.

Two independent constructions of the output state:

* :func:`output_closed_form` evaluates the matrix elements

      <a', b'| rho_out |a, b> = delta_{a'+b', a+b} (a+b)! p(a+b) / (2^{a+b} sqrt(a'! b'! a! b!))

  in the log domain.  This is the production path.
* :func:`output_numeric` exponentiates the mode-mixing generator block by
  block, checks that the resulting unitary rotates the ladder operators as
  a 50:50 splitter must, and conjugates the input state.  It serves as the
  oracle for the closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.stats import binom

from .errors import HeisenbergCheckFailed
from .fock_core import TRIANGLE, PhotonNumberDistribution, TwoModeState, index_map, pair_index, triangle_dim
from .moments import LN2, log_factorials, moment_sequence

HEISENBERG_TOL = 1e-8
SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class SplitAmplitudes:
    """Amplitudes of (a^dag + b^dag)^n |0,0> / sqrt(2^n n!) on |r, n-r>, r = 0..n."""

    n: int
    amps: np.ndarray


def split_amplitudes(n: int) -> SplitAmplitudes:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    # amp_r^2 = C(n, r) / 2^n; the library pmf stays accurate to a few ulp for large n
    amps = np.sqrt(binom.pmf(np.arange(n + 1), n, 0.5))
    return SplitAmplitudes(n=n, amps=amps)


def output_closed_form(pnd: PhotonNumberDistribution) -> TwoModeState:
    """rho_out on the triangle basis with n_tot = pnd.n_max; blocks of different total are exactly zero."""
    n_tot = pnd.n_max
    ms = moment_sequence(pnd)
    lf = log_factorials(n_tot)
    rho = np.zeros((triangle_dim(n_tot), triangle_dim(n_tot)))
    for t in range(n_tot + 1):
        if ms.is_zero[t]:
            continue
        r = np.arange(t + 1)
        half = -0.5 * (lf[r] + lf[t - r])
        start = t * (t + 1) // 2
        rho[start : start + t + 1, start : start + t + 1] = np.exp(
            ms.log_q[t] - t * LN2 + half[:, None] + half[None, :]
        )
    return TwoModeState(rho, n_tot, pnd.tail_bound, TRIANGLE)


def ladder_operators(n_tot: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilators a, b as dense matrices on the triangle basis.

    Lowering operators map the triangle into itself, so these are exact
    restrictions, not truncations.
    """
    dim = triangle_dim(n_tot)
    a = np.zeros((dim, dim))
    b = np.zeros((dim, dim))
    for j, (n_a, n_b) in enumerate(index_map(n_tot)):
        if n_a:
            a[pair_index(n_a - 1, n_b), j] = math.sqrt(n_a)
        if n_b:
            b[pair_index(n_a, n_b - 1), j] = math.sqrt(n_b)
    return a, b


def mixing_generator_block(t: int) -> np.ndarray:
    """a^dag b - a b^dag restricted to the total-number-t block (basis |r, t-r>, r ascending)."""
    g = np.zeros((t + 1, t + 1))
    for r in range(t + 1):
        if r < t:
            g[r + 1, r] = math.sqrt((r + 1) * (t - r))
        if r > 0:
            g[r - 1, r] = -math.sqrt(r * (t - r + 1))
    return g


def rotation_unitary(n_tot: int, theta: float) -> np.ndarray:
    """exp(theta (a^dag b - a b^dag)) on the triangle, built block by block."""
    dim = triangle_dim(n_tot)
    u = np.zeros((dim, dim))
    for t in range(n_tot + 1):
        start = t * (t + 1) // 2
        u[start : start + t + 1, start : start + t + 1] = expm(theta * mixing_generator_block(t))
    return u


def heisenberg_residual(u: np.ndarray, n_tot: int) -> float:
    """Worst deviation from the 50:50 rotation of the ladder operators.

    Checks U a U^-1 = (a+b)/sqrt2, U b U^-1 = (b-a)/sqrt2 and the two inverse
    relations.  Annihilators never leave the triangle, so the comparison is
    exact on every block, boundary included; the creation-operator relations
    are the transposes and add nothing.
    """
    a, b = ladder_operators(n_tot)
    ut = u.T
    pairs = [
        (u @ a @ ut, SQRT_HALF * (a + b)),
        (u @ b @ ut, SQRT_HALF * (b - a)),
        (ut @ a @ u, SQRT_HALF * (a - b)),
        (ut @ b @ u, SQRT_HALF * (b + a)),
    ]
    return max(float(np.max(np.abs(got - want), initial=0.0)) for got, want in pairs)


def beam_splitter_unitary(n_tot: int) -> np.ndarray:
    """Truncated 50:50 unitary whose rotation sense is fixed by the Heisenberg relations.

    Both rotation senses are tried and the one that reproduces the required
    ladder-operator action is kept; if neither does, something upstream is
    broken and HeisenbergCheckFailed is raised.
    """
    residuals = {}
    for theta in (-math.pi / 4, math.pi / 4):
        u = rotation_unitary(n_tot, theta)
        residuals[theta] = heisenberg_residual(u, n_tot)
        if residuals[theta] <= HEISENBERG_TOL:
            return u
    raise HeisenbergCheckFailed(f"no rotation sense satisfies the ladder relations: {residuals}")


def input_state(pnd: PhotonNumberDistribution) -> TwoModeState:
    """rho_a (x) |0><0| on the triangle basis."""
    n_tot = pnd.n_max
    rho = np.zeros((triangle_dim(n_tot), triangle_dim(n_tot)))
    for n, p in enumerate(pnd.probs):
        i = pair_index(n, 0)
        rho[i, i] = p
    return TwoModeState(rho, n_tot, pnd.tail_bound, TRIANGLE)


def output_numeric(pnd: PhotonNumberDistribution) -> TwoModeState:
    u = beam_splitter_unitary(pnd.n_max)
    rho_in = input_state(pnd).matrix
    rho = u @ rho_in @ u.T
    rho = 0.5 * (rho + rho.T)
    return TwoModeState(rho, pnd.n_max, pnd.tail_bound, TRIANGLE)
