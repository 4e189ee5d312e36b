"""Partial transpose of the beam-splitter output and NPT detection.

Truncation contract
-------------------
rho_out lives on the triangle n_a + n_b <= N, but its partial transpose
does not: the element <a, b| PT |a', b'> copies <a, b'| rho |a', b>, and
both source pairs can lie in the triangle while (a, b) itself does not
(e.g. PT couples |0,0> and |1,1> for a single input photon).  What is
preserved is each mode's own cutoff, so every partial transpose here is
returned on the *box* basis n_a, n_b <= N.  For an exact input
distribution this is the complete partial transpose, not an approximation.

The partially transposed output conserves d = n_a - n_b.  Block d is, up to
a positive diagonal congruence, the Hankel matrix of the shifted moment
sequence q_{k+|d|}; blocks 0 and +-1 are the H and H_tilde families.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .fock_core import BOX, PhotonNumberDistribution, TwoModeState, box_index_map, check_hermitian, lookup_table
from .moments import (
    DEFAULT_TOL,
    LN2,
    Kind,
    MomentSequence,
    default_max_order,
    log_factorials,
    mandel_statistics,
    moment_sequence,
    order_feasible,
    psd_threshold,
)
from .errors import OrderTooLarge


class SubmatrixKind(str, enum.Enum):
    H = "H"
    H_TILDE = "H_tilde"

    @property
    def hankel_kind(self) -> Kind:
        return Kind.L if self is SubmatrixKind.H else Kind.L_TILDE


class Method(str, enum.Enum):
    WITNESS = "witness_2x2"
    SUBMATRIX_H = "submatrix_H"
    SUBMATRIX_H_TILDE = "submatrix_H_tilde"
    FULL_SPECTRUM = "full_spectrum"


class NPTVerdict(str, enum.Enum):
    NPT = "npt"
    NO_DETECTION = "no_detection"


def partial_transpose(state: TwoModeState) -> TwoModeState:
    """Transpose the b-mode indices: PT[(a,b),(a',b')] = rho[(a,b'),(a',b)].

    Accepts triangle or box input and always returns the box basis of the
    same cutoff.  Sources outside the input basis count as zero.  On box
    input the map is an exact involution.
    """
    check_hermitian(state.matrix)
    n = state.n_tot
    lut = lookup_table(state.support, n)
    pairs = np.array(box_index_map(n))
    a, b = pairs[:, 0], pairs[:, 1]
    src_row = lut[a[:, None], b[None, :]]
    src_col = lut[a[None, :], b[:, None]]
    ok = (src_row >= 0) & (src_col >= 0)
    out = np.zeros((len(pairs), len(pairs)), dtype=state.matrix.dtype)
    out[ok] = state.matrix[src_row[ok], src_col[ok]]
    return TwoModeState(out, n, state.tail_bound, BOX, _check=False)


def _pt_elements(ms: MomentSequence, bra_a, bra_b, ket_a, ket_b) -> np.ndarray:
    """<bra_a, bra_b| PT(rho_out) |ket_a, ket_b> for broadcastable index arrays.

    Moments past n_max are treated as zero (the truncation contract).
    """
    bra_a, bra_b, ket_a, ket_b = np.broadcast_arrays(bra_a, bra_b, ket_a, ket_b)
    k = ket_a + bra_b
    conserved = (bra_a + ket_b) == k
    top = int(max(bra_a.max(initial=0), bra_b.max(initial=0), ket_a.max(initial=0), ket_b.max(initial=0)))
    lf = log_factorials(top)
    log_q = np.full(int(k.max(initial=0)) + 1, -np.inf)
    m = min(len(log_q), ms.n_max + 1)
    log_q[:m] = np.where(ms.is_zero[:m], -np.inf, ms.log_q[:m])
    log_val = log_q[k] - k * LN2 - 0.5 * (lf[bra_a] + lf[bra_b] + lf[ket_a] + lf[ket_b])
    return np.where(conserved, np.exp(log_val), 0.0)


def pt_closed_form(pnd: PhotonNumberDistribution) -> TwoModeState:
    """Partial transpose of rho_out straight from the moments, on the box basis."""
    ms = moment_sequence(pnd)
    pairs = np.array(box_index_map(pnd.n_max))
    a, b = pairs[:, 0], pairs[:, 1]
    mat = _pt_elements(ms, a[:, None], b[:, None], a[None, :], b[None, :])
    return TwoModeState(mat, pnd.n_max, pnd.tail_bound, BOX, _check=False)


@dataclass(frozen=True)
class PTBlock:
    """Sector n_a - n_b = d of the partial transpose; rows are (b + d, b) by ascending b."""

    d: int
    pairs: tuple[tuple[int, int], ...]
    matrix: np.ndarray


def _sector_matrix(ms: MomentSequence, n_max: int, k: int) -> np.ndarray:
    b = np.arange(n_max + 1 - k)
    return _pt_elements(ms, b[:, None] + k, b[:, None], b[None, :] + k, b[None, :])


def pt_blocks(pnd: PhotonNumberDistribution) -> list[PTBlock]:
    """Block decomposition of pt_closed_form, d = -n_max..n_max.

    Sectors d and -d carry the same matrix, so each is evaluated once.
    Memory stays O(n_max^2) even when the dense box matrix would not fit.
    """
    ms = moment_sequence(pnd)
    n = pnd.n_max
    blocks = []
    for k in range(n + 1):
        mat = _sector_matrix(ms, n, k)
        blocks.append(PTBlock(k, tuple((x + k, x) for x in range(n + 1 - k)), mat))
        if k:
            blocks.append(PTBlock(-k, tuple((x, x + k) for x in range(n + 1 - k)), mat))
    return sorted(blocks, key=lambda blk: blk.d)


def pt_spectrum(pnd: PhotonNumberDistribution) -> np.ndarray:
    """All eigenvalues of the partially transposed output, ascending, sector by sector."""
    ms = moment_sequence(pnd)
    n = pnd.n_max
    eigs = []
    for k in range(n + 1):
        vals = np.linalg.eigvalsh(_sector_matrix(ms, n, k))
        eigs.extend([vals, vals] if k else [vals])
    return np.sort(np.concatenate(eigs))


def log_negativity(eigenvalues: np.ndarray) -> float:
    """log2 of the trace norm of the partial transpose, normalised by its trace.

    Dividing by the trace keeps truncated (trace < 1) inputs from reporting
    a negative value; it is 0 exactly when no eigenvalue is negative.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    trace = math.fsum(eigenvalues)
    neg = -math.fsum(eigenvalues[eigenvalues < 0])
    if neg == 0.0:
        return 0.0
    return math.log2(1.0 + 2.0 * neg / trace)


@dataclass(frozen=True)
class WitnessMatrix2x2:
    """Tr(PT(rho_out) A^dag A) for A = c0 + c1 a b, as a quadratic form in (c0, c1)."""

    entries: np.ndarray
    det: float


def witness_threshold(entries: np.ndarray, tol: float) -> float:
    """det below minus this fires the witness: tol * max(1, |e00 e11|, e01^2).

    Both products are of order <n>^2 / 4, the size of the terms that cancel
    in the determinant; while they stay below 1 this is plain tol.
    """
    e = np.asarray(entries, dtype=float)
    return tol * max(1.0, abs(e[0, 0] * e[1, 1]), e[0, 1] * e[1, 0])


def witness_2x2(pnd: PhotonNumberDistribution, tol: float = DEFAULT_TOL) -> tuple[WitnessMatrix2x2, bool]:
    """Antibunching witness: fires when det < -witness_threshold (antibunching value < -4 tol for small <n>)."""
    stats = mandel_statistics(pnd)
    off = stats.mean / 2.0
    corner = (stats.second_moment - stats.mean) / 4.0
    entries = np.array([[1.0, off], [off, corner]])
    det = stats.antibunching_value / 4.0
    return WitnessMatrix2x2(entries=entries, det=det), det < -witness_threshold(entries, tol)


def submatrix_rows(kind: SubmatrixKind, N: int) -> list[tuple[int, int]]:
    shift = 0 if SubmatrixKind(kind) is SubmatrixKind.H else 1
    return [(n, n + shift) for n in range(N + 1)]


def principal_submatrix(pnd: PhotonNumberDistribution, kind: SubmatrixKind, N: int) -> np.ndarray:
    """H(N) (rows |n, n>) or H_tilde(N) (rows |n, n+1>) of PT(rho_out), from the element formula."""
    kind = SubmatrixKind(kind)
    ms = moment_sequence(pnd)
    if not order_feasible(ms, kind.hankel_kind, N):
        raise OrderTooLarge(f"{kind.value}({N}) needs moments beyond n_max = {pnd.n_max}")
    rows = np.array(submatrix_rows(kind, N))
    a, b = rows[:, 0], rows[:, 1]
    return _pt_elements(ms, a[:, None], b[:, None], a[None, :], b[None, :])


@dataclass(frozen=True)
class NPTCertificate:
    verdict: NPTVerdict
    method: Method | None
    detecting_order: int | None
    min_pt_eigenvalue: float
    log_negativity: float

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "method": self.method.value if self.method else None,
            "detecting_order": self.detecting_order,
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "log_negativity": self.log_negativity,
        }


def first_cheap_detector(
    pnd: PhotonNumberDistribution, max_order: int, tol: float
) -> tuple[Method, int | None] | None:
    """Witness, then H(N) and H_tilde(N) for ascending N; the first one that fires."""
    if witness_2x2(pnd, tol)[1]:
        return Method.WITNESS, None
    ms = moment_sequence(pnd)
    for N in range(max_order + 1):
        for kind, method in ((SubmatrixKind.H, Method.SUBMATRIX_H), (SubmatrixKind.H_TILDE, Method.SUBMATRIX_H_TILDE)):
            if not order_feasible(ms, kind.hankel_kind, N):
                continue
            mat = principal_submatrix(pnd, kind, N)
            if np.linalg.eigvalsh(mat)[0] < -psd_threshold(mat, tol):
                return method, N
    return None


def npt_certificate(
    pnd: PhotonNumberDistribution, max_order: int | None = None, tol: float = DEFAULT_TOL
) -> NPTCertificate:
    """Run every detector; the verdict always rests on the full PT spectrum.

    ``method`` names the cheapest detector that fired (``full_spectrum`` if
    only the complete eigendecomposition sees the negativity).
    """
    if max_order is None:
        max_order = default_max_order(pnd)
    found = first_cheap_detector(pnd, max_order, tol)
    eigs = pt_spectrum(pnd)
    lowest = float(eigs[0])
    ln = log_negativity(eigs)
    # every PT entry is an entry of a density matrix, so |entry| <= 1 and the floor applies
    if not lowest < -tol:
        return NPTCertificate(NPTVerdict.NO_DETECTION, None, None, lowest, ln)
    method, order = found if found is not None else (Method.FULL_SPECTRUM, None)
    return NPTCertificate(NPTVerdict.NPT, method, order, lowest, ln)
