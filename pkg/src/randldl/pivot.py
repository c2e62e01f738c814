"""Pivot selection rules for symmetric indefinite elimination.

Three rules are provided, all operating on the leading column(s) of the
active Schur complement and emitting a :class:`PivotDecision`:

* ``sbkp_decide``: simplified partial pivoting with threshold alpha =
  sqrt(2)/2.  Used together with a column-norm pre-pivot; its 2x2 blocks
  have determinant at least ``(1 - alpha^2) * lambda^2`` in magnitude.
* ``bkpp_decide``: classic partial pivoting with alpha = (1 + sqrt(17))/8.
  Fast, but multipliers are unbounded on adversarial inputs.
* ``bbk_decide``: bounded (rook) pivoting.  Alternates row and column scans
  until the tested diagonal dominates its row, which bounds multipliers by
  1/alpha for 1x1 pivots and 1/(1 - alpha) for 2x2 pivots at the cost of a
  potentially quadratic search per step.

The decision functions never modify the matrix; they only read it and
increment the comparison counter by the length of each max scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .core import require_square
from .metrics import OpCounters

__all__ = [
    "PivotKind",
    "PivotDecision",
    "PivotParams",
    "SBKP_ALPHA",
    "BK_ALPHA",
    "sbkp_decide",
    "bkpp_decide",
    "bbk_decide",
]

#: Threshold for the simplified rule; maximizes the 2x2 determinant bound.
SBKP_ALPHA = math.sqrt(2.0) / 2.0

#: Classic Bunch-Kaufman threshold; equalizes 1x1 and 2x2 growth per step.
BK_ALPHA = (1.0 + math.sqrt(17.0)) / 8.0


class PivotKind(Enum):
    SKIP = "skip"
    ONE_BY_ONE = "1x1"
    ONE_BY_ONE_SWAP_R = "1x1-swap"
    TWO_BY_TWO = "2x2"


@dataclass(frozen=True)
class PivotDecision:
    """Outcome of one pivot search.

    ``s`` is the block size (1 or 2); ``r`` the secondary index for swap and
    2x2 cases.  ``p`` is set only by the rook search when the 2x2 block pairs
    two rows that both differ from the leading position: the caller swaps
    ``p`` to position k before swapping ``r`` to position k+1.
    """

    kind: PivotKind
    s: int
    r: int | None = None
    p: int | None = None


@dataclass(frozen=True)
class PivotParams:
    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")


ColumnProvider = Callable[[int], np.ndarray]
DiagProvider = Callable[[int], float]


def _scan_max(values: np.ndarray, counters: OpCounters) -> tuple[float, int]:
    """Max magnitude and its first index; counts the scan's comparisons."""
    counters.comps += max(values.size - 1, 0)
    j = int(np.argmax(values))
    return float(values[j]), j


def sbkp_decide(a: np.ndarray, k: int, params: PivotParams | None, counters: OpCounters) -> PivotDecision:
    """Simplified rule on the (already column-pivoted) leading column.

    Reads column k of the active Schur complement stored in ``a[k:, k:]``.
    """
    a = require_square(a)
    _check_k(a, k)
    params = params or PivotParams(SBKP_ALPHA)
    return _sbkp_from_data(
        a_kk=float(a[k, k]),
        sub=np.abs(a[k + 1 :, k]),
        diag_at=lambda r: float(a[r, r]),
        k=k,
        params=params,
        counters=counters,
    )


def _sbkp_from_data(
    a_kk: float,
    sub: np.ndarray,
    diag_at: DiagProvider,
    k: int,
    params: PivotParams,
    counters: OpCounters,
) -> PivotDecision:
    lam, j = _scan_max(sub, counters) if sub.size else (0.0, 0)
    if sub.size == 0 or lam == 0.0:
        return PivotDecision(PivotKind.SKIP, s=1)
    r = k + 1 + j
    alpha = params.alpha
    if abs(a_kk) >= alpha * lam:
        return PivotDecision(PivotKind.ONE_BY_ONE, s=1)
    if abs(diag_at(r)) >= alpha * lam:
        return PivotDecision(PivotKind.ONE_BY_ONE_SWAP_R, s=1, r=r)
    return PivotDecision(PivotKind.TWO_BY_TWO, s=2, r=r)


def bkpp_decide(a: np.ndarray, k: int, params: PivotParams | None, counters: OpCounters) -> PivotDecision:
    """Classic partial pivoting on column k of the active Schur complement."""
    a = require_square(a)
    _check_k(a, k)
    params = params or PivotParams(BK_ALPHA)
    return _bkpp_from_data(
        a_kk=float(a[k, k]),
        sub=np.abs(a[k + 1 :, k]),
        column_at=lambda j: a[k:, j],
        k=k,
        params=params,
        counters=counters,
    )


def _bkpp_from_data(
    a_kk: float,
    sub: np.ndarray,
    column_at: ColumnProvider,
    k: int,
    params: PivotParams,
    counters: OpCounters,
) -> PivotDecision:
    lam, j = _scan_max(sub, counters) if sub.size else (0.0, 0)
    if sub.size == 0 or lam == 0.0:
        return PivotDecision(PivotKind.SKIP, s=1)
    r = k + 1 + j
    alpha = params.alpha
    if abs(a_kk) >= alpha * lam:
        return PivotDecision(PivotKind.ONE_BY_ONE, s=1)
    col_r = np.asarray(column_at(r), dtype=np.float64)
    absr = np.abs(col_r)
    mask = np.ones(absr.size, dtype=bool)
    mask[r - k] = False
    sigma, _ = _scan_max(absr[mask], counters)
    a_rr = float(col_r[r - k])
    if abs(a_kk) * sigma >= alpha * lam * lam:
        return PivotDecision(PivotKind.ONE_BY_ONE, s=1)
    if abs(a_rr) >= alpha * sigma:
        return PivotDecision(PivotKind.ONE_BY_ONE_SWAP_R, s=1, r=r)
    return PivotDecision(PivotKind.TWO_BY_TWO, s=2, r=r)


def bbk_decide(a: np.ndarray, k: int, params: PivotParams | None, counters: OpCounters) -> PivotDecision:
    """Rook search on the active Schur complement."""
    a = require_square(a)
    _check_k(a, k)
    params = params or PivotParams(BK_ALPHA)
    return _bbk_from_data(
        a_kk=float(a[k, k]),
        sub=np.abs(a[k + 1 :, k]),
        column_at=lambda j: a[k:, j],
        k=k,
        n=a.shape[0],
        params=params,
        counters=counters,
    )


def _bbk_from_data(
    a_kk: float,
    sub: np.ndarray,
    column_at: ColumnProvider,
    k: int,
    n: int,
    params: PivotParams,
    counters: OpCounters,
) -> PivotDecision:
    lam, j = _scan_max(sub, counters) if sub.size else (0.0, 0)
    if sub.size == 0 or lam == 0.0:
        return PivotDecision(PivotKind.SKIP, s=1)
    alpha = params.alpha
    if abs(a_kk) >= alpha * lam:
        return PivotDecision(PivotKind.ONE_BY_ONE, s=1)
    # Rook walk: p_idx holds the previous candidate, imax the current one,
    # colmax = |A(imax, p_idx)|.  colmax grows strictly on every hop, so the
    # walk visits at most n - k columns before it must stop.
    p_idx = k
    imax = k + 1 + j
    colmax = lam
    for _ in range(n - k):
        col = np.asarray(column_at(imax), dtype=np.float64)
        absc = np.abs(col)
        mask = np.ones(absc.size, dtype=bool)
        mask[imax - k] = False
        offsets = np.nonzero(mask)[0]
        rowmax, local = _scan_max(absc[mask], counters)
        jmax = k + int(offsets[local])
        if abs(col[imax - k]) >= alpha * rowmax:
            return PivotDecision(PivotKind.ONE_BY_ONE_SWAP_R, s=1, r=imax)
        if jmax == p_idx or rowmax <= colmax:
            pre = None if p_idx == k else p_idx
            return PivotDecision(PivotKind.TWO_BY_TWO, s=2, r=imax, p=pre)
        p_idx, imax, colmax = imax, jmax, rowmax
    raise AssertionError("rook search failed to terminate")  # pragma: no cover


def _check_k(a: np.ndarray, k: int) -> None:
    if not (0 <= k < a.shape[0]):
        raise ValueError(f"pivot step k={k} out of range for n={a.shape[0]}")
