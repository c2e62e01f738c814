"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from randldl import Factorization, reconstruct


def random_symmetric(n: int, seed: int = 0) -> np.ndarray:
    """Dense symmetric Gaussian test matrix (mirrored lower triangle)."""
    gen = np.random.Generator(np.random.Philox(seed))
    g = gen.standard_normal((n, n))
    return np.tril(g) + np.tril(g, -1).T


def recon_error(a: np.ndarray, f: Factorization) -> float:
    """Max-entry error of ``L D L^T`` against the permuted input, relative."""
    permuted = a[np.ix_(f.perm, f.perm)]
    denom = float(np.abs(a).max())
    err = float(np.abs(reconstruct(f) - permuted).max())
    return err / denom if denom else err
