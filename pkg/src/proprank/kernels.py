"""Integer hot loops behind the enumeration-based rules and checkers.

Each kernel has a numba implementation and a pure-numpy twin. The numba
path is used when numba imports and ``PROPRANK_DISABLE_NUMBA`` is unset
(or ``0``); the numpy path is always importable and is what the tests
compare against. Kernels only ever see small integers (pair counts,
positions, bit masks), so both paths are exact.
"""

from __future__ import annotations

import os
from itertools import permutations

import numpy as np

_flag = os.environ.get("PROPRANK_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _flag not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("disabled by PROPRANK_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def all_permutations(m: int) -> np.ndarray:
    """Every ranking of ``0..m-1`` as rows, in lexicographic order."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(permutations(range(m))), dtype=np.int64)


def positions_matrix(orders) -> np.ndarray:
    """Row ``k`` holds the position of each candidate in ranking ``k``."""
    orders = np.asarray(orders, dtype=np.int64)
    pos = np.empty_like(orders)
    rows = np.arange(orders.shape[0])[:, None]
    pos[rows, orders] = np.arange(orders.shape[1])[None, :]
    return pos


# -- pairwise agreement of every candidate ranking with every support ranking


def permutation_utilities_numpy(perms: np.ndarray, support_pos: np.ndarray) -> np.ndarray:
    """``out[p, k]`` = pairs on which ``perms[p]`` agrees with support ranking ``k``."""
    n, m = perms.shape
    s = support_pos.shape[0]
    out = np.zeros((n, s), dtype=np.int64)
    if m < 2:
        return out
    iu, ju = np.triu_indices(m, k=1)
    for k in range(s):
        ranked = support_pos[k][perms]  # position (in k) of the candidate at each slot
        out[:, k] = np.count_nonzero(ranked[:, iu] < ranked[:, ju], axis=1)
    return out


def _permutation_utilities_py(perms, support_pos):
    n, m = perms.shape
    s = support_pos.shape[0]
    out = np.zeros((n, s), dtype=np.int64)
    for p in range(n):
        for k in range(s):
            agree = 0
            for i in range(m):
                pi = support_pos[k, perms[p, i]]
                for j in range(i + 1, m):
                    if pi < support_pos[k, perms[p, j]]:
                        agree += 1
            out[p, k] = agree
    return out


# -- union coverage of every subset of support rankings


def subset_coverage_numpy(agree: np.ndarray) -> np.ndarray:
    """``out[mask]`` = number of columns covered by the rows selected in ``mask``.

    ``agree`` is a boolean ``(s, n_pairs)`` matrix. Index 0 (empty set) is 0.
    """
    s, npairs = agree.shape
    total = 1 << s
    unions = np.zeros((total, npairs), dtype=bool)
    counts = np.zeros(total, dtype=np.int64)
    for mask in range(1, total):
        low = (mask & -mask).bit_length() - 1
        np.logical_or(unions[mask & (mask - 1)], agree[low], out=unions[mask])
        counts[mask] = np.count_nonzero(unions[mask])
    return counts


def _subset_coverage_py(agree):
    s, npairs = agree.shape
    total = 1 << s
    unions = np.zeros((total, npairs), dtype=np.bool_)
    counts = np.zeros(total, dtype=np.int64)
    for mask in range(1, total):
        rest = mask & (mask - 1)
        low = 0
        while not (mask >> low) & 1:
            low += 1
        c = 0
        for p in range(npairs):
            v = unions[rest, p] or agree[low, p]
            unions[mask, p] = v
            if v:
                c += 1
        counts[mask] = c
    return counts


if HAVE_NUMBA:
    permutation_utilities_numba = njit(cache=True)(_permutation_utilities_py)
    subset_coverage_numba = njit(cache=True)(_subset_coverage_py)
    permutation_utilities = permutation_utilities_numba
    subset_coverage = subset_coverage_numba
else:
    permutation_utilities_numba = None
    subset_coverage_numba = None
    permutation_utilities = permutation_utilities_numpy
    subset_coverage = subset_coverage_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
