"""Pure-Python (numpy) implementations of the hot kernels.

These mirror ``_ckernels.pyx`` exactly and are used when the compiled
extension is unavailable.
"""

import numpy as np


def count_inversions(a):
    """Number of pairs ``i < j`` with ``a[i] > a[j]`` (ties are not inversions).

    Bottom-up merge sort in which each level counts, for every element of a
    right block, the elements of its left partner block that exceed it. All
    block pairs of a level are handled in one vectorized ``searchsorted`` by
    offsetting dense ranks with the pair index.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    if n < 2:
        return 0
    _, cur = np.unique(a, return_inverse=True)
    cur = cur.astype(np.int64).ravel()
    m = int(cur.max()) + 1
    idx = np.arange(n, dtype=np.int64)
    total = 0
    width = 1
    while width < n:
        block = idx // width
        pair = block // 2
        is_right = (block % 2) == 1
        key = pair * m + cur
        left_keys = key[~is_right]
        right_pair = pair[is_right]
        upper = np.searchsorted(left_keys, right_pair * m + (m - 1), side="right")
        not_greater = np.searchsorted(left_keys, key[is_right], side="right")
        total += int(np.sum(upper - not_greater))
        cur = np.sort(key) - (idx // (2 * width)) * m
        width *= 2
    return total


def lasso_cd(X, y, lam, tol, max_iter, beta):
    """Cyclic coordinate descent for ``(1/2n)||y - X b||^2 + lam * ||b||_1``.

    ``X`` is (n, p), ``y`` is centred, ``beta`` the starting point (not
    modified). Returns ``(beta, n_iter, converged)``; convergence means the
    largest coefficient change in a sweep fell below ``tol``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    beta = np.array(beta, dtype=float)
    z = np.einsum("ij,ij->j", X, X) / n
    r = y - X @ beta
    columns = [np.ascontiguousarray(X[:, j]) for j in range(p)]
    for it in range(max_iter):
        max_change = 0.0
        for j in range(p):
            if z[j] == 0.0:
                continue
            xj = columns[j]
            rho = float(xj @ r) / n + z[j] * beta[j]
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / z[j]
            d = new - beta[j]
            if d != 0.0:
                r -= d * xj
                beta[j] = new
                max_change = max(max_change, abs(d))
        if max_change < tol:
            return beta, it + 1, True
    return beta, max_iter, False
