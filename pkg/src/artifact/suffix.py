"""Suffix array (prefix doubling on numpy) and Kasai LCP."""

import numpy as np


def suffix_array(seq) -> np.ndarray:
    s = np.asarray(seq, dtype=np.int64)
    n = len(s)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(s, return_inverse=True)
    rank = rank.astype(np.int64)
    k = 1
    while True:
        second = np.zeros(n, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:] + 1
        key = rank * (n + 2) + second
        sa = np.argsort(key, kind="stable")
        ks = key[sa]
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.concatenate(([0], np.cumsum(ks[1:] != ks[:-1])))
        rank = new
        if rank.max() == n - 1 or k >= n:
            return sa
        k *= 2


def lcp_array(seq, sa) -> list[int]:
    """lcp[i] = longest common prefix of suffixes sa[i-1] and sa[i]; lcp[0] = 0."""
    s = list(seq)
    n = len(s)
    sa = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sa):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for p in range(n):
        r = rank[p]
        if r == 0:
            h = 0
            continue
        q = sa[r - 1]
        while p + h < n and q + h < n and s[p + h] == s[q + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp
