"""Pure-Python twin of the compiled ``_modp`` kernel.

Same algorithm and same output layout; used when the extension is not
built or when ``PROLAB_PURE=1`` is set.
"""
from __future__ import annotations

import heapq

import numpy as np


def _reduce(acc: dict[int, int], pivot_rows: dict[int, dict[int, int]], p: int) -> int:
    """Reduce ``acc`` in place against ``pivot_rows``; return its leading column or -1."""
    heap = list(acc)
    heapq.heapify(heap)
    lead = -1
    seen = set()
    while heap:
        c = heapq.heappop(heap)
        if c in seen:
            continue
        seen.add(c)
        a = acc.get(c, 0)
        if a == 0:
            continue
        row = pivot_rows.get(c)
        if row is None:
            if lead < 0:
                lead = c
            continue
        for j, v in row.items():
            if j not in acc:
                heapq.heappush(heap, j)
                acc[j] = (-a * v) % p
            else:
                acc[j] = (acc[j] - a * v) % p
    return lead


def _normalised(acc: dict[int, int], lead: int, p: int) -> dict[int, int]:
    inv = pow(acc[lead], p - 2, p)
    return {j: v * inv % p for j, v in sorted(acc.items()) if v and j >= lead}


def echelon(indptr, indices, data, ncols: int, p: int, full: bool = True):
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    data = [int(x) for x in data]
    pivot_rows: dict[int, dict[int, int]] = {}
    for r in range(len(indptr) - 1):
        acc: dict[int, int] = {}
        for t in range(indptr[r], indptr[r + 1]):
            j = indices[t]
            acc[j] = (acc.get(j, 0) + data[t]) % p
        if not acc:
            continue
        lead = _reduce(acc, pivot_rows, p)
        if lead >= 0:
            pivot_rows[lead] = _normalised(acc, lead, p)

    if full:
        done: dict[int, dict[int, int]] = {}
        for lead in sorted(pivot_rows, reverse=True):
            acc = dict(pivot_rows[lead])
            for c in sorted(acc):
                if c == lead:
                    continue
                a = acc.get(c, 0)
                if a and c in done:
                    for j, v in done[c].items():
                        acc[j] = (acc.get(j, 0) - a * v) % p
            done[lead] = _normalised(acc, lead, p)
        pivot_rows = done

    pivots = sorted(pivot_rows)
    row_ptr = [0]
    cols: list[int] = []
    vals: list[int] = []
    for c in pivots:
        row = pivot_rows[c]
        cols.extend(row)
        vals.extend(row.values())
        row_ptr.append(len(cols))
    return (
        np.asarray(pivots, dtype=np.int64),
        np.asarray(row_ptr, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.uint64),
    )
