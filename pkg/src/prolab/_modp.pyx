# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled row-streaming elimination over F_p, p < 2**63.

Input is a CSR matrix with entries already reduced into [0, p). The output
is the echelon (or reduced echelon) form as CSR rows sorted by pivot column,
each row normalised to 1 at its pivot.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport calloc, free, malloc

cnp.import_array()

cdef extern from *:
    """
    static inline uint64_t prolab_mulmod(uint64_t a, uint64_t b, uint64_t p) {
        return (uint64_t)(((unsigned __int128)a * b) % p);
    }
    static inline uint64_t prolab_powmod(uint64_t a, uint64_t e, uint64_t p) {
        uint64_t r = 1 % p;
        a %= p;
        while (e) {
            if (e & 1) r = prolab_mulmod(r, a, p);
            a = prolab_mulmod(a, a, p);
            e >>= 1;
        }
        return r;
    }
    """
    uint64_t prolab_mulmod(uint64_t a, uint64_t b, uint64_t p) nogil
    uint64_t prolab_powmod(uint64_t a, uint64_t e, uint64_t p) nogil


cdef inline uint64_t _submod(uint64_t a, uint64_t b, uint64_t p) noexcept nogil:
    return a - b if a >= b else a + (p - b)


cdef inline uint64_t _addmod(uint64_t a, uint64_t b, uint64_t p) noexcept nogil:
    cdef uint64_t s = a + b
    return s - p if s >= p else s


cdef struct ColHeap:
    # min-heap of column indices; `mark` keeps each column in it at most once
    int64_t* items
    char* mark
    Py_ssize_t size


cdef inline void _push(ColHeap* h, int64_t c) noexcept nogil:
    if h.mark[c]:
        return
    h.mark[c] = 1
    cdef Py_ssize_t i = h.size
    h.size += 1
    while i > 0 and h.items[(i - 1) >> 1] > c:
        h.items[i] = h.items[(i - 1) >> 1]
        i = (i - 1) >> 1
    h.items[i] = c


cdef inline int64_t _pop(ColHeap* h) noexcept nogil:
    cdef int64_t top = h.items[0]
    cdef int64_t last
    cdef Py_ssize_t i = 0, child
    h.size -= 1
    h.mark[top] = 0
    if h.size > 0:
        last = h.items[h.size]
        while True:
            child = 2 * i + 1
            if child >= h.size:
                break
            if child + 1 < h.size and h.items[child + 1] < h.items[child]:
                child += 1
            if h.items[child] >= last:
                break
            h.items[i] = h.items[child]
            i = child
        h.items[i] = last
    return top


cdef int _reduce(uint64_t* acc, ColHeap* h, int64_t** pcols, uint64_t** pvals, int64_t* plen,
                 int64_t skip, uint64_t p, int64_t* keep) noexcept nogil:
    """Clear every nonzero column of acc that has a pivot row (except `skip`).

    Columns are visited in increasing order; the surviving columns are written
    to `keep` in that order and their count is returned. acc is left zero.
    """
    cdef int64_t c, t, j
    cdef uint64_t a
    cdef int64_t* rc
    cdef uint64_t* rv
    cdef int n = 0
    while h.size > 0:
        c = _pop(h)
        a = acc[c]
        if a == 0:
            continue
        if c != skip and plen[c] > 0:
            rc = pcols[c]
            rv = pvals[c]
            for t in range(plen[c]):
                j = rc[t]
                acc[j] = _submod(acc[j], prolab_mulmod(a, rv[t], p), p)
                if acc[j] != 0:
                    _push(h, j)
            acc[c] = 0
        else:
            keep[n] = c
            n += 1
    return n


cdef int _store_row(uint64_t* acc, int64_t* keep, int n, uint64_t p,
                    int64_t** pcols, uint64_t** pvals, int64_t* plen) noexcept nogil:
    """Normalise the surviving columns at their first entry and move them to pivot storage."""
    cdef int64_t lead = keep[0]
    cdef uint64_t inv = prolab_powmod(acc[lead], p - 2, p)
    cdef int t
    pcols[lead] = <int64_t*> malloc(n * sizeof(int64_t))
    pvals[lead] = <uint64_t*> malloc(n * sizeof(uint64_t))
    if pcols[lead] == NULL or pvals[lead] == NULL:
        return -1
    plen[lead] = n
    for t in range(n):
        pcols[lead][t] = keep[t]
        pvals[lead][t] = prolab_mulmod(acc[keep[t]], inv, p)
        acc[keep[t]] = 0
    return 0


def echelon(const int64_t[:] indptr, const int64_t[:] indices, const uint64_t[:] data,
            Py_ssize_t ncols, uint64_t p, bint full=True):
    """Row-streaming Gauss elimination mod p.

    Each incoming row is reduced against every existing pivot row; a surviving
    row becomes a new pivot row. With ``full`` the pivot rows are then
    back-substituted into reduced row echelon form. Only the nonzero columns
    of the working row are visited.

    Returns ``(pivots, row_ptr, row_cols, row_vals)`` as numpy arrays.
    """
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef Py_ssize_t width = max(ncols, 1)
    cdef uint64_t* acc = <uint64_t*> calloc(width, sizeof(uint64_t))
    cdef int64_t** pcols = <int64_t**> calloc(width, sizeof(int64_t*))
    cdef uint64_t** pvals = <uint64_t**> calloc(width, sizeof(uint64_t*))
    cdef int64_t* plen = <int64_t*> calloc(width, sizeof(int64_t))
    cdef int64_t* keep = <int64_t*> malloc(width * sizeof(int64_t))
    cdef ColHeap heap
    heap.items = <int64_t*> malloc(width * sizeof(int64_t))
    heap.mark = <char*> calloc(width, sizeof(char))
    heap.size = 0
    if (acc == NULL or pcols == NULL or pvals == NULL or plen == NULL or keep == NULL
            or heap.items == NULL or heap.mark == NULL):
        free(acc); free(pcols); free(pvals); free(plen); free(keep); free(heap.items); free(heap.mark)
        raise MemoryError()

    cdef Py_ssize_t r, t, c, npiv = 0, total = 0
    cdef int64_t j, lead
    cdef int n
    cdef int failed = 0

    try:
        with nogil:
            for r in range(nrows):
                for t in range(indptr[r], indptr[r + 1]):
                    j = indices[t]
                    acc[j] = _addmod(acc[j], data[t], p)
                    _push(&heap, j)
                n = _reduce(acc, &heap, pcols, pvals, plen, -1, p, keep)
                if n > 0:
                    if _store_row(acc, keep, n, p, pcols, pvals, plen) != 0:
                        failed = 1
                        break
                    npiv += 1

            if full and not failed:
                # back substitution, highest pivot first: rows above are
                # cleared only of already fully reduced pivot rows
                for lead in range(ncols - 1, -1, -1):
                    if plen[lead] == 0:
                        continue
                    for t in range(plen[lead]):
                        acc[pcols[lead][t]] = pvals[lead][t]
                        _push(&heap, pcols[lead][t])
                    free(pcols[lead])
                    free(pvals[lead])
                    plen[lead] = 0
                    pcols[lead] = NULL
                    pvals[lead] = NULL
                    n = _reduce(acc, &heap, pcols, pvals, plen, lead, p, keep)
                    if _store_row(acc, keep, n, p, pcols, pvals, plen) != 0:
                        failed = 1
                        break

        if failed:
            raise MemoryError("pivot row allocation failed")

        for c in range(ncols):
            total += plen[c]
        pivots = np.empty(npiv, dtype=np.int64)
        row_ptr = np.zeros(npiv + 1, dtype=np.int64)
        row_cols = np.empty(total, dtype=np.int64)
        row_vals = np.empty(total, dtype=np.uint64)
        _copy_out(pcols, pvals, plen, ncols, pivots, row_ptr, row_cols, row_vals)
        return pivots, row_ptr, row_cols, row_vals
    finally:
        for c in range(ncols):
            if pcols[c] != NULL:
                free(pcols[c])
            if pvals[c] != NULL:
                free(pvals[c])
        free(pcols)
        free(pvals)
        free(plen)
        free(acc)
        free(keep)
        free(heap.items)
        free(heap.mark)


cdef void _copy_out(int64_t** pcols, uint64_t** pvals, int64_t* plen, Py_ssize_t ncols,
                    int64_t[:] pivots, int64_t[:] row_ptr, int64_t[:] row_cols,
                    uint64_t[:] row_vals) noexcept:
    cdef Py_ssize_t c, t, i = 0, pos = 0
    for c in range(ncols):
        if plen[c] == 0:
            continue
        pivots[i] = c
        for t in range(plen[c]):
            row_cols[pos] = pcols[c][t]
            row_vals[pos] = pvals[c][t]
            pos += 1
        i += 1
        row_ptr[i] = pos
