# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see _kernels_py for the reference semantics."""
import numpy as np
from libc.math cimport floor


cdef Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t x) noexcept nogil:
    cdef Py_ssize_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def components(Py_ssize_t n, a, b):
    cdef const long long[::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const long long[::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    parent_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, rx, ry, e = av.shape[0]
    with nogil:
        for i in range(e):
            rx = _find(parent, <Py_ssize_t>av[i])
            ry = _find(parent, <Py_ssize_t>bv[i])
            if rx != ry:
                if rx < ry:
                    parent[ry] = rx
                else:
                    parent[rx] = ry
        for i in range(n):
            out[i] = _find(parent, i)
    return out_arr


def propagate(perms, tables, moduli, mask):
    cdef const long long[:, ::1] P = np.ascontiguousarray(perms, dtype=np.int64)
    cdef const long long[:, :, ::1] T = np.ascontiguousarray(tables, dtype=np.int64)
    cdef const long long[::1] mods = np.ascontiguousarray(moduli, dtype=np.int64)
    cdef const unsigned char[::1] msk = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t g = P.shape[0], m = P.shape[1], r = mods.shape[0]
    F_arr = np.zeros((m, r), dtype=np.int64)
    base_arr = np.full(m, -1, dtype=np.int64)
    fail_arr = np.full((m, 2), -1, dtype=np.int64)
    queue_arr = np.empty(max(m, 1), dtype=np.int64)
    cdef long long[:, ::1] F = F_arr
    cdef long long[::1] base = base_arr
    cdef long long[:, ::1] fail = fail_arr
    cdef long long[::1] queue = queue_arr
    cdef Py_ssize_t root, head, tail, y, y2, i, c
    cdef long long val
    cdef bint bad, differs
    with nogil:
        for root in range(m):
            if not msk[root] or base[root] >= 0:
                continue
            base[root] = root
            queue[0] = root
            head = 0
            tail = 1
            bad = False
            while head < tail:
                y = queue[head]
                head += 1
                for i in range(g):
                    y2 = P[i, y]
                    if base[y2] < 0:
                        base[y2] = root
                        for c in range(r):
                            F[y2, c] = (F[y, c] + T[i, y, c]) % mods[c]
                        queue[tail] = y2
                        tail += 1
                    elif not bad:
                        differs = False
                        for c in range(r):
                            val = (F[y, c] + T[i, y, c]) % mods[c]
                            if val != F[y2, c]:
                                differs = True
                        if differs:
                            fail[root, 0] = i
                            fail[root, 1] = y
                            bad = True
    return F_arr, base_arr, fail_arr


def skew_orbit(double two_alpha, double alpha, Py_ssize_t n):
    out_arr = np.empty((n, 2), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double z = 0.0, k = 0.0
    cdef Py_ssize_t j
    with nogil:
        for j in range(n):
            out[j, 0] = z
            out[j, 1] = k
            k = k + z + alpha
            k -= floor(k)
            z = z + two_alpha
            z -= floor(z)
    return out_arr
