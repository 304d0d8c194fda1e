# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference implementation."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, abs as cabs

cnp.import_array()


def bfs_csr(cnp.int64_t[:] indptr, cnp.int64_t[:] indices, Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef int[:] dist = dist_arr
    cdef Py_ssize_t *queue = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t head = 0, tail = 0, u, v, k
    try:
        dist[source] = 0
        queue[tail] = source
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
    finally:
        free(queue)
    return dist_arr


def all_pairs_bfs(cnp.int64_t[:] indptr, cnp.int64_t[:] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.full((n, n), -1, dtype=np.int32)
    cdef int[:, :] out = out_arr
    cdef Py_ssize_t *queue = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t s, head, tail, u, v, k
    try:
        for s in range(n):
            head = 0
            tail = 1
            queue[0] = s
            out[s, s] = 0
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if out[s, v] < 0:
                        out[s, v] = out[s, u] + 1
                        queue[tail] = v
                        tail += 1
    finally:
        free(queue)
    return out_arr


def articulation_points(cnp.int64_t[:] indptr, cnp.int64_t[:] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cut_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[:] cut = cut_arr
    cdef Py_ssize_t *disc = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *low = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *svert = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *spar = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *sptr = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t root, sp, u, p, k, v, w, t = 0, comps = 0, root_children
    try:
        for v in range(n):
            disc[v] = -1
        for root in range(n):
            if disc[root] >= 0:
                continue
            comps += 1
            disc[root] = t
            low[root] = t
            t += 1
            root_children = 0
            sp = 0
            svert[0] = root
            spar[0] = -1
            sptr[0] = indptr[root]
            while sp >= 0:
                u = svert[sp]
                p = spar[sp]
                k = sptr[sp]
                if k < indptr[u + 1]:
                    sptr[sp] = k + 1
                    v = indices[k]
                    if disc[v] < 0:
                        disc[v] = t
                        low[v] = t
                        t += 1
                        if u == root:
                            root_children += 1
                        sp += 1
                        svert[sp] = v
                        spar[sp] = u
                        sptr[sp] = indptr[v]
                    elif v != p:
                        if disc[v] < low[u]:
                            low[u] = disc[v]
                else:
                    sp -= 1
                    if sp >= 0:
                        w = svert[sp]
                        if low[u] < low[w]:
                            low[w] = low[u]
                        if w != root and low[u] >= disc[w]:
                            cut[w] = 1
            if root_children > 1:
                cut[root] = 1
    finally:
        free(disc)
        free(low)
        free(svert)
        free(spar)
        free(sptr)
    return comps, cut_arr


cdef inline Py_ssize_t _touch(long *coef, Py_ssize_t *touched, Py_ssize_t nt, Py_ssize_t x, long s) nogil:
    if coef[x] == 0:
        touched[nt] = x
        nt += 1
    coef[x] += s
    return nt


cdef Py_ssize_t _path_into(int[:] parent, int[:] depth, long *coef, Py_ssize_t *touched,
                           Py_ssize_t nt, Py_ssize_t a, Py_ssize_t b) nogil:
    while depth[a] > depth[b]:
        nt = _touch(coef, touched, nt, a, 1)
        a = parent[a]
    while depth[b] > depth[a]:
        nt = _touch(coef, touched, nt, b, -1)
        b = parent[b]
    while a != b:
        nt = _touch(coef, touched, nt, a, 1)
        a = parent[a]
        nt = _touch(coef, touched, nt, b, -1)
        b = parent[b]
    return nt


def tree_area_scan(int[:] parent, int[:] depth, int[:] ids):
    cdef Py_ssize_t n = parent.shape[0], m = ids.shape[0]
    cdef long *coef = <long *> malloc(max(n, 1) * sizeof(long))
    cdef Py_ssize_t *touched = <Py_ssize_t *> malloc(max(6 * n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t i, j, k, a, b, c, nt, x
    cdef long s, best = 0
    cdef long long total = 0, count = 0
    try:
        for i in range(n):
            coef[i] = 0
        with nogil:
            for i in range(m):
                a = ids[i]
                for j in range(i + 1, m):
                    b = ids[j]
                    for k in range(j + 1, m):
                        c = ids[k]
                        nt = _path_into(parent, depth, coef, touched, 0, a, b)
                        nt = _path_into(parent, depth, coef, touched, nt, b, c)
                        nt = _path_into(parent, depth, coef, touched, nt, c, a)
                        s = 0
                        for x in range(nt):
                            s += cabs(coef[touched[x]])
                            coef[touched[x]] = 0
                        total += s
                        if s > best:
                            best = s
                        count += 1
    finally:
        free(coef)
        free(touched)
    return int(best), int(total), int(count)


def tree_distance_matrix(int[:] parent, int[:] depth, int[:] ids):
    cdef Py_ssize_t m = ids.shape[0], i, j, a, b
    cdef int d
    out_arr = np.zeros((m, m), dtype=np.int32)
    cdef int[:, :] out = out_arr
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                a = ids[i]
                b = ids[j]
                d = 0
                while depth[a] > depth[b]:
                    a = parent[a]
                    d += 1
                while depth[b] > depth[a]:
                    b = parent[b]
                    d += 1
                while a != b:
                    a = parent[a]
                    b = parent[b]
                    d += 2
                out[i, j] = d
                out[j, i] = d
    return out_arr
