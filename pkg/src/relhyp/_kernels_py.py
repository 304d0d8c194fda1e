"""Pure-Python kernels.  Same signatures as the compiled ``_kernels`` module."""
from collections import deque

import numpy as np


def bfs_csr(indptr, indices, source):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    q = deque([source])
    ip = indptr.tolist()
    ix = indices.tolist()
    d = dist.tolist()
    while q:
        u = q.popleft()
        du = d[u] + 1
        for k in range(ip[u], ip[u + 1]):
            v = ix[k]
            if d[v] < 0:
                d[v] = du
                q.append(v)
    return np.asarray(d, dtype=np.int32)


def all_pairs_bfs(indptr, indices):
    n = len(indptr) - 1
    out = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        out[s] = bfs_csr(indptr, indices, s)
    return out


def articulation_points(indptr, indices):
    """Return (number of connected components, uint8 flags of cut vertices)."""
    n = len(indptr) - 1
    ip = indptr.tolist()
    ix = indices.tolist()
    disc = [-1] * n
    low = [0] * n
    cut = [0] * n
    comps = 0
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        comps += 1
        disc[root] = low[root] = t
        t += 1
        root_children = 0
        # stack of (vertex, parent, next edge pointer)
        stack = [[root, -1, ip[root]]]
        while stack:
            top = stack[-1]
            u, p, k = top
            if k < ip[u + 1]:
                top[2] = k + 1
                v = ix[k]
                if disc[v] < 0:
                    disc[v] = low[v] = t
                    t += 1
                    if u == root:
                        root_children += 1
                    stack.append([v, u, ip[v]])
                elif v != p:
                    if disc[v] < low[u]:
                        low[u] = disc[v]
            else:
                stack.pop()
                if stack:
                    w = stack[-1][0]
                    if low[u] < low[w]:
                        low[w] = low[u]
                    if w != root and low[u] >= disc[w]:
                        cut[w] = 1
        if root_children > 1:
            cut[root] = 1
    return comps, np.asarray(cut, dtype=np.uint8)


def _path_into(parent, depth, coef, touched, a, b, sign):
    # add sign * (tree path a -> b); edge x is the edge from x to parent[x]
    while depth[a] > depth[b]:
        if coef[a] == 0:
            touched.append(a)
        coef[a] += sign
        a = parent[a]
    while depth[b] > depth[a]:
        if coef[b] == 0:
            touched.append(b)
        coef[b] -= sign
        b = parent[b]
    while a != b:
        if coef[a] == 0:
            touched.append(a)
        coef[a] += sign
        a = parent[a]
        if coef[b] == 0:
            touched.append(b)
        coef[b] -= sign
        b = parent[b]


def tree_area_scan(parent, depth, ids):
    """Max and sum over triples i<j<k of ||q[a,b]+q[b,c]+q[c,a]||_1 on a rooted tree.

    Returns (max_area, total_area, triples).
    """
    par = parent.tolist()
    dep = depth.tolist()
    vs = [int(v) for v in ids]
    coef = [0] * len(par)
    best = 0
    total = 0
    count = 0
    m = len(vs)
    for i in range(m):
        a = vs[i]
        for j in range(i + 1, m):
            b = vs[j]
            for k in range(j + 1, m):
                c = vs[k]
                touched = []
                _path_into(par, dep, coef, touched, a, b, 1)
                _path_into(par, dep, coef, touched, b, c, 1)
                _path_into(par, dep, coef, touched, c, a, 1)
                s = 0
                for x in touched:
                    s += abs(coef[x])
                    coef[x] = 0
                total += s
                if s > best:
                    best = s
                count += 1
    return best, total, count


def tree_distance_matrix(parent, depth, ids):
    par = parent.tolist()
    dep = depth.tolist()
    vs = [int(v) for v in ids]
    m = len(vs)
    out = np.zeros((m, m), dtype=np.int32)
    for i in range(m):
        for j in range(i + 1, m):
            a, b = vs[i], vs[j]
            d = 0
            while dep[a] > dep[b]:
                a = par[a]
                d += 1
            while dep[b] > dep[a]:
                b = par[b]
                d += 1
            while a != b:
                a = par[a]
                b = par[b]
                d += 2
            out[i, j] = out[j, i] = d
    return out
