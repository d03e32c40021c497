"""Pure-Python reference kernels.

Same signatures and outputs as the compiled ``_kernels`` extension; used when
the extension is not built or ``CLAB_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np


def components(n, a, b):
    """Connected components of the graph on ``range(n)`` with edges a[i]--b[i].

    Returns int64 labels where each label is the smallest node index in its
    component.
    """
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for x, y in zip(np.asarray(a).tolist(), np.asarray(b).tolist()):
        rx, ry = find(x), find(y)
        if rx != ry:
            # keep the smaller index as root so labels come out canonical
            if rx < ry:
                parent[ry] = rx
            else:
                parent[rx] = ry
    return np.array([find(x) for x in range(n)], dtype=np.int64)


def propagate(perms, tables, moduli, mask):
    """Solve F(T_i y) - F(y) = tables[i, y] orbit by orbit.

    perms: (g, m) generator permutations; tables: (g, m, r) residues;
    moduli: (r,) residue moduli; mask: (m,) points to solve on (closed under
    the action).  Each orbit is rooted at its lowest index with F = 0.

    Returns (F, base, fail) where base[y] is the root of y's orbit (-1 when
    masked out) and fail[root] = (generator, point) of the first violated
    edge in that orbit, or (-1, -1).
    """
    perms = np.asarray(perms, dtype=np.int64)
    tables = np.asarray(tables, dtype=np.int64)
    g, m = perms.shape
    r = len(moduli)
    mods = [int(x) for x in moduli]
    P = perms.tolist()
    Tb = tables.tolist()
    msk = np.asarray(mask, dtype=bool).tolist()
    F = [[0] * r for _ in range(m)]
    base = [-1] * m
    fail = [[-1, -1] for _ in range(m)]
    for root in range(m):
        if not msk[root] or base[root] >= 0:
            continue
        base[root] = root
        queue = [root]
        head = 0
        bad = False
        while head < len(queue):
            y = queue[head]
            head += 1
            Fy = F[y]
            for i in range(g):
                y2 = P[i][y]
                t = Tb[i][y]
                val = [(Fy[c] + t[c]) % mods[c] for c in range(r)]
                if base[y2] < 0:
                    base[y2] = root
                    F[y2] = val
                    queue.append(y2)
                elif not bad and F[y2] != val:
                    fail[root] = [i, y]
                    bad = True
    return (np.array(F, dtype=np.int64).reshape(m, r),
            np.array(base, dtype=np.int64),
            np.array(fail, dtype=np.int64).reshape(m, 2))


def skew_orbit(two_alpha, alpha, n):
    """Iterate (z, k) -> (z + 2a, k + z + a) mod 1 from (0, 0), n points."""
    out = np.empty((n, 2), dtype=np.float64)
    z = 0.0
    k = 0.0
    for j in range(n):
        out[j, 0] = z
        out[j, 1] = k
        k = k + z + alpha
        k -= math.floor(k)
        z = z + two_alpha
        z -= math.floor(z)
    return out
