"""Compiled event loop for finite graphs.

:func:`simulate_kernel` runs one trajectory with the same transition rules
and random call sequence as :func:`wavegraph.ips.engine.simulate` but
without Python-level hooks. It records, at each requested sample time, the
state, the exact node time integrals and the jump count.
"""

import numpy as np
from numba import njit

from .rate_tree import tree_rebuild, tree_sample, tree_update

STATUS_OK = 0
STATUS_JUMP_LIMIT = 1


@njit(cache=True)
def simulate_kernel(nodes, edges, mass, weight, tail, head, fixed,
                    inc_ptr, inc_edge, inc_sign, sample_times, rng, max_jumps):
    """Simulate one trajectory from time 0 to ``sample_times[-1]``.

    Args:
        nodes, edges: Initial int64 counts (copied)
        mass, weight, tail, head, fixed: Graph arrays
        inc_ptr, inc_edge, inc_sign: CSR incidence (sign +1 when the edge leaves the node)
        sample_times: Sorted, non-negative sample times
        rng: numpy Generator
        max_jumps: Circuit breaker

    Returns:
        (node snapshots (S, V), edge snapshots (S, E), node integrals (S, V),
        jump counts (S,), status)
    """
    f = nodes.copy()
    c = edges.copy()
    V = f.shape[0]
    E = c.shape[0]
    S = sample_times.shape[0]

    slots = 2 * max(V, E, 1)
    cap = 2
    while cap < slots:
        cap *= 2
    tree = np.zeros(2 * cap)
    for i in range(V):
        tree[cap + 2 * i] = abs(f[i]) / mass[i]
    for e in range(E):
        tree[cap + 2 * e + 1] = weight[e] * abs(c[e])
    tree_rebuild(tree, cap)

    node_snaps = np.zeros((S, V), dtype=np.int64)
    edge_snaps = np.zeros((S, E), dtype=np.int64)
    integrals = np.zeros((S, V))
    jump_counts = np.zeros(S, dtype=np.int64)
    acc = np.zeros(V)
    last = np.zeros(V)

    t = 0.0
    jumps = 0
    k = 0
    horizon = sample_times[S - 1] if S > 0 else 0.0
    status = STATUS_OK

    while True:
        total = tree[1]
        if total <= 0.0:
            break
        xi = rng.standard_exponential() / total
        if t + xi > horizon:
            break
        if jumps >= max_jumps:
            status = STATUS_JUMP_LIMIT
            break
        tau = t + xi
        while k < S and sample_times[k] < tau:
            s_time = sample_times[k]
            for i in range(V):
                node_snaps[k, i] = f[i]
                integrals[k, i] = acc[i] + f[i] * (s_time - last[i])
            for e in range(E):
                edge_snaps[k, e] = c[e]
            jump_counts[k] = jumps
            k += 1

        slot = tree_sample(tree, cap, rng.random())
        index = slot // 2
        if slot % 2 == 0:
            s = 1 if f[index] > 0 else -1
            for p in range(inc_ptr[index], inc_ptr[index + 1]):
                e = inc_edge[p]
                c[e] -= s * inc_sign[p]
                tree_update(tree, cap, 2 * e + 1, weight[e] * abs(c[e]))
        else:
            s = 1 if c[index] > 0 else -1
            x = tail[index]
            y = head[index]
            if not fixed[x]:
                acc[x] += f[x] * (tau - last[x])
                last[x] = tau
                f[x] += s
                tree_update(tree, cap, 2 * x, abs(f[x]) / mass[x])
            if not fixed[y]:
                acc[y] += f[y] * (tau - last[y])
                last[y] = tau
                f[y] -= s
                tree_update(tree, cap, 2 * y, abs(f[y]) / mass[y])
        t = tau
        jumps += 1

    while k < S:
        s_time = sample_times[k]
        for i in range(V):
            node_snaps[k, i] = f[i]
            integrals[k, i] = acc[i] + f[i] * (s_time - last[i])
        for e in range(E):
            edge_snaps[k, e] = c[e]
        jump_counts[k] = jumps
        k += 1

    return node_snaps, edge_snaps, integrals, jump_counts, status


@njit(cache=True)
def yule_kernel(lam, r, T, rng):
    """Number of births of a Yule process started from r up to time T."""
    t = 0.0
    births = 0
    while True:
        t += rng.standard_exponential() / ((r + births) * lam)
        if t > T:
            return births
        births += 1
