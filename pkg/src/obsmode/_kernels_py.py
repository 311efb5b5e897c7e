"""Pure-Python synthesis kernels.

Both kernels take the belief graph in CSR form, with integer weights (costs
scaled by a common denominator):

``edge_ptr[b]:edge_ptr[b+1]``
    offered belief actions of belief ``b``, in action-major/mode-minor order
``edge_w[e]``
    integer weight of edge ``e``
``succ_ptr[e]:succ_ptr[e+1]``
    slice of ``succ`` holding the successor beliefs of edge ``e``

The compiled module ``_kernels_c`` implements the same functions with the same
results, bit for bit.
"""

import heapq


def unbounded(n, edge_ptr, edge_w, succ_ptr, succ, accepting, init):
    """Worst-case shortest path to the accepting set, one belief per round.

    Returns ``(value, finite, choice, order, deltas)``.  ``choice[b]`` is an
    edge index or -1.  ``order``/``deltas`` list the beliefs in the order they
    were added and the value they were added with.  Stops as soon as ``init``
    is added.
    """
    n_edges = len(edge_w)
    owner = [0] * n_edges
    for b in range(n):
        for e in range(edge_ptr[b], edge_ptr[b + 1]):
            owner[e] = b
    preds = [[] for _ in range(n)]
    missing = [0] * n_edges
    for e in range(n_edges):
        missing[e] = succ_ptr[e + 1] - succ_ptr[e]
        for t in succ[succ_ptr[e]:succ_ptr[e + 1]]:
            preds[t].append(e)

    value = [0] * n
    finite = [0] * n
    choice = [-1] * n
    order, deltas = [], []
    heap = []

    def settle(b):
        for e in preds[b]:
            missing[e] -= 1
            if missing[e] == 0 and not finite[owner[e]]:
                worst = max(value[t] for t in succ[succ_ptr[e]:succ_ptr[e + 1]])
                heapq.heappush(heap, (edge_w[e] + worst, owner[e], e))

    for b in range(n):
        if accepting[b]:
            finite[b] = 1
    if finite[init]:
        return value, finite, choice, order, deltas
    for b in range(n):
        if accepting[b]:
            settle(b)

    while heap:
        delta, b, e = heapq.heappop(heap)
        if finite[b]:
            continue
        finite[b] = 1
        value[b] = delta
        choice[b] = e
        order.append(b)
        deltas.append(delta)
        if b == init:
            break
        settle(b)
    return value, finite, choice, order, deltas


def bounded(n, edge_ptr, edge_w, succ_ptr, succ, accepting, k, cap):
    """Bounded-horizon sweep, all beliefs updated from the previous round.

    Runs ``min(k, cap)`` rounds, stopping early when a round changes nothing.
    Returns ``(values, finites, choices)`` with one list per computed round,
    round 0 included; ``choices[i][b]`` is the edge used at ``i`` remaining
    steps (inherited from round ``i-1`` when round ``i`` did not improve).
    """
    value = [0] * n
    finite = [1 if accepting[b] else 0 for b in range(n)]
    choice = [-1] * n
    values, finites, choices = [value], [finite], [choice]
    for _ in range(min(k, cap)):
        nv, nf, nc = value[:], finite[:], choice[:]
        changed = False
        for b in range(n):
            best_f = finite[b]
            best = value[b]
            pick = -1
            for e in range(edge_ptr[b], edge_ptr[b + 1]):
                worst = 0
                ok = True
                for t in succ[succ_ptr[e]:succ_ptr[e + 1]]:
                    if not finite[t]:
                        ok = False
                        break
                    if value[t] > worst:
                        worst = value[t]
                if not ok:
                    continue
                d = edge_w[e] + worst
                if not best_f or d < best:
                    best_f, best, pick = 1, d, e
            if pick >= 0:
                nv[b], nf[b], nc[b] = best, 1, pick
                changed = True
        if not changed:
            break
        value, finite, choice = nv, nf, nc
        values.append(value)
        finites.append(finite)
        choices.append(choice)
    return values, finites, choices
