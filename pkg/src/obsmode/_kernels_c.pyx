# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled synthesis kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, uint8_t

cnp.import_array()


def _arr64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def unbounded(Py_ssize_t n, edge_ptr, edge_w, succ_ptr, succ, accepting, Py_ssize_t init):
    cdef int64_t[::1] eptr = _arr64(edge_ptr)
    cdef int64_t[::1] ew = _arr64(edge_w)
    cdef int64_t[::1] sptr = _arr64(succ_ptr)
    cdef int64_t[::1] sc = _arr64(succ)
    cdef Py_ssize_t n_edges = ew.shape[0]
    cdef Py_ssize_t b, e, j, t, best_e, step
    cdef int64_t best, d, worst
    cdef bint have

    cdef int64_t[::1] value = np.zeros(n, dtype=np.int64)
    cdef uint8_t[::1] finite = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] choice = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] owner = np.zeros(n_edges, dtype=np.int64)
    cdef int64_t[::1] missing = np.zeros(n_edges, dtype=np.int64)
    cdef int64_t[::1] delta = np.zeros(n_edges, dtype=np.int64)
    cdef int64_t[::1] pred_ptr = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] pred
    cdef int64_t[::1] fill

    for b in range(n):
        for e in range(eptr[b], eptr[b + 1]):
            owner[e] = b
    for e in range(n_edges):
        missing[e] = sptr[e + 1] - sptr[e]
        for j in range(sptr[e], sptr[e + 1]):
            pred_ptr[sc[j] + 1] += 1
    for b in range(n):
        pred_ptr[b + 1] += pred_ptr[b]
    pred = np.zeros(pred_ptr[n], dtype=np.int64)
    fill = np.array(pred_ptr[:n], dtype=np.int64)
    for e in range(n_edges):
        for j in range(sptr[e], sptr[e + 1]):
            t = sc[j]
            pred[fill[t]] = e
            fill[t] += 1

    order = []
    deltas = []
    for b in range(n):
        if accepting[b]:
            finite[b] = 1
    if finite[init]:
        return list(value), list(finite), list(choice), order, deltas

    # settle accepting beliefs
    for b in range(n):
        if finite[b]:
            for j in range(pred_ptr[b], pred_ptr[b + 1]):
                e = pred[j]
                missing[e] -= 1
                if missing[e] == 0:
                    worst = 0
                    for t in range(sptr[e], sptr[e + 1]):
                        if value[sc[t]] > worst:
                            worst = value[sc[t]]
                    delta[e] = ew[e] + worst

    while True:
        # literal scan: least delta, ties to the lowest belief then edge
        have = False
        best = 0
        best_e = -1
        for e in range(n_edges):
            if missing[e] != 0 or finite[owner[e]]:
                continue
            if not have or delta[e] < best:
                have = True
                best = delta[e]
                best_e = e
        if not have:
            break
        b = owner[best_e]
        finite[b] = 1
        value[b] = best
        choice[b] = best_e
        order.append(b)
        deltas.append(best)
        if b == init:
            break
        for j in range(pred_ptr[b], pred_ptr[b + 1]):
            e = pred[j]
            missing[e] -= 1
            if missing[e] == 0:
                worst = 0
                for t in range(sptr[e], sptr[e + 1]):
                    if value[sc[t]] > worst:
                        worst = value[sc[t]]
                delta[e] = ew[e] + worst
    return list(value), list(finite), list(choice), order, deltas


def bounded(Py_ssize_t n, edge_ptr, edge_w, succ_ptr, succ, accepting, Py_ssize_t k, Py_ssize_t cap):
    cdef int64_t[::1] eptr = _arr64(edge_ptr)
    cdef int64_t[::1] ew = _arr64(edge_w)
    cdef int64_t[::1] sptr = _arr64(succ_ptr)
    cdef int64_t[::1] sc = _arr64(succ)
    cdef Py_ssize_t b, e, j, t, pick, rounds, i
    cdef int64_t best, d, worst
    cdef bint best_f, ok, changed

    value_a = np.zeros(n, dtype=np.int64)
    finite_a = np.array([1 if accepting[b] else 0 for b in range(n)], dtype=np.uint8)
    choice_a = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] value = value_a
    cdef uint8_t[::1] finite = finite_a
    cdef int64_t[::1] choice = choice_a
    cdef int64_t[::1] nv
    cdef uint8_t[::1] nf
    cdef int64_t[::1] nc

    values = [value_a.tolist()]
    finites = [finite_a.tolist()]
    choices = [choice_a.tolist()]
    rounds = k if k < cap else cap
    for i in range(rounds):
        nv_a = value_a.copy()
        nf_a = finite_a.copy()
        nc_a = choice_a.copy()
        nv = nv_a
        nf = nf_a
        nc = nc_a
        changed = False
        for b in range(n):
            best_f = finite[b]
            best = value[b]
            pick = -1
            for e in range(eptr[b], eptr[b + 1]):
                worst = 0
                ok = True
                for j in range(sptr[e], sptr[e + 1]):
                    t = sc[j]
                    if not finite[t]:
                        ok = False
                        break
                    if value[t] > worst:
                        worst = value[t]
                if not ok:
                    continue
                d = ew[e] + worst
                if not best_f or d < best:
                    best_f = True
                    best = d
                    pick = e
            if pick >= 0:
                nv[b] = best
                nf[b] = 1
                nc[b] = pick
                changed = True
        if not changed:
            break
        value_a, finite_a, choice_a = nv_a, nf_a, nc_a
        value = value_a
        finite = finite_a
        choice = choice_a
        values.append(value_a.tolist())
        finites.append(finite_a.tolist())
        choices.append(choice_a.tolist())
    return values, finites, choices
