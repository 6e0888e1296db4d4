# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``pure.simulate_chain``; same uniform-stream contract."""

from libc.math cimport log

import numpy as np

cimport numpy as cnp

cnp.import_array()


def simulate_chain(cnp.int64_t[::1] indptr,
                   cnp.int64_t[::1] targets,
                   double[::1] cumrate,
                   double[::1] exit_rate,
                   long start,
                   long n_steps,
                   double[::1] uniforms):
    cdef long n = exit_rate.shape[0]
    cdef cnp.ndarray[double, ndim=1] time_arr = np.zeros(n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] visit_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] time_in_state = time_arr
    cdef cnp.int64_t[::1] visits = visit_arr
    cdef long s = start
    cdef long step, lo, hi, mid
    cdef double pick

    for step in range(n_steps):
        time_in_state[s] += -log(1.0 - uniforms[2 * step]) / exit_rate[s]
        visits[s] += 1
        pick = uniforms[2 * step + 1] * cumrate[indptr[s + 1] - 1]
        lo = indptr[s]
        hi = indptr[s + 1] - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cumrate[mid] < pick:
                lo = mid + 1
            else:
                hi = mid
        s = targets[lo]
    return time_arr, visit_arr, int(s)
