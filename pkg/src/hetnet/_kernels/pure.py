"""Pure-Python fallback for the hot simulation kernel.

Must stay operation-for-operation identical to the Cython version in
``_speedups.pyx`` so both backends produce bit-identical trajectories from
the same uniform stream.
"""

import math

import numpy as np


def simulate_chain(indptr, targets, cumrate, exit_rate, start, n_steps, uniforms):
    """Advance the embedded jump chain ``n_steps`` times.

    Per step two uniforms are consumed: one for the exponential dwell time in
    the current state, one to pick the outgoing transition by its cumulative
    rate.  Returns (time_in_state, visits, final_state).
    """
    n = len(exit_rate)
    time_in_state = np.zeros(n)
    visits = np.zeros(n, dtype=np.int64)
    s = int(start)
    for step in range(n_steps):
        rate = exit_rate[s]
        time_in_state[s] += -math.log(1.0 - uniforms[2 * step]) / rate
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
        s = int(targets[lo])
    return time_in_state, visits, s
