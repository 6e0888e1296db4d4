"""Event-driven sampling of the occupancy chain.

Independent of the linear-algebra stationary solve: every enabled transition
races an exponential clock and the winner fires, so long-run state
frequencies estimate the stationary distribution by simulation alone.
The inner loop runs on the compiled kernel when available.
"""

import numpy as np

from .. import _kernels

DEFAULT_CHUNK = 1 << 18


def _embedded_arrays(model):
    """CSR off-diagonal view of the generator for the jump-chain kernel."""
    coo = model.generator.tocoo()
    mask = coo.row != coo.col
    order = np.lexsort((coo.col[mask], coo.row[mask]))
    rows = coo.row[mask][order].astype(np.int64)
    cols = coo.col[mask][order].astype(np.int64)
    vals = coo.data[mask][order]
    n = model.size
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr[1:], rows, 1)
    indptr = np.cumsum(indptr).astype(np.int64)
    cumrate = vals.copy()
    exit_rate = np.zeros(n)
    for s in range(n):
        lo, hi = indptr[s], indptr[s + 1]
        if lo == hi:
            raise ValueError(f"state {s} has no outgoing transition")
        cumrate[lo:hi] = np.cumsum(vals[lo:hi])
        exit_rate[s] = cumrate[hi - 1]
    return indptr, cols, cumrate, exit_rate


def sample_occupancy(model, n_events, seed, start=0, chunk=DEFAULT_CHUNK, backend=None):
    """Simulate ``n_events`` jumps; return (empirical distribution, visits).

    The empirical distribution is time-weighted (fraction of simulated time
    per state).  Deterministic for a given seed, identical across kernel
    backends.
    """
    if model.size == 1:
        return np.array([1.0]), np.array([n_events], dtype=np.int64)
    kernel = backend or _kernels.simulate_chain
    indptr, targets, cumrate, exit_rate = _embedded_arrays(model)
    rng = np.random.default_rng(seed)
    time_in_state = np.zeros(model.size)
    visits = np.zeros(model.size, dtype=np.int64)
    state = start
    remaining = int(n_events)
    while remaining > 0:
        n = min(chunk, remaining)
        uniforms = rng.random(2 * n)
        t, v, state = kernel(indptr, targets, cumrate, exit_rate, state, n, uniforms)
        time_in_state += t
        visits += v
        remaining -= n
    return time_in_state / time_in_state.sum(), visits


def total_variation(p, q):
    """TV distance between two distributions on the same state list."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return 0.5 * np.abs(p - q).sum()
