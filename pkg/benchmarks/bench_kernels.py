"""Compare the compiled and pure-Python chain-sampling kernels.

Usage: python benchmarks/bench_kernels.py [n_events]

Builds the 12-state reference instance plus a larger chain from the bundled
reference configuration and times both kernels on identical random inputs.
"""

import sys
import time
from importlib.resources import files

import numpy as np

from hetnet import _kernels
from hetnet.analysis import Analysis
from hetnet.config import parse_config
from hetnet.markov import build_generator, enumerate_states
from hetnet.simulate.markov_events import _embedded_arrays


def reference_model():
    text = files("hetnet").joinpath("data/reference.toml").read_text()
    cfg = parse_config(text)
    analysis = Analysis(cfg)
    ctx = analysis.context()
    states = enumerate_states(cfg.lte_units, cfg.wifi_units, cfg.services)
    return build_generator(states, ctx)


def bench(kernel, arrays, n_events, seed=99):
    indptr, targets, cumrate, exit_rate = arrays
    uniforms = np.random.default_rng(seed).random(2 * n_events)
    t0 = time.perf_counter()
    times, visits, final = kernel(indptr, targets, cumrate, exit_rate, 0, n_events, uniforms)
    elapsed = time.perf_counter() - t0
    return elapsed, times, visits, final


def main():
    n_events = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    model = reference_model()
    arrays = _embedded_arrays(model)
    print(f"chain: {model.size} states, {n_events} events, "
          f"active backend: {_kernels.BACKEND}")

    results = {}
    for name, kernel in (
        ("pure", _kernels.simulate_chain_pure),
        ("compiled", _kernels.simulate_chain),
    ):
        if kernel is _kernels.simulate_chain_pure and name == "compiled":
            print("compiled kernel unavailable; skipping")
            continue
        elapsed, times, visits, final = bench(kernel, arrays, n_events)
        rate = n_events / elapsed
        results[name] = (elapsed, times, visits, final)
        print(f"  {name:>8}: {elapsed:8.3f} s  ({rate / 1e6:6.2f} M events/s)")

    if len(results) == 2:
        a, b = results["pure"], results["compiled"]
        identical = (
            np.array_equal(a[1], b[1])
            and np.array_equal(a[2], b[2])
            and a[3] == b[3]
        )
        print(f"  outputs bit-identical: {identical}")
        print(f"  speedup: {a[0] / b[0]:.1f}x")


if __name__ == "__main__":
    main()
