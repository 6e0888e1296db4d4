"""Hot-loop kernels: compiled extension when available, pure Python otherwise.

Both backends consume the same uniform stream and produce bit-identical
results; the extension is purely a speed upgrade.
"""

try:
    from ._speedups import simulate_chain

    BACKEND = "compiled"
except ImportError:  # extension not built
    from .pure import simulate_chain

    BACKEND = "pure"

from .pure import simulate_chain as simulate_chain_pure

__all__ = ["simulate_chain", "simulate_chain_pure", "BACKEND"]
