import numpy as np

VELOCITY = 0
ACCEPT = 1


def chain_rng(seed: int, chain_id: int = 0, stream: int = VELOCITY) -> np.random.Generator:
    """Generator for one chain, keyed by ``(seed, chain_id, stream)``.

    Chain ``i`` gets the same stream however many chains run beside it.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(chain_id), int(stream)))
    return np.random.Generator(np.random.PCG64(ss))


def block_size(n_chains: int, dim: int, budget: int = 1 << 22) -> int:
    return max(1, budget // max(1, n_chains * dim))
