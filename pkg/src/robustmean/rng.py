"""Counter-based random streams.

Every random quantity in the package is derived from an explicit
``(seed, key...)`` tuple fed to a Philox generator, so results never depend
on call order, thread scheduling or hidden global state.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "STREAM_DRAW",
    "STREAM_DRAW_AUX",
    "STREAM_CONTAMINATE",
    "STREAM_PARTITION",
    "generator",
    "uniforms",
    "trial_seed",
]

# stream identifiers; never renumber, saved reports depend on them
STREAM_DRAW = 0
STREAM_DRAW_AUX = 1
STREAM_CONTAMINATE = 2
STREAM_PARTITION = 3

_U53 = float(2**53)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    return seed


def generator(seed: int, *keys: int) -> np.random.Generator:
    """Return an independent Philox generator for ``(seed, *keys)``."""
    seq = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def uniforms(seed: int, n: int, *keys: int) -> np.ndarray:
    """``n`` uniforms on the open interval (0, 1).

    Values are ``(j + 1/2) / 2**53`` for 53-bit integers ``j``, so neither
    endpoint can occur and inverse-CDF transforms stay finite.
    """
    j = generator(seed, *keys).integers(0, 2**53, size=n, dtype=np.int64)
    return (j.astype(np.float64) + 0.5) / _U53


def trial_seed(seed: int, trial: int) -> int:
    """Split ``seed`` into an independent per-trial seed."""
    seq = np.random.SeedSequence(_check_seed(seed), spawn_key=(0x7121A1, int(trial)))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
