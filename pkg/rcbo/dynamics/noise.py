"""Counter-based random streams keyed by (seed, replicate, step).

Each step draws a fresh (N, d) block from its own Philox generator, and
particle i always reads row i. The numbers a replicate sees therefore depend
only on its key, never on how replicas are spread over workers.
"""

import numpy as np

_INIT_STREAM = 0
_STEP_STREAM = 1
_AUX_STREAM = 2


class NoiseStream:
    def __init__(self, seed: int, replicate: int = 0):
        if seed < 0 or replicate < 0:
            raise ValueError("seed and replicate must be nonnegative")
        self.seed = seed
        self.replicate = replicate

    def __repr__(self) -> str:
        return f"NoiseStream(seed={self.seed}, replicate={self.replicate})"

    def _generator(self, stream: int, counter: int) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.replicate, stream, counter)
        )
        return np.random.Generator(np.random.Philox(sequence))

    def init_generator(self) -> np.random.Generator:
        """Generator for the initial particle sample."""
        return self._generator(_INIT_STREAM, 0)

    def step_generator(self, step: int) -> np.random.Generator:
        return self._generator(_STEP_STREAM, step)

    def normals(self, step: int, shape: tuple[int, ...]) -> np.ndarray:
        """Standard normal block for one step."""
        return self.step_generator(step).standard_normal(shape)

    def child_seed(self, label: int = 0) -> int:
        """64-bit integer seed for auxiliary randomness tied to this replicate."""
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.replicate, _AUX_STREAM, label)
        )
        return int(sequence.generate_state(1, dtype=np.uint64)[0])
