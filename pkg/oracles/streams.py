from typing import Tuple

import numpy as np


class RandomStreams:
    """One independent generator per player plus an auxiliary one, all derived from a single seed."""

    def __init__(self, seed: int, players: int):
        self.seed = int(seed)
        children = np.random.SeedSequence(self.seed).spawn(players + 1)
        self.players: Tuple[np.random.Generator, ...] = tuple(np.random.default_rng(c) for c in children[:players])
        self.auxiliary = np.random.default_rng(children[players])

    def __getitem__(self, i: int) -> np.random.Generator:
        return self.players[i]

    def __len__(self):
        return len(self.players)
