"""Regenerate the example strategy files shipped in src/strategem/data."""

import os

import numpy as np

from strategem.cli import save_strategy_file, strategy_to_file
from strategem.registers import RoundShape
from strategem.strategies import random_pure_costrategy, random_pure_strategy, state_strategy, unitary_channel_strategy

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "strategem", "data")


def main():
    files = {
        "identity.json": (unitary_channel_strategy(np.eye(2)), "qubit identity channel"),
        "bitflip.json": (unitary_channel_strategy(np.array([[0, 1], [1, 0]])), "qubit bit-flip channel"),
        "commit_zero.json": (state_strategy(np.array([1, 0])), "one-round commitment to |0>"),
        "commit_plus.json": (state_strategy(np.array([1, 1]) / np.sqrt(2)), "one-round commitment to |+>"),
    }
    shape = RoundShape((2, 2), (2, 2))
    files["random_r2_a.json"] = (random_pure_strategy(shape, seed=2024), "random two-round strategy, seed 2024")
    files["random_r2_b.json"] = (random_pure_strategy(shape, seed=2025), "random two-round strategy, seed 2025")
    files["random_r2_costrategy.json"] = (random_pure_costrategy(shape, seed=2026),
                                          "random two-round co-strategy, seed 2026")
    files["commit_costrategy.json"] = (random_pure_costrategy(RoundShape((1,), (2,)), seed=7),
                                       "co-strategy for the one-round commitments, seed 7")
    for name, (obj, note) in files.items():
        save_strategy_file(strategy_to_file(obj, {"name": name[:-5], "notes": note}), os.path.join(OUT, name))
        print("wrote", name)


if __name__ == "__main__":
    main()
