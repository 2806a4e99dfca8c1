"""Water-filling on a handful of parallel channels.

Walks from the textbook closed form (pour power onto the cleanest
channels until the level meets the budget) to the two ways the solution
changes shape: per-channel masks soaking up the budget before it is
spent, and interference hedging flattening the allocation.

Run:  python3 demos/waterfill_basics.py
"""
import argparse

import numpy as np

from riwfa import waterfill


def show(title: str, s, p_max, mask) -> None:
    sol = waterfill(np.asarray(s, float), p_max, np.asarray(mask, float))
    print(f"{title}")
    print(f"  s = {np.round(s, 3).tolist()}, budget = {p_max}, "
          f"mask = {np.round(mask, 2).tolist()}")
    print(f"  p = {np.round(sol.p, 6).tolist()}")
    print(f"  water level = {sol.water_level:.6f}, "
          f"budget active = {sol.budget_active}")
    print()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--budget", type=float, default=1.0)
    args = parser.parse_args()

    print("two channels, no binding mask: level - s on each used channel")
    show("closed form", [0.1, 0.3], args.budget, [10.0, 10.0])

    print("same channels, masks at 0.4: both caps bind and 0.2 of the")
    print("budget is simply unusable (lambda = 0, level formally infinite)")
    show("mask bound", [0.1, 0.3], args.budget, [0.4, 0.4])

    print("a dirty channel never gets power until the level reaches it")
    show("sparse support", [0.05, 0.9, 0.12, 0.4], args.budget,
         [10.0, 10.0, 10.0, 10.0])

    print("hedging: scale the interference by (1 + eps) before filling.")
    print("larger eps evens out the differences between channels, so the")
    print("allocation flattens toward budget / K:")
    s = np.array([0.05, 0.9, 0.12, 0.4])
    for eps in (0.0, 0.5, 1.0, 3.0, 10.0):
        sol = waterfill(s * (1.0 + eps), args.budget, np.full(4, 10.0))
        print(f"  eps = {eps:>4}: p = {np.round(sol.p, 4).tolist()}")


if __name__ == "__main__":
    main()
