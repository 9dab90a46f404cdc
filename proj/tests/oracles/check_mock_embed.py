#!/usr/bin/env python3
"""Compares the C++ mock embedding against mock_embed_ref.py."""
import os
import random
import subprocess
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from mock_embed_ref import MockEmbedding, cosine  # noqa: E402

WORDS = ["battery", "batteries", "lead-acid", "deep", "cycle", "electric",
         "vehicles", "forklift", "charger", "lithium", "ion", "golf", "carts",
         "recreational", "power", "grid", "music", "festival", "nova",
         "x", "Über", "2024", "cells", "category"]


def main():
    rng = random.Random(7)
    pairs = [("lead-acid batteries", "flooded lead-acid battery"),
             ("battery chargers", "flooded lead-acid battery")]
    for _ in range(200):
        a = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 4)))
        b = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 4)))
        pairs.append((a, b))
    args = [s for p in pairs for s in p]
    out = subprocess.run([sys.argv[1], *args], check=True, capture_output=True,
                         text=True).stdout.split()
    emb = MockEmbedding()
    worst = 0.0
    for (a, b), got in zip(pairs, out):
        want = cosine(emb.embed(a), emb.embed(b))
        worst = max(worst, abs(want - float(got)))
    print(f"{len(pairs)} pairs, max abs difference {worst:.3g}")
    if len(out) != len(pairs) or worst > 1e-12:
        sys.exit(1)


if __name__ == "__main__":
    main()
