#!/usr/bin/env python3
"""Independent re-implementation of the bag-of-tokens mock embedding.

Prints cosines for pairs of strings so test constants can be pinned:
    mock_embed_ref.py "lead-acid batteries" "flooded lead-acid battery"
Synonyms are passed as --syn from=to (repeatable).
"""
import argparse
import math

MASK = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def splitmix64(state: int):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def fold_plural(w: str) -> str:
    if len(w) <= 3:
        return w
    if w.endswith("ies"):
        return w[:-3] + "y"
    if w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


def content_tokens(text: str):
    out, cur = [], ""
    for c in text.lower():
        if ord(c) >= 0x80 or c.isascii() and (c.isalpha() or c.isdigit()):
            cur += c
        else:
            if cur:
                out.append(fold_plural(cur))
            cur = ""
    if cur:
        out.append(fold_plural(cur))
    return out


def direction(token: str, dim: int):
    state = fnv1a64(token.encode("utf-8"))
    v = []
    for _ in range(dim):
        state, bits = splitmix64(state)
        v.append((bits >> 11) * 2.0**-53 * 2.0 - 1.0)
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


class MockEmbedding:
    def __init__(self, dim=64, synonyms=None):
        self.dim = dim
        self.syn = {}
        for frm, to in (synonyms or {}).items():
            for t in content_tokens(frm):
                self.syn[t] = to

    def tokens(self, text):
        out = []
        for t in content_tokens(text):
            out.extend(content_tokens(self.syn[t]) if t in self.syn else [t])
        return out

    def embed(self, text):
        toks = self.tokens(text)
        if not toks:
            raise ValueError("no tokens")
        s = [0.0] * self.dim
        for t in toks:
            for i, x in enumerate(direction(t, self.dim)):
                s[i] += x
        n = math.sqrt(sum(x * x for x in s))
        return [x / n for x in s]


def cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    return max(-1.0, min(1.0, dot / (na * nb)))


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("pairs", nargs="*")
    ap.add_argument("--syn", action="append", default=[])
    ap.add_argument("--dim", type=int, default=64)
    args = ap.parse_args()
    emb = MockEmbedding(args.dim, dict(s.split("=", 1) for s in args.syn))
    for a, b in zip(args.pairs[::2], args.pairs[1::2]):
        print(f"{cosine(emb.embed(a), emb.embed(b)):.17g}\t{a}\t{b}")
