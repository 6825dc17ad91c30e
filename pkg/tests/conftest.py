"""Shared random generators for certificates, traces and Soules specs."""

from __future__ import annotations

import random
from fractions import Fraction

from sniep.hcalc import H1, H2, HCert, HNode, head
from sniep.soules import SoulesSequence, SoulesSpec, Split


def rnd_nonneg(rng: random.Random, max_num: int = 12, dens=(1, 2, 3, 4)) -> Fraction:
    return Fraction(rng.randint(0, max_num), rng.choice(dens))


def rnd_pos(rng: random.Random, max_num: int = 12, dens=(1, 2, 3, 4)) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.choice(dens))


def random_cert(rng: random.Random, n: int, forced=()) -> tuple[HCert, list[int]]:
    """Random valid certificate of order n whose diagonal list holds the
    `forced` values; returns (cert, slot index of each forced value)."""
    forced = tuple(forced)
    assert len(forced) <= n
    if n == 1:
        v = forced[0] if forced else rnd_nonneg(rng)
        return H1(v, v), [0]
    if n == 2:
        vals = list(forced) + [rnd_nonneg(rng) for _ in range(2 - len(forced))]
        a1, a2 = vals
        lam1 = max(a1, a2) + rnd_nonneg(rng)
        return H2(lam1, a1 + a2 - lam1, a1, a2), list(range(len(forced)))
    bs = rng.randint(2, n - 1)
    ts = n + 1 - bs
    top_take: list[int] = []
    bot_take: list[int] = []
    for i in range(len(forced)):
        if len(top_take) < ts - 1 and (len(bot_take) >= bs or rng.random() < 0.5):
            top_take.append(i)
        elif len(bot_take) < bs:
            bot_take.append(i)
        else:
            top_take.append(i)
    bottom, bslots = random_cert(rng, bs, tuple(forced[i] for i in bot_take))
    c = head(bottom)
    top, tslots = random_cert(rng, ts, tuple(forced[i] for i in top_take) + (c,))
    cslot = tslots[-1]
    node = HNode(top, bottom, c, cslot)
    slots: list[int] = [0] * len(forced)
    for j, i in enumerate(top_take):
        k = tslots[j]
        slots[i] = k if k < cslot else k - 1
    t_ext = ts - 1
    for j, i in enumerate(bot_take):
        slots[i] = t_ext + bslots[j]
    return node, slots


def random_soules_spec(rng: random.Random, n: int) -> SoulesSpec:
    blocks = [frozenset(range(1, n + 1))]
    splits: list[Split] = []
    while len(blocks) < n:
        candidates = [b for b in blocks if len(b) >= 2]
        parent = candidates[rng.randrange(len(candidates))]
        elems = sorted(parent)
        rng.shuffle(elems)
        k = rng.randint(1, len(elems) - 1)
        star, starstar = frozenset(elems[:k]), frozenset(elems[k:])
        splits.append(Split(parent, star, starstar))
        blocks.remove(parent)
        blocks.extend([star, starstar])
    weights = [Fraction(rng.randint(1, 8), rng.choice((1, 2, 3))) for _ in range(n)]
    total = sum(weights, Fraction(0))
    return SoulesSpec(SoulesSequence(n, tuple(splits)), tuple(w / total for w in weights))


def random_sorted_sigma(rng: random.Random, n: int, lo=-8, hi=8) -> tuple[Fraction, ...]:
    vals = sorted(
        (Fraction(rng.randint(lo * 2, hi * 2), rng.choice((1, 2))) for _ in range(n)),
        reverse=True,
    )
    return tuple(vals)
