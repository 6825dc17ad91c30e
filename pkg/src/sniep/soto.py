"""The recursive S_p realisability criteria with exact negativity/margin
bookkeeping, and the converter from realisability certificates.

Everything reduces to one quantity: the *head floor* of a tail multiset at
level p, the least Perron value h making (h, tail) satisfy S_p.  For p = 1
the floor is closed-form; for p >= 2 it is an exact minimum over a finite,
deterministically enumerated family of partitions into sublists.  The
feasible set of heads is upward closed (the floor is attained), which the
test-suite cross-validates against grid scans.

Negativity  N_p(sigma) = max(0, floor - lam1)
Margin      M_p(sigma) = lam1 - max(floor, lam2)   (members only)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import groupby, product
from typing import Iterator, Optional

from .errors import BudgetExceededError, NotRealizableError
from .hcalc import HCert, anti_guo_split, size, spectrum_list
from .numkit import Spectrum
from .rationals import rat, rat_str, rat_strs, rats

DEFAULT_PARTITION_BUDGET = 10**6
DEFAULT_MAX_SUBLISTS = 4


@dataclass(frozen=True)
class SotoCertificate:
    """Witness that `sigma` satisfies the level-`p` criterion.

    Level 1 stores the pairing terms and the head slack.  Level p >= 2
    stores the sublist partition, a child certificate for the anchored
    sublist, the exact level-(p-1) negativities of the remaining sublists,
    and the gamma / margin values entering the master inequality.
    """

    sigma: tuple[Fraction, ...]
    p: int
    t_values: Optional[tuple[Fraction, ...]] = None
    slack: Optional[Fraction] = None
    sublists: Optional[tuple[tuple[Fraction, ...], ...]] = None
    child1: Optional["SotoCertificate"] = None
    negativities: Optional[tuple[Fraction, ...]] = None
    gamma: Optional[Fraction] = None
    margin1: Optional[Fraction] = None

    def to_json(self) -> dict:
        doc: dict = {"p": self.p, "sigma": rat_strs(self.sigma)}
        if self.p == 1:
            doc["t_values"] = rat_strs(self.t_values or ())
            doc["slack"] = rat_str(self.slack)
        else:
            doc["sublists"] = [rat_strs(s) for s in self.sublists]
            doc["child1"] = self.child1.to_json()
            doc["negativities"] = rat_strs(self.negativities)
            doc["gamma"] = rat_str(self.gamma)
            doc["margin1"] = rat_str(self.margin1)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SotoCertificate":
        p = int(doc["p"])
        if p == 1:
            return cls(
                sigma=rats(doc["sigma"]),
                p=1,
                t_values=rats(doc["t_values"]),
                slack=rat(doc["slack"]),
            )
        return cls(
            sigma=rats(doc["sigma"]),
            p=p,
            sublists=tuple(rats(s) for s in doc["sublists"]),
            child1=cls.from_json(doc["child1"]),
            negativities=rats(doc["negativities"]),
            gamma=rat(doc["gamma"]),
            margin1=rat(doc["margin1"]),
        )


# ---------------------------------------------------------------- level 1


def _t_terms(tail: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Pairing terms of the list (head, *tail): tail[i-2] + tail[n-i-1] for
    i = 2..n//2, and min(middle, 0) for odd n >= 3."""
    n = len(tail) + 1
    terms = [tail[i - 2] + tail[n - i - 1] for i in range(2, n // 2 + 1)]
    if n >= 3 and n % 2 == 1:
        terms.append(min(tail[(n - 3) // 2], Fraction(0)))
    return tuple(terms)


def _s1_floor(tail: tuple[Fraction, ...]) -> Fraction:
    if not tail:
        return Fraction(0)
    return -tail[-1] - sum((t for t in _t_terms(tail) if t < 0), Fraction(0))


def s1_check(sigma: Spectrum) -> tuple[bool, Fraction]:
    """Closed-form base criterion; returns (member, head slack).

    The slack is lam1 minus the least admissible head, so membership is
    slack >= 0 and the level-1 negativity is max(0, -slack).
    """
    tail = sigma.values[1:]
    slack = sigma.perron - _s1_floor(tail)
    return slack >= 0, slack


def s1_negativity(sigma: Spectrum) -> Fraction:
    _, slack = s1_check(sigma)
    return max(Fraction(0), -slack)


def s1_margin(sigma: Spectrum) -> Fraction:
    ok, _ = s1_check(sigma)
    if not ok:
        raise NotRealizableError("margin is only defined for members")
    tail = sigma.values[1:]
    floor = _s1_floor(tail)
    bound = max(floor, tail[0]) if tail else floor
    return sigma.perron - bound


# ------------------------------------------------- partition enumeration


class _Ctx:
    def __init__(self, budget: int, max_r: int):
        self.left = budget
        self.max_r = max_r
        self.floor_memo: dict = {}

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError(
                "partition-space budget exhausted (inconclusive)"
            )


def _counts(values: tuple[Fraction, ...]) -> list[tuple[Fraction, int]]:
    return [(v, len(list(g))) for v, g in groupby(values)]


def _from_counts(counts: list[tuple[Fraction, int]], vec: tuple[int, ...]) -> tuple[Fraction, ...]:
    out: list[Fraction] = []
    for (v, _), k in zip(counts, vec):
        out.extend([v] * k)
    return tuple(out)


def _submultisets(values: tuple[Fraction, ...]) -> Iterator[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
    """(subset, complement) pairs, deduplicated; ordered by subset size then
    by preferring larger values first."""
    counts = _counts(values)
    vecs = list(product(*[range(m + 1) for _, m in counts]))
    vecs.sort(key=lambda vec: (sum(vec), tuple(-k for k in vec)))
    for vec in vecs:
        sub = _from_counts(counts, vec)
        comp = _from_counts(counts, tuple(m - k for (_, m), k in zip(counts, vec)))
        yield sub, comp


def _block_partitions(
    values: tuple[Fraction, ...], b: int, limit: Optional[tuple[Fraction, ...]]
) -> Iterator[tuple[tuple[Fraction, ...], ...]]:
    """Partitions of a (desc-sorted) multiset into exactly b nonempty
    unlabeled blocks, emitted canonically with lex-nonincreasing blocks."""
    if len(values) < b or b < 1:
        return
    if b == 1:
        if limit is None or values <= limit:
            yield (values,)
        return
    first = values[0]
    rest = values[1:]
    for sub, comp in _submultisets(rest):
        block = tuple(sorted((first,) + sub, reverse=True))
        if limit is not None and block > limit:
            continue
        if len(comp) < b - 1:
            continue
        for tail_blocks in _block_partitions(comp, b - 1, block):
            yield (block,) + tail_blocks


def _sigma_partitions(
    tail: tuple[Fraction, ...], ctx: _Ctx
) -> Iterator[tuple[tuple[Fraction, ...], tuple[tuple[Fraction, ...], ...]]]:
    """Candidate partitions: the sub-multiset joining the anchor, plus up to
    max_r - 1 further sublists, each with a nonnegative head."""
    ctx.tick()
    yield tail, ()
    for sub, comp in _submultisets(tail):
        if not comp:
            continue
        for b in range(1, ctx.max_r):
            if len(comp) < b:
                break
            for blocks in _block_partitions(comp, b, None):
                if any(blk[0] < 0 for blk in blocks):
                    continue
                ctx.tick()
                yield sub, blocks


# ---------------------------------------------------------------- floors


def _head_floor(tail: tuple[Fraction, ...], p: int, ctx: _Ctx) -> Fraction:
    """Least head h with (h, *tail) in the level-p class (tail desc-sorted)."""
    if p <= 1 or not tail:
        return _s1_floor(tail)
    key = (tail, p)
    if key in ctx.floor_memo:
        return ctx.floor_memo[key]
    best: Optional[Fraction] = None
    for sub, blocks in _sigma_partitions(tail, ctx):
        f1 = _floor_capped(sub, p - 1, ctx)
        gamma = f1
        total = Fraction(0)
        for blk in blocks:
            gamma = max(gamma, blk[0])
            total += _negativity(blk, p - 1, ctx)
        cand = gamma + total
        if best is None or cand < best:
            best = cand
    assert best is not None  # the r = 1 partition is always produced
    ctx.floor_memo[key] = best
    return best


def _floor_capped(tail: tuple[Fraction, ...], p: int, ctx: _Ctx) -> Fraction:
    """Least valid head for the anchored sublist: the floor, but no lower
    than the largest tail entry (sublists must stay sorted)."""
    f = _head_floor(tail, p, ctx)
    return max(f, tail[0]) if tail else f


def _negativity(values: tuple[Fraction, ...], p: int, ctx: _Ctx) -> Fraction:
    return max(Fraction(0), _head_floor(values[1:], p, ctx) - values[0])


# ---------------------------------------------------------------- checks


def _sp_cert(values: tuple[Fraction, ...], p: int, ctx: _Ctx) -> Optional[SotoCertificate]:
    lam1 = values[0]
    tail = values[1:]
    if p == 1:
        slack = lam1 - _s1_floor(tail)
        if slack < 0:
            return None
        return SotoCertificate(values, 1, t_values=_t_terms(tail), slack=slack)
    for sub, blocks in _sigma_partitions(tail, ctx):
        f1 = _floor_capped(sub, p - 1, ctx)
        if lam1 < f1:
            continue
        gamma = f1
        negs = []
        for blk in blocks:
            gamma = max(gamma, blk[0])
            negs.append(_negativity(blk, p - 1, ctx))
        if lam1 < gamma + sum(negs, Fraction(0)):
            continue
        child1 = _sp_cert((lam1,) + sub, p - 1, ctx)
        assert child1 is not None  # lam1 >= f1 guarantees membership
        return SotoCertificate(
            sigma=values,
            p=p,
            sublists=((lam1,) + sub,) + blocks,
            child1=child1,
            negativities=tuple(negs),
            gamma=gamma,
            margin1=lam1 - f1,
        )
    return None


def sp_check(
    sigma: Spectrum,
    p: int,
    budget: int = DEFAULT_PARTITION_BUDGET,
    max_r: int = DEFAULT_MAX_SUBLISTS,
) -> Optional[SotoCertificate]:
    """Exhaustive, deterministic level-p test; returns the first certifying
    partition (r = 1 tried first, then smaller anchored sublists)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return _sp_cert(sigma.values, p, _Ctx(budget, max_r))


def sp_negativity(
    sigma: Spectrum,
    p: int,
    budget: int = DEFAULT_PARTITION_BUDGET,
    max_r: int = DEFAULT_MAX_SUBLISTS,
) -> Fraction:
    """Least Perron increase making sigma satisfy the level-p criterion."""
    ctx = _Ctx(budget, max_r)
    return max(Fraction(0), _head_floor(sigma.values[1:], p, ctx) - sigma.perron)


def sp_margin(
    sigma: Spectrum,
    p: int,
    budget: int = DEFAULT_PARTITION_BUDGET,
    max_r: int = DEFAULT_MAX_SUBLISTS,
) -> Fraction:
    """Largest Perron decrease (within the spectral gap) preserving the
    level-p criterion; requires membership."""
    ctx = _Ctx(budget, max_r)
    tail = sigma.values[1:]
    floor = _head_floor(tail, p, ctx)
    if sigma.perron < floor:
        raise NotRealizableError("margin is only defined for members")
    bound = max(floor, tail[0]) if tail else floor
    return sigma.perron - bound


def sp_validate(
    cert: SotoCertificate,
    budget: int = DEFAULT_PARTITION_BUDGET,
    max_r: int = DEFAULT_MAX_SUBLISTS,
) -> bool:
    """Exact re-derivation of every quantity stored in the certificate."""
    ctx = _Ctx(budget, max_r)
    return _validate(cert, ctx)


def _validate(cert: SotoCertificate, ctx: _Ctx) -> bool:
    vals = cert.sigma
    if any(a < b for a, b in zip(vals, vals[1:])):
        return False
    lam1 = vals[0]
    tail = vals[1:]
    if cert.p == 1:
        if cert.slack is None or cert.t_values is None:
            return False
        return (
            cert.t_values == _t_terms(tail)
            and cert.slack == lam1 - _s1_floor(tail)
            and cert.slack >= 0
        )
    if cert.sublists is None or cert.child1 is None or cert.negativities is None:
        return False
    if len(cert.negativities) != len(cert.sublists) - 1:
        return False
    merged = sorted([v for s in cert.sublists for v in s], reverse=True)
    if tuple(merged) != vals:
        return False
    sub1 = cert.sublists[0]
    if sub1[0] != lam1:
        return False
    for s in cert.sublists:
        if not s or s[0] < 0 or any(a < b for a, b in zip(s, s[1:])):
            return False
    if cert.child1.sigma != sub1 or not (1 <= cert.child1.p <= cert.p - 1):
        return False
    if not _validate(cert.child1, ctx):
        return False
    f1 = _floor_capped(sub1[1:], cert.p - 1, ctx)
    if lam1 < f1 or cert.margin1 != lam1 - f1:
        return False
    gamma = f1
    for blk, neg in zip(cert.sublists[1:], cert.negativities):
        gamma = max(gamma, blk[0])
        if neg != _negativity(blk, cert.p - 1, ctx):
            return False
    if cert.gamma != gamma:
        return False
    return lam1 >= gamma + sum(cert.negativities, Fraction(0))


# ------------------------------------------------------------- converters


def raise_head(cert: SotoCertificate, delta: Fraction) -> SotoCertificate:
    """Certificate for the same tail with the Perron value raised by delta
    (membership is upward closed in the head)."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return cert
    sigma = (cert.sigma[0] + delta,) + cert.sigma[1:]
    if cert.p == 1:
        return replace(cert, sigma=sigma, slack=cert.slack + delta)
    sub1 = (cert.sublists[0][0] + delta,) + cert.sublists[0][1:]
    return replace(
        cert,
        sigma=sigma,
        sublists=(sub1,) + cert.sublists[1:],
        child1=raise_head(cert.child1, delta),
        margin1=cert.margin1 + delta,
    )


def h_to_sp(
    cert: HCert,
    budget: int = DEFAULT_PARTITION_BUDGET,
    max_r: int = DEFAULT_MAX_SUBLISTS,
) -> SotoCertificate:
    """Convert a realisability certificate into a Soto certificate by
    recursively shrinking the spectral gap and pairing the two halves."""
    values = tuple(sorted(spectrum_list(cert), reverse=True))
    n = size(cert)
    if n == 1 or values[1] < 0:
        # With every non-Perron value negative, the level-1 inequality is
        # exactly the trace condition, so membership is automatic.
        slack = values[0] - _s1_floor(values[1:])
        assert slack >= 0
        return SotoCertificate(values, 1, t_values=_t_terms(values[1:]), slack=slack)
    eps, left, right = anti_guo_split(cert)
    sc_left = h_to_sp(left, budget, max_r)
    sc_right = h_to_sp(right, budget, max_r)
    k = max(sc_left.p, sc_right.p)
    sub1 = (values[0],) + tuple(sorted(spectrum_list(left), reverse=True))[1:]
    sub2 = (values[1],) + tuple(sorted(spectrum_list(right), reverse=True))[1:]
    ctx = _Ctx(budget, max_r)
    f1 = _floor_capped(sub1[1:], k, ctx)
    margin1 = sub1[0] - f1
    neg2 = _negativity(sub2, k, ctx)
    gamma = max(f1, sub2[0])
    assert values[0] >= gamma + neg2
    return SotoCertificate(
        sigma=values,
        p=k + 1,
        sublists=(sub1, sub2),
        child1=raise_head(sc_left, eps),
        negativities=(neg2,),
        gamma=gamma,
        margin1=margin1,
    )
