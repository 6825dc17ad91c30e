"""Recursive realisability certificates built from order-2 blocks.

A certificate is a binary tree: leaves witness the order-1 and order-2
memberships, and an internal node glues a "bottom" certificate (whose
Perron root is c) into one diagonal slot (holding c) of a "top"
certificate.  Everything here is exact rational arithmetic; matrices are
produced only by `materialize`.

Canonical orders used for indexing:
  spectrum_list(node) = spectrum_list(top) + spectrum_list(bottom)[1:]
  diag_list(node)     = diag_list(top) minus the glue slot + diag_list(bottom)
Eigenvalue index 0 is always the Perron root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from typing import Optional, Union

from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    NotRealizableError,
)
from .fiedler import realize_2x2
from .glue import GlueInput, smigoc_glue
from .numkit import DiagonalList, Spectrum, SymMatrix
from .rationals import rat, rat_str

DEFAULT_SEARCH_BUDGET = 10**6


@dataclass(frozen=True)
class H1:
    lam: Fraction
    a: Fraction


@dataclass(frozen=True)
class H2:
    lam1: Fraction
    lam2: Fraction
    a1: Fraction
    a2: Fraction


@dataclass(frozen=True)
class HNode:
    top: "HCert"
    bottom: "HCert"
    c: Fraction
    slot: int  # index into diag_list(top) holding c


HCert = Union[H1, H2, HNode]


# ---------------------------------------------------------------- basics


def size(cert: HCert) -> int:
    if isinstance(cert, H1):
        return 1
    if isinstance(cert, H2):
        return 2
    return size(cert.top) + size(cert.bottom) - 1


def head(cert: HCert) -> Fraction:
    if isinstance(cert, H1):
        return cert.lam
    if isinstance(cert, H2):
        return cert.lam1
    return head(cert.top)


def spectrum_list(cert: HCert) -> list[Fraction]:
    if isinstance(cert, H1):
        return [cert.lam]
    if isinstance(cert, H2):
        return [cert.lam1, cert.lam2]
    return spectrum_list(cert.top) + spectrum_list(cert.bottom)[1:]


def diag_list(cert: HCert) -> list[Fraction]:
    if isinstance(cert, H1):
        return [cert.a]
    if isinstance(cert, H2):
        return [cert.a1, cert.a2]
    top = diag_list(cert.top)
    return top[: cert.slot] + top[cert.slot + 1 :] + diag_list(cert.bottom)


def spectrum_of(cert: HCert) -> Spectrum:
    return Spectrum(tuple(sorted(spectrum_list(cert), reverse=True)))


def diag_of(cert: HCert) -> DiagonalList:
    return DiagonalList(tuple(diag_list(cert)))


def make_node(top: HCert, bottom: HCert, c: Fraction, slot: int) -> HCert:
    """Glue constructor; degenerate order-1 parts collapse away."""
    if isinstance(bottom, H1) and bottom.lam == c and diag_list(top)[slot] == c:
        return top
    if isinstance(top, H1) and top.lam == c and head(bottom) == c:
        return bottom
    return HNode(top, bottom, c, slot)


def validate_certificate(cert: HCert) -> bool:
    """Exact structural check of every invariant in the tree."""
    if isinstance(cert, H1):
        return cert.lam == cert.a and cert.a >= 0
    if isinstance(cert, H2):
        return (
            cert.a1 >= 0
            and cert.a2 >= 0
            and cert.lam1 >= cert.a1
            and cert.lam1 >= cert.a2
            and cert.lam1 + cert.lam2 == cert.a1 + cert.a2
        )
    if not isinstance(cert, HNode):
        return False
    top_diags = diag_list(cert.top)
    return (
        validate_certificate(cert.top)
        and validate_certificate(cert.bottom)
        and 0 <= cert.slot < len(top_diags)
        and top_diags[cert.slot] == cert.c
        and head(cert.bottom) == cert.c
    )


def _eigen_loc(node: HNode, idx: int) -> tuple[str, int]:
    ts = size(node.top)
    if idx < ts:
        return "top", idx
    return "bottom", idx - ts + 1


def _top_ext(node: HNode, k: int) -> int:
    """External diag index of top-internal slot k (k != node.slot)."""
    return k if k < node.slot else k - 1


def _diag_loc(node: HNode, idx: int) -> tuple[str, int]:
    t = size(node.top) - 1  # external top slots = top diag count minus glue
    if idx < t:
        return "top", (idx if idx < node.slot else idx + 1)
    return "bottom", idx - t


# ---------------------------------------------------------------- JSON


def cert_to_json(cert: HCert) -> dict:
    if isinstance(cert, H1):
        return {"leaf1": {"lam": rat_str(cert.lam), "a": rat_str(cert.a)}}
    if isinstance(cert, H2):
        return {
            "leaf2": {
                "lam1": rat_str(cert.lam1),
                "lam2": rat_str(cert.lam2),
                "a1": rat_str(cert.a1),
                "a2": rat_str(cert.a2),
            }
        }
    return {
        "node": {
            "c": rat_str(cert.c),
            "slot": cert.slot,
            "top": cert_to_json(cert.top),
            "bottom": cert_to_json(cert.bottom),
        }
    }


def cert_from_json(doc: dict) -> HCert:
    if "leaf1" in doc:
        d = doc["leaf1"]
        return H1(rat(d["lam"]), rat(d["a"]))
    if "leaf2" in doc:
        d = doc["leaf2"]
        return H2(rat(d["lam1"]), rat(d["lam2"]), rat(d["a1"]), rat(d["a2"]))
    if "node" in doc:
        d = doc["node"]
        return make_node(
            cert_from_json(d["top"]),
            cert_from_json(d["bottom"]),
            rat(d["c"]),
            int(d["slot"]),
        )
    raise ValueError("certificate JSON must contain leaf1, leaf2 or node")


# ---------------------------------------------------------------- search


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError(
                "certificate search exhausted its node budget (inconclusive)"
            )


def _distinct_desc(values: tuple[Fraction, ...]) -> list[tuple[Fraction, int]]:
    return [(v, len(list(g))) for v, g in groupby(values)]


def _remove_two_insert(
    values: tuple[Fraction, ...], v1: Fraction, v2: Fraction, c: Fraction
) -> tuple[Fraction, ...]:
    out = list(values)
    out.remove(v1)
    out.remove(v2)
    out.append(c)
    out.sort(reverse=True)
    return tuple(out)


def _search(
    lam: tuple[Fraction, ...],
    diag_sorted: tuple[Fraction, ...],
    budget: _Budget,
    memo: dict,
) -> Optional[HCert]:
    budget.tick()
    n = len(lam)
    if n == 1:
        return H1(lam[0], diag_sorted[0]) if lam[0] == diag_sorted[0] else None
    if n == 2:
        if lam[0] >= diag_sorted[0] and lam[0] + lam[1] == diag_sorted[0] + diag_sorted[1]:
            return H2(lam[0], lam[1], diag_sorted[0], diag_sorted[1])
        return None
    key = (n, diag_sorted)
    if key in memo:
        return memo[key]
    result: Optional[HCert] = None
    lam_min = lam[-1]
    lam1 = lam[0]
    distinct = _distinct_desc(diag_sorted)
    for i, (vi, mi) in enumerate(distinct):
        if result is not None:
            break
        if lam_min > vi:
            break
        for j in range(i, len(distinct)):
            vj, mj = distinct[j]
            if i == j and mi < 2:
                continue
            if lam_min > vj:
                break
            c = vi + vj - lam_min
            if c > lam1:
                continue
            rest = _remove_two_insert(diag_sorted, vi, vj, c)
            sub = _search(lam[:-1], rest, budget, memo)
            if sub is not None:
                slot = diag_list(sub).index(c)
                result = make_node(sub, H2(c, lam_min, vi, vj), c, slot)
                break
    memo[key] = result
    return result


def search_with_diag(
    sigma: Spectrum,
    diag: DiagonalList,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Optional[HCert]:
    """Complete decision procedure for membership with prescribed diagonal.

    Peels the minimal eigenvalue against every unordered pair of diagonal
    values (deduplicated), replacing the pair by c = a_s + a_t - lam_n and
    recursing; memoised on the remaining diagonal multiset.  Returns a
    certificate, None for proven non-membership, or raises
    BudgetExceededError as a distinct inconclusive outcome.
    """
    if sigma.n != diag.n:
        raise DimensionMismatchError(f"|sigma| = {sigma.n} != |diag| = {diag.n}")
    if sigma.total != diag.total:
        return None
    if sigma.perron < diag.maximum:
        return None
    return _search(sigma.values, diag.sorted_desc, _Budget(budget), {})


# ---------------------------------------------------------------- peel form


@dataclass(frozen=True)
class PeelResult:
    """A certificate rewritten as (rest of size n-1) + peeled order-2 block.

    `pair` is H2(c, lam_min, a_s, a_t) with its diag slots 0/1 holding the
    values of the consumed original slots s < t.  `remap` sends every
    surviving original diag index to its index in diag_list(rest), and
    `c_slot` locates the fresh c slot inside rest.
    """

    rest: HCert
    pair: H2
    c: Fraction
    s: int
    t: int
    c_slot: int
    remap: dict[int, int]


def to_peel_form(cert: HCert) -> HNode:
    p = peel_min(cert)
    return HNode(p.rest, p.pair, p.c, p.c_slot)


def _align_pair(pair: H2, swap: bool) -> H2:
    return H2(pair.lam1, pair.lam2, pair.a2, pair.a1) if swap else pair


def _peel_n3(cert: HCert) -> PeelResult:
    lam = sorted(spectrum_list(cert), reverse=True)
    diags = diag_list(cert)
    order = sorted(range(3), key=lambda k: (-diags[k], k))
    i0, i1, i2 = order
    a_max = diags[i0]
    c = lam[0] + lam[1] - a_max
    s, t = sorted((i1, i2))
    rest = H2(lam[0], lam[1], a_max, c)
    pair = H2(c, lam[2], diags[s], diags[t])
    return PeelResult(rest=rest, pair=pair, c=c, s=s, t=t, c_slot=1, remap={i0: 0})


def peel_min(cert: HCert) -> PeelResult:
    """Rewrite a valid certificate of order >= 3 so the minimal eigenvalue
    is peeled as an order-2 block, following the constructive case analysis
    of the simplification theorem."""
    n = size(cert)
    if n < 3:
        raise DimensionMismatchError("peel_min needs a certificate of order >= 3")
    if n == 3:
        return _peel_n3(cert)
    assert isinstance(cert, HNode)
    top, bottom, ch, slot = cert.top, cert.bottom, cert.c, cert.slot
    t_ext = size(top) - 1  # number of external top slots
    lam_min = min(spectrum_list(cert)[1:])

    bot_tail = spectrum_list(bottom)[1:]
    if isinstance(bottom, H2) and bottom.lam2 == lam_min:
        return _peel_case_a(cert, t_ext)
    if lam_min in bot_tail:
        return _peel_case_b(cert, t_ext)
    if isinstance(top, H2):
        return _peel_case_d(cert, t_ext)
    return _peel_case_c(cert, t_ext)


def _peel_case_a(cert: HNode, t_ext: int) -> PeelResult:
    # Bottom already is the order-2 block holding the minimum; external top
    # slot i sits at top-internal index i or i+1 depending on the glue slot.
    remap = {i: (i if i < cert.slot else i + 1) for i in range(t_ext)}
    assert isinstance(cert.bottom, H2)
    return PeelResult(
        rest=cert.top,
        pair=cert.bottom,
        c=cert.c,
        s=t_ext,
        t=t_ext + 1,
        c_slot=cert.slot,
        remap=remap,
    )


def _peel_case_b(cert: HNode, t_ext: int) -> PeelResult:
    p = peel_min(cert.bottom)
    rest = make_node(cert.top, p.rest, cert.c, cert.slot)
    remap = {i: i for i in range(t_ext)}
    for j, v in p.remap.items():
        remap[t_ext + j] = t_ext + v
    return PeelResult(
        rest=rest,
        pair=p.pair,
        c=p.c,
        s=t_ext + p.s,
        t=t_ext + p.t,
        c_slot=t_ext + p.c_slot,
        remap=remap,
    )


def _peel_case_c(cert: HNode, t_ext: int) -> PeelResult:
    top, bottom, ch, slot = cert.top, cert.bottom, cert.c, cert.slot
    p = peel_min(top)
    if slot not in (p.s, p.t):
        new_slot = p.remap[slot]
        rest = make_node(p.rest, bottom, ch, new_slot)
        rest_top_count = len(diag_list(p.rest)) - 1
        remap: dict[int, int] = {}
        for k, v in p.remap.items():
            if k == slot:
                continue
            idx = v if v < new_slot else v - 1
            remap[_top_ext(cert, k)] = idx
        for j in range(size(bottom)):
            remap[t_ext + j] = rest_top_count + j
        s_ext = _top_ext(cert, p.s)
        t_ext_idx = _top_ext(cert, p.t)
        s2, t2 = sorted((s_ext, t_ext_idx))
        pair = _align_pair(p.pair, swap=(s_ext > t_ext_idx))
        c_slot = p.c_slot if p.c_slot < new_slot else p.c_slot - 1
        return PeelResult(rest, pair, p.c, s2, t2, c_slot, remap)

    # The peel of the top consumed the glue slot: reattach the bottom
    # beneath the peeled pair and peel the rearranged certificate.
    pair_slot_of_ch = 0 if slot == p.s else 1
    other = p.t if slot == p.s else p.s
    inner = make_node(p.pair, bottom, ch, pair_slot_of_ch)
    node2 = make_node(p.rest, inner, p.c, p.c_slot)
    rest_count = len(diag_list(p.rest)) - 1
    fwd: dict[int, int] = {}
    for k, v in p.remap.items():
        if k == slot:
            continue
        fwd[_top_ext(cert, k)] = v if v < p.c_slot else v - 1
    fwd[_top_ext(cert, other)] = rest_count + 0
    for j in range(size(bottom)):
        fwd[t_ext + j] = rest_count + 1 + j
    return _translate_peel(peel_min(node2), fwd)


def _peel_case_d(cert: HNode, t_ext: int) -> PeelResult:
    top, bottom, ch, slot = cert.top, cert.bottom, cert.c, cert.slot
    q = peel_min(bottom)
    new_top = make_node(top, q.rest, ch, slot)
    slot2 = 1 + q.c_slot  # top contributes exactly one external slot
    node2 = make_node(new_top, q.pair, q.c, slot2)
    new_top_count = len(diag_list(new_top)) - 1
    fwd: dict[int, int] = {0: 0}  # the single external top slot stays first
    for j, v in q.remap.items():
        idx = 1 + v
        fwd[t_ext + j] = idx if idx < slot2 else idx - 1
    fwd[t_ext + q.s] = new_top_count + 0
    fwd[t_ext + q.t] = new_top_count + 1
    return _translate_peel(peel_min(node2), fwd)


def _translate_peel(r: PeelResult, fwd: dict[int, int]) -> PeelResult:
    inv = {v: k for k, v in fwd.items()}
    s0, t0 = inv[r.s], inv[r.t]
    swap = s0 > t0
    s2, t2 = sorted((s0, t0))
    remap = {inv[k]: v for k, v in r.remap.items()}
    return PeelResult(
        rest=r.rest,
        pair=_align_pair(r.pair, swap=swap),
        c=r.c,
        s=s2,
        t=t2,
        c_slot=r.c_slot,
        remap=remap,
    )


# ---------------------------------------------------------------- transformers


def _check_eps(eps: Fraction) -> None:
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")


def perron_increase(cert: HCert, eps: Fraction, slot: int = 0) -> HCert:
    """Raise the Perron root by eps, absorbing it into one diagonal slot."""
    _check_eps(eps)
    if eps == 0:
        return cert
    if isinstance(cert, H1):
        if slot != 0:
            raise ValueError("slot out of range")
        return H1(cert.lam + eps, cert.a + eps)
    if isinstance(cert, H2):
        if slot == 0:
            return H2(cert.lam1 + eps, cert.lam2, cert.a1 + eps, cert.a2)
        if slot == 1:
            return H2(cert.lam1 + eps, cert.lam2, cert.a1, cert.a2 + eps)
        raise ValueError("slot out of range")
    where, k = _diag_loc(cert, slot)
    if where == "top":
        return HNode(perron_increase(cert.top, eps, k), cert.bottom, cert.c, cert.slot)
    return HNode(
        perron_increase(cert.top, eps, cert.slot),
        perron_increase(cert.bottom, eps, k),
        cert.c + eps,
        cert.slot,
    )


def guo_minus(cert: HCert, target: int, eps: Fraction) -> HCert:
    """Perturb eigenvalue `target` down by eps while the Perron root rises
    by eps; the diagonal multiset is unchanged."""
    _check_eps(eps)
    n = size(cert)
    if not 1 <= target < n:
        raise ValueError("target must be a non-Perron eigenvalue index")
    if eps == 0:
        return cert
    if isinstance(cert, H2):
        return H2(cert.lam1 + eps, cert.lam2 - eps, cert.a1, cert.a2)
    assert isinstance(cert, HNode)
    where, k = _eigen_loc(cert, target)
    if where == "top":
        return HNode(guo_minus(cert.top, k, eps), cert.bottom, cert.c, cert.slot)
    return HNode(
        perron_increase(cert.top, eps, cert.slot),
        guo_minus(cert.bottom, k, eps),
        cert.c + eps,
        cert.slot,
    )


def guo_plus(cert: HCert, target: int, eps: Fraction) -> tuple[HCert, int, int]:
    """Perturb eigenvalue `target` up by eps while the Perron root rises by
    eps; exactly two diagonal slots gain eps, and their indices are
    reported."""
    _check_eps(eps)
    n = size(cert)
    if not 1 <= target < n:
        raise ValueError("target must be a non-Perron eigenvalue index")
    if isinstance(cert, H2):
        return (
            H2(cert.lam1 + eps, cert.lam2 + eps, cert.a1 + eps, cert.a2 + eps),
            0,
            1,
        )
    assert isinstance(cert, HNode)
    t_ext = size(cert.top) - 1
    where, k = _eigen_loc(cert, target)
    if where == "bottom":
        top2 = perron_increase(cert.top, eps, cert.slot)
        bottom2, s, t = guo_plus(cert.bottom, k, eps)
        return HNode(top2, bottom2, cert.c + eps, cert.slot), t_ext + s, t_ext + t
    top2, s, t = guo_plus(cert.top, k, eps)
    if cert.slot not in (s, t):
        s2, t2 = sorted((_top_ext(cert, s), _top_ext(cert, t)))
        return HNode(top2, cert.bottom, cert.c, cert.slot), s2, t2
    other = t if s == cert.slot else s
    bottom2 = perron_increase(cert.bottom, eps, 0)
    node2 = HNode(top2, bottom2, cert.c + eps, cert.slot)
    s2, t2 = sorted((_top_ext(cert, other), t_ext + 0))
    return node2, s2, t2


def union(c1: HCert, c2: HCert) -> HCert:
    """Disjoint union of two certified lists, glued through the trivial
    order-2 block on their Perron roots; requires head(c1) >= head(c2)."""
    l1, m1 = head(c1), head(c2)
    if l1 < m1:
        raise NotRealizableError(
            f"union needs the first Perron root {l1} >= the second {m1}"
        )
    device = H2(l1, m1, l1, m1)
    inner = make_node(device, c1, l1, 0)
    mu_slot = 0 if isinstance(inner, HNode) else 1
    return make_node(inner, c2, m1, mu_slot)


def anti_guo_split(cert: HCert) -> tuple[Fraction, HCert, HCert]:
    """Split a valid certificate into two certificates with Perron roots
    lam1 - eps and lam2 + eps, 0 <= eps <= (lam1 - lam2)/2, partitioning
    the eigenvalues and diagonal slots."""
    eps, left, right, _ = _anti_guo(cert)
    return eps, left, right


def _anti_guo(cert: HCert) -> tuple[Fraction, HCert, HCert, dict[int, tuple[str, int]]]:
    n = size(cert)
    if n < 2:
        raise DimensionMismatchError("anti_guo_split needs order >= 2")
    if n == 2:
        if isinstance(cert, HNode):  # degenerate node of order 2
            lam = spectrum_list(cert)
            dg = diag_list(cert)
            cert = H2(lam[0], lam[1], dg[0], dg[1])
        assert isinstance(cert, H2)
        a = [cert.a1, cert.a2]
        amax = 0 if a[0] >= a[1] else 1
        other = 1 - amax
        eps = cert.lam1 - a[amax]
        left = H1(a[amax], a[amax])
        right = H1(a[other], a[other])
        return eps, left, right, {amax: ("L", 0), other: ("R", 0)}
    p = peel_min(cert)
    eps, left, right, loc = _anti_guo(p.rest)
    side, idx = loc[p.c_slot]
    host = left if side == "L" else right
    base = len(diag_list(host)) - 1
    host2 = make_node(host, p.pair, p.c, idx)
    out: dict[int, tuple[str, int]] = {}
    for orig, rest_idx in p.remap.items():
        sd, ix = loc[rest_idx]
        if sd == side and ix > idx:
            ix -= 1
        out[orig] = (sd, ix)
    out[p.s] = (side, base + 0)
    out[p.t] = (side, base + 1)
    if side == "L":
        return eps, host2, right, out
    return eps, left, host2, out


def strip_zero(cert: HCert) -> tuple[HCert, int, int]:
    """Remove one zero eigenvalue; the two reported diagonal slots s < t are
    replaced by a single slot holding a_s + a_t."""
    res = _strip(cert)
    return res[0], res[1], res[2]


def _strip(cert: HCert) -> tuple[HCert, int, int, int, dict[int, int]]:
    """Returns (rest, s, t, merged_idx, remap-for-surviving-slots)."""
    zero = Fraction(0)
    if isinstance(cert, H1):
        raise ValueError("no zero among the non-Perron eigenvalues")
    if isinstance(cert, H2):
        if cert.lam2 != 0:
            raise ValueError("no zero among the non-Perron eigenvalues")
        return H1(cert.lam1, cert.a1 + cert.a2), 0, 1, 0, {}
    assert isinstance(cert, HNode)
    top, bottom, ch, slot = cert.top, cert.bottom, cert.c, cert.slot
    t_ext = size(top) - 1
    if zero in spectrum_list(bottom)[1:]:
        r, s, t, merged, remap_b = _strip(bottom)
        if size(r) == 1 and isinstance(r, H1):
            # bottom collapsed; the glue slot of the top now carries the merge
            remap = {i: (i if i < slot else i + 1) for i in range(t_ext)}
            return top, t_ext + s, t_ext + t, slot, remap
        rest = make_node(top, r, ch, slot)
        remap = {i: i for i in range(t_ext)}
        for j, v in remap_b.items():
            remap[t_ext + j] = t_ext + v
        return rest, t_ext + s, t_ext + t, t_ext + merged, remap
    if zero not in spectrum_list(top)[1:]:
        raise ValueError("no zero among the non-Perron eigenvalues")
    if isinstance(top, H2):
        other = 1 - slot
        ah = [top.a1, top.a2][other]
        rest = perron_increase(bottom, ah, 0)
        remap = {1 + j: j for j in range(1, size(bottom))}
        return rest, 0, 1, 0, remap
    r, s, t, merged, remap_t = _strip(top)
    if slot in (s, t):
        other = s if t == slot else t
        ah = diag_list(top)[other]
        bottom2 = perron_increase(bottom, ah, 0)
        rest = make_node(r, bottom2, ch + ah, merged)
        rest_top_count = len(diag_list(r)) - 1
        remap: dict[int, int] = {}
        for k, v in remap_t.items():
            if k == slot:
                continue
            remap[_top_ext(cert, k)] = v if v < merged else v - 1
        for j in range(1, size(bottom)):
            remap[t_ext + j] = rest_top_count + j
        s2, t2 = sorted((_top_ext(cert, other), t_ext + 0))
        return rest, s2, t2, rest_top_count + 0, remap
    new_slot = remap_t[slot]
    rest = make_node(r, bottom, ch, new_slot)
    rest_top_count = len(diag_list(r)) - 1
    remap = {}
    for k, v in remap_t.items():
        if k == slot:
            continue
        remap[_top_ext(cert, k)] = v if v < new_slot else v - 1
    for j in range(size(bottom)):
        remap[t_ext + j] = rest_top_count + j
    merged2 = merged if merged < new_slot else merged - 1
    s2, t2 = sorted((_top_ext(cert, s), _top_ext(cert, t)))
    return rest, s2, t2, merged2, remap


# ---------------------------------------------------------------- H*


def _value_key(vals) -> tuple:
    return tuple(sorted(vals, reverse=True))


def find_h_split(
    sigma: Spectrum, diag: DiagonalList, budget: int = DEFAULT_SEARCH_BUDGET
) -> Optional[tuple[tuple[Spectrum, DiagonalList, HCert], tuple[Spectrum, DiagonalList, HCert]]]:
    """Search for a proper bipartition of (sigma, diag) with both parts
    realisable; None if the instance is irreducible."""
    n = sigma.n
    lam = sigma.values
    dg = diag.values
    seen = set()
    from itertools import combinations

    for l in range(1, n // 2 + 1):
        for pidx in combinations(range(n), l):
            pvals = _value_key(lam[i] for i in pidx)
            qvals = _value_key(lam[i] for i in range(n) if i not in set(pidx))
            for ridx in combinations(range(n), l):
                rvals = _value_key(dg[i] for i in ridx)
                key = (pvals, rvals)
                if key in seen:
                    continue
                seen.add(key)
                svals = _value_key(dg[i] for i in range(n) if i not in set(ridx))
                if sum(pvals) != sum(rvals):
                    continue
                cert_p = search_with_diag(
                    Spectrum(pvals), DiagonalList(rvals), budget
                )
                if cert_p is None:
                    continue
                cert_q = search_with_diag(
                    Spectrum(qvals), DiagonalList(svals), budget
                )
                if cert_q is None:
                    continue
                return (
                    (Spectrum(pvals), DiagonalList(rvals), cert_p),
                    (Spectrum(qvals), DiagonalList(svals), cert_q),
                )
    return None


def is_h_star(
    sigma: Spectrum, diag: DiagonalList, budget: int = DEFAULT_SEARCH_BUDGET
) -> bool:
    """True iff (sigma, diag) is realisable but admits no split into two
    realisable parts."""
    if search_with_diag(sigma, diag, budget) is None:
        raise NotRealizableError("is_h_star called on a non-member instance")
    return find_h_split(sigma, diag, budget) is None


# ---------------------------------------------------------------- matrices


def _materialize(cert: HCert) -> tuple[SymMatrix, list[int]]:
    if isinstance(cert, H1):
        return SymMatrix([[float(cert.a)]]), [0]
    if isinstance(cert, H2):
        mat = realize_2x2(
            Spectrum((cert.lam1, cert.lam2)), DiagonalList((cert.a1, cert.a2))
        )
        rows = [0, 1] if cert.a1 >= cert.a2 else [1, 0]
        return mat, rows
    assert isinstance(cert, HNode)
    a_mat, rows_t = _materialize(cert.top)
    b_mat, rows_b = _materialize(cert.bottom)
    pos = rows_t[cert.slot]
    c_mat, _ = smigoc_glue(GlueInput(a=a_mat, pos=pos, b=b_mat, c=float(cert.c)))
    k = a_mat.n
    rows: list[int] = []
    top_diags = len(diag_list(cert.top))
    for slot_idx in range(top_diags):
        if slot_idx == cert.slot:
            continue
        r = rows_t[slot_idx]
        rows.append(r if r < pos else r - 1)
    for j in rows_b:
        rows.append(k - 1 + j)
    return c_mat, rows


def materialize(cert: HCert) -> SymMatrix:
    """Build a nonnegative symmetric matrix realising the certificate by
    recursively gluing order-2 realisations."""
    if not validate_certificate(cert):
        raise NotRealizableError("cannot materialize an invalid certificate")
    mat, _ = _materialize(cert)
    return mat
