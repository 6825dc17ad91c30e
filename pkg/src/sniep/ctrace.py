"""C-realisability traces: replayable step lists over working lists.

A trace starts from n singleton zero lists and applies unions, bare
Perron increases, and +/- eigenvalue perturbations (each raising the
Perron root by the same epsilon).  Replay is an exact fold; the trace is
legal iff every step's preconditions hold and the final state is a
single list.

Step semantics on the positional state:
  union(i, j), i < j  : lists i and j merge (sorted), stored at i; j is
                        removed and later indices shift down
  perron(i, eps)      : head of list i rises by eps >= 0
  guo(i, t, eps, sign): head rises by eps; entry at sorted position t >= 1
                        moves by +eps or -eps
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import hcalc
from .errors import NotRealizableError
from .hcalc import HCert, H1
from .numkit import Spectrum
from .rationals import rat, rat_str
from .soto import SotoCertificate, _Ctx, _sp_cert

DEFAULT_PARTITION_BUDGET = 10**6


@dataclass(frozen=True)
class UnionStep:
    i: int
    j: int

    def to_json(self) -> dict:
        return {"op": "union", "i": self.i, "j": self.j}


@dataclass(frozen=True)
class PerronStep:
    i: int
    eps: Fraction

    def to_json(self) -> dict:
        return {"op": "perron", "i": self.i, "eps": rat_str(self.eps)}


@dataclass(frozen=True)
class GuoStep:
    i: int
    target: int
    eps: Fraction
    sign: int  # +1 or -1

    def to_json(self) -> dict:
        return {
            "op": "guo",
            "i": self.i,
            "target": self.target,
            "eps": rat_str(self.eps),
            "sign": "+" if self.sign > 0 else "-",
        }


Step = Union[UnionStep, PerronStep, GuoStep]


@dataclass(frozen=True)
class CTrace:
    n0: int
    steps: tuple[Step, ...]

    def to_json(self) -> dict:
        return {"n0": self.n0, "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, doc: dict) -> "CTrace":
        steps: list[Step] = []
        for s in doc["steps"]:
            op = s["op"]
            if op == "union":
                steps.append(UnionStep(int(s["i"]), int(s["j"])))
            elif op == "perron":
                steps.append(PerronStep(int(s["i"]), rat(s["eps"])))
            elif op == "guo":
                sign = 1 if s["sign"] == "+" else -1
                steps.append(GuoStep(int(s["i"]), int(s["target"]), rat(s["eps"]), sign))
            else:
                raise ValueError(f"unknown trace op {op!r}")
        return cls(int(doc["n0"]), tuple(steps))


@dataclass(frozen=True)
class ReplayResult:
    final: Optional[Spectrum]
    error_step: Optional[int]
    message: Optional[str]

    @property
    def ok(self) -> bool:
        return self.final is not None


def replay_trace(trace: CTrace) -> ReplayResult:
    """Exact replay; reports the first illegal step instead of raising."""
    if trace.n0 < 1:
        return ReplayResult(None, -1, "trace must start with at least one list")
    state: list[tuple[Fraction, ...]] = [(Fraction(0),) for _ in range(trace.n0)]

    def fail(k: int, msg: str) -> ReplayResult:
        return ReplayResult(None, k, msg)

    for k, step in enumerate(trace.steps):
        if isinstance(step, UnionStep):
            if not (0 <= step.i < step.j < len(state)):
                return fail(k, f"union indices ({step.i}, {step.j}) out of range")
            merged = tuple(sorted(state[step.i] + state[step.j], reverse=True))
            state[step.i] = merged
            del state[step.j]
        elif isinstance(step, PerronStep):
            if not 0 <= step.i < len(state):
                return fail(k, f"list index {step.i} out of range")
            if step.eps < 0:
                return fail(k, "perron step with negative epsilon")
            lst = state[step.i]
            state[step.i] = (lst[0] + step.eps,) + lst[1:]
        elif isinstance(step, GuoStep):
            if not 0 <= step.i < len(state):
                return fail(k, f"list index {step.i} out of range")
            lst = state[step.i]
            if not 1 <= step.target < len(lst):
                return fail(
                    k, f"guo target {step.target} is not a non-Perron position"
                )
            if step.eps < 0:
                return fail(k, "guo step with negative epsilon")
            moved = lst[step.target] + step.sign * step.eps
            rest = lst[1 : step.target] + lst[step.target + 1 :] + (moved,)
            state[step.i] = (lst[0] + step.eps,) + tuple(sorted(rest, reverse=True))
        else:  # pragma: no cover
            return fail(k, f"unknown step {step!r}")
    if len(state) != 1:
        return ReplayResult(None, len(trace.steps), f"{len(state)} lists remain")
    return ReplayResult(Spectrum(state[0]), None, None)


def validate_trace(trace: CTrace) -> Optional[Spectrum]:
    """The final list if every step is legal, else None."""
    return replay_trace(trace).final


# ---------------------------------------------------------------- to H


def _sorted_position_index(cert: HCert, t: int) -> int:
    """Canonical-spectrum index of the t-th entry of the sorted list."""
    values = hcalc.spectrum_list(cert)
    order = sorted(range(len(values)), key=lambda k: (-values[k], k))
    return order[t]


def c_to_h(trace: CTrace) -> HCert:
    """Fold a legal trace into a realisability certificate for its final
    list (union / Perron-increase / Guo map to their certificate
    transformers)."""
    if replay_trace(trace).final is None:
        raise NotRealizableError("cannot compile an illegal trace")
    certs: list[HCert] = [H1(Fraction(0), Fraction(0)) for _ in range(trace.n0)]
    for step in trace.steps:
        if isinstance(step, UnionStep):
            a, b = certs[step.i], certs[step.j]
            if hcalc.head(b) > hcalc.head(a):
                a, b = b, a
            certs[step.i] = hcalc.union(a, b)
            del certs[step.j]
        elif isinstance(step, PerronStep):
            certs[step.i] = hcalc.perron_increase(certs[step.i], step.eps)
        else:
            cert = certs[step.i]
            idx = _sorted_position_index(cert, step.target)
            if step.sign < 0:
                certs[step.i] = hcalc.guo_minus(cert, idx, step.eps)
            else:
                certs[step.i], _, _ = hcalc.guo_plus(cert, idx, step.eps)
    return certs[0]


# ---------------------------------------------------------------- from S_p


class _TraceBuilder:
    """Emit trace steps while mirroring the replay state, so positional
    indices can be resolved from logical list handles and values."""

    def __init__(self, n0: int):
        self.steps: list[Step] = []
        self.slots: list[int] = list(range(n0))  # logical ids in position order
        self.values: dict[int, tuple[Fraction, ...]] = {
            i: (Fraction(0),) for i in range(n0)
        }
        self.free: list[int] = list(range(n0))
        self._next = n0

    def take_zero(self) -> int:
        return self.free.pop(0)

    def _pos(self, handle: int) -> int:
        return self.slots.index(handle)

    def union(self, a: int, b: int) -> int:
        i, j = sorted((self._pos(a), self._pos(b)))
        self.steps.append(UnionStep(i, j))
        merged = tuple(sorted(self.values[a] + self.values[b], reverse=True))
        new = self._next
        self._next += 1
        keep, drop = self.slots[i], self.slots[j]
        self.slots[i] = new
        del self.slots[j]
        self.values[new] = merged
        del self.values[keep], self.values[drop]
        return new

    def perron(self, handle: int, eps: Fraction) -> int:
        if eps == 0:
            return handle
        self.steps.append(PerronStep(self._pos(handle), eps))
        lst = self.values[handle]
        self.values[handle] = (lst[0] + eps,) + lst[1:]
        return handle

    def guo(self, handle: int, value: Fraction, eps: Fraction, sign: int) -> int:
        """Perturb some non-Perron entry currently equal to `value`."""
        if eps == 0:
            return handle
        lst = self.values[handle]
        target = next(k for k in range(1, len(lst)) if lst[k] == value)
        self.steps.append(GuoStep(self._pos(handle), target, eps, sign))
        moved = value + sign * eps
        rest = lst[1:target] + lst[target + 1 :] + (moved,)
        self.values[handle] = (lst[0] + eps,) + tuple(sorted(rest, reverse=True))
        return handle


def _emit_s1(b: _TraceBuilder, head: Fraction, tail: tuple[Fraction, ...]) -> int:
    """Build (head, *tail) for any head >= the level-1 floor of the tail.

    Pairs with nonnegative sum are finished standalone; pairs with
    negative sum (and a negative odd middle) are repaired inside the host
    list, whose head then lands exactly on the floor before topping up.
    """
    if not tail:
        z = b.take_zero()
        return b.perron(z, head)
    if tail[-1] >= 0:
        host = b.take_zero()
        host = b.perron(host, head)
        for v in tail:
            z = b.perron(b.take_zero(), v)
            host = b.union(host, z)
        return host
    n = len(tail) + 1
    host = b.union(b.take_zero(), b.take_zero())
    host = b.guo(host, Fraction(0), -tail[-1], -1)  # -> (-lam_n, lam_n)
    finished: list[int] = []
    for i in range(2, n // 2 + 1):
        x, y = tail[i - 2], tail[n - i - 1]
        if y >= 0:
            finished.append(b.perron(b.take_zero(), x))
            finished.append(b.perron(b.take_zero(), y))
            continue
        pair = b.union(b.take_zero(), b.take_zero())
        pair = b.guo(pair, Fraction(0), -y, -1)  # -> (-y, y)
        if x + y >= 0:
            finished.append(b.perron(pair, x + y))
        else:
            host = b.union(host, pair)
            host = b.guo(host, -y, -(x + y), -1)  # -y drops to x
    if n >= 3 and n % 2 == 1:
        mid = tail[(n - 3) // 2]
        if mid >= 0:
            finished.append(b.perron(b.take_zero(), mid))
        else:
            host = b.union(host, b.take_zero())
            host = b.guo(host, Fraction(0), -mid, -1)
    host = b.perron(host, head - b.values[host][0])
    for h in finished:
        host = b.union(host, h)
    return host


def _emit_sp(b: _TraceBuilder, cert: SotoCertificate, ctx: _Ctx) -> int:
    if cert.p == 1:
        return _emit_s1(b, cert.sigma[0], cert.sigma[1:])
    lam1 = cert.sigma[0]
    gamma = cert.gamma
    sub1_low = (gamma,) + cert.sublists[0][1:]
    c_low = _sp_cert(sub1_low, cert.p - 1, ctx)
    assert c_low is not None  # gamma >= lam1 - margin1 keeps membership
    hosts = [(gamma, _emit_sp(b, c_low, ctx))]
    lifted: list[Fraction] = []
    for blk, neg in zip(cert.sublists[1:], cert.negativities):
        lifted_head = blk[0] + neg
        c_blk = _sp_cert((lifted_head,) + blk[1:], cert.p - 1, ctx)
        assert c_blk is not None  # head sits exactly on the floor
        hosts.append((lifted_head, _emit_sp(b, c_blk, ctx)))
        if neg > 0:
            lifted.append(lifted_head)
    hosts.sort(key=lambda kv: kv[0], reverse=True)
    merged = hosts[0][1]
    for _, h in hosts[1:]:
        merged = b.union(merged, h)
    # Lower every raised head except the largest available special value,
    # which the Perron root of the merged list absorbs.
    rise_owner: Optional[Fraction] = None
    if lifted and max(lifted) >= gamma:
        rise_owner = max(lifted)
    for blk, neg in zip(cert.sublists[1:], cert.negativities):
        if neg == 0:
            continue
        if rise_owner is not None and blk[0] + neg == rise_owner:
            rise_owner = None  # consumed: this raised head becomes the Perron root
            if gamma > blk[0]:
                b.guo(merged, gamma, gamma - blk[0], -1)
            continue
        b.guo(merged, blk[0] + neg, neg, -1)
    b.perron(merged, lam1 - b.values[merged][0])
    return merged


def sp_to_c(
    cert: SotoCertificate, budget: int = DEFAULT_PARTITION_BUDGET
) -> CTrace:
    """Constructive route from a Soto certificate to a trace replaying to
    exactly the certified list."""
    n = len(cert.sigma)
    b = _TraceBuilder(n)
    ctx = _Ctx(budget, max_r=max(4, len(cert.sublists or ()) + 1))
    _emit_sp(b, cert, ctx)
    trace = CTrace(n, tuple(b.steps))
    final = validate_trace(trace)
    if final is None or final.values != cert.sigma:
        raise AssertionError("emitted trace does not replay to the certified list")
    return trace
