"""Converters between Soules realisations and recursive certificates.

A Soules realisation splits along its coarsest two-block partition into
two smaller Soules realisations sharing the scalar c = |v|^2 lam1 +
|u|^2 lam2, which gives a certificate by recursion.  Conversely an
irreducible certificate rebuilds a Soules matrix bottom-up from 2x2
blocks glued by the same block pattern used for matrices.  Reducible
instances are first cut into irreducible pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotRealizableError
from .hcalc import (
    DEFAULT_SEARCH_BUDGET,
    H2,
    HCert,
    HNode,
    H1,
    diag_list,
    find_h_split,
    make_node,
    peel_min,
    search_with_diag,
    size,
    spectrum_list,
    validate_certificate,
)
from .numkit import DiagonalList, Spectrum
from .rationals import rats
from .soules import Split, SoulesSequence, SoulesSpec, soules_diag_exact_raw


@dataclass(frozen=True)
class SoulesRealization:
    """A spectrum realised by an explicit Soules spec, with its exact
    (entrywise nonnegative) diagonal in the spec's row order."""

    spec: SoulesSpec
    sigma: Spectrum
    diag: DiagonalList

    def __post_init__(self) -> None:
        raw = soules_diag_exact_raw(self.spec, self.sigma)
        if raw != self.diag.values:
            raise ValueError("diag does not match the exact diagonal of the spec")

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "sigma": self.sigma.to_json(),
            "diag": self.diag.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SoulesRealization":
        return cls(
            SoulesSpec.from_json(doc["spec"]),
            Spectrum(rats(doc["sigma"])),
            DiagonalList(rats(doc["diag"])),
        )

    @classmethod
    def from_spec(cls, spec: SoulesSpec, sigma: Spectrum) -> "SoulesRealization":
        raw = soules_diag_exact_raw(spec, sigma)
        if any(v < 0 for v in raw):
            raise NotRealizableError(
                "this spectrum gives a negative diagonal entry for the spec"
            )
        return cls(spec, sigma, DiagonalList(raw))


# ------------------------------------------------------------ Soules -> H


def _sub_realization_to_h(
    splits: list[Split], x_sq: tuple[Fraction, ...], sigma: tuple[Fraction, ...]
) -> tuple[HCert, list[int]]:
    """Recursive splitter; returns the certificate and, per ground element
    (row), the index of its diagonal slot in the certificate."""
    m = len(sigma)
    if m == 1:
        return H1(sigma[0], sigma[0]), [0]
    if m == 2:
        a0 = x_sq[0] * sigma[0] + x_sq[1] * sigma[1]
        a1 = x_sq[1] * sigma[0] + x_sq[0] * sigma[1]
        return H2(sigma[0], sigma[1], a0, a1), [0, 1]
    first = splits[0]
    gamma_set, delta_set = first.star, first.starstar
    if len(gamma_set) == m - 1:
        gamma_set, delta_set = delta_set, gamma_set
    k = len(gamma_set)
    u_sq = sum((x_sq[e - 1] for e in gamma_set), Fraction(0))
    v_sq = sum((x_sq[e - 1] for e in delta_set), Fraction(0))
    c = v_sq * sigma[0] + u_sq * sigma[1]

    gamma_sorted = sorted(gamma_set)
    delta_sorted = sorted(delta_set)
    g_pos = {e: i + 1 for i, e in enumerate(gamma_sorted)}
    d_pos = {e: i + 1 for i, e in enumerate(delta_sorted)}

    alpha_splits: list[Split] = []
    beta_splits: list[Split] = []
    sigma_top = [sigma[0], sigma[1]]
    sigma_bot = [c]
    for idx, sp in enumerate(splits[1:], start=1):
        lam = sigma[idx + 1]
        if sp.parent <= gamma_set:
            alpha_splits.append(
                Split(
                    frozenset(g_pos[e] for e in sp.parent),
                    frozenset(g_pos[e] for e in sp.star),
                    frozenset(g_pos[e] for e in sp.starstar),
                )
            )
            sigma_top.append(lam)
        else:
            beta_splits.append(
                Split(
                    frozenset(d_pos[e] for e in sp.parent),
                    frozenset(d_pos[e] for e in sp.star),
                    frozenset(d_pos[e] for e in sp.starstar),
                )
            )
            sigma_bot.append(lam)

    top_splits = [
        Split(frozenset(range(1, k + 2)), frozenset(range(1, k + 1)), frozenset({k + 1}))
    ] + alpha_splits
    x_sq_top = tuple(x_sq[e - 1] for e in gamma_sorted) + (v_sq,)
    x_sq_bot = tuple(x_sq[e - 1] / v_sq for e in delta_sorted)

    cert_top, rm_top = _sub_realization_to_h(top_splits, x_sq_top, tuple(sigma_top))
    cert_bot, rm_bot = _sub_realization_to_h(beta_splits, x_sq_bot, tuple(sigma_bot))
    slot = rm_top[k]
    cert = make_node(cert_top, cert_bot, c, slot)
    top_count = len(diag_list(cert_top)) - 1
    rowmap = [0] * m
    for i, e in enumerate(gamma_sorted):
        q = rm_top[i]
        rowmap[e - 1] = q if q < slot else q - 1
    for i, e in enumerate(delta_sorted):
        rowmap[e - 1] = top_count + rm_bot[i]
    return cert, rowmap


def soules_to_h(real: SoulesRealization) -> HCert:
    """Certificate with exactly the spectrum and diagonal of the realisation."""
    cert, rowmap = _sub_realization_to_h(
        list(real.spec.seq.splits), real.spec.x_squared, real.sigma.values
    )
    got = diag_list(cert)
    for row, slot in enumerate(rowmap):
        if got[slot] != real.diag.values[row]:
            raise AssertionError("certificate diagonal does not match the realisation")
    return cert


# ------------------------------------------------------------ H* -> Soules


def _two_by_two(
    values: tuple[Fraction, Fraction], diags: tuple[Fraction, Fraction]
) -> tuple[tuple[Fraction, Fraction], list[int]]:
    """x^2 of the 2x2 block realising (values | diags); rows are ordered
    with the larger diagonal first, and the row->slot map is returned."""
    amax = 0 if diags[0] >= diags[1] else 1
    a1, a2 = diags[amax], diags[1 - amax]
    eps = values[0] - a1
    if eps <= 0:
        raise NotRealizableError(
            "boundary block (Perron equals a diagonal entry): the instance is "
            "reducible; decompose it first"
        )
    d = a1 - a2 + 2 * eps
    return ((a1 - a2 + eps) / d, eps / d), [amax, 1 - amax]


def _build_soules(cert: HCert) -> tuple[list[Split], tuple[Fraction, ...], list[int]]:
    """Returns (splits over {1..m}, x^2 per row, row -> cert diag index)."""
    m = size(cert)
    if m == 1:
        return [], (Fraction(1),), [0]
    if m == 2:
        values = tuple(sorted(spectrum_list(cert), reverse=True))
        diags = tuple(diag_list(cert))
        x_sq, rowmap = _two_by_two(values, diags)  # type: ignore[arg-type]
        return [Split.of({1, 2}, {1}, {2})], x_sq, rowmap
    p = peel_min(cert)
    splits1, xsq1, rm1 = _build_soules(p.rest)
    r_c = rm1.index(p.c_slot)
    old_order = [r for r in range(m - 1) if r != r_c] + [r_c]
    relabel = {old + 1: new + 1 for new, old in enumerate(old_order)}

    def rel(s: frozenset[int]) -> frozenset[int]:
        return frozenset(relabel[e] for e in s)

    splits_perm = [Split(rel(sp.parent), rel(sp.star), rel(sp.starstar)) for sp in splits1]
    xsq_perm = tuple(xsq1[old] for old in old_order)

    pair_vals = (p.pair.lam1, p.pair.lam2)
    pair_diags = (p.pair.a1, p.pair.a2)
    xsq2, rows2 = _two_by_two(pair_vals, pair_diags)

    def extend(s: frozenset[int]) -> frozenset[int]:
        return s | {m} if (m - 1) in s else s

    splits_final = [
        Split(extend(sp.parent), extend(sp.star), extend(sp.starstar))
        for sp in splits_perm
    ] + [Split.of({m - 1, m}, {m - 1}, {m})]
    w = xsq_perm[m - 2]
    x_sq_final = xsq_perm[: m - 2] + (w * xsq2[0], w * xsq2[1])

    inv_remap = {rest_idx: orig for orig, rest_idx in p.remap.items()}
    rowmap = [0] * m
    for new_row in range(m - 2):
        old_row = old_order[new_row]
        rowmap[new_row] = inv_remap[rm1[old_row]]
    consumed = (p.s, p.t)
    rowmap[m - 2] = consumed[rows2.index(0)]
    rowmap[m - 1] = consumed[rows2.index(1)]
    return splits_final, x_sq_final, rowmap


def h_star_to_soules(
    sigma: Spectrum, diag: DiagonalList, cert: HCert
) -> SoulesRealization:
    """Rebuild a Soules realisation from an irreducible certificate.

    The realisation is reported in the certificate's diagonal-slot order:
    row i of the matrix carries diagonal slot i.  Raises if a boundary
    block is hit, which means the instance is reducible and should go
    through sbar_decompose first.
    """
    if not validate_certificate(cert):
        raise NotRealizableError("invalid certificate")
    if tuple(sorted(spectrum_list(cert), reverse=True)) != sigma.values:
        raise NotRealizableError("certificate spectrum does not match sigma")
    if tuple(sorted(diag_list(cert))) != tuple(sorted(diag.values)):
        raise NotRealizableError("certificate diagonal does not match diag")
    splits, x_sq, rowmap = _build_soules(cert)
    m = size(cert)
    relabel = {row + 1: rowmap[row] + 1 for row in range(m)}

    def rel(s: frozenset[int]) -> frozenset[int]:
        return frozenset(relabel[e] for e in s)

    splits_out = [Split(rel(sp.parent), rel(sp.star), rel(sp.starstar)) for sp in splits]
    x_out = [Fraction(0)] * m
    for row in range(m):
        x_out[rowmap[row]] = x_sq[row]
    spec = SoulesSpec(SoulesSequence(m, tuple(splits_out)), tuple(x_out))
    expected = tuple(diag_list(cert))
    raw = soules_diag_exact_raw(spec, sigma)
    if raw != expected:
        raise AssertionError("rebuilt Soules diagonal does not match the certificate")
    return SoulesRealization(spec, sigma, DiagonalList(raw))


# ------------------------------------------------------------ reducible


def sbar_decompose(
    sigma: Spectrum, diag: DiagonalList, budget: int = DEFAULT_SEARCH_BUDGET
) -> list[tuple[Spectrum, DiagonalList, HCert]]:
    """Partition (sigma, diag) into irreducible realisable blocks, each with
    its certificate; the multiset union of the blocks is the input."""
    cert = search_with_diag(sigma, diag, budget)
    if cert is None:
        raise NotRealizableError(
            f"{sigma.values} is not realisable with diagonal {diag.values}"
        )
    split = find_h_split(sigma, diag, budget)
    if split is None:
        return [(sigma, diag, cert)]
    (s1, d1, _), (s2, d2, _) = split
    return sbar_decompose(s1, d1, budget) + sbar_decompose(s2, d2, budget)
