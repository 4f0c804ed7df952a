"""Tripartite boxes: Svetlichny-polytope catalog, genuine-nonclassicality measures.

Tables are (2,2,2,2,2,2) arrays indexed ``[x][y][z][a][b][c]``. A box in the
26-dimensional nonsignaling space is equivalently described by its 6 single-,
12 two- and 8 three-party expectations; :func:`expectations3` and
:func:`box3_from_expectations` convert both ways exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import boxcore, discord2, polytope
from .boxcore import (
    EPS_LP,
    EPS_VALID,
    BipartiteBox,
    BoxError,
    NegativeEntryError,
    NotNormalizedError,
    PartyRelabel,
    SignalingError,
)
from .polytope import DecompositionResult, ResidualInvalidError

SVETLICHNY_BOUND = 4.0
MERMIN3_BOUND = 2.0
CLASS99_BOUND = 3.0

PAIR_AB, PAIR_AC, PAIR_BC = "AB", "AC", "BC"


class NotInPolytopeError(RuntimeError):
    pass


class InvalidVertexError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TripartiteBox:
    """Immutable validated tripartite box; ``table[x,y,z,a,b,c]`` = P(a,b,c|x,y,z)."""

    table: np.ndarray

    def prob(self, x, y, z, a, b, c) -> float:
        return float(self.table[x, y, z, a, b, c])

    def allclose(self, other: "TripartiteBox", tol: float = EPS_VALID) -> bool:
        return bool(np.allclose(self.table, other.table, atol=tol, rtol=0.0))


def _freeze(t: np.ndarray) -> np.ndarray:
    t.setflags(write=False)
    return t


def make_box3(values, eps: float = EPS_VALID) -> TripartiteBox:
    """Validate normalization, positivity and full nonsignaling.

    Every single-party marginal must be independent of the other two inputs
    and every two-party marginal independent of the remaining input.
    """
    t = np.asarray(values, dtype=float)
    if t.size != 64:
        raise BoxError(f"expected 64 probabilities, got {t.size}")
    t = t.reshape((2,) * 6).copy()
    neg = t < 0
    if neg.any():
        worst = np.unravel_index(np.argmin(t), t.shape)
        if t[worst] < -eps:
            raise NegativeEntryError(f"entry {worst} = {t[worst]:.3e} < 0")
        t[neg] = 0.0
    norms = t.sum(axis=(3, 4, 5))
    if np.max(np.abs(norms - 1.0)) > eps:
        bad = np.unravel_index(np.argmax(np.abs(norms - 1.0)), norms.shape)
        raise NotNormalizedError(f"inputs {bad}: sum = {norms[bad]:.12f}")
    # two-party marginals independent of the spectator input
    mab = t.sum(axis=5)  # [x, y, z, a, b]
    if np.max(np.abs(mab[:, :, 0] - mab[:, :, 1])) > eps:
        raise SignalingError("P(a,b|x,y) depends on z")
    mac = t.sum(axis=4)  # [x, y, z, a, c]
    if np.max(np.abs(mac[:, 0] - mac[:, 1])) > eps:
        raise SignalingError("P(a,c|x,z) depends on y")
    mbc = t.sum(axis=3)  # [x, y, z, b, c]
    if np.max(np.abs(mbc[0] - mbc[1])) > eps:
        raise SignalingError("P(b,c|y,z) depends on x")
    # single-party marginals (implied by the pairwise checks up to eps; keep
    # them explicit so the error names the party)
    ma = t.sum(axis=(4, 5))  # [x, y, z, a]
    if np.max(np.abs(ma - ma[:, :1, :1])) > eps:
        raise SignalingError("P(a|x) depends on y or z")
    mb = t.sum(axis=(3, 5))
    if np.max(np.abs(mb - mb[:1, :, :1])) > eps:
        raise SignalingError("P(b|y) depends on x or z")
    mc = t.sum(axis=(3, 4))
    if np.max(np.abs(mc - mc[:1, :1, :])) > eps:
        raise SignalingError("P(c|z) depends on x or y")
    return TripartiteBox(_freeze(t))


def _box3_exact(t: np.ndarray) -> TripartiteBox:
    return TripartiteBox(_freeze(t))


# ---------------------------------------------------------------------------
# expectation-vector bridge (26 coordinates)

@dataclass(frozen=True)
class TriExpectations:
    a: np.ndarray    # (2,)   <A_i>
    b: np.ndarray    # (2,)   <B_j>
    c: np.ndarray    # (2,)   <C_k>
    ab: np.ndarray   # (2,2)  <A_i B_j>
    ac: np.ndarray   # (2,2)  <A_i C_k>
    bc: np.ndarray   # (2,2)  <B_j C_k>
    abc: np.ndarray  # (2,2,2) <A_i B_j C_k>


_S1 = np.array([1.0, -1.0])
_S2 = np.einsum("a,b->ab", _S1, _S1)
_S3 = np.einsum("a,b,c->abc", _S1, _S1, _S1)


def expectations3(box: TripartiteBox) -> TriExpectations:
    t = box.table
    return TriExpectations(
        a=np.einsum("xyzabc,a->x", t, _S1) / 4.0,
        b=np.einsum("xyzabc,b->y", t, _S1) / 4.0,
        c=np.einsum("xyzabc,c->z", t, _S1) / 4.0,
        ab=np.einsum("xyzabc,ab->xy", t, _S2) / 2.0,
        ac=np.einsum("xyzabc,ac->xz", t, _S2) / 2.0,
        bc=np.einsum("xyzabc,bc->yz", t, _S2) / 2.0,
        abc=np.einsum("xyzabc,abc->xyz", t, _S3),
    )


def box3_from_expectations(e: TriExpectations, validate: bool = True):
    """Inverse of :func:`expectations3`; exact round trip for valid boxes."""
    t = np.empty((2,) * 6)
    for x, y, z, a, b, c in product(range(2), repeat=6):
        t[x, y, z, a, b, c] = (
            1.0
            + (-1.0) ** a * e.a[x] + (-1.0) ** b * e.b[y] + (-1.0) ** c * e.c[z]
            + (-1.0) ** (a ^ b) * e.ab[x, y]
            + (-1.0) ** (a ^ c) * e.ac[x, z]
            + (-1.0) ** (b ^ c) * e.bc[y, z]
            + (-1.0) ** (a ^ b ^ c) * e.abc[x, y, z]
        ) / 8.0
    if validate:
        return make_box3(t)
    return _box3_exact(t)


def zero_expectations() -> TriExpectations:
    return TriExpectations(np.zeros(2), np.zeros(2), np.zeros(2),
                           np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)),
                           np.zeros((2, 2, 2)))


# ---------------------------------------------------------------------------
# vertex catalog: Svetlichny-box polytope (128 vertices) + class-8 representative

TRI_VERTEX_KINDS = ("Sv", "Det3", "PrAB", "PrAC", "PrBC", "Mermin3",
                    "Class8Rep", "Noise3")


@dataclass(frozen=True)
class TriVertexId:
    kind: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in TRI_VERTEX_KINDS:
            raise ValueError(f"unknown tripartite vertex kind {self.kind!r}")

    def label(self) -> str:
        return self.kind + "".join(str(p) for p in self.params)


def sv_id(al, be, ga, ep) -> TriVertexId:
    return TriVertexId("Sv", (al, be, ga, ep))


def det3_id(al, be, ga, ep, ze, et) -> TriVertexId:
    return TriVertexId("Det3", (al, be, ga, ep, ze, et))


def pr2_id(pair: str, al, be, ga, ep) -> TriVertexId:
    return TriVertexId({"AB": "PrAB", "AC": "PrAC", "BC": "PrBC"}[pair],
                       (al, be, ga, ep))


def mermin3_id(al, be, ga, ep) -> TriVertexId:
    return TriVertexId("Mermin3", (al, be, ga, ep))


CLASS8_ID = TriVertexId("Class8Rep")
NOISE3_ID = TriVertexId("Noise3")


def sv_box(al: int, be: int, ga: int, ep: int) -> TripartiteBox:
    """Genuinely three-way nonlocal vertex: 1/4 on outcomes with
    a^b^c = xy ^ xz ^ yz ^ al*x ^ be*y ^ ga*z ^ ep."""
    t = np.zeros((2,) * 6)
    for x, y, z, a, b, c in product(range(2), repeat=6):
        par = (x & y) ^ (x & z) ^ (y & z) ^ (al & x) ^ (be & y) ^ (ga & z) ^ ep
        if a ^ b ^ c == par:
            t[x, y, z, a, b, c] = 0.25
    return _box3_exact(t)


def det3_box(al, be, ga, ep, ze, et) -> TripartiteBox:
    t = np.zeros((2,) * 6)
    for x, y, z in product(range(2), repeat=3):
        t[x, y, z, (al & x) ^ be, (ga & y) ^ ep, (ze & z) ^ et] = 1.0
    return _box3_exact(t)


def pr2_box(pair: str, al: int, be: int, ga: int, ep: int) -> TripartiteBox:
    """Bipartite PR box between two parties, third party answers o = ep * input."""
    t = np.zeros((2,) * 6)
    pr = boxcore.pr_box(al, be, ga).table
    for x, y, z, a, b, c in product(range(2), repeat=6):
        if pair == PAIR_AB:
            t[x, y, z, a, b, c] = pr[x, y, a, b] * (c == (ep & z))
        elif pair == PAIR_AC:
            t[x, y, z, a, b, c] = pr[x, z, a, c] * (b == (ep & y))
        elif pair == PAIR_BC:
            t[x, y, z, a, b, c] = pr[y, z, b, c] * (a == (ep & x))
        else:
            raise ValueError(f"unknown pair {pair!r}")
    return _box3_exact(t)


def noise3_box() -> TripartiteBox:
    return _box3_exact(np.full((2,) * 6, 1.0 / 8.0))


def _mermin3_coefficients(al: int, be: int, ga: int, ep: int) -> np.ndarray:
    """Coefficient of <A_i B_j C_k> in the (al,be,ga,ep) tripartite Mermin operator."""
    coef = np.zeros((2, 2, 2))
    if al ^ be ^ ga == 0:
        coef[0, 0, 1] = (-1.0) ** (ga ^ ep)
        coef[0, 1, 0] = (-1.0) ** (be ^ ep)
        coef[1, 0, 0] = (-1.0) ** (al ^ ep)
        coef[1, 1, 1] = (-1.0) ** (al ^ be ^ ga ^ ep ^ 1)
    else:
        coef[1, 1, 0] = (-1.0) ** (al ^ be ^ ep ^ 1)
        coef[1, 0, 1] = (-1.0) ** (al ^ ga ^ ep ^ 1)
        coef[0, 1, 1] = (-1.0) ** (be ^ ga ^ ep ^ 1)
        coef[0, 0, 0] = (-1.0) ** ep
    return coef


def mermin3_box(al: int, be: int, ga: int, ep: int) -> TripartiteBox:
    """Maximally three-way contextual vertex of the two-way local polytope.

    Even mixture of the Svetlichny boxes (al,be,ga,ep) and
    (1-al,1-be,1-ga,ep^al^be^ga); perfect three-party correlations on half the
    input triples, white-noise bipartite marginals.
    """
    partner = (al ^ 1, be ^ 1, ga ^ 1, ep ^ al ^ be ^ ga)
    t = 0.5 * (sv_box(al, be, ga, ep).table + sv_box(*partner).table)
    return _box3_exact(t)


def class8_box() -> TripartiteBox:
    """Representative of the three-way nonlocal class violating the 99-type
    facet to 5; built from its expectation list, everything unlisted is zero."""
    e = zero_expectations()
    e.ab[0, 0] = e.ab[0, 1] = 1.0
    e.ac[0, 0] = 1.0
    e.bc[0, 0] = e.bc[1, 0] = 1.0
    e.abc[1, 0, 1] = 1.0
    e.abc[1, 1, 1] = -1.0
    try:
        return box3_from_expectations(e)
    except BoxError as exc:  # guarded: the listed expectations are consistent
        raise InvalidVertexError(f"class-8 expansion failed: {exc}") from exc


def tri_vertex(vid: TriVertexId) -> TripartiteBox:
    if vid.kind == "Sv":
        return sv_box(*vid.params)
    if vid.kind == "Det3":
        return det3_box(*vid.params)
    if vid.kind in ("PrAB", "PrAC", "PrBC"):
        return pr2_box(vid.kind[2:], *vid.params)
    if vid.kind == "Mermin3":
        return mermin3_box(*vid.params)
    if vid.kind == "Class8Rep":
        return class8_box()
    return noise3_box()


def all_sv_ids() -> list[TriVertexId]:
    return [sv_id(*p) for p in product(range(2), repeat=4)]


def all_det3_ids() -> list[TriVertexId]:
    return [det3_id(*p) for p in product(range(2), repeat=6)]


def all_pr2_ids() -> list[TriVertexId]:
    return [pr2_id(pair, *p)
            for pair in (PAIR_AB, PAIR_AC, PAIR_BC)
            for p in product(range(2), repeat=4)]


def all_mermin3_ids() -> list[TriVertexId]:
    return [mermin3_id(*p) for p in product(range(2), repeat=4)]


def sv_polytope_ids() -> list[TriVertexId]:
    """The 128 vertices: 16 Svetlichny + 48 embedded PR + 64 deterministic."""
    return all_sv_ids() + all_pr2_ids() + all_det3_ids()


def two_way_local_ids() -> list[TriVertexId]:
    """The 112 vertices of the two-way local polytope."""
    return all_pr2_ids() + all_det3_ids()


def tri_vertex_matrix(vertex_ids: list[TriVertexId]) -> np.ndarray:
    return np.stack([tri_vertex(v).table.reshape(-1) for v in vertex_ids])


def parse_tri_vertex_label(label: str) -> TriVertexId:
    for kind in sorted(TRI_VERTEX_KINDS, key=len, reverse=True):
        if label.startswith(kind):
            digits = label[len(kind):]
            if digits == "" and kind in ("Class8Rep", "Noise3"):
                return TriVertexId(kind)
            return TriVertexId(kind, tuple(int(ch) for ch in digits))
    raise ValueError(f"cannot parse tripartite vertex label {label!r}")


# ---------------------------------------------------------------------------
# Svetlichny / tripartite-Mermin functions and discords

def sv_value(box: TripartiteBox, al: int, be: int, ga: int, ep: int) -> float:
    """Signed Svetlichny operator value; hybrid-local bound 4, maximum 8."""
    return float(sv_values(box)[al, be, ga, ep])


def sv_values(box: TripartiteBox) -> np.ndarray:
    """All 16 signed values, shape (2,2,2,2) indexed [al,be,ga,ep]."""
    e3 = expectations3(box).abc
    out = np.empty((2, 2, 2, 2))
    for al, be, ga in product(range(2), repeat=3):
        v = 0.0
        for i, j, k in product(range(2), repeat=3):
            sgn = (i & j) ^ (i & k) ^ (j & k) ^ (al & i) ^ (be & j) ^ (ga & k)
            v += (-1.0) ** sgn * e3[i, j, k]
        out[al, be, ga, 0] = v
        out[al, be, ga, 1] = -v
    return out


def sv_functions(box: TripartiteBox) -> np.ndarray:
    """The 8 Svetlichny moduli S[al,be,ga] in [0, 8]."""
    return np.abs(sv_values(box)[..., 0])


def mermin3_value(box: TripartiteBox, al: int, be: int, ga: int, ep: int) -> float:
    """Signed tripartite Mermin operator value; LHV bound 2, maximum 4."""
    e3 = expectations3(box).abc
    return float(np.sum(_mermin3_coefficients(al, be, ga, ep) * e3))


def mermin3_functions(box: TripartiteBox) -> np.ndarray:
    """The 8 Mermin moduli M[al,be,ga] in [0, 4]."""
    e3 = expectations3(box).abc
    out = np.empty((2, 2, 2))
    for al, be, ga in product(range(2), repeat=3):
        out[al, be, ga] = abs(np.sum(_mermin3_coefficients(al, be, ga, 0) * e3))
    return out


def discord_groupings() -> list[tuple]:
    """The nine nested-difference groupings over the 8 function labels.

    Labels are flattened as idx = 4*al + 2*be + ga. Each grouping picks an
    outer split bit (3 choices) and pairs the four labels inside each half
    either by one of the two remaining bits or diagonally (3 choices).
    Returned as ((pair, pair), (pair, pair)) per grouping.
    """
    groups = []
    for outer in range(3):
        halves = ([i for i in range(8) if not (i >> (2 - outer)) & 1],
                  [i for i in range(8) if (i >> (2 - outer)) & 1])
        rest = [u for u in range(3) if u != outer]
        masks = [1 << (2 - rest[0]), 1 << (2 - rest[1]),
                 (1 << (2 - rest[0])) | (1 << (2 - rest[1]))]
        for mask in masks:
            halved = []
            for half in halves:
                pairs, seen = [], set()
                for i in half:
                    j = i ^ mask
                    if i not in seen and j in half:
                        pairs.append((i, j))
                        seen.update((i, j))
                halved.append(tuple(pairs))
            groups.append(tuple(halved))
    return groups


_GROUPINGS = discord_groupings()


def _grouped_min(funcs8: np.ndarray, groupings=None) -> float:
    f = funcs8.reshape(8)
    best = np.inf
    for (p0, p1), (p2, p3) in (groupings or _GROUPINGS):
        v0 = abs(abs(f[p0[0]] - f[p0[1]]) - abs(f[p1[0]] - f[p1[1]]))
        v1 = abs(abs(f[p2[0]] - f[p2[1]]) - abs(f[p3[0]] - f[p3[1]]))
        best = min(best, abs(v0 - v1))
    return float(best)


def svetlichny_discord(box: TripartiteBox, groupings=None) -> float:
    """Irreducible Svetlichny-box content times 8, in [0, 8]."""
    return _grouped_min(sv_functions(box), groupings)


def mermin3_discord(box: TripartiteBox, groupings=None) -> float:
    """Irreducible tripartite-Mermin-box content times 4, in [0, 4]."""
    return _grouped_min(mermin3_functions(box), groupings)


def class99_value(box: TripartiteBox) -> float:
    """<A0B0> + <A0C0> + <B1C0> + <A1B0C1> - <A1B1C1>; two-way-local bound 3."""
    e = expectations3(box)
    return float(e.ab[0, 0] + e.ac[0, 0] + e.bc[1, 0]
                 + e.abc[1, 0, 1] - e.abc[1, 1, 1])


# ---------------------------------------------------------------------------
# marginals, totals, monogamy, paradox

def marginal2(box: TripartiteBox, pair: str) -> BipartiteBox:
    """Two-party box left after summing out the third party (NS makes the
    spectator input irrelevant; input 0 is used)."""
    t = box.table
    if pair == PAIR_AB:
        sub = t[:, :, 0].sum(axis=4)
    elif pair == PAIR_AC:
        sub = t[:, 0, :].sum(axis=3)
    elif pair == PAIR_BC:
        sub = t[0].sum(axis=2)
    else:
        raise ValueError(f"unknown pair {pair!r}")
    return boxcore.make_box(sub)


def total_correlation3(box: TripartiteBox) -> float:
    """min over the three bipartitions of the maximal Svetlichny-function gap
    between the box and the cut-factorized surrogate."""
    e = expectations3(box)
    s = sv_functions(box)
    cuts = (
        np.einsum("ij,k->ijk", e.ab, e.c),
        np.einsum("ik,j->ijk", e.ac, e.b),
        np.einsum("jk,i->ijk", e.bc, e.a),
    )
    best = np.inf
    for e3cut in cuts:
        scut = np.empty((2, 2, 2))
        for al, be, ga in product(range(2), repeat=3):
            v = 0.0
            for i, j, k in product(range(2), repeat=3):
                sgn = (i & j) ^ (i & k) ^ (j & k) ^ (al & i) ^ (be & j) ^ (ga & k)
                v += (-1.0) ** sgn * e3cut[i, j, k]
            scut[al, be, ga] = abs(v)
        best = min(best, float(np.max(np.abs(s - scut))))
    return best


@dataclass(frozen=True)
class CorrelationSplit3:
    total: float
    svetlichny: float
    mermin: float
    classical: float
    sign: int


def correlation_split3(box: TripartiteBox) -> CorrelationSplit3:
    t = total_correlation3(box)
    g = svetlichny_discord(box)
    q = mermin3_discord(box)
    diff = t - g - q
    return CorrelationSplit3(t, g, q, abs(diff), 1 if diff >= 0 else -1)


def classical_correlation3(box: TripartiteBox) -> float:
    return correlation_split3(box).classical


@dataclass(frozen=True)
class MonogamyReport3:
    sv_pair_margin: float          # min over pairs of 8 - (S_i + S_j)
    discord_margin: float          # 8 - (G + 2Q)
    marginal_bell_margins: dict    # shared party -> 4 - (G_ij + G_ik)
    marginal_mermin_margins: dict  # shared party -> 2 - (Q_ij + Q_ik)
    holds: bool                    # sv pair + discord margins only
    marginal_holds: bool           # quantum-only expectation


def monogamy_checks3(box: TripartiteBox, eps: float = EPS_VALID) -> MonogamyReport3:
    """Trade-off margins; the marginal-discord relations hold for quantum
    boxes (their proofs use monogamy of entanglement) and are reported, not
    folded into ``holds``."""
    s = sv_functions(box).reshape(8)
    sv_margin = min(8.0 - (s[i] + s[j]) for i, j in combinations(range(8), 2))
    gq_margin = 8.0 - (svetlichny_discord(box) + 2.0 * mermin3_discord(box))
    marg = {p: marginal2(box, p) for p in (PAIR_AB, PAIR_AC, PAIR_BC)}
    g = {p: discord2.bell_discord(b) for p, b in marg.items()}
    q = {p: discord2.mermin_discord(b) for p, b in marg.items()}
    shared = {"A": (PAIR_AB, PAIR_AC), "B": (PAIR_AB, PAIR_BC),
              "C": (PAIR_AC, PAIR_BC)}
    bell_margins = {p: 4.0 - (g[i] + g[j]) for p, (i, j) in shared.items()}
    mermin_margins = {p: 2.0 - (q[i] + q[j]) for p, (i, j) in shared.items()}
    return MonogamyReport3(
        sv_pair_margin=float(sv_margin),
        discord_margin=float(gq_margin),
        marginal_bell_margins=bell_margins,
        marginal_mermin_margins=mermin_margins,
        holds=bool(sv_margin >= -eps and gq_margin >= -eps),
        marginal_holds=bool(min(bell_margins.values()) >= -eps
                            and min(mermin_margins.values()) >= -eps),
    )


def ghz_paradox_check(box: TripartiteBox, eps: float = EPS_VALID) -> bool:
    """True iff <A0B0C0> = +1 and <A0B1C1> = <A1B0C1> = <A1B1C0> = -1."""
    e3 = expectations3(box).abc
    return bool(
        abs(e3[0, 0, 0] - 1.0) <= eps
        and abs(e3[0, 1, 1] + 1.0) <= eps
        and abs(e3[1, 0, 1] + 1.0) <= eps
        and abs(e3[1, 1, 0] + 1.0) <= eps
    )


# ---------------------------------------------------------------------------
# canonical 3-decomposition inside the Svetlichny-box polytope

_SV_POLY_MATRIX: np.ndarray | None = None


def _sv_poly_matrix() -> np.ndarray:
    global _SV_POLY_MATRIX
    if _SV_POLY_MATRIX is None:
        _SV_POLY_MATRIX = tri_vertex_matrix(sv_polytope_ids())
    return _SV_POLY_MATRIX


def in_sv_polytope(box: TripartiteBox) -> bool:
    return polytope.lp_vertex_weights(box.table.reshape(-1),
                                      _sv_poly_matrix()) is not None


def _argmax_sv_id(box: TripartiteBox) -> TriVertexId:
    vals = sv_values(box)
    best = max(product(range(2), repeat=4),
               key=lambda p: vals[p] - 1e-12 * int("".join(map(str, p)), 2))
    return sv_id(*best)


def _mermin3_candidates(svid: TriVertexId, box: TripartiteBox) -> list[TriVertexId]:
    """Both Mermin boxes canonical to the Svetlichny label, best match first."""
    al, be, ga, ep = svid.params
    par = al ^ be ^ ga
    ids = [mermin3_id(al, be, ga, ep),
           mermin3_id(al ^ 1, be ^ 1, ga ^ 1, ep ^ par ^ 1)]
    m_box = mermin3_functions(box)
    scored = []
    for mid in ids:
        m_cand = mermin3_functions(tri_vertex(mid))
        idx = np.unravel_index(np.argmax(m_cand), m_cand.shape)
        scored.append((float(m_box[idx]), mid))
    scored.sort(key=lambda t: -t[0])
    return [mid for _, mid in scored]


def _three_decomposition3_direct(box: TripartiteBox,
                                 tol: float) -> DecompositionResult | None:
    mu = svetlichny_discord(box) / 8.0
    nu = mermin3_discord(box) / 4.0
    svid = _argmax_sv_id(box)
    sv = tri_vertex(svid)
    rest = 1.0 - mu - nu
    for mid in _mermin3_candidates(svid, box):
        mm = tri_vertex(mid)
        if rest <= EPS_VALID:
            recon = mu * sv.table + nu * mm.table
            if np.max(np.abs(recon - box.table)) <= EPS_LP:
                return DecompositionResult(mu=mu, nu=nu, pr_id=svid,
                                           mermin_id=mid, residual=noise3_box())
            continue
        try:
            res = make_box3((box.table - mu * sv.table - nu * mm.table) / rest)
        except BoxError:
            continue
        if svetlichny_discord(res) <= tol and mermin3_discord(res) <= tol:
            return DecompositionResult(mu=mu, nu=nu, pr_id=svid, mermin_id=mid,
                                       residual=res)
    return None


def three_decomposition3(box: TripartiteBox,
                         tol: float = polytope.DISCORD_TOL) -> DecompositionResult:
    """Split a Svetlichny-polytope box into Svetlichny box, tripartite Mermin
    box and a residual with both discords zero.

    mu = svetlichny_discord/8, nu = mermin3_discord/4. Boxes outside the
    128-vertex polytope are rejected. A relabeling-frame search over the 3072
    group elements runs before raising ResidualInvalidError.
    """
    if not in_sv_polytope(box):
        raise NotInPolytopeError("box is outside the Svetlichny-box polytope")
    direct = _three_decomposition3_direct(box, tol)
    if direct is not None:
        return direct
    for g in _screened_frames(box, tol):
        moved = apply_lro3(box, g)
        result = _three_decomposition3_direct(moved, tol)
        if result is None:
            continue
        ginv = invert_lro3(g)
        svb = apply_lro3(tri_vertex(result.pr_id), ginv)
        mmb = apply_lro3(tri_vertex(result.mermin_id), ginv)
        return DecompositionResult(
            mu=result.mu,
            nu=result.nu,
            pr_id=_match_tri_catalog(svb, all_sv_ids()),
            mermin_id=_match_tri_catalog(mmb, all_mermin3_ids()),
            residual=apply_lro3(result.residual, ginv),
        )
    raise ResidualInvalidError("no frame yields a valid double-zero residual")


_FRAME_CACHE: tuple | None = None


def _frame_tables():
    """All 3072 group elements with their flattened-index permutations."""
    global _FRAME_CACHE
    if _FRAME_CACHE is None:
        frames = list(_lro3_search_group())
        perms = np.stack([lro3_index_permutation(g) for g in frames])
        _FRAME_CACHE = (frames, perms)
    return _FRAME_CACHE


def _screened_frames(box: TripartiteBox, tol: float):
    """Frames whose argmax components leave a valid double-zero residual.

    Affine combinations of nonsignaling boxes stay nonsignaling and
    normalized, so the screen reduces to entrywise nonnegativity plus the
    vectorized discord checks; survivors (usually none or a handful) then go
    through the exact per-frame path.
    """
    frames, perms = _frame_tables()
    moved = box.table.reshape(-1)[perms]               # (n_frames, 64)
    mu = svetlichny_discord(box) / 8.0                 # invariant across frames
    nu = mermin3_discord(box) / 4.0
    rest = 1.0 - mu - nu
    sv_tables = np.stack([tri_vertex(v).table.reshape(-1) for v in all_sv_ids()])
    signed = moved @ _sv_sign_matrix().T               # (n_frames, 16)
    tie = np.arange(16) * 1e-12
    sel = np.argmax(signed - tie, axis=1)
    hits = np.zeros(len(frames), dtype=bool)
    for cand_idx in range(2):
        labels = [_mermin3_partner_label(i, cand_idx) for i in range(16)]
        mm_tables = np.stack([tri_vertex(mermin3_id(*lbl)).table.reshape(-1)
                              for lbl in labels])
        num = moved - mu * sv_tables[sel] - nu * mm_tables[sel]
        if rest > EPS_VALID:
            good = num.min(axis=1) >= -EPS_VALID * rest
            resid = num[good] / rest
            g, q = _batched_discords(resid)
            good[np.flatnonzero(good)] = (g <= tol) & (q <= tol)
            hits |= good
        else:
            hits |= np.abs(num).max(axis=1) <= EPS_LP
    return [frames[i] for i in np.flatnonzero(hits)]


def _batched_discords(flat_tables: np.ndarray):
    """Vectorized (svetlichny, mermin) discords for stacked flat tables."""
    e3 = flat_tables @ _e3_matrix().T                  # (n, 8)
    s = np.abs(e3 @ _sv_e3_signs().T)
    m = np.abs(e3 @ _m3_e3_coefs().T)
    return _grouped_min_batch(s), _grouped_min_batch(m)


def _grouped_min_batch(funcs: np.ndarray) -> np.ndarray:
    best = np.full(funcs.shape[0], np.inf)
    for (p0, p1), (p2, p3) in _GROUPINGS:
        v0 = np.abs(np.abs(funcs[:, p0[0]] - funcs[:, p0[1]])
                    - np.abs(funcs[:, p1[0]] - funcs[:, p1[1]]))
        v1 = np.abs(np.abs(funcs[:, p2[0]] - funcs[:, p2[1]])
                    - np.abs(funcs[:, p3[0]] - funcs[:, p3[1]]))
        best = np.minimum(best, np.abs(v0 - v1))
    return best


_E3_MATRIX: np.ndarray | None = None
_SV_E3_SIGNS: np.ndarray | None = None
_M3_E3_COEFS: np.ndarray | None = None


def _e3_matrix() -> np.ndarray:
    """(8, 64) map from a flat table to the three-party expectations."""
    global _E3_MATRIX
    if _E3_MATRIX is None:
        rows = np.zeros((8, 64))
        for r, (i, j, k) in enumerate(product(range(2), repeat=3)):
            for a, b, c in product(range(2), repeat=3):
                flat = ((((i * 2 + j) * 2 + k) * 2 + a) * 2 + b) * 2 + c
                rows[r, flat] = (-1.0) ** (a ^ b ^ c)
        _E3_MATRIX = rows
    return _E3_MATRIX


def _sv_e3_signs() -> np.ndarray:
    global _SV_E3_SIGNS
    if _SV_E3_SIGNS is None:
        rows = np.empty((8, 8))
        for r, (al, be, ga) in enumerate(product(range(2), repeat=3)):
            for col, (i, j, k) in enumerate(product(range(2), repeat=3)):
                sgn = ((i & j) ^ (i & k) ^ (j & k)
                       ^ (al & i) ^ (be & j) ^ (ga & k))
                rows[r, col] = (-1.0) ** sgn
        _SV_E3_SIGNS = rows
    return _SV_E3_SIGNS


def _m3_e3_coefs() -> np.ndarray:
    global _M3_E3_COEFS
    if _M3_E3_COEFS is None:
        rows = np.empty((8, 8))
        for r, (al, be, ga) in enumerate(product(range(2), repeat=3)):
            rows[r] = _mermin3_coefficients(al, be, ga, 0).reshape(-1)
        _M3_E3_COEFS = rows
    return _M3_E3_COEFS


_SV_SIGN_MATRIX: np.ndarray | None = None


def _sv_sign_matrix() -> np.ndarray:
    """Rows map a flattened table to the 16 signed Svetlichny values."""
    global _SV_SIGN_MATRIX
    if _SV_SIGN_MATRIX is None:
        rows = np.empty((16, 64))
        for r, (al, be, ga, ep) in enumerate(product(range(2), repeat=4)):
            row = np.empty((2,) * 6)
            for x, y, z, a, b, c in product(range(2), repeat=6):
                sgn = ((x & y) ^ (x & z) ^ (y & z)
                       ^ (al & x) ^ (be & y) ^ (ga & z) ^ ep ^ a ^ b ^ c)
                row[x, y, z, a, b, c] = (-1.0) ** sgn
            rows[r] = row.reshape(-1)
        _SV_SIGN_MATRIX = rows
    return _SV_SIGN_MATRIX


def _mermin3_partner_label(sv_index: int, cand_idx: int) -> tuple[int, int, int, int]:
    al, be, ga, ep = ((sv_index >> 3) & 1, (sv_index >> 2) & 1,
                      (sv_index >> 1) & 1, sv_index & 1)
    if cand_idx == 0:
        return (al, be, ga, ep)
    par = al ^ be ^ ga
    return (al ^ 1, be ^ 1, ga ^ 1, ep ^ par ^ 1)


def _match_tri_catalog(box: TripartiteBox, ids) -> TriVertexId | None:
    for vid in ids:
        if box.allclose(tri_vertex(vid), tol=EPS_LP):
            return vid
    return None


# ---------------------------------------------------------------------------
# tripartite local reversible operations

@dataclass(frozen=True)
class Lro3:
    """Party permutation followed by per-party input/output relabels."""

    perm: tuple[int, int, int] = (0, 1, 2)
    relabels: tuple[PartyRelabel, PartyRelabel, PartyRelabel] = (
        boxcore.IDENTITY_RELABEL,) * 3


def apply_lro3(box: TripartiteBox, g: Lro3) -> TripartiteBox:
    t = box.table
    p = g.perm
    t = t.transpose(p[0], p[1], p[2], 3 + p[0], 3 + p[1], 3 + p[2])
    out = np.empty((2,) * 6)
    r = g.relabels
    for x, y, z, a, b, c in product(range(2), repeat=6):
        out[x, y, z, a, b, c] = t[
            x ^ r[0].input_flip, y ^ r[1].input_flip, z ^ r[2].input_flip,
            a ^ (r[0].out_by_input & x) ^ r[0].out_const,
            b ^ (r[1].out_by_input & y) ^ r[1].out_const,
            c ^ (r[2].out_by_input & z) ^ r[2].out_const,
        ]
    return _box3_exact(out)


def lro3_index_permutation(g: Lro3) -> np.ndarray:
    """Index map: apply_lro3(box, g).table.ravel() == table.ravel()[perm]."""
    inv_perm = [0, 0, 0]
    for k, pk in enumerate(g.perm):
        inv_perm[pk] = k
    perm = np.empty(64, dtype=np.intp)
    r = g.relabels
    for x, y, z, a, b, c in product(range(2), repeat=6):
        ins = (x ^ r[0].input_flip, y ^ r[1].input_flip, z ^ r[2].input_flip)
        outs = (a ^ (r[0].out_by_input & x) ^ r[0].out_const,
                b ^ (r[1].out_by_input & y) ^ r[1].out_const,
                c ^ (r[2].out_by_input & z) ^ r[2].out_const)
        src = (ins[inv_perm[0]], ins[inv_perm[1]], ins[inv_perm[2]],
               outs[inv_perm[0]], outs[inv_perm[1]], outs[inv_perm[2]])
        dst_flat = ((((x * 2 + y) * 2 + z) * 2 + a) * 2 + b) * 2 + c
        src_flat = ((((src[0] * 2 + src[1]) * 2 + src[2]) * 2
                     + src[3]) * 2 + src[4]) * 2 + src[5]
        perm[dst_flat] = src_flat
    return perm


def invert_lro3(g: Lro3) -> Lro3:
    inv_perm = [0, 0, 0]
    for i, pi in enumerate(g.perm):
        inv_perm[pi] = i
    inv_rel = [boxcore._invert_relabel(r) for r in g.relabels]
    # relabels ride on the permuted slots; undo in the original slots
    reordered = tuple(inv_rel[inv_perm[i]] for i in range(3))
    return Lro3(perm=tuple(inv_perm), relabels=reordered)


def _lro3_search_group():
    """Relabel-only frames first (they preserve party roles), then permutations."""
    rels = boxcore.party_relabels()
    for perm in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]:
        for ra in rels:
            for rb in rels:
                for rc in rels:
                    yield Lro3(perm=perm, relabels=(ra, rb, rc))


def lro3_samples(rng: np.random.Generator, n: int) -> list[Lro3]:
    """n random group elements for sampled invariance tests."""
    rels = boxcore.party_relabels()
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    out = []
    for _ in range(n):
        out.append(Lro3(
            perm=perms[rng.integers(len(perms))],
            relabels=tuple(rels[rng.integers(8)] for _ in range(3)),
        ))
    return out


def random_sv_polytope_box(rng: np.random.Generator) -> TripartiteBox:
    """Random mixture of the 128 polytope vertices (flat Dirichlet weights)."""
    m = _sv_poly_matrix()
    w = rng.exponential(size=m.shape[0])
    w /= w.sum()
    return make_box3((w @ m).reshape((2,) * 6))


# ---------------------------------------------------------------------------
# JSON interchange

def box3_to_json(box: TripartiteBox) -> str:
    return json.dumps({"parties": 3, "table": box.table.tolist()})


def box3_from_json(text: str) -> TripartiteBox:
    data = json.loads(text)
    if data.get("parties") != 3:
        raise BoxError(f"expected parties=3, got {data.get('parties')}")
    return make_box3(data["table"])
