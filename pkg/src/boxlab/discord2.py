"""Bipartite correlation measures: Bell/Mermin functions, discords, totals, monogamy.

All measures depend on the box only through its joint and marginal
expectations, so each has an array-level core operating on ``(..., 2, 2)``
stacks of joint expectations; batch sweeps use the cores directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .boxcore import (
    EPS_VALID,
    BipartiteBox,
    joint_expectations,
    marginal_expectations,
)

SQRT2 = float(np.sqrt(2.0))
STEERING_BOUND = SQRT2
CHSH_LOCAL_BOUND = 2.0

# the three ways to split four function labels (00,01,10,11) into two pairs
_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def chsh_value(box: BipartiteBox, alpha: int, beta: int, gamma: int) -> float:
    """Signed Bell-CHSH operator value; local bound 2, algebraic maximum 4."""
    return float(chsh_values(box)[alpha, beta, gamma])


def chsh_values(box: BipartiteBox) -> np.ndarray:
    """All 8 signed CHSH values, shape (2, 2, 2) indexed [alpha, beta, gamma]."""
    return chsh_values_from_expectations(joint_expectations(box))


def chsh_values_from_expectations(e: np.ndarray) -> np.ndarray:
    e = np.asarray(e)
    out = np.empty(e.shape[:-2] + (2, 2, 2))
    for al, be, ga in product(range(2), repeat=3):
        out[..., al, be, ga] = (
            (-1.0) ** ga * e[..., 0, 0]
            + (-1.0) ** (be ^ ga) * e[..., 0, 1]
            + (-1.0) ** (al ^ ga) * e[..., 1, 0]
            + (-1.0) ** (al ^ be ^ ga ^ 1) * e[..., 1, 1]
        )
    return out


def bell_functions(box: BipartiteBox) -> np.ndarray:
    """The four CHSH moduli B[alpha, beta] = |B_{alpha beta gamma}|, shape (2, 2)."""
    return bell_functions_from_expectations(joint_expectations(box))


def bell_functions_from_expectations(e: np.ndarray) -> np.ndarray:
    return np.abs(chsh_values_from_expectations(e)[..., 0])


def mermin_value(box: BipartiteBox, alpha: int, beta: int, gamma: int) -> float:
    """Signed Mermin operator value; local/steering structure bound sqrt(2)."""
    e = joint_expectations(box)
    sg = (-1.0) ** gamma
    if (alpha, beta) == (0, 0):
        return float(sg * (e[0, 0] - e[1, 1]))
    if (alpha, beta) == (0, 1):
        return float(sg * (e[1, 0] - e[0, 1]))
    if (alpha, beta) == (1, 0):
        return float(sg * (e[0, 0] + e[1, 1]))
    return float(-(e[0, 1] + e[1, 0]))


def mermin_functions(box: BipartiteBox) -> np.ndarray:
    """The four Mermin moduli M[alpha, beta], shape (2, 2).

    M[0,0]=|<A0B0>-<A1B1>|, M[0,1]=|<A0B1>-<A1B0>|,
    M[1,0]=|<A0B0>+<A1B1>|, M[1,1]=|<A0B1>+<A1B0>|.
    """
    return mermin_functions_from_expectations(joint_expectations(box))


def mermin_functions_from_expectations(e: np.ndarray) -> np.ndarray:
    e = np.asarray(e)
    out = np.empty(e.shape[:-2] + (2, 2))
    out[..., 0, 0] = np.abs(e[..., 0, 0] - e[..., 1, 1])
    out[..., 0, 1] = np.abs(e[..., 0, 1] - e[..., 1, 0])
    out[..., 1, 0] = np.abs(e[..., 0, 0] + e[..., 1, 1])
    out[..., 1, 1] = np.abs(e[..., 0, 1] + e[..., 1, 0])
    return out


def pairing_min(funcs: np.ndarray) -> np.ndarray:
    """min over the 3 pairings of || |f_i-f_j| - |f_k-f_l| ||, last axis of size 4."""
    f = np.asarray(funcs)
    vals = [
        np.abs(np.abs(f[..., i] - f[..., j]) - np.abs(f[..., k] - f[..., l]))
        for (i, j), (k, l) in _PAIRINGS
    ]
    return np.minimum.reduce(vals)


def bell_discord(box: BipartiteBox) -> float:
    """Irreducible PR-box content times 4; 0 for every deterministic box."""
    return float(bell_discord_from_expectations(joint_expectations(box)))


def bell_discord_from_expectations(e: np.ndarray) -> np.ndarray:
    b = bell_functions_from_expectations(e)
    return pairing_min(b.reshape(b.shape[:-2] + (4,)))


def mermin_discord(box: BipartiteBox) -> float:
    """Irreducible Mermin-box content times 2; 0 for PR and deterministic boxes."""
    return float(mermin_discord_from_expectations(joint_expectations(box)))


def mermin_discord_from_expectations(e: np.ndarray) -> np.ndarray:
    m = mermin_functions_from_expectations(e)
    return pairing_min(m.reshape(m.shape[:-2] + (4,)))


def total_correlation(box: BipartiteBox) -> float:
    """Distance of the box from the product of its own marginals.

    max over (alpha, beta) of |B_{ab} - B^prod_{ab}|, where B^prod is the
    Bell function of the product box built from the single-party expectations.
    """
    e = joint_expectations(box)
    ea, eb = marginal_expectations(box)
    e_prod = np.outer(ea, eb)
    b = bell_functions_from_expectations(e)
    b_prod = bell_functions_from_expectations(e_prod)
    return float(np.max(np.abs(b - b_prod)))


@dataclass(frozen=True)
class CorrelationSplit:
    """Additivity bookkeeping T = G + Q +/- C."""

    total: float
    bell: float
    mermin: float
    classical: float
    sign: int  # +1 if T >= G + Q, else -1

    @property
    def residual(self) -> float:
        return self.total - self.bell - self.mermin - self.sign * self.classical


def correlation_split(box: BipartiteBox) -> CorrelationSplit:
    t = total_correlation(box)
    g = bell_discord(box)
    q = mermin_discord(box)
    diff = t - g - q
    return CorrelationSplit(t, g, q, abs(diff), 1 if diff >= 0 else -1)


def classical_correlation(box: BipartiteBox) -> float:
    """|T - G - Q|; the sign convention lives in correlation_split."""
    return correlation_split(box).classical


def steering_flags(box: BipartiteBox) -> np.ndarray:
    """Per-operator flags M[alpha, beta] > sqrt(2), shape (2, 2) bool."""
    return mermin_functions(box) > STEERING_BOUND


def steering_value(box: BipartiteBox) -> float:
    """Largest Mermin-operator modulus, to compare against the sqrt(2) bound."""
    return float(np.max(mermin_functions(box)))


def is_epr_steerable(box: BipartiteBox) -> bool:
    """Steerable means some Mermin operator exceeds sqrt(2) *and* Q > 0.

    The second condition excludes classically correlated boxes, which reach
    Mermin value 2 without any irreducible Mermin-box component.
    """
    return bool(steering_flags(box).any()) and mermin_discord(box) > EPS_VALID


@dataclass(frozen=True)
class MonogamyReport:
    """Trade-off margins for one box; all margins >= -eps when the box is valid."""

    bell_pair_margin: float     # min over pairs of 4 - (B_i + B_j)
    worst_bell_pair: tuple[tuple[int, int], tuple[int, int]]
    discord_margin: float       # 4 - (G + 2 Q)
    holds: bool


def monogamy_checks(box: BipartiteBox, eps: float = EPS_VALID) -> MonogamyReport:
    """Check B_i + B_j <= 4 for every pair of Bell functions and G + 2Q <= 4."""
    b = bell_functions(box)
    labels = [(al, be) for al, be in product(range(2), repeat=2)]
    worst_pair = (labels[0], labels[1])
    pair_margin = np.inf
    for (i, li), (j, lj) in combinations(enumerate(labels), 2):
        margin = 4.0 - (b[li] + b[lj])
        if margin < pair_margin:
            pair_margin, worst_pair = margin, (li, lj)
    gq_margin = 4.0 - (bell_discord(box) + 2.0 * mermin_discord(box))
    return MonogamyReport(
        bell_pair_margin=float(pair_margin),
        worst_bell_pair=worst_pair,
        discord_margin=float(gq_margin),
        holds=bool(pair_margin >= -eps and gq_margin >= -eps),
    )
