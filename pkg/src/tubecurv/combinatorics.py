"""Refined combinatorial formula for the series coefficients Upsilon_ir.

The brute-force coefficient sums over all i-tuples of letter indices.  Here
the same coefficient is assembled from patterns: a non-vanishing word with
``a`` zero letters is a cyclic sequence of ``c`` blocks (a letter A_s, s >= 2,
or a chain A_s A_1^k A_s' ... glued by ones) with the zeros grouped into
``b`` separated runs.  Counting how many tuples collapse onto one pattern
gives the weights ``theta`` and ``theta_bar``.

The pattern sums ``omega`` and ``omega_bar`` enumerate collapsed linear words
(every zero run shrunk to one zero): ``omega`` collects those whose ends are
nonzero letters, ``omega_bar`` those that end with the zero.  With the weights
above, the refined sum reproduces the tuple count exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .trace_algebra import (
    BlockTracePolynomial,
    TracePolynomial,
    block_expand,
    reduce_word,
    series_trace_power,
    weak_compositions,
)

__all__ = [
    "Composition",
    "ThetaTable",
    "BlockPattern",
    "enumerate_compositions",
    "theta",
    "theta_bar",
    "iterated_theta_identity_check",
    "count_zero_distributions",
    "admissible_separations",
    "max_blocks",
    "omega",
    "omega_bar",
    "upsilon_refined",
    "upsilon",
    "upsilon_shift_formula",
    "phi",
    "psi",
    "closed_form_phi_psi",
    "phi_psi_block",
]


@dataclass(frozen=True)
class Composition:
    sigma: tuple[int, ...]
    i: int
    r: int

    def __post_init__(self):
        if any(s < 0 for s in self.sigma):
            raise ValueError("negative multiplicity")
        if sum(self.sigma) != self.i or sum(s * k for s, k in enumerate(self.sigma)) != self.r:
            raise ValueError(f"{self.sigma} is not a composition for (i={self.i}, r={self.r})")


def enumerate_compositions(i: int, r: int) -> list[Composition]:
    """All (sigma_0..sigma_r) with sum sigma_s = i and sum s*sigma_s = r."""
    if i < 1 or r < 0:
        raise ValueError("need i >= 1 and r >= 0")
    out = []

    def rec(s, left_i, left_r, acc):
        if s == 0:
            if left_r == 0:
                out.append(Composition(tuple([left_i] + acc), i, r))
            return
        for k in range(min(left_i, left_r // s) + 1):
            rec(s - 1, left_i - k, left_r - k * s, [k] + acc)

    if r == 0:
        return [Composition((i,), i, 0)]
    rec(r, i, r, [])
    return out


# ---------------------------------------------------------------------------
# Theta weights


@lru_cache(maxsize=None)
def theta(a: int, b: int) -> int:
    if b < 0 or a < b:
        return 0
    if a == 0:
        return 1  # b == 0 here
    if b == 0:
        return 0
    if b == 1:
        return 1
    return theta(a - 1, b) + theta(a - 1, b - 1)


@lru_cache(maxsize=None)
def theta_bar(a: int, b: int) -> int:
    if b < 0 or a < b:
        return 0
    if a == 0:
        return 1
    if b == 0:
        return 1
    if b == 1:
        return a + 1
    return theta_bar(a - 1, b) + theta_bar(a - 1, b - 1)


class ThetaTable:
    """Read-only table of theta and theta_bar on 0 <= a <= a_max, 0 <= b <= b_max."""

    def __init__(self, a_max: int, b_max: int | None = None):
        b_max = a_max if b_max is None else b_max
        self.a_max, self.b_max = a_max, b_max
        self._theta = {(a, b): theta(a, b) for a in range(a_max + 1) for b in range(b_max + 1)}
        self._bar = {(a, b): theta_bar(a, b) for a in range(a_max + 1) for b in range(b_max + 1)}

    def theta(self, a, b):
        return self._theta.get((a, b), theta(a, b))

    def theta_bar(self, a, b):
        return self._bar.get((a, b), theta_bar(a, b))

    def recurrence_holds(self) -> bool:
        for a in range(1, self.a_max):
            for b in range(1, self.b_max + 1):
                for f in (self.theta, self.theta_bar):
                    if f(a + 1, b) - f(a, b) != f(a, b - 1):
                        return False
        return True


def iterated_theta_identity_check(a: int, b: int, e: int) -> bool:
    """Alternating binomial sum of theta(a+j, b) against (-1)^e theta(a, b-e), both weights."""
    if min(a, b, e) < 0:
        raise ValueError("a, b, e must be non-negative")
    for f in (theta, theta_bar):
        lhs = sum((-1) ** j * comb(e, j) * f(a + j, b) for j in range(e + 1))
        if lhs != (-1) ** e * f(a, b - e):
            return False
    return True


@dataclass(frozen=True)
class BlockPattern:
    """Positions of the separated zero runs among ``c`` blocks.

    ``mu`` lists the blocks after which a zero run sits.  ``closed`` marks
    patterns whose last run sits after block ``c`` and so straddles the seam.
    """

    c: int
    b: int
    mu: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.b <= self.c or len(self.mu) != self.b:
            raise ValueError("need 1 <= b <= c and len(mu) == b")
        if list(self.mu) != sorted(set(self.mu)) or self.mu[0] < 1 or self.mu[-1] > self.c:
            raise ValueError(f"mu={self.mu} is not increasing within 1..{self.c}")

    @property
    def closed(self) -> bool:
        return self.mu[-1] == self.c

    @classmethod
    def all(cls, c: int, b: int, closed: bool):
        if closed:
            for head in itertools.combinations(range(1, c), b - 1):
                yield cls(c, b, head + (c,))
        else:
            for mu in itertools.combinations(range(1, c), b):
                yield cls(c, b, mu)


def count_zero_distributions(a: int, pattern: BlockPattern) -> int:
    """Number of run-length vectors (lambda_0..lambda_c) realising ``pattern`` with a zeros.

    Counted directly, independently of the recurrence.
    """
    c, mu = pattern.c, pattern.mu
    count = 0
    for lam in weak_compositions(a, c + 1):
        if pattern.closed:
            inner = [lam[s] for s in mu[:-1]]
            if lam[0] + lam[c] < 1 or any(x < 1 for x in inner):
                continue
            if lam[0] + lam[c] + sum(inner) != a:
                continue
        else:
            inner = [lam[s] for s in mu]
            if any(x < 1 for x in inner) or sum(inner) != a:
                continue
        count += 1
    return count


# ---------------------------------------------------------------------------
# admissible zero counts and pattern sums


def max_blocks(i: int, r: int) -> int:
    return min(i - 1, r // 2)


def admissible_separations(i: int, r: int, c: int) -> list[int]:
    """Zero counts a for which words with c blocks exist (sorted)."""
    if i < 2 or r < 2:
        raise ValueError("need i >= 2 and r >= 2")
    if not 1 <= c <= max_blocks(i, r):
        raise ValueError(f"c={c} outside 1..{max_blocks(i, r)}")
    if i == 2:
        return [1]
    if r <= 2 * c + 2:
        return [i - c]
    low = max(1, i - r + c + 1)
    return sorted(set(range(low, i - c - 1)) | {i - c})


def _positive_compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cut in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cut + (total,)
        yield tuple(bounds[k + 1] - bounds[k] for k in range(parts))


def _block_count(word) -> int:
    """Blocks of a cyclic word with at least one zero: letters >= 2 minus runs of ones."""
    big = sum(1 for s in word if s >= 2)
    k = len(word)
    runs = sum(1 for j in range(k) if word[j] == 1 and word[j - 1] != 1)
    return big - runs


@lru_cache(maxsize=None)
def _collapsed_words(letters: int, r: int, b: int, closed: bool) -> tuple:
    """Collapsed linear words with b single zeros and ``letters`` nonzero letters of degree r.

    Returns (word, block count) pairs.  Open words have nonzero letters at both
    ends; closed words end with the zero that stands for the seam run.
    """
    out = []
    for core in _positive_compositions(r, letters):
        gaps = [j for j in range(1, letters) if core[j - 1] >= 2 and core[j] >= 2]
        if closed:
            if core[0] < 2 or core[-1] < 2:
                continue
            choices = itertools.combinations(gaps, b - 1)
        else:
            choices = itertools.combinations(gaps, b)
        for cuts in choices:
            word = []
            for j, s in enumerate(core):
                if j in cuts:
                    word.append(0)
                word.append(s)
            if closed:
                word.append(0)
            out.append((tuple(word), _block_count(word)))
    return tuple(out)


def _pattern_sum(i, r, c, a, b, closed) -> TracePolynomial:
    if i < 2 or r < 2 or not 1 <= c <= max_blocks(i, r):
        return TracePolynomial()
    if a not in admissible_separations(i, r, c) or not 1 <= b <= c:
        return TracePolynomial()
    acc: dict = {}
    for word, blocks in _collapsed_words(i - a, r, b, closed):
        if blocks != c:
            continue
        mon = reduce_word(word)
        acc[mon] = acc.get(mon, 0) + 1
    return TracePolynomial(acc)


def omega(i: int, r: int, c: int, a: int, b: int) -> TracePolynomial:
    return _pattern_sum(i, r, c, a, b, closed=False)


def omega_bar(i: int, r: int, c: int, a: int, b: int) -> TracePolynomial:
    return _pattern_sum(i, r, c, a, b, closed=True)


def _zero_free_sum(i, r) -> TracePolynomial:
    acc: dict = {}
    for core in _positive_compositions(r, i):
        mon = reduce_word(core)
        acc[mon] = acc.get(mon, 0) + 1
    return TracePolynomial(acc)


@lru_cache(maxsize=None)
def upsilon_refined(i: int, r: int) -> TracePolynomial:
    """Upsilon_ir from the pattern decomposition, for i >= 2 and r >= 2."""
    if i < 2 or r < 2:
        raise ValueError("the refined formula needs i >= 2 and r >= 2; use upsilon()")
    total = _zero_free_sum(i, r)
    for c in range(1, max_blocks(i, r) + 1):
        for a in admissible_separations(i, r, c):
            sign = (-1) ** a
            for b in range(1, c + 1):
                total = total + omega(i, r, c, a, b) * (sign * theta(a, b))
                total = total + omega_bar(i, r, c, a, b) * (sign * theta_bar(a, b))
    return total


def upsilon(i: int, r: int, source: str = "refined") -> TracePolynomial:
    """Upsilon_ir for any i >= 1, r >= 0, from ``refined`` or ``brute`` enumeration."""
    if i < 1 or r < 0:
        raise ValueError("need i >= 1 and r >= 0")
    if source == "brute":
        return series_trace_power(i, r)[r]
    if source != "refined":
        raise ValueError(f"unknown source {source!r}")
    if r == 0:
        return TracePolynomial.tr(0, coeff=(-1) ** i)
    if i == 1:
        return TracePolynomial.tr(r)
    if r == 1:
        return TracePolynomial()
    return upsilon_refined(i, r)


def upsilon_shift_formula(r: int, e: int) -> TracePolynomial:
    """Upsilon_{r+e, r} rebuilt from the (r, r) pattern sums with shifted weights."""
    if r < 2 or e < 0:
        raise ValueError("need r >= 2 and e >= 0")
    total = TracePolynomial.tr(*([1] * r)) if e == 0 else TracePolynomial()
    for c in range(1, max_blocks(r, r) + 1):
        for a in admissible_separations(r, r, c):
            sign = (-1) ** (a + e)
            for b in range(1, c + 1):
                total = total + omega(r, r, c, a, b) * (sign * theta(a + e, b))
                total = total + omega_bar(r, r, c, a, b) * (sign * theta_bar(a + e, b))
    return total


def phi(r: int, e: int, source: str = "refined") -> TracePolynomial:
    """sum_j C(e, j) Upsilon_{r+j, r}."""
    if r < 2 or e < 0:
        raise ValueError("need r >= 2 and e >= 0")
    total = TracePolynomial()
    for j in range(e + 1):
        total = total + upsilon(r + j, r, source) * comb(e, j)
    return total


def psi(r: int, e: int, source: str = "refined") -> TracePolynomial:
    """sum_j C(e, j) Upsilon_{r-1+j, r}."""
    if r < 2 or e < 0:
        raise ValueError("need r >= 2 and e >= 0")
    total = TracePolynomial()
    for j in range(e + 1):
        total = total + upsilon(r - 1 + j, r, source) * comb(e, j)
    return total


# ---------------------------------------------------------------------------
# closed forms in block letters


def _word(*parts):
    letters = []
    for name, power in parts:
        letters.extend([name] * power)
    return tuple(letters)


def closed_form_phi_psi(d: int) -> dict[tuple[str, int, int], BlockTracePolynomial]:
    """The eight block closed forms keyed by (kind, r, e) with r in {2d, 2d+1}, e in {d, d+1}."""
    if d < 1:
        raise ValueError("d must be >= 1")
    F = Fraction
    s_even = _word(("S", 2 * d))
    s_odd = _word(("S", 2 * d + 1))
    k_pow = _word(("K_bot", d))
    k_ck = _word(("K_bot", d - 1), ("CK_bot", 1))
    sk_even = _word(("S", 2 * d - 2), ("K_top", 1))
    sk_odd = _word(("S", 2 * d - 1), ("K_top", 1))
    third = F(1, 3 ** d)
    quarter = F(d * 3, 3 ** d * 4)  # d 3^{-d+1} / 4
    forms = {
        ("phi", 2 * d, d): {s_even: 1, k_pow: third},
        ("phi", 2 * d + 1, d): {s_odd: 1, k_ck: -quarter},
        ("phi", 2 * d, d + 1): {s_even: 1},
        ("phi", 2 * d + 1, d + 1): {s_odd: 1},
        ("psi", 2 * d, d): {sk_even: 2 * d - 1, s_even: 3 * d - 1, k_pow: -third},
        ("psi", 2 * d + 1, d): {sk_odd: 2 * d, s_odd: 3 * d, k_ck: quarter},
        ("psi", 2 * d, d + 1): {sk_even: 2 * d - 1, s_even: 3 * d},
        ("psi", 2 * d + 1, d + 1): {sk_odd: 2 * d, s_odd: 3 * d + 1},
    }
    return {key: BlockTracePolynomial.from_letters(val) for key, val in forms.items()}


def phi_psi_block(kind: str, r: int, e: int, source: str = "refined") -> BlockTracePolynomial:
    fn = phi if kind == "phi" else psi
    return block_expand(fn(r, e, source))
