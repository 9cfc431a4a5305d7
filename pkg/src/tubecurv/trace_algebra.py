"""Exact trace algebra over the expansion matrices A_0, A_1, A_2, ...

A monomial tr(A_{w_1} ... A_{w_k}) is stored as a canonical cyclic word of
letter indices.  Two relations are applied on construction:

* A_0 A_1 = A_1 A_0 = 0, so any cyclic word with adjacent {0, 1} vanishes;
* A_0 A_0 = A_0, so runs of zeros collapse to a single zero.

Block words are the images of A-monomials under the 2x2 tangent/normal block
substitution of A_0..A_3.  Letters A_s with s >= 4 have no block structure
and stay opaque.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "TraceMonomial",
    "TracePolynomial",
    "BlockWord",
    "BlockTracePolynomial",
    "SymmetricFunctionValues",
    "EvaluationError",
    "BLOCK_LETTERS",
    "reduce_word",
    "weak_compositions",
    "series_trace_power",
    "block_expand",
    "evaluate",
    "newton_convert",
    "power_sums_from_elementary",
]


class EvaluationError(ValueError):
    pass


def _canonical_rotation(word: Sequence) -> tuple:
    word = tuple(word)
    return min(word[k:] + word[:k] for k in range(len(word)))


@dataclass(frozen=True, order=True)
class TraceMonomial:
    """tr(A_{w_1} ... A_{w_k}) with ``word`` in canonical form."""

    word: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.word)

    @property
    def max_letter(self) -> int:
        return max(self.word)

    def __str__(self) -> str:
        return "tr(" + " ".join(f"A_{s}" for s in self.word) + ")"


def reduce_word(word: Sequence[int]) -> TraceMonomial | None:
    """Reduce a cyclic word; ``None`` stands for the zero monomial."""
    word = tuple(int(s) for s in word)
    if not word:
        raise ValueError("empty word")
    if any(s < 0 for s in word):
        raise ValueError(f"negative letter in {word}")
    k = len(word)
    if k > 1:
        for j in range(k):
            if {word[j], word[(j + 1) % k]} == {0, 1}:
                return None
    if all(s == 0 for s in word):
        return TraceMonomial((0,))
    # drop every zero that is cyclically followed by another zero
    kept = tuple(s for j, s in enumerate(word) if not (s == 0 and word[(j + 1) % k] == 0))
    return TraceMonomial(_canonical_rotation(kept))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


def _fmt_coeff(c: Fraction) -> str:
    return str(c)


class _LinearCombination:
    """Shared arithmetic for maps key -> nonzero Fraction."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, c in items:
            key = self._check_key(key)
            acc[key] = acc.get(key, Fraction(0)) + _as_fraction(c)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    @staticmethod
    def _check_key(key):
        return key

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coefficient(self, key) -> Fraction:
        return self._terms.get(self._check_key(key), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def _combine(self, other, sign):
        if not isinstance(other, type(self)):
            return NotImplemented
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, Fraction(0)) + sign * v
        return type(self)(acc)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, scalar):
        s = _as_fraction(scalar)
        return type(self)({k: s * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: self._sort_key(kv[0]))

    @staticmethod
    def _sort_key(key):
        return key

    def dump(self) -> str:
        """One term per line: ``p/q * tr(...)``; ``0`` when empty."""
        return "\n".join(f"{_fmt_coeff(c)} * {k}" for k, c in self.sorted_items()) or "0"

    def pretty(self) -> str:
        """Single-line form, e.g. ``tr(A_1 A_1) - 2 tr(A_0 A_2)``."""
        out = ""
        for k, c in self.sorted_items():
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            out += f" {sign} {mag}{k}" if out else f"{'-' if c < 0 else ''}{mag}{k}"
        return out or "0"

    def __repr__(self):
        body = ", ".join(f"{k}: {_fmt_coeff(c)}" for k, c in self.sorted_items())
        return f"{type(self).__name__}({{{body}}})"


class TracePolynomial(_LinearCombination):
    """Finite rational combination of trace monomials."""

    __slots__ = ()

    @staticmethod
    def _check_key(key):
        if isinstance(key, TraceMonomial):
            return key
        raise TypeError("TracePolynomial keys must be TraceMonomial")

    @staticmethod
    def _sort_key(mon):
        return (len(mon.word), mon.word)

    @classmethod
    def from_words(cls, words: Mapping[Sequence[int], object] | Iterable) -> "TracePolynomial":
        """Build from raw words; each is reduced, zero words are dropped."""
        items = words.items() if isinstance(words, Mapping) else words
        acc = []
        for w, c in items:
            mon = reduce_word(w)
            if mon is not None:
                acc.append((mon, c))
        return cls(acc)

    @classmethod
    def tr(cls, *word: int, coeff=1) -> "TracePolynomial":
        return cls.from_words([(word, coeff)])

    def max_letter(self) -> int:
        return max((m.max_letter for m in self._terms), default=-1)


def weak_compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _series_coefficient(i: int, r: int) -> TracePolynomial:
    acc: dict = {}
    for tau in weak_compositions(r, i):
        mon = reduce_word(tau)
        if mon is None:
            continue
        sign = -1 if tau.count(0) % 2 else 1
        acc[mon] = acc.get(mon, 0) + sign
    return TracePolynomial(acc)


def series_trace_power(i: int, r_max: int) -> list[TracePolynomial]:
    """Coefficients of t^0..t^r_max in tr((-A_0 + sum_s A_s t^s)^i), by brute force."""
    if i < 1:
        raise ValueError("i must be positive")
    if r_max < 0:
        raise ValueError("r_max must be non-negative")
    return [_series_coefficient(i, r) for r in range(r_max + 1)]


# ---------------------------------------------------------------------------
# block words

# letter -> (row space, column space); order of this dict is the letter order
BLOCK_LETTERS: dict[str, tuple[str, str]] = {
    "I_T": ("T", "T"),
    "S": ("T", "T"),
    "K_top": ("T", "T"),
    "CK_top": ("T", "T"),
    "I_N": ("N", "N"),
    "K_bot": ("N", "N"),
    "CK_bot": ("N", "N"),
    "B": ("T", "N"),
    "Bt": ("N", "T"),
    "CB": ("T", "N"),
    "CBt": ("N", "T"),
}
_LETTER_RANK = {name: k for k, name in enumerate(BLOCK_LETTERS)}
_TRANSPOSE = {name: name for name in BLOCK_LETTERS}
_TRANSPOSE.update({"B": "Bt", "Bt": "B", "CB": "CBt", "CBt": "CB"})
_IDENTITIES = {"I_T", "I_N"}


@dataclass(frozen=True)
class BlockWord:
    """Traceable cyclic word in block letters, canonical under rotation and transposition."""

    letters: tuple[str, ...]

    @classmethod
    def make(cls, letters: Sequence[str]) -> "BlockWord":
        letters = tuple(letters)
        if not letters:
            raise ValueError("empty block word")
        for name in letters:
            if name not in BLOCK_LETTERS:
                raise ValueError(f"unknown block letter {name!r}")
        k = len(letters)
        for j in range(k):
            if BLOCK_LETTERS[letters[j]][1] != BLOCK_LETTERS[letters[(j + 1) % k]][0]:
                raise ValueError(f"block word {letters} is not composable")
        core = tuple(x for x in letters if x not in _IDENTITIES)
        if not core:
            return cls((letters[0],))
        ranks = tuple(_LETTER_RANK[x] for x in core)
        back = tuple(_LETTER_RANK[_TRANSPOSE[x]] for x in reversed(core))
        best = min(_canonical_rotation(ranks), _canonical_rotation(back))
        names = list(BLOCK_LETTERS)
        return cls(tuple(names[q] for q in best))

    def transposed(self) -> "BlockWord":
        return BlockWord.make(_TRANSPOSE[x] for x in reversed(self.letters))

    def __str__(self):
        return "tr(" + " ".join(self.letters) + ")"


def _block_sort_key(w: BlockWord):
    return (len(w.letters), tuple(_LETTER_RANK[x] for x in w.letters))


class _BlockTerms(_LinearCombination):
    __slots__ = ()

    @staticmethod
    def _check_key(key):
        if isinstance(key, BlockWord):
            return key
        raise TypeError("keys must be BlockWord")

    _sort_key = staticmethod(_block_sort_key)


class BlockTracePolynomial:
    """Rational combination of block words plus an opaque A-monomial residual."""

    __slots__ = ("_blocks", "residual")

    def __init__(self, terms=(), residual: TracePolynomial | None = None):
        self._blocks = _BlockTerms(terms)
        self.residual = residual if residual is not None else TracePolynomial()

    @classmethod
    def from_letters(cls, words) -> "BlockTracePolynomial":
        items = words.items() if isinstance(words, Mapping) else words
        return cls([(BlockWord.make(w), c) for w, c in items])

    @property
    def terms(self) -> dict:
        return self._blocks.terms

    def items(self):
        return self._blocks.items()

    def coefficient(self, word) -> Fraction:
        if not isinstance(word, BlockWord):
            word = BlockWord.make(word)
        return self._blocks.coefficient(word)

    def __len__(self):
        return len(self._blocks) + len(self.residual)

    def __bool__(self):
        return bool(self._blocks) or bool(self.residual)

    def __add__(self, other):
        if not isinstance(other, BlockTracePolynomial):
            return NotImplemented
        out = BlockTracePolynomial()
        out._blocks = self._blocks + other._blocks
        out.residual = self.residual + other.residual
        return out

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, scalar):
        out = BlockTracePolynomial()
        out._blocks = self._blocks * scalar
        out.residual = self.residual * scalar
        return out

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, BlockTracePolynomial):
            return NotImplemented
        return self._blocks == other._blocks and self.residual == other.residual

    def __hash__(self):
        return hash((self._blocks, self.residual))

    def dump(self) -> str:
        lines = [self._blocks.dump()] if self._blocks else []
        if self.residual:
            lines.append(self.residual.dump())
        return "\n".join(lines) or "0"

    def pretty(self) -> str:
        parts = [p.pretty() for p in (self._blocks, self.residual) if p]
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"BlockTracePolynomial({self._blocks!r}, residual={self.residual!r})"


_F = Fraction
# block entries of A_0..A_3: (row, col) -> [(coefficient, letters)]
_A_BLOCKS: dict[int, dict[tuple[str, str], list]] = {
    0: {("N", "N"): [(_F(1), ("I_N",))]},
    1: {("T", "T"): [(_F(1), ("S",))]},
    2: {
        ("T", "T"): [(_F(1), ("S", "S")), (_F(1), ("K_top",))],
        ("T", "N"): [(_F(1), ("B",))],
        ("N", "T"): [(_F(1, 3), ("Bt",))],
        ("N", "N"): [(_F(1, 3), ("K_bot",))],
    },
    3: {
        ("T", "T"): [(_F(1, 2), ("CK_top",)), (_F(1), ("S", "S", "S")), (_F(1), ("K_top", "S"))],
        ("T", "N"): [(_F(1, 2), ("CB",))],
        ("N", "T"): [(_F(1, 4), ("CBt",)), (_F(1, 3), ("Bt", "S"))],
        ("N", "N"): [(_F(1, 4), ("CK_bot",))],
    },
}


@lru_cache(maxsize=None)
def _expand_monomial(word: tuple[int, ...]) -> tuple:
    # rows of the running product: (start block, end block) -> {letters: coeff}
    current: dict = {}
    for (row, col), entries in _A_BLOCKS[word[0]].items():
        bucket = current.setdefault((row, col), {})
        for c, letters in entries:
            bucket[letters] = bucket.get(letters, 0) + c
    for s in word[1:]:
        nxt: dict = {}
        for (row, mid), left in current.items():
            for (mid2, col), entries in _A_BLOCKS[s].items():
                if mid2 != mid:
                    continue
                bucket = nxt.setdefault((row, col), {})
                for lw, lc in left.items():
                    for c, letters in entries:
                        key = lw + letters
                        bucket[key] = bucket.get(key, 0) + lc * c
        current = nxt
    acc: dict = {}
    for (row, col), bucket in current.items():
        if row != col:
            continue
        for letters, c in bucket.items():
            w = BlockWord.make(letters)
            acc[w] = acc.get(w, 0) + c
    return tuple((w, c) for w, c in acc.items() if c != 0)


def block_expand(poly: TracePolynomial) -> BlockTracePolynomial:
    """Substitute the block forms of A_0..A_3; monomials with A_{s>=4} stay opaque."""
    blocks: dict = {}
    opaque = []
    for mon, coeff in poly.items():
        if mon.max_letter >= 4:
            opaque.append((mon, coeff))
            continue
        for w, c in _expand_monomial(mon.word):
            blocks[w] = blocks.get(w, 0) + coeff * c
    return BlockTracePolynomial(blocks, TracePolynomial(opaque))


# ---------------------------------------------------------------------------
# numeric evaluation


def _trace_of_product(mats, label) -> float:
    try:
        prod = mats[0]
        for mat in mats[1:]:
            prod = prod @ mat
        if prod.shape[0] != prod.shape[1]:
            raise ValueError(f"product has shape {prod.shape}")
    except ValueError as exc:
        raise EvaluationError(f"dimension mismatch in {label}: {exc}") from None
    return float(np.trace(prod))


def _lookup(assignment, key, label):
    try:
        return np.asarray(assignment[key], dtype=float)
    except KeyError:
        raise EvaluationError(f"no matrix assigned to letter {key!r} needed by {label}") from None


def evaluate(poly, assignment: Mapping) -> float:
    """Numeric value of a trace or block polynomial under concrete matrices.

    ``assignment`` maps integer indices to A-matrices and block letter names
    (see ``BLOCK_LETTERS``) to block matrices.
    """
    total = 0.0
    if isinstance(poly, BlockTracePolynomial):
        for w, c in poly.items():
            mats = [_lookup(assignment, x, str(w)) for x in w.letters]
            total += float(c) * _trace_of_product(mats, str(w))
        poly = poly.residual
    if not isinstance(poly, TracePolynomial):
        raise TypeError("evaluate expects a TracePolynomial or BlockTracePolynomial")
    for mon, c in poly.items():
        mats = [_lookup(assignment, s, str(mon)) for s in mon.word]
        total += float(c) * _trace_of_product(mats, str(mon))
    return total


# ---------------------------------------------------------------------------
# symmetric functions


def _exact(values) -> bool:
    return all(isinstance(v, (int, Fraction, np.integer)) for v in values)


def newton_convert(power_sums: Sequence) -> list:
    """Elementary symmetric values sigma_1..sigma_n from power sums rho_1..rho_n."""
    p = list(power_sums)
    if not p:
        raise ValueError("need at least one power sum")
    exact = _exact(p)
    if exact:
        p = [Fraction(v) for v in p]
    e = [Fraction(1) if exact else 1.0]
    for k in range(1, len(p) + 1):
        acc = sum((-1) ** (j - 1) * e[k - j] * p[j - 1] for j in range(1, k + 1))
        e.append(acc / k)
    return e[1:]


def power_sums_from_elementary(elementary: Sequence) -> list:
    """Inverse of ``newton_convert``."""
    e = list(elementary)
    if not e:
        raise ValueError("need at least one elementary symmetric value")
    if _exact(e):
        e = [Fraction(v) for v in e]
    p = []
    for k in range(1, len(e) + 1):
        acc = (-1) ** (k - 1) * k * e[k - 1]
        for j in range(1, k):
            acc += (-1) ** (j - 1) * e[j - 1] * p[k - j - 1]
        p.append(acc)
    return p


@dataclass(frozen=True)
class SymmetricFunctionValues:
    values: tuple

    def power_sum(self, k: int):
        return sum(v ** k for v in self.values)

    def elementary(self, k: int):
        if k == 0:
            return 1
        return sum(_prod(c) for c in itertools.combinations(self.values, k))

    def power_sums(self, n: int | None = None) -> list:
        n = len(self.values) if n is None else n
        return [self.power_sum(k) for k in range(1, n + 1)]


def _prod(values):
    out = 1
    for v in values:
        out *= v
    return out
