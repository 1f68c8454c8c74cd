"""Exterior algebra over time-indexed anticommuting generators.

Every generator is odd. Generators are totally ordered by
``(time_index, kind rank)`` and a monomial is stored as a bitmask whose bit
positions follow that order, so canonical (ascending) form is implicit.

Examples
--------
>>> eta_i = make_generator(GeneratorKind.ETA_IN, 0)
>>> eta_f = make_generator(GeneratorKind.ETA_BAR_OUT, 2)
>>> k = exp_element(eta_f * eta_i)
>>> coefficient_of(k, Monomial.of(*k.generators()))  # stored as η_i η̄_f
(-1+0j)
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Iterator, Mapping

from grasspath import _backend

DROP_THRESHOLD = 1e-15
_N_KINDS = 7


class GeneratorKind(enum.IntEnum):
    """Generator families; the integer value is the rank used for ordering."""

    ETA_IN = 0
    ETA_BAR_OUT = 1
    ETA_STEP = 2
    ETA_BAR_STEP = 3
    FIELD_B = 4
    FIELD_B_CONJ = 5
    COUPLING_LAMBDA = 6


PARTNER_KINDS = frozenset(
    {GeneratorKind.FIELD_B, GeneratorKind.FIELD_B_CONJ, GeneratorKind.COUPLING_LAMBDA}
)

_LABELS = {
    GeneratorKind.ETA_IN: "η_i",
    GeneratorKind.ETA_BAR_OUT: "η̄_f",
    GeneratorKind.ETA_STEP: "η_{j}",
    GeneratorKind.ETA_BAR_STEP: "η̄_{j}",
    GeneratorKind.FIELD_B: "B_{j}",
    GeneratorKind.FIELD_B_CONJ: "B*_{j}",
    GeneratorKind.COUPLING_LAMBDA: "λ_{j}",
}


@dataclass(frozen=True, order=True)
class GeneratorId:
    """A single odd generator, e.g. ``GeneratorId(GeneratorKind.FIELD_B, 3)``."""

    time_index: int
    kind: GeneratorKind

    def __post_init__(self):
        if self.time_index < 0:
            raise ValueError(f"time index must be non-negative, got {self.time_index}")
        object.__setattr__(self, "kind", GeneratorKind(self.kind))

    @property
    def bit(self) -> int:
        return self.time_index * _N_KINDS + int(self.kind)

    @classmethod
    def from_bit(cls, bit: int) -> "GeneratorId":
        t, rank = divmod(bit, _N_KINDS)
        return cls(t, GeneratorKind(rank))

    def __str__(self):
        return _LABELS[self.kind].replace("{j}", str(self.time_index))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Monomial:
    """Strictly ascending product of distinct generators; empty means 1."""

    mask: int = 0

    @classmethod
    def of(cls, *generators: GeneratorId) -> "Monomial":
        """Monomial from generators already given in canonical order."""
        bits = [g.bit for g in generators]
        if any(b >= c for b, c in zip(bits, bits[1:])):
            raise ValueError("generators must be strictly ascending in canonical order")
        return cls(sum(1 << b for b in bits))

    @property
    def generators(self) -> tuple[GeneratorId, ...]:
        return tuple(GeneratorId.from_bit(b) for b in _bits(self.mask))

    @property
    def degree(self) -> int:
        return self.mask.bit_count()

    def __str__(self):
        return " ".join(str(g) for g in self.generators) or "1"


class AlgebraElement:
    """Immutable complex-linear combination of canonical monomials.

    Coefficients with magnitude below ``DROP_THRESHOLD`` are never stored.
    Supports ``+``, ``-``, ``*`` (element or scalar) and division by scalars.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, complex] | None = None, *, _clean=True):
        if terms is None:
            terms = {}
        if _clean:
            terms = {int(m): complex(c) for m, c in terms.items() if abs(c) >= DROP_THRESHOLD}
        self._terms = terms
        self._hash = None

    @classmethod
    def scalar(cls, value: complex) -> "AlgebraElement":
        return cls({0: value})

    @classmethod
    def _raw(cls, terms):
        return cls(terms, _clean=False)

    @property
    def terms(self) -> dict[int, complex]:
        """Copy of the ``{mask: coefficient}`` map."""
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, complex]]:
        for m, c in sorted(self._terms.items()):
            yield Monomial(m), c

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def scalar_part(self) -> complex:
        return self._terms.get(0, 0j)

    def support(self) -> int:
        """Bitwise OR of all monomial masks."""
        out = 0
        for m in self._terms:
            out |= m
        return out

    def generators(self) -> list[GeneratorId]:
        return [GeneratorId.from_bit(b) for b in _bits(self.support())]

    def parity(self) -> int | None:
        """0 for even, 1 for odd, None for mixed; zero counts as even."""
        parities = {m.bit_count() & 1 for m in self._terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def graded_part(self, parity: int) -> "AlgebraElement":
        return AlgebraElement._raw(
            {m: c for m, c in self._terms.items() if m.bit_count() & 1 == parity}
        )

    def map_coefficients(self, fn) -> "AlgebraElement":
        return AlgebraElement({m: fn(c) for m, c in self._terms.items()})

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            return other
        if isinstance(other, Number):
            return AlgebraElement.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return AlgebraElement(out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1 / other)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "AlgebraElement(0)"
        parts = []
        for mono, c in self.items():
            coef = f"({c.real:.6g}{c.imag:+.6g}j)"
            parts.append(coef if mono.mask == 0 else f"{coef}·{mono}")
        return "AlgebraElement(" + " + ".join(parts) + ")"


ZERO = AlgebraElement()
ONE = AlgebraElement.scalar(1.0)


def make_generator(kind: GeneratorKind, j: int) -> AlgebraElement:
    """Single-generator element with unit coefficient."""
    if j < 0:
        raise ValueError(f"time index must be non-negative, got {j}")
    return AlgebraElement._raw({1 << GeneratorId(j, kind).bit: 1 + 0j})


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Graded product; repeated generators annihilate the term."""
    return AlgebraElement._raw(_backend.mul(a._terms, b._terms, DROP_THRESHOLD))


def exp_element(a: AlgebraElement) -> AlgebraElement:
    """``exp(a) = e^s * sum_k n^k / k!`` with ``s`` the scalar part of ``a``.

    The series stops by nilpotency of ``n = a - s``.
    """
    s = a.scalar_part()
    nil = {m: c for m, c in a._terms.items() if m}
    series = _backend.exp_nilpotent(nil, DROP_THRESHOLD)
    if s == 0:
        return AlgebraElement._raw(series)
    return AlgebraElement(series) * cmath.exp(s)


def berezin_integrate_pair(
    a: AlgebraElement,
    j: int,
    kinds: tuple[GeneratorKind, GeneratorKind] = (
        GeneratorKind.ETA_STEP,
        GeneratorKind.ETA_BAR_STEP,
    ),
) -> AlgebraElement:
    """Integrate out one coherent-state pair with the measure ``dη dη̄ e^{-η̄η}``.

    Normalised so that ``∫dμ(η) 1 = 1`` and the overlap kernel reproduces
    itself, ``∫dμ(η) e^{ā η} e^{η̄ b} = e^{ā b}``.
    """
    eta_bit = 1 << GeneratorId(j, kinds[0]).bit
    bar_bit = 1 << GeneratorId(j, kinds[1]).bit
    out = _backend.integrate_pair(a._terms, eta_bit, bar_bit, DROP_THRESHOLD)
    left = 0
    for m in out:
        left |= m
    if left & (eta_bit | bar_bit):
        raise RuntimeError(f"integrated generators survive Berezin integration at slice {j}")
    return AlgebraElement._raw(out)


def coefficient_of(a: AlgebraElement, m: Monomial | Iterable[GeneratorId]) -> complex:
    """Stored coefficient of a canonical monomial, or 0."""
    if not isinstance(m, Monomial):
        m = Monomial.of(*m)
    return a._terms.get(m.mask, 0j)


def max_coefficient_deviation(a: AlgebraElement, b: AlgebraElement) -> float:
    """``max_m |a_m - b_m|`` over the union of monomials."""
    ta, tb = a._terms, b._terms
    dev = 0.0
    for m in ta.keys() | tb.keys():
        dev = max(dev, abs(ta.get(m, 0) - tb.get(m, 0)))
    return dev


def permutation_sign(order: list[int]) -> int:
    """Sign of the permutation sorting ``order`` ascending."""
    inversions = 0
    for i, x in enumerate(order):
        for y in order[i + 1 :]:
            if x > y:
                inversions += 1
    return -1 if inversions & 1 else 1


def degrassmannize(a: AlgebraElement) -> AlgebraElement:
    """Strip the time-indexed partners, leaving an element in η̄_f and η_i only.

    Each monomial is first read in the order ``η̄_f, partners (latest slice
    first), η_i``; the permutation sign from canonical order is applied and the
    partner generators are then replaced by 1 (the field or coupling values
    already sit in the coefficients). The two field partners of one slice are
    conjugate halves of a single partner, so a monomial holding both vanishes.
    """
    out: dict[int, complex] = {}
    for mask, c in a._terms.items():
        gens = [GeneratorId.from_bit(b) for b in _bits(mask)]
        slices = [g.time_index for g in gens if g.kind in PARTNER_KINDS]
        if len(slices) != len(set(slices)):
            continue
        keep = 0
        rank = []
        for g in gens:
            if g.kind == GeneratorKind.ETA_BAR_OUT:
                rank.append((0, 0))
                keep |= 1 << g.bit
            elif g.kind in PARTNER_KINDS:
                rank.append((1, -g.time_index))
            elif g.kind == GeneratorKind.ETA_IN:
                rank.append((2, 0))
                keep |= 1 << g.bit
            else:
                raise ValueError(f"intermediate generator {g} left in a propagator")
        # canonical position i goes to reading position sorted_index
        reading = sorted(range(len(rank)), key=rank.__getitem__)
        sign = permutation_sign(reading)
        if keep.bit_count() == 2:
            # reading order left η̄_f η_i; canonical storage is η_i η̄_f
            sign = -sign
        out[keep] = out.get(keep, 0) + sign * c
    return AlgebraElement(out)
