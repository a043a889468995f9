"""Partial bitstrings over qubit index sets.

A string is a 0/1 assignment on an arbitrary subset of [n] (qubits are
1-based). Full strings have domain [n]; their basis index puts the smallest
qubit in the most significant position.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from loguru import logger

from .errors import DomainError
from .models import Quad, Region

log = logger.bind(component="strings")

QubitSet = frozenset[int]


def as_qubit_set(members: Iterable[int], n: int | None = None) -> QubitSet:
    """Validate qubit indices (1-based, and <= n when n is given)."""
    result = frozenset(int(m) for m in members)
    bad = sorted(m for m in result if m < 1 or (n is not None and m > n))
    if bad:
        raise DomainError(f"qubit indices out of range 1..{n}: {bad}")
    return result


def full_set(n: int) -> QubitSet:
    return frozenset(range(1, n + 1))


def format_qubits(members: Iterable[int]) -> str:
    return "{" + ",".join(str(m) for m in sorted(members)) + "}"


@dataclass(frozen=True, slots=True)
class PartialString:
    """A 0/1 map on a finite set of qubit indices."""

    bits: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for qubit, bit in self.bits:
            if qubit in seen:
                raise DomainError(f"qubit {qubit} assigned twice")
            if bit not in (0, 1):
                raise DomainError(f"bit for qubit {qubit} must be 0 or 1, got {bit!r}")
            seen.add(qubit)
        ordered = tuple(sorted(self.bits))
        if ordered != self.bits:
            object.__setattr__(self, "bits", ordered)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> PartialString:
        return cls(tuple((int(q), int(b)) for q, b in mapping.items()))

    @classmethod
    def from_bits(cls, domain: Iterable[int], text: str) -> PartialString:
        """Read `text` left to right onto the sorted domain ("0101")."""
        qubits = sorted(domain)
        if len(text) != len(qubits):
            raise DomainError(
                f"bitstring {text!r} has length {len(text)}, domain has {len(qubits)}"
            )
        if any(ch not in "01" for ch in text):
            raise DomainError(f"bitstring {text!r} contains characters other than 0/1")
        return cls(tuple((q, int(ch)) for q, ch in zip(qubits, text)))

    @classmethod
    def ones(cls, domain: Iterable[int]) -> PartialString:
        return cls(tuple((q, 1) for q in sorted(domain)))

    @classmethod
    def zeros(cls, domain: Iterable[int]) -> PartialString:
        return cls(tuple((q, 0) for q in sorted(domain)))

    @classmethod
    def from_index(cls, domain: Iterable[int], index: int) -> PartialString:
        qubits = sorted(domain)
        width = len(qubits)
        if not 0 <= index < (1 << width):
            raise DomainError(f"index {index} out of range for {width} qubits")
        return cls(
            tuple((q, (index >> (width - 1 - pos)) & 1) for pos, q in enumerate(qubits))
        )

    @property
    def domain(self) -> QubitSet:
        return frozenset(q for q, _ in self.bits)

    @property
    def index(self) -> int:
        value = 0
        for _, bit in self.bits:
            value = (value << 1) | bit
        return value

    def __getitem__(self, qubit: int) -> int:
        for q, bit in self.bits:
            if q == qubit:
                return bit
        raise DomainError(f"qubit {qubit} not in domain {format_qubits(self.domain)}")

    def __len__(self) -> int:
        return len(self.bits)

    def as_dict(self) -> dict[int, int]:
        return dict(self.bits)

    def to_bitstring(self) -> str:
        return "".join(str(bit) for _, bit in self.bits)

    def has_zero_in(self, members: Iterable[int]) -> bool:
        wanted = set(members)
        return any(bit == 0 for q, bit in self.bits if q in wanted)

    def __str__(self) -> str:
        return self.to_bitstring() or "ε"


def restrict(x: PartialString, subset: Iterable[int]) -> PartialString:
    """Restriction x_{|T}; T must lie inside the domain of x."""
    target = frozenset(subset)
    missing = target - x.domain
    if missing:
        raise DomainError(
            f"cannot restrict to {format_qubits(target)}: "
            f"{format_qubits(missing)} outside domain {format_qubits(x.domain)}"
        )
    return PartialString(tuple((q, b) for q, b in x.bits if q in target))


def union(y: PartialString, z: PartialString) -> PartialString:
    """The unique string on dom(y) ∪ dom(z) extending both (domains disjoint)."""
    overlap = y.domain & z.domain
    if overlap:
        raise DomainError(f"union of strings with overlapping domains {format_qubits(overlap)}")
    return PartialString(y.bits + z.bits)


def is_test_string(x: PartialString, quads: Iterable[Iterable[int]]) -> bool:
    """True iff x has a 0 in every nonempty set among `quads`."""
    for quad in quads:
        members = frozenset(quad)
        if members and not x.has_zero_in(members):
            return False
    return True


def quadrants(
    s: QubitSet, a: QubitSet, b: QubitSet, c: QubitSet, d: QubitSet
) -> dict[Quad, QubitSet]:
    """The four sets S∩A∩C, S∩A∩D, S∩B∩C, S∩B∩D."""
    return {
        Quad.AC: s & a & c,
        Quad.AD: s & a & d,
        Quad.BC: s & b & c,
        Quad.BD: s & b & d,
    }


def enumerate_test_strings(
    n: int | Iterable[int], quads: Iterable[Iterable[int]]
) -> Iterator[PartialString]:
    """All test strings on [n] (or on an explicit domain), in basis-index order."""
    frozen = [frozenset(q) for q in quads]
    domain = full_set(n) if isinstance(n, int) else frozenset(n)
    for index in range(1 << len(domain)):
        x = PartialString.from_index(domain, index)
        if is_test_string(x, frozen):
            yield x


def check_bipartition(p: QubitSet, q: QubitSet, universe: QubitSet, label: str = "") -> None:
    if p & q or (p | q) != universe:
        raise DomainError(
            f"{label or 'pair'} {format_qubits(p)}|{format_qubits(q)} "
            f"is not a bipartition of {format_qubits(universe)}"
        )


@dataclass(frozen=True)
class FamilyStrings:
    """The sixteen strings x^R_{jk}, keyed by (region, j, k)."""

    strings: Mapping[tuple[Region, int, int], PartialString]

    def get(self, region: Region | str, j: int, k: int) -> PartialString:
        return self.strings[(Region(region), j, k)]

    def joined_ab(self, j: int, k: int, ell: int, m: int) -> PartialString:
        """x^A_{jk} ∪ x^B_{ell m}."""
        return union(self.get(Region.A, j, k), self.get(Region.B, ell, m))

    def joined_cd(self, j: int, ell: int, k: int, m: int) -> PartialString:
        """x^C_{j ell} ∪ x^D_{km}."""
        return union(self.get(Region.C, j, ell), self.get(Region.D, k, m))


def build_family(
    x: PartialString,
    u: PartialString,
    a: QubitSet,
    b: QubitSet,
    c: QubitSet,
    d: QubitSet,
) -> FamilyStrings:
    """Build x^A_{jk}, x^B_{jk}, x^C_{jk}, x^D_{jk} from a test string x and u.

    For a region R on one bipartition, with (P1, P2) the two sides of the
    other, x^R_{jk} takes u on R∩P1 when j = 1 (x otherwise) and u on R∩P2
    when k = 1 (x otherwise). x^D_{01} uses u on D∩B like every sibling, which
    is what makes x^A_{jk} ∪ x^B_{lm} = x^C_{jl} ∪ x^D_{km} hold.
    """
    universe = x.domain
    if u.domain != universe:
        raise DomainError(
            f"u has domain {format_qubits(u.domain)}, x has {format_qubits(universe)}"
        )
    check_bipartition(a, b, universe, "(A,B)")
    check_bipartition(c, d, universe, "(C,D)")
    log.debug(f"build_family(x={x}, u={u}, A={format_qubits(a)}, C={format_qubits(c)})")

    def pick(flag: int, part: QubitSet) -> PartialString:
        return restrict(u if flag else x, part)

    sides = {
        Region.A: (a, c, d),
        Region.B: (b, c, d),
        Region.C: (c, a, b),
        Region.D: (d, a, b),
    }
    strings: dict[tuple[Region, int, int], PartialString] = {}
    for region, (r, p1, p2) in sides.items():
        for j, k in itertools.product((0, 1), repeat=2):
            strings[(region, j, k)] = union(pick(j, r & p1), pick(k, r & p2))
    return FamilyStrings(strings)
