"""Group elements: free-product normal forms and (partial) permutations.

A :class:`FreeProduct` of finite cyclic factors has elements stored as reduced
alternating words ``((factor, exponent), ...)``; multiplication concatenates and
reduces at the junction.  :class:`Permutation` covers explicit backends.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import PartialActionError, ProjkitError

_TOKEN = re.compile(r"([A-Za-z]+)(\d+)")


@dataclass(frozen=True)
class FreeProduct:
    orders: tuple
    names: tuple = ("h", "k")

    def __post_init__(self):
        if len(self.orders) != len(self.names):
            raise ValueError("one name per factor")
        for n in self.orders:
            if n < 2:
                raise ValueError(f"factor order must be >= 2, got {n}")

    @property
    def identity(self) -> "FreeProductElement":
        return FreeProductElement(self, ())

    def letter(self, factor: int, exponent: int = 1) -> "FreeProductElement":
        exponent %= self.orders[factor]
        return FreeProductElement(self, ((factor, exponent),) if exponent else ())

    def generators(self) -> list:
        return [self.letter(i) for i in range(len(self.orders))]

    def factor_elements(self, factor: int) -> list:
        return [self.letter(factor, e) for e in range(self.orders[factor])]

    def parse(self, label: str) -> "FreeProductElement":
        if label in ("", "e", "1"):
            return self.identity
        pos = 0
        g = self.identity
        for m in _TOKEN.finditer(label):
            if m.start() != pos:
                raise ValueError(f"bad word label {label!r}")
            pos = m.end()
            try:
                factor = self.names.index(m.group(1))
            except ValueError:
                raise ValueError(f"unknown letter {m.group(1)!r} in {label!r}") from None
            g = g * self.letter(factor, int(m.group(2)))
        if pos != len(label):
            raise ValueError(f"bad word label {label!r}")
        return g

    def words(self, max_syllables: int) -> list:
        """All normal forms with at most ``max_syllables`` syllables, shortlex order."""
        out = [self.identity]
        layer = [()]
        for _ in range(max_syllables):
            nxt = []
            for w in layer:
                last = w[-1][0] if w else None
                for f, n in enumerate(self.orders):
                    if f == last:
                        continue
                    for e in range(1, n):
                        nxt.append(w + ((f, e),))
            out.extend(FreeProductElement(self, w) for w in nxt)
            layer = nxt
        return out


class FreeProductElement:
    __slots__ = ("group", "letters", "_hash")

    def __init__(self, group: FreeProduct, letters: tuple):
        self.group = group
        self.letters = letters
        self._hash = hash((group.orders, letters))

    def __mul__(self, other: "FreeProductElement") -> "FreeProductElement":
        if not isinstance(other, FreeProductElement):
            return NotImplemented
        if other.group != self.group:
            raise ProjkitError("elements of different free products")
        left = list(self.letters)
        for f, e in other.letters:
            if left and left[-1][0] == f:
                e = (left[-1][1] + e) % self.group.orders[f]
                left.pop()
                if e:
                    left.append((f, e))
            else:
                left.append((f, e))
        return FreeProductElement(self.group, tuple(left))

    def inverse(self) -> "FreeProductElement":
        orders = self.group.orders
        return FreeProductElement(
            self.group, tuple((f, (-e) % orders[f]) for f, e in reversed(self.letters))
        )

    def __invert__(self):
        return self.inverse()

    def __pow__(self, n: int) -> "FreeProductElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.group.identity
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    @property
    def is_identity(self) -> bool:
        return not self.letters

    @property
    def syllables(self) -> int:
        return len(self.letters)

    def __eq__(self, other):
        return (
            isinstance(other, FreeProductElement)
            and other.group == self.group
            and other.letters == self.letters
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (len(self.letters), self.letters) < (len(other.letters), other.letters)

    @property
    def label(self) -> str:
        if not self.letters:
            return "e"
        return "".join(f"{self.group.names[f]}{e}" for f, e in self.letters)

    def __repr__(self):
        return f"<{self.label}>"


class Permutation:
    """A (possibly partial) permutation of point identifiers.

    ``mapping is None`` is the global identity.  Equality compares moved points.
    """

    __slots__ = ("mapping", "_key")

    def __init__(self, mapping: dict | None = None):
        self.mapping = None if mapping is None else dict(mapping)
        moved = () if mapping is None else ((x, y) for x, y in mapping.items() if x != y)
        self._key = frozenset(moved)

    @classmethod
    def identity(cls) -> "Permutation":
        return cls(None)

    def act(self, x):
        if self.mapping is None:
            return x
        try:
            return self.mapping[x]
        except KeyError:
            raise PartialActionError(f"no image for {x!r}") from None

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.mapping is None:
            return other
        if other.mapping is None:
            return self
        return Permutation({x: self.mapping[y] for x, y in other.mapping.items() if y in self.mapping})

    def inverse(self) -> "Permutation":
        if self.mapping is None:
            return self
        return Permutation({y: x for x, y in self.mapping.items()})

    def __invert__(self):
        return self.inverse()

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        out = Permutation.identity()
        for _ in range(n):
            out = out * self
        return out

    @property
    def is_identity(self) -> bool:
        return not self._key

    @property
    def syllables(self) -> int:
        return 0 if self.is_identity else 1

    def __eq__(self, other):
        return isinstance(other, Permutation) and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return sorted(map(repr, self._key)) < sorted(map(repr, other._key))

    @property
    def label(self) -> str:
        if self.is_identity:
            return "id"
        return "(" + " ".join(f"{x}->{y}" for x, y in sorted(self._key, key=repr)) + ")"

    def __repr__(self):
        return f"<perm {self.label}>"


def identity_like(g):
    if isinstance(g, FreeProductElement):
        return g.group.identity
    return Permutation.identity()


def enumerate_products(gens: Iterable, max_letters: int, limit: int = 200_000):
    """Elements that are products of at most ``max_letters`` generators.

    Returns ``(elements, closed)`` where ``closed`` means the last BFS layer was
    empty, i.e. the generated group is finite and fully enumerated.
    """
    gens = [g for g in dict.fromkeys(gens) if not g.is_identity]
    if not gens:
        return [], True
    one = identity_like(gens[0])
    seen = {one: None}
    frontier = deque([one])
    closed = False
    for _ in range(max_letters):
        nxt = deque()
        for w in frontier:
            for s in gens:
                p = w * s
                if p not in seen:
                    seen[p] = None
                    nxt.append(p)
                    if len(seen) >= limit:
                        return list(seen), False
        if not nxt:
            closed = True
            break
        frontier = nxt
    else:
        # one extra probe so a group closing exactly at the bound is recognized
        closed = all(w * s in seen for w in frontier for s in gens)
    return list(seen), closed


def closure(gens: Iterable, one, limit: int = 10_000) -> list:
    """Enumerate a finite group; raises if it does not close within ``limit``."""
    elems, closed = enumerate_products(gens, limit, limit=limit)
    if not closed:
        raise ProjkitError("generated group did not close; vertex groups must be finite")
    return elems or [one]


def element_order(g, bound: int = 10_000) -> int:
    x = g
    for n in range(1, bound + 1):
        if x.is_identity:
            return n
        x = x * g
    raise ProjkitError(f"order of {g!r} exceeds {bound}")


def group_name(elements) -> str:
    """``Z/n`` for cyclic groups, else ``order n``."""
    elements = list(elements)
    n = len(elements) if elements else 1
    if n == 1:
        return "1"
    if any(element_order(g) == n for g in elements):
        return f"Z/{n}"
    return f"group of order {n}"
