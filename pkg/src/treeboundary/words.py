"""Freely reduced words in the free group F_n, seen as vertices of the
2n-valent tree.

Letters are encoded as integers ``0 .. 2n-1``: generator ``j`` is ``2j`` and
its inverse is ``2j + 1``, so that ``inverse_letter(i) == i ^ 1``.  This makes
free reduction branchless and fixes a canonical letter order.  All
enumeration is length-then-lexicographic on this encoding, so every
downstream floating-point reduction sees elements in the same order.

Words serialize as strings over ``a..z`` (generators) and ``A..Z``
(inverses); the identity serializes as ``"1"``.

Everything here is immutable and every operation is a pure function, so the
module is safe to use from concurrent contexts.  Sphere enumeration can be
partitioned by first letter and the partitions merged in letter order to
recover the canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator

DEFAULT_BUDGET = 10**7


class BudgetError(Exception):
    """An enumeration would exceed the configured element budget."""

    def __init__(self, requested: int, budget: int):
        super().__init__(
            f"enumeration of {requested} elements exceeds budget {budget}"
        )
        self.requested = requested
        self.budget = budget


def inverse_letter(i: int) -> int:
    return i ^ 1


@total_ordering
@dataclass(frozen=True)
class Word:
    """A freely reduced word; the empty tuple is the identity."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.letters, self.letters[1:]):
            if a == b ^ 1:
                raise ValueError(f"word {self.letters} is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __lt__(self, other: "Word") -> bool:
        return (len(self.letters), self.letters) < (
            len(other.letters),
            other.letters,
        )

    def __str__(self) -> str:
        return word_to_str(self)

    def __repr__(self) -> str:
        return f"Word({word_to_str(self)!r})"

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def prefix(self, k: int) -> "Word":
        return Word(self.letters[:k])

    def inverse(self) -> "Word":
        return Word(tuple(x ^ 1 for x in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return mul(self, other)


IDENTITY = Word(())


def reduce_letters(letters: Iterable[int]) -> Word:
    """Freely reduce an arbitrary letter sequence (stack algorithm)."""
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == x ^ 1:
            stack.pop()
        else:
            stack.append(x)
    return Word(tuple(stack))


def mul(g: Word, h: Word) -> Word:
    """Reduced product.  Only the junction can cancel for reduced inputs."""
    a, b = g.letters, h.letters
    i, j = len(a), 0
    while i > 0 and j < len(b) and a[i - 1] == b[j] ^ 1:
        i -= 1
        j += 1
    return Word(a[:i] + b[j:])


def common_prefix_len(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    t = 0
    for x, y in zip(a, b):
        if x != y:
            break
        t += 1
    return t


def gromov_product(g: Word, h: Word) -> int:
    """(g, h) at the identity basepoint: (|g| + |h| - |g^-1 h|) / 2.

    On the tree this equals the longest common prefix length of g and h,
    which tests verify independently.
    """
    d = len(g) + len(h) - len(mul(g.inverse(), h))
    if d % 2:  # impossible for genuine reduced words
        raise AssertionError(f"odd Gromov product numerator for {g}, {h}")
    return d // 2


def word_to_str(w: Word) -> str:
    if not w.letters:
        return "1"
    out = []
    for x in w.letters:
        j = x >> 1
        out.append(chr(ord("A" if x & 1 else "a") + j))
    return "".join(out)


def word_from_str(s: str, n: int | None = None) -> Word:
    """Parse a word string; the input is reduced if necessary.

    ``"1"`` and ``""`` both denote the identity.  With ``n`` given, letters
    outside the rank-n alphabet raise ValueError.
    """
    if s in ("1", ""):
        return IDENTITY
    letters = []
    for ch in s:
        if "a" <= ch <= "z":
            x = 2 * (ord(ch) - ord("a"))
        elif "A" <= ch <= "Z":
            x = 2 * (ord(ch) - ord("A")) + 1
        else:
            raise ValueError(f"invalid word character {ch!r} in {s!r}")
        if n is not None and x >= 2 * n:
            raise ValueError(f"letter {ch!r} outside rank-{n} alphabet")
        letters.append(x)
    return reduce_letters(letters)


@dataclass(frozen=True)
class FreeGroup:
    """Rank and alphabet bookkeeping for F_n, n >= 2.

    The rank is capped at 26 so that the a..z serialization is total.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not (2 <= self.n <= 26):
            raise ValueError(f"rank must be an integer in 2..26, got {self.n}")

    @property
    def alphabet_size(self) -> int:
        return 2 * self.n

    def generator(self, j: int) -> Word:
        if not (0 <= j < self.n):
            raise ValueError(f"generator index {j} out of range for rank {self.n}")
        return Word((2 * j,))

    def check_letters(self, letters: Iterable[int]) -> None:
        for x in letters:
            if not isinstance(x, int) or not (0 <= x < 2 * self.n):
                raise ValueError(f"letter {x} outside alphabet of size {2 * self.n}")

    def reduce(self, letters: Iterable[int]) -> Word:
        letters = tuple(letters)
        self.check_letters(letters)
        return reduce_letters(letters)

    def word(self, s: str) -> Word:
        return word_from_str(s, self.n)

    def sphere_count(self, m: int) -> int:
        if m < 0:
            raise ValueError("negative radius")
        if m == 0:
            return 1
        return 2 * self.n * (2 * self.n - 1) ** (m - 1)

    def growth_count(self, R: int) -> int:
        """|B_R| by the geometric closed form, exact integers."""
        if R < 0:
            raise ValueError("negative radius")
        if R == 0:
            return 1
        q = 2 * self.n - 1
        return 1 + 2 * self.n * (q**R - 1) // (q - 1)

    def iter_sphere(self, m: int) -> Iterator[Word]:
        """All reduced words of length m, lexicographic."""
        if m == 0:
            yield IDENTITY
            return
        two_n = 2 * self.n

        def rec(prefix: tuple[int, ...]):
            if len(prefix) == m:
                yield Word(prefix)
                return
            last = prefix[-1] if prefix else None
            for x in range(two_n):
                if last is not None and x == last ^ 1:
                    continue
                yield from rec(prefix + (x,))
        yield from rec(())

    def sphere(self, m: int, budget: int = DEFAULT_BUDGET) -> list[Word]:
        count = self.sphere_count(m)
        if count > budget:
            raise BudgetError(count, budget)
        words = list(self.iter_sphere(m))
        assert len(words) == count
        return words

    def iter_ball(self, R: int) -> Iterator[Word]:
        for m in range(R + 1):
            yield from self.iter_sphere(m)

    def ball(self, R: int, budget: int = DEFAULT_BUDGET) -> list[Word]:
        count = self.growth_count(R)
        if count > budget:
            raise BudgetError(count, budget)
        return list(self.iter_ball(R))
