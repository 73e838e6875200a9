"""The boundary of the 2n-valent tree: infinite reduced words.

Cylinder sets (finite reduced prefixes), the canonical visual metric
``exp(-epsilon * (. , .))``, the normalized Hausdorff measure

    mu([w]) = (1/2n) * (1/(2n-1))^(|w|-1),        mu([empty]) = 1,

the boundary action of the group, and exact pushforward measures g_*mu.

Measures are exact ``fractions.Fraction`` values throughout; the visual
metric is the only float-valued object in the module.  Distances carry a
default relative tolerance of 1e-12 in downstream float comparisons.

Boundary points are restricted to eventually periodic infinite words
``head . period^infinity``: these are dense, exactly representable, and
enough for every convergence statement the package checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .words import (
    DEFAULT_BUDGET,
    FreeGroup,
    IDENTITY,
    Word,
    common_prefix_len,
    mul,
    word_from_str,
    word_to_str,
)


@dataclass(frozen=True)
class VisualStructure:
    """Visual parameter and derived constants for one group."""

    group: FreeGroup
    epsilon: float = 1.0
    q: float = field(init=False)        # exp(-epsilon)
    entropy: float = field(init=False)  # log(2n - 1), the growth rate

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        object.__setattr__(self, "q", math.exp(-self.epsilon))
        object.__setattr__(
            self, "entropy", math.log(2 * self.group.n - 1)
        )


@dataclass(frozen=True)
class Cylinder:
    """Clopen set of boundary points sharing a finite reduced prefix."""

    prefix: Word = IDENTITY

    @property
    def depth(self) -> int:
        return len(self.prefix)

    def __str__(self) -> str:
        return f"[{word_to_str(self.prefix)}]"

    def contains(self, other: "Cylinder") -> bool:
        p, q = self.prefix.letters, other.prefix.letters
        return len(p) <= len(q) and q[: len(p)] == p

    def disjoint(self, other: "Cylinder") -> bool:
        return not self.contains(other) and not other.contains(self)

    def children(self, group: FreeGroup) -> list["Cylinder"]:
        """The 2n-1 (or 2n at the root) reduced one-letter extensions."""
        last = self.prefix.letters[-1] if self.prefix.letters else None
        out = []
        for x in range(2 * group.n):
            if last is not None and x == last ^ 1:
                continue
            out.append(Cylinder(Word(self.prefix.letters + (x,))))
        return out


@dataclass(frozen=True)
class BoundaryPoint:
    """The eventually periodic infinite reduced word head.period^inf."""

    head: Word
    period: Word

    def __post_init__(self):
        if not self.period.letters:
            raise ValueError("period must be nonempty")
        # head.period.period must be reduced as written, i.e. neither
        # junction cancels; that guarantees an infinite reduced word.
        if len(mul(self.head, self.period)) != len(self.head) + len(self.period):
            raise ValueError("head/period junction cancels")
        if len(mul(self.period, self.period)) != 2 * len(self.period):
            raise ValueError("period/period junction cancels")
        # strip redundant trailing period copies so repeated boundary
        # actions do not inflate the head
        h, p = self.head.letters, self.period.letters
        while len(h) >= len(p) and h[-len(p):] == p:
            h = h[: -len(p)]
        object.__setattr__(self, "head", Word(h))

    def letter(self, i: int) -> int:
        h = len(self.head)
        if i < h:
            return self.head.letters[i]
        return self.period.letters[(i - h) % len(self.period)]

    def prefix(self, k: int) -> Word:
        return Word(tuple(self.letter(i) for i in range(k)))

    def __str__(self) -> str:
        return f"{word_to_str(self.head)}.({word_to_str(self.period)})^inf"


def cylinder_measure(c: Cylinder, group: FreeGroup) -> Fraction:
    k = c.depth
    if k == 0:
        return Fraction(1)
    n2 = 2 * group.n
    return Fraction(1, n2) * Fraction(1, n2 - 1) ** (k - 1)


def depth_mass(k: int, group: FreeGroup) -> Fraction:
    """Mass of any single depth-k cylinder."""
    if k == 0:
        return Fraction(1)
    return Fraction(1, 2 * group.n) * Fraction(1, 2 * group.n - 1) ** (k - 1)


def boundary_action(g: Word, omega: BoundaryPoint) -> BoundaryPoint:
    """g . omega as an eventually periodic point with the same period."""
    p = len(omega.period)
    reps = len(g) // p + 1  # enough that cancellation stays in the expansion
    expanded = Word(omega.head.letters + omega.period.letters * reps)
    return BoundaryPoint(mul(g, expanded), omega.period)


def _point_agree_len(x: BoundaryPoint, y: BoundaryPoint) -> int | None:
    """Common prefix length of two points; None means they are equal.

    Eventually periodic words agreeing beyond both heads plus two full
    least-common-multiple windows of the periods are equal.
    """
    window = math.lcm(len(x.period), len(y.period))
    limit = len(x.head) + len(y.head) + 2 * window
    for i in range(limit):
        if x.letter(i) != y.letter(i):
            return i
    return None


def visual_distance(
    x: Union[Cylinder, BoundaryPoint],
    y: Union[Cylinder, BoundaryPoint],
    vs: VisualStructure,
) -> float:
    """exp(-epsilon t), t the common prefix length.

    Cylinder arguments must be disjoint (and a point must not lie in a
    cylinder argument), otherwise the prefixes do not determine the
    distance and a ValueError is raised.  Identical points have distance 0.
    """
    if isinstance(x, Cylinder) and isinstance(y, Cylinder):
        if not x.disjoint(y):
            raise ValueError(f"cylinders {x} and {y} overlap")
        t = common_prefix_len(x.prefix.letters, y.prefix.letters)
    elif isinstance(x, BoundaryPoint) and isinstance(y, BoundaryPoint):
        agree = _point_agree_len(x, y)
        if agree is None:
            return 0.0
        t = agree
    else:
        point, cyl = (x, y) if isinstance(x, BoundaryPoint) else (y, x)
        t = common_prefix_len(point.prefix(cyl.depth).letters, cyl.prefix.letters)
        if t == cyl.depth:
            raise ValueError(f"point {point} lies in cylinder {cyl}")
    return math.exp(-vs.epsilon * t)


def preimage_cylinder(g: Word, c: Cylinder, group: FreeGroup) -> list[Cylinder]:
    """Pairwise disjoint cylinders with union {xi : g.xi in c}.

    Case analysis on how much of c's prefix w survives against g:

    * w not a full prefix of g: the preimage is the single cylinder
      [g^-1 w] (reduced product), because the cancellation in g.xi is
      pinned at the first disagreement of g and w.
    * w a full prefix of g (including w = g): g.xi keeps the prefix w
      exactly when the cancellation does not reach past |g| - |w|, i.e.
      the preimage is the complement of [prefix_{|g|-|w|+1}(g^-1)],
      written out as its canonical disjoint cylinder cover.
    """
    w = c.prefix
    k, m = len(w), len(g)
    if k == 0:
        return [Cylinder(IDENTITY)]
    ginv = g.inverse()
    ell = common_prefix_len(g.letters, w.letters)
    if ell < k:
        return [Cylinder(mul(ginv, w))]
    # complement of [u], u = prefix_{m-k+1}(g^-1), of positive length
    u = ginv.letters[: m - k + 1]
    out = []
    for t in range(len(u)):
        for x in range(2 * group.n):
            if x == u[t]:
                continue
            if t >= 1 and x == u[t - 1] ^ 1:
                continue
            out.append(Cylinder(Word(u[:t] + (x,))))
    return out


def pushforward_mass(g: Word, c: Cylinder, group: FreeGroup) -> Fraction:
    """(g_* mu)(c) = mu{xi : g.xi in c}, exact."""
    return sum(
        (cylinder_measure(d, group) for d in preimage_cylinder(g, c, group)),
        Fraction(0),
    )


class CylinderMeasure:
    """A probability measure tabulated on the depth-k cylinder partition."""

    def __init__(self, group: FreeGroup, depth: int, table: dict[Word, Fraction]):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        expected = group.sphere_count(depth)
        if len(table) != expected:
            raise ValueError(
                f"table has {len(table)} entries, expected {expected} at depth {depth}"
            )
        total = Fraction(0)
        for w, mass in table.items():
            if len(w) != depth:
                raise ValueError(f"key {w!r} has depth {len(w)}, table depth {depth}")
            if mass < 0:
                raise ValueError(f"negative mass at {w!r}")
            total += mass
        if total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        self.group = group
        self.depth = depth
        self.table = dict(sorted(table.items()))

    def mass(self, c: Cylinder | Word) -> Fraction:
        w = c.prefix if isinstance(c, Cylinder) else c
        if len(w) == self.depth:
            return self.table[w]
        if len(w) < self.depth:
            p = w.letters
            return sum(
                (m for u, m in self.table.items() if u.letters[: len(p)] == p),
                Fraction(0),
            )
        raise ValueError(f"cylinder deeper than table depth {self.depth}")

    def to_json_obj(self) -> dict:
        return {
            "depth": self.depth,
            "masses": {
                word_to_str(w): f"{m.numerator}/{m.denominator}"
                for w, m in self.table.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj: dict, group: FreeGroup) -> "CylinderMeasure":
        table = {
            word_from_str(k, group.n): Fraction(v) for k, v in obj["masses"].items()
        }
        return cls(group, obj["depth"], table)

    @classmethod
    def from_json(cls, text: str, group: FreeGroup) -> "CylinderMeasure":
        return cls.from_json_obj(json.loads(text), group)


def pushforward(
    g: Word, depth: int, group: FreeGroup, budget: int = DEFAULT_BUDGET
) -> CylinderMeasure:
    """The measure g_*mu on the depth-k partition, exact."""
    if depth < 1:
        raise ValueError("pushforward needs depth >= 1")
    table = {
        w: pushforward_mass(g, Cylinder(w), group)
        for w in group.sphere(depth, budget=budget)
    }
    return CylinderMeasure(group, depth, table)


def comparability_constants(
    g: Word, depth: int, group: FreeGroup, budget: int = DEFAULT_BUDGET
) -> tuple[Fraction, Fraction]:
    """min and max of (g_*mu)([w]) / mu([w]) over depth-k cylinders."""
    if depth < 1:
        raise ValueError("comparability needs depth >= 1")
    base = Fraction(1, 2 * group.n) * Fraction(1, 2 * group.n - 1) ** (depth - 1)
    ratios = [
        pushforward_mass(g, Cylinder(w), group) / base
        for w in group.sphere(depth, budget=budget)
    ]
    return min(ratios), max(ratios)


def weak_distance_to_delta(
    g: Word,
    omega: BoundaryPoint,
    depth: int,
    group: FreeGroup,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Total variation distance sum |g_*mu([w]) - delta_omega([w])| at depth k."""
    if depth < 1:
        raise ValueError("weak distance needs depth >= 1")
    measure = pushforward(g, depth, group, budget=budget)
    target = omega.prefix(depth)
    return sum(
        (abs(m - (1 if w == target else 0)) for w, m in measure.table.items()),
        Fraction(0),
    )
