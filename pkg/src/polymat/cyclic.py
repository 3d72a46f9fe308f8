"""Cyclic flats: the predicate, the peeling procedure, and their lattice.

A flat C is cyclic when every element i in C has f(i) = 0 or
f(C) - f(C-i) < f(i).  Every flat contains a unique maximal cyclic flat,
reachable by repeatedly peeling off any element x with f(x) > 0 and
f(F) = f(x) + f(F-x); the result does not depend on the peeling order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import Mask, SetFunction, closure, is_flat, iter_bits
from .errors import NotAFlat


def is_cyclic_flat(pm: SetFunction, mask: Mask) -> bool:
    pm.require_polymatroid()
    if not is_flat(pm, mask):
        return False
    t = pm.table
    for i in iter_bits(mask):
        fi = t[1 << i]
        if fi == 0:
            continue
        if t[mask] - t[mask ^ (1 << i)] >= fi:
            return False
    return True


def max_cyclic_flat(pm: SetFunction, flat: Mask,
                    order: Sequence[int] | None = None) -> Mask:
    """Unique maximal cyclic flat inside a flat, found by peeling.

    `order` optionally reprioritizes which removable element is peeled
    first; the default is the lowest index.  The result is order-invariant
    (the test suite verifies this rather than assuming it).
    """
    pm.require_polymatroid()
    if not is_flat(pm, flat):
        raise NotAFlat(
            f"{{{' '.join(pm.ground.labels_of(flat))}}} is not a flat")
    t = pm.table
    priorities = list(order) if order is not None else list(
        range(pm.ground.size))
    current = flat
    while True:
        for i in priorities:
            b = 1 << i
            if current & b and t[b] > 0 and \
                    t[current] == t[b] + t[current ^ b]:
                current ^= b
                break
        else:
            return current


@dataclass(frozen=True)
class CyclicFlatLattice:
    """All cyclic flats with explicit meet/join tables.

    join(C1, C2) is the closure of the union; meet(C1, C2) is the maximal
    cyclic flat inside the intersection, which can be strictly smaller than
    the intersection itself.
    """
    base: SetFunction
    members: tuple[Mask, ...]
    meet: dict[tuple[Mask, Mask], Mask]
    join: dict[tuple[Mask, Mask], Mask]

    def meet_of(self, a: Mask, b: Mask) -> Mask:
        return self.meet[(a, b)]

    def join_of(self, a: Mask, b: Mask) -> Mask:
        return self.join[(a, b)]


def cyclic_lattice(pm: SetFunction) -> CyclicFlatLattice:
    pm.require_polymatroid()
    members = tuple(m for m in pm.ground.subsets() if is_cyclic_flat(pm, m))
    meet: dict[tuple[Mask, Mask], Mask] = {}
    join: dict[tuple[Mask, Mask], Mask] = {}
    for a in members:
        for b in members:
            if (b, a) in meet:
                meet[(a, b)] = meet[(b, a)]
                join[(a, b)] = join[(b, a)]
                continue
            meet[(a, b)] = max_cyclic_flat(pm, a & b)
            join[(a, b)] = closure(pm, a | b)
    return CyclicFlatLattice(pm, members, meet, join)
