"""Ground sets, subsets as bitmasks, and exact rational rank functions.

Subsets of a ground set are plain ints: bit i of a mask corresponds to
element i of the ground set's label tuple.  All rank values are
`fractions.Fraction`; nothing in this package ever touches floats, because
the constructions downstream certify exact equalities (zero modular defect,
zero common information) that floating point cannot witness.

The canonical subset order used everywhere for deterministic iteration and
tie-breaking is: by popcount first, then by mask value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    DuplicateSubset,
    EmptyRestriction,
    FullGroundSet,
    GroundMismatch,
    MissingSubset,
    NegativeValue,
    NotValidated,
)

Mask = int
RationalLike = Union[int, Fraction, str]

MAX_GROUND = 20

_LABEL_FORBIDDEN = set(" \t{}=#")


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions or 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@lru_cache(maxsize=None)
def canonical_masks(n: int) -> tuple[Mask, ...]:
    """All masks over an n-element ground in canonical order."""
    return tuple(sorted(range(1 << n), key=lambda m: (m.bit_count(), m)))


def canonical_sorted(masks: Iterable[Mask]) -> tuple[Mask, ...]:
    return tuple(sorted(set(masks), key=lambda m: (m.bit_count(), m)))


def iter_bits(mask: Mask) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class GroundSet:
    """Ordered tuple of distinct element labels, at most MAX_GROUND of them.

    Labels may not contain whitespace, braces, '=' or '#' so that every
    ground set serializes unambiguously in the text model formats.
    """

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("ground set must have at least one element")
        if len(labels) > MAX_GROUND:
            raise ValueError(f"ground set larger than {MAX_GROUND} elements")
        for lab in labels:
            if not isinstance(lab, str) or not lab:
                raise ValueError(f"bad element label: {lab!r}")
            if _LABEL_FORBIDDEN & set(lab):
                raise ValueError(f"label {lab!r} contains a reserved character")
        if len(set(labels)) != len(labels):
            raise ValueError("element labels must be distinct")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> Mask:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown element {label!r}") from None

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def singleton(self, label: str) -> Mask:
        return 1 << self.index(label)

    def mask_of(self, labels: Iterable[str]) -> Mask:
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: Mask) -> tuple[str, ...]:
        self.check_mask(mask)
        return tuple(self.labels[i] for i in iter_bits(mask))

    def check_mask(self, mask: Mask) -> None:
        if mask < 0 or mask > self.full:
            raise ValueError(f"mask {mask:#x} out of range for {self.labels}")

    def subsets(self) -> tuple[Mask, ...]:
        """Every subset in canonical order (popcount, then value)."""
        return canonical_masks(self.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroundSet) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"GroundSet({list(self.labels)!r})"


def convert_mask(src: GroundSet, dst: GroundSet, mask: Mask) -> Mask:
    """Re-express a mask over `src` as a mask over `dst`, matching labels."""
    out = 0
    for i in iter_bits(mask):
        lab = src.labels[i]
        if lab not in dst:
            raise GroundMismatch(f"element {lab!r} missing from target ground")
        out |= 1 << dst.index(lab)
    return out


class Flags:
    """Validation cache; monotonically filled in by validate_polymatroid."""

    __slots__ = ("validated_polymatroid", "integer_valued", "is_matroid")

    def __init__(self):
        self.validated_polymatroid: bool | None = None
        self.integer_valued: bool | None = None
        self.is_matroid: bool | None = None

    def __repr__(self) -> str:
        return (f"Flags(polymatroid={self.validated_polymatroid}, "
                f"integer={self.integer_valued}, matroid={self.is_matroid})")


class SetFunction:
    """Total rational-valued rank table over all subsets of a ground set.

    The table always stores value 0 on the empty set.  Instances are
    immutable values apart from the flags cache, which only ever moves from
    unknown to known and carries no observable nondeterminism.
    """

    __slots__ = ("ground", "table", "flags")

    def __init__(self, ground: GroundSet, table: Sequence[Fraction]):
        if len(table) != (1 << ground.size):
            raise ValueError("rank table must cover all subsets")
        table = tuple(as_fraction(v) for v in table)
        if table[0] != 0:
            raise ValueError("rank of the empty set must be 0")
        self.ground = ground
        self.table = table
        self.flags = Flags()

    def rank(self, mask: Mask) -> Fraction:
        return self.table[mask]

    __call__ = rank

    def rank_of(self, labels: Iterable[str]) -> Fraction:
        return self.table[self.ground.mask_of(labels)]

    def require_polymatroid(self) -> None:
        if self.flags.validated_polymatroid is not True:
            raise NotValidated(
                "operation requires a set function validated as a polymatroid")

    def __eq__(self, other) -> bool:
        return (isinstance(other, SetFunction)
                and self.ground == other.ground
                and self.table == other.table)

    def __hash__(self) -> int:
        return hash((self.ground, self.table))

    def __repr__(self) -> str:
        entries = ", ".join(
            f"{{{' '.join(self.ground.labels_of(m))}}}:{self.table[m]}"
            for m in self.ground.subsets() if m)
        return f"SetFunction({entries})"


def make_set_function(
    ground: GroundSet,
    entries: Iterable[tuple[Mask, RationalLike]],
) -> SetFunction:
    """Build an unvalidated SetFunction from (mask, value) entries.

    Entries must cover every non-empty subset exactly once; the empty set is
    implicit with value 0 and may not be listed.  Raises MissingSubset,
    DuplicateSubset or NegativeValue accordingly.
    """
    size = 1 << ground.size
    table: list[Fraction | None] = [None] * size
    table[0] = Fraction(0)
    for mask, value in entries:
        ground.check_mask(mask)
        if mask == 0:
            raise DuplicateSubset("the empty set is implicit and has rank 0")
        if table[mask] is not None:
            raise DuplicateSubset(
                f"duplicate entry for {{{' '.join(ground.labels_of(mask))}}}")
        value = as_fraction(value)
        if value < 0:
            raise NegativeValue(
                f"negative rank {value} on "
                f"{{{' '.join(ground.labels_of(mask))}}}")
        table[mask] = value
    for mask in range(1, size):
        if table[mask] is None:
            raise MissingSubset(
                f"no entry for {{{' '.join(ground.labels_of(mask))}}}")
    return SetFunction(ground, table)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Violation:
    """One failed axiom with the witnessing subsets."""
    axiom: str  # "non-negativity" | "monotonicity" | "submodularity"
    subsets: tuple[Mask, ...]


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]
    integer_valued: bool
    is_matroid: bool
    modular: bool | None
    flat_modular: bool | None


def validate_polymatroid(sf: SetFunction) -> ValidationReport:
    """Full-enumeration axiom scan; stamps the flags cache.

    Monotonicity and submodularity are checked through their local
    single-element forms, which are equivalent to the subset-pair axioms;
    the first witness per violated axiom (canonical scan order) is reported.
    """
    ground = sf.ground
    n = ground.size
    table = sf.table
    violations: list[Violation] = []

    for mask in ground.subsets():
        if table[mask] < 0:
            violations.append(Violation("non-negativity", (mask,)))
            break

    done = False
    for mask in ground.subsets():
        for i in range(n):
            if mask >> i & 1:
                continue
            if table[mask] > table[mask | (1 << i)]:
                violations.append(
                    Violation("monotonicity", (mask, mask | (1 << i))))
                done = True
                break
        if done:
            break

    done = False
    for mask in ground.subsets():
        for i in range(n):
            if mask >> i & 1:
                continue
            a = mask | (1 << i)
            for j in range(i + 1, n):
                if mask >> j & 1:
                    continue
                b = mask | (1 << j)
                if table[a] + table[b] < table[a | b] + table[mask]:
                    violations.append(Violation("submodularity", (a, b)))
                    done = True
                    break
            if done:
                break
        if done:
            break

    valid = not violations
    integer = all(v.denominator == 1 for v in table)
    matroid = valid and integer and all(
        table[1 << i] <= 1 for i in range(n))

    modular: bool | None = None
    flat_modular: bool | None = None
    if valid:
        mu = [table[1 << i] for i in range(n)]
        modular = all(
            table[mask] == sum((mu[i] for i in iter_bits(mask)), Fraction(0))
            for mask in range(1 << n))
        sf.flags.validated_polymatroid = True
        sf.flags.integer_valued = integer
        sf.flags.is_matroid = matroid
        flat_list = flats(sf).members
        flat_modular = all(
            modular_defect(sf, f1, f2) == 0
            for k, f1 in enumerate(flat_list)
            for f2 in flat_list[k + 1:])
    else:
        sf.flags.validated_polymatroid = False
        sf.flags.integer_valued = integer
        sf.flags.is_matroid = False

    return ValidationReport(valid, tuple(violations), integer, matroid,
                            modular, flat_modular)


def polymatroid(ground: GroundSet | Iterable[str],
                values: Mapping[str, RationalLike]) -> SetFunction:
    """Convenience builder: ranks keyed by space-separated label strings.

    Validates the result and raises NotValidated if the axioms fail, so test
    fixtures can assume a usable polymatroid.
    """
    if not isinstance(ground, GroundSet):
        ground = GroundSet(ground)
    entries = [(ground.mask_of(key.split()), value)
               for key, value in values.items()]
    sf = make_set_function(ground, entries)
    report = validate_polymatroid(sf)
    if not report.valid:
        raise NotValidated(f"not a polymatroid: {report.violations[0]}")
    return sf


def free_matroid(labels: Iterable[str]) -> SetFunction:
    """Rank = cardinality on the given labels."""
    ground = GroundSet(labels)
    sf = SetFunction(
        ground, [Fraction(m.bit_count()) for m in range(1 << ground.size)])
    validate_polymatroid(sf)
    return sf


# --- closure, flats, defect, measure ----------------------------------------

def closure(pm: SetFunction, mask: Mask) -> Mask:
    """Smallest flat containing the given subset.

    Computed by saturating with zero-marginal elements; agrees with the
    intersection of all flats containing the subset.
    """
    pm.require_polymatroid()
    pm.ground.check_mask(mask)
    table = pm.table
    n = pm.ground.size
    current = mask
    changed = True
    while changed:
        changed = False
        for i in range(n):
            b = 1 << i
            if current & b:
                continue
            if table[current | b] == table[current]:
                current |= b
                changed = True
    return current


@dataclass(frozen=True)
class FlatFamily:
    """All flats of a polymatroid, canonically sorted.

    Closed under intersection and contains the ground set; contains the
    empty set exactly when no element has rank zero.
    """
    base: SetFunction
    members: tuple[Mask, ...]

    def __contains__(self, mask: Mask) -> bool:
        return mask in set(self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def flats(pm: SetFunction) -> FlatFamily:
    """Subsets whose proper supersets all have strictly larger rank."""
    pm.require_polymatroid()
    table = pm.table
    n = pm.ground.size
    members = [
        mask for mask in canonical_masks(n)
        if all(mask >> i & 1 or table[mask | (1 << i)] > table[mask]
               for i in range(n))
    ]
    return FlatFamily(pm, tuple(members))


def is_flat(pm: SetFunction, mask: Mask) -> bool:
    pm.require_polymatroid()
    pm.ground.check_mask(mask)
    table = pm.table
    return all(mask >> i & 1 or table[mask | (1 << i)] > table[mask]
               for i in range(pm.ground.size))


def modular_defect(pm: SetFunction, a: Mask, b: Mask) -> Fraction:
    """f(A)+f(B)-f(A&B)-f(A|B); non-negative, zero for modular pairs."""
    pm.require_polymatroid()
    t = pm.table
    return t[a] + t[b] - t[a & b] - t[a | b]


class Measure:
    """Additive non-negative weight per element, evaluated on masks."""

    __slots__ = ("ground", "weights")

    def __init__(self, ground: GroundSet, weights: Sequence[RationalLike]):
        if len(weights) != ground.size:
            raise ValueError("one weight per ground element required")
        ws = tuple(as_fraction(w) for w in weights)
        if any(w < 0 for w in ws):
            raise NegativeValue("measure weights must be non-negative")
        self.ground = ground
        self.weights = ws

    @classmethod
    def from_weights(cls, ground: GroundSet,
                     weights: Mapping[str, RationalLike]) -> "Measure":
        if set(weights) != set(ground.labels):
            raise ValueError("weights must cover exactly the ground elements")
        return cls(ground, [weights[lab] for lab in ground.labels])

    def __call__(self, mask: Mask) -> Fraction:
        self.ground.check_mask(mask)
        return sum((self.weights[i] for i in iter_bits(mask)), Fraction(0))

    def of(self, label: str) -> Fraction:
        return self.weights[self.ground.index(label)]

    def table(self) -> list[Fraction]:
        """Dense 2^n evaluation, for hot loops."""
        out = [Fraction(0)] * (1 << self.ground.size)
        for mask in range(1, len(out)):
            low = mask & -mask
            out[mask] = out[mask ^ low] + self.weights[low.bit_length() - 1]
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, Measure) and self.ground == other.ground
                and self.weights == other.weights)

    def __repr__(self) -> str:
        pairs = ", ".join(f"{lab}:{w}" for lab, w
                          in zip(self.ground.labels, self.weights))
        return f"Measure({pairs})"


def induced_measure(pm: SetFunction) -> Measure:
    """Measure with the polymatroid's singleton ranks as weights."""
    pm.require_polymatroid()
    return Measure(pm.ground,
                   [pm.table[1 << i] for i in range(pm.ground.size)])


# --- partitions, factor, contract, restrict -----------------------------------

class Partition:
    """Disjoint classes covering the ground set, each carrying a label.

    Classes are ordered by their smallest element index, so the identity
    partition preserves the ground order.
    """

    __slots__ = ("ground", "classes", "labels")

    def __init__(self, ground: GroundSet, classes: Iterable[Mask],
                 labels: Iterable[str] | None = None):
        classes = tuple(classes)
        if labels is None:
            labels = tuple(self._default_label(ground, c) for c in classes)
        else:
            labels = tuple(labels)
        if len(labels) != len(classes):
            raise ValueError("one label per class required")
        union = 0
        for c in classes:
            ground.check_mask(c)
            if c == 0:
                raise ValueError("partition classes must be non-empty")
            if union & c:
                raise ValueError("partition classes must be disjoint")
            union |= c
        if union != ground.full:
            raise ValueError("partition classes must cover the ground set")
        order = sorted(range(len(classes)),
                       key=lambda k: (classes[k] & -classes[k]))
        self.ground = ground
        self.classes = tuple(classes[k] for k in order)
        self.labels = tuple(labels[k] for k in order)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("class labels must be distinct")

    @staticmethod
    def _default_label(ground: GroundSet, mask: Mask) -> str:
        return "".join(ground.labels_of(mask))

    @classmethod
    def identity(cls, ground: GroundSet) -> "Partition":
        return cls(ground, [1 << i for i in range(ground.size)],
                   ground.labels)

    @classmethod
    def merge(cls, ground: GroundSet, mask: Mask,
              label: str | None = None) -> "Partition":
        """Single non-singleton class `mask`; all other elements stay solo."""
        ground.check_mask(mask)
        if mask == 0:
            raise ValueError("cannot merge the empty set")
        classes = [mask]
        labels = [label if label is not None
                  else cls._default_label(ground, mask)]
        for i in range(ground.size):
            if not mask >> i & 1:
                classes.append(1 << i)
                labels.append(ground.labels[i])
        return cls(ground, classes, labels)

    def class_of(self, element_index: int) -> int:
        for k, c in enumerate(self.classes):
            if c >> element_index & 1:
                return k
        raise ValueError("element not covered")  # unreachable by invariant

    def preimage(self, class_mask: Mask) -> Mask:
        """Union of the ground classes selected by a factor-side mask."""
        out = 0
        for k in iter_bits(class_mask):
            out |= self.classes[k]
        return out

    def __repr__(self) -> str:
        parts = " | ".join(" ".join(self.ground.labels_of(c))
                           for c in self.classes)
        return f"Partition({parts})"


def factor(pm: SetFunction, part: Partition) -> SetFunction:
    """Quotient rank function: class-set A maps to f(preimage of A)."""
    pm.require_polymatroid()
    if part.ground != pm.ground:
        raise GroundMismatch("partition is over a different ground set")
    new_ground = GroundSet(part.labels)
    k = len(part.classes)
    table = [pm.table[part.preimage(m)] for m in range(1 << k)]
    out = SetFunction(new_ground, table)
    report = validate_polymatroid(out)
    assert report.valid, "factor of a polymatroid must be a polymatroid"
    return out


def contract(pm: SetFunction, x: Mask) -> SetFunction:
    """Rank function A -> f(A|X) - f(X) on the complement of X."""
    pm.require_polymatroid()
    pm.ground.check_mask(x)
    if x == pm.ground.full:
        raise FullGroundSet("cannot contract the whole ground set")
    if x == 0:
        return pm
    keep = [i for i in range(pm.ground.size) if not x >> i & 1]
    new_ground = GroundSet(pm.ground.labels[i] for i in keep)
    base = pm.table[x]
    table = []
    for m in range(1 << len(keep)):
        lifted = x
        for j in iter_bits(m):
            lifted |= 1 << keep[j]
        table.append(pm.table[lifted] - base)
    out = SetFunction(new_ground, table)
    report = validate_polymatroid(out)
    assert report.valid, "contract of a polymatroid must be a polymatroid"
    return out


def restrict(sf: SetFunction, mask: Mask) -> SetFunction:
    """Rank table projected onto the subsets of the given set."""
    sf.ground.check_mask(mask)
    if mask == 0:
        raise EmptyRestriction("cannot restrict to the empty set")
    keep = list(iter_bits(mask))
    new_ground = GroundSet(sf.ground.labels[i] for i in keep)
    table = []
    for m in range(1 << len(keep)):
        src = 0
        for j in iter_bits(m):
            src |= 1 << keep[j]
        table.append(sf.table[src])
    out = SetFunction(new_ground, table)
    if sf.flags.validated_polymatroid:
        # axioms restrict to subsets, so the flags carry over directly
        out.flags.validated_polymatroid = True
        out.flags.integer_valued = sf.flags.integer_valued
        out.flags.is_matroid = sf.flags.is_matroid
    return out


# --- extension relations --------------------------------------------------------

def is_extension_of(g: SetFunction, f: SetFunction) -> bool:
    """True when g's ground contains f's and the tables agree on f's subsets."""
    if any(lab not in g.ground for lab in f.ground.labels):
        return False
    for mask in range(1 << f.ground.size):
        if g.table[convert_mask(f.ground, g.ground, mask)] != f.table[mask]:
            return False
    return True


def same_rank_function(a: SetFunction, b: SetFunction) -> bool:
    """Equality up to ground-set ordering (labels matched by name)."""
    if set(a.ground.labels) != set(b.ground.labels):
        return False
    for mask in range(1 << a.ground.size):
        if a.table[mask] != b.table[convert_mask(a.ground, b.ground, mask)]:
            return False
    return True
