"""Canonical set partitions of {0, ..., n-1}.

The canonical form labels classes by first occurrence: scanning elements
0, 1, 2, ... the first element of each new class receives the smallest
unused label.  Two partitions represent the same equivalence relation
iff their ``class_of`` sequences are identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CarrierMismatchError, PsvarError


def canonical_labels(labels) -> tuple[int, ...]:
    relabel: dict = {}
    out = []
    for lab in labels:
        if lab not in relabel:
            relabel[lab] = len(relabel)
        out.append(relabel[lab])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    carrier_size: int
    class_of: tuple[int, ...]

    def __post_init__(self):
        if len(self.class_of) != self.carrier_size:
            raise PsvarError("class_of length must equal carrier_size")
        if self.class_of != canonical_labels(self.class_of):
            raise PsvarError("partition labels are not in canonical (first-occurrence) form")

    @staticmethod
    def from_labels(labels) -> "Partition":
        labels = canonical_labels(labels)
        return Partition(len(labels), labels)

    @staticmethod
    def from_classes(n: int, classes) -> "Partition":
        labels = [None] * n
        for i, cls in enumerate(classes):
            for x in cls:
                if labels[x] is not None:
                    raise PsvarError(f"element {x} in two classes")
                labels[x] = i
        if any(lab is None for lab in labels):
            raise PsvarError("classes do not cover the carrier")
        return Partition.from_labels(labels)

    @staticmethod
    def identity(n: int) -> "Partition":
        return Partition(n, tuple(range(n)))

    @staticmethod
    def full(n: int) -> "Partition":
        return Partition(n, (0,) * n)

    @property
    def num_classes(self) -> int:
        return (max(self.class_of) + 1) if self.class_of else 0

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for x, lab in enumerate(self.class_of):
            out[lab].append(x)
        return out

    def related(self, x: int, y: int) -> bool:
        return self.class_of[x] == self.class_of[y]

    def pairs(self) -> frozenset:
        return frozenset(
            (x, y)
            for x in range(self.carrier_size)
            for y in range(self.carrier_size)
            if self.class_of[x] == self.class_of[y]
        )


def refines(a: Partition, b: Partition) -> bool:
    """True iff every class of ``a`` is contained in a class of ``b``."""
    if a.carrier_size != b.carrier_size:
        raise CarrierMismatchError(
            f"carrier sizes differ: {a.carrier_size} vs {b.carrier_size}"
        )
    image: dict[int, int] = {}
    for la, lb in zip(a.class_of, b.class_of):
        if image.setdefault(la, lb) != lb:
            return False
    return True


def meet_partitions(a: Partition, b: Partition) -> Partition:
    """Intersection of the two equivalence relations."""
    if a.carrier_size != b.carrier_size:
        raise CarrierMismatchError("carrier sizes differ")
    return Partition.from_labels(list(zip(a.class_of, b.class_of)))
