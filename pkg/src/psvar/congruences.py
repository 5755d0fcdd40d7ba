"""Congruences of finite algebras: generation, validation, the lattice."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import FiniteAlgebra, Homomorphism, index_tuple
from .errors import (
    CarrierMismatchError,
    NotACongruenceError,
    PsvarError,
    ResourceLimitError,
)
from .partitions import Partition, meet_partitions

DEFAULT_ENUMERATION_BOUND = 10


@dataclass(frozen=True)
class Congruence:
    algebra: FiniteAlgebra
    partition: Partition

    @property
    def class_of(self):
        return self.partition.class_of


def is_congruence(alg: FiniteAlgebra, p: Partition):
    """Exhaustive compatibility check.

    Returns ``(True, None)`` or ``(False, (symbol, args, args'))`` where the
    two argument tuples are componentwise related but their values are not.
    Single-coordinate substitution suffices for equivalence relations; the
    returned tuples differ in one coordinate.
    """
    if p.carrier_size != alg.size:
        raise CarrierMismatchError("partition carrier does not match algebra size")
    labels = p.class_of
    classes = p.classes()
    for sym_index, (name, arity) in enumerate(alg.signature.symbols):
        for args in itertools.product(range(alg.size), repeat=arity):
            v = alg.apply(sym_index, args)
            for i in range(arity):
                for b in classes[labels[args[i]]]:
                    if b == args[i]:
                        continue
                    other = args[:i] + (b,) + args[i + 1 :]
                    if labels[alg.apply(sym_index, other)] != labels[v]:
                        return False, (name, args, other)
    return True, None


def congruence_generated(alg: FiniteAlgebra, pairs) -> Congruence:
    """Least congruence containing ``pairs``.

    Union-find merges followed by a fixpoint re-scan of all operation
    tables: whenever two argument tuples differing in one coordinate by a
    merged pair produce unmerged values, merge them and scan again.
    """
    parent = list(range(alg.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        if rx > ry:
            rx, ry = ry, rx
        parent[ry] = rx
        return True

    for x, y in pairs:
        if not (0 <= x < alg.size and 0 <= y < alg.size):
            raise PsvarError(f"pair ({x},{y}) outside domain")
        union(x, y)

    changed = True
    while changed:
        changed = False
        roots: dict[int, list[int]] = {}
        for x in range(alg.size):
            roots.setdefault(find(x), []).append(x)
        for sym_index, (_, arity) in enumerate(alg.signature.symbols):
            for args in itertools.product(range(alg.size), repeat=arity):
                v = alg.apply(sym_index, args)
                for i in range(arity):
                    for b in roots[find(args[i])]:
                        if b == args[i]:
                            continue
                        w = alg.apply(sym_index, args[:i] + (b,) + args[i + 1 :])
                        if union(v, w):
                            changed = True
    return Congruence(alg, Partition.from_labels([find(x) for x in range(alg.size)]))


def meet(a: Congruence, b: Congruence) -> Congruence:
    if a.algebra is not b.algebra and a.algebra.key() != b.algebra.key():
        raise PsvarError("congruences live on different algebras")
    return Congruence(a.algebra, meet_partitions(a.partition, b.partition))


def join(a: Congruence, b: Congruence) -> Congruence:
    if a.algebra is not b.algebra and a.algebra.key() != b.algebra.key():
        raise PsvarError("congruences live on different algebras")
    pairs = []
    for p in (a.partition, b.partition):
        classes = p.classes()
        for cls in classes:
            pairs.extend((cls[0], x) for x in cls[1:])
    return congruence_generated(a.algebra, pairs)


def all_congruences(alg: FiniteAlgebra, bound: int = DEFAULT_ENUMERATION_BOUND):
    """The full congruence lattice.

    Principal congruences for every pair, closed under pairwise joins.
    Includes the identity and full relations.  Raises above ``bound``
    because the principal-plus-joins closure is quadratic in lattice size.
    """
    if alg.size > bound:
        raise ResourceLimitError(
            f"congruence enumeration bound {bound} exceeded (size {alg.size})"
        )
    identity = Partition.identity(alg.size)
    found = {identity}
    principal = []
    for x in range(alg.size):
        for y in range(x + 1, alg.size):
            c = congruence_generated(alg, [(x, y)]).partition
            if c not in found:
                found.add(c)
                principal.append(c)
    worklist = list(found)
    while worklist:
        p = worklist.pop()
        for q in principal:
            j = join(
                Congruence(alg, p), Congruence(alg, q)
            ).partition
            if j not in found:
                found.add(j)
                worklist.append(j)
    return [Congruence(alg, p) for p in sorted(found, key=lambda p: p.class_of)]


def quotient_algebra(alg: FiniteAlgebra, theta: Congruence):
    """Quotient with canonically labeled classes, plus the quotient map.

    Raises :class:`NotACongruenceError` with a violating witness when the
    partition is not compatible with the operations.
    """
    ok, witness = is_congruence(alg, theta.partition)
    if not ok:
        raise NotACongruenceError("partition is not a congruence", witness=witness)
    labels = theta.partition.class_of
    nclasses = theta.partition.num_classes
    reps = [None] * nclasses
    for x in range(alg.size):
        if reps[labels[x]] is None:
            reps[labels[x]] = x
    tables = []
    for sym_index, (_, arity) in enumerate(alg.signature.symbols):
        table = []
        for flat in range(nclasses**arity):
            args = index_tuple(flat, nclasses, arity)
            table.append(labels[alg.apply(sym_index, [reps[a] for a in args])])
        tables.append(tuple(table))
    quot = FiniteAlgebra(
        alg.signature, nclasses, tuple(tables), name=f"{alg.name or '?'}/theta"
    )
    return quot, Homomorphism(alg, quot, labels)
