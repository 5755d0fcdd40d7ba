"""Pseudovarieties of finite algebras as congruence filters.

A pseudovariety is presented either by generators (a finite list of
finite algebras) or by a congruence filter: per arity k, an antichain of
congruences of the k-generated free algebra, standing for its upset.
Membership verdicts come with verifiable certificates.

All computation instantiates "finitely generated" as "finite" and fixes
the containing variety as the variety generated by the supplied base
algebras, so every free algebra involved is finite.  Filters are
truncated at an arity bound and substitutions at a tuple-length bound;
every report states the bounds used.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .algebra import (
    DEFAULT_MAX_ELEMENTS,
    FiniteAlgebra,
    Homomorphism,
    Term,
    are_isomorphic,
    direct_product,
    minimal_generating_set,
    same_signature,
    subuniverse_generated,
    tuple_index,
)
from .congruences import all_congruences, quotient_algebra
from .errors import BoundExceededError, PsvarError, ResourceLimitError
from .freealg import (
    DEFAULT_ARITY_BOUND,
    DEFAULT_TUPLE_BOUND,
    EvaluationKernel,
    FreeAlgebra,
    IllDefinedWitness,
    compose_index,
    evaluation_kernel_trusted,
    free_algebra,
    inverse_substitution,
    kernel_of_evaluation,
)
from .partitions import Partition, meet_partitions, refines


class NotInVarietyError(PsvarError):
    """A class member does not lie in the variety of the base algebras."""


# ---------------------------------------------------------------------------
# Classes of algebras up to isomorphism
# ---------------------------------------------------------------------------

@dataclass
class ClassOfAlgebras:
    representatives: tuple[FiniteAlgebra, ...]
    universe_bound: int

    def __post_init__(self):
        self.representatives = tuple(self.representatives)
        if self.representatives:
            same_signature(*self.representatives)


class IsoClassPool:
    """Deduplicated pool of algebras up to isomorphism.

    The canonical representative of a class is the smallest discovered
    copy under the (size, tables) order, so listings are deterministic.
    """

    def __init__(self):
        self.reps: list[FiniteAlgebra] = []
        self._invariants: list[tuple] = []
        self._by_key: dict[tuple, int | None] = {}

    @staticmethod
    def _invariant(alg: FiniteAlgebra) -> tuple:
        """Cheap isomorphism invariant: size plus, per operation, the
        sorted multiset of value-frequency profiles of the rows."""
        rows = []
        for (_, arity), table in zip(alg.signature.symbols, alg.tables):
            step = alg.size ** (arity - 1)
            profile = sorted(
                tuple(sorted(
                    table[r * step:(r + 1) * step].count(v)
                    for v in range(alg.size)
                ))
                for r in range(alg.size)
            )
            rows.append(tuple(profile))
        return (alg.size, tuple(rows))

    def find(self, alg: FiniteAlgebra):
        key = alg.key()
        if key in self._by_key:
            return self._by_key[key]
        inv = self._invariant(alg)
        found = None
        for i, rep in enumerate(self.reps):
            if self._invariants[i] == inv and are_isomorphic(rep, alg) is not None:
                found = i
                break
        self._by_key[key] = found
        return found

    def add(self, alg: FiniteAlgebra) -> tuple[int, bool]:
        """Returns (class index, was_new)."""
        i = self.find(alg)
        if i is None:
            self.reps.append(alg)
            self._invariants.append(self._invariant(alg))
            # drop stale not-found entries now that a new class exists
            self._by_key = {k: v for k, v in self._by_key.items() if v is not None}
            self._by_key[alg.key()] = len(self.reps) - 1
            return len(self.reps) - 1, True
        if (alg.size, alg.tables) < (self.reps[i].size, self.reps[i].tables):
            self.reps[i] = alg
        return i, False


def subalgebra_on_subset(alg: FiniteAlgebra, subset) -> FiniteAlgebra:
    """The algebra induced on a closed subset, elements relabeled in
    increasing order."""
    elems = sorted(subset)
    where = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    tables = []
    for sym_index, (_, arity) in enumerate(alg.signature.symbols):
        table = []
        for args in itertools.product(elems, repeat=arity):
            table.append(where[alg.apply(sym_index, args)])
        tables.append(tuple(table))
    return FiniteAlgebra(alg.signature, n, tuple(tables), name=f"{alg.name or '?'}|{n}")


def generated_subalgebras(alg: FiniteAlgebra, max_generators=None):
    """All subuniverses arising from generator subsets of bounded size.

    With ``max_generators=None`` every nonempty subset is tried, which
    yields every subuniverse of a finite algebra.
    """
    cap = alg.size if max_generators is None else min(max_generators, alg.size)
    seen = set()
    for g in range(1, cap + 1):
        for combo in itertools.combinations(range(alg.size), g):
            closed, _ = subuniverse_generated(alg, combo)
            seen.add(closed)
    return [subalgebra_on_subset(alg, s) for s in sorted(seen, key=sorted)]


def close_class(
    K: ClassOfAlgebras,
    ops,
    size_bound: int,
    max_generators=None,
) -> tuple[ClassOfAlgebras, dict]:
    """Closure of a class under a subset of {"H", "Sf", "Pf"} within a
    size-bounded universe.

    "Pf" is implemented as products followed by finitely generated
    subalgebras (the composite closure under finitely generated
    subalgebras of finite products); products larger than the size bound
    are skipped and reported as truncation.
    """
    ops = set(ops)
    bad = ops - {"H", "Sf", "Pf"}
    if bad:
        raise PsvarError(f"unknown closure operators: {sorted(bad)}")
    pool = IsoClassPool()
    for alg in K.representatives:
        if alg.size > size_bound:
            raise ResourceLimitError(
                f"class member of size {alg.size} exceeds size bound {size_bound}"
            )
        pool.add(alg)
    truncated = False
    changed = True
    while changed:
        changed = False
        current = list(pool.reps)
        if "H" in ops:
            for alg in current:
                for theta in all_congruences(alg, bound=max(alg.size, 10)):
                    quot, _ = quotient_algebra(alg, theta)
                    _, new = pool.add(quot)
                    changed = changed or new
        if "Sf" in ops:
            for alg in current:
                for sub in generated_subalgebras(alg, max_generators):
                    _, new = pool.add(sub)
                    changed = changed or new
        if "Pf" in ops:
            for a, b in itertools.product(current, repeat=2):
                if a.size * b.size > size_bound:
                    truncated = True
                    continue
                prod = direct_product([a, b])
                if max_generators is None:
                    _, new = pool.add(prod)
                    changed = changed or new
                for sub in generated_subalgebras(prod, max_generators):
                    _, new = pool.add(sub)
                    changed = changed or new
    result = ClassOfAlgebras(tuple(pool.reps), size_bound)
    return result, {"truncated": truncated, "size_bound": size_bound}


# ---------------------------------------------------------------------------
# Congruence filters
# ---------------------------------------------------------------------------

def antichain_reduce(parts) -> list[Partition]:
    """Keep only refinement-minimal partitions, deduplicated."""
    unique = []
    for p in parts:
        if p not in unique:
            unique.append(p)
    out = []
    for p in unique:
        if any(q != p and refines(q, p) for q in unique):
            continue
        out.append(p)
    return sorted(out, key=lambda p: p.class_of)


@dataclass
class CongruenceFilter:
    """Per-arity antichain basis for a filter of free-algebra congruences.

    The filter it denotes is, at each arity, the upset of the basis under
    coarsening; ``contains`` implements exactly that test.
    """

    base_algebras: tuple[FiniteAlgebra, ...]
    arity_bound: int
    basis: dict[int, list[Partition]]
    free: dict[int, FreeAlgebra]
    tuple_bound_applied: int | None = None
    intersection_closed: bool = False

    def contains(self, k: int, theta: Partition) -> bool:
        if k not in self.basis:
            raise BoundExceededError(
                f"filter truncated at arity {self.arity_bound}; arity {k} unavailable"
            )
        return any(refines(b, theta) for b in self.basis[k])


def filter_from_class(
    K: ClassOfAlgebras,
    base,
    arity_bound: int,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    validate_members: bool = True,
) -> CongruenceFilter:
    """The filter whose arity-k congruences are those with quotient
    isomorphic to a member of the class.

    The basis is computed as the antichain of kernels of evaluation maps
    into class members at all k-tuples; these are exactly the congruences
    with quotient in the (isomorphism-closed) class, without enumerating
    the congruence lattice of the free algebra.
    """
    base = tuple(base)
    free = {k: free_algebra(k, base, max_elements) for k in range(1, arity_bound + 1)}
    if validate_members:
        for C in K.representatives:
            gens = minimal_generating_set(C)
            Fc = free_algebra(len(gens), base, max_elements)
            res = kernel_of_evaluation(Fc, C, gens)
            if isinstance(res, IllDefinedWitness):
                raise NotInVarietyError(
                    f"algebra {C.name or C.tables} is not in the variety of the base"
                )
    basis: dict[int, list[Partition]] = {}
    for k, F in free.items():
        kernels = []
        for C in K.representatives:
            for c_bar in itertools.product(range(C.size), repeat=k):
                kernels.append(evaluation_kernel_trusted(F, C, c_bar).partition)
        basis[k] = antichain_reduce(kernels)
    return CongruenceFilter(base, arity_bound, basis, free)


def class_from_filter(
    B: CongruenceFilter,
    max_quotient_size: int | None = None,
) -> ClassOfAlgebras:
    """Quotients of the basis members and of every coarser congruence,
    deduplicated by isomorphism."""
    pool = IsoClassPool()
    bound = 0
    for k, parts in B.basis.items():
        F = B.free[k]
        alg = F.as_algebra()
        lattice = all_congruences(alg, bound=max(alg.size, 10))
        for theta in parts:
            for psi in lattice:
                if not refines(theta, psi.partition):
                    continue
                quot, _ = F.quotient(psi.partition)
                if max_quotient_size is not None and quot.size > max_quotient_size:
                    continue
                pool.add(quot)
                bound = max(bound, quot.size)
    return ClassOfAlgebras(tuple(pool.reps), bound)


def close_filter(
    B: CongruenceFilter,
    tuple_bound: int = DEFAULT_TUPLE_BOUND,
    max_rounds: int = 10,
) -> tuple[CongruenceFilter, dict]:
    """Fixpoint of pairwise meets and inverse substitutions, with antichain
    reduction after each round.

    Substitution tuples range over all m-tuples of F_k elements for
    m <= min(tuple_bound, arity_bound).  Reports whether a fixpoint was
    reached within ``max_rounds``.
    """
    basis = {k: list(parts) for k, parts in B.basis.items()}
    fixpoint = False
    rounds = 0
    for _ in range(max_rounds):
        rounds += 1
        changed = False
        additions: dict[int, list[Partition]] = {k: [] for k in basis}
        for k, parts in basis.items():
            for p, q in itertools.combinations(parts, 2):
                additions[k].append(meet_partitions(p, q))
        for k, parts in basis.items():
            F_k = B.free[k]
            for m in range(1, min(tuple_bound, B.arity_bound) + 1):
                F_m = B.free[m]
                for theta in parts:
                    for t_bar in itertools.product(range(len(F_k)), repeat=m):
                        additions[m].append(
                            inverse_substitution(F_k, theta, t_bar, F_m)
                        )
        for k in basis:
            merged = antichain_reduce(basis[k] + additions[k])
            if merged != antichain_reduce(basis[k]):
                changed = True
            basis[k] = merged
        if not changed:
            fixpoint = True
            break
    out = CongruenceFilter(
        B.base_algebras,
        B.arity_bound,
        basis,
        B.free,
        tuple_bound_applied=tuple_bound,
        intersection_closed=True,
    )
    return out, {"fixpoint_reached": fixpoint, "rounds": rounds, "tuple_bound": tuple_bound}


# ---------------------------------------------------------------------------
# Membership with certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Generators:
    algebras: tuple[FiniteAlgebra, ...]


@dataclass(frozen=True)
class FilterSpec:
    filter: CongruenceFilter


@dataclass(frozen=True)
class PositiveCertificate:
    """Factoring witness: the kernel congruence, the quotient of the free
    algebra by it, and the verified surjective homomorphism onto the
    candidate algebra."""

    arity: int
    generating_tuple: tuple[int, ...]
    theta: Partition
    quotient: FiniteAlgebra
    hom: Homomorphism

    def verify(self) -> bool:
        return self.hom.is_valid() and self.hom.is_surjective()


@dataclass(frozen=True)
class NegativeCertificate:
    """Two terms with equal value vectors over the generating algebras but
    different values on the candidate at the generating tuple."""

    s: Term
    t: Term
    generating_tuple: tuple[int, ...]


@dataclass(frozen=True)
class NegativeUniformCertificate:
    """Uniform continuity failure: no basis congruence lies inside the
    preimage of the pointwise entourage at the generating tuple.
    Conclusive only relative to the stated truncation bounds."""

    arity: int
    generating_tuple: tuple[int, ...]
    theta: Partition
    bounds: dict


def _positive_certificate(F: FreeAlgebra, B: FiniteAlgebra, gens, kernel: EvaluationKernel):
    quot, labels = F.quotient(kernel.partition)
    value_of_class = [None] * quot.size
    for i, lab in enumerate(labels):
        if value_of_class[lab] is None:
            value_of_class[lab] = kernel.values[i]
    hom = Homomorphism(quot, B, tuple(value_of_class))
    cert = PositiveCertificate(F.generators_k, tuple(gens), kernel.partition, quot, hom)
    if not cert.verify():
        raise AssertionError("positive certificate failed self-verification")
    return cert


def member(
    B: FiniteAlgebra,
    spec,
    generating_tuple=None,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
):
    """Decide membership of ``B`` in a pseudovariety given by generators or
    by a congruence filter.  Returns ``(verdict, certificate)``.

    Generators mode realizes the discrete-target case of the uniform
    Birkhoff correspondence: membership holds iff the evaluation map from
    the free algebra at a generating tuple of ``B`` is well-defined, and
    then the factoring homomorphism is the certificate.  Filter mode
    additionally requires a basis congruence inside the kernel.
    """
    if generating_tuple is None:
        gens = minimal_generating_set(B)
    else:
        gens = tuple(generating_tuple)
        closed, _ = subuniverse_generated(B, gens)
        if closed != frozenset(range(B.size)):
            raise PsvarError("supplied tuple does not generate the algebra")
    k = len(gens)

    if isinstance(spec, Generators):
        F = free_algebra(k, spec.algebras, max_elements)
        res = kernel_of_evaluation(F, B, gens)
        if isinstance(res, IllDefinedWitness):
            return False, NegativeCertificate(res.s, res.t, gens)
        return True, _positive_certificate(F, B, gens, res)

    if isinstance(spec, FilterSpec):
        filt = spec.filter
        if k > filt.arity_bound:
            raise BoundExceededError(
                f"membership needs arity {k}, filter truncated at {filt.arity_bound}"
            )
        F = filt.free[k]
        res = kernel_of_evaluation(F, B, gens)
        if isinstance(res, IllDefinedWitness):
            return False, NegativeCertificate(res.s, res.t, gens)
        if filt.contains(k, res.partition):
            return True, _positive_certificate(F, B, gens, res)
        bounds = {
            "arity_bound": filt.arity_bound,
            "tuple_bound": filt.tuple_bound_applied,
        }
        return False, NegativeUniformCertificate(k, gens, res.partition, bounds)

    raise PsvarError(f"unknown pseudovariety spec: {spec!r}")


# ---------------------------------------------------------------------------
# Entourages and uniformity verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Entourage:
    """A relation on the k-ary term operations, by element index."""

    arity: int
    num_points: int
    pairs: frozenset

    @staticmethod
    def from_partition(arity: int, p: Partition) -> "Entourage":
        return Entourage(arity, p.carrier_size, p.pairs())

    def contains_diagonal(self) -> bool:
        return all((x, x) in self.pairs for x in range(self.num_points))

    def is_symmetric(self) -> bool:
        return all((y, x) in self.pairs for (x, y) in self.pairs)

    def triangle_self(self) -> bool:
        """Whether the relation composed with itself stays inside it,
        i.e. V = U witnesses the triangle axiom."""
        succ: dict[int, set[int]] = {}
        for x, y in self.pairs:
            succ.setdefault(x, set()).add(y)
        for x, y in self.pairs:
            for z in succ.get(y, ()):
                if (x, z) not in self.pairs:
                    return False
        return True


def pointwise_entourage(B: FiniteAlgebra, k: int, a_bar) -> Entourage:
    """The pointwise-convergence entourage: two k-ary term operations of
    ``B`` are related iff they agree at the tuple."""
    F = free_algebra(k, [B])
    a_idx = tuple_index(a_bar, B.size)
    labels = [F.vectors[i][0][a_idx] for i in range(len(F))]
    return Entourage.from_partition(k, Partition.from_labels(labels))


def pointwise_partition(F: FreeAlgebra, base_index: int, a_bar) -> Partition:
    n = F.base_algebras[base_index].size
    a_idx = tuple_index(a_bar, n)
    return Partition.from_labels(
        [F.vectors[i][base_index][a_idx] for i in range(len(F))]
    )


def verify_uniformity_axioms(target, pair_cap: int = 400) -> dict:
    """Checks the uniformity axioms on a congruence filter's basis or on an
    explicit collection of entourages.

    Basis congruences are equivalence relations, so they are their own
    converses and witness the triangle condition with V = U; the checks
    are still performed on the explicit pair sets (up to ``pair_cap``
    points, beyond which the partition representation certifies them).
    """
    start = time.perf_counter()
    entries = []
    if isinstance(target, CongruenceFilter):
        items = []
        for k in sorted(target.basis):
            for i, p in enumerate(target.basis[k]):
                items.append((f"arity {k} basis {i}", k, p, None))
    else:
        if isinstance(target, Entourage):
            target = [target]
        items = [
            (f"entourage {i}", e.arity, None, e) for i, e in enumerate(target)
        ]
    all_ok = True
    for label, k, p, e in items:
        if e is None:
            if p.carrier_size <= pair_cap:
                e = Entourage.from_partition(k, p)
            else:
                entries.append(
                    {
                        "entourage": label,
                        "diagonal": True,
                        "symmetry": True,
                        "triangle": True,
                        "mode": "structural (partition form)",
                    }
                )
                continue
        d, s, t = e.contains_diagonal(), e.is_symmetric(), e.triangle_self()
        all_ok = all_ok and d and s and t
        entries.append(
            {"entourage": label, "diagonal": d, "symmetry": s, "triangle": t, "mode": "explicit"}
        )
    return {
        "operation": "verify_uniformity_axioms",
        "verdict": all_ok,
        "entries": entries,
        "timings": {"total_s": time.perf_counter() - start},
    }


def verify_pointwise_uniformity(
    A: FiniteAlgebra,
    k: int,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    enumeration_bound: int = 64,
) -> dict:
    """Two-way basis comparison between the pointwise entourages at tuples
    of ``A`` and the congruences whose quotients lie in the pseudovariety
    generated by ``A``.

    (a) every pointwise entourage is itself such a congruence, with
    quotient isomorphic to the subalgebra generated by the tuple;
    (b) every congruence of the free algebra with quotient in the
    pseudovariety contains a finite intersection of pointwise entourages
    (a covering intersection is reported per congruence).
    """
    start = time.perf_counter()
    F = free_algebra(k, [A], max_elements)
    alg = F.as_algebra()
    tuples = list(itertools.product(range(A.size), repeat=k))
    U = {a_bar: pointwise_partition(F, 0, a_bar) for a_bar in tuples}

    from .congruences import is_congruence

    entourage_results = []
    ok = True
    for a_bar, p in U.items():
        cong_ok, _ = is_congruence(alg, p)
        quot, _ = F.quotient(p)
        closed, _ = subuniverse_generated(A, set(a_bar))
        sub = subalgebra_on_subset(A, closed)
        iso_ok = are_isomorphic(quot, sub) is not None
        ok = ok and cong_ok and iso_ok
        entourage_results.append(
            {
                "tuple": list(a_bar),
                "is_congruence": cong_ok,
                "quotient_iso_to_generated_subalgebra": iso_ok,
            }
        )

    covering_results = []
    lattice = all_congruences(alg, bound=max(alg.size, enumeration_bound))
    for theta in lattice:
        p = theta.partition
        # greedy cover: pick tuples separating the not-yet-separated pairs
        needed = [
            (i, j)
            for i in range(p.carrier_size)
            for j in range(i + 1, p.carrier_size)
            if p.class_of[i] != p.class_of[j]
        ]
        chosen = []
        remaining = set(needed)
        while remaining:
            best, best_cover = None, set()
            for a_bar in tuples:
                q = U[a_bar]
                cover = {(i, j) for (i, j) in remaining if q.class_of[i] != q.class_of[j]}
                if len(cover) > len(best_cover):
                    best, best_cover = a_bar, cover
            if best is None:
                break
            chosen.append(best)
            remaining -= best_cover
        covered = not remaining
        if covered and chosen:
            inter = U[chosen[0]]
            for a_bar in chosen[1:]:
                inter = meet_partitions(inter, U[a_bar])
            covered = refines(inter, p)
        ok = ok and covered
        covering_results.append(
            {
                "theta": list(p.class_of),
                "covering_tuples": [list(t) for t in chosen],
                "covered": covered,
            }
        )
    return {
        "operation": "verify_pointwise_uniformity",
        "bounds": {"arity": k, "size": A.size},
        "verdict": ok,
        "entourages": entourage_results,
        "congruences": covering_results,
        "timings": {"total_s": time.perf_counter() - start},
    }


# ---------------------------------------------------------------------------
# Correspondence verification
# ---------------------------------------------------------------------------

def verify_correspondence(
    base,
    universe_size_bound: int,
    arity_bound: int = DEFAULT_ARITY_BOUND,
    tuple_bound: int = DEFAULT_TUPLE_BOUND,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    max_subclasses: int = 20000,
) -> dict:
    """Exhaustive check of the class/filter correspondence on the bounded
    universe of quotients of the free algebras of the base's variety.

    Checks, with zero expected failures:
    - roundtrip: K -> B^K -> K for every subclass K of the universe closed
      under generated subalgebras;
    - inverse substitution: the quotient by theta/t is always isomorphic
      to a generated subalgebra of the quotient by theta;
    - the equivalence "K closed under f.g. subalgebras of finite products
      iff B^K closed under finite intersection", both directions, for
      every such K (pairwise products, within the size bound).
    """
    start = time.perf_counter()
    base = tuple(base)
    free = {k: free_algebra(k, base, max_elements) for k in range(1, arity_bound + 1)}
    lattices = {}
    for k, F in free.items():
        alg = F.as_algebra()
        lattices[k] = [c.partition for c in all_congruences(alg, bound=max(alg.size, 10))]

    pool = IsoClassPool()
    theta_class: dict[tuple[int, tuple], int | None] = {}
    for k, parts in lattices.items():
        for p in parts:
            quot, _ = free[k].quotient(p)
            if quot.size > universe_size_bound:
                theta_class[(k, p.class_of)] = None
                continue
            idx, _ = pool.add(quot)
            theta_class[(k, p.class_of)] = idx
    reps = pool.reps
    nclasses = len(reps)

    def class_of_algebra(alg):
        if alg.size > universe_size_bound:
            return None
        return pool.find(alg)

    # Sf relation within the universe
    sub_classes = []
    for rep in reps:
        subs = set()
        for sub in generated_subalgebras(rep):
            c = class_of_algebra(sub)
            if c is not None:
                subs.add(c)
        sub_classes.append(subs)

    # inverse-substitution check (independent of the subclass chosen).
    # The composition of each m-ary element with a fixed tuple does not
    # depend on theta, so it is precomputed once per tuple.
    inv_failures = []
    inv_checked = 0
    for k, F_k in free.items():
        for m in range(1, min(tuple_bound, arity_bound) + 1):
            F_m = free[m]
            for t_bar in itertools.product(range(len(F_k)), repeat=m):
                comp = [
                    compose_index(F_k, F_m, s, t_bar) for s in range(len(F_m))
                ]
                for p in lattices[k]:
                    src_class = theta_class[(k, p.class_of)]
                    q = Partition.from_labels([p.class_of[c] for c in comp])
                    inv_checked += 1
                    c = theta_class.get((m, q.class_of))
                    if c is None:
                        c = class_of_algebra(F_m.quotient(q)[0])
                    if src_class is not None and c is not None and c not in sub_classes[src_class]:
                        inv_failures.append(
                            {"k": k, "theta": list(p.class_of), "t_bar": list(t_bar)}
                        )

    # meets within each arity, by universe class
    meet_class = {}
    for k, parts in lattices.items():
        for p, q in itertools.combinations_with_replacement(parts, 2):
            mt = meet_partitions(p, q)
            c = theta_class.get((k, mt.class_of))
            if c is None and (k, mt.class_of) not in theta_class:
                c = class_of_algebra(free[k].quotient(mt)[0])
            meet_class[(k, p.class_of, q.class_of)] = c

    # subalgebras of pairwise products, by universe class
    prod_sub = {}
    prod_truncated = False
    for i, j in itertools.combinations_with_replacement(range(nclasses), 2):
        a, b = reps[i], reps[j]
        if a.size * b.size > max_elements:
            prod_truncated = True
            prod_sub[(i, j)] = set()
            continue
        prod = direct_product([a, b])
        subs = set()
        for sub in generated_subalgebras(prod, max_generators=arity_bound):
            c = class_of_algebra(sub)
            if c is not None:
                subs.add(c)
        prod_sub[(i, j)] = subs

    # enumerate Sf-closed subclasses (downsets of the embedding relation)
    sf_closed = []
    for bits in itertools.product((0, 1), repeat=nclasses):
        K = {i for i, b in enumerate(bits) if b}
        if all(sub_classes[i] <= K for i in K):
            sf_closed.append(frozenset(K))
        if len(sf_closed) > max_subclasses:
            raise ResourceLimitError("too many subclasses to enumerate")

    roundtrip_failures = []
    equivalence_failures = []
    for K in sf_closed:
        BK = {
            k: [p for p in parts if theta_class[(k, p.class_of)] in K]
            for k, parts in lattices.items()
        }
        KBK = {
            theta_class[(k, p.class_of)]
            for k, parts in BK.items()
            for p in parts
        }
        if KBK != K:
            roundtrip_failures.append(sorted(K))
        spf_closed = all(
            prod_sub[(min(i, j), max(i, j))] <= K for i in K for j in K
        )
        int_closed = True
        for k, parts in BK.items():
            for p, q in itertools.combinations_with_replacement(parts, 2):
                if meet_class[(k, p.class_of, q.class_of)] not in K:
                    int_closed = False
                    break
            if not int_closed:
                break
        if spf_closed != int_closed:
            equivalence_failures.append(
                {"K": sorted(K), "spf_closed": spf_closed, "intersection_closed": int_closed}
            )

    verdict = not (roundtrip_failures or equivalence_failures or inv_failures)
    return {
        "operation": "verify_correspondence",
        "bounds": {
            "arity": arity_bound,
            "tuple": tuple_bound,
            "size": universe_size_bound,
        },
        "verdict": verdict,
        "universe_classes": [
            {"size": rep.size, "name": rep.name} for rep in reps
        ],
        "num_sf_closed_subclasses": len(sf_closed),
        "roundtrip_failures": roundtrip_failures,
        "inverse_substitution_checked": inv_checked,
        "inverse_substitution_failures": inv_failures,
        "product_intersection_failures": equivalence_failures,
        "product_truncated": prod_truncated,
        "timings": {"total_s": time.perf_counter() - start},
    }
