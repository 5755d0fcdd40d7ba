"""Free algebras of finitely generated varieties, as clones of term operations.

The k-generated free algebra of the variety generated by finite algebras
A_1, ..., A_r is computed as the subalgebra of the product of the powers
A_i^(A_i^k) generated by the k projection vectors.  Elements are value
vectors (one induced k-ary operation table per base algebra); terms are
only witnesses.  Equality in the free algebra is therefore decidable by
structural comparison of vectors.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from .algebra import (
    DEFAULT_MAX_ELEMENTS,
    App,
    FiniteAlgebra,
    Term,
    Var,
    derivation_terms,
    generated_closure,
    index_tuple,
    same_signature,
    substitute,
    tuple_index,
)
from .errors import ArityMismatchError, PsvarError, SignatureMismatchError
from .partitions import Partition

DEFAULT_TUPLE_BOUND = 3
DEFAULT_ARITY_BOUND = 3


@dataclass(frozen=True)
class TermOperation:
    """A k-ary term operation over a fixed list of base algebras.

    ``value_vectors[i]`` is the full table of the induced operation on the
    i-th base algebra, argument tuples in mixed-radix order (leftmost most
    significant).
    """

    arity: int
    value_vectors: tuple[tuple[int, ...], ...]
    witness: Term


@dataclass(frozen=True)
class IllDefinedWitness:
    """Two terms with equal value vectors over the base algebras that
    disagree on the candidate algebra: a certificate of non-membership
    in the generated variety."""

    s: Term
    t: Term


@dataclass(frozen=True)
class EvaluationKernel:
    """Kernel of the evaluation map from a free algebra into (B, b_bar).

    ``partition`` relates free-algebra elements with equal values;
    ``values`` gives the B-value of each element.
    """

    partition: Partition
    values: tuple[int, ...]


class FreeAlgebra:
    """Immutable after construction; see :func:`free_algebra`."""

    def __init__(self, k: int, base_algebras, vectors, derivations, projection_indices):
        self.generators_k = k
        self.base_algebras = tuple(base_algebras)
        self.signature = self.base_algebras[0].signature
        self.vectors = list(vectors)
        self.derivations = list(derivations)
        self.projection_indices = tuple(projection_indices)
        self.index_of = {v: i for i, v in enumerate(self.vectors)}
        self._witnesses: list[Term] | None = None
        self._algebra: FiniteAlgebra | None = None
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def witnesses(self) -> list[Term]:
        with self._lock:
            if self._witnesses is None:
                gens = [Var(i + 1) for i in range(self.generators_k)]
                seed_terms = gens  # one per projection seed position
                self._witnesses = derivation_terms(
                    self.signature, self.derivations, seed_terms
                )
            return self._witnesses

    def witness(self, i: int) -> Term:
        return self.witnesses[i]

    def element(self, i: int) -> TermOperation:
        return TermOperation(self.generators_k, self.vectors[i], self.witness(i))

    @property
    def elements(self) -> list[TermOperation]:
        return [self.element(i) for i in range(len(self))]

    def index(self, value_vectors) -> int:
        return self.index_of[tuple(value_vectors)]

    def apply_elements(self, sym_index: int, arg_indices) -> int:
        """Apply a signature operation to elements, by index."""
        vec = _apply_vectors(
            self.base_algebras,
            sym_index,
            [self.vectors[a] for a in arg_indices],
            self.generators_k,
        )
        return self.index_of[vec]

    def evaluate_all(self, target: FiniteAlgebra, assignment) -> list[int]:
        """One value of every element in ``target`` at ``assignment``.

        A single pass over derivations; each element's value comes from its
        recorded witness derivation.  If ``target`` is not in the variety of
        the base algebras the values may depend on the witness choice; use
        :func:`kernel_of_evaluation` to detect that.
        """
        vals: list[int] = []
        for deriv in self.derivations:
            if deriv[0] == "gen":
                vals.append(assignment[deriv[1]])
            else:
                _, sym_index, args = deriv
                vals.append(target.apply(sym_index, [vals[a] for a in args]))
        return vals

    def as_algebra(self) -> FiniteAlgebra:
        """The induced finite algebra on element indices (built lazily;
        quadratic-or-worse in the element count)."""
        with self._lock:
            if self._algebra is None:
                n = len(self.vectors)
                tables = []
                for sym_index, (_, arity) in enumerate(self.signature.symbols):
                    table = []
                    for flat in range(n**arity):
                        args = index_tuple(flat, n, arity)
                        table.append(self.apply_elements(sym_index, args))
                    tables.append(tuple(table))
                self._algebra = FiniteAlgebra(
                    self.signature, n, tuple(tables), name=f"F_{self.generators_k}"
                )
            return self._algebra

    def quotient(self, theta: Partition):
        """Quotient of the induced algebra by ``theta`` without materializing
        the full induced tables.

        Returns ``(algebra, class_of)``.  ``theta`` must be a congruence of
        the induced structure (kernels of evaluations always are).
        """
        if theta.carrier_size != len(self.vectors):
            raise PsvarError("partition carrier does not match free algebra size")
        labels = theta.class_of
        nclasses = theta.num_classes
        reps = [None] * nclasses
        for i, lab in enumerate(labels):
            if reps[lab] is None:
                reps[lab] = i
        tables = []
        for sym_index, (_, arity) in enumerate(self.signature.symbols):
            table = []
            for flat in range(nclasses**arity):
                args = index_tuple(flat, nclasses, arity)
                table.append(labels[self.apply_elements(sym_index, [reps[a] for a in args])])
            tables.append(tuple(table))
        quot = FiniteAlgebra(
            self.signature,
            nclasses,
            tuple(tables),
            name=f"F_{self.generators_k}/theta",
        )
        return quot, labels


def _apply_vectors(base_algebras, sym_index, arg_vectors, k):
    """Componentwise application across base algebras and argument tuples."""
    out = []
    for bi, alg in enumerate(base_algebras):
        table = alg.tables[sym_index]
        n = alg.size
        child = [v[bi] for v in arg_vectors]
        if len(child) == 1:
            c0 = child[0]
            out.append(tuple(table[x] for x in c0))
        elif len(child) == 2:
            c0, c1 = child
            out.append(tuple(table[x * n + y] for x, y in zip(c0, c1)))
        else:
            length = n**k
            out.append(
                tuple(
                    table[tuple_index([c[j] for c in child], n)]
                    for j in range(length)
                )
            )
    return tuple(out)


_free_cache: dict = {}
_free_cache_lock = threading.Lock()


def free_algebra(
    k: int,
    base,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    memoize: bool = True,
) -> FreeAlgebra:
    """The k-generated free algebra of the variety generated by ``base``.

    Round-based closure from the k projection vectors under componentwise
    operations; element order is discovery order with projections first.
    """
    if k < 1:
        raise PsvarError("k must be at least 1")
    base = tuple(base)
    if not base:
        raise PsvarError("base must be nonempty")
    sig = same_signature(*base)
    cache_key = (k, tuple(a.key() for a in base), max_elements)
    if memoize:
        with _free_cache_lock:
            cached = _free_cache.get(cache_key)
        if cached is not None:
            return cached

    seeds = []
    for i in range(k):
        vec = tuple(
            tuple(index_tuple(flat, a.size, k)[i] for flat in range(a.size**k))
            for a in base
        )
        seeds.append(vec)

    def apply_fn(sym_index, arg_vectors):
        return _apply_vectors(base, sym_index, arg_vectors, k)

    vectors, derivations = generated_closure(sig, apply_fn, seeds, max_elements)
    proj_indices = []
    seen: dict = {}
    for i, s in enumerate(seeds):
        if s not in seen:
            seen[s] = len(seen)
        proj_indices.append(seen[s])
    F = FreeAlgebra(k, base, vectors, derivations, proj_indices)
    if memoize:
        with _free_cache_lock:
            _free_cache.setdefault(cache_key, F)
    return F


def clear_free_cache():
    with _free_cache_lock:
        _free_cache.clear()


# ---------------------------------------------------------------------------
# Clone structure
# ---------------------------------------------------------------------------

def clone_compose(s: TermOperation, t_bar, base) -> TermOperation:
    """The composition s(t_1, ..., t_m) as a k-ary term operation.

    ``s`` has arity m, every member of ``t_bar`` arity k, all over the same
    base algebras.  The witness is s's witness with x_j replaced by t_j's
    witness.  By closure the result vector always names an existing element
    of the k-generated free algebra.
    """
    t_bar = tuple(t_bar)
    if len(t_bar) != s.arity:
        raise ArityMismatchError(
            f"composition needs {s.arity} arguments, got {len(t_bar)}"
        )
    if not t_bar:
        raise ArityMismatchError("empty substitution tuple")
    k = t_bar[0].arity
    if any(t.arity != k for t in t_bar):
        raise ArityMismatchError("substitution tuple has mixed arities")
    base = tuple(base)
    vecs = []
    for bi, alg in enumerate(base):
        n = alg.size
        svec = s.value_vectors[bi]
        tvecs = [t.value_vectors[bi] for t in t_bar]
        vecs.append(
            tuple(
                svec[tuple_index([tv[j] for tv in tvecs], n)]
                for j in range(n**k)
            )
        )
    witness = substitute(s.witness, [t.witness for t in t_bar])
    return TermOperation(k, tuple(vecs), witness)


def compose_index(F_k: FreeAlgebra, F_m: FreeAlgebra, s_index: int, t_indices) -> int:
    """Index in F_k of the composition of F_m's element with a tuple of
    F_k elements, computed on vectors only (no witness materialization)."""
    vecs = []
    for bi, alg in enumerate(F_k.base_algebras):
        n = alg.size
        svec = F_m.vectors[s_index][bi]
        tvecs = [F_k.vectors[t][bi] for t in t_indices]
        vecs.append(
            tuple(
                svec[tuple_index([tv[j] for tv in tvecs], n)]
                for j in range(n**F_k.generators_k)
            )
        )
    return F_k.index_of[tuple(vecs)]


def inverse_substitution(
    F_k: FreeAlgebra,
    theta: Partition,
    t_indices,
    F_m: FreeAlgebra | None = None,
) -> Partition:
    """The congruence relating s, s' on m-ary elements iff their
    compositions with the given tuple are theta-related.

    Computed twice: directly from the defining equivalence, and as the
    kernel of the factoring homomorphism F_m -> F_k/theta sending x_i to
    the class of t_i.  The two must agree; a mismatch is a bug.
    """
    t_indices = tuple(t_indices)
    m = len(t_indices)
    if m < 1:
        raise PsvarError("substitution tuple must be nonempty")
    if theta.carrier_size != len(F_k):
        raise PsvarError("theta is not a partition of F_k")
    if F_m is None:
        F_m = free_algebra(m, F_k.base_algebras)
    if F_m.base_algebras != F_k.base_algebras:
        raise PsvarError("free algebras over different bases")

    by_definition = Partition.from_labels(
        [
            theta.class_of[compose_index(F_k, F_m, s, t_indices)]
            for s in range(len(F_m))
        ]
    )

    quot, labels = F_k.quotient(theta)
    assignment = [labels[t] for t in t_indices]
    kernel_route = Partition.from_labels(F_m.evaluate_all(quot, assignment))

    if by_definition != kernel_route:
        raise AssertionError(
            "inverse substitution disagrees with the kernel of the factoring homomorphism"
        )
    return by_definition


def kernel_of_evaluation(F: FreeAlgebra, B: FiniteAlgebra, b_bar):
    """Kernel of the natural map sending each free-algebra element to the
    value of a representative term at ``b_bar`` in ``B``.

    Equivalent to generating the subalgebra of F x B from the pairs
    (projection_i, b_i): the map is well-defined iff that closure is the
    graph of a function.  Here the candidate function comes from one pass
    over witness derivations and well-definedness is checked by verifying
    it is a homomorphism for the induced operations; the first violation in
    deterministic scan order yields the witness pair.

    Returns an :class:`EvaluationKernel` or an :class:`IllDefinedWitness`.
    """
    if B.signature != F.signature:
        raise SignatureMismatchError("candidate algebra has a different signature")
    b_bar = tuple(b_bar)
    if len(b_bar) != F.generators_k:
        raise PsvarError(
            f"expected a {F.generators_k}-tuple of elements, got {len(b_bar)}"
        )
    vals = F.evaluate_all(B, b_bar)

    # collapsed projections must receive equal values
    for i in range(F.generators_k):
        for j in range(i + 1, F.generators_k):
            if F.projection_indices[i] == F.projection_indices[j] and b_bar[i] != b_bar[j]:
                return IllDefinedWitness(Var(i + 1), Var(j + 1))

    n = len(F)
    for sym_index, (_, arity) in enumerate(F.signature.symbols):
        for args in itertools.product(range(n), repeat=arity):
            e = F.apply_elements(sym_index, args)
            v = B.apply(sym_index, [vals[a] for a in args])
            if vals[e] != v:
                name = F.signature.symbols[sym_index][0]
                s = F.witness(e)
                t = App(name, tuple(F.witness(a) for a in args))
                return IllDefinedWitness(s, t)
    return EvaluationKernel(Partition.from_labels(vals), tuple(vals))


def evaluation_kernel_trusted(F: FreeAlgebra, B: FiniteAlgebra, b_bar) -> EvaluationKernel:
    """Evaluation kernel when ``B`` is known to lie in the variety of the
    base algebras, so the well-definedness scan can be skipped.

    Used when building filter bases from classes produced by closure
    operators, where membership is guaranteed by construction.
    """
    if B.signature != F.signature:
        raise SignatureMismatchError("candidate algebra has a different signature")
    vals = F.evaluate_all(B, tuple(b_bar))
    return EvaluationKernel(Partition.from_labels(vals), tuple(vals))
