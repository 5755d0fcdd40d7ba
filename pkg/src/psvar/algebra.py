"""Finite algebras over functional signatures.

Domains are always ``{0, ..., size-1}``.  Operation tables are flat,
row-major, with the leftmost argument most significant, so the table
index of an argument tuple ``(a_1, ..., a_r)`` over an ``n``-element
domain is ``((a_1 * n + a_2) * n + ...) + a_r``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    MalformedTermError,
    PsvarError,
    ResourceLimitError,
    SignatureMismatchError,
)

DEFAULT_MAX_ELEMENTS = 10**6


@dataclass(frozen=True)
class Signature:
    """An ordered sequence of (name, arity) operation symbols.

    The order is significant: it fixes term enumeration order and
    the order of tables in a :class:`FiniteAlgebra`.
    """

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise PsvarError("duplicate symbol names in signature")
        for name, arity in self.symbols:
            if not name:
                raise PsvarError("empty symbol name")
            if arity < 1:
                raise PsvarError(f"symbol {name!r} has arity {arity}; arity-0 symbols are unsupported")

    def arity(self, name: str) -> int:
        for sym, ar in self.symbols:
            if sym == name:
                return ar
        raise KeyError(name)

    def index(self, name: str) -> int:
        for i, (sym, _) in enumerate(self.symbols):
            if sym == name:
                return i
        raise KeyError(name)


def tuple_index(args, n: int) -> int:
    """Mixed-radix index of an argument tuple, leftmost most significant."""
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


def index_tuple(idx: int, n: int, arity: int) -> tuple[int, ...]:
    """Inverse of :func:`tuple_index`."""
    out = []
    for _ in range(arity):
        out.append(idx % n)
        idx //= n
    return tuple(reversed(out))


@dataclass(frozen=True)
class FiniteAlgebra:
    signature: Signature
    size: int
    tables: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        if self.size < 1:
            raise PsvarError("algebra must have at least one element")
        if len(self.tables) != len(self.signature.symbols):
            raise PsvarError("one table per signature symbol required")
        for (sym, arity), table in zip(self.signature.symbols, self.tables):
            if len(table) != self.size**arity:
                raise PsvarError(
                    f"table for {sym!r} has length {len(table)}, expected {self.size ** arity}"
                )
            for i, v in enumerate(table):
                if not 0 <= v < self.size:
                    raise PsvarError(f"table entry {v} for {sym!r} at index {i} is out of range")

    def apply(self, sym_index: int, args) -> int:
        return self.tables[sym_index][tuple_index(args, self.size)]

    def apply_name(self, name: str, args) -> int:
        return self.apply(self.signature.index(name), args)

    def key(self):
        """Hashable identity used for memoization (ignores the name)."""
        return (self.signature.symbols, self.size, self.tables)


def same_signature(*algs: FiniteAlgebra) -> Signature:
    sig = algs[0].signature
    for a in algs[1:]:
        if a.signature != sig:
            raise SignatureMismatchError("algebras do not share a signature")
    return sig


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    """The variable x_i (1-based)."""

    index: int


@dataclass(frozen=True)
class App(Term):
    symbol: str
    children: tuple[Term, ...]


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(c) for c in t.children)


def max_var(t: Term) -> int:
    if isinstance(t, Var):
        return t.index
    return max(max_var(c) for c in t.children)


def substitute(t: Term, replacements) -> Term:
    """Replace x_i by replacements[i-1] throughout."""
    if isinstance(t, Var):
        return replacements[t.index - 1]
    return App(t.symbol, tuple(substitute(c, replacements) for c in t.children))


def term_to_prefix(t: Term):
    """Prefix-notation JSON form: ["x", i] or [symbol, child, ...]."""
    if isinstance(t, Var):
        return ["x", t.index]
    return [t.symbol] + [term_to_prefix(c) for c in t.children]


def term_from_prefix(obj, signature: Signature) -> Term:
    if not isinstance(obj, list) or not obj:
        raise MalformedTermError(f"not a prefix term: {obj!r}")
    head = obj[0]
    if head == "x":
        if len(obj) != 2 or not isinstance(obj[1], int) or obj[1] < 1:
            raise MalformedTermError(f"bad variable: {obj!r}")
        return Var(obj[1])
    try:
        arity = signature.arity(head)
    except KeyError:
        raise MalformedTermError(f"unknown symbol {head!r}") from None
    if len(obj) != arity + 1:
        raise MalformedTermError(f"{head!r} expects {arity} children, got {len(obj) - 1}")
    return App(head, tuple(term_from_prefix(c, signature) for c in obj[1:]))


def eval_term(alg: FiniteAlgebra, t: Term, assignment) -> int:
    """Value of the term operation induced by ``t`` at ``assignment``."""
    if isinstance(t, Var):
        if t.index > len(assignment):
            raise MalformedTermError(
                f"term uses x{t.index} but assignment has length {len(assignment)}"
            )
        return assignment[t.index - 1]
    sym_index = alg.signature.index(t.symbol)
    args = [eval_term(alg, c, assignment) for c in t.children]
    return alg.apply(sym_index, args)


# ---------------------------------------------------------------------------
# Closure machinery
# ---------------------------------------------------------------------------

def generated_closure(signature: Signature, apply_fn, seeds, max_elements: int):
    """Round-based closure of ``seeds`` under all signature operations.

    ``apply_fn(sym_index, values)`` computes one application on whatever
    value space is being closed (algebra elements, value vectors, pairs).

    Returns ``(values, derivations)`` in discovery order, where a
    derivation is either ``("gen", i)`` or ``("app", sym_index, arg_indices)``.
    Iteration order is deterministic: symbols in signature order, argument
    tuples in lexicographic index order, each round only revisiting tuples
    that touch an element discovered in the previous round.
    """
    values = list(seeds)
    index_of = {}
    derivations = []
    for i, v in enumerate(seeds):
        if v not in index_of:
            index_of[v] = len(index_of)
            derivations.append(("gen", i))
    # seeds may collide (e.g. projections over a one-element algebra)
    values = list(index_of)
    prev_count = 0
    while True:
        count = len(values)
        if count == prev_count:
            break
        new_items = []
        for sym_index, (_, arity) in enumerate(signature.symbols):
            for args in itertools.product(range(count), repeat=arity):
                if prev_count and all(a < prev_count for a in args):
                    continue
                v = apply_fn(sym_index, tuple(values[a] for a in args))
                if v not in index_of:
                    index_of[v] = len(values) + len(new_items)
                    new_items.append((v, ("app", sym_index, args)))
        prev_count = count
        for v, deriv in new_items:
            values.append(v)
            derivations.append(deriv)
        if len(values) > max_elements:
            raise ResourceLimitError(
                f"closure exceeded {max_elements} elements"
            )
    return values, derivations


def derivation_terms(signature: Signature, derivations, generator_terms) -> list[Term]:
    terms: list[Term] = []
    for deriv in derivations:
        if deriv[0] == "gen":
            terms.append(generator_terms[deriv[1]])
        else:
            _, sym_index, args = deriv
            name = signature.symbols[sym_index][0]
            terms.append(App(name, tuple(terms[a] for a in args)))
    return terms


def subuniverse_generated(alg: FiniteAlgebra, gens) -> tuple[frozenset, dict]:
    """Smallest subuniverse containing ``gens``, with witness terms.

    The witness for element ``e`` is a term over x1..x|gens| (generators
    in sorted order) that evaluates to ``e`` under the generator assignment.
    """
    gens = sorted(set(gens))
    if not gens:
        raise PsvarError("generator set must be nonempty")
    for g in gens:
        if not 0 <= g < alg.size:
            raise PsvarError(f"generator {g} outside domain")
    values, derivs = generated_closure(
        alg.signature, alg.apply, gens, max_elements=alg.size
    )
    terms = derivation_terms(alg.signature, derivs, [Var(i + 1) for i in range(len(gens))])
    return frozenset(values), dict(zip(values, terms))


# ---------------------------------------------------------------------------
# Products, homomorphisms, isomorphism
# ---------------------------------------------------------------------------

def direct_product(algs, max_elements: int = DEFAULT_MAX_ELEMENTS) -> FiniteAlgebra:
    """Componentwise product; element encoding is mixed-radix with the
    first factor most significant."""
    algs = tuple(algs)
    if not algs:
        raise PsvarError("product of an empty family is not supported")
    sig = same_signature(*algs)
    size = 1
    for a in algs:
        size *= a.size
        if size > max_elements:
            raise ResourceLimitError(f"product size exceeds cap {max_elements}")

    sizes = [a.size for a in algs]

    def encode(components):
        idx = 0
        for c, n in zip(components, sizes):
            idx = idx * n + c
        return idx

    def decode(idx):
        out = []
        for n in reversed(sizes):
            out.append(idx % n)
            idx //= n
        return tuple(reversed(out))

    tables = []
    for sym_index, (_, arity) in enumerate(sig.symbols):
        table = []
        for flat in range(size**arity):
            args = index_tuple(flat, size, arity)
            comps = [decode(a) for a in args]
            result = tuple(
                a.apply(sym_index, [comps[j][i] for j in range(arity)])
                for i, a in enumerate(algs)
            )
            table.append(encode(result))
        tables.append(tuple(table))
    name = " x ".join(a.name or "?" for a in algs)
    return FiniteAlgebra(sig, size, tuple(tables), name=name)


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    def is_valid(self) -> bool:
        if len(self.map) != self.source.size:
            return False
        if any(not 0 <= v < self.target.size for v in self.map):
            return False
        for sym_index, (_, arity) in enumerate(self.source.signature.symbols):
            for args in itertools.product(range(self.source.size), repeat=arity):
                lhs = self.map[self.source.apply(sym_index, args)]
                rhs = self.target.apply(sym_index, [self.map[a] for a in args])
                if lhs != rhs:
                    return False
        return True

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and self.is_surjective()


def minimal_generating_set(alg: FiniteAlgebra) -> tuple[int, ...]:
    """A smallest generating set, found by incremental search over sizes.

    Ties are broken lexicographically, so the result is deterministic.
    """
    full = frozenset(range(alg.size))
    for g in range(1, alg.size + 1):
        for combo in itertools.combinations(range(alg.size), g):
            closed, _ = subuniverse_generated(alg, combo)
            if closed == full:
                return combo
    raise AssertionError("the full domain always generates")  # pragma: no cover


def _extend_by_closure(src: FiniteAlgebra, dst: FiniteAlgebra, gens, images):
    """Propagate generator images through the subuniverse closure of gens.

    Returns a full map or None on conflict.  Only elements reachable from
    gens get images; the caller must ensure gens generate src.
    """
    mapping = {}
    for g, im in zip(gens, images):
        if g in mapping and mapping[g] != im:
            return None
        mapping[g] = im
    known = list(mapping)
    changed = True
    while changed:
        changed = False
        for sym_index, (_, arity) in enumerate(src.signature.symbols):
            for args in itertools.product(known, repeat=arity):
                e = src.apply(sym_index, args)
                im = dst.apply(sym_index, [mapping[a] for a in args])
                if e in mapping:
                    if mapping[e] != im:
                        return None
                else:
                    mapping[e] = im
                    known.append(e)
                    changed = True
    if len(mapping) != src.size:
        return None
    return tuple(mapping[x] for x in range(src.size))


def find_surjective_homomorphism(src: FiniteAlgebra, dst: FiniteAlgebra):
    """A surjective homomorphism src -> dst, or None.

    Backtracks over images of a minimal generating set of src,
    propagating forced values through the closure.
    """
    same_signature(src, dst)
    gens = minimal_generating_set(src)
    for images in itertools.product(range(dst.size), repeat=len(gens)):
        full = _extend_by_closure(src, dst, gens, images)
        if full is None:
            continue
        if len(set(full)) != dst.size:
            continue
        hom = Homomorphism(src, dst, full)
        if hom.is_valid():
            return hom
    return None


def are_isomorphic(a: FiniteAlgebra, b: FiniteAlgebra):
    """A bijective homomorphism a -> b, or None.

    A surjective homomorphism between equal finite sizes is bijective,
    and the inverse of a bijective homomorphism is one too.
    """
    same_signature(a, b)
    if a.size != b.size:
        return None
    return find_surjective_homomorphism(a, b)
