"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own algorithms:
term enumeration is depth-bounded brute force, partitions of small sets
are enumerated as restricted growth strings, and homomorphisms are
found by exhaustive map search.
"""

from __future__ import annotations

import itertools

from psvar import App, FiniteAlgebra, Signature, Var, eval_term

MEET_SIG = Signature((("meet", 2),))
ADD_SIG = Signature((("add", 2),))


def semilattice2() -> FiniteAlgebra:
    return FiniteAlgebra(MEET_SIG, 2, ((0, 0, 0, 1),), name="semilattice2")


def z_mod(n: int) -> FiniteAlgebra:
    table = tuple((i + j) % n for i in range(n) for j in range(n))
    return FiniteAlgebra(ADD_SIG, n, (table,), name=f"z{n}")


def trivial() -> FiniteAlgebra:
    return FiniteAlgebra(MEET_SIG, 1, ((0,),), name="trivial")


def binary_algebra(table, name=None) -> FiniteAlgebra:
    """A two-element algebra with one binary operation given row-major."""
    return FiniteAlgebra(Signature((("f", 2),)), 2, (tuple(table),), name=name)


def all_two_element_binary_algebras():
    """All 16 algebras on {0, 1} with a single binary operation."""
    return [
        binary_algebra(bits, name=f"b{i}")
        for i, bits in enumerate(itertools.product((0, 1), repeat=4))
    ]


def enumerate_terms(signature: Signature, num_vars: int, depth: int):
    """All terms over x1..x_num_vars of the given depth bound, smallest
    depth first.  Depth 1 is a bare variable."""
    layers = [[Var(i) for i in range(1, num_vars + 1)]]
    for _ in range(depth - 1):
        pool = [t for layer in layers for t in layer]
        new = []
        for sym, arity in signature.symbols:
            for children in itertools.product(pool, repeat=arity):
                if max(c_depth(c) for c in children) + 1 == len(layers) + 1:
                    new.append(App(sym, children))
        layers.append(new)
    return [t for layer in layers for t in layer]


def c_depth(term) -> int:
    if isinstance(term, Var):
        return 1
    return 1 + max(c_depth(c) for c in term.children)


def term_vector(alg: FiniteAlgebra, term, k: int):
    """The value vector of a term as a k-ary operation on alg, indexed
    by assignments in lexicographic order with x1 most significant."""
    return tuple(
        eval_term(alg, term, env)
        for env in itertools.product(range(alg.size), repeat=k)
    )


def distinct_term_vectors(alg: FiniteAlgebra, k: int, depth: int):
    """Distinct k-ary term operations realized by terms up to a depth."""
    return {term_vector(alg, t, k) for t in enumerate_terms(alg.signature, k, depth)}


def all_partition_labels(n: int):
    """All partitions of {0..n-1} as canonical label strings (restricted
    growth strings), via direct recursion."""
    out = []

    def rec(prefix, used):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for lab in range(used + 1):
            rec(prefix + [lab], max(used, lab + 1))

    rec([0], 1) if n else out.append(())
    return out


def brute_is_congruence(alg: FiniteAlgebra, labels) -> bool:
    """Definition check: related tuples map to related values, over all
    operations and all pairs of argument tuples."""
    for (sym, arity), table in zip(alg.signature.symbols, alg.tables):
        for xs in itertools.product(range(alg.size), repeat=arity):
            for ys in itertools.product(range(alg.size), repeat=arity):
                if all(labels[x] == labels[y] for x, y in zip(xs, ys)):
                    vx = apply_table(alg, table, arity, xs)
                    vy = apply_table(alg, table, arity, ys)
                    if labels[vx] != labels[vy]:
                        return False
    return True


def apply_table(alg: FiniteAlgebra, table, arity, args) -> int:
    idx = 0
    for a in args:
        idx = idx * alg.size + a
    return table[idx]


def brute_all_congruence_labels(alg: FiniteAlgebra):
    """Every congruence of a small algebra, by filtering all partitions."""
    return [
        labels
        for labels in all_partition_labels(alg.size)
        if brute_is_congruence(alg, labels)
    ]


def all_maps(dom: int, cod: int):
    """Every function {0..dom-1} -> {0..cod-1} as a tuple."""
    return itertools.product(range(cod), repeat=dom)


def brute_is_homomorphism(a: FiniteAlgebra, b: FiniteAlgebra, f) -> bool:
    for (sym, arity), ta, tb in zip(a.signature.symbols, a.tables, b.tables):
        for args in itertools.product(range(a.size), repeat=arity):
            if f[apply_table(a, ta, arity, args)] != apply_table(
                b, tb, arity, tuple(f[x] for x in args)
            ):
                return False
    return True


def sample_algebra(rng, tag=None) -> FiniteAlgebra:
    """A uniformly random algebra of size 1..3 with one binary symbol."""
    size = rng.randint(1, 3)
    table = tuple(rng.randrange(size) for _ in range(size * size))
    return FiniteAlgebra(Signature((("f", 2),)), size, (table,), name=tag)


def sample_algebra_pairs(seed: int, count: int = 20):
    import random

    rng = random.Random(seed)
    return [
        (sample_algebra(rng, f"A{i}"), sample_algebra(rng, f"B{i}"))
        for i in range(count)
    ]


def brute_find_isomorphism(a: FiniteAlgebra, b: FiniteAlgebra):
    if a.size != b.size or a.signature != b.signature:
        return None
    for f in itertools.permutations(range(a.size)):
        if brute_is_homomorphism(a, b, f):
            return f
    return None
