"""Acceptance suite: end-to-end checks with independent oracles and
stated time budgets.  Each test prints one summary line."""

import functools
import itertools
import json
import time
from pathlib import Path

import jsonschema

from psvar import (
    ClassOfAlgebras,
    Entourage,
    FilterSpec,
    Generators,
    NegativeCertificate,
    PositiveCertificate,
    close_class,
    eval_term,
    filter_from_class,
    free_algebra,
    inverse_substitution,
    member,
    verify_correspondence,
    verify_pointwise_uniformity,
    verify_uniformity_axioms,
)
from psvar.algebra import direct_product, minimal_generating_set
from psvar.congruences import all_congruences
from psvar.freealg import clear_free_cache
from psvar.partitions import Partition, meet_partitions
from psvar.cli import run as cli_run
from psvar.io import parse_algebra_file, serialize_algebra

from .helpers import (
    all_two_element_binary_algebras,
    distinct_term_vectors,
    enumerate_terms,
    c_depth,
    sample_algebra_pairs,
    semilattice2,
    term_vector,
    z_mod,
)

ROOT = Path(__file__).resolve().parent.parent


def _line(n, ok, detail):
    status = "PASS" if ok else "FAIL"
    msg = f"criterion {n} {status}: {detail}"
    print(msg)
    return msg


def test_criterion_1_free_algebra_sizes():
    clear_free_cache()
    start = time.perf_counter()
    sizes_sl = [len(free_algebra(k, [semilattice2()])) for k in (1, 2, 3)]
    sizes_z2 = [len(free_algebra(k, [z_mod(2)])) for k in (1, 2)]
    oracle_sl = [len(distinct_term_vectors(semilattice2(), k, 4)) for k in (1, 2, 3)]
    oracle_z2 = [len(distinct_term_vectors(z_mod(2), k, 4)) for k in (1, 2)]
    elapsed = time.perf_counter() - start
    ok = (
        sizes_sl == [1, 3, 7]
        and sizes_z2 == [2, 4]
        and oracle_sl == sizes_sl
        and oracle_z2 == sizes_z2
        and elapsed < 5.0
    )
    assert ok, _line(1, ok, f"sl={sizes_sl} z2={sizes_z2} {elapsed:.2f}s")
    _line(1, ok, f"free sizes sl={sizes_sl} z2={sizes_z2}, oracle match, {elapsed:.2f}s < 5s")


def test_criterion_2_kernel_identities():
    clear_free_cache()
    start = time.perf_counter()
    mismatches = 0
    checked = 0
    for base in (semilattice2(), z_mod(2)):
        for k in (1, 2):
            F_k = free_algebra(k, [base])
            lattice = [c.partition for c in all_congruences(F_k.as_algebra())]
            for m in (1, 2):
                F_m = free_algebra(m, [base])
                for theta in lattice:
                    quot, labels = F_k.quotient(theta)
                    for t_bar in itertools.product(range(len(F_k)), repeat=m):
                        got = inverse_substitution(F_k, theta, t_bar, F_m)
                        # explicit factoring homomorphism F_m -> F_k/theta
                        assignment = tuple(labels[t] for t in t_bar)
                        vals = F_m.evaluate_all(quot, assignment)
                        expect = Partition.from_labels(vals)
                        checked += 1
                        if got != expect:
                            mismatches += 1
            # meets of kernels equal kernels of product maps
            for theta, phi in itertools.combinations_with_replacement(lattice, 2):
                q1, lab1 = F_k.quotient(theta)
                q2, lab2 = F_k.quotient(phi)
                prod = direct_product([q1, q2])
                assignment = tuple(
                    lab1[i] * q2.size + lab2[i] for i in F_k.projection_indices
                )
                vals = F_k.evaluate_all(prod, assignment)
                checked += 1
                if Partition.from_labels(vals) != meet_partitions(theta, phi):
                    mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60.0
    assert ok, _line(2, ok, f"{mismatches} mismatches of {checked}, {elapsed:.2f}s")
    _line(2, ok, f"{checked} kernel identities, 0 mismatches, {elapsed:.2f}s < 60s")


def _identity_oracle(vec_pairs, depths, max_depth=4):
    """Conclusive verdict from a depth-bounded identity search, or None.

    ``vec_pairs`` lists (vector on A, vector on B) per term.  A conflict
    (same A-vector, different B-vectors) conclusively refutes membership.
    If the pair set stabilizes a level early with no conflict, the map
    t^A -> t^B is a total function on the free algebra, which conclusively
    confirms membership of the two-element candidate.
    """
    mapping = {}
    for (va, vb), d in zip(vec_pairs, depths):
        if va in mapping and mapping[va] != vb:
            return False
        mapping[va] = vb
    upto = lambda d: {pair for pair, dd in zip(vec_pairs, depths) if dd <= d}
    if upto(max_depth - 1) == upto(max_depth):
        return True
    return None


def test_criterion_3_membership_matrix_16x16():
    start = time.perf_counter()
    algebras = all_two_element_binary_algebras()
    terms = enumerate_terms(algebras[0].signature, 2, 4)
    depths = [c_depth(t) for t in terms]
    vectors = {a.name: [term_vector(a, t, 2) for t in terms] for a in algebras}
    verified = 0
    oracle_checked = 0
    for A in algebras:
        clear_free_cache()
        for B in algebras:
            verdict, cert = member(B, Generators((A,)))
            if verdict:
                assert isinstance(cert, PositiveCertificate) and cert.verify()
                assert cert.hom.is_bijective()  # equal sizes force isomorphism
            else:
                assert isinstance(cert, NegativeCertificate)
                k = len(cert.generating_tuple)
                assert term_vector(A, cert.s, k) == term_vector(A, cert.t, k)
                assert eval_term(B, cert.s, cert.generating_tuple) != eval_term(
                    B, cert.t, cert.generating_tuple
                )
            verified += 1
            oracle = _identity_oracle(
                list(zip(vectors[A.name], vectors[B.name])), depths
            )
            if oracle is not None:
                oracle_checked += 1
                assert oracle == verdict, (A.name, B.name, oracle, verdict)
    elapsed = time.perf_counter() - start
    ok = verified == 256 and elapsed < 120.0
    assert ok, _line(3, ok, f"{verified}/256 certificates, {elapsed:.2f}s")
    _line(
        3, ok,
        f"256/256 certificates re-verify, oracle agrees on "
        f"{oracle_checked} conclusive pairs, {elapsed:.2f}s < 120s",
    )


@functools.lru_cache(maxsize=1)
def _criterion_4_runs():
    runs = []
    for A, B in sample_algebra_pairs(seed=0, count=20):
        clear_free_cache()
        k = len(minimal_generating_set(B))
        gv = member(B, Generators((A,)), max_elements=5000)[0]
        closed, _ = close_class(
            ClassOfAlgebras((A,), 9), ["H", "Sf", "Pf"], 9, max_generators=k
        )
        filt = filter_from_class(
            closed, [A], k, max_elements=5000, validate_members=False
        )
        fv = member(B, FilterSpec(filt), max_elements=5000)[0]
        runs.append((A, B, gv, fv, filt))
    return runs


def test_criterion_4_generator_filter_equivalence():
    start = time.perf_counter()
    runs = _criterion_4_runs()
    agree = sum(1 for _, _, gv, fv, _ in runs if gv == fv)
    positives = sum(1 for _, _, gv, _, _ in runs if gv)
    elapsed = time.perf_counter() - start
    ok = agree == 20
    assert ok, _line(4, ok, f"{agree}/20 agreements")
    _line(
        4, ok,
        f"20/20 generator/filter agreement ({positives} positive), {elapsed:.2f}s",
    )


def test_criterion_5_pointwise_uniformity():
    start = time.perf_counter()
    all_ok = True
    for A in (semilattice2(), z_mod(2), z_mod(3)):
        clear_free_cache()
        for k in (1, 2):
            rep = verify_pointwise_uniformity(A, k)
            all_ok = all_ok and rep["verdict"]
    elapsed = time.perf_counter() - start
    ok = all_ok and elapsed < 60.0
    assert ok, _line(5, ok, f"verdicts ok={all_ok}, {elapsed:.2f}s")
    _line(5, ok, f"pointwise uniformity holds for 3 algebras, k<=2, {elapsed:.2f}s < 60s")


def test_criterion_6_correspondence_roundtrip():
    clear_free_cache()
    start = time.perf_counter()
    rep = verify_correspondence(
        [semilattice2()], universe_size_bound=7, arity_bound=3, tuple_bound=3
    )
    elapsed = time.perf_counter() - start
    failures = (
        len(rep["roundtrip_failures"])
        + len(rep["inverse_substitution_failures"])
        + len(rep["product_intersection_failures"])
    )
    ok = rep["verdict"] and failures == 0
    assert ok, _line(6, ok, f"{failures} failures")
    _line(
        6, ok,
        f"{rep['num_sf_closed_subclasses']} subclasses, "
        f"{rep['inverse_substitution_checked']} substitutions, 0 failures, "
        f"{elapsed:.2f}s",
    )


def test_criterion_7_uniformity_axioms_everywhere():
    start = time.perf_counter()
    filters = [filt for _, _, _, _, filt in _criterion_4_runs()]
    for A in (semilattice2(), z_mod(2), z_mod(3)):
        clear_free_cache()
        closed, _ = close_class(
            ClassOfAlgebras((A,), 9), ["H", "Sf", "Pf"], 9, max_generators=2
        )
        filters.append(
            filter_from_class(closed, [A], 2, validate_members=False)
        )
    clear_free_cache()
    closed, _ = close_class(
        ClassOfAlgebras((semilattice2(),), 7), ["H", "Sf", "Pf"], 7, max_generators=3
    )
    filters.append(filter_from_class(closed, [semilattice2()], 3, validate_members=False))
    all_ok = all(verify_uniformity_axioms(f)["verdict"] for f in filters)
    bad = Entourage(1, 2, frozenset({(0, 1)}))
    bad_report = verify_uniformity_axioms(bad)
    flagged = (
        not bad_report["verdict"] and bad_report["entries"][0]["diagonal"] is False
    )
    elapsed = time.perf_counter() - start
    ok = all_ok and flagged
    assert ok, _line(7, ok, f"filters ok={all_ok} synthetic flagged={flagged}")
    _line(
        7, ok,
        f"axioms hold on {len(filters)} filters, synthetic diagonal violation "
        f"flagged, {elapsed:.2f}s",
    )


def test_criterion_8_cli_contract(capsys, tmp_path):
    from .test_cli import ALGEBRA_FILES, DATA, GOLDEN, GOLDEN_CASES, SCHEMAS, _expand

    start = time.perf_counter()
    for golden_name, args, want_code in GOLDEN_CASES:
        code = cli_run(_expand(args))
        out = capsys.readouterr().out
        assert code == want_code, (golden_name, code)
        assert out == (GOLDEN / golden_name).read_text(), golden_name
    schema = json.loads((SCHEMAS / "report.schema.json").read_text())
    for args in (
        ["member", "--algebra", str(DATA / "z2.json"),
         "--generators", str(DATA / "z4.json"), "--json"],
        ["free", "--base", str(DATA / "semilattice2.json"), "--k", "2", "--json"],
    ):
        code = cli_run(args)
        jsonschema.validate(json.loads(capsys.readouterr().out), schema)
        assert code == 0
    assert cli_run(["show", "--algebra", str(DATA / "missing.json")]) == 2
    assert cli_run(
        ["free", "--base", str(DATA / "z4.json"), "--k", "3", "--max-elements", "5"]
    ) == 3
    capsys.readouterr()
    for name in ALGEBRA_FILES:
        path = DATA / name
        assert serialize_algebra(parse_algebra_file(str(path))) == path.read_text()
    elapsed = time.perf_counter() - start
    ok = True
    _line(
        8, ok,
        f"{len(GOLDEN_CASES)} golden outputs, schema validation, exit codes, "
        f"byte-identical round trips, {elapsed:.2f}s",
    )
