"""The brute-force layer: exhaustive enumeration, rank parity, replay."""

from __future__ import annotations

import json

import pytest

from rmlattice import (
    PreconditionError,
    degree,
    descend_polarization,
    make_order,
    principalize,
    solve_norm,
    standard_instance,
    twist_by_element,
)
from rmlattice.formats import (
    parse_certificate,
    report_to_certificate,
    serialize_certificate,
)
from rmlattice.generator import generate_instance
from rmlattice.oracle import (
    check_symmetric_rank_even,
    enumerate_valid_kernels,
    verify_certificate,
)


def test_enumerate_principal_is_trivial():
    s = standard_instance(make_order(5, 1))
    kernels = enumerate_valid_kernels(s, 3)
    assert len(kernels) == 1
    assert kernels[0].is_trivial()


def test_enumerate_twist_kernels_are_the_kernel_lines():
    for D, p in [(5, 5), (13, 3), (3, 3)]:
        s = standard_instance(make_order(D, 1))
        tw = twist_by_element(s, solve_norm(s.order, p))
        kernels = enumerate_valid_kernels(tw, p)
        nontrivial = [k for k in kernels if not k.is_trivial()]
        assert len(nontrivial) == p + 1  # all lines of the rank-2 kernel
        for k in nontrivial:
            assert k.group_order == p
            out, _ = descend_polarization(tw, k)
            assert degree(out) * p * p == degree(tw)


def test_enumerate_scaled_gram_lists_isotropic_stable_subgroups():
    # gram 3E: the full 3-torsion is inside the kernel of the polarization
    # but its pairing is nondegenerate there, so the full torsion does not
    # descend; only its isotropic action-stable subgroups appear.
    s = standard_instance(make_order(5, 1))
    scaled = twist_by_element(s, s.order.element(3, 0))
    kernels = enumerate_valid_kernels(scaled, 3)
    orders = sorted(k.group_order for k in kernels)
    assert orders[0] == 1
    assert 81 not in orders
    for k in kernels:
        if k.is_trivial():
            continue
        out, _ = descend_polarization(scaled, k)
        assert degree(out) * k.group_order**2 == degree(scaled)


def test_enumerate_rejects_large_primes():
    s = standard_instance(make_order(5, 1))
    with pytest.raises(PreconditionError):
        enumerate_valid_kernels(s, 11)


def test_rank_parity_trials():
    assert check_symmetric_rank_even(3, 120, seed=7)
    assert check_symmetric_rank_even(5, 120, seed=8)
    assert check_symmetric_rank_even(7, 120, seed=9)


def test_verify_accepts_genuine_certificates():
    for seed, params in [(1, (5, 3, [11])), (2, (13, 9, [17])), (3, (5, 1, [5, 29]))]:
        s = generate_instance(*params, seed=seed)
        out, report = principalize(s)
        ok, msg = verify_certificate(s, report_to_certificate(report))
        assert ok, msg


def test_verify_rejects_tampering():
    s = generate_instance(5, 3, [11], seed=4)
    out, report = principalize(s)
    text = serialize_certificate(report)

    # a gram entry in the final surface
    obj = json.loads(text)
    obj["final"]["gram"][0][3] += 1
    ok, msg = verify_certificate(s, parse_certificate(json.dumps(obj)))
    assert not ok and "final" in msg

    # a degree in the middle of the ledger
    obj = json.loads(text)
    obj["steps"][1]["degree_after"] += 11
    ok, msg = verify_certificate(s, parse_certificate(json.dumps(obj)))
    assert not ok

    # the recorded rank invariant
    obj = json.loads(text)
    obj["steps"][1]["t"] = 3
    ok, msg = verify_certificate(s, parse_certificate(json.dumps(obj)))
    assert not ok and "t=" in msg

    # a kernel overlattice entry
    obj = json.loads(text)
    row = obj["steps"][1]["kernel_overlattice"][0]
    row[0] = "2/3" if row[0] != "2/3" else "1/3"
    ok, msg = verify_certificate(s, parse_certificate(json.dumps(obj)))
    assert not ok

    # the seed must stay pinned at zero
    obj = json.loads(text)
    obj["seed"] = 5
    ok, msg = verify_certificate(s, parse_certificate(json.dumps(obj)))
    assert not ok and "seed" in msg


def test_verify_rejects_reordered_steps():
    s = generate_instance(5, 3, [11], seed=6)
    out, report = principalize(s)
    cert = report_to_certificate(report)
    reordered = cert.__class__(
        seed=cert.seed,
        steps=tuple(reversed(cert.steps)),
        final=cert.final,
    )
    ok, msg = verify_certificate(s, reordered)
    assert not ok


def test_verify_rejects_wrong_instance():
    s1 = generate_instance(5, 3, [11], seed=8)
    s2 = generate_instance(5, 3, [11], seed=9)
    assert s1 != s2
    _, report = principalize(s1)
    ok, msg = verify_certificate(s2, report_to_certificate(report))
    assert not ok


def test_verify_is_deterministic():
    s = generate_instance(13, 1, [3, 17], seed=10)
    _, report = principalize(s)
    cert = report_to_certificate(report)
    first = verify_certificate(s, cert)
    second = verify_certificate(s, cert)
    assert first == second == (True, "certificate replays to an identical surface")


def test_reduction_kernels_member_of_enumeration():
    # every quotient move the reductions take at p <= 7 uses a kernel the
    # exhaustive enumeration also finds
    from rmlattice import squarefree_reduce

    s = standard_instance(make_order(13, 1))
    el = s.order.element(2, 1)
    tw = twist_by_element(twist_by_element(s, el), el)
    out, steps = squarefree_reduce(tw, 3)
    quotients = [st for st in steps if st.kind == "quotient"]
    assert quotients
    listed = enumerate_valid_kernels(tw, 3)
    assert any(
        st.kernel.overlattice == k.overlattice for st in quotients for k in listed
    )
