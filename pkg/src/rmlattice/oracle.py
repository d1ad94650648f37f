"""Brute-force verification layer: exhaustive kernel enumeration at small
primes, randomized checks of the symmetric-endomorphism rank parity, and
full certificate replay.

Nothing here is clever on purpose: the enumeration walks every subspace of
(Z/p)^4 in echelon form, and the replay recomputes every kernel, descent,
division and ledger entry from scratch, accepting a certificate only when
it reproduces the recorded final surface bit for bit.
"""

from __future__ import annotations

import random
from itertools import combinations, product

from . import intmat
from .arith import is_prime
from .errors import (
    DescentError,
    InvariantBreach,
    LatticeModelError,
    PreconditionError,
)
from .formats import CertificateData
from .isogeny import DIVIDE, QUOTIENT, SCALE, TWIST
from .isogeny import can_descend, descend_polarization, divide_by_symmetric, scale_polarization, twist_polarization
from .quadratic import make_order
from .reduction import (
    _branch_decision,
    enlargement_kernel,
    order_p_squared_subspace,
)
from .surface import (
    KernelSubgroup,
    PolarizedRMSurface,
    degree,
    kernel_from_subspace,
    validate,
)


# ---------------------------------------------------------------------------
# exhaustive kernel enumeration
# ---------------------------------------------------------------------------


def _echelon_subspaces(p: int, n: int = 4):
    """Yield a basis (tuple of row vectors) for every nonzero subspace of
    (Z/p)^n, one reduced echelon basis per subspace."""
    for k in range(1, n + 1):
        for pivots in combinations(range(n), k):
            free_positions = [
                (i, j)
                for i in range(k)
                for j in range(pivots[i] + 1, n)
                if j not in pivots
            ]
            for values in product(range(p), repeat=len(free_positions)):
                rows = [[0] * n for _ in range(k)]
                for i in range(k):
                    rows[i][pivots[i]] = 1
                for (i, j), v in zip(free_positions, values):
                    rows[i][j] = v
                yield intmat.freeze(rows)


def enumerate_valid_kernels(
    surface: PolarizedRMSurface, p: int
) -> tuple[KernelSubgroup, ...]:
    """Every subgroup of the p-torsion through which the polarization descends.

    Exhaustive over all subspaces of (Z/p)^4 (echelon enumeration), keeping
    those that are action stable, inside the polarization kernel, and
    isotropic for the kernel pairing. The trivial subgroup is included.
    Ordered by overlattice for reproducibility.
    """
    if p == 2 or not is_prime(p) or p > 7:
        raise PreconditionError(f"enumeration requires an odd prime <= 7, got {p}")
    e_t = intmat.transpose(surface.gram)
    results = [kernel_from_subspace(surface, (), p)]
    for basis in _echelon_subspaces(p):
        if not all(
            intmat.subspace_contains(
                basis, tuple(x % p for x in intmat.mat_vec(surface.action, v)), p
            )
            for v in basis
        ):
            continue
        if not all(
            all(x % p == 0 for x in intmat.mat_vec(e_t, v)) for v in basis
        ):
            continue
        p2 = p * p
        pairings = (
            sum(a[i] * surface.gram[i][j] * b[j] for i in range(4) for j in range(4))
            for a in basis
            for b in basis
        )
        if not all(v % p2 == 0 for v in pairings):
            continue
        kernel = kernel_from_subspace(surface, basis, p)
        if not can_descend(surface, kernel):
            raise InvariantBreach(
                "kernel passed the congruence filters but fails descent"
            )
        results.append(kernel)
    return tuple(sorted(results, key=lambda k: k.overlattice))


# ---------------------------------------------------------------------------
# randomized rank parity checks
# ---------------------------------------------------------------------------


def _random_antisymmetric(rng: random.Random, p: int):
    m = [[0] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            v = rng.randrange(p)
            m[i][j] = v
            m[j][i] = (-v) % p
    return intmat.freeze(m)


def check_symmetric_rank_even(p: int, trials: int, seed: int = 0) -> bool:
    """Random nondegenerate alternating forms B and B-symmetric endomorphisms
    have image of even rank, with each image vector pairing to zero with its
    preimage. Returns True when every seeded trial confirms both.
    """
    if p == 2 or not is_prime(p):
        raise PreconditionError(f"{p} is not an odd prime")
    rng = random.Random(seed)
    for _ in range(trials):
        while True:
            b = _random_antisymmetric(rng, p)
            if intmat.det(b) % p:
                break
        while True:
            s = _random_antisymmetric(rng, p)
            if any(x for row in s for x in row):
                break
        b_inv = intmat.inv_mod_p(b, p)
        eps = intmat.mat_mod(intmat.mat_mul(b_inv, s), p)
        sym_left = intmat.mat_mod(intmat.mat_mul(intmat.transpose(eps), b), p)
        sym_right = intmat.mat_mod(intmat.mat_mul(b, eps), p)
        if sym_left != sym_right:
            return False
        if intmat.rank_mod_p(eps, p) % 2 != 0:
            return False
        for _ in range(4):
            v = tuple(rng.randrange(p) for _ in range(4))
            ev = intmat.mat_vec(eps, v)
            pairing = sum(ev[i] * b[i][j] * v[j] for i in range(4) for j in range(4))
            if pairing % p:
                return False
    return True


# ---------------------------------------------------------------------------
# certificate replay
# ---------------------------------------------------------------------------


def verify_certificate(
    start: PolarizedRMSurface, certificate: CertificateData
) -> tuple[bool, str]:
    """Replay a certificate from scratch against its input surface.

    Recomputes every kernel, rank invariant, descent, division and degree,
    requires each step to be the canonical move of its kind at that point,
    and accepts only if the final surface matches the recorded one exactly.
    Returns (ok, message); the message names the first divergence.
    """
    try:
        return _replay(start, certificate)
    except LatticeModelError as exc:
        return False, f"replay aborted: {exc}"


def _replay(start, certificate):
    if certificate.seed != 0:
        return False, (
            f"seed is {certificate.seed}; deterministic pipeline certificates "
            "always carry seed 0"
        )
    msg = validate(start)
    if msg is not None:
        return False, f"input surface invalid: {msg}"
    current = start
    pending_twist_prime: int | None = None
    for idx, step in enumerate(certificate.steps):
        label = f"step {idx} ({step.kind} at {step.prime})"
        if step.degree_before != degree(current):
            return False, (
                f"{label}: degree_before {step.degree_before} does not match "
                f"the current degree {degree(current)}"
            )
        if pending_twist_prime is not None and not (
            step.kind == QUOTIENT and step.t is not None and step.prime == pending_twist_prime
        ):
            return False, f"{label}: expected the enlargement quotient at {pending_twist_prime}"
        if step.kind == TWIST:
            ok, msg, current = _replay_twist(current, step)
            if not ok:
                return False, f"{label}: {msg}"
            pending_twist_prime = step.prime
        elif step.kind == QUOTIENT and step.t is not None:
            if pending_twist_prime != step.prime:
                return False, f"{label}: enlargement quotient without its twist"
            ok, msg, current = _replay_enlargement_quotient(current, step)
            if not ok:
                return False, f"{label}: {msg}"
            pending_twist_prime = None
        elif step.kind == QUOTIENT and step.branch is not None:
            ok, msg, current = _replay_branch_move(current, step)
            if not ok:
                return False, f"{label}: {msg}"
        elif step.kind == DIVIDE:
            if step.branch is None:
                return False, f"{label}: divide steps must carry a branch label"
            ok, msg, current = _replay_branch_move(current, step)
            if not ok:
                return False, f"{label}: {msg}"
        elif step.kind == QUOTIENT:
            ok, msg, current = _replay_squarefree_quotient(current, step)
            if not ok:
                return False, f"{label}: {msg}"
        elif step.kind == SCALE:
            ok, msg, current = _replay_scale(current, step)
            if not ok:
                return False, f"{label}: {msg}"
        else:
            return False, f"{label}: unknown step kind"
        if degree(current) != step.degree_after:
            return False, (
                f"{label}: replay reached degree {degree(current)}, certificate "
                f"says {step.degree_after}"
            )
    if pending_twist_prime is not None:
        return False, "certificate ends inside an enlargement move"
    final = certificate.final
    if (current.order.D, current.order.conductor) != (
        final.order.D,
        final.order.conductor,
    ):
        return False, "final order does not match the replayed order"
    if current.action != final.action:
        return False, "final action matrix does not match the replay"
    if current.gram != final.gram:
        return False, "final gram matrix does not match the replay"
    return True, "certificate replays to an identical surface"


def _replay_twist(current, step):
    p = step.prime
    if p == 2 or not is_prime(p):
        return False, f"{p} is not an odd prime", current
    if step.alpha != (p**3, 0):
        return False, "twist element is not the cube of the prime", current
    if current.order.conductor % p:
        return False, f"{p} does not divide the conductor", current
    if degree(current) % p == 0:
        return False, f"{p} divides the degree", current
    el = current.order.element(p**3, 0)
    new_surface, _ = twist_polarization(current, el)
    return True, "", new_surface


def _replay_enlargement_quotient(current, step):
    p = step.prime
    t = intmat.rank_mod_p(current.action, p)
    if step.t != t:
        return False, f"recorded t={step.t} but the action has rank {t} mod {p}", current
    if t != 2:
        return False, f"rank invariant t={t} breaches the enlargement contract", current
    kernel = enlargement_kernel(current, p)
    if step.kernel_overlattice != kernel.overlattice:
        return False, "kernel overlattice differs from the canonical one", current
    if kernel.group_order != p**6:
        return False, f"kernel order {kernel.group_order} is not {p}^6", current
    try:
        descended, _ = descend_polarization(current, kernel)
    except (DescentError, PreconditionError) as exc:
        return False, f"descent failed: {exc}", current
    scaled = tuple(tuple(x for x in row) for row in descended.action)
    if any(x % p for row in scaled for x in row):
        return False, "enlarged generator action is not divisible by the prime", current
    action = intmat.freeze(tuple(x // p for x in row) for row in scaled)
    new_order = make_order(current.order.D, current.order.conductor // p)
    out = PolarizedRMSurface(new_order, action, descended.gram)
    msg = validate(out)
    if msg is not None:
        return False, f"replayed surface invalid: {msg}", current
    return True, "", out


def _replay_branch_move(current, step):
    p = step.prime
    divisors = intmat.snf_divisors(current.gram)
    if divisors[1] % p == 0 or divisors[3] % (p * p) == 0:
        return False, "degree-reduction move applied before stabilization", current
    if current.order.conductor % p == 0:
        return False, f"{p} divides the conductor", current
    try:
        branch, subspace, el = _branch_decision(current, p)
    except PreconditionError as exc:
        return False, f"branch recomputation failed: {exc}", current
    if branch != step.branch:
        return False, f"recorded branch {step.branch} but recomputed {branch}", current
    if subspace is not None:
        if step.kind != QUOTIENT:
            return False, "branch calls for a quotient but step divides", current
        kernel = kernel_from_subspace(current, subspace, p)
        if step.kernel_overlattice != kernel.overlattice:
            return False, "kernel overlattice differs from the canonical one", current
        new_surface, _ = descend_polarization(current, kernel)
        return True, "", new_surface
    if step.kind != DIVIDE:
        return False, "branch calls for a division but step quotients", current
    if step.alpha != (el.x, el.y):
        return False, "divide element differs from the canonical factor", current
    new_surface, _ = divide_by_symmetric(current, el)
    return True, "", new_surface


def _replay_squarefree_quotient(current, step):
    p = step.prime
    if all(x % p == 0 for row in current.gram for x in row):
        return False, "expected a scale move (gram vanishes mod the prime)", current
    subspace = order_p_squared_subspace(current, p)
    if not subspace:
        return False, "no order-p^2 kernel classes; quotient is not canonical", current
    kernel = kernel_from_subspace(current, subspace, p)
    if step.kernel_overlattice != kernel.overlattice:
        return False, "kernel overlattice differs from the canonical one", current
    try:
        new_surface, _ = descend_polarization(current, kernel)
    except (DescentError, PreconditionError) as exc:
        return False, f"descent failed: {exc}", current
    return True, "", new_surface


def _replay_scale(current, step):
    p = step.prime
    if any(x % p for row in current.gram for x in row):
        return False, "gram form is not divisible by the scale factor", current
    new_surface, _ = scale_polarization(current, p)
    return True, "", new_surface
