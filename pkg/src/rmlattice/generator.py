"""Seeded construction of polarized instances with prescribed degree primes.

Starting from the principal standard instance, each requested prime raises
the degree by p^2, either by twisting with a norm +-p element of the order
or by restricting to an eigen-sublattice (split primes only), chosen by the
seeded generator. A final seeded unimodular basis change scrambles the
presentation without touching any invariant.
"""

from __future__ import annotations

import random

from . import intmat
from .arith import is_prime
from .errors import InvariantBreach, PreconditionError
from .quadratic import SPLIT, factor_prime, humbert_nonempty, make_order, splitting_type
from .surface import (
    PolarizedRMSurface,
    apply_unimodular,
    degree,
    eigen_sublattice_pullback,
    pfaffian,
    stabilizer_order,
    standard_instance,
    twist_by_element,
    validate,
)


def random_unimodular(rng: random.Random, size: int = 4, ops: int = 8) -> intmat.IntMat:
    """A determinant-one integer matrix built from random shear operations."""
    u = [list(r) for r in intmat.identity(size)]
    for _ in range(ops):
        i, j = rng.sample(range(size), 2)
        c = rng.choice((-2, -1, 1, 2))
        for r in range(size):
            u[r][i] += c * u[r][j]
    return intmat.freeze(u)


def generate_instance(
    D: int, conductor: int, degree_primes, seed: int
) -> PolarizedRMSurface:
    """Build a valid instance of degree prod(p^2) over the requested primes.

    Requires an odd conductor, odd primes coprime to it, and each prime
    reducible in the maximal order; raises PreconditionError otherwise
    (for example for an inert prime, which no valid instance can carry in
    its degree).
    """
    if conductor % 2 == 0:
        raise PreconditionError("conductor must be odd")
    order = make_order(D, conductor)
    maximal = make_order(D, 1)
    primes = list(degree_primes)
    for p in primes:
        if p == 2 or not is_prime(p):
            raise PreconditionError(f"degree prime {p} must be an odd prime")
        if conductor % p == 0:
            raise PreconditionError(f"degree prime {p} divides the conductor")
        if factor_prime(maximal, p) is None:
            raise PreconditionError(
                f"{p} is not reducible in the maximal order of Q(sqrt({D}))"
            )
    rng = random.Random(seed)
    surface = standard_instance(order)
    for p in primes:
        surface = _raise_degree(surface, p, rng)
    surface = apply_unimodular(surface, random_unimodular(rng))
    if pfaffian(surface) <= 0:
        raise InvariantBreach("scramble flipped the pfaffian sign")
    msg = validate(surface)
    if msg is not None:
        raise InvariantBreach(f"generated instance invalid: {msg}")
    if stabilizer_order(surface).conductor != conductor:
        raise InvariantBreach("generated instance lost its acting order")
    if not humbert_nonempty(order.discriminant, pfaffian(surface)):
        # Happens for a repeated ramified prime, whose two twists compose to
        # a scalar: the resulting polarization type fails the Humbert
        # congruence, so no such surface exists and the request is refused.
        raise PreconditionError(
            "requested degree profile fails the Humbert congruence "
            f"(discriminant {order.discriminant}, pfaffian {pfaffian(surface)})"
        )
    return surface


def _raise_degree(
    surface: PolarizedRMSurface, p: int, rng: random.Random
) -> PolarizedRMSurface:
    options = []
    factors = factor_prime(surface.order, p)
    if factors is not None:
        options.append(("twist", factors[0]))
        options.append(("twist", factors[1]))
    if splitting_type(surface.order, p) == SPLIT and degree(surface) % p != 0:
        options.append(("pullback", 0))
        options.append(("pullback", 1))
    if not options:
        raise PreconditionError(
            f"cannot realize degree prime {p} at conductor "
            f"{surface.order.conductor}: no norm ±{p} element in the order "
            "and no split eigen-sublattice available"
        )
    kind, arg = rng.choice(options)
    if kind == "twist":
        return twist_by_element(surface, arg)
    return eigen_sublattice_pullback(surface, p, arg)
