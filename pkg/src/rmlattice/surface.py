"""Rank-4 lattice model of a polarized abelian surface with real multiplication.

A surface is a triple (order, action, gram): the lattice is Z^4, `action`
is the integer matrix by which the order generator acts, and `gram` is a
nondegenerate integral alternating form giving the polarization. The four
defining invariants are: gram antisymmetric, gram nondegenerate with
det = pfaffian^2, action satisfying the generator's minimal polynomial,
and the symmetry identity action^T * gram = gram * action.

Degree, torsion, dual lattices, kernels, pairings, stabilizer orders and
the instance constructors all live here. Everything is a pure function on
immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from . import intmat
from .arith import is_prime
from .errors import InvariantBreach, PreconditionError
from .intmat import IntMat, RatMat
from .quadratic import (
    SPLIT,
    OrderElement,
    RealQuadraticOrder,
    make_order,
    splitting_type,
)


@dataclass(frozen=True)
class PolarizedRMSurface:
    order: RealQuadraticOrder
    action: IntMat
    gram: IntMat

    def __repr__(self) -> str:
        return (
            f"PolarizedRMSurface(D={self.order.D}, conductor={self.order.conductor}, "
            f"degree={degree(self)})"
        )


@dataclass(frozen=True)
class KernelSubgroup:
    """A finite subgroup of torsion, stored as its overlattice L' with L <= L'.

    The overlattice matrix holds a canonical (column Hermite form) basis of
    L' in the coordinates of L, so 1/det gives the group order and the
    exponent is the least m with m*L' <= L.
    """

    surface: PolarizedRMSurface
    overlattice: RatMat

    @property
    def exponent(self) -> int:
        m = 1
        for row in self.overlattice:
            for x in row:
                m = lcm(m, Fraction(x).denominator)
        return m

    @property
    def group_order(self) -> int:
        d = intmat.det(self.overlattice)
        order = Fraction(1) / Fraction(d)
        if order.denominator != 1 or order <= 0:
            raise InvariantBreach("overlattice does not contain the base lattice")
        return int(order)

    def is_trivial(self) -> bool:
        return self.overlattice == intmat.to_fraction(intmat.identity())


# ---------------------------------------------------------------------------
# validation and basic invariants
# ---------------------------------------------------------------------------


def validate(surface: PolarizedRMSurface) -> str | None:
    """None when all invariants hold, else a message naming the first failure."""
    e, a = surface.gram, surface.action
    if not intmat.is_antisymmetric(e):
        return "gram form is not antisymmetric"
    d = intmat.det(e)
    if d == 0:
        return "gram form is degenerate"
    pf = intmat.pfaffian4(e)
    if pf * pf != d:
        return "gram determinant is not the square of its pfaffian"
    t, n = surface.order.trace_omega, surface.order.norm_omega
    lhs = intmat.mat_add(
        intmat.mat_sub(intmat.mat_mul(a, a), intmat.scalar_mul(t, a)),
        intmat.scalar_mul(n, intmat.identity()),
    )
    if lhs != intmat.zeros():
        return "action does not satisfy the order's minimal polynomial"
    if intmat.mat_mul(intmat.transpose(a), e) != intmat.mat_mul(e, a):
        return "action is not symmetric for the gram form"
    return None


def require_valid(surface: PolarizedRMSurface) -> PolarizedRMSurface:
    msg = validate(surface)
    if msg is not None:
        raise PreconditionError(f"invalid surface: {msg}")
    return surface


def pfaffian(surface: PolarizedRMSurface) -> int:
    return intmat.pfaffian4(surface.gram)


def degree(surface: PolarizedRMSurface) -> int:
    """Polarization degree, the index of the lattice in its dual: pfaffian^2."""
    pf = intmat.pfaffian4(surface.gram)
    if pf == 0:
        raise PreconditionError("degenerate gram form has no degree")
    return pf * pf


def canonicalize_orientation(
    order: RealQuadraticOrder, action: IntMat, gram: IntMat
) -> tuple[PolarizedRMSurface, IntMat]:
    """Build a surface with positive pfaffian, swapping the last two basis
    vectors when needed; returns (surface, permutation used)."""
    pf = intmat.pfaffian4(gram)
    if pf == 0:
        raise PreconditionError("degenerate gram form")
    perm = intmat.identity()
    if pf < 0:
        perm = intmat.freeze(
            [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]
        )
        action = intmat.mat_mul(intmat.mat_mul(perm, action), perm)
        gram = intmat.mat_mul(intmat.mat_mul(perm, gram), perm)
    surface = PolarizedRMSurface(order, intmat.freeze(action), intmat.freeze(gram))
    if intmat.pfaffian4(surface.gram) <= 0:
        raise InvariantBreach("orientation swap did not fix the pfaffian sign")
    return surface, perm


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def standard_instance(order: RealQuadraticOrder) -> PolarizedRMSurface:
    """The principal surface on R + R^dual with the trace pairing.

    Basis (1, w) of the first summand and the trace-dual basis of the
    second; the generator acts blockwise by its multiplication matrix and
    the pairing Tr(a*b' - a'*b) has pfaffian exactly 1.
    """
    t, n = order.trace_omega, order.norm_omega
    m = ((0, -n), (1, t))
    action = intmat.freeze(
        [
            (m[0][0], m[0][1], 0, 0),
            (m[1][0], m[1][1], 0, 0),
            (0, 0, m[0][0], m[0][1]),
            (0, 0, m[1][0], m[1][1]),
        ]
    )
    gram = intmat.freeze(
        [
            (0, 0, 0, 1),
            (0, 0, 1, t),
            (0, -1, 0, 0),
            (-1, -t, 0, 0),
        ]
    )
    surface = PolarizedRMSurface(order, action, gram)
    msg = validate(surface)
    if msg is not None:
        raise InvariantBreach(f"standard instance failed validation: {msg}")
    return surface


def element_action(surface: PolarizedRMSurface, el: OrderElement) -> IntMat:
    """Matrix of x + y*w acting on the lattice."""
    if (el.order.D, el.order.conductor) != (
        surface.order.D,
        surface.order.conductor,
    ):
        raise PreconditionError("element belongs to a different order")
    return intmat.mat_add(
        intmat.scalar_mul(el.x, intmat.identity()),
        intmat.scalar_mul(el.y, surface.action),
    )


def twist_by_element(
    surface: PolarizedRMSurface, el: OrderElement
) -> PolarizedRMSurface:
    """Compose the polarization with the action of el: gram becomes gram @ A_el."""
    if el.is_zero():
        raise PreconditionError("cannot twist by zero")
    a_el = element_action(surface, el)
    gram = intmat.mat_mul(surface.gram, a_el)
    out, _ = canonicalize_orientation(surface.order, surface.action, gram)
    msg = validate(out)
    if msg is not None:
        raise InvariantBreach(f"twist produced an invalid surface: {msg}")
    return out


def apply_unimodular(surface: PolarizedRMSurface, u: IntMat) -> PolarizedRMSurface:
    """Change basis by a unimodular matrix: (A, E) -> (U^-1 A U, U^T E U)."""
    d = intmat.det(u)
    if d not in (1, -1):
        raise PreconditionError("basis change must be unimodular")
    u_inv = intmat.to_int(intmat.inverse(u))
    action = intmat.mat_mul(intmat.mat_mul(u_inv, surface.action), u)
    gram = intmat.mat_mul(intmat.mat_mul(intmat.transpose(u), surface.gram), u)
    return PolarizedRMSurface(surface.order, action, gram)


def eigen_sublattice_pullback(
    surface: PolarizedRMSurface, p: int, eigenvalue_index: int
) -> PolarizedRMSurface:
    """Restrict to the index-p sublattice over an action eigen-hyperplane.

    Requires p split and coprime to conductor and degree. The sublattice is
    the preimage of the hyperplane annihilated by the canonical transposed
    eigenvector for the chosen eigenvalue (ascending order), so the output
    is deterministic. Its degree is p^2 times the input degree.
    """
    order = surface.order
    if eigenvalue_index not in (0, 1):
        raise PreconditionError("eigenvalue_index must be 0 or 1")
    if splitting_type(order, p) != SPLIT:
        raise PreconditionError(f"{p} is not split in the field")
    if degree(surface) % p == 0:
        raise PreconditionError(f"{p} already divides the degree")
    t, n = order.trace_omega, order.norm_omega
    roots = sorted(r for r in range(p) if (r * r - t * r + n) % p == 0)
    if len(roots) != 2:
        raise PreconditionError(f"action has no pair of eigenvalues mod {p}")
    r = roots[eigenvalue_index]
    at_shift = intmat.mat_sub(
        intmat.transpose(surface.action), intmat.scalar_mul(r, intmat.identity())
    )
    eigvecs = intmat.kernel_mod_p(at_shift, p)
    if not eigvecs:
        raise InvariantBreach("transposed action has an empty eigenspace")
    v = eigvecs[0]
    hyperplane = intmat.kernel_mod_p(intmat.freeze([v]), p)
    columns = [tuple(x) for x in hyperplane]
    columns += [tuple(p if i == j else 0 for i in range(4)) for j in range(4)]
    basis = intmat.hnf_column_basis(columns)
    h = intmat.to_int(basis)
    h_inv = intmat.inverse(h)
    action_new = intmat.mat_mul(intmat.mat_mul(h_inv, surface.action), intmat.to_fraction(h))
    if not intmat.is_integral(action_new):
        raise InvariantBreach("eigen sublattice is not action stable")
    gram_new = intmat.mat_mul(
        intmat.mat_mul(intmat.transpose(h), surface.gram), h
    )
    out, _ = canonicalize_orientation(order, intmat.to_int(action_new), gram_new)
    msg = validate(out)
    if msg is not None:
        raise InvariantBreach(f"sublattice restriction invalid: {msg}")
    if degree(out) != p * p * degree(surface):
        raise InvariantBreach("sublattice degree bookkeeping failed")
    return out


# ---------------------------------------------------------------------------
# torsion, kernels and pairings
# ---------------------------------------------------------------------------


def torsion_pairing(surface: PolarizedRMSurface, m: int) -> IntMat:
    """The pairing on m-torsion: the gram form reduced mod m (additively in Z/m)."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    return intmat.mat_mod(surface.gram, m)


def torsion_kernel(surface: PolarizedRMSurface, matrix: IntMat, m: int):
    """Independent generators of the kernel of `matrix` acting on (Z/m)^4."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    if m == 1:
        return ()
    if is_prime(m):
        return intmat.kernel_mod_p(matrix, m)
    _, s, v = intmat.snf_with_transforms(matrix)
    gens = []
    for j in range(4):
        d = abs(s[j][j])
        mult = m // gcd(d, m) if d else 1
        vec = tuple(mult * v[i][j] % m for i in range(4))
        if any(vec):
            gens.append(vec)
    return tuple(gens)


def dual_basis(surface: PolarizedRMSurface) -> RatMat:
    """Canonical basis of the dual lattice of the gram form (columns)."""
    inv = intmat.inverse(surface.gram)
    cols = [tuple(inv[i][j] for i in range(4)) for j in range(4)]
    return intmat.hnf_column_basis(cols)


def kernel_of_polarization(
    surface: PolarizedRMSurface,
) -> tuple[KernelSubgroup, tuple[int, int, int, int]]:
    """The kernel L*/L of the polarization plus elementary divisors of the gram.

    Divisors come paired (d1, d1, d2, d2) with d1 | d2; the group order is
    (d1*d2)^2 = degree.
    """
    if intmat.det(surface.gram) == 0:
        raise PreconditionError("degenerate gram form")
    divisors = intmat.snf_divisors(surface.gram)
    if divisors[0] != divisors[1] or divisors[2] != divisors[3]:
        raise InvariantBreach("alternating form divisors are not paired")
    if divisors[3] % divisors[1] != 0:
        raise InvariantBreach("elementary divisors are not nested")
    kernel = KernelSubgroup(surface, dual_basis(surface))
    if kernel.group_order != degree(surface):
        raise InvariantBreach("dual lattice index does not match the degree")
    return kernel, divisors


def kernel_smith_generators(
    surface: PolarizedRMSurface,
) -> tuple[tuple[int, ...], tuple[tuple[Fraction, ...], ...]]:
    """Generators g_i of the polarization kernel with orders the divisors d_i.

    From u @ gram @ v = s, the dual lattice is spanned by the columns of
    v/d_i, so the class of column i has exact order d_i.
    """
    _, s, v = intmat.snf_with_transforms(surface.gram)
    divisors = tuple(abs(s[i][i]) for i in range(4))
    gens = tuple(
        tuple(Fraction(v[i][j], divisors[j]) for i in range(4)) for j in range(4)
    )
    return divisors, gens


def weil_on_kernel(surface: PolarizedRMSurface, a, b) -> Fraction:
    """Pairing of two kernel classes given by rational lifts in the dual lattice.

    Returns the value in Q/Z as a fraction in [0, 1); the result does not
    depend on the choice of lifts.
    """
    e = intmat.to_fraction(surface.gram)
    for vec in (a, b):
        row = intmat.mat_vec(intmat.transpose(e), tuple(Fraction(x) for x in vec))
        if not all(Fraction(x).denominator == 1 for x in row):
            raise PreconditionError("lift is not in the dual lattice")
    av = tuple(Fraction(x) for x in a)
    bv = tuple(Fraction(x) for x in b)
    val = sum(av[i] * e[i][j] * bv[j] for i in range(4) for j in range(4))
    return val - (val.numerator // val.denominator)


def polarization_kernel_mod_p(surface: PolarizedRMSurface, p: int):
    """The p-torsion of the polarization kernel as a subspace of L/pL."""
    return intmat.kernel_mod_p(intmat.mat_mod(surface.gram, p), p)


def kernel_from_subspace(
    surface: PolarizedRMSurface, basis, p: int
) -> KernelSubgroup:
    """KernelSubgroup spanned by p-torsion classes with the given mod-p basis."""
    columns = [tuple(Fraction(x, p) for x in vec) for vec in basis]
    columns += list(intmat.transpose(intmat.identity()))
    return KernelSubgroup(surface, intmat.hnf_column_basis(columns))


def stabilizer_order(surface: PolarizedRMSurface) -> RealQuadraticOrder:
    """Largest order (conductor dividing the stored one) acting integrally.

    With generators scaled linearly by the conductor, the conductor-g
    generator acts by (g/f) * action, so integrality is a matrix content
    test.
    """
    f = surface.order.conductor
    content = intmat.matrix_content(surface.action)
    g = f // gcd(f, content)
    return make_order(surface.order.D, g)
