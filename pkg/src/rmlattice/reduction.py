"""The three reduction procedures and the principalization pipeline.

squarefree_reduce shrinks the p-part of the polarization kernel until its
elementary divisors at p are squarefree. enlarge_order_step enlarges the
acting order by one conductor prime without changing the degree, recording
the rank invariant t of the old generator mod p (always 2 on valid input).
reduce_degree_step removes a reducible prime from the degree, quotienting
or dividing according to how the kernel meets the two factor kernels.
principalize chains them: conductor primes first, then degree primes, and
ends with an independent recheck that the result is principal with a
maximal acting order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import intmat
from .arith import factorize, is_prime
from .errors import DescentError, InvariantBreach, PreconditionError
from .isogeny import (
    DIVIDE,
    QUOTIENT,
    SCALE,
    TWIST,
    IsogenyStep,
    descend_polarization,
    divide_by_symmetric,
    make_step,
    scale_polarization,
    twist_polarization,
)
from .quadratic import (
    are_associates_in_maximal,
    bezout_conductor,
    factor_prime,
    make_order,
)
from .surface import (
    KernelSubgroup,
    PolarizedRMSurface,
    degree,
    element_action,
    kernel_from_subspace,
    polarization_kernel_mod_p,
    stabilizer_order,
    validate,
)

SPLIT_QUOTIENT = "split_quotient"
SPLIT_DIVIDE = "split_divide"
ASSOCIATE_QUOTIENT = "associate_quotient"
ASSOCIATE_DIVIDE = "associate_divide"


@dataclass(frozen=True)
class SurfaceSummary:
    discriminant: int
    conductor: int
    degree: int


def summarize(surface: PolarizedRMSurface) -> SurfaceSummary:
    return SurfaceSummary(
        discriminant=surface.order.discriminant,
        conductor=surface.order.conductor,
        degree=degree(surface),
    )


@dataclass(frozen=True)
class PipelineReport:
    """Replayable record of a principalization run."""

    seed: int
    input_summary: SurfaceSummary
    output_summary: SurfaceSummary
    steps: tuple[IsogenyStep, ...]
    final: PolarizedRMSurface

    @property
    def t_values(self) -> tuple[tuple[int, int], ...]:
        return tuple((s.prime, s.t) for s in self.steps if s.t is not None)

    @property
    def branches(self) -> tuple[tuple[int, str], ...]:
        return tuple((s.prime, s.branch) for s in self.steps if s.branch is not None)


def _require_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise PreconditionError(f"{p} is not an odd prime")


# ---------------------------------------------------------------------------
# squarefree reduction of the kernel at one prime
# ---------------------------------------------------------------------------


def order_p_squared_subspace(surface: PolarizedRMSurface, p: int):
    """Mod-p classes of p * (kernel p^2-torsion), canonically based.

    These classes are exactly the reductions of lattice vectors x with
    gram^T x = 0 mod p^2, computed by lifting the mod-p kernel: a kernel
    vector b lifts iff (gram^T b)/p lands in the image of gram^T mod p,
    which is a linear condition on mod-p coefficients. No big-integer
    elimination is involved.
    """
    e_t = intmat.transpose(surface.gram)
    base = intmat.kernel_mod_p(intmat.mat_mod(e_t, p), p)
    if not base:
        return ()
    carries = [
        tuple((x // p) % p for x in intmat.mat_vec(e_t, b)) for b in base
    ]
    cokernel = intmat.kernel_mod_p(intmat.mat_mod(surface.gram, p), p)
    if cokernel:
        conditions = intmat.freeze(
            tuple(sum(u[i] * w[i] for i in range(4)) % p for w in carries)
            for u in cokernel
        )
        coeffs = intmat.kernel_mod_p(conditions, p)
    else:
        coeffs = intmat.identity(len(base))
    vecs = []
    for c in coeffs:
        vec = tuple(
            sum(c[i] * base[i][k] for i in range(len(base))) % p for k in range(4)
        )
        vecs.append(vec)
    return intmat.span_mod_p(vecs, p)


def squarefree_reduce(
    surface: PolarizedRMSurface, p: int
) -> tuple[PolarizedRMSurface, tuple[IsogenyStep, ...]]:
    """Scale and quotient until the p-part of the kernel divisors is (1, p) or (1, 1).

    Move (a): when the whole gram form vanishes mod p, divide it by p.
    Move (b): when the kernel has a point of order p^2, quotient by p times
    the p^2-torsion of the kernel; descent always succeeds there. Each move
    strictly lowers the p-valuation of the degree.
    """
    _require_odd_prime(p)
    steps: list[IsogenyStep] = []
    current = surface
    while True:
        deg_before = degree(current)
        if all(x % p == 0 for row in current.gram for x in row):
            new_surface, rebasing = scale_polarization(current, p)
            steps.append(
                make_step(
                    kind=SCALE,
                    prime=p,
                    degree_before=deg_before,
                    degree_after=degree(new_surface),
                    rebasing=rebasing,
                )
            )
        else:
            subspace = order_p_squared_subspace(current, p)
            if not subspace:
                break
            kernel = kernel_from_subspace(current, subspace, p)
            try:
                new_surface, rebasing = descend_polarization(current, kernel)
            except (DescentError, PreconditionError) as exc:
                raise InvariantBreach(
                    f"guaranteed squarefree descent failed at {p}: {exc}"
                ) from exc
            steps.append(
                make_step(
                    kind=QUOTIENT,
                    prime=p,
                    kernel=kernel,
                    degree_before=deg_before,
                    degree_after=degree(new_surface),
                    rebasing=rebasing,
                )
            )
        if _p_valuation(degree(new_surface), p) >= _p_valuation(deg_before, p):
            raise InvariantBreach(f"degree p-valuation did not drop at {p}")
        current = new_surface
    _check_squarefree_state(current, p)
    return current, tuple(steps)


def _p_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _check_squarefree_state(surface: PolarizedRMSurface, p: int) -> None:
    divisors = intmat.snf_divisors(surface.gram)
    v1, v2 = _p_valuation(divisors[1], p), _p_valuation(divisors[3], p)
    if not (v1 == 0 and v2 <= 1):
        raise InvariantBreach(
            f"squarefree reduction left divisor p-parts ({p**v1}, {p**v2}) at {p}"
        )


# ---------------------------------------------------------------------------
# enlarging the acting order at one conductor prime
# ---------------------------------------------------------------------------


def enlargement_kernel(surface: PolarizedRMSurface, p: int) -> KernelSubgroup:
    """The canonical kernel (1/p)L + (1/p^2)(action)L of the enlargement move."""
    columns = [
        tuple(Fraction(1 if i == j else 0, p) for i in range(4)) for j in range(4)
    ]
    columns += [
        tuple(Fraction(surface.action[i][j], p * p) for i in range(4))
        for j in range(4)
    ]
    return KernelSubgroup(surface, intmat.hnf_column_basis(columns))


def enlarge_order_step(
    surface: PolarizedRMSurface, p: int
) -> tuple[PolarizedRMSurface, tuple[IsogenyStep, IsogenyStep], int]:
    """One conductor-prime enlargement: twist the gram by p^3, quotient by the
    canonical kernel of order p^6, divide the action by p.

    Preserves the degree exactly; t is the rank of the action mod p and any
    value other than 2 is an invariant breach, never something to continue
    past.
    """
    _require_odd_prime(p)
    order = surface.order
    f = order.conductor
    if f % p != 0:
        raise PreconditionError(f"{p} does not divide the conductor {f}")
    if stabilizer_order(surface).conductor % p != 0:
        raise PreconditionError(
            f"an order of conductor prime to {p} already acts on the lattice"
        )
    deg = degree(surface)
    if deg % p == 0:
        raise PreconditionError(f"{p} divides the degree {deg}")
    t = intmat.rank_mod_p(surface.action, p)
    if t != 2:
        raise InvariantBreach(f"enlargement rank invariant is {t}, expected 2")
    el_cubed = order.element(p**3, 0)
    twisted, twist_rebasing = twist_polarization(surface, el_cubed)
    twist_step = make_step(
        kind=TWIST,
        prime=p,
        alpha=el_cubed,
        degree_before=deg,
        degree_after=degree(twisted),
        rebasing=twist_rebasing,
    )
    kernel = enlargement_kernel(twisted, p)
    if kernel.group_order != p ** (4 + t):
        raise InvariantBreach(
            f"enlargement kernel has order {kernel.group_order}, expected {p ** (4 + t)}"
        )
    try:
        descended, rebasing = descend_polarization(twisted, kernel)
    except (DescentError, PreconditionError) as exc:
        raise InvariantBreach(f"guaranteed enlargement descent failed: {exc}") from exc
    quotient_step = make_step(
        kind=QUOTIENT,
        prime=p,
        kernel=kernel,
        degree_before=degree(twisted),
        degree_after=degree(descended),
        t=t,
        rebasing=rebasing,
    )
    scaled_action = intmat.to_fraction(descended.action)
    scaled_action = tuple(tuple(x / p for x in row) for row in scaled_action)
    if not intmat.is_integral(scaled_action):
        raise InvariantBreach("enlarged generator does not act integrally")
    new_order = make_order(order.D, f // p)
    out = PolarizedRMSurface(new_order, intmat.to_int(scaled_action), descended.gram)
    msg = validate(out)
    if msg is not None:
        raise InvariantBreach(f"enlargement produced an invalid surface: {msg}")
    if degree(out) != deg:
        raise InvariantBreach("enlargement changed the degree")
    return out, (twist_step, quotient_step), t


# ---------------------------------------------------------------------------
# removing one reducible prime from the degree
# ---------------------------------------------------------------------------


def _branch_decision(surface: PolarizedRMSurface, p: int):
    """Decide the degree-reduction move on a squarefree-stable surface.

    Returns (branch, kernel_subspace_or_None, divide_element_or_None).
    """
    order = surface.order
    factors = factor_prime(order, p)
    if factors is None:
        raise PreconditionError(f"{p} is not reducible in the order")
    a1, a2 = factors
    kernel_p = polarization_kernel_mod_p(surface, p)
    if len(kernel_p) != 2:
        raise InvariantBreach(
            f"kernel p-torsion has dimension {len(kernel_p)}, expected 2"
        )
    ker_a1 = intmat.kernel_mod_p(intmat.mat_mod(element_action(surface, a1), p), p)
    ker_a2 = intmat.kernel_mod_p(intmat.mat_mod(element_action(surface, a2), p), p)
    lam1 = intmat.intersect_mod_p(kernel_p, ker_a1, p)
    lam2 = intmat.intersect_mod_p(kernel_p, ker_a2, p)
    if are_associates_in_maximal(a1, a2):
        if len(lam1) == 0:
            raise InvariantBreach(
                "associate-case intersection is zero, contradicting stability"
            )
        if len(lam1) == 1:
            return ASSOCIATE_QUOTIENT, lam1, None
        return ASSOCIATE_DIVIDE, None, a1
    # Non-associate factors: the conductor identity splits the kernel.
    bezout_conductor(a1, a2, order)  # existence check; raises on failure
    if len(lam1) + len(lam2) != 2:
        raise InvariantBreach("kernel does not split across the two factor kernels")
    if len(lam1) == 2:
        return SPLIT_DIVIDE, None, a1
    if len(lam2) == 2:
        return SPLIT_DIVIDE, None, a2
    return SPLIT_QUOTIENT, lam1, None


def reduce_degree_step(
    surface: PolarizedRMSurface, p: int
) -> tuple[PolarizedRMSurface, tuple[IsogenyStep, ...], str | None]:
    """Remove the prime p from the degree at a prime not dividing the conductor.

    Runs squarefree reduction at p first; if p still divides the degree the
    kernel p-torsion is a plane, and the move quotients by a line of it or
    divides by a norm +-p factor, chosen by how the plane meets the two
    factor kernels. Returns the branch label, or None when squarefree
    reduction alone cleared p.
    """
    _require_odd_prime(p)
    order = surface.order
    if order.conductor % p == 0:
        raise PreconditionError(f"{p} divides the conductor")
    if degree(surface) % p != 0:
        raise PreconditionError(f"{p} does not divide the degree")
    if factor_prime(order, p) is None:
        raise PreconditionError(f"{p} is not reducible in the order")
    current, steps = squarefree_reduce(surface, p)
    if degree(current) % p != 0:
        return current, steps, None
    branch, kernel_subspace, divide_el = _branch_decision(current, p)
    deg_before = degree(current)
    if kernel_subspace is not None:
        kernel = kernel_from_subspace(current, kernel_subspace, p)
        try:
            new_surface, rebasing = descend_polarization(current, kernel)
        except (DescentError, PreconditionError) as exc:
            raise InvariantBreach(
                f"guaranteed degree-reduction descent failed at {p}: {exc}"
            ) from exc
        move = make_step(
            kind=QUOTIENT,
            prime=p,
            kernel=kernel,
            degree_before=deg_before,
            degree_after=degree(new_surface),
            branch=branch,
            rebasing=rebasing,
        )
    else:
        try:
            new_surface, rebasing = divide_by_symmetric(current, divide_el)
        except DescentError as exc:
            raise InvariantBreach(
                f"guaranteed division failed at {p}: {exc}"
            ) from exc
        move = make_step(
            kind=DIVIDE,
            prime=p,
            alpha=divide_el,
            degree_before=deg_before,
            degree_after=degree(new_surface),
            branch=branch,
            rebasing=rebasing,
        )
    if degree(new_surface) * p * p != deg_before:
        raise InvariantBreach(f"degree did not drop by {p}^2")
    if degree(new_surface) % p == 0:
        raise InvariantBreach(f"{p} still divides the degree after reduction")
    return new_surface, steps + (move,), branch


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------


def principalize(
    surface: PolarizedRMSurface, seed: int = 0
) -> tuple[PolarizedRMSurface, PipelineReport]:
    """Produce a principal surface with a maximal acting order, with certificate.

    Hypotheses: odd degree, odd conductor, coprime, and the stored conductor
    equal to the acting (stabilizer) conductor. Conductor primes are
    processed in increasing order with multiplicity, then degree primes in
    increasing order. Failure of reducibility at a degree prime raises
    PreconditionError naming the prime.
    """
    msg = validate(surface)
    if msg is not None:
        raise PreconditionError(f"invalid surface: {msg}")
    deg = degree(surface)
    f = surface.order.conductor
    if deg % 2 == 0:
        raise PreconditionError(f"degree {deg} must be odd")
    if f % 2 == 0:
        raise PreconditionError(f"conductor {f} must be odd")
    if gcd(deg, f) != 1:
        raise PreconditionError(f"degree {deg} and conductor {f} share a factor")
    stab = stabilizer_order(surface)
    if stab.conductor != f:
        raise PreconditionError(
            f"stored conductor {f} is not tight: the order of conductor "
            f"{stab.conductor} already acts"
        )
    input_summary = summarize(surface)
    steps: list[IsogenyStep] = []
    current = surface
    conductor_primes = sorted(factorize(f).items()) if f > 1 else []
    for p, mult in conductor_primes:
        for _ in range(mult):
            current, pair, _t = enlarge_order_step(current, p)
            steps.extend(pair)
    degree_primes = sorted(factorize(deg)) if deg > 1 else []
    for p in degree_primes:
        current, more, _branch = reduce_degree_step(current, p)
        steps.extend(more)
        if degree(current) % p == 0:
            raise InvariantBreach(f"{p} survived its degree-reduction pass")
    if degree(current) != 1:
        raise InvariantBreach(f"pipeline ended at degree {degree(current)}")
    if current.order.conductor != 1 or stabilizer_order(current).conductor != 1:
        raise InvariantBreach("pipeline ended with a non-maximal acting order")
    _check_telescoping(deg, steps)
    report = PipelineReport(
        seed=seed,
        input_summary=input_summary,
        output_summary=summarize(current),
        steps=tuple(steps),
        final=current,
    )
    return current, report


def _check_telescoping(input_degree: int, steps: list[IsogenyStep]) -> None:
    previous = input_degree
    for step in steps:
        if step.degree_before != previous:
            raise InvariantBreach("step degrees do not telescope")
        previous = step.degree_after
