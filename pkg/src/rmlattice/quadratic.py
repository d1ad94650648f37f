"""Exact arithmetic in real quadratic orders.

An order of conductor f in Q(sqrt(D)) is Z[w] for the generator
w = f*w1, where w1 = sqrt(D) if D = 2, 3 (mod 4) and w1 = (1+sqrt(D))/2
if D = 1 (mod 4). Scaling the generator linearly with the conductor means
that the generator of the conductor-f order is exactly f/g times the
generator of the conductor-g suborder, which the lattice algorithms rely
on. Elements are stored as integer pairs (x, y) meaning x + y*w.

Besides element arithmetic this module provides prime splitting, the
fundamental unit, a complete bounded search for norm equations, prime
factorization into norm +-p elements, a conductor Bezout identity for
non-associate factors, and the Humbert congruence test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, isqrt

from .arith import is_prime, is_squarefree, legendre, sqrt_lower, sqrt_upper, sqrt_upper_frac
from .errors import InvariantBreach, PreconditionError
from .intmat import freeze, snf_with_transforms

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"
DIVIDES_CONDUCTOR = "divides_conductor"


@dataclass(frozen=True)
class RealQuadraticOrder:
    """The order of conductor `conductor` in Q(sqrt(D)).

    trace_omega and norm_omega are the trace and norm of the generator, so
    the generator satisfies x^2 - trace_omega*x + norm_omega = 0 and the
    discriminant is trace_omega^2 - 4*norm_omega = conductor^2 * d_F.
    """

    D: int
    conductor: int
    fundamental_discriminant: int
    discriminant: int
    trace_omega: int
    norm_omega: int

    def element(self, x: int, y: int) -> "OrderElement":
        return OrderElement(self, x, y)

    def one(self) -> "OrderElement":
        return OrderElement(self, 1, 0)

    def omega(self) -> "OrderElement":
        return OrderElement(self, 0, 1)

    def __repr__(self) -> str:
        return f"RealQuadraticOrder(D={self.D}, conductor={self.conductor})"


def make_order(D: int, conductor: int = 1) -> RealQuadraticOrder:
    """Construct the order of the given conductor in Q(sqrt(D))."""
    if D < 2 or not is_squarefree(D):
        raise PreconditionError(f"D = {D} must be a squarefree integer >= 2")
    if conductor < 1:
        raise PreconditionError(f"conductor must be >= 1, got {conductor}")
    if D % 4 == 1:
        d_f = D
        tr1, nm1 = 1, (1 - D) // 4
    else:
        d_f = 4 * D
        tr1, nm1 = 0, -D
    t = conductor * tr1
    n = conductor * conductor * nm1
    disc = t * t - 4 * n
    assert disc == conductor * conductor * d_f
    return RealQuadraticOrder(D, conductor, d_f, disc, t, n)


@dataclass(frozen=True)
class OrderElement:
    """x + y*w relative to a fixed real quadratic order with generator w."""

    order: RealQuadraticOrder
    x: int
    y: int

    def __add__(self, other: "OrderElement") -> "OrderElement":
        self._check_same_order(other)
        return OrderElement(self.order, self.x + other.x, self.y + other.y)

    def __sub__(self, other: "OrderElement") -> "OrderElement":
        self._check_same_order(other)
        return OrderElement(self.order, self.x - other.x, self.y - other.y)

    def __neg__(self) -> "OrderElement":
        return OrderElement(self.order, -self.x, -self.y)

    def __mul__(self, other):
        if isinstance(other, int):
            return OrderElement(self.order, self.x * other, self.y * other)
        self._check_same_order(other)
        t, n = self.order.trace_omega, self.order.norm_omega
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        return OrderElement(
            self.order,
            x1 * x2 - n * y1 * y2,
            x1 * y2 + x2 * y1 + t * y1 * y2,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "OrderElement":
        return OrderElement(self.order, self.x + self.order.trace_omega * self.y, -self.y)

    def norm(self) -> int:
        t, n = self.order.trace_omega, self.order.norm_omega
        return self.x * self.x + t * self.x * self.y + n * self.y * self.y

    def trace(self) -> int:
        return 2 * self.x + self.order.trace_omega * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def inverse_unit(self) -> "OrderElement":
        """Inverse of a unit (norm +-1): conj/norm stays in the order."""
        n = self.norm()
        if abs(n) != 1:
            raise PreconditionError("inverse_unit requires a unit")
        return self.conjugate() * n

    def maximal_coords(self) -> tuple[int, int]:
        """Coordinates relative to the maximal order generator w1."""
        return (self.x, self.y * self.order.conductor)

    def _check_same_order(self, other: "OrderElement") -> None:
        if (self.order.D, self.order.conductor) != (other.order.D, other.order.conductor):
            raise PreconditionError("elements belong to different orders")

    def __str__(self) -> str:
        return f"{self.x}{self.y:+d}w"


def _sign_plus_root(a: int, b: int, disc: int) -> int:
    """Sign of a + b*sqrt(disc) for integers a, b and disc > 0 non-square."""
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1 if (a or b) else 0
    if b > 0:  # a < 0
        return 1 if b * b * disc > a * a else -1
    return 1 if a * a > b * b * disc else -1  # a > 0, b < 0


def embeds_above_one(el: OrderElement) -> bool:
    """Whether x + y*w > 1 in the embedding sending sqrt(D) to the positive root."""
    t, disc = el.order.trace_omega, el.order.discriminant
    # x + y*(t + sqrt(disc))/2 > 1  <=>  (2x + y*t - 2) + y*sqrt(disc) > 0
    return _sign_plus_root(2 * el.x + el.y * t - 2, el.y, disc) > 0


def _norm_solutions_for_y(order: RealQuadraticOrder, y: int, target: int) -> list[OrderElement]:
    """Integer x with norm(x + y*w) == target, by the quadratic formula."""
    t, n = order.trace_omega, order.norm_omega
    disc = t * t * y * y - 4 * (n * y * y - target)
    if disc < 0:
        return []
    r = isqrt(disc)
    if r * r != disc:
        return []
    out = []
    for root in {r, -r}:
        num = -t * y + root
        if num % 2 == 0:
            out.append(order.element(num // 2, y))
    return out


@lru_cache(maxsize=None)
def fundamental_unit(order: RealQuadraticOrder) -> OrderElement:
    """The smallest unit > 1 of the order itself (not of the maximal order).

    For the maximal order: units u > 1 with coordinate y satisfy
    y = (u - u')/sqrt(disc) > 0, and among them y is minimized by the
    fundamental unit, so scanning y upward and taking the smallest
    qualifying x is complete. For conductor f > 1 the unit group is the
    cyclic subgroup of maximal-order units landing in the order, so the
    answer is the least power whose w1-coefficient is divisible by f.
    """
    if order.conductor > 1:
        maximal = make_order(order.D, 1)
        u = fundamental_unit(maximal)
        f = order.conductor
        power = u
        for _ in range(10**6):
            if power.y % f == 0:
                return order.element(power.x, power.y // f)
            power = power * u
        raise InvariantBreach("unit power lift did not terminate")
    y = 0
    while True:
        y += 1
        if y > 10**7:  # unreachable for sane inputs; guards the loop
            raise InvariantBreach("fundamental unit search did not terminate")
        candidates = [
            el
            for target in (1, -1)
            for el in _norm_solutions_for_y(order, y, target)
            if embeds_above_one(el)
        ]
        if candidates:
            return min(candidates, key=lambda el: el.x)


def splitting_type(order: RealQuadraticOrder, p: int) -> str:
    """Behavior of an odd prime: split, inert, ramified, or divides_conductor."""
    if p == 2 or not is_prime(p):
        raise PreconditionError(f"{p} is not an odd prime")
    if order.conductor % p == 0:
        return DIVIDES_CONDUCTOR
    s = legendre(order.fundamental_discriminant, p)
    return SPLIT if s == 1 else (INERT if s == -1 else RAMIFIED)


def _embedding_bounds(order: RealQuadraticOrder) -> tuple[Fraction, Fraction, Fraction]:
    """Rational bounds (w_lo, w_hi, sqrt_disc_lo) for the positive embedding of w."""
    disc = order.discriminant
    s_hi, s_lo = sqrt_upper(disc), sqrt_lower(disc)
    t = order.trace_omega
    return (t + s_lo) / 2, (t + s_hi) / 2, s_lo


def _norm_search_bound(order: RealQuadraticOrder, p: int) -> int:
    """The |y| bound below which a solution must appear if any exists.

    Any element of norm +-p has a unit multiple whose two real embeddings
    lie in [-B, B] for B = sqrt(p * u0), u0 the fundamental unit value, so
    a solution exists iff one exists with |y| <= 2B/sqrt(disc).
    """
    u0 = fundamental_unit(order)
    _, w_hi, s_lo = _embedding_bounds(order)
    u0_hi = u0.x + u0.y * w_hi  # u0.y > 0, so this bounds the unit value above
    bound = sqrt_upper_frac(Fraction(p) * u0_hi)
    y_max = ceil(2 * bound / s_lo) + 1
    if y_max > 10**6:
        raise PreconditionError(
            f"fundamental unit of Q(sqrt({order.D})) is too large for the "
            "norm-equation search"
        )
    return y_max


def _maximal_norm_solutions(maximal: RealQuadraticOrder, p: int) -> list[OrderElement]:
    """All norm +-p elements of the maximal order inside the search box.

    Up to sign and unit multiples these represent every solution, which is
    all the suborder search needs.
    """
    y_max = _norm_search_bound(maximal, p)
    out = []
    for y in range(1, y_max + 1):  # y = 0 would need x^2 = +-p, impossible
        for sy in (y, -y):
            for target in (p, -p):
                out.extend(_norm_solutions_for_y(maximal, sy, target))
    return out


def solve_norm(order: RealQuadraticOrder, p: int) -> OrderElement | None:
    """The canonical element of the order with norm +-p, or None.

    For the maximal order: scan |y| upward to the search bound and return
    the solution with lexicographically least (|y|, |x|, signs), the
    canonical representative. For conductor f > 1: enumerate the maximal
    order's box solutions, then walk each one's unit orbit modulo f (the
    orbit is purely periodic because the unit is invertible mod f) looking
    for an associate whose w1-coefficient is divisible by f; that associate
    lies in the suborder, and every suborder solution is caught this way.
    """
    if p == 2 or not is_prime(p):
        raise PreconditionError(f"{p} is not an odd prime")
    if order.conductor % p == 0:
        raise PreconditionError(f"{p} divides the conductor {order.conductor}")
    if order.conductor == 1:
        y_max = _norm_search_bound(order, p)
        for ay in range(1, y_max + 1):
            solutions = [
                el
                for y in (ay, -ay)
                for target in (p, -p)
                for el in _norm_solutions_for_y(order, y, target)
            ]
            if solutions:
                return min(solutions, key=_canonical_key)
        return None
    f = order.conductor
    maximal = make_order(order.D, 1)
    unit = fundamental_unit(maximal)
    candidates = []
    for seed in _maximal_norm_solutions(maximal, p):
        current = seed
        seen = set()
        while (current.x % f, current.y % f) not in seen:
            seen.add((current.x % f, current.y % f))
            if current.y % f == 0:
                candidates.append(order.element(current.x, current.y // f))
                break
            current = current * unit
    if not candidates:
        return None
    return min(candidates, key=_canonical_key)


def _canonical_key(el: OrderElement) -> tuple[int, int, int, int]:
    return (abs(el.y), abs(el.x), 0 if el.y > 0 else 1, 0 if el.x >= 0 else 1)


def factor_prime(order: RealQuadraticOrder, p: int) -> tuple[OrderElement, OrderElement] | None:
    """Factor p = a1 * a2 with |norm(a1)| = |norm(a2)| = p, or None.

    a1 is the canonical solve_norm output and a2 the exact cofactor p / a1,
    which is a unit multiple of the conjugate of a1 and lies in the order.
    """
    a1 = solve_norm(order, p)
    if a1 is None:
        return None
    n = a1.norm()
    a2 = a1.conjugate() if n == p else -a1.conjugate()
    prod = a1 * a2
    assert prod == order.element(p, 0), "cofactor does not multiply back to p"
    assert abs(a2.norm()) == p
    return a1, a2


def are_associates_in_maximal(a: OrderElement, b: OrderElement) -> bool:
    """Whether a/b is a unit of the maximal order of the common field."""
    if a.is_zero() or b.is_zero():
        raise PreconditionError("zero element in associate test")
    if a.order.D != b.order.D:
        raise PreconditionError("elements lie in different fields")
    maximal = make_order(a.order.D, 1)
    ax, ay = a.maximal_coords()
    bx, by = b.maximal_coords()
    am = maximal.element(ax, ay)
    bm = maximal.element(bx, by)
    nb = bm.norm()
    num = am * bm.conjugate()  # a * conj(b) = (a/b) * norm(b)
    if num.x % nb or num.y % nb:
        return False
    q = maximal.element(num.x // nb, num.y // nb)
    return abs(q.norm()) == 1


def _reduce_bezout(c, k1, k2):
    """Canonical small solution c - m1*k1 - m2*k2 over the relation lattice.

    Gauss-reduce the rank-2 relation basis, size-reduce c against it by
    rounding, then take the exact minimum of the canonical key over a small
    multiplier window (sufficient once the basis is reduced). Deterministic
    throughout.
    """

    def key(vec):
        return (max(abs(v) for v in vec), sum(abs(v) for v in vec), tuple(vec))

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def rounded(num: int, den: int) -> int:
        # nearest integer to num/den for den > 0, deterministic at ties
        return (2 * num + den) // (2 * den)

    b1, b2 = list(k1), list(k2)
    while True:  # Lagrange reduction in the Euclidean norm
        if dot(b1, b1) > dot(b2, b2):
            b1, b2 = b2, b1
        m = rounded(dot(b1, b2), dot(b1, b1))
        if m == 0:
            break
        b2 = [x - m * y for x, y in zip(b2, b1)]
    best = list(c)
    for b in (b2, b1):
        m = rounded(dot(best, b), dot(b, b))
        if m:
            best = [x - m * y for x, y in zip(best, b)]
    window = 2
    best_t = tuple(best)
    for m1 in range(-window, window + 1):
        for m2 in range(-window, window + 1):
            cand = tuple(best[r] - m1 * b1[r] - m2 * b2[r] for r in range(4))
            if key(cand) < key(best_t):
                best_t = cand
    return best_t


def bezout_conductor(
    a1: OrderElement, a2: OrderElement, order: RealQuadraticOrder
) -> tuple[OrderElement, OrderElement]:
    """Solve conductor = a1*b1 + a2*b2 in the order, canonically smallest.

    Raises PreconditionError when the conductor is not in the span, which
    happens exactly when the factors are associates.
    """
    f = order.conductor
    if a1.is_unit():
        return (a1.inverse_unit() * f, order.element(0, 0))
    if a2.is_unit():
        return (order.element(0, 0), a2.inverse_unit() * f)
    w = order.omega()
    gens = [a1, a1 * w, a2, a2 * w]
    g = freeze([[el.x for el in gens], [el.y for el in gens]])
    u, s, v = snf_with_transforms(g)
    target = (f, 0)
    ut = (
        u[0][0] * target[0] + u[0][1] * target[1],
        u[1][0] * target[0] + u[1][1] * target[1],
    )
    yvec = [0, 0, 0, 0]
    for i in range(2):
        d = s[i][i]
        if d == 0:
            if ut[i] != 0:
                raise PreconditionError(
                    "conductor is not in the span of the factors (associate factors)"
                )
        else:
            if ut[i] % d:
                raise PreconditionError(
                    "conductor is not in the span of the factors (associate factors)"
                )
            yvec[i] = ut[i] // d
    c = [sum(v[r][k] * yvec[k] for k in range(4)) for r in range(4)]
    # Relation lattice: columns of v beyond the rank (s has rank <= 2 here).
    rank = sum(1 for i in range(2) if s[i][i] != 0)
    if rank < 2:
        raise PreconditionError(
            "conductor is not in the span of the factors (associate factors)"
        )
    k1 = [v[r][2] for r in range(4)]
    k2 = [v[r][3] for r in range(4)]
    c = _reduce_bezout(c, k1, k2)
    b1 = order.element(c[0], c[1])
    b2 = order.element(c[2], c[3])
    assert a1 * b1 + a2 * b2 == order.element(f, 0)
    return b1, b2


def humbert_nonempty(disc: int, d: int) -> bool:
    """Whether disc is a square modulo 4d (0 counts as a square)."""
    if disc <= 0 or disc % 4 not in (0, 1):
        raise PreconditionError(f"invalid discriminant {disc}")
    if d < 1:
        raise PreconditionError(f"invalid degree root {d}")
    m = 4 * d
    return any((x * x - disc) % m == 0 for x in range(m))
