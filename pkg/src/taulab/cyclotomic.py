"""Exact integer construction and calculus of the trace polynomials.

Three homogeneous bivariate families live here, all with roots of the
shape 4*cos^2(pi*j/n):

* ``phi_poly(n)``  -- the homogenized n-th cyclotomic polynomial,
* ``psi_poly(n)``  -- the degree phi(n)/2 polynomial with
  ``phi(X, Y) == psi((X+Y)^2, X*Y)``,
* ``f_poly(n)``    -- the analogue for (X^n - Y^n)/(X - Y), with an
  extra (X+Y) factor when n is even.

Construction never touches complex roots of unity: the cyclotomic
polynomial at Y=1 is palindromic of even degree for n >= 3, so it is
rewritten in u = X + 1/X by exact integer elimination and then shifted
by u = T - 2.  Everything downstream (evaluation, partial derivatives,
discriminants, prime-power classification) is exact big-integer
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from . import factor
from .errors import IdentityViolationError


@dataclass(frozen=True)
class BivariatePoly:
    """Homogeneous polynomial sum(c_i * X^(m-i) * Y^i), coeffs c_0..c_m."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_univariate(self) -> "UnivariatePoly":
        """Specialize Y = 1; coefficient of T^j is c_{m-j}."""
        return UnivariatePoly(tuple(reversed(self.coeffs)))

    def __str__(self):
        m = self.degree
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            xs = f"X^{m - i}" if m - i > 1 else ("X" if m - i == 1 else "")
            ys = f"Y^{i}" if i > 1 else ("Y" if i == 1 else "")
            parts.append(f"{c:+d}{xs}{ys}")
        return " ".join(parts) if parts else "0"


@dataclass(frozen=True)
class UnivariatePoly:
    """Dense integer polynomial, coefficients low-to-high."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = self.coeffs
        if len(c) > 1 and c[-1] == 0:
            end = len(c)
            while end > 1 and c[end - 1] == 0:
                end -= 1
            object.__setattr__(self, "coeffs", c[:end])

    @property
    def degree(self) -> int:
        if self.coeffs == (0,):
            return -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UnivariatePoly":
        if len(self.coeffs) == 1:
            return UnivariatePoly((0,))
        return UnivariatePoly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return out


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of dense integer polynomials; raises if inexact."""
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        q, r = divmod(num[k + dn], lead)
        if r:
            raise ArithmeticError("inexact polynomial division")
        out[k] = q
        if q:
            for j, cd in enumerate(den):
                num[k + j] -= q * cd
    if any(num):
        raise ArithmeticError("nonzero remainder in exact polynomial division")
    return out


@lru_cache(maxsize=None)
def _cyclotomic_univariate(n: int) -> tuple[int, ...]:
    """Coefficients (low-to-high) of the n-th cyclotomic polynomial."""
    # x^n - 1 divided by the cyclotomic polynomials of the proper divisors.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(_cyclotomic_univariate(d)))
    return tuple(poly)


def _euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def phi_poly(n: int) -> BivariatePoly:
    """Homogenized n-th cyclotomic polynomial; degree phi(n)."""
    if n < 1:
        raise ValueError(f"cyclotomic index must be >= 1, got {n}")
    uni = _cyclotomic_univariate(n)
    # coefficient of x^j homogenizes to X^j Y^(deg-j), stored at index deg-j
    return BivariatePoly(tuple(reversed(uni)))


def _palindromic_to_u(sym: list[int]) -> list[int]:
    """Rewrite sum_{j} sym[j] * (x^j + x^-j) (j=0 term counted once) in u = x + 1/x."""
    m = len(sym) - 1
    s = list(sym)
    b = [0] * (m + 1)
    for k in range(m, -1, -1):
        bk = s[k]
        b[k] = bk
        if bk:
            for i in range(k // 2 + 1):
                s[k - 2 * i] -= bk * comb(k, i)
    if any(s):
        raise ArithmeticError("input was not palindromic-symmetric")
    return b


def _shift_u_to_t(b: list[int]) -> list[int]:
    """Substitute u = T - 2 into sum b_k u^k; returns coefficients in T."""
    out = [b[-1]]
    for k in range(len(b) - 2, -1, -1):
        nxt = [0] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i + 1] += c
            nxt[i] -= 2 * c
        nxt[0] += b[k]
        out = nxt
    return out


def _halved_from_palindromic(uni: tuple[int, ...]) -> BivariatePoly:
    """Shared construction: palindromic even-degree poly -> roots-shifted half."""
    two_m = len(uni) - 1
    m = two_m // 2
    sym = [uni[m + j] for j in range(m + 1)]
    in_t = _shift_u_to_t(_palindromic_to_u(sym))
    # coefficient of T^j becomes the X^j Y^(m-j) coefficient, stored at m-j
    return BivariatePoly(tuple(reversed(in_t)))


@lru_cache(maxsize=None)
def psi_poly(n: int) -> BivariatePoly:
    """Monic degree phi(n)/2 polynomial with phi_n(X,Y) = psi_n((X+Y)^2, XY)."""
    if n < 3:
        raise ValueError(f"psi is defined for n >= 3, got {n}")
    return _halved_from_palindromic(_cyclotomic_univariate(n))


@lru_cache(maxsize=None)
def f_poly(n: int) -> BivariatePoly:
    """Monic polynomial with (X^n-Y^n)/(X-Y) = (X+Y)^e * F_n((X+Y)^2, XY), e = n mod 2 flipped."""
    if n < 3:
        raise ValueError(f"F is defined for n >= 3, got {n}")
    if n % 2:
        uni = (1,) * n  # 1 + x + ... + x^(n-1)
    else:
        # divide out (x + 1): (x^n - 1)/(x^2 - 1) = 1 + x^2 + ... + x^(n-2)
        uni = tuple(1 if i % 2 == 0 else 0 for i in range(n - 1))
    return _halved_from_palindromic(uni)


def epsilon(n: int) -> int:
    """Parity flag used by the F identity: 1 when n is even."""
    return 1 if n % 2 == 0 else 0


def eval_poly(p: BivariatePoly, x: int, y: int) -> int:
    """Exact value sum c_i x^(m-i) y^i."""
    acc = p.coeffs[0]
    ypow = 1
    for c in p.coeffs[1:]:
        ypow *= y
        acc = acc * x + c * ypow
    return acc


def eval_poly_mod(p: BivariatePoly, x: int, y: int, m: int) -> int:
    """eval_poly reduced mod m, with mod-m arithmetic throughout."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    x %= m
    y %= m
    acc = p.coeffs[0] % m
    ypow = 1
    for c in p.coeffs[1:]:
        ypow = ypow * y % m
        acc = (acc * x + c * ypow) % m
    return acc


def partial_derivatives(p: BivariatePoly) -> tuple[BivariatePoly, BivariatePoly]:
    """Formal partials (dP/dX, dP/dY); rejects degree-0 input."""
    m = p.degree
    if m < 1:
        raise ValueError("cannot differentiate a degree-0 polynomial")
    dx = tuple(c * (m - i) for i, c in enumerate(p.coeffs[:-1]))
    dy = tuple(c * i for i, c in enumerate(p.coeffs) if i > 0)
    return BivariatePoly(dx), BivariatePoly(dy)


def substitute_square_product(p: BivariatePoly) -> BivariatePoly:
    """Expand P((X+Y)^2, XY) exactly as a homogeneous polynomial of degree 2m.

    Computed through the Y=1 slice sum c_i (x+1)^(2(m-i)) x^i, which
    determines the homogeneous result uniquely.
    """
    m = p.degree
    out = [0] * (2 * m + 1)
    for i, c in enumerate(p.coeffs):
        if c == 0:
            continue
        e = m - i
        for j in range(2 * e + 1):
            out[j + i] += c * comb(2 * e, j)
    # coefficient of x^j lifts to X^j Y^(2m-j), stored at index 2m-j
    return BivariatePoly(tuple(reversed(out)))


def geometric_sum_poly(n: int) -> BivariatePoly:
    """The homogeneous polynomial sum_{i<n} X^(n-1-i) Y^i."""
    return BivariatePoly((1,) * n)


def multiply_by_x_plus_y(p: BivariatePoly) -> BivariatePoly:
    m = p.degree
    out = [0] * (m + 2)
    for i, c in enumerate(p.coeffs):
        out[i] += c  # X * X^(m-i) Y^i
        out[i + 1] += c  # Y * X^(m-i) Y^i
    return BivariatePoly(tuple(out))


def _sylvester_resultant(f: UnivariatePoly, g: UnivariatePoly) -> int:
    from .rings import _int_det  # local import avoids a cycle at module load

    m, n = f.degree, g.degree
    size = m + n
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([0] * i + fc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gc + [0] * (size - n - 1 - i))
    return _int_det(rows)


def discriminant(f: UnivariatePoly) -> int:
    """Discriminant via the resultant with the derivative.

    Degree-1 polynomials return 1 by convention.
    """
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1
    res = _sylvester_resultant(f, f.derivative())
    lead = f.coeffs[-1]
    num = (-1) ** (d * (d - 1) // 2) * res
    q, r = divmod(num, lead)
    if r:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return q


class PsiPrimePowerClass:
    """Which disjunct of the prime-power divisor law holds."""

    PLUS_MINUS_ONE_MOD_M = "PlusMinusOneModM"
    DIVIDES_M = "DividesM"


def classify_psi_prime_power(m: int, u: int, v: int, p: int) -> str:
    """Classify the prime p dividing psi_m(u, v) for coprime u, v.

    The exact power p^a dividing the value is computed internally.
    Every prime divisor must satisfy p = +-1 (mod m) or p^a | m; a
    counterexample raises IdentityViolationError, which no input with
    m = 5 or m >= 7 should ever trigger.
    """
    if m != 5 and m < 7:
        raise ValueError(f"classification is defined for m = 5 or m >= 7, got {m}")
    if gcd(u, v) != 1:
        raise ValueError(f"u={u} and v={v} must be coprime")
    if not factor.is_prime(p):
        raise ValueError(f"{p} is not prime")
    value = eval_poly(psi_poly(m), u, v)
    if value == 0:
        raise ValueError(f"psi_{m}({u},{v}) = 0 has no prime-power classification")
    value = abs(value)
    if value % p != 0:
        raise ValueError(f"{p} does not divide psi_{m}({u},{v}) = {value}")
    a = 0
    while value % p == 0:
        value //= p
        a += 1
    if p % m in (1, m - 1):
        return PsiPrimePowerClass.PLUS_MINUS_ONE_MOD_M
    if m % p**a == 0:
        return PsiPrimePowerClass.DIVIDES_M
    raise IdentityViolationError(
        f"prime power {p}^{a} divides psi_{m}({u},{v}) but {p} is not +-1 mod {m} "
        f"and {p}^{a} does not divide {m}"
    )


def primitive_divisor_scan(values, **factor_budget) -> dict[int, set[int]]:
    """Primes dividing the j-th term of a sequence but none before it.

    ``values`` is U_1..U_n; the result maps each 1-based index to its
    set of primitive prime divisors.  Zero terms are rejected.
    """
    values = list(values)
    if not values:
        raise ValueError("empty sequence")
    for idx, v in enumerate(values, start=1):
        if v == 0:
            raise ValueError(f"zero term at index {idx} admits every prime")
    seen: set[int] = set()
    out: dict[int, set[int]] = {}
    for idx, v in enumerate(values, start=1):
        primes = set(factor.factorize(abs(v), **factor_budget).factors)
        out[idx] = primes - seen
        seen |= primes
    return out


def dump_poly_line(kind: str, n: int) -> str:
    """Golden-file dump format: one line, coefficients of X^(m-i) Y^i in decimal."""
    builders = {"PSI": psi_poly, "PHI": phi_poly, "F": f_poly}
    if kind not in builders:
        raise ValueError(f"unknown polynomial family {kind!r}")
    p = builders[kind](n)
    return f"{kind} {n}: " + " ".join(str(c) for c in p.coeffs)
