"""Commutative rings, square matrices over them, and symmetric powers.

Supported rings are the integers and Z/mZ with canonical representatives
in [0, m).  The symmetric power map sends an invertible 2x2 matrix A to
the (n+1)x(n+1) matrix of the induced automorphism of symmetric
n-tensors, written in the unnormalized orbit-sum basis, so off-diagonal
entries carry binomial multiplicities (Sym^2 of [[a,b],[c,d]] has 2ab in
its first row, not ab).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, gcd

from .cyclotomic import f_poly
from .errors import SingularMatrixError

# Orbit enumeration cost grows like n * 2^n; this cap keeps every
# supported call desk-scale.  Degrees needed in practice are q - 1 for
# small odd primes q.
MAX_SYM_DEGREE = 32


@dataclass(frozen=True)
class IntegerRing:
    """The ring of rational integers."""

    modulus = None

    def normalize(self, x: int) -> int:
        return int(x)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def pow(self, x, e: int):
        return x**e

    def is_unit(self, x) -> bool:
        return x in (1, -1)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def __repr__(self):
        return "ZZ"


@dataclass(frozen=True)
class ModRing:
    """Z/mZ with canonical representatives in [0, m)."""

    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")

    def normalize(self, x: int) -> int:
        return int(x) % self.modulus

    def add(self, x, y):
        return (x + y) % self.modulus

    def sub(self, x, y):
        return (x - y) % self.modulus

    def mul(self, x, y):
        return (x * y) % self.modulus

    def neg(self, x):
        return (-x) % self.modulus

    def pow(self, x, e: int):
        return pow(x, e, self.modulus)

    def is_unit(self, x) -> bool:
        return gcd(x, self.modulus) == 1

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1 % self.modulus

    def __repr__(self):
        return f"Zmod({self.modulus})"


ZZ = IntegerRing()


def Zmod(m: int) -> ModRing:
    return ModRing(m)


def _int_det(rows) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 1:
        return a[0][0]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class RingMatrix:
    """A square matrix with normalized entries over a fixed ring."""

    ring: IntegerRing | ModRing
    entries: tuple[tuple[int, ...], ...]

    @staticmethod
    def make(ring, rows) -> "RingMatrix":
        rows = tuple(tuple(ring.normalize(x) for x in r) for r in rows)
        dim = len(rows)
        if dim == 0 or any(len(r) != dim for r in rows):
            raise ValueError("matrix must be square and non-empty")
        return RingMatrix(ring, rows)

    @staticmethod
    def identity(ring, dim: int) -> "RingMatrix":
        one, zero = ring.one, ring.zero
        return RingMatrix(
            ring, tuple(tuple(one if i == j else zero for j in range(dim)) for i in range(dim))
        )

    @property
    def dim(self) -> int:
        return len(self.entries)

    def trace(self):
        r = self.ring
        t = r.zero
        for i in range(self.dim):
            t = r.add(t, self.entries[i][i])
        return t

    def det(self):
        # Entries are canonical integers, so the exact integer
        # determinant reduced into the ring is the ring determinant.
        return self.ring.normalize(_int_det(self.entries))

    def is_invertible(self) -> bool:
        return self.ring.is_unit(self.det())

    def is_identity(self) -> bool:
        return self == RingMatrix.identity(self.ring, self.dim)

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.ring != other.ring or self.dim != other.dim:
            raise ValueError("matrix product needs matching ring and dimension")
        r = self.ring
        n = self.dim
        bcols = list(zip(*other.entries))
        rows = tuple(
            tuple(r.normalize(sum(ra[k] * cb[k] for k in range(n))) for cb in bcols)
            for ra in self.entries
        )
        return RingMatrix(r, rows)


@dataclass(frozen=True)
class MultiIndexOrbit:
    """The orbit of the j-th standard multi-index under coordinate permutations.

    Members are the vectors in {1,2}^n with exactly j-1 twos; there are
    C(n, j-1) of them.
    """

    n: int
    j: int

    def __post_init__(self):
        if not (1 <= self.j <= self.n + 1):
            raise ValueError(f"column index {self.j} out of range for degree {self.n}")

    def base_vector(self) -> tuple[int, ...]:
        return (1,) * (self.n - self.j + 1) + (2,) * (self.j - 1)

    @property
    def size(self) -> int:
        return comb(self.n, self.j - 1)

    def __iter__(self):
        for two_positions in itertools.combinations(range(self.n), self.j - 1):
            vec = [1] * self.n
            for pos in two_positions:
                vec[pos] = 2
            yield tuple(vec)


def _require_sym_args(a: RingMatrix, n: int) -> None:
    if n < 1:
        raise ValueError(f"symmetric power degree must be >= 1, got {n}")
    if n > MAX_SYM_DEGREE:
        raise ValueError(f"symmetric power degree {n} above supported cap {MAX_SYM_DEGREE}")
    if a.dim != 2:
        raise ValueError(f"symmetric power is defined on 2x2 matrices, got dim {a.dim}")
    if not a.is_invertible():
        raise SingularMatrixError(f"matrix {a.entries} is singular over {a.ring}")


def sym_pow(mat: RingMatrix, n: int) -> RingMatrix:
    """Symmetric n-th power of an invertible 2x2 matrix.

    Entry (i, j) is the orbit sum over all arrangements s of the j-th
    standard multi-index of the products a[r_i[u], s[u]].  Arrangements
    with the same number of twos in each of the two blocks of r_i give
    equal products, so the sum is accumulated per block split with its
    binomial multiplicity.
    """
    _require_sym_args(mat, n)
    ring = mat.ring
    (a, b), (c, d) = mat.entries
    mul = ring.mul
    pa = _power_table(ring, a, n)
    pb = _power_table(ring, b, n)
    pc = _power_table(ring, c, n)
    pd = _power_table(ring, d, n)
    rows = []
    for i in range(1, n + 2):
        ones = n - i + 1  # leading block of r_i, entries equal to 1
        twos = i - 1
        row = []
        for j in range(1, n + 2):
            total = ring.zero
            for alpha in range(max(0, j - 1 - twos), min(j - 1, ones) + 1):
                beta = j - 1 - alpha
                term = mul(pa[ones - alpha], pb[alpha])
                term = mul(term, mul(pc[twos - beta], pd[beta]))
                mult = comb(ones, alpha) * comb(twos, beta)
                total = ring.add(total, ring.normalize(mult * term))
            row.append(total)
        rows.append(tuple(row))
    return RingMatrix(ring, tuple(rows))


def _power_table(ring, x, n: int) -> list:
    t = [ring.one]
    for _ in range(n):
        t.append(ring.mul(t[-1], x))
    return t


def sym_pow_via_orbits(mat: RingMatrix, n: int) -> RingMatrix:
    """Literal orbit enumeration, kept as an oracle for small degrees."""
    _require_sym_args(mat, n)
    ring = mat.ring
    ent = mat.entries
    rows = []
    for i in range(1, n + 2):
        r_i = MultiIndexOrbit(n, i).base_vector()
        row = []
        for j in range(1, n + 2):
            total = ring.zero
            for s in MultiIndexOrbit(n, j):
                prod = ring.one
                for t_u, s_u in zip(r_i, s):
                    prod = ring.mul(prod, ent[t_u - 1][s_u - 1])
                total = ring.add(total, prod)
            row.append(total)
        rows.append(tuple(row))
    return RingMatrix(ring, tuple(rows))


def _eval_bivariate_in_ring(coeffs, x, y, ring):
    # coeffs c_0..c_m encode sum c_i X^(m-i) Y^i
    acc = ring.normalize(coeffs[0])
    ypow = ring.one
    for c in coeffs[1:]:
        ypow = ring.mul(ypow, y)
        acc = ring.add(ring.mul(acc, x), ring.normalize(c * ypow))
    return acc


def sym_pow_trace(mat: RingMatrix, n: int):
    """Trace of sym_pow(mat, n) from the trace and determinant alone.

    Returns tr(A)^e * F_{n+1}(tr(A)^2, det(A)) evaluated in the ring,
    where e is 1 when n+1 is even and 0 otherwise.
    """
    if n < 2:
        raise ValueError(f"trace formula needs degree >= 2, got {n}")
    _require_sym_args(mat, n)
    ring = mat.ring
    t = mat.trace()
    det = mat.det()
    f = f_poly(n + 1)
    val = _eval_bivariate_in_ring(f.coeffs, ring.mul(t, t), det, ring)
    if (n + 1) % 2 == 0:
        val = ring.mul(t, val)
    return val


def sym_pow_kernel_test(mat: RingMatrix, n: int) -> bool:
    """True when the symmetric n-th power of mat is the identity."""
    return sym_pow(mat, n).is_identity()


def is_torsion_scalar(mat: RingMatrix, n: int) -> bool:
    """True when mat equals lambda*I with lambda^n = 1 in the ring."""
    ring = mat.ring
    (a, b), (c, d) = mat.entries
    if b != ring.zero or c != ring.zero or a != d:
        return False
    return ring.pow(a, n) == ring.one
