"""Trace-zero densities over GL2 of finite rings and their empirical check.

The central count: matrices A over Z/l^n Z whose determinant is a
(k-1)-th power of a unit and whose trace and determinant satisfy
psi_q(tr(A)^2, det(A)) = 0 mod l^n.  The density is that count divided
by the order of the full determinant-constrained group.  Closed forms
exist at n = 1 (split by l mod q) and lift by a factor 1/l per level
for l != q.

Enumeration never loops over matrix entries: it walks (trace, det)
pairs and multiplies by the exact fiber size, which is classical for
n = 1 (quadratic character of the discriminant) and a short valuation
sum for n >= 2.  A literal four-loop enumerator is kept as an oracle
for small moduli.

Empirical side: walk primes p <= x, reduce a_f(p^(q-1)) mod d through
the trace polynomial, and compare the hit frequency against the
density with a binomial noise band.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import factor
from .cyclotomic import eval_poly_mod, psi_poly
from .errors import BudgetExceededError
from .hecke import EigenformSpec, coeff_prime_power, iter_prime_coeffs

DEFAULT_ENUM_BUDGET = 10**8

# Primes where the built-in weight-12 form has a smaller mod-l image
# than the generic determinant-power shape; density targets there do
# not describe the form's actual coefficient statistics.
DELTA_EXCEPTIONAL_PRIMES = frozenset({2, 3, 5, 7, 23, 691})

_CLASS_KEYS = ("central", "nonsemisimple", "splitSemisimple", "nonsplitSemisimple")


@dataclass(frozen=True)
class DensityQuery:
    q: int
    ell: int
    n: int = 1
    weight: int = 12

    def __post_init__(self):
        if self.q < 3 or self.q % 2 == 0 or not factor.is_prime(self.q):
            raise ValueError(f"q must be an odd prime, got {self.q}")
        if not factor.is_prime(self.ell):
            raise ValueError(f"ell must be prime, got {self.ell}")
        if self.n < 1:
            raise ValueError(f"level exponent must be >= 1, got {self.n}")
        if self.weight < 2 or self.weight % 2:
            raise ValueError(f"weight must be an even integer >= 2, got {self.weight}")

    @property
    def modulus(self) -> int:
        return self.ell**self.n

    @property
    def cells(self) -> int:
        return self.ell ** (4 * self.n)


@dataclass
class DensityReport:
    query: DensityQuery
    match_count: int
    group_order: int
    closed_form: Fraction | None
    class_tally: dict[str, int] | None = None
    exceptional: bool = False
    tl_group_order: int | None = None

    @property
    def delta(self) -> Fraction:
        return Fraction(self.match_count, self.group_order)

    @property
    def agrees(self) -> bool | None:
        if self.closed_form is None:
            return None
        return self.delta == self.closed_form

    def to_json_dict(self, empirical: dict | None = None) -> dict:
        frac = self.delta
        out = {
            "query": {
                "q": self.query.q,
                "ell": self.query.ell,
                "n": self.query.n,
                "k": self.query.weight,
            },
            "matchCount": self.match_count,
            "groupOrder": self.group_order,
            "deltaExact": f"{frac.numerator}/{frac.denominator}",
            "closedForm": None
            if self.closed_form is None
            else f"{self.closed_form.numerator}/{self.closed_form.denominator}",
            "agrees": self.agrees,
            "exceptional": self.exceptional,
        }
        if self.tl_group_order is not None and self.tl_group_order != self.group_order:
            out["unitPowerGroupOrderDiffers"] = self.tl_group_order
        if self.class_tally is not None:
            out["classTally"] = dict(self.class_tally)
        if empirical is not None:
            out["empirical"] = empirical
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_dict(**kw), indent=2, sort_keys=True)


def closed_form_density(q: int, ell: int, n: int = 1, weight: int = 12) -> Fraction | None:
    """The exact density when a closed form is known, else None.

    At level 1: (q-1)/(2(l-1)) when l = 1 mod q, (q-1)/(2(l+1)) when
    l = -1 mod q, q/(q^2-1) when l = q, and 0 otherwise.  Levels n >= 2
    scale by 1/l^(n-1) for l != q; powers of q vanish for q >= 5 and
    have no closed form for q = 3.
    """
    if n == 1:
        if ell == q:
            return Fraction(q, q * q - 1)
        r = ell % q
        if r == 1:
            return Fraction(q - 1, 2 * (ell - 1))
        if r == q - 1:
            return Fraction(q - 1, 2 * (ell + 1))
        return Fraction(0)
    if ell == q:
        return Fraction(0) if q >= 5 else None
    base = closed_form_density(q, ell, 1, weight)
    return base / ell ** (n - 1)


def unit_power_subgroup(modulus: int, exponent: int) -> frozenset[int]:
    """The subgroup {x^exponent : x a unit mod modulus}."""
    return frozenset(
        pow(x, exponent, modulus) for x in range(1, modulus) if gcd(x, modulus) == 1
    )


def det_constrained_group_order(ell: int, n: int, weight: int) -> int:
    """Order of {A in GL2(Z/l^n) : det(A) a (k-1)-th power of a unit}.

    Computed as |SL2(Z/l^n)| times the size of the power subgroup of
    the units.  For l not dividing k-1 this equals the level-1 order
    (l^2-1)(l^2-l)/gcd(l-1,k-1) scaled by l^(4(n-1)).
    """
    sl2 = ell ** (3 * n - 2) * (ell * ell - 1)
    return sl2 * len(unit_power_subgroup(ell**n, weight - 1))


def unit_power_group_order(ell: int, n: int, weight: int) -> int:
    """The level-1 closed form scaled by l^(4(n-1))."""
    d = gcd(ell - 1, weight - 1)
    return ell ** (4 * (n - 1)) * (ell * ell - 1) * (ell * ell - ell) // d


def _squares_mod(ell: int) -> frozenset[int]:
    return frozenset(x * x % ell for x in range(1, ell))


def _tally_level_one(q: int, ell: int, weight: int) -> tuple[int, dict[str, int]]:
    """Exact |D'| and per-conjugacy-type tally over GL2(F_ell), ell odd."""
    psi = psi_poly(q)
    dets = unit_power_subgroup(ell, weight - 1)
    squares = _squares_mod(ell)
    tally = dict.fromkeys(_CLASS_KEYS, 0)
    for det in dets:
        for t in range(ell):
            if eval_poly_mod(psi, t * t % ell, det, ell) != 0:
                continue
            disc = (t * t - 4 * det) % ell
            if disc == 0:
                tally["central"] += 1
                tally["nonsemisimple"] += ell * ell - 1
            elif disc in squares:
                tally["splitSemisimple"] += ell * ell + ell
            else:
                tally["nonsplitSemisimple"] += ell * ell - ell
    return sum(tally.values()), tally


def _mod2_matrices():
    for bits in range(16):
        a, b, c, d = bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1
        if (a * d - b * c) % 2 == 1:
            yield a, b, c, d


def _tally_mod2(q: int) -> tuple[int, dict[str, int]]:
    """Literal enumeration of the 16 candidate matrices mod 2."""
    psi = psi_poly(q)
    tally = dict.fromkeys(_CLASS_KEYS, 0)
    for a, b, c, d in _mod2_matrices():
        t, det = (a + d) % 2, (a * d - b * c) % 2
        if eval_poly_mod(psi, t * t % 2, det, 2) != 0:
            continue
        if b == 0 and c == 0 and a == d:
            tally["central"] += 1
        elif (t * t - 4 * det) % 2 == 0:
            tally["nonsemisimple"] += 1
        else:
            tally["nonsplitSemisimple"] += 1
    return sum(tally.values()), tally


def _bc_solution_table(ell: int, n: int) -> list[int]:
    """count_by_valuation[v] = # of (b, c) mod l^n with bc = e, v = val(e).

    Index n stands for e = 0.  For v < n the count is (v+1) phi(l^n);
    for e = 0 it is n phi(l^n) + l^n.
    """
    m = ell**n
    phi = m - m // ell
    return [(v + 1) * phi for v in range(n)] + [n * phi + m]


def _fiber_count_lift(t: int, det: int, ell: int, n: int, bc_table: list[int]) -> int:
    """# of matrices mod l^n with given trace and determinant (n >= 2)."""
    m = ell**n
    total = 0
    for a in range(m):
        e = (a * (t - a) - det) % m
        v = 0
        while v < n and e % ell == 0:
            e //= ell
            v += 1
        total += bc_table[v]
    return total


def _match_count_lift(q: int, ell: int, n: int, weight: int) -> int:
    psi = psi_poly(q)
    m = ell**n
    dets = unit_power_subgroup(m, weight - 1)
    bc_table = _bc_solution_table(ell, n)
    total = 0
    for det in dets:
        for t in range(m):
            if eval_poly_mod(psi, t * t % m, det, m) == 0:
                total += _fiber_count_lift(t, det, ell, n, bc_table)
    return total


def enumerate_density(
    query: DensityQuery,
    budget: int = DEFAULT_ENUM_BUDGET,
    with_classes: bool = True,
    workers: int = 1,
) -> DensityReport:
    """Exhaustive density report for one (q, l^n, k) query.

    Raises BudgetExceededError when the nominal candidate space l^(4n)
    is above ``budget``; pass a larger budget explicitly to proceed.
    """
    if query.cells > budget:
        raise BudgetExceededError(
            f"candidate space {query.ell}^{4 * query.n} = {query.cells} exceeds budget {budget}",
            needed=query.cells,
            cap=budget,
        )
    q, ell, n, k = query.q, query.ell, query.n, query.weight
    tally: dict[str, int] | None = None
    if n == 1:
        if ell == 2:
            match, tally = _tally_mod2(q)
        else:
            match, tally = _tally_level_one(q, ell, k)
        if not with_classes:
            tally = None
    elif workers > 1:
        match = _match_count_lift_parallel(q, ell, n, k, workers)
    else:
        match = _match_count_lift(q, ell, n, k)
    return DensityReport(
        query=query,
        match_count=match,
        group_order=det_constrained_group_order(ell, n, k),
        closed_form=closed_form_density(q, ell, n, k),
        class_tally=tally,
        # the exceptional list belongs to the built-in weight-12 form
        exceptional=k == 12 and ell in DELTA_EXCEPTIONAL_PRIMES,
        tl_group_order=unit_power_group_order(ell, n, k),
    )


def class_counts(query: DensityQuery, budget: int = DEFAULT_ENUM_BUDGET) -> dict[str, int]:
    """Per-conjugacy-type tally of the match set (level 1 only)."""
    if query.n != 1:
        raise ValueError("class tallies are defined at level exponent 1")
    return enumerate_density(query, budget=budget).class_tally


def _det_chunk_count(args) -> int:
    q, ell, n, k, det_chunk = args
    psi = psi_poly(q)
    m = ell**n
    bc_table = _bc_solution_table(ell, n)
    total = 0
    for det in det_chunk:
        for t in range(m):
            if eval_poly_mod(psi, t * t % m, det, m) == 0:
                total += _fiber_count_lift(t, det, ell, n, bc_table)
    return total


def _match_count_lift_parallel(q: int, ell: int, n: int, k: int, workers: int) -> int:
    dets = sorted(unit_power_subgroup(ell**n, k - 1))
    chunks = [dets[i::workers] for i in range(workers)]
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:  # pragma: no cover - non-fork platforms fall back
        return _match_count_lift(q, ell, n, k)
    with ctx.Pool(workers) as pool:
        parts = pool.map(_det_chunk_count, [(q, ell, n, k, ch) for ch in chunks])
    return sum(parts)


def enumerate_density_bruteforce(query: DensityQuery) -> int:
    """Four-loop oracle: literally walk all matrices mod l^n (small moduli)."""
    q, k, m = query.q, query.weight, query.modulus
    if m > 128:
        raise BudgetExceededError(f"brute-force oracle capped at modulus 128, got {m}")
    psi = psi_poly(q)
    dets = unit_power_subgroup(m, k - 1)
    count = 0
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    det = (a * d - b * c) % m
                    if det not in dets:
                        continue
                    t = (a + d) % m
                    if eval_poly_mod(psi, t * t % m, det, m) == 0:
                        count += 1
    return count


@dataclass
class LiftReport:
    base: DensityReport
    lifted: DensityReport

    @property
    def ratio(self) -> Fraction | None:
        """delta(l^2) / delta(l), or None when the base density vanishes."""
        if self.base.match_count == 0:
            return None
        return self.lifted.delta / self.base.delta


def lift_factor(
    q: int, ell: int, weight: int = 12, budget: int = DEFAULT_ENUM_BUDGET
) -> LiftReport:
    """Enumerate the density at l and l^2 and report their ratio.

    A vanishing base density yields ratio None (the zero-density
    marker); otherwise the ratio is exact and equals 1/l in the
    verified range.
    """
    base = enumerate_density(DensityQuery(q, ell, 1, weight), budget=budget)
    lifted = enumerate_density(DensityQuery(q, ell, 2, weight), budget=budget)
    return LiftReport(base, lifted)


def hensel_lift_count(q: int, ell: int, base_matrix: tuple[int, int, int, int]) -> int:
    """# of lifts of a level-1 match mod l^2 that stay matches.

    ``base_matrix`` is (a, b, c, d) mod l with psi_q(tr^2, det) = 0 mod l;
    counts quadruples (x, y, z, w) in [0, l)^4 with the lifted matrix
    satisfying the congruence mod l^2.  Equals l^3 whenever it can be
    Hensel-lifted along one linear condition.
    """
    a, b, c, d = base_matrix
    psi = psi_poly(q)
    m2 = ell * ell
    if eval_poly_mod(psi, (a + d) ** 2, a * d - b * c, ell) != 0:
        raise ValueError("base matrix is not a level-1 match")
    count = 0
    for x in range(ell):
        aa = a + ell * x
        for w in range(ell):
            dd = d + ell * w
            t2 = (aa + dd) * (aa + dd) % m2
            for y in range(ell):
                bb = b + ell * y
                for z in range(ell):
                    cc = c + ell * z
                    det = (aa * dd - bb * cc) % m2
                    if eval_poly_mod(psi, t2, det, m2) == 0:
                        count += 1
    return count


def sample_level_one_matches(q: int, ell: int, weight: int = 12, limit: int = 3):
    """A few explicit matrices in the level-1 match set, for lift checks."""
    dets = unit_power_subgroup(ell, weight - 1)
    psi = psi_poly(q)
    out = []
    for a in range(ell):
        for b in range(ell):
            for c in range(ell):
                for d in range(ell):
                    det = (a * d - b * c) % ell
                    if det not in dets or det == 0:
                        continue
                    if eval_poly_mod(psi, (a + d) ** 2, det, ell) == 0:
                        out.append((a, b, c, d))
                        if len(out) >= limit:
                            return out
    return out


@dataclass
class ChebotarevSample:
    """Empirical frequency of d | a_f(p^(q-1)) over primes p <= x."""

    f_label: str
    q: int
    d: int
    x_bound: int
    hits: int
    total_primes: int
    zero_excluded: int
    target: Fraction | None
    exceptional: bool

    @property
    def frequency(self) -> float:
        return self.hits / self.total_primes if self.total_primes else 0.0

    @property
    def sigma(self) -> float:
        """Binomial standard deviation of the hit frequency at the target."""
        if self.target is None or self.total_primes == 0:
            return 0.0
        t = float(self.target)
        return (t * (1 - t) / self.total_primes) ** 0.5

    def within_band(self, sigmas: float = 3.0) -> bool | None:
        if self.target is None:
            return None
        return abs(self.frequency - float(self.target)) <= sigmas * self.sigma

    def to_json_dict(self) -> dict:
        return {
            "form": self.f_label,
            "q": self.q,
            "d": self.d,
            "empirical": {
                "x": self.x_bound,
                "hits": self.hits,
                "total": self.total_primes,
                "freq": self.frequency,
                "sigma": self.sigma,
            },
            "zeroExcluded": self.zero_excluded,
            "target": None
            if self.target is None
            else f"{self.target.numerator}/{self.target.denominator}",
            "exceptional": self.exceptional,
        }


def _factor_prime_power(d: int) -> tuple[int, int]:
    ell = min(factor.factorize(d).factors)
    n = 0
    m = d
    while m % ell == 0:
        m //= ell
        n += 1
    if m != 1:
        raise ValueError(f"modulus {d} is not a prime power")
    return ell, n


def chebotarev_sample(
    f: EigenformSpec, q: int, d: int, x_bound: int
) -> ChebotarevSample:
    """Count primes p <= x with d | a_f(p^(q-1)) and the value nonzero.

    The coefficient is reduced through psi_q(a_f(p)^2, p^(k-1)) mod d,
    never materialized.  Nonzero-ness is automatic for even exponents
    away from p | 6N; the finitely many small primes are checked
    exactly.
    """
    if x_bound < 10**3:
        raise ValueError(f"x bound must be at least 1000, got {x_bound}")
    ell, n = _factor_prime_power(d)
    DensityQuery(q, ell, n, f.weight)  # validates q and ell
    psi = psi_poly(q)
    target = closed_form_density(q, ell, n, f.weight)
    hits = 0
    total = 0
    zero_excluded = 0
    for p, ap in iter_prime_coeffs(f, x_bound):
        if d % p == 0:
            continue
        total += 1
        if eval_poly_mod(psi, ap * ap, pow(p, f.weight - 1, d), d) != 0:
            continue
        if 6 % p == 0 and coeff_prime_power(f, p, q - 1) == 0:
            zero_excluded += 1
            continue
        hits += 1
    return ChebotarevSample(
        f_label=f.label or ("builtin" if f.is_builtin else "table"),
        q=q,
        d=d,
        x_bound=x_bound,
        hits=hits,
        total_primes=total,
        zero_excluded=zero_excluded,
        target=target,
        exceptional=f.is_builtin and ell in DELTA_EXCEPTIONAL_PRIMES,
    )


def psi_insoluble_mod_q_squared(q: int) -> bool:
    """True when psi_q(u, v) = 0 mod q^2 has no solution with gcd(u, v, q) = 1.

    Exhaustive over (u, v) mod q^2; this is what forces the density to
    vanish at every power of q for q >= 5.
    """
    psi = psi_poly(q)
    m = q * q
    for u in range(m):
        for v in range(m):
            if u % q == 0 and v % q == 0:
                continue
            if eval_poly_mod(psi, u, v, m) == 0:
                return False
    return True
