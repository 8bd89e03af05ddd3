"""Largest-prime-factor scans, divisibility towers, and value histograms.

The headline scan walks primes p and asks whether the largest prime
factor of a_f(p^(2n)) clears a slowly growing threshold.  At desk
scale the threshold is tiny (below 2 for p up to 10^4), so a row's
verdict is certain as soon as factorization either completes or leaves
a composite cofactor: every prime in such a cofactor exceeds the trial
division bound, which already clears the threshold.  Rows are marked
``exact`` (full factorization), ``partial`` (verdict certain, largest
prime not pinned down), or ``unknown`` (verdict undecidable within
budget).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import mpmath

from . import factor
from .errors import IdentityViolationError
from .hecke import EigenformSpec, coeff_prime_power, iter_prime_coeffs

# log log p > 1 from the first prime past e^e, so the threshold is a
# positive real from here on
MIN_SCAN_PRIME = 17

_BOUND_PRECISION_BITS = 80


def bound_value(
    p: int,
    epsilon: float | None = None,
    grh_c: float | None = None,
) -> mpmath.mpf:
    """Threshold value at p, computed with 80-bit working precision.

    Exactly one mode applies:

    * ``epsilon`` given: (log p)^(1/8) (log log p)^(3/8 - epsilon)
    * ``grh_c`` given:  c p^(1/14) (log p)^(2/7)
    """
    if (epsilon is None) == (grh_c is None):
        raise ValueError("pass exactly one of epsilon or grh_c")
    if p < MIN_SCAN_PRIME:
        raise ValueError(f"threshold needs p >= {MIN_SCAN_PRIME}, got {p}")
    with mpmath.workprec(_BOUND_PRECISION_BITS):
        lp = mpmath.log(p)
        if epsilon is None:
            return +(mpmath.mpf(grh_c) * mpmath.power(p, mpmath.mpf(1) / 14) * lp ** (mpmath.mpf(2) / 7))
        if epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {epsilon}")
        exp2 = mpmath.mpf(3) / 8 - mpmath.mpf(epsilon)
        return +(lp ** (mpmath.mpf(1) / 8) * mpmath.log(lp) ** exp2)


@dataclass
class ScanRow:
    p: int
    exponent: int
    value: int
    bound: float
    status: str  # exact | partial | unknown
    largest_prime_factor: int | None  # exact P when status == 'exact'
    known_prime_floor: int  # P(value) is at least this; certain even when partial
    passes: bool | None

    def csv_line(self) -> str:
        lpf = self.largest_prime_factor if self.largest_prime_factor is not None else ""
        passes = "" if self.passes is None else str(self.passes).lower()
        return f"{self.p},{self.exponent},{self.value},{lpf},{self.bound!r},{passes},{self.status}"


CSV_HEADER = "p,exponent,value,largest_prime_factor,bound,passes,status"


@dataclass
class ScanSummary:
    total_rows: int
    pass_count: int
    fail_count: int
    unknown_count: int
    zero_rows: int

    @property
    def pass_fraction(self) -> float:
        decided = self.pass_count + self.fail_count
        return self.pass_count / decided if decided else 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows": self.total_rows,
                "pass": self.pass_count,
                "fail": self.fail_count,
                "unknown": self.unknown_count,
                "zeroRows": self.zero_rows,
                "passFraction": self.pass_fraction,
            },
            sort_keys=True,
        )


def threshold_scan(
    f: EigenformSpec,
    two_n: int,
    x_bound: int,
    epsilon: float | None = 0.1,
    grh_c: float | None = None,
    trial_bound: int = factor.DEFAULT_TRIAL_BOUND,
    rho_budget: int = factor.DEFAULT_RHO_BUDGET,
) -> tuple[list[ScanRow], ScanSummary]:
    """Scan primes in [17, x] and compare P(a_f(p^(2n))) to the threshold.

    A vanishing coefficient would contradict the even-exponent
    nonvanishing law in this range and raises IdentityViolationError.
    """
    if two_n < 2 or two_n % 2:
        raise ValueError(f"exponent must be even and >= 2, got {two_n}")
    if grh_c is not None:
        epsilon = None
    rows: list[ScanRow] = []
    pass_count = fail_count = unknown_count = 0
    for p, _ap in iter_prime_coeffs(f, x_bound):
        if p < MIN_SCAN_PRIME:
            continue
        value = coeff_prime_power(f, p, two_n)
        if value == 0:
            raise IdentityViolationError(
                f"a(p^{two_n}) vanished at p={p}: even exponents cannot vanish here"
            )
        bound = bound_value(p, epsilon=epsilon, grh_c=grh_c)
        fac = factor.factorize(abs(value), trial_bound, rho_budget, allow_partial=True)
        if fac.is_complete:
            lpf = fac.largest_known_prime()
            row = ScanRow(p, two_n, value, float(bound), "exact", lpf, lpf, lpf > bound)
        else:
            # the surviving cofactor has no prime factor at or below the
            # trial bound, so P(value) > cofactor_floor unconditionally
            floor = max(fac.largest_known_prime(), fac.cofactor_floor)
            passes = True if floor > bound else None
            status = "partial" if passes is not None else "unknown"
            row = ScanRow(p, two_n, value, float(bound), status, None, floor, passes)
        if row.passes is True:
            pass_count += 1
        elif row.passes is False:
            fail_count += 1
        else:
            unknown_count += 1
        rows.append(row)
    summary = ScanSummary(
        total_rows=len(rows),
        pass_count=pass_count,
        fail_count=fail_count,
        unknown_count=unknown_count,
        zero_rows=0,
    )
    return rows, summary


def check_divisibility_tower(f: EigenformSpec, p: int, n: int) -> bool:
    """a_f(p^(d-1)) divides a_f(p^(2n)) for every divisor d > 1 of 2n+1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    odd = 2 * n + 1
    top = coeff_prime_power(f, p, 2 * n)
    for d in range(3, odd + 1, 2):
        if odd % d:
            continue
        lower = coeff_prime_power(f, p, d - 1)
        if lower == 0:
            if top != 0:
                return False
            continue
        if top % lower:
            return False
    return True


def odd_exponent_divisor_check(f: EigenformSpec, p: int, n: int) -> bool:
    """a_f(p) divides a_f(p^(2n-1)) whenever a_f(p) is nonzero."""
    ap = f.ap(p)
    if ap == 0:
        return True
    return coeff_prime_power(f, p, 2 * n - 1) % ap == 0


def st_cdf(t: float) -> float:
    """Cumulative semicircle measure of [-1, t]."""
    t = min(1.0, max(-1.0, t))
    return float((mpmath.asin(t) + t * mpmath.sqrt(1 - t * t)) / mpmath.pi + 0.5)


def st_measure(a: float, b: float) -> float:
    """Semicircle measure (2/pi) integral_a^b sqrt(1-t^2) dt."""
    return st_cdf(b) - st_cdf(a)


@dataclass
class SatoTateHistogram:
    bins: int
    x_bound: int
    counts: list[int]
    expected: list[float]
    sample_size: int

    @property
    def max_deviation(self) -> float:
        return max(
            abs(c / self.sample_size - e) for c, e in zip(self.counts, self.expected)
        )

    def to_json_dict(self) -> dict:
        return {
            "bins": self.bins,
            "x": self.x_bound,
            "sampleSize": self.sample_size,
            "counts": self.counts,
            "expected": self.expected,
            "maxDeviation": self.max_deviation,
        }

    def csv_lines(self) -> list[str]:
        width = 2.0 / self.bins
        out = ["bin_low,bin_high,count,frequency,expected"]
        for j, (c, e) in enumerate(zip(self.counts, self.expected)):
            lo, hi = -1 + j * width, -1 + (j + 1) * width
            out.append(f"{lo},{hi},{c},{c / self.sample_size},{e}")
        return out


def sato_tate_histogram(f: EigenformSpec, x_bound: int, bins: int = 20) -> SatoTateHistogram:
    """Histogram of a_f(p)/(2 p^((k-1)/2)) against the semicircle law.

    Every normalized value must land in [-1, 1]; a value outside
    (checked exactly on the integers) raises IdentityViolationError.
    """
    if x_bound < 10**3:
        raise ValueError(f"x bound must be at least 1000, got {x_bound}")
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    counts = [0] * bins
    total = 0
    half = f.weight - 1
    for p, ap in iter_prime_coeffs(f, x_bound):
        if ap * ap > 4 * p**half:
            raise IdentityViolationError(f"|a_{p}| exceeds 2 p^((k-1)/2)")
        lam = ap / (2.0 * p ** (half / 2.0))
        idx = int((lam + 1.0) / 2.0 * bins)
        counts[min(max(idx, 0), bins - 1)] += 1
        total += 1
    width = 2.0 / bins
    expected = [st_measure(-1 + j * width, -1 + (j + 1) * width) for j in range(bins)]
    return SatoTateHistogram(
        bins=bins, x_bound=x_bound, counts=counts, expected=expected, sample_size=total
    )
