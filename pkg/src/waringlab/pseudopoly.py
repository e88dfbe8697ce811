"""Pseudo-polynomials and their certified evaluation.

A pseudo-polynomial is a finite sum

    f(x) = a_d x^(t_d) + ... + a_1 x^(t_1),

with real coefficients, exponents 1 <= t_1 < ... < t_d, and positive
leading coefficient a_d.  The classical case (all exponents integral) is
admitted and flagged; everything downstream keys on the floor values
floor(f(n)) for integers n >= 1, so this module's central obligation is
to produce those floors *exactly*:

  * coefficients and exponents are kept as ``fractions.Fraction`` (decimal
    input strings are exact dyadic/denary rationals, so nothing is lost),
  * values that are exactly rational are detected by integer root
    extraction and floored in exact arithmetic,
  * everything else goes through interval arithmetic (mpmath's ``iv``
    context) with precision doubling until the enclosure pins down the
    floor, or fails loudly.

Also here: the largest preimage P solving f(P) = N, its deviation from
(N/a_d)^(1/t_d), termwise differentiation, and the sufficient-s threshold
of the asymptotic counting formula.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import mpmath
import numpy as np
from mpmath import iv

__all__ = [
    "PseudoPolynomial",
    "ArcSetup",
    "CertifiedValue",
    "ParseError",
    "DomainError",
    "CertificationError",
    "NoSolutionError",
    "ArcMembershipError",
    "THETA0_THEOREM",
    "THETA0_SINGLE_TERM",
    "eval_with_error",
    "eval_float",
    "eval_array",
    "floor_eval",
    "floor_values",
    "floor_values_window",
    "largest_preimage",
    "p_deviation",
    "derivative",
    "eval_term_list",
    "theorem_constants",
    "default_v",
    "nearest_int_distance",
]

# Exponent indexing convention below the first term: the sufficient-s
# threshold uses t_0 = 0, while the major-arc error exponents use t_0 = 1
# when d = 1.  Both appear downstream, so both are named here.
THETA0_THEOREM = Fraction(0)
THETA0_SINGLE_TERM = Fraction(1)

# mpmath's interval context carries process-global precision state.
_IV_LOCK = threading.Lock()

_MAX_FLOOR_BITS = 1024


class ParseError(ValueError):
    """Malformed pseudo-polynomial literal; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(ValueError):
    """Argument outside an operation's domain (x <= 0, bad exponent, ...)."""


class CertificationError(RuntimeError):
    """Requested certified result is unreachable at the precision cap."""


class NoSolutionError(ValueError):
    """f(x) = N has no solution with x >= 1."""


class ArcMembershipError(ValueError):
    """alpha lies on the wrong side of the major/minor arc split."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # floats are dyadic rationals, exact
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class PseudoPolynomial:
    """Immutable term list (coefficient, exponent), exponents increasing."""

    terms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("pseudo-polynomial needs at least one term")
        exps = [e for _, e in self.terms]
        if any(e < 1 for e in exps):
            raise DomainError("exponents below 1 are not supported")
        if any(exps[i] >= exps[i + 1] for i in range(len(exps) - 1)):
            raise DomainError("exponents must be strictly increasing")
        if any(c == 0 for c, _ in self.terms):
            raise DomainError("zero coefficients are not allowed")
        if self.terms[-1][0] <= 0:
            raise DomainError("leading coefficient must be positive")

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple]) -> "PseudoPolynomial":
        """Build from (coefficient, exponent) pairs in any order."""
        terms = tuple(
            sorted(((_as_fraction(c), _as_fraction(e)) for c, e in pairs),
                   key=lambda t: t[1])
        )
        return cls(terms)

    @classmethod
    def parse(cls, text: str) -> "PseudoPolynomial":
        return _parse_literal(text)

    # -- structural accessors -------------------------------------------

    @property
    def d(self) -> int:
        return len(self.terms)

    @property
    def leading_coefficient(self) -> Fraction:
        return self.terms[-1][0]

    @property
    def leading_exponent(self) -> Fraction:
        return self.terms[-1][1]

    @property
    def classical_mode(self) -> bool:
        """True iff every exponent is an integer."""
        return all(e.denominator == 1 for _, e in self.terms)

    @property
    def largest_nonint_exponent(self) -> Fraction | None:
        for _, e in reversed(self.terms):
            if e.denominator != 1:
                return e
        return None

    def exponent_gap(self, theta0: Fraction) -> Fraction:
        """t_d - t_{d-1}, with the supplied stand-in below the first term."""
        if self.d >= 2:
            return self.terms[-1][1] - self.terms[-2][1]
        return self.terms[-1][1] - theta0

    def value_at_one(self) -> Fraction:
        """f(1) = sum of coefficients, exact."""
        return sum((c for c, _ in self.terms), Fraction(0))

    def __str__(self) -> str:
        parts = []
        for c, e in reversed(self.terms):
            coef = str(c)
            if e == 1:
                parts.append(f"{coef}*x")
            else:
                parts.append(f"{coef}*x^{e}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Literal parser:  "2*x^2.5 + 1*x^1",  coefficients as decimal strings,
# exponents as decimals or fractions "5/2".
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<x>x)|(?P<op>[-+*/^]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup is None and not m.group().strip():
            pos = m.end()
            continue
        kind = "num" if m.group("num") else ("x" if m.group("x") else "op")
        value = m.group("num") or m.group("x") or m.group("op")
        tokens.append((kind, value, m.start() + len(m.group()) - len(m.group().lstrip())))
        pos = m.end()
    return tokens


def _parse_literal(text: str) -> PseudoPolynomial:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial literal", 0)
    terms: list[tuple[Fraction, Fraction]] = []
    i = 0
    sign = 1
    n = len(tokens)

    def expect_exponent(i):
        # exponent := NUMBER | NUMBER '/' NUMBER
        if i >= n or tokens[i][0] != "num":
            pos = tokens[i][2] if i < n else len(text)
            raise ParseError("expected exponent after '^'", pos)
        num = Fraction(tokens[i][1])
        i += 1
        if i < n and tokens[i][:2] == ("op", "/"):
            if i + 1 >= n or tokens[i + 1][0] != "num":
                raise ParseError("expected denominator after '/'", tokens[i][2])
            den = tokens[i + 1][1]
            if "." in den or "." in tokens[i - 1][1]:
                raise ParseError("fractional exponents take integer parts", tokens[i][2])
            num = Fraction(int(tokens[i - 1][1]), int(den))
            i += 2
        return num, i

    while i < n:
        kind, value, pos = tokens[i]
        if kind == "op" and value in "+-":
            sign = 1 if value == "+" else -1
            i += 1
            continue
        coef = Fraction(1)
        if kind == "num":
            coef = Fraction(value)
            i += 1
            # fractional coefficient "p/q*x" (the '*' disambiguates from
            # a fractional exponent, which never precedes 'x')
            if (i + 2 < n and tokens[i][:2] == ("op", "/")
                    and tokens[i + 1][0] == "num"
                    and tokens[i + 2][:2] == ("op", "*")):
                if "." in value or "." in tokens[i + 1][1]:
                    raise ParseError("fractional coefficients take integer parts",
                                     tokens[i][2])
                coef = Fraction(int(value), int(tokens[i + 1][1]))
                i += 2
            if i < n and tokens[i][:2] == ("op", "*"):
                i += 1
            elif i < n and tokens[i][0] == "x":
                pass  # implicit multiplication "2x"
            else:
                # bare constant has no x part
                raise ParseError("constant terms are not allowed", pos)
        if i >= n or tokens[i][0] != "x":
            raise ParseError("expected 'x'", tokens[i][2] if i < n else len(text))
        i += 1
        exponent = Fraction(1)
        if i < n and tokens[i][:2] == ("op", "^"):
            exponent, i = expect_exponent(i + 1)
        terms.append((sign * coef, exponent))
        sign = 1
        if i < n and tokens[i][0] not in ("op",):
            raise ParseError("expected '+' or '-' between terms", tokens[i][2])
        if i < n and tokens[i][1] not in "+-":
            raise ParseError(f"unexpected operator {tokens[i][1]!r}", tokens[i][2])

    by_exp = {}
    for c, e in terms:
        if e in by_exp:
            raise ParseError(f"duplicate exponent {e}", 0)
        by_exp[e] = c
    return PseudoPolynomial.from_terms([(c, e) for e, c in by_exp.items()])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class CertifiedValue:
    """Value together with a certified absolute-error radius."""

    __slots__ = ("value", "radius")

    def __init__(self, value, radius):
        self.value = value
        self.radius = radius

    def __iter__(self):
        return iter((self.value, self.radius))

    def __repr__(self):
        return f"CertifiedValue({self.value}, radius={self.radius})"


def _float_terms(f: PseudoPolynomial) -> tuple[tuple[float, float], ...]:
    return tuple((float(c), float(e)) for c, e in f.terms)


def eval_float(f: PseudoPolynomial, x: float) -> float:
    """Plain float64 evaluation, no certification (plumbing)."""
    return float(sum(c * x ** e for c, e in _float_terms(f)))


def eval_array(f: PseudoPolynomial, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    out = np.zeros_like(xs)
    for c, e in _float_terms(f):
        out += c * np.power(xs, e)
    return out


def _iv_eval(f: PseudoPolynomial, x, bits: int):
    """Interval enclosure of f(x) at the given working precision."""
    with _IV_LOCK:
        saved = iv.prec
        try:
            iv.prec = bits
            if isinstance(x, Fraction):
                xi = iv.mpf(x.numerator) / iv.mpf(x.denominator)
            else:
                xi = iv.mpf(x)
            total = iv.mpf(0)
            for c, e in f.terms:
                ci = iv.mpf(c.numerator) / iv.mpf(c.denominator)
                if e.denominator == 1:
                    term = xi ** int(e)
                else:
                    term = xi ** (iv.mpf(e.numerator) / iv.mpf(e.denominator))
                total += ci * term
            # extract endpoints exactly (no ambient-precision rounding)
            lo = mpmath.mp.make_mpf(total._mpi_[0])
            hi = mpmath.mp.make_mpf(total._mpi_[1])
        finally:
            iv.prec = saved
    return lo, hi


def eval_with_error(f: PseudoPolynomial, x, precision: int = 53) -> CertifiedValue:
    """Evaluate f(x) with a certified absolute-error radius.

    The radius is guaranteed at most 2^(-precision/2) * |value|; interval
    evaluation at escalating working precision gets there long before the
    cap for any sane input.
    """
    if precision < 53:
        raise DomainError("precision must be at least 53 bits")
    xf = float(x)
    if not xf > 0:
        raise DomainError("evaluation requires x > 0")
    target = mpmath.mpf(2) ** (-precision / 2)
    bits = max(precision + 16, 64)
    while bits <= max(_MAX_FLOOR_BITS, 4 * precision):
        lo, hi = _iv_eval(f, x, bits)
        with mpmath.workprec(bits + 8):
            mid = (lo + hi) / 2
            radius = (hi - lo) / 2
            if mid != 0 and radius <= target * abs(mid):
                return CertifiedValue(mid, radius)
            if mid == 0 and radius <= target:
                return CertifiedValue(mpmath.mpf(0), radius)
        bits *= 2
    raise CertificationError(
        f"could not certify f({x}) to 2^-{precision // 2} at {_MAX_FLOOR_BITS} bits")


def _exact_rational_value(f: PseudoPolynomial, n: int) -> Fraction | None:
    """f(n) as an exact Fraction when every term is rational, else None.

    Term a * n^(p/q) is rational iff n^p is a perfect q-th power.
    """
    total = Fraction(0)
    for c, e in f.terms:
        if e.denominator == 1:
            total += c * Fraction(n) ** e.numerator
            continue
        power = gmpy2.mpz(n) ** e.numerator
        root, exact = gmpy2.iroot(power, e.denominator)
        if not exact:
            return None
        total += c * int(root)
    return total


# Conservative forward-error factor for a d-term float64 evaluation:
# covers pow (<=4 ulp), multiply, and the summation tree.
_FLOAT_EPS = 2.220446049250313e-16


def _float_margin(f: PseudoPolynomial, n_abs_value: float) -> float:
    return n_abs_value * _FLOAT_EPS * (32 + 4 * f.d)


def floor_eval(f: PseudoPolynomial, n: int) -> int:
    """floor(f(n)), exact.  Never silently rounds.

    Resolution order: exact rational arithmetic when every term is
    rational at n; a certified float64 fast path when the value is
    comfortably far from an integer; interval arithmetic with precision
    doubling (64 -> 1024 bits) otherwise.
    """
    if n < 1:
        raise DomainError("floor evaluation requires n >= 1")
    n = int(n)

    exact = _exact_rational_value(f, n)
    if exact is not None:
        return exact.numerator // exact.denominator

    # fast path: value certified away from every integer
    val = eval_float(f, n)
    absmax = sum(abs(c) * float(n) ** float(e) for c, e in f.terms)
    margin = _float_margin(f, absmax)
    if abs(val - round(val)) > margin:
        return math.floor(val)

    bits = 64
    while bits <= _MAX_FLOOR_BITS:
        lo, hi = _iv_eval(f, n, bits)
        if mpmath.floor(lo) == mpmath.floor(hi):
            return int(mpmath.floor(lo))
        bits *= 2
    raise CertificationError(
        f"floor of f({n}) not certified at {_MAX_FLOOR_BITS} bits; "
        "value may be an exact integer outside the rational fast path")


def floor_values_window(f: PseudoPolynomial, lo: int, hi: int) -> np.ndarray:
    """floor(f(n)) for n = lo..hi as int64, certified elementwise.

    Vectorized float64 evaluation with a rigorous distance-to-integer
    margin; entries inside the margin fall back to ``floor_eval``.
    """
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    if lo < 1:
        raise DomainError("floor evaluation requires n >= 1")
    ns = np.arange(lo, hi + 1, dtype=np.float64)
    vals = np.zeros_like(ns)
    absmax = np.zeros_like(ns)
    for c, e in _float_terms(f):
        p = np.power(ns, e)
        vals += c * p
        absmax += abs(c) * p
    margin = absmax * _FLOAT_EPS * (32 + 4 * f.d)
    nearest = np.rint(vals)
    floors = np.floor(vals).astype(np.int64)
    unsure = np.abs(vals - nearest) <= margin
    for idx in np.nonzero(unsure)[0]:
        floors[idx] = floor_eval(f, lo + int(idx))
    return floors


def floor_values(f: PseudoPolynomial, limit_n: int) -> np.ndarray:
    """floor(f(n)) for n = 1..limit_n (see :func:`floor_values_window`)."""
    if limit_n < 1:
        return np.zeros(0, dtype=np.int64)
    return floor_values_window(f, 1, limit_n)


# ---------------------------------------------------------------------------
# Largest preimage and its deviation
# ---------------------------------------------------------------------------

def _mp_eval(f: PseudoPolynomial, x) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for c, e in f.terms:
        ce = mpmath.mpf(c.numerator) / c.denominator
        ee = mpmath.mpf(e.numerator) / e.denominator
        total += ce * mpmath.power(x, ee)
    return total


def _monotone_from(f: PseudoPolynomial) -> float:
    """x0 with f strictly increasing on [x0, oo).

    Beyond (sum_{i<d} |a_i t_i| / (a_d t_d))^(1/(t_d - t_{d-1})) the
    leading derivative term dominates the rest.
    """
    if f.d == 1:
        return 1.0
    a_d, t_d = f.terms[-1]
    lower = sum(abs(c) * e for c, e in f.terms[:-1])
    ratio = lower / (a_d * t_d)
    if ratio <= 1:
        return 1.0
    gap = float(f.terms[-1][1] - f.terms[-2][1])
    return max(1.0, float(ratio) ** (1.0 / gap))


def _largest_preimage_mp(f: PseudoPolynomial, N) -> mpmath.mpf:
    if N < f.value_at_one():
        raise NoSolutionError(f"N={N} is below f(1)={f.value_at_one()}")
    with mpmath.workprec(200):
        Nm = mpmath.mpf(N)
        x0 = mpmath.mpf(_monotone_from(f))
        t_d = float(f.leading_exponent)
        a_d = float(f.leading_coefficient)

        if _mp_eval(f, x0) > Nm:
            # N is reached inside the (possibly non-monotone) head; locate
            # the last crossing on [1, x0] by scan + bisection.
            lo_x, hi_x = mpmath.mpf(1), x0
            grid = 4096
            last = None
            prev = _mp_eval(f, lo_x) - Nm
            for j in range(1, grid + 1):
                xj = lo_x + (hi_x - lo_x) * j / grid
                cur = _mp_eval(f, xj) - Nm
                if prev <= 0 <= cur or prev >= 0 >= cur:
                    last = (lo_x + (hi_x - lo_x) * (j - 1) / grid, xj)
                prev = cur
            if last is None:
                raise NoSolutionError(f"no crossing of f(x) = {N} found")
            a, b = last
        else:
            a = x0
            b = mpmath.mpf(max(float(x0), (float(N) / a_d) ** (1.0 / t_d)))
            while _mp_eval(f, b) < Nm:
                b = b * 2

        for _ in range(300):
            mid = (a + b) / 2
            fm = _mp_eval(f, mid) - Nm
            if abs(fm) <= mpmath.mpf("1e-12"):
                return mid
            if fm < 0:
                a = mid
            else:
                b = mid
            if b - a < mpmath.mpf("1e-40") * b:
                break
        return (a + b) / 2


def largest_preimage(f: PseudoPolynomial, N) -> float:
    """Largest P with f(P) = N, to |f(P) - N| <= 1e-9 (desk scale N <= 1e9)."""
    return float(_largest_preimage_mp(f, N))


def p_deviation(f: PseudoPolynomial, N) -> float:
    """P - (N / a_d)^(1/t_d); identically zero for single-term f."""
    if f.d == 1:
        # avoid cancellation noise: deviation is exactly 0 by definition
        _ = _largest_preimage_mp(f, N)
        return 0.0
    with mpmath.workprec(200):
        P = _largest_preimage_mp(f, N)
        a_d = mpmath.mpf(f.leading_coefficient.numerator) / f.leading_coefficient.denominator
        t_d = mpmath.mpf(f.leading_exponent.numerator) / f.leading_exponent.denominator
        ref = mpmath.power(mpmath.mpf(N) / a_d, 1 / t_d)
        return float(P - ref)


# ---------------------------------------------------------------------------
# Differentiation and the sufficient-s threshold
# ---------------------------------------------------------------------------

def derivative(f_or_terms, j: int = 1) -> tuple[tuple[Fraction, Fraction], ...]:
    """Term list of the j-th derivative, exact falling-factorial coefficients.

    Integer-exponent terms annihilated by the j-th derivative are dropped.
    The result is a plain term list (exponents may fall below 1), usable
    with :func:`eval_term_list`.
    """
    if j < 1:
        raise DomainError("derivative order must be >= 1")
    if isinstance(f_or_terms, PseudoPolynomial):
        terms = f_or_terms.terms
    else:
        terms = tuple((_as_fraction(c), _as_fraction(e)) for c, e in f_or_terms)
    out = []
    for c, e in terms:
        if e.denominator == 1 and e.numerator < j:
            continue
        coef = c
        for i in range(j):
            coef *= (e - i)
        if coef != 0:
            out.append((coef, e - j))
    return tuple(out)


def eval_term_list(terms: Sequence[tuple[Fraction, Fraction]], x):
    """Evaluate a term list at x (scalar or ndarray)."""
    if isinstance(x, np.ndarray):
        out = np.zeros_like(np.asarray(x, dtype=np.float64))
        for c, e in terms:
            out += float(c) * np.power(x, float(e))
        return out
    return float(sum(float(c) * float(x) ** float(e) for c, e in terms))


def theorem_constants(f: PseudoPolynomial) -> tuple[Fraction, int]:
    """(rho, s_min) for the asymptotic counting formula.

    rho = min(t_d - t_{d-1}, 1/6) with t_0 = 0; s_min is the smallest
    integer strictly greater than (2/rho) * ceil(t_d)^2 * (ceil(t_d)+1).
    """
    gap = f.exponent_gap(THETA0_THEOREM)
    rho = min(gap, Fraction(1, 6))
    t_d = f.leading_exponent
    k = -((-t_d.numerator) // t_d.denominator)  # ceil
    bound = Fraction(2) / rho * k * k * (k + 1)
    s_min = bound.numerator // bound.denominator + 1
    return rho, s_min


def default_v(f: PseudoPolynomial) -> float:
    """Default arc-splitting parameter: 0.9 * min(t_d - t_{d-1}, 1/5).

    Uses t_0 = 1 when d = 1, matching the arc-geometry convention.
    """
    gap = f.exponent_gap(THETA0_SINGLE_TERM)
    if gap <= 0:
        raise DomainError("no admissible arc parameter: exponent gap is zero")
    return 0.9 * float(min(gap, Fraction(1, 5)))


def nearest_int_distance(alpha: float) -> float:
    """Distance from alpha to the nearest integer."""
    frac = alpha - math.floor(alpha)
    return min(frac, 1.0 - frac)


@dataclass(frozen=True)
class ArcSetup:
    """Arc geometry for a counting target N: P, v, and tau = P^(t_d - v).

    alpha is on the major arc iff its distance to the nearest integer is
    below 1/tau; the two arcs partition a unit period.
    """

    f: PseudoPolynomial
    N: int
    P: float
    v: float
    tau: float

    @classmethod
    def create(cls, f: PseudoPolynomial, N: int, v: float | None = None) -> "ArcSetup":
        if v is None:
            v = default_v(f)
        cap = float(min(f.exponent_gap(THETA0_SINGLE_TERM), Fraction(1, 5)))
        if not 0 < v < cap:
            raise DomainError(f"v={v} outside (0, {cap})")
        P = largest_preimage(f, N)
        tau = P ** (float(f.leading_exponent) - v)
        if not tau > 1:
            raise DomainError(f"tau={tau} <= 1: N too small for this arc split")
        return cls(f=f, N=int(N), P=P, v=v, tau=tau)

    def is_major(self, alpha: float) -> bool:
        return nearest_int_distance(alpha) < 1.0 / self.tau
