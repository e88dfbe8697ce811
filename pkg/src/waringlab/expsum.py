"""Weyl sums, exponential-sum bound evaluators, and the dyadic case driver.

Everything here serves the minor arc: generic sums sum e(g(n)) with
g = beta * f, the classical bound shapes (monotone-derivative, second
derivative, mean-value), the dyadic block classifier that picks the
applicable bound per block from the size of |beta| and the derivative
ladder of f, and exact solution counting for the k-power mean-value
system.

Implicit constants are never guessed: each bound evaluator returns the
bare shape, and sweeps report measured/bound ratios whose stability is
what the test suite asserts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .majorarc import BoundReport, F_sum_grid
from .pseudopoly import (ArcSetup, DomainError, PseudoPolynomial,
                         derivative, nearest_int_distance)

__all__ = [
    "PhaseFunction",
    "weyl_sum",
    "kusmin_landau_bound",
    "van_der_corput_bound",
    "vinogradov_prop_bound",
    "bdg_bound",
    "DyadicBlock",
    "DyadicPlan",
    "classify_and_bound",
    "minor_arc_sup",
    "VinogradovCount",
    "vinogradov_integral",
    "fractional_count_check",
    "HypothesisError",
    "MinorArcError",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class HypothesisError(ValueError):
    """A lemma hypothesis fails numerically; carries the first offender."""

    def __init__(self, message: str, n: int | None = None):
        super().__init__(message)
        self.n = n


class MinorArcError(ValueError):
    """beta violates the minor-arc lower bound |beta| > P^(v - t_d)."""


@dataclass(frozen=True)
class PhaseFunction:
    """Phase g(x) = sum c x^e with exact rational exponents.

    Built either as beta * f for a pseudo-polynomial f, or from an
    explicit term list.  Values and derivatives up to any order are
    available; evaluation at integer arguments goes through extended
    precision (longdouble) so phases up to ~1e9 keep ~1e-9 absolute
    accuracy after reduction mod 1.
    """

    terms: tuple[tuple[float, Fraction], ...]

    @classmethod
    def from_poly(cls, f: PseudoPolynomial, beta: float) -> "PhaseFunction":
        return cls(tuple((beta * float(c), e) for c, e in f.terms))

    @classmethod
    def from_terms(cls, pairs) -> "PhaseFunction":
        return cls(tuple((float(c), Fraction(e) if not isinstance(e, Fraction) else e)
                         for c, e in pairs))

    def value(self, x):
        if isinstance(x, np.ndarray):
            out = np.zeros(x.shape, dtype=np.float64)
            for c, e in self.terms:
                out += c * np.power(np.asarray(x, np.float64), float(e))
            return out
        return float(sum(c * float(x) ** float(e) for c, e in self.terms))

    def value_longdouble(self, n: np.ndarray) -> np.ndarray:
        x = n.astype(np.longdouble)
        out = np.zeros(x.shape, dtype=np.longdouble)
        for c, e in self.terms:
            exp_ld = np.longdouble(e.numerator) / np.longdouble(e.denominator)
            out += np.longdouble(c) * np.power(x, exp_ld)
        return out

    def derivative(self, j: int = 1) -> "PhaseFunction":
        terms = derivative(tuple((Fraction(c), e) for c, e in self.terms), j)
        return PhaseFunction(tuple((float(c), e) for c, e in terms))

    def __call__(self, x):
        return self.value(x)


def weyl_sum(g: PhaseFunction, lo: int, hi: int) -> complex:
    """sum_{n=lo}^{hi} e(g(n)), phases reduced mod 1 in extended precision."""
    if hi < lo:
        raise DomainError("empty summation range")
    n = np.arange(lo, hi + 1, dtype=np.int64)
    phases = np.remainder(g.value_longdouble(n), np.longdouble(1.0)).astype(np.float64)
    return complex(np.exp(2j * np.pi * phases).sum())


# ---------------------------------------------------------------------------
# Bound shapes
# ---------------------------------------------------------------------------

def kusmin_landau_bound(lam: float) -> float:
    """Monotone-derivative bound shape 1/lambda, valid for 0 < lambda < 1/2."""
    if not 0 < lam < 0.5:
        raise DomainError("need 0 < lambda < 1/2")
    return 1.0 / lam


def van_der_corput_bound(interval_len: float, lam: float, eta: float = 1.0) -> float:
    """Second-derivative bound shape |I| eta lambda^(1/2) + lambda^(-1/2)."""
    if lam <= 0:
        raise DomainError("need lambda > 0")
    if eta < 1:
        raise DomainError("need eta >= 1")
    if interval_len < 0:
        raise DomainError("need |I| >= 0")
    return interval_len * eta * math.sqrt(lam) + 1.0 / math.sqrt(lam)


def vinogradov_prop_bound(Q: float, k: int, delta: float) -> float:
    """Mean-value-method bound shape Q^(1 - delta/(k(k+1))) for k >= 2."""
    if k < 2:
        raise DomainError("need k >= 2")
    if delta > k + 1:
        raise DomainError("delta must satisfy delta <= k + 1")
    if delta <= 0 or Q <= 0:
        raise DomainError("need Q > 0 and delta > 0")
    return Q ** (1.0 - delta / (k * (k + 1)))


def bdg_bound(s: int, k: int, N: int, eps: float = 0.0) -> float:
    """Mean-value count bound shape N^(s+eps) + N^(2s - k(k+1)/2 + eps)."""
    if s < 1 or k < 2 or N < 2:
        raise DomainError("need s >= 1, k >= 2, N >= 2")
    return float(N) ** (s + eps) + float(N) ** (2 * s - k * (k + 1) / 2 + eps)


# ---------------------------------------------------------------------------
# Dyadic classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicBlock:
    w: int
    lo: float          # block is ]lo, hi]
    hi: float
    label: str         # "1.1", "1.2", "2.1", "2.2", "2.3", "2.4", or "gap"
    bound: float | None
    formula: str
    lam: float | None = None
    window_ok: bool | None = None
    reason: str | None = None

    def as_dict(self) -> dict:
        return {
            "w": self.w, "lo": self.lo, "hi": self.hi, "label": self.label,
            "bound": self.bound, "formula": self.formula, "lambda": self.lam,
            "window_ok": self.window_ok, "reason": self.reason,
        }


@dataclass(frozen=True)
class DyadicPlan:
    P: float
    beta: float
    v: float
    W: int
    case_family: int            # 1: leading exponent non-integral, 2: integral
    blocks: tuple[DyadicBlock, ...]
    combined_bound: float
    tail_bound: float

    @property
    def gaps(self) -> tuple[DyadicBlock, ...]:
        return tuple(b for b in self.blocks if b.label == "gap")

    def to_json(self, path_or_buf=None):
        doc = {
            "P": self.P, "beta": self.beta, "v": self.v, "W": self.W,
            "case_family": self.case_family,
            "combined_bound": self.combined_bound,
            "tail_bound": self.tail_bound,
            "blocks": [b.as_dict() for b in self.blocks],
        }
        if path_or_buf is None:
            return json.dumps(doc, indent=2, sort_keys=True)
        if hasattr(path_or_buf, "write"):
            json.dump(doc, path_or_buf, indent=2, sort_keys=True)
            return None
        with open(path_or_buf, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
        return None


def _lambda_window(g: PhaseFunction, k: int, lo: float, hi: float,
                   delta: float, Q: float) -> tuple[float, bool]:
    """lambda = |g^(k+1)| / (k+1)! on the block, and the window check
    Q^(-k-1+delta) <= lambda <= Q^(-1) (endpoint evaluation: the
    derivative of a term sum with dominant leading term is monotone on
    dyadic blocks at these scales)."""
    der = g.derivative(k + 1)
    fac = math.factorial(k + 1)
    v1 = abs(der.value(max(lo, 1.0))) / fac
    v2 = abs(der.value(hi)) / fac
    lam = min(v1, v2)
    lam_hi = max(v1, v2)
    ok = (Q ** (-k - 1 + delta) <= lam) and (lam_hi <= 1.0 / Q)
    return lam, ok


def classify_and_bound(f: PseudoPolynomial, beta: float, P: float,
                       v: float) -> DyadicPlan:
    """Dyadic-block case analysis for sum_{m <= P} e(beta f(m)).

    Splits ]P/2^W, P] into dyadic blocks, classifies each by the size of
    |beta| against the block's thresholds, and evaluates the printed
    bound shape for its case.  Blocks matching no case are labelled
    "gap", never silently bridged.
    """
    b = abs(float(beta))
    t_d = float(f.leading_exponent)
    theta = f.largest_nonint_exponent
    if theta is None:
        raise DomainError("classification requires a non-integral exponent")
    if not b > P ** (v - t_d):
        raise MinorArcError(f"|beta|={b} <= P^(v - t_d)={P ** (v - t_d)}")

    k_ceil = math.ceil(t_d)
    # W large enough that the tail P/2^W stays below the combined estimate,
    # but deep enough (blocks down to ~sqrt(P)) to expose case transitions
    W = max(math.ceil(v * math.log2(P) / (k_ceil * (k_ceil + 1))),
            int(math.log2(P) / 2), 1)
    case_family = 1 if theta == f.leading_exponent else 2
    g = PhaseFunction.from_poly(f, beta)

    blocks: list[DyadicBlock] = []
    if case_family == 2:
        theta_h = float(theta)
        rho = float(min(f.terms[-1][1] - f.terms[-2][1], Fraction(1, 6)))
        t_d_int = int(f.leading_exponent)

    for w in range(W):
        hi = P / 2 ** w
        lo = P / 2 ** (w + 1)
        Q = lo
        if case_family == 1:
            k = k_ceil
            if b >= Q ** (-t_d + v):
                lam, ok = _lambda_window(g, k, lo, hi, v, Q)
                blocks.append(DyadicBlock(
                    w=w, lo=lo, hi=hi, label="1.1",
                    bound=Q ** (1.0 - v / (k * (k + 1))),
                    formula="Q^(1 - v/(k(k+1)))", lam=lam, window_ok=ok))
            else:
                # P^(-t_d+v) <= |beta| < Q^(-t_d+v): slow-phase regime
                blocks.append(DyadicBlock(
                    w=w, lo=lo, hi=hi, label="1.2",
                    bound=Q ** (1.0 - t_d) * P ** (t_d - v),
                    formula="Q^(1-t_d) P^(t_d-v)"))
        else:
            if b > Q ** (-theta_h + rho):
                lam, ok = _lambda_window(g, t_d_int, lo, hi, rho, Q)
                blocks.append(DyadicBlock(
                    w=w, lo=lo, hi=hi, label="2.1",
                    bound=Q ** (1.0 - rho / (t_d_int * (t_d_int + 1) ** 2)),
                    formula="Q^(1 - rho/(t_d (t_d+1)^2))", lam=lam, window_ok=ok))
            elif b <= P ** (-t_d + 1.0 - rho):
                blocks.append(DyadicBlock(
                    w=w, lo=lo, hi=hi, label="2.2",
                    bound=P ** (t_d - v) * Q ** (1.0 - t_d),
                    formula="P^(t_d-v) Q^(1-t_d)"))
            elif b < P ** (-t_d + 2.0 - rho):
                rho2 = rho  # undefined upstream; nearest defined analogue
                blocks.append(DyadicBlock(
                    w=w, lo=lo, hi=hi, label="2.3",
                    bound=(P ** ((-t_d + 3.0 - rho2) / 2.0) * Q ** (t_d / 2.0 - 1.0)
                           + P ** ((t_d - 1.0 + rho2) / 2.0) * Q ** (1.0 - t_d / 2.0)),
                    formula="P^((-t_d+3-rho2)/2) Q^(t_d/2-1) + "
                            "P^((t_d-1+rho2)/2) Q^(1-t_d/2)"))
            else:
                # P^(-t_d+2-rho) < |beta| <= Q^(-theta_h+rho)
                if t_d_int >= 3:
                    blocks.append(DyadicBlock(
                        w=w, lo=lo, hi=hi, label="2.4",
                        bound=Q ** (1.0 - rho / ((t_d_int - 1) * t_d_int ** 2)),
                        formula="Q^(1 - rho/((t_d-1) t_d^2))"))
                else:
                    blocks.append(DyadicBlock(
                        w=w, lo=lo, hi=hi, label="gap", bound=None,
                        formula="",
                        reason="range P^(-t_d+2-rho) < |beta| <= Q^(-theta+rho) "
                               "needs t_d >= 3"))

    combined = P ** (1.0 - v / (k_ceil * (k_ceil + 1)))
    return DyadicPlan(P=P, beta=beta, v=v, W=W, case_family=case_family,
                      blocks=tuple(blocks), combined_bound=combined,
                      tail_bound=P / 2 ** W)


# ---------------------------------------------------------------------------
# Minor-arc sup sweep
# ---------------------------------------------------------------------------

def minor_arc_sup(f: PseudoPolynomial, N: int, samples: int,
                  v: float | None = None, seed: int | None = None) -> BoundReport:
    """max |F(alpha)| over sampled minor-arc points vs P^(1 - v/(2k(k+1))).

    Sampling is a deterministic golden-ratio sequence on the minor arc;
    pass a seed for a randomized recheck.
    """
    if samples < 1:
        raise DomainError("need samples >= 1")
    arc = ArcSetup.create(f, N, v)
    lo = 1.0 / arc.tau
    width = 1.0 - 2.0 * lo
    if seed is None:
        u = np.remainder(0.5 + _GOLDEN * np.arange(1, samples + 1, dtype=np.float64), 1.0)
    else:
        u = np.random.default_rng(seed).uniform(size=samples)
    alphas = lo + u * width
    vals = np.abs(F_sum_grid(alphas, f, arc.P))
    k = math.ceil(float(f.leading_exponent))
    exponent = 1.0 - arc.v / (2 * k * (k + 1))
    bound = arc.P ** exponent
    j = int(np.argmax(vals))
    return BoundReport(
        name="minor_arc_sup",
        quantity=float(vals[j]),
        bound=bound,
        parameters={"N": int(N), "P": arc.P, "tau": arc.tau, "v": arc.v,
                    "samples": samples, "exponent": exponent,
                    "alpha_at_max": float(alphas[j])},
    )


# ---------------------------------------------------------------------------
# Mean-value solution counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VinogradovCount:
    s: int
    k: int
    N: int
    count: int


def vinogradov_integral(s: int, k: int, N: int,
                        reverse: bool = False) -> VinogradovCount:
    """Exact number of solutions of sum n_i^j = sum m_i^j (j = 1..k).

    Counted by hashing the power-sum vector over all s-tuples from
    [1, N] and summing squared multiplicities (the full solution count of
    the two-sided system).  Guarded by 2s * log2(N) <= 48.
    """
    if s < 1 or k < 1 or N < 1:
        raise DomainError("need s, k, N >= 1")
    if (2 * s) * math.log2(max(N, 2)) > 48:
        raise DomainError("budget guard: (2s) log2(N) must be <= 48")
    rng = range(N, 0, -1) if reverse else range(1, N + 1)
    table: dict[tuple[int, ...], int] = {}
    for tup in product(rng, repeat=s):
        key = tuple(sum(x ** j for x in tup) for j in range(1, k + 1))
        table[key] = table.get(key, 0) + 1
    count = sum(m * m for m in table.values())
    return VinogradovCount(s=s, k=k, N=N, count=count)


# ---------------------------------------------------------------------------
# Fractional-part counting
# ---------------------------------------------------------------------------

def fractional_count_check(phi, M: int, Nlen: int, delta: float, c: float,
                           D: float) -> BoundReport:
    """Count n in [M, M+Nlen) with ||phi(n)|| <= D delta vs (Nlen c delta + 1)(2D + 1).

    The slow-growth hypothesis delta <= phi(n+1) - phi(n) <= c delta is
    verified on [M, M+Nlen-2] first and violations are reported with the
    offending n.
    """
    if Nlen < 2:
        raise DomainError("need Nlen >= 2")
    if delta <= 0 or c < 1:
        raise HypothesisError("need delta > 0 and c >= 1")
    if c * delta > 0.5:
        raise HypothesisError(f"c*delta = {c * delta} exceeds 1/2")
    fn = phi.value if isinstance(phi, PhaseFunction) else phi
    values = [float(fn(n)) for n in range(M, M + Nlen)]
    slack = 1e-9  # relative, absorbs float roundoff at exact-equality edges
    for i in range(Nlen - 1):
        diff = values[i + 1] - values[i]
        if not delta * (1 - slack) <= diff <= c * delta * (1 + slack):
            raise HypothesisError(
                f"increment {diff} outside [{delta}, {c * delta}] at n={M + i}",
                n=M + i)
    count = sum(1 for val in values if nearest_int_distance(val) <= D * delta)
    bound = (Nlen * c * delta + 1.0) * (2.0 * D + 1.0)
    if count > bound:
        raise RuntimeError(
            f"count {count} exceeds bound {bound}: numeric hypothesis edge")
    return BoundReport(
        name="fractional_part_count",
        quantity=float(count),
        bound=bound,
        parameters={"M": M, "Nlen": Nlen, "delta": delta, "c": c, "D": D},
    )
