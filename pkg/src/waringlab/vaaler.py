"""Trigonometric approximation of interval indicators, and the floor
decomposition it powers.

The degree-H approximant to the indicator of [a, b) within one period is
built by endpoint differencing of the extremal sawtooth approximant,

    chi*(x) = (b - a) + sum_{0 < |h| <= H} c_h (e(-hb) - e(-ha)) e(hx),

where c_h = -J(|h|/(H+1)) / (2 pi i h) and J(t) = pi t (1-t) cot(pi t) + t
is the sawtooth multiplier.  The pointwise error is majorized by the
normalized Fejer kernel attached to each endpoint; the inequality (never
the construction's provenance) is what downstream code relies on, and the
test suite verifies it on dense grids.

The floor decomposition splits the floor-phase sum F(alpha) by the bin of
the fractional part {f(m)} among B equal subintervals and measures every
quantity in the chain indicator -> approximant -> residual alongside its
theoretical bound shape.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .majorarc import BoundReport
from .pseudopoly import (ArcMembershipError, ArcSetup, DomainError,
                         PseudoPolynomial, eval_array, floor_values)

__all__ = [
    "TrigPolyApprox",
    "vaaler_multiplier",
    "vaaler_approx",
    "fejer_majorant",
    "check_vaaler_error",
    "FloorDecomposition",
    "floor_decomposition_terms",
    "recommended_interval_count",
]


def vaaler_multiplier(t: float) -> float:
    """Sawtooth multiplier J(t) = pi t (1 - t) cot(pi t) + t on (0, 1)."""
    if not 0.0 < t < 1.0:
        raise DomainError("multiplier argument must lie in (0, 1)")
    return math.pi * t * (1.0 - t) / math.tan(math.pi * t) + t


@dataclass(frozen=True)
class TrigPolyApprox:
    """Degree-H indicator approximant for [left, right) within [0, 1)."""

    left: float
    right: float
    H: int
    coefficients: dict  # h -> complex, 0 < |h| <= H

    @property
    def constant(self) -> float:
        return self.right - self.left

    def evaluate(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=np.float64)
        out = np.full(xs.shape, self.constant, dtype=np.complex128)
        for h, coef in self.coefficients.items():
            out += coef * np.exp(2j * np.pi * h * xs)
        return out.real if out.ndim else float(out.real)

    def to_json(self, path_or_buf=None):
        doc = {
            "left": self.left, "right": self.right, "H": self.H,
            "coefficients": {str(h): [c.real, c.imag]
                             for h, c in sorted(self.coefficients.items())},
        }
        if path_or_buf is None:
            return json.dumps(doc, indent=2, sort_keys=True)
        if hasattr(path_or_buf, "write"):
            json.dump(doc, path_or_buf, indent=2, sort_keys=True)
            return None
        with open(path_or_buf, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
        return None


def _sawtooth_coefficients(H: int) -> dict:
    """c_h = -J(|h|/(H+1)) / (2 pi i h) for 0 < |h| <= H."""
    coeffs = {}
    for h in range(1, H + 1):
        jh = vaaler_multiplier(h / (H + 1))
        c = -jh / (2j * math.pi * h)
        coeffs[h] = c
        coeffs[-h] = c.conjugate()
    return coeffs


def vaaler_approx(interval: tuple[float, float], H: int) -> TrigPolyApprox:
    """Indicator approximant for an interval within one period.

    A degenerate (zero-length) interval is allowed and yields a purely
    oscillatory approximant.
    """
    a, b = float(interval[0]), float(interval[1])
    if H < 1:
        raise DomainError("need H >= 1")
    if not (0.0 <= a <= b <= 1.0):
        raise DomainError("interval must satisfy 0 <= a <= b <= 1")
    saw = _sawtooth_coefficients(H)
    coeffs = {}
    for h in range(1, H + 1):
        factor = cmath.exp(-2j * math.pi * h * b) - cmath.exp(-2j * math.pi * h * a)
        coeffs[h] = saw[h] * factor
        coeffs[-h] = coeffs[h].conjugate()
    return TrigPolyApprox(left=a, right=b, H=H, coefficients=coeffs)


def fejer_majorant(H: int, x):
    """Normalized Fejer kernel (sin(pi(H+1)x) / ((H+1) sin(pi x)))^2.

    Value 1 at integers; nonnegative; integrates to 1/(H+1) over a period.
    """
    xs = np.asarray(x, dtype=np.float64)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(np.remainder(xs, 1.0))
    s = np.sin(np.pi * xs)
    num = np.sin(np.pi * (H + 1) * xs)
    tiny = np.abs(s) < 1e-300
    safe = np.where(tiny, 1.0, s)
    val = (num / ((H + 1) * safe)) ** 2
    val = np.where(tiny, 1.0, val)
    return float(val[0]) if scalar else val


def check_vaaler_error(interval: tuple[float, float], H: int,
                       grid) -> BoundReport:
    """Worst violation of |chi - chi*| <= majorant(x-a) + majorant(x-b).

    quantity is the max of (|chi - chi*| - majorant sum) over the grid; a
    nonpositive quantity (up to the 1e-12 slack bound) means the
    inequality held everywhere.
    """
    a, b = float(interval[0]), float(interval[1])
    xs = np.asarray(grid, dtype=np.float64)
    approx = vaaler_approx((a, b), H)
    frac = np.remainder(xs, 1.0)
    chi = ((frac >= a) & (frac < b)).astype(np.float64)
    err = np.abs(chi - approx.evaluate(xs))
    maj = fejer_majorant(H, xs - a) + fejer_majorant(H, xs - b)
    violation = float(np.max(err - maj))
    return BoundReport(
        name="indicator_approx_error",
        quantity=violation,
        bound=1e-12,
        parameters={"left": a, "right": b, "H": H, "grid_size": len(xs)},
    )


def recommended_interval_count(f: PseudoPolynomial, P: float, v: float) -> float:
    """Interval count q = P^(v / (2 ceil(t_d) (ceil(t_d)+1))) used by the
    minor-arc balancing step."""
    k = math.ceil(float(f.leading_exponent))
    return P ** (v / (2 * k * (k + 1)))


@dataclass(frozen=True)
class FloorDecomposition:
    """All measurable quantities of the indicator split of F(alpha).

    Per bin b (fractional part of f(m) in [b/B, (b+1)/B)):
      floor_sums[b]     sum of e(alpha floor(f(m))) over the bin,
      true_sums[b]      sum of e(alpha f(m))        over the bin,
      vaaler_sums[b]    sum of e(alpha f(m)) chi*_b({f(m)}),
      residual_sums[b]  sum of (chi_b - chi*_b)({f(m)})  (no phase),
      bin_counts[b]     #m in the bin.

    Bound shapes carried alongside:
      approx_bound[b]   (1/B)|sum e(alpha f)| + (1/pi) sum_h |sum e((alpha+h) f)| / |h|,
      residual_bound    (1/(H+1)) sum_{|h|<=H} (1-|h|/(H+1)) |sum e(h f(m))|,
      grouping_gap      |F(alpha) - sum_b e(-alpha b/B) true_sums[b]|  vs  P/B.
    """

    alpha: float
    B: int
    H: int
    P: int
    q_recommended: float
    F_alpha: complex
    floor_sums: np.ndarray
    true_sums: np.ndarray
    vaaler_sums: np.ndarray
    residual_sums: np.ndarray
    bin_counts: np.ndarray
    approx_bound: np.ndarray
    residual_bound: float
    grouping_gap: float
    grouping_shape: float

    def to_json(self, path_or_buf=None):
        def clist(arr):
            return [[z.real, z.imag] for z in np.asarray(arr, dtype=np.complex128)]

        doc = {
            "alpha": self.alpha, "B": self.B, "H": self.H, "P": self.P,
            "q_recommended": self.q_recommended,
            "F_alpha": [self.F_alpha.real, self.F_alpha.imag],
            "floor_sums": clist(self.floor_sums),
            "true_sums": clist(self.true_sums),
            "vaaler_sums": clist(self.vaaler_sums),
            "residual_sums": [float(x) for x in self.residual_sums],
            "bin_counts": [int(x) for x in self.bin_counts],
            "approx_bound": [float(x) for x in self.approx_bound],
            "residual_bound": self.residual_bound,
            "grouping_gap": self.grouping_gap,
            "grouping_shape": self.grouping_shape,
        }
        if path_or_buf is None:
            return json.dumps(doc, indent=2, sort_keys=True)
        if hasattr(path_or_buf, "write"):
            json.dump(doc, path_or_buf, indent=2, sort_keys=True)
            return None
        with open(path_or_buf, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
        return None


def floor_decomposition_terms(f: PseudoPolynomial, N: int, alpha: float,
                              B: int, H: int,
                              v: float | None = None) -> FloorDecomposition:
    """Measure the indicator decomposition of F(alpha) on the minor arc.

    At B = 1 the floor-phase bin sum reproduces F(alpha) from identical
    phase inputs.
    """
    if B < 1 or H < 1:
        raise DomainError("need B >= 1 and H >= 1")
    arc = ArcSetup.create(f, N, v)
    if arc.is_major(alpha):
        raise ArcMembershipError(f"alpha={alpha} is on the major arc")
    P = int(math.floor(arc.P))
    floors = floor_values(f, P)
    fvals = eval_array(f, np.arange(1, P + 1, dtype=np.float64))
    frac = np.clip(fvals - floors, 0.0, np.nextafter(1.0, 0.0))
    bins = np.minimum((frac * B).astype(np.int64), B - 1)

    floor_phase = np.exp(2j * np.pi * np.remainder(floors * float(alpha), 1.0))
    true_phase = np.exp(2j * np.pi * np.remainder(fvals * float(alpha), 1.0))
    F_alpha = complex(floor_phase.sum())

    floor_sums = np.zeros(B, dtype=np.complex128)
    true_sums = np.zeros(B, dtype=np.complex128)
    bin_counts = np.zeros(B, dtype=np.int64)
    for b in range(B):
        mask = bins == b
        # per-bin masked sums share the summation path with F(alpha)
        floor_sums[b] = floor_phase[mask].sum()
        true_sums[b] = true_phase[mask].sum()
        bin_counts[b] = int(mask.sum())

    # harmonics of the fractional parts, shared by chi* sums and residuals;
    # the alpha phase breaks h -> -h conjugate symmetry for E, not for G
    hs = np.arange(1, H + 1)
    E_pos = np.zeros(H + 1, dtype=np.complex128)  # sum e(alpha f(m)) e(+h {f(m)})
    E_neg = np.zeros(H + 1, dtype=np.complex128)  # sum e(alpha f(m)) e(-h {f(m)})
    G = np.zeros(H + 1, dtype=np.complex128)      # sum e(h {f(m)})
    for h in range(1, H + 1):
        osc = np.exp(2j * np.pi * np.remainder(h * frac, 1.0))
        E_pos[h] = (true_phase * osc).sum()
        E_neg[h] = (true_phase * np.conj(osc)).sum()
        G[h] = osc.sum()

    saw = _sawtooth_coefficients(H)
    vaaler_sums = np.zeros(B, dtype=np.complex128)
    residual_sums = np.zeros(B, dtype=np.float64)
    T0 = complex(true_phase.sum())
    for b in range(B):
        a_b, b_b = b / B, (b + 1) / B
        total_v = (1.0 / B) * T0
        total_g = (1.0 / B) * P
        for h in range(1, H + 1):
            factor = (cmath.exp(-2j * math.pi * h * b_b)
                      - cmath.exp(-2j * math.pi * h * a_b))
            coef = saw[h] * factor
            total_v += coef * E_pos[h] + coef.conjugate() * E_neg[h]
            total_g += coef * G[h] + coef.conjugate() * np.conj(G[h])
        vaaler_sums[b] = total_v
        residual_sums[b] = bin_counts[b] - total_g.real

    # bound shapes from the harmonic-shifted full sums
    base = abs(T0)
    shifted = np.zeros(H, dtype=np.float64)
    for i, h in enumerate(hs):
        up = np.exp(2j * np.pi * np.remainder((alpha + h) * fvals, 1.0)).sum()
        dn = np.exp(2j * np.pi * np.remainder((alpha - h) * fvals, 1.0)).sum()
        shifted[i] = abs(up) + abs(dn)
    approx_bound = np.full(B, base / B + (1.0 / math.pi) * float((shifted / hs).sum()))

    residual_bound = P / (H + 1.0)
    for h in range(1, H + 1):
        weight = (1.0 - h / (H + 1.0)) / (H + 1.0)
        hsum = abs(np.exp(2j * np.pi * np.remainder(h * fvals, 1.0)).sum())
        residual_bound += 2.0 * weight * hsum

    twiddles = np.exp(-2j * np.pi * float(alpha) * np.arange(B) / B)
    regrouped = complex((twiddles * true_sums).sum())
    grouping_gap = abs(F_alpha - regrouped)

    return FloorDecomposition(
        alpha=float(alpha), B=B, H=H, P=P,
        q_recommended=recommended_interval_count(f, arc.P, arc.v),
        F_alpha=F_alpha,
        floor_sums=floor_sums, true_sums=true_sums,
        vaaler_sums=vaaler_sums, residual_sums=residual_sums,
        bin_counts=bin_counts, approx_bound=approx_bound,
        residual_bound=float(residual_bound),
        grouping_gap=float(grouping_gap),
        grouping_shape=float(P / B),
    )
