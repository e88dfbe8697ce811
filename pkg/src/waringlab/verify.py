"""Bound-verification suite: one section per inequality family.

Each section measures a quantity, evaluates the corresponding bound
shape, and applies a trend/stability acceptance rule (implicit constants
are never pinned, only their stability is).  Sections return plain dicts
so the CLI can emit one JSON document per section; `run_suite` assembles
them in a fixed order for byte-reproducible output.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import expsum, majorarc, repcount, vaaler
from .expsum import PhaseFunction
from .majorarc import MainTermConvention
from .pseudopoly import PseudoPolynomial, largest_preimage, p_deviation

__all__ = ["SECTIONS", "run_suite"]

_F32 = PseudoPolynomial.parse("x^3/2")
_FQ = PseudoPolynomial.parse("x^2 + x^3/2")
_F52 = PseudoPolynomial.parse("x^5/2 + x")


def _fit_slope(xs, ys) -> float:
    xs = np.log(np.asarray(xs, dtype=np.float64))
    ys = np.log(np.asarray(ys, dtype=np.float64))
    return float(np.polyfit(xs, ys, 1)[0])


def section_preimage_deviation(tol: float = 1.0) -> dict:
    """|P - (N/a_d)^(1/t_d)| / P^(t_{d-1}-t_d+1) stays bounded in N."""
    Ns = np.unique(np.geomspace(1e3, 1e5, 7).astype(int))
    exponent = float(_FQ.terms[-2][1] - _FQ.terms[-1][1]) + 1.0
    ratios = []
    for N in Ns:
        P = largest_preimage(_FQ, int(N))
        ratios.append(abs(p_deviation(_FQ, int(N))) / P ** exponent)
    slope = _fit_slope(Ns, ratios)
    return {
        "pass": bool(slope <= 0.02 * tol),
        "polynomial": str(_FQ),
        "exponent": exponent,
        "N": [int(n) for n in Ns],
        "ratios": ratios,
        "fitted_slope": slope,
    }


def section_v_envelope(tol: float = 1.0) -> dict:
    """sup |V| / min(P, |alpha|^(-1/t_d)) shows no growth across N."""
    grid = np.concatenate([np.linspace(-0.5, 0.5, 201),
                           np.geomspace(1e-6, 0.5, 100)])
    sups = []
    Ns = [10 ** 3, 10 ** 4, 10 ** 5]
    for N in Ns:
        sups.append(majorarc.check_V_bound(_F32, N, grid).ratio)
    ok = all(sups[i + 1] <= sups[i] * (1.05 * tol) for i in range(len(sups) - 1))
    return {"pass": bool(ok), "polynomial": str(_F32), "N": Ns, "sup_ratios": sups}


def section_f_vs_v(tol: float = 1.0) -> dict:
    """|F - V| stays within its major-arc envelope across N.

    The envelope exponent is max(v, t_{d-1} - t_d + 1 + v): when the
    exponent gap exceeds 1 the bare power decays while |F - V| keeps an
    O(1) floor (fractional-part of P plus the Euler-Maclaurin constant of
    the smooth sum), so the partial-summation estimate's max(1, .) branch
    is the honest yardstick.
    """
    cases = [(_F32, [10 ** 3, 10 ** 4, 10 ** 5]), (_F52, [10 ** 3, 10 ** 4])]
    rows = []
    for f, Ns in cases:
        maxima = []
        for N in Ns:
            from .pseudopoly import ArcSetup
            arc = ArcSetup.create(f, N)
            alphas = [0.0, 1.0 / (4 * arc.tau), 1.0 / (2 * arc.tau)]
            worst = 0.0
            for a in alphas:
                rep = majorarc.compare_F_V(f, N, a)
                exp_corr = max(rep.parameters["v"], rep.parameters["exponent"])
                worst = max(worst, rep.quantity / rep.parameters["P"] ** exp_corr)
            maxima.append(worst)
        slope = _fit_slope(Ns, maxima)
        rows.append({"polynomial": str(f), "N": Ns, "max_ratios": maxima,
                     "fitted_slope": slope})
    ok = all(r["fitted_slope"] <= 0.05 * tol for r in rows)
    return {"pass": bool(ok), "cases": rows}


def section_singular_identity(tol: float = 1.0) -> dict:
    """Full-period quadrature of V^s e(-aN) equals the composition sum."""
    rows = []
    for f in (_F32, _FQ):
        for s in (2, 3):
            for N in (100, 500):
                q = majorarc.singular_integral_quadrature(f, s, N, 0.5)
                ej = majorarc.exact_Js(f, s, N)
                rel = abs(q.value - ej) / abs(ej)
                rows.append({"polynomial": str(f), "s": s, "N": N,
                             "quadrature": [q.value.real, q.value.imag],
                             "exact": ej, "rel_err": rel})
    ok = all(r["rel_err"] <= 1e-6 * tol for r in rows)
    return {"pass": bool(ok), "cases": rows}


def section_tail_truncation(tol: float = 1.0) -> dict:
    """|J - J*| against P^(s - t_d - delta2), delta2 = v(s/t_d - 1)."""
    from .pseudopoly import ArcSetup
    s = 3
    rows = []
    for N in (200, 400):
        arc = ArcSetup.create(_F32, N)
        t_d = float(_F32.leading_exponent)
        if not s > t_d:
            raise ValueError("tail comparison requires s > t_d")
        J = majorarc.singular_integral_quadrature(_F32, s, N, 0.5)
        Jstar = majorarc.singular_integral_quadrature(_F32, s, N, 1.0 / arc.tau)
        delta2 = arc.v * (s / t_d - 1.0)
        bound = arc.P ** (s - t_d - delta2)
        gap = abs(J.value - Jstar.value)
        rows.append({"N": N, "P": arc.P, "gap": gap, "bound": bound,
                     "ratio": gap / bound})
    ok = all(r["ratio"] <= 10.0 * tol for r in rows)
    return {"pass": bool(ok), "s": s, "polynomial": str(_F32), "cases": rows}


def section_beta_gamma_identity(tol: float = 1.0) -> dict:
    """Power-sum vs Beta-function closed form: residual is O(N^(alpha-1))."""
    pairs = [(0.5, 0.5), (1.0, 0.5), (2.0, 0.5), (1.0, 1.0), (1.5, 0.75)]
    Ns = [10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5]
    rows = []
    for a, b in pairs:
        residuals = []
        for N in Ns:
            exact, gamma_val = majorarc.nathanson_sum(a, b, N)
            residuals.append(abs(exact - gamma_val) / N ** (a - 1.0))
        slope = _fit_slope(Ns, residuals)
        rows.append({"alpha": a, "beta": b, "residual_ratios": residuals,
                     "fitted_slope": slope})
    ok = all(r["fitted_slope"] <= 0.05 * tol for r in rows)
    return {"pass": bool(ok), "N": Ns, "cases": rows}


def section_convention_adjudication(tol: float = 1.0) -> dict:
    """Exactly one Gamma-denominator convention matches the composition sum."""
    N = 10 ** 5
    rows = []
    for s in (2, 3, 4):
        ej = majorarc.exact_Js(_F32, s, N)
        err = {}
        for conv in MainTermConvention:
            mt = majorarc.gamma_main_term(_F32, s, N, conv)
            err[conv.name] = abs(ej / mt - 1.0)
        rows.append({"s": s, "errors": err})
    winner_ok = all(r["errors"]["GAMMA_S_OVER_THETA"] < 0.02 * tol for r in rows)
    loser_ok = all(r["errors"]["GAMMA_S_PLUS_ONE_OVER_THETA"] > 0.05 for r in rows)
    return {"pass": bool(winner_ok and loser_ok), "N": N,
            "winning_convention": "GAMMA_S_OVER_THETA", "cases": rows}


def section_indicator_approximation(tol: float = 1.0) -> dict:
    """Indicator-approximant error never exceeds the Fejer majorant."""
    rng = np.random.default_rng(20260810)
    grid = np.linspace(0.0, 1.0, 2000, endpoint=False) + 0.5 / 2000
    worst = -math.inf
    checks = 0
    for _ in range(6):
        a, b = sorted(rng.uniform(0.0, 1.0, 2))
        for H in (4, 16, 64):
            rep = vaaler.check_vaaler_error((a, b), H, grid)
            worst = max(worst, rep.quantity)
            checks += 1
    return {"pass": bool(worst <= 1e-12 * tol), "checks": checks,
            "worst_violation": worst}


def _kl_curved_max(scale: int) -> float:
    worst = 0.0
    for a in np.linspace(0.08, 0.42, 20):
        beta = a / (1.5 * scale ** 0.5)
        g = PhaseFunction.from_poly(_F32, beta)
        lo_d = g.derivative(1).value(scale + 1)
        hi_d = g.derivative(1).value(2 * scale)
        lam = min(lo_d, 1.0 - hi_d)
        S = abs(expsum.weyl_sum(g, scale + 1, 2 * scale))
        worst = max(worst, S * lam)
    return worst


def section_monotone_phase_bound(tol: float = 1.0) -> dict:
    """Slow-phase sums: sharp linear check and curved-phase stability."""
    import random
    rng = random.Random(42)
    linear_worst = 0.0
    for _ in range(20):
        lam = rng.uniform(0.05, 0.45)
        beta = rng.uniform(lam, 1.0 - lam)
        L = rng.randint(50, 5000)
        g = PhaseFunction.from_terms([(beta, 1)])
        linear_worst = max(linear_worst, abs(expsum.weyl_sum(g, 1, L)) * lam)
    base, scaled = _kl_curved_max(1024), _kl_curved_max(4096)
    growth = scaled / base
    return {
        "pass": bool(linear_worst <= 2.0 and growth < 1.10 * tol),
        "linear_worst": linear_worst,
        "curved_max_base": base,
        "curved_max_4x": scaled,
        "growth_factor": growth,
    }


def _vdc_max(scale: int) -> float:
    worst = 0.0
    for p in np.linspace(-1.4, -0.6, 20):
        beta = float(scale) ** p
        g = PhaseFunction.from_poly(_F32, beta)
        d2 = g.derivative(2)
        lam = abs(d2.value(2 * scale))
        eta = abs(d2.value(scale + 1)) / lam
        S = abs(expsum.weyl_sum(g, scale + 1, 2 * scale))
        worst = max(worst, S / expsum.van_der_corput_bound(scale, lam, eta))
    return worst


def section_curvature_bound(tol: float = 1.0) -> dict:
    """Second-derivative sums: measured/bound ratio stable under 4x scale."""
    base, scaled = _vdc_max(1024), _vdc_max(4096)
    growth = scaled / base
    return {"pass": bool(growth < 1.10 * tol), "max_base": base,
            "max_4x": scaled, "growth_factor": growth}


def section_fractional_part_count(tol: float = 1.0) -> dict:
    """Counting small fractional parts against (N c delta + 1)(2D + 1)."""
    del tol  # the inequality is exact, nothing to scale
    rows = []
    rep = expsum.fractional_count_check(lambda n: n * 1e-3, 1, 100, 1e-3, 1.0, 1.0)
    rows.append({"phi": "n*1e-3", "count": rep.quantity, "bound": rep.bound})
    f3 = PseudoPolynomial.parse("x^3 + x^3/2")
    g = PhaseFunction.from_poly(f3, 2.0 ** -11)
    a2 = g.derivative(2)
    phi = lambda n: a2.value(n) / 2.0
    diffs = [phi(n + 1) - phi(n) for n in range(256, 256 + 127)]
    delta, c = min(diffs), max(diffs) / min(diffs)
    rep = expsum.fractional_count_check(phi, 256, 128, delta, c * (1 + 1e-9), 2.0)
    rows.append({"phi": "second-derivative ladder", "count": rep.quantity,
                 "bound": rep.bound})
    rep = expsum.fractional_count_check(lambda n: 0.01 * n + 0.3, 10, 50, 0.01, 1.0, 3.0)
    rows.append({"phi": "0.01n+0.3", "count": rep.quantity, "bound": rep.bound})
    ok = all(r["count"] <= r["bound"] for r in rows)
    return {"pass": bool(ok), "cases": rows}


def section_mean_value_count(tol: float = 1.0) -> dict:
    """Exact solution counts and their mean-value growth exponents."""
    identities = []
    for k in (1, 2, 3):
        for N in (10, 100):
            cnt = expsum.vinogradov_integral(1, k, N).count
            identities.append({"s": 1, "k": k, "N": N, "count": cnt, "ok": cnt == N})
    j213 = expsum.vinogradov_integral(2, 1, 3).count
    identities.append({"s": 2, "k": 1, "N": 3, "count": j213, "ok": j213 == 19})
    slopes = []
    Ns = [8, 12, 16, 24, 32]
    for s in (2, 3):
        for k in (2, 3):
            counts = [expsum.vinogradov_integral(s, k, N).count for N in Ns]
            slope = _fit_slope(Ns, counts)
            limit = max(s, 2 * s - k * (k + 1) // 2) + 0.8
            slopes.append({"s": s, "k": k, "counts": counts,
                           "fitted_slope": slope, "limit": limit,
                           "ok": slope <= limit * tol})
    ok = all(r["ok"] for r in identities) and all(r["ok"] for r in slopes)
    return {"pass": bool(ok), "identities": identities, "slopes": slopes}


def section_minor_arc_sup(tol: float = 1.0) -> dict:
    """sup |F| over sampled minor-arc points vs P^(1 - v/(2k(k+1)))."""
    ratios = []
    Ps = [2 ** 10, 2 ** 12]
    for P in Ps:
        N = int(P ** 1.5)
        rep = expsum.minor_arc_sup(_F32, N, 300)
        ratios.append(rep.ratio)
    ok = all(ratios[i + 1] <= ratios[i] * 1.25 * tol for i in range(len(ratios) - 1))
    return {"pass": bool(ok), "P": Ps, "ratios": ratios}


def section_oracle_equivalence(tol: float = 1.0) -> dict:
    """NTT+CRT convolution counts equal brute-force enumeration counts."""
    del tol
    rows = []
    for literal in ("x^3/2", "x"):
        f = PseudoPolynomial.parse(literal)
        c = repcount.counts_vector(f, 80)
        ok = True
        for s in (1, 2, 3):
            table = repcount.rep_count_exact(c, s, 80)
            for N in range(1, 81):
                if int(table.values[N]) != repcount.rep_count_bruteforce(f, s, N):
                    ok = False
        rows.append({"polynomial": literal, "ok": ok})
    return {"pass": all(r["ok"] for r in rows), "cases": rows}


SECTIONS = {
    "preimage_deviation": section_preimage_deviation,
    "v_envelope": section_v_envelope,
    "f_vs_v": section_f_vs_v,
    "singular_identity": section_singular_identity,
    "tail_truncation": section_tail_truncation,
    "beta_gamma_identity": section_beta_gamma_identity,
    "convention_adjudication": section_convention_adjudication,
    "indicator_approximation": section_indicator_approximation,
    "monotone_phase_bound": section_monotone_phase_bound,
    "curvature_bound": section_curvature_bound,
    "fractional_part_count": section_fractional_part_count,
    "mean_value_count": section_mean_value_count,
    "minor_arc_sup": section_minor_arc_sup,
    "oracle_equivalence": section_oracle_equivalence,
}


def run_suite(only: str | None = None, tolerance_scale: float = 1.0,
              jobs: int = 1) -> dict:
    """Run the suite (or a single section); deterministic section order."""
    names = list(SECTIONS)
    if only is not None:
        if only not in SECTIONS:
            raise KeyError(f"unknown section {only!r}; have {names}")
        names = [only]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {name: pool.submit(SECTIONS[name], tolerance_scale)
                       for name in names}
            results = {name: futures[name].result() for name in names}
    else:
        results = {name: SECTIONS[name](tolerance_scale) for name in names}
    return {
        "sections": results,
        "pass": all(r["pass"] for r in results.values()),
    }
