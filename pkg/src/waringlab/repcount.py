"""Exact representation counting.

The count vector c_m = #{n >= 1 : floor(f(n)) = m} is the exact
fingerprint of f; the number of representations

    r_{f,s}(N) = #{(n_1, ..., n_s) : floor(f(n_1)) + ... + floor(f(n_s)) = N}

is its s-fold convolution power, which this module computes exactly
(NTT + CRT, see :mod:`waringlab.ntt`) and cross-checks by direct nested
enumeration.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import ntt
from .pseudopoly import (DomainError, PseudoPolynomial, floor_eval,
                         floor_values_window, _monotone_from)

__all__ = [
    "BudgetError",
    "CountsVector",
    "RepTable",
    "counts_vector",
    "rep_count_exact",
    "rep_count_bruteforce",
    "unrepresentable",
]


class BudgetError(RuntimeError):
    """Requested computation exceeds the combinatorial budget guard."""


@dataclass(frozen=True)
class CountsVector:
    """Histogram counts[m] = #{n : floor(f(n)) = m} for m = 0..n_max."""

    n_max: int
    counts: np.ndarray
    source: str
    generator_range: int

    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self, path_or_buf) -> None:
        _write_csv(path_or_buf, ("m", "c"),
                   ((m, int(c)) for m, c in enumerate(self.counts)))

    @staticmethod
    def read_csv(path_or_buf) -> tuple[np.ndarray, np.ndarray]:
        return _read_csv(path_or_buf, ("m", "c"))


@dataclass(frozen=True)
class RepTable:
    """values[N] = r_{f,s}(N) for N = 0..n_max, with exactness certificate."""

    s: int
    n_max: int
    values: np.ndarray
    primes: tuple[tuple[int, int], ...]
    entry_bound: int = 0

    def to_csv(self, path_or_buf) -> None:
        _write_csv(path_or_buf, ("N", "r"),
                   ((n, int(v)) for n, v in enumerate(self.values)))

    @staticmethod
    def read_csv(path_or_buf) -> tuple[np.ndarray, np.ndarray]:
        return _read_csv(path_or_buf, ("N", "r"))


def _write_csv(path_or_buf, header, rows):
    if hasattr(path_or_buf, "write"):
        w = csv.writer(path_or_buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    with open(path_or_buf, "w", newline="") as fh:
        _write_csv(fh, header, rows)


def _read_csv(path_or_buf, header):
    if hasattr(path_or_buf, "read"):
        fh = path_or_buf
        rows = list(csv.reader(fh))
    else:
        with open(path_or_buf, newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != tuple(header):
        raise ValueError(f"expected CSV header {header}, got {rows[:1]}")
    xs = np.array([int(r[0]) for r in rows[1:]], dtype=np.int64)
    ys = np.array([int(r[1]) for r in rows[1:]], dtype=np.int64)
    return xs, ys


def counts_vector(f: PseudoPolynomial, n_max: int) -> CountsVector:
    """Exact histogram of floor(f(n)) over all n with floor(f(n)) <= n_max."""
    f1 = floor_eval(f, 1)
    if f1 < 1:
        raise DomainError("counting requires f(1) >= 1 (floor values start at 1)")
    if n_max < f1:
        raise DomainError(f"n_max={n_max} is below floor(f(1))={f1}")

    counts = np.zeros(n_max + 1, dtype=np.int64)
    x0 = _monotone_from(f)
    generator_range = 0
    n = 1
    chunk = 1024
    while True:
        floors = floor_values_window(f, n, n + chunk - 1)
        keep = floors <= n_max
        sel = np.nonzero(keep)[0]
        if len(sel):
            idx = floors[sel]
            np.add.at(counts, idx, 1)
            generator_range = n + int(sel[-1])
        # stop once past the monotone threshold with the whole chunk overflowing
        if n > x0 and not keep.any():
            break
        if n > 10 ** 8:
            raise BudgetError("count enumeration exceeded 1e8 values")
        n += chunk
    return CountsVector(n_max=n_max, counts=counts, source=str(f),
                        generator_range=generator_range)


def rep_count_exact(c: CountsVector, s: int, n_max: int | None = None,
                    primes=ntt.PRIME_SET_A) -> RepTable:
    """Exact s-fold convolution power of the count vector, truncated.

    Entries are certified against the prime product at every
    multiplication stage; :class:`waringlab.ntt.PrimeSetError` otherwise.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if n_max is None:
        n_max = c.n_max
    if n_max > c.n_max:
        raise ValueError(f"n_max={n_max} exceeds the count vector's {c.n_max}")
    values, worst = ntt.power_trunc_exact(c.counts, s, n_max, primes=primes)
    if len(values) < n_max + 1:
        pad = np.zeros(n_max + 1 - len(values), dtype=values.dtype)
        values = np.concatenate([values, pad])
    return RepTable(s=s, n_max=n_max, values=values,
                    primes=tuple(primes), entry_bound=worst)


def rep_count_bruteforce(f: PseudoPolynomial, s: int, N: int) -> int:
    """Reference count by nested enumeration with budget pruning.

    Guarded to s <= 4 and N <= 1e4; the innermost level is a multiplicity
    lookup, the outer levels range over attainable floor values pruned by
    the remaining budget.
    """
    if s > 4 or N > 10 ** 4:
        raise BudgetError("brute force guarded to s <= 4, N <= 1e4")
    if s < 1 or N < 0:
        raise ValueError("need s >= 1 and N >= 0")
    mult = _floor_multiplicities(f, N)
    if not mult:
        return 0
    vals = sorted(mult)
    v_min = vals[0]

    def count(depth: int, budget: int) -> int:
        if depth == 1:
            return mult.get(budget, 0)
        total = 0
        cap = budget - (depth - 1) * v_min
        for v in vals:
            if v > cap:
                break
            total += mult[v] * count(depth - 1, budget - v)
        return total

    return count(s, N)


def _floor_multiplicities(f: PseudoPolynomial, n_max: int) -> dict[int, int]:
    f1 = floor_eval(f, 1)
    if f1 < 1:
        raise DomainError("counting requires f(1) >= 1")
    mult: Counter[int] = Counter()
    x0 = _monotone_from(f)
    n = 1
    while True:
        v = floor_eval(f, n)
        if v <= n_max:
            mult[v] += 1
        elif n > x0:
            break
        n += 1
        if n > 10 ** 7:
            raise BudgetError("floor enumeration exceeded 1e7 values")
    return dict(mult)


def unrepresentable(f: PseudoPolynomial, s: int, lo: int, hi: int,
                    primes=ntt.PRIME_SET_A) -> list[int]:
    """All N in [lo, hi] with r_{f,s}(N) = 0."""
    if lo < 0 or hi < lo:
        raise ValueError("need 0 <= lo <= hi")
    c = counts_vector(f, hi)
    table = rep_count_exact(c, s, hi, primes=primes)
    vals = table.values
    return [n for n in range(lo, hi + 1) if int(vals[n]) == 0]
