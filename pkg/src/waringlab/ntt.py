"""Exact integer convolution: number-theoretic transforms + CRT.

All convolutions of count vectors must be integer-exact; float FFT
rounding is ruled out at desk scale (entries reach ~1e16).  Work is done
modulo NTT-friendly primes below 2^31 so that products of residues fit
int64 and every stage vectorizes in numpy, then results are recombined
with the Chinese Remainder Theorem.  Every public entry point checks an
entry-size bound against the prime-set product and refuses to return a
possibly-wrapped result.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PrimeSetError",
    "PRIME_SET_A",
    "PRIME_SET_B",
    "PRIME_POOL",
    "ntt",
    "conv_mod",
    "conv_exact",
    "power_trunc_exact",
]

# (p, primitive root); p = c * 2^k + 1 with k large enough for desk-scale
# transforms.  Residue products stay below 2^62, so int64 arithmetic is
# exact throughout.
PRIME_SET_A: tuple[tuple[int, int], ...] = (
    (2013265921, 31),   # 15 * 2^27 + 1
    (998244353, 3),     # 119 * 2^23 + 1
)
PRIME_SET_B: tuple[tuple[int, int], ...] = (
    (1811939329, 13),   # 27 * 2^26 + 1
    (469762049, 3),     # 7 * 2^26 + 1
)
_PRIME_EXTRAS: tuple[tuple[int, int], ...] = (
    (2113929217, 5),    # 63 * 2^25 + 1
    (754974721, 11),    # 45 * 2^24 + 1
    (167772161, 3),     # 5 * 2^25 + 1
)
PRIME_POOL = PRIME_SET_A + PRIME_SET_B + _PRIME_EXTRAS


class PrimeSetError(RuntimeError):
    """The prime set cannot certify an exact (unwrapped) convolution."""


def _max_transform_length(p: int) -> int:
    k = 1
    while (p - 1) % (2 * k) == 0:
        k *= 2
    return k


def _bitrev_indices(n: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    bits = n.bit_length() - 1
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


_REV_CACHE: dict[int, np.ndarray] = {}


def ntt(a: np.ndarray, p: int, g: int, inverse: bool = False) -> np.ndarray:
    """In-order radix-2 transform of an int64 array mod p (length 2^k)."""
    n = len(a)
    if n & (n - 1):
        raise ValueError("transform length must be a power of two")
    if (p - 1) % n:
        raise PrimeSetError(f"prime {p} does not support length-{n} transforms")
    if n not in _REV_CACHE:
        _REV_CACHE[n] = _bitrev_indices(n)
    a = a[_REV_CACHE[n]].copy()
    root = pow(g, (p - 1) // n, p)
    if inverse:
        root = pow(root, p - 2, p)
    length = 2
    while length <= n:
        wl = pow(root, n // length, p)
        half = length // 2
        # twiddle powers 1, wl, ..., wl^(half-1), built by doubling
        pows = np.ones(1, dtype=np.int64)
        acc = wl
        while len(pows) < half:
            pows = np.concatenate([pows, (pows * acc) % p])
            acc = (acc * acc) % p
        pows = pows[:half]
        blocks = a.reshape(-1, length)
        u = blocks[:, :half].copy()
        v = (blocks[:, half:] * pows) % p
        blocks[:, :half] = (u + v) % p
        blocks[:, half:] = (u - v) % p
        length *= 2
    if inverse:
        a = (a * pow(n, p - 2, p)) % p
    return a


def conv_mod(a: np.ndarray, b: np.ndarray, p: int, g: int) -> np.ndarray:
    """Full linear convolution of nonnegative int64 arrays, mod p."""
    out_len = len(a) + len(b) - 1
    size = 1
    while size < out_len:
        size *= 2
    if size > _max_transform_length(p):
        raise PrimeSetError(f"prime {p} supports transforms only up to "
                            f"{_max_transform_length(p)}, need {size}")
    fa = np.zeros(size, dtype=np.int64)
    fb = np.zeros(size, dtype=np.int64)
    fa[:len(a)] = a % p
    fb[:len(b)] = b % p
    if a is b:
        A = ntt(fa, p, g)
        C = (A * A) % p
    else:
        C = (ntt(fa, p, g) * ntt(fb, p, g)) % p
    return ntt(C, p, g, inverse=True)[:out_len]


def _crt_pair(r1: np.ndarray, p1: int, r2: np.ndarray, p2: int) -> np.ndarray:
    """CRT for two residue vectors; result < p1*p2 < 2^62, exact in int64."""
    inv = pow(p1, p2 - 2, p2)
    t = ((r2 - r1) % p2 * inv) % p2
    return r1 + p1 * t


def _crt_many(residues: list[np.ndarray], primes: list[int]):
    """CRT over arbitrarily many primes; falls back to Python ints when the
    modulus product leaves int64 range."""
    prod = 1
    for p in primes:
        prod *= p
    if len(primes) == 1:
        return residues[0].copy()
    if len(primes) == 2 and prod < 2 ** 62:
        return _crt_pair(residues[0], primes[0], residues[1], primes[1])
    # generic slow path, exact big-int arithmetic
    n = len(residues[0])
    out = [0] * n
    for r, p in zip(residues, primes):
        q = prod // p
        inv = pow(q % p, p - 2, p)
        coef = q * inv
        rl = r.tolist()
        for i in range(n):
            out[i] = (out[i] + rl[i] * coef) % prod
    return out


def conv_exact(a, b, limit: int | None, primes=PRIME_SET_A):
    """Exact truncated convolution of nonnegative integer vectors.

    The entry bound min(sum(a)*max(b), sum(b)*max(a)) must stay below the
    prime product, else :class:`PrimeSetError`; the returned pair is
    (values, entry_bound) so callers can accumulate a certificate.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    sa, ma = int(a.sum()), int(a.max(initial=0))
    sb, mb = int(b.sum()), int(b.max(initial=0))
    bound = min(sa * mb, sb * ma) if (sa and sb) else 0
    prod = 1
    for p, _ in primes:
        prod *= p
    if bound >= prod:
        raise PrimeSetError(
            f"entry bound {bound} >= prime product {prod}: add primes")
    residues = [conv_mod(a, b, p, g) for p, g in primes]
    values = _crt_many(residues, [p for p, _ in primes])
    if isinstance(values, np.ndarray):
        if limit is not None:
            values = values[:limit + 1]
        return values.astype(np.int64), bound
    if limit is not None:
        values = values[:limit + 1]
    return np.array(values, dtype=object), bound


def power_trunc_exact(c, s: int, limit: int, primes=PRIME_SET_A):
    """c convolved with itself s times (s >= 1), truncated to index limit.

    Exponentiation by squaring; every multiplication is CRT-certified.
    Returns (values, worst_entry_bound).
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    base = np.asarray(c, dtype=np.int64)[:limit + 1]
    result = None
    worst = 0
    e = s
    while e:
        if e & 1:
            if result is None:
                result = base.copy()
            else:
                result, bound = conv_exact(result, base, limit, primes)
                worst = max(worst, bound)
        e >>= 1
        if e:
            base, bound = conv_exact(base, base, limit, primes)
            worst = max(worst, bound)
    return result, worst
