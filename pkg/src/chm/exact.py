"""Exact linear algebra: rational row spaces and arithmetic in cyclotomic rings.

Ranks over Q(zeta_q) are bounded from below by reducing modulo a prime
``p = 1 (mod q)``, where ``zeta_q`` maps to a primitive q-th root of unity in
GF(p).  Kernel vectors lifted back to Q are then checked exactly in
Z[x]/Phi_q(x), which bounds the rank from above.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np


class RowSpace:
    """Row space over Q kept in reduced row echelon form (sparse rows)."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: dict[int, dict[int, Fraction]] = {}

    def copy(self) -> RowSpace:
        other = RowSpace(self.ncols)
        other._rows = {p: dict(r) for p, r in self._rows.items()}
        return other

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        row = {c: Fraction(v) for c, v in row.items() if v != 0}
        for p in sorted(set(row) & set(self._rows)):
            f = row.get(p)
            if not f:
                continue
            for c, v in self._rows[p].items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        return row

    def add(self, row: dict[int, Fraction] | Sequence) -> bool:
        """Add a row; returns True when the rank grew."""
        if not isinstance(row, dict):
            row = {c: v for c, v in enumerate(row) if v != 0}
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        f = row[p]
        row = {c: v / f for c, v in row.items()}
        for q, other in self._rows.items():
            g = other.get(p)
            if g:
                for c, v in row.items():
                    nv = other.get(c, 0) - g * v
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
        self._rows[p] = row
        return True

    def contains(self, row: dict[int, Fraction] | Sequence) -> bool:
        if not isinstance(row, dict):
            row = {c: v for c, v in enumerate(row) if v != 0}
        return not self.reduce(row)

    def pivots(self) -> list[int]:
        return sorted(self._rows)

    def key(self) -> tuple:
        """Canonical form: equal keys iff equal row spaces."""
        return tuple((p, tuple(sorted(self._rows[p].items()))) for p in sorted(self._rows))

    def rows(self) -> list[list[Fraction]]:
        out = []
        for p in sorted(self._rows):
            dense = [Fraction(0)] * self.ncols
            for c, v in self._rows[p].items():
                dense[c] = v
            out.append(dense)
        return out

    def nullspace(self) -> list[list[Fraction]]:
        """Basis of ``{x : r.x = 0 for all rows r}``, one vector per free column."""
        pivots = set(self._rows)
        basis = []
        for f in range(self.ncols):
            if f in pivots:
                continue
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for p, row in self._rows.items():
                g = row.get(f)
                if g:
                    v[p] = -g
            basis.append(v)
        return basis


def rational_rref_key(vectors: Iterable[Sequence]) -> tuple:
    """Canonical key of the span of ``vectors``."""
    vectors = list(vectors)
    space = RowSpace(len(vectors[0]) if vectors else 0)
    for v in vectors:
        space.add(v)
    return space.key()


# -- cyclotomic polynomials -------------------------------------------------

def _poly_divmod(a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    """Division of integer polynomials (coefficients low to high) by a monic b."""
    a = list(a)
    db = len(b) - 1
    if b[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(a) - 1 < db:
        return [0], a
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            q[k - db] = c
            for t in range(db + 1):
                a[k - db + t] -= c * b[t]
    rem = a[:db] if db > 0 else [0]
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod(num, list(cyclotomic_poly(d)))
            if any(rem):
                raise ArithmeticError("cyclotomic division left a remainder")
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def cyclotomic_is_zero(coeffs: Sequence[int], q: int) -> bool:
    """Whether ``sum coeffs[m] zeta_q^m`` vanishes (integer coefficients)."""
    _, rem = _poly_divmod(list(coeffs), list(cyclotomic_poly(q)))
    return not any(rem)


# -- modular arithmetic ------------------------------------------------------

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_one_mod(q: int, below: int = 2**31) -> Iterator[int]:
    """Primes ``p = 1 (mod q)`` in decreasing order below ``below``."""
    p = (below - 2) // q * q + 1
    while p > q:
        if _is_prime(p):
            yield p
        p -= q


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def root_of_unity_mod(q: int, p: int) -> int:
    """A primitive q-th root of unity in GF(p); requires q | p-1."""
    if (p - 1) % q:
        raise ValueError(f"{q} does not divide {p}-1")
    if q == 1:
        return 1
    factors = _prime_factors(q)
    for h in range(2, p):
        g = pow(h, (p - 1) // q, p)
        if all(pow(g, q // r, p) != 1 for r in factors):
            return g
    raise ArithmeticError("no primitive root found")


def rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p), p < 2**31."""
    A = np.array(A, dtype=np.int64) % p
    nrows, ncols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rational_reconstruct(a: int, p: int) -> Fraction | None:
    """The fraction n/d with |n|, d <= sqrt(p/2) congruent to a mod p, if any."""
    a %= p
    bound = math.isqrt(p // 2)
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1 > bound:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)
