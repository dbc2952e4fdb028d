"""Predicates and invariants of complex Hadamard matrices."""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .core import (EPS_EQUIV, EPS_UNIMOD, DiagonalPhase, EquivalenceWitness, HadamardMatrix, Meta,
                   PermutationVector, PhaseValue, apply_equivalence, phase_to_complex)
from .exact import (cyclotomic_is_zero, primes_one_mod, rational_reconstruct, root_of_unity_mod,
                    rref_mod_p)

SVD_RELATIVE_THRESHOLD = 1e-9
DEFAULT_CLUSTER_TOL = 1e-8
DEFAULT_SEARCH_BUDGET = 10**7


class NotHadamardError(ValueError):
    pass


def _array(M) -> np.ndarray:
    if isinstance(M, HadamardMatrix):
        return M.values
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _matrix(M) -> HadamardMatrix:
    return M if isinstance(M, HadamardMatrix) else HadamardMatrix(M)


# -- Hadamard property -------------------------------------------------------

@dataclass(frozen=True)
class HadamardReport:
    passed: bool
    unimodular_deviation: float
    gram_deviation: float
    tol: float
    eps_unimod: float

    def __bool__(self) -> bool:
        return self.passed


def is_hadamard(M, tol: float | None = None, eps_unimod: float = EPS_UNIMOD) -> HadamardReport:
    """Check unimodularity and ``M M^dagger = N I``; default ``tol = 1e-10 N``."""
    V = _array(M)
    n = V.shape[0]
    if tol is None:
        tol = 1e-10 * n
    unimod = float(np.max(np.abs(np.abs(V) - 1.0)))
    gram = float(np.max(np.abs(V @ V.conj().T - n * np.eye(n))))
    return HadamardReport(unimod <= eps_unimod and gram <= tol, unimod, gram, tol, eps_unimod)


# -- dephasing and log-phases ------------------------------------------------

class Dephasing(NamedTuple):
    d_r: DiagonalPhase
    d_c: DiagonalPhase
    h: HadamardMatrix


def dephase(M) -> Dephasing:
    """Diagonals ``D_r, D_c`` and the dephased ``H = D_r M D_c``.

    ``D_r = diag(conj M_11, ..., conj M_N1)`` and
    ``D_c = diag(1, M_11 conj M_12, ..., M_11 conj M_1N)``.
    """
    M = _matrix(M)
    n = M.n
    d_r = DiagonalPhase(tuple(-M.phase(i, 0) for i in range(n)))
    d_c = DiagonalPhase((PhaseValue.zero(),) + tuple(M.phase(0, 0) - M.phase(0, j) for j in range(1, n)))
    V = M.values
    # summing angles keeps symmetric input bitwise symmetric (vectorized complex
    # products may use fused multiply-add, which is not commutative)
    if np.all(V[0] == 1) and np.all(V[:, 0] == 1):
        values = V.copy()
    else:
        ang = np.angle(V)
        values = np.exp(1j * ((ang + ang[0, 0]) - (ang[:, :1] + ang[0:1, :])))
    turns = None
    if M.turns is not None:
        grid = []
        for i in range(n):
            row = []
            for j in range(n):
                parts = (M.turns[i][j], M.turns[i][0], M.turns[0][0], M.turns[0][j])
                if any(t is None for t in parts):
                    row.append(None)
                else:
                    t = (parts[0] - parts[1] + parts[2] - parts[3]) % 1
                    values[i, j] = phase_to_complex(PhaseValue(turns=t))
                    row.append(t)
            grid.append(row)
        turns = grid
    else:
        turns = [[None] * n for _ in range(n)]
    for k in range(n):
        values[0, k] = values[k, 0] = 1.0
        turns[0][k] = turns[k][0] = Fraction(0)
    meta = Meta(M.meta.name, M.meta.params, M.meta.trace + ("dephase",))
    return Dephasing(d_r, d_c, HadamardMatrix(values, tuple(map(tuple, turns)), meta))


@dataclass(frozen=True)
class LogPhaseMatrix:
    """Phases ``Phi`` with ``H_kl = exp(i Phi_kl)``, each in ``[0, 2 pi)``."""

    phases: tuple[tuple[PhaseValue, ...], ...]

    @property
    def n(self) -> int:
        return len(self.phases)

    def radians(self) -> np.ndarray:
        return np.array([[p.angle for p in row] for row in self.phases])

    def turns(self) -> np.ndarray:
        return np.array([[p.turns_float for p in row] for row in self.phases])

    def integer_matrix(self, q: int, tol: float = 1e-9) -> np.ndarray:
        """``q Phi / 2 pi`` as integers in ``0..q-1``; raises if not integral."""
        out = np.zeros((self.n, self.n), dtype=int)
        for i, row in enumerate(self.phases):
            for j, p in enumerate(row):
                if p.is_exact:
                    x = p.turns * q
                    if x.denominator != 1:
                        raise ValueError(f"phase {p} at ({i},{j}) is not a multiple of 1/{q} turn")
                    out[i, j] = int(x) % q
                else:
                    x = p.turns_float * q
                    k = round(x)
                    if abs(x - k) > tol:
                        raise ValueError(f"phase at ({i},{j}) is not a multiple of 1/{q} turn")
                    out[i, j] = k % q
        return out


def log_phases(M) -> LogPhaseMatrix:
    M = _matrix(M)
    return LogPhaseMatrix(tuple(tuple(row) for row in M.phases()))


# -- defect ------------------------------------------------------------------

@dataclass(frozen=True)
class DefectReport:
    defect: int
    kernel_basis: tuple[np.ndarray, ...]
    singular_values: np.ndarray
    threshold: float
    method: str
    svd_defect: int
    exact_basis: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = None

    def __int__(self) -> int:
        return self.defect


def _pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def orthogonality_system(M) -> np.ndarray:
    """Real rows of ``sum_k M_ik conj(M_jk) (R_ik - R_jk) = 0`` over the N*N unknowns ``R``."""
    V = _array(M)
    n = V.shape[0]
    rows = []
    for i, j in _pairs(n):
        c = V[i] * np.conj(V[j])
        re = np.zeros((n, n))
        im = np.zeros((n, n))
        re[i], re[j] = c.real, -c.real
        im[i], im[j] = c.imag, -c.imag
        rows.append(re.ravel())
        rows.append(im.ravel())
    return np.array(rows).reshape(-1, n * n)


def dephasing_rows(n: int) -> np.ndarray:
    """Rows fixing ``R_1j = 0`` for all j and ``R_i1 = 0`` for i >= 2."""
    rows = []
    for j in range(n):
        e = np.zeros((n, n))
        e[0, j] = 1.0
        rows.append(e.ravel())
    for i in range(1, n):
        e = np.zeros((n, n))
        e[i, 0] = 1.0
        rows.append(e.ravel())
    return np.array(rows)


def defect_system(M) -> np.ndarray:
    V = _array(M)
    return np.vstack([dephasing_rows(V.shape[0]), orthogonality_system(V)])


def trivial_kernel_basis(n: int) -> list[np.ndarray]:
    """The 2N-1 phase shifts of whole rows and whole columns (rows 1..N, columns 2..N)."""
    basis = []
    for i in range(n):
        R = np.zeros((n, n))
        R[i, :] = 1.0
        basis.append(R)
    for j in range(1, n):
        R = np.zeros((n, n))
        R[:, j] = 1.0
        basis.append(R)
    return basis


def _svd_kernel(A: np.ndarray) -> tuple[int, np.ndarray, float, np.ndarray]:
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    tau = SVD_RELATIVE_THRESHOLD * (s[0] if s.size else 0.0) * max(A.shape)
    rank = int(np.sum(s > tau))
    return rank, s, tau, vh[rank:]


def exact_defect(M: HadamardMatrix, attempts: int = 4):
    """Defect of a matrix with rational phases, certified exactly.

    Returns ``(defect, basis)`` with rational kernel basis matrices, or None
    when the matrix has inexact phases or the kernel is not defined over Q.
    """
    if not isinstance(M, HadamardMatrix) or not M.is_exact:
        return None
    n = M.n
    if n == 1:
        return 0, []
    q = 1
    for row in M.turns:
        for t in row:
            q = q * t.denominator // math.gcd(q, t.denominator)
    E = [[int(t * q) % q for t in row] for row in M.turns]
    m = n - 1
    ncols = m * m

    def col(a, b):
        return (a - 1) * m + (b - 1)

    # per pair: list of (exponent, column of R_ik or None, column of R_jk)
    terms = []
    for i, j in _pairs(n):
        entry = []
        for k in range(1, n):
            e = (E[i][k] - E[j][k]) % q
            entry.append((e, col(i, k) if i > 0 else None, col(j, k)))
        terms.append(entry)

    for p in itertools.islice(primes_one_mod(q), attempts):
        g = root_of_unity_mod(q, p)
        powers = [pow(g, e, p) for e in range(q)]
        A = np.zeros((2 * len(terms), ncols), dtype=np.int64)
        for r, entry in enumerate(terms):
            for e, ci, cj in entry:
                for row, w in ((2 * r, powers[e]), (2 * r + 1, powers[(-e) % q])):
                    if ci is not None:
                        A[row, ci] = (A[row, ci] + w) % p
                    A[row, cj] = (A[row, cj] - w) % p
        R, pivots = rref_mod_p(A, p)
        free = [c for c in range(ncols) if c not in set(pivots)]
        if not free:
            return 0, []
        basis = []
        ok = True
        for f in free:
            v = [Fraction(0)] * ncols
            v[f] = Fraction(1)
            for r, pc in enumerate(pivots):
                x = int(R[r, f])
                if x:
                    lifted = rational_reconstruct(-x, p)
                    if lifted is None:
                        ok = False
                        break
                    v[pc] = lifted
            if not ok:
                break
            basis.append(v)
        if not ok or not all(_kernel_vector_exact(v, terms, q) for v in basis):
            continue
        mats = []
        for v in basis:
            mat = [[Fraction(0)] * n for _ in range(n)]
            for a in range(1, n):
                for b in range(1, n):
                    mat[a][b] = v[col(a, b)]
            mats.append(tuple(tuple(r) for r in mat))
        return len(basis), mats
    return None


def _kernel_vector_exact(v: Sequence[Fraction], terms, q: int) -> bool:
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    iv = [int(x * den) for x in v]
    for entry in terms:
        coeffs = [0] * q
        for e, ci, cj in entry:
            coeffs[e] += (iv[ci] if ci is not None else 0) - iv[cj]
        if any(coeffs) and not cyclotomic_is_zero(coeffs, q):
            return False
    return True


def defect(M, tol: float | None = None, exact: bool = True) -> DefectReport:
    """Dimension of the real solution space of the dephased defect system.

    The SVD rank uses the threshold ``1e-9 * sigma_max * max(rows, cols)``.
    For matrices with rational phases an exact certificate is computed as
    well and taken as the reported value.
    """
    M = _matrix(M)
    if not is_hadamard(M, tol):
        raise NotHadamardError("defect is only defined for Hadamard matrices")
    n = M.n
    A = defect_system(M)
    rank, s, tau, null = _svd_kernel(A)
    svd_defect = n * n - rank
    basis = tuple(v.reshape(n, n) for v in null)
    result = exact_defect(M) if exact else None
    if result is None:
        return DefectReport(svd_defect, basis, s, tau, "svd", svd_defect)
    d, mats = result
    float_basis = tuple(np.array([[float(x) for x in r] for r in mat]) for mat in mats)
    return DefectReport(d, float_basis, s, tau, "exact", svd_defect, tuple(mats))


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def fourier_defect_formula(n: int) -> int | None:
    """Closed-form defect of F_N for prime, prime-power and two-prime N; else None."""
    if n < 2:
        raise ValueError("N must be at least 2")
    f = _factorize(n)
    if len(f) == 1:
        (p, k), = f.items()
        return p ** (k - 1) * (k * (p - 1) - p) + 1
    if len(f) == 2 and all(k == 1 for k in f.values()):
        p, q = f
        return 2 * (p - 1) * (q - 1)
    return None


class Isolation(enum.Enum):
    ISOLATED = "isolated"
    UNKNOWN = "unknown"


def is_isolated_certificate(M) -> Isolation:
    """Zero defect certifies isolation; a positive defect decides nothing."""
    return Isolation.ISOLATED if defect(M).defect == 0 else Isolation.UNKNOWN


# -- Haagerup invariants -----------------------------------------------------

@dataclass(frozen=True)
class InvariantSet:
    """Rounded set of quadruple products, sorted by (re, im), with multiplicities."""

    values: tuple[complex, ...]
    counts: tuple[int, ...]
    tol: float

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, z) -> bool:
        z = complex(z)
        return any(abs(z.real - v.real) <= 2 * self.tol and abs(z.imag - v.imag) <= 2 * self.tol
                   for v in self.values)

    def matches(self, other: InvariantSet) -> bool:
        """Set equality up to the clustering tolerance."""
        tol = 4 * max(self.tol, other.tol)

        def covered(a, b):
            if not b:
                return not a
            B = np.array(b)
            return all(np.min(np.maximum(np.abs(B.real - z.real), np.abs(B.imag - z.imag))) <= tol
                       for z in a)

        return covered(self.values, other.values) and covered(other.values, self.values)

    def multiset(self) -> dict[complex, int]:
        return dict(zip(self.values, self.counts))


def haagerup_invariants(M, tol_cluster: float = DEFAULT_CLUSTER_TOL) -> InvariantSet:
    """All products ``M_ij conj(M_kj) M_kl conj(M_il)`` rounded on a complex grid."""
    V = _array(M)
    lam = np.einsum("ij,kj,kl,il->ijkl", V, V.conj(), V, V.conj(), optimize=True).ravel()
    kr = np.round(lam.real / tol_cluster).astype(np.int64)
    ki = np.round(lam.imag / tol_cluster).astype(np.int64)
    keys, counts = np.unique(np.stack([kr, ki], axis=1), axis=0, return_counts=True)
    keys = [tuple(map(int, k)) for k in keys]
    index = {k: t for t, k in enumerate(keys)}
    parent = list(range(len(keys)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for t, (x, y) in enumerate(keys):
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                other = index.get((x + dx, y + dy))
                if other is not None:
                    ra, rb = find(t), find(other)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
    clusters: dict[int, int] = {}
    for t in range(len(keys)):
        root = find(t)
        clusters[root] = clusters.get(root, 0) + int(counts[t])
    reps = sorted(clusters)
    values = tuple(complex(keys[r][0] * tol_cluster + 0.0, keys[r][1] * tol_cluster + 0.0) for r in reps)
    return InvariantSet(values, tuple(clusters[r] for r in reps), tol_cluster)


class Verdict(enum.Enum):
    INEQUIVALENT = "inequivalent"
    INCONCLUSIVE = "inconclusive"


def inequivalent_by_invariants(A, B, tol_cluster: float = DEFAULT_CLUSTER_TOL) -> Verdict:
    """Different invariant sets prove inequivalence; equal sets prove nothing."""
    a, b = _array(A), _array(B)
    if a.shape != b.shape:
        raise ValueError("matrices of different dimension")
    same = haagerup_invariants(a, tol_cluster).matches(haagerup_invariants(b, tol_cluster))
    return Verdict.INCONCLUSIVE if same else Verdict.INEQUIVALENT


# -- equivalence search ------------------------------------------------------

class Outcome(enum.Enum):
    FOUND = "found"
    NOT_FOUND = "not-found"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SearchResult:
    outcome: Outcome
    witness: EquivalenceWitness | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.outcome is Outcome.FOUND


def _phase_labels(values: np.ndarray, tol: float) -> np.ndarray:
    """Integer labels such that entries closer than ``tol`` share a label."""
    turns = (np.angle(values.ravel()) / (2 * math.pi)) % 1.0
    order = np.argsort(turns, kind="stable")
    labels = np.empty(turns.size, dtype=np.int64)
    gap = tol / (2 * math.pi)
    current = 0
    prev = None
    for idx in order:
        t = turns[idx]
        if prev is not None and t - prev > gap:
            current += 1
        labels[idx] = current
        prev = t
    if turns.size and (turns[order[0]] + 1.0 - turns[order[-1]]) <= gap:
        labels[labels == current] = 0
    return labels.reshape(values.shape)


class _Budget(Exception):
    pass


def equivalence_search(A, B, budget: int = DEFAULT_SEARCH_BUDGET, tol: float = EPS_EQUIV) -> SearchResult:
    """Search for ``A = D1 P1 B P2 D2``.

    Every choice of the row and column of B that becomes the first row and
    column is dephased; the remaining rows are then matched by backtracking,
    pruned by sorted row profiles and a column-class refinement.  A completed
    search without a witness is a proof of inequivalence.
    """
    A, B = _matrix(A), _matrix(B)
    n = A.n
    if B.n != n:
        raise ValueError("matrices of different dimension")
    d_r, d_c, Ad = dephase(A)
    Bv = B.values
    starts = [(r, c) for r in range(n) for c in range(n)]
    stack = [Ad.values]
    for r, c in starts:
        u = np.conj(Bv[:, c])
        v = np.conj(Bv[r, :]) * Bv[r, c]
        stack.append(u[:, None] * Bv * v[None, :])
    labels = _phase_labels(np.array(stack), tol)
    LA = labels[0]
    profiles_a = [tuple(sorted(row)) for row in LA.tolist()]
    nodes = 0

    for s, (r, c) in enumerate(starts, start=1):
        LM = labels[s]
        profiles_m = [tuple(sorted(row)) for row in LM.tolist()]
        if sorted(profiles_a) != sorted(profiles_m) or profiles_m[r] != profiles_a[0]:
            continue
        rest = [k for k in range(n) if k != r]
        cls_a = [0] + [1] * (n - 1)
        cls_m = [1] * n
        cls_m[c] = 0
        sigma = [r] + [None] * (n - 1)
        used = {r}

        def refine(ca, cm, i, srow):
            pa = [(ca[j], int(LA[i, j])) for j in range(n)]
            pm = [(cm[j], int(LM[srow, j])) for j in range(n)]
            if Counter(pa) != Counter(pm):
                return None
            ids = {key: t for t, key in enumerate(sorted(set(pa)))}
            return [ids[x] for x in pa], [ids[x] for x in pm]

        def search(i, ca, cm):
            nonlocal nodes
            if i == n:
                return _witness(A, B, d_r, d_c, r, c, sigma, (ca, cm), tol)
            for srow in rest:
                if srow in used or profiles_m[srow] != profiles_a[i]:
                    continue
                nodes += 1
                if nodes > budget:
                    raise _Budget
                refined = refine(ca, cm, i, srow)
                if refined is None:
                    continue
                sigma[i] = srow
                used.add(srow)
                found = search(i + 1, *refined)
                if found is not None:
                    return found
                used.discard(srow)
                sigma[i] = None
            return None

        try:
            w = search(1, cls_a, cls_m)
        except _Budget:
            return SearchResult(Outcome.EXHAUSTED, None, nodes)
        if w is not None:
            return SearchResult(Outcome.FOUND, w, nodes)
    return SearchResult(Outcome.NOT_FOUND, None, nodes)


def _witness(A, B, d_r, d_c, r, c, sigma, classes, tol):
    ca, cm = classes
    n = A.n
    tau = [None] * n
    pool: dict[int, list[int]] = {}
    for k in range(n):
        pool.setdefault(cm[k], []).append(k)
    for j in range(n):
        tau[j] = pool[ca[j]].pop(0)
    d1 = DiagonalPhase(tuple(-d_r.phases[i] - B.phase(sigma[i], c) for i in range(n)))
    d2 = DiagonalPhase(tuple(B.phase(r, c) - B.phase(r, tau[j]) - d_c.phases[j] for j in range(n)))
    w = EquivalenceWitness(d1, PermutationVector(tuple(sigma)), PermutationVector(tuple(tau)).inverse(), d2)
    if apply_equivalence(B, w).allclose(A, tol):
        return w
    return None


# -- unbiasedness and circulants ---------------------------------------------

def is_unbiased_pair(H1, H2, tol: float | None = None) -> bool:
    """Whether ``H1^dagger H2 / sqrt(N)`` is again a complex Hadamard matrix."""
    a, b = _array(H1), _array(H2)
    if a.shape != b.shape:
        raise ValueError("matrices of different dimension")
    n = a.shape[0]
    return is_hadamard(a.conj().T @ b / math.sqrt(n), tol).passed


def circulant_decompose(M, tol: float = 1e-12) -> np.ndarray | None:
    """The vector x with ``M_ij = x[(i - j) mod N]``, or None if M is not circulant."""
    V = _array(M)
    n = V.shape[0]
    x = V[:, 0].copy()
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    if np.max(np.abs(V - x[idx])) > tol:
        return None
    return x


def circulant_transpose_permutation(n: int) -> PermutationVector:
    """P = [e1, eN, eN-1, ..., e2], for which ``C^T = P^T C P`` holds for circulant C."""
    return PermutationVector.from_columns([1] + list(range(n, 1, -1)))
