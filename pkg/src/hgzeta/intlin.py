"""Exact integer linear algebra for exponent matrices.

Matrices are plain lists of rows of Python ints, so nothing overflows.
Indices are 0-based throughout; ``A[k][i]`` is the exponent of ``T_k`` in
the ``i``-th monomial, i.e. monomials are the *columns* of ``A``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import Asm1Violation, AssumptionViolation, KernelRankError, InvalidFamilyError

__all__ = [
    "SnfResult",
    "AlphaData",
    "KernelReps",
    "Asm2Entry",
    "Asm2Report",
    "as_matrix",
    "matmul",
    "smith_normal_form",
    "alpha_vector",
    "shifted_matrix",
    "kernel_mod",
    "kernel_reps",
    "check_asm2",
    "compute_D",
    "compute_D_theorem_reading",
    "columns_inside",
]


def as_matrix(M) -> list[list[int]]:
    rows = [[int(v) for v in row] for row in M]
    if not rows or not rows[0]:
        raise ValueError("matrix must have positive dimensions")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged matrix")
    return rows


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(X, Y):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*Y)] for row in X]


@dataclass(frozen=True)
class SnfResult:
    U: list
    D: list
    V: list
    divisors: tuple

    @property
    def nonzero(self) -> tuple:
        return tuple(d for d in self.divisors if d)

    @property
    def rank(self) -> int:
        return len(self.nonzero)


def smith_normal_form(M) -> SnfResult:
    """Return ``U, D, V`` with ``U @ M @ V == D`` and ``d_1 | d_2 | ...`` on the diagonal.

    Pivoting picks the smallest nonzero entry of the trailing block, which is
    plenty for the (n+2)x(n+2) matrices that show up here.
    """
    A = as_matrix(M)
    m, n = len(A), len(A[0])
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    divisors = tuple(A[i][i] for i in range(min(m, n)))
    return SnfResult(U=U, D=A, V=V, divisors=divisors)


@dataclass(frozen=True)
class AlphaData:
    alphas: tuple
    alpha_total: int


def shifted_matrix(A) -> list[list[int]]:
    """``A' = (a_ij - 1)``, whose integer kernel is the line spanned by alpha."""
    return [[a - 1 for a in row] for row in as_matrix(A)]


def alpha_vector(Aprime) -> AlphaData:
    Ap = as_matrix(Aprime)
    snf = smith_normal_form(Ap)
    n = len(Ap[0])
    null_cols = [j for j in range(n) if j >= len(snf.divisors) or snf.divisors[j] == 0]
    if len(null_cols) != 1:
        raise KernelRankError(f"kernel of A' has rank {len(null_cols)}, expected 1")
    v = [snf.V[i][null_cols[0]] for i in range(n)]
    g = reduce(math.gcd, v)
    v = [x // g for x in v]
    if v[0] < 0:
        v = [-x for x in v]
    if any(x <= 0 for x in v):
        raise InvalidFamilyError(f"kernel generator {v} is not positive; X_0 cannot be smooth")
    return AlphaData(alphas=tuple(v), alpha_total=sum(v))


def kernel_mod(M, modulus: int) -> np.ndarray:
    """All ``x`` in ``(Z/modulus)^cols`` with ``M x = 0``, one per row of the result.

    Solved through the Smith form: with ``y = V^{-1} x`` the system splits
    into ``d_i y_i = 0`` coordinatewise.
    """
    M = as_matrix(M)
    rows, cols = len(M), len(M[0])
    snf = smith_normal_form(M)
    axes = []
    for i in range(cols):
        d = snf.divisors[i] if i < min(rows, cols) else 0
        g = math.gcd(d, modulus)
        step = modulus // g
        axes.append(np.arange(g, dtype=np.int64) * step)
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(cols, -1)
    V = np.array(snf.V, dtype=object)
    x = (V.dot(grid.astype(object)) % modulus).astype(np.int64)
    return x.T.copy()


@dataclass(frozen=True)
class KernelReps:
    s: tuple
    t_ij: tuple = field(default=())
    t: tuple = field(default=())
    delta: tuple = field(default=())
    modulus: int = 0

    def __len__(self):
        return len(self.s)


def kernel_reps(A, q: int, alpha: AlphaData, *, check_divisibility: bool = True) -> KernelReps:
    """Coset representatives of ``Ker(A' mod q-1)`` modulo the alpha line.

    Each coset is represented by its lexicographically smallest member with
    entries in ``0..q-2``; the zero vector comes first.
    """
    N = q - 1
    Ap = shifted_matrix(A)
    divisors = smith_normal_form(Ap).nonzero
    d = math.prod(divisors)
    K = kernel_mod(Ap, N)
    al = np.array(alpha.alphas, dtype=np.int64)
    order = np.lexsort(K.T[::-1])
    seen = set()
    reps = []
    for idx in order:
        k = K[idx]
        key = tuple(int(v) for v in k)
        if key in seen:
            continue
        reps.append(key)
        for a in range(N):
            seen.add(tuple(int(v) for v in (k + a * al) % N))
    if len(reps) != d:
        raise AssumptionViolation(
            f"elementary divisors {divisors} of A' do not all divide q-1={N}; "
            f"found {len(reps)} cosets instead of d={d}"
        )
    if not check_divisibility:
        return KernelReps(s=tuple(reps), modulus=N)
    offenders = []
    for i, ai in enumerate(alpha.alphas):
        if N % ai:
            offenders.append((i, "alpha_i does not divide q-1"))
    if N % alpha.alpha_total:
        offenders.append(("alpha", "alpha does not divide q-1"))
    for j, s in enumerate(reps):
        for i, (sij, ai) in enumerate(zip(s, alpha.alphas)):
            if sij % ai:
                offenders.append((i, j))
        if sum(s) % alpha.alpha_total:
            offenders.append(("|s_j|", j))
    if offenders:
        raise Asm1Violation(offenders)
    t_ij = tuple(tuple(sij // ai for sij, ai in zip(s, alpha.alphas)) for s in reps)
    t = tuple(sum(s) // alpha.alpha_total for s in reps)
    delta = tuple(int(sum(s) % N == 0) for s in reps)
    return KernelReps(s=tuple(reps), t_ij=t_ij, t=t, delta=delta, modulus=N)


def columns_inside(A, J) -> list[int]:
    """Monomials (columns) whose support lies inside the coordinate set ``J``."""
    A = as_matrix(A)
    Jset = set(J)
    outside = [k for k in range(len(A)) if k not in Jset]
    return [i for i in range(len(A[0])) if all(A[k][i] == 0 for k in outside)]


@dataclass(frozen=True)
class Asm2Entry:
    J: tuple
    columns: tuple
    matrix: tuple
    divisors: tuple
    ok: bool


@dataclass(frozen=True)
class Asm2Report:
    q: int
    entries: tuple

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self):
        return [e for e in self.entries if not e.ok]


def check_asm2(A, q: int) -> Asm2Report:
    """Elementary divisors of every restricted matrix must divide ``q-1``.

    Runs over all ``J`` with ``#J >= (n+1)/2``; the matrix has the rows of
    ``J`` and the columns supported inside ``J``, with a row of ones appended.
    """
    A = as_matrix(A)
    n1 = len(A)
    entries = []
    for size in range((n1 + 1) // 2, n1 + 1):
        for J in itertools.combinations(range(n1), size):
            cols = columns_inside(A, J)
            if not cols:
                entries.append(Asm2Entry(J, (), (), (), True))
                continue
            mat = [[A[j][i] for i in cols] for j in J] + [[1] * len(cols)]
            divs = smith_normal_form(mat).divisors
            ok = all(d != 0 and (q - 1) % d == 0 for d in divs)
            entries.append(
                Asm2Entry(J, tuple(cols), tuple(tuple(r) for r in mat), tuple(divs), ok)
            )
    return Asm2Report(q=q, entries=tuple(entries))


def compute_D(A) -> int:
    """Number of ``J`` with ``#J = (n+1)/2`` such that every monomial has support outside ``J``."""
    A = as_matrix(A)
    n1 = len(A)
    if n1 % 2:
        return 0
    return sum(
        1 for J in itertools.combinations(range(n1), n1 // 2) if not columns_inside(A, J)
    )


def compute_D_theorem_reading(A) -> int:
    """Alternative count: every *row* ``i`` has a nonzero entry in some column outside ``J``."""
    A = as_matrix(A)
    n1 = len(A)
    if n1 % 2:
        return 0
    count = 0
    for J in itertools.combinations(range(n1), n1 // 2):
        outside = [j for j in range(n1) if j not in J]
        if all(any(A[i][j] >= 1 for j in outside) for i in range(n1)):
            count += 1
    return count
