"""Substitution matrix and exact Perron-Frobenius data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import RandomSubstitution, Word, abelianise

Matrix = tuple[tuple[int, ...], ...]


class NotCompatibleError(ValueError):
    pass


class NotPrimitiveError(ValueError):
    pass


@dataclass(frozen=True)
class Compatibility:
    ok: bool
    letter: Optional[int] = None
    first: Optional[Word] = None
    second: Optional[Word] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class PerronData:
    matrix: Matrix
    lambda_approx: float
    lambda_exact: Optional[int] = None
    r_hat: Optional[tuple[int, ...]] = None
    virtual_period: Optional[int] = None
    r_normalized: Optional[tuple[Fraction, ...]] = None


def is_compatible(sub: RandomSubstitution) -> Compatibility:
    for a, imgs in enumerate(sub.images):
        ref = abelianise(imgs[0], sub.d)
        for w in imgs[1:]:
            if abelianise(w, sub.d) != ref:
                return Compatibility(False, a, imgs[0], w)
    return Compatibility(True)


def require_compatible(sub: RandomSubstitution) -> None:
    c = is_compatible(sub)
    if not c:
        fmt = sub.alphabet.format
        raise NotCompatibleError(
            f"not compatible: images {fmt(c.first)} and {fmt(c.second)} of "
            f"{sub.alphabet.symbols[c.letter]} have different letter counts"
        )


def substitution_matrix(sub: RandomSubstitution) -> Matrix:
    """``m[i][j]`` is the number of letters ``i`` in any image of letter ``j``."""
    require_compatible(sub)
    cols = [abelianise(imgs[0], sub.d) for imgs in sub.images]
    return tuple(tuple(cols[j][i] for j in range(sub.d)) for i in range(sub.d))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def mat_pow(m: Matrix, k: int) -> Matrix:
    n = len(m)
    result: Matrix = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    base = m
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def _support(sub: RandomSubstitution) -> np.ndarray:
    """Boolean matrix: ``s[i, j]`` iff letter ``i`` occurs in some image of ``j``."""
    s = np.zeros((sub.d, sub.d), dtype=bool)
    for j, imgs in enumerate(sub.images):
        for w in imgs:
            s[list(set(w)), j] = True
    return s


def primitivity_exponent(sub: RandomSubstitution) -> Optional[int]:
    """Least ``k`` such that every letter occurs in ``sub^k`` of every letter.

    Uses the letter-support matrix, which for compatible substitutions has the
    same zero pattern as the substitution matrix.  ``None`` if not primitive
    (Wielandt: a primitive ``d x d`` pattern is positive by ``(d-1)^2 + 1``).
    """
    s = _support(sub)
    bound = (sub.d - 1) ** 2 + 1
    p = s.copy()
    for k in range(1, bound + 1):
        if p.all():
            return k
        p = (s.astype(np.int64) @ p.astype(np.int64)) > 0
    return None


def is_primitive(sub: RandomSubstitution) -> bool:
    return primitivity_exponent(sub) is not None


def constant_length(sub: RandomSubstitution) -> Optional[int]:
    lengths = {len(w) for imgs in sub.images for w in imgs}
    return lengths.pop() if len(lengths) == 1 else None


def characteristic_polynomial(m: Matrix) -> list[int]:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(xI - m)`` (Faddeev-LeVerrier)."""
    n = len(m)
    coeffs = [1]
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    mk: Matrix = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    c = 1
    for k in range(1, n + 1):
        # M_k = M * M_{k-1} + c_{k-1} I
        prod = mat_mul(m, mk)
        mk = tuple(tuple(prod[i][j] + c * ident[i][j] for j in range(n)) for i in range(n))
        am = mat_mul(m, mk)
        trace = sum(am[i][i] for i in range(n))
        assert trace % k == 0
        c = -trace // k
        coeffs.append(c)
    return coeffs


def _poly_eval(coeffs: list[int], x: int) -> int:
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [i for i in range(1, math.isqrt(n) + 1) if n % i == 0]
    return sorted(set(small + [n // i for i in small]))


def integer_pf_eigenvalue(m: Matrix, lambda_approx: float) -> Optional[int]:
    """The PF eigenvalue of a primitive integer matrix if it is an integer."""
    coeffs = characteristic_polynomial(m)
    while coeffs[-1] == 0:
        coeffs.pop()  # divide out powers of x
    max_col = max(sum(m[i][j] for i in range(len(m))) for j in range(len(m)))
    for cand in _divisors(coeffs[-1]):
        if cand > max_col:
            break
        if _poly_eval(coeffs, cand) != 0:
            continue
        roots = np.roots(np.array(coeffs, dtype=float))
        others = sorted(abs(roots), reverse=True)
        # the PF root is simple and strictly dominates for a primitive matrix
        if abs(others[0] - cand) < 1e-6 * cand and (len(others) == 1 or others[1] < cand - 1e-9):
            return cand
    return None


def rational_null_vector(m: list[list[Fraction]]) -> list[Fraction]:
    """A nonzero vector spanning the (assumed one-dimensional) kernel of ``m``."""
    n = len(m)
    a = [row[:] for row in m]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, n) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise ArithmeticError(f"kernel has dimension {len(free)}, expected 1")
    f = free[0]
    x = [Fraction(0)] * n
    x[f] = Fraction(1)
    for row, col in enumerate(pivots):
        x[col] = -a[row][f]
    return x


def perron_analysis(sub: RandomSubstitution) -> PerronData:
    m = substitution_matrix(sub)
    if not is_primitive(sub):
        raise NotPrimitiveError("substitution matrix is not primitive")
    eig = np.linalg.eigvals(np.array(m, dtype=float))
    lam_approx = float(max(abs(eig)))
    lam = integer_pf_eigenvalue(m, lam_approx)
    if lam is None:
        return PerronData(matrix=m, lambda_approx=lam_approx)
    n = len(m)
    shifted = [[Fraction(m[i][j] - (lam if i == j else 0)) for j in range(n)] for i in range(n)]
    x = rational_null_vector(shifted)
    if x[0] < 0:
        x = [-v for v in x]
    denom = math.lcm(*(v.denominator for v in x))
    ints = [int(v * denom) for v in x]
    g = math.gcd(*ints)
    r_hat = tuple(v // g for v in ints)
    if min(r_hat) <= 0:
        raise ArithmeticError(f"PF eigenvector {r_hat} is not positive")
    total = sum(r_hat)
    return PerronData(
        matrix=m,
        lambda_approx=lam_approx,
        lambda_exact=lam,
        r_hat=r_hat,
        virtual_period=total,
        r_normalized=tuple(Fraction(v, total) for v in r_hat),
    )
