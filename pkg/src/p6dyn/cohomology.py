"""Exact integer linear algebra for the cohomological action of the surface
involutions, and everything derived from it: the trace invariant alpha, the
first dynamical degree, entropy, characteristic polynomials, and exact
periodic-point counts.

The rank-7 lattice H^2 carries the basis E0, ..., E6; the involutions act by
the integer matrices SIGMA_STAR below.  They preserve the splitting V + Vperp,
where V is spanned by the three lines at infinity

    L1 = E0 - E1 - E4,   L2 = E0 - E2 - E5,   L3 = E0 - E3 - E6,

on which the generators restrict to the projections S1, S2, S3 of the
geometric reflection representation, and act on Vperp as -1.  All arithmetic
is over Python integers (or Fractions for the one change of basis), so every
result here is exact; floats appear only in reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .words import (
    CoxeterWord,
    WordClass,
    classify,
    free_reduce,
    is_analytically_stable,
)

__all__ = [
    "S_MATS",
    "R_MATS",
    "B_FORM",
    "ADJ_S_MATS",
    "SIGMA_STAR",
    "C_STAR",
    "NotAnalyticallyStableError",
    "ElementaryWordError",
    "DecompositionError",
    "mat_mul",
    "mat_pow",
    "trace",
    "identity",
    "s_product",
    "r_product",
    "sigma_star_product",
    "alpha",
    "SurdValue",
    "SpectralReport",
    "spectral_report",
    "lambda1",
    "char_poly_V",
    "char_poly_closed_form",
    "adjugate3",
    "det3",
    "decompose_check",
    "periodic_count",
    "count_table",
    "trace_power_sum",
    "spectral_radius_limit_check",
]


class NotAnalyticallyStableError(ValueError):
    """Word has equal first and last letters; cyclic_reduce it first."""


class ElementaryWordError(ValueError):
    """Operation requires a non-elementary word."""


class DecompositionError(RuntimeError):
    """A product of generator matrices failed to block-diagonalize; this
    signals a transcription bug in the generator matrices."""


# --- small exact matrix helpers (tuples of tuples of int) ---

def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(a[i][t] * bt[j][t] for t in range(inner)) for j in range(cols))
        for i in range(rows)
    )


def mat_pow(m, k):
    n = len(m)
    result = identity(n)
    base = m
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def trace(m):
    return sum(m[i][i] for i in range(len(m)))


def transpose(m):
    return tuple(zip(*m))


# projections s_i = (1 + r_i)/2 in the basis e_i = L_i
S_MATS = {
    1: ((0, 1, 1), (0, 1, 0), (0, 0, 1)),
    2: ((1, 0, 0), (1, 0, 1), (0, 0, 1)),
    3: ((1, 0, 0), (0, 1, 0), (1, 1, 0)),
}

# orthogonal reflections r_i of the geometric representation
R_MATS = {
    1: ((-1, 2, 2), (0, 1, 0), (0, 0, 1)),
    2: ((1, 0, 0), (2, -1, 2), (0, 0, 1)),
    3: ((1, 0, 0), (0, 1, 0), (2, 2, -1)),
}

# invariant symmetric bilinear form on V
B_FORM = ((1, -1, -1), (-1, 1, -1), (-1, -1, 1))

# adjugates of the s_i: only the i-th row is nonzero
ADJ_S_MATS = {
    1: ((1, -1, -1), (0, 0, 0), (0, 0, 0)),
    2: ((0, 0, 0), (-1, 1, -1), (0, 0, 0)),
    3: ((0, 0, 0), (0, 0, 0), (-1, -1, 1)),
}

# action on H^2 in the basis E0..E6
SIGMA_STAR = {
    1: (
        (6, 3, 2, 2, 3, 2, 2),
        (-3, -2, -1, -1, -1, -1, -1),
        (-2, -1, -1, -1, -1, 0, -1),
        (-2, -1, -1, -1, -1, -1, 0),
        (-3, -1, -1, -1, -2, -1, -1),
        (-2, -1, 0, -1, -1, -1, -1),
        (-2, -1, -1, 0, -1, -1, -1),
    ),
    2: (
        (6, 2, 3, 2, 2, 3, 2),
        (-2, -1, -1, -1, 0, -1, -1),
        (-3, -1, -2, -1, -1, -1, -1),
        (-2, -1, -1, -1, -1, -1, 0),
        (-2, 0, -1, -1, -1, -1, -1),
        (-3, -1, -1, -1, -1, -2, -1),
        (-2, -1, -1, 0, -1, -1, -1),
    ),
    3: (
        (6, 2, 2, 3, 2, 2, 3),
        (-2, -1, -1, -1, 0, -1, -1),
        (-2, -1, -1, -1, -1, 0, -1),
        (-3, -1, -1, -2, -1, -1, -1),
        (-2, 0, -1, -1, -1, -1, -1),
        (-2, -1, 0, -1, -1, -1, -1),
        (-3, -1, -1, -1, -1, -1, -2),
    ),
}

# product for the 3-cycle s1 s2 s3, kept as a pinned regression value
C_STAR = (
    (12, 6, 4, 3, 6, 4, 3),
    (-3, -2, -1, -1, -1, -1, -1),
    (-4, -2, -2, -1, -2, -1, -1),
    (-6, -3, -2, -2, -3, -2, -1),
    (-3, -1, -1, -1, -2, -1, -1),
    (-4, -2, -1, -1, -2, -2, -1),
    (-6, -3, -2, -1, -3, -2, -2),
)

# change of basis to {L1, L2, L3} + {2E0-sum(E), E1-E4, E2-E5, E3-E6};
# columns of _BASIS are the new basis vectors in E-coordinates.
_BASIS_COLS = (
    (1, -1, 0, 0, -1, 0, 0),
    (1, 0, -1, 0, 0, -1, 0),
    (1, 0, 0, -1, 0, 0, -1),
    (2, -1, -1, -1, -1, -1, -1),
    (0, 1, 0, 0, -1, 0, 0),
    (0, 0, 1, 0, 0, -1, 0),
    (0, 0, 0, 1, 0, 0, -1),
)
_BASIS = tuple(tuple(_BASIS_COLS[j][i] for j in range(7)) for i in range(7))


def _fraction_inverse(m):
    n = len(m)
    aug = [
        [Fraction(m[i][j]) for j in range(n)]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    for c in range(n):
        pivot = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[pivot] = aug[pivot], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(tuple(aug[i][j + n] for j in range(n)) for i in range(n))


_BASIS_INV = _fraction_inverse(_BASIS)


def _word_letters(w) -> tuple:
    if isinstance(w, CoxeterWord):
        return free_reduce(w).letters
    return free_reduce(CoxeterWord(tuple(w))).letters


def s_product(w):
    """Product s_{i_n} ... s_{i_1} for the word s_{i_1} ... s_{i_n}.

    The order reversal matches the pullback composition rule: the first
    letter acts first, so its matrix sits rightmost.
    """
    m = identity(3)
    for i in _word_letters(w):
        m = mat_mul(S_MATS[i], m)
    return m


def r_product(w):
    m = identity(3)
    for i in _word_letters(w):
        m = mat_mul(R_MATS[i], m)
    return m


def sigma_star_product(w):
    """Exact 7x7 pullback matrix sigma_{i_n}* ... sigma_{i_1}*."""
    m = identity(7)
    for i in _word_letters(w):
        m = mat_mul(SIGMA_STAR[i], m)
    return m


def _require_as(w) -> tuple:
    letters = _word_letters(w)
    if len(letters) < 2 or letters[0] == letters[-1]:
        raise NotAnalyticallyStableError(
            "word has equal first and last letters (not analytically stable); "
            "apply cyclic_reduce / minimal_form and retry"
        )
    return letters


def alpha(w) -> int:
    """Trace of the V-action; an even positive integer for stable words."""
    letters = _require_as(w)
    return trace(s_product(letters))


def det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def adjugate3(m):
    c = lambda i, j: m[i][j]
    return (
        (
            c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1),
            c(0, 2) * c(2, 1) - c(0, 1) * c(2, 2),
            c(0, 1) * c(1, 2) - c(0, 2) * c(1, 1),
        ),
        (
            c(1, 2) * c(2, 0) - c(1, 0) * c(2, 2),
            c(0, 0) * c(2, 2) - c(0, 2) * c(2, 0),
            c(0, 2) * c(1, 0) - c(0, 0) * c(1, 2),
        ),
        (
            c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0),
            c(0, 1) * c(2, 0) - c(0, 0) * c(2, 1),
            c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0),
        ),
    )


def char_poly_closed_form(w):
    """Coefficients of the predicted char(lambda) = lambda^3 + c2 l^2 + c1 l.

    Returns (1, -a, eps, 0) where eps depends on whether the end letters of
    the reduced word agree.
    """
    letters = _word_letters(w)
    if not letters:
        return (1, -3, 3, -1)
    n = len(letters)
    a = trace(s_product(letters))
    eps = (-1) ** (n - 1) if letters[0] == letters[-1] else (-1) ** n
    return (1, -a, eps, 0)


def char_poly_V(w):
    """Exact characteristic polynomial of the 3x3 V-action.

    Coefficients are returned leading-first for
    lambda^3 - tr*lambda^2 + tr(adj)*lambda - det, and checked against the
    closed form predicted by the end letters of the word.
    """
    letters = _word_letters(w)
    m = s_product(letters)
    coeffs = (1, -trace(m), trace(adjugate3(m)), -det3(m))
    if letters and coeffs != char_poly_closed_form(letters):
        raise DecompositionError(
            f"characteristic polynomial {coeffs} deviates from the closed form "
            f"{char_poly_closed_form(letters)}"
        )
    return coeffs


def decompose_check(m7):
    """Split a 7x7 pullback matrix into its V-block and Vperp scalar.

    Change of basis to {L1,L2,L3} + the orthogonal complement basis; raises
    DecompositionError unless the result is exactly block diagonal with a
    scalar Vperp part.  Returns (3x3 integer block, scalar).
    """
    mf = tuple(tuple(Fraction(x) for x in row) for row in m7)
    d = mat_mul(mat_mul(_BASIS_INV, mf), _BASIS)
    for r in range(7):
        for c in range(7):
            if (r < 3) != (c < 3) and d[r][c] != 0:
                raise DecompositionError(
                    f"off-diagonal block entry ({r},{c}) = {d[r][c]} != 0"
                )
            if d[r][c].denominator != 1:
                raise DecompositionError(f"non-integer entry ({r},{c}) = {d[r][c]}")
    scalar = int(d[3][3])
    for r in range(3, 7):
        for c in range(3, 7):
            want = scalar if r == c else 0
            if d[r][c] != want:
                raise DecompositionError(
                    f"Vperp block is not scalar: entry ({r},{c}) = {d[r][c]}"
                )
    vblock = tuple(tuple(int(d[r][c]) for c in range(3)) for r in range(3))
    return vblock, scalar


@dataclass(frozen=True)
class SurdValue:
    """Exact value (a + sqrt(a^2 + 4*sign))/2 with integer a and sign = +-1."""

    alpha: int
    sign: int

    @property
    def discriminant(self) -> int:
        return self.alpha * self.alpha + 4 * self.sign

    def to_float(self) -> float:
        return (self.alpha + math.sqrt(self.discriminant)) / 2.0

    def power_sum(self, n: int) -> Fraction:
        """lambda_+^n + lambda_-^n for the two roots of l^2 - a*l - sign.

        Computed exactly: lambda_+^n = (u + v*sqrt(D))/2^n with integer u, v.
        """
        d = self.discriminant
        u, v = self.alpha, 1  # lambda_+^1 = (alpha + sqrt(D))/2
        if n == 0:
            return Fraction(2)
        for _ in range(n - 1):
            u, v = u * self.alpha + v * d, u + v * self.alpha
        return Fraction(2 * u, 2**n)


@dataclass(frozen=True)
class SpectralReport:
    """Spectral data of a word: alpha, dynamical degree and entropy."""

    word: CoxeterWord
    length: int
    alpha: int
    lam: SurdValue
    lambda_float: float
    entropy: float
    word_class: WordClass
    counts: tuple = field(default=())  # optional rows (N, affine, projective)

    def to_json_dict(self) -> dict:
        out = {
            "word": self.word.to_text(),
            "n": self.length,
            "alpha": self.alpha,
            "lambda": {
                "surd": [self.lam.alpha, self.lam.sign],
                "float": self.lambda_float,
            },
            "entropy": self.entropy,
            "class": self.word_class.tag,
        }
        if self.word_class.exponent is not None:
            out["exponent"] = self.word_class.exponent
        if self.counts:
            out["counts"] = [
                {"N": n, "affine": a, "projective": p} for n, a, p in self.counts
            ]
        return out


def spectral_report(w, counts_up_to: int = 0) -> SpectralReport:
    """Full spectral data for a freely reduced, analytically stable word.

    Elementary words (including a bare involution of length one, which is
    never analytically stable) get lambda = 1 and entropy 0 directly.
    """
    letters = _word_letters(w)
    word = CoxeterWord(letters)
    n = len(letters)
    cls = classify(word)
    if cls.tag == "trivial":
        raise ValueError("trivial word has no spectral data")
    if n == 1:
        # a bare involution: dynamically trivial
        return SpectralReport(word, n, trace(s_product(letters)), SurdValue(2, -1),
                              1.0, 0.0, cls)
    a = alpha(letters)
    sign = (-1) ** (n + 1)
    lam = SurdValue(a, sign)
    lam_f = lam.to_float()
    if cls.is_elementary:
        # alpha = 2 and even length force lambda = 1 already; pin it exactly
        lam_f = 1.0
    entropy = math.log(lam_f) if lam_f > 1.0 else 0.0
    counts = ()
    if counts_up_to and not cls.is_elementary:
        counts = tuple(
            (nn, *periodic_count(letters, nn)) for nn in range(1, counts_up_to + 1)
        )
    return SpectralReport(word, n, a, lam, lam_f, entropy, cls, counts)


def lambda1(w) -> SpectralReport:
    return spectral_report(w)


def trace_power_sum(a: int, n_parity_sign: int, big_n: int) -> int:
    """t_N with t_0 = 2, t_1 = a, t_{N+1} = a t_N - eps t_{N-1}, eps = (-1)^n."""
    eps = n_parity_sign
    t_prev, t_cur = 2, a
    if big_n == 0:
        return 2
    for _ in range(big_n - 1):
        t_prev, t_cur = t_cur, a * t_cur - eps * t_prev
    return t_cur


def periodic_count(w, big_n: int):
    """Exact (affine, projective) periodic-point counts of period big_n.

    affine = t_N + 4*(-1)^(n*N) with t_N the power sum of the two roots of
    l^2 - alpha*l + (-1)^n; projective adds the single fixed point at
    infinity.  Only valid for stable non-elementary words.
    """
    letters = _require_as(w)
    cls = classify(CoxeterWord(letters))
    if cls.is_elementary:
        raise ElementaryWordError(
            "periodic-point counting requires a non-elementary word: elementary "
            "words have dynamical degree 1 and the counting theorem does not apply"
        )
    if big_n < 1:
        raise ValueError("period must be a positive integer")
    n = len(letters)
    a = trace(s_product(letters))
    eps = (-1) ** n
    t = trace_power_sum(a, eps, big_n)
    affine = t + 4 * (eps**big_n)
    return affine, affine + 1


def count_table(w, n_max: int):
    return tuple((n, *periodic_count(w, n)) for n in range(1, n_max + 1))


def _log_big(x: int) -> float:
    # math.log accepts arbitrarily large Python ints
    return math.log(x)


def spectral_radius_limit_check(w, n_max: int):
    """Norm roots ||M^N||^(1/N) of the exact pullback powers, N = 1..n_max.

    Returns rows (N, root_full, root_V) where root_full uses the
    max-absolute-entry norm of the full 7x7 power and root_V the same norm of
    its exact V-block (the part that carries the dynamical degree; the
    orthogonal complement only contributes +-1 eigenvalues, but the ambient
    basis inflates the full-matrix norm constant, so the V-block root
    converges noticeably faster).
    """
    letters = _word_letters(w)
    m = sigma_star_product(letters)
    power = identity(7)
    rows = []
    for n in range(1, n_max + 1):
        power = mat_mul(power, m)
        full_norm = max(abs(x) for row in power for x in row)
        vblock, _ = decompose_check(power)
        v_norm = max(abs(x) for row in vblock for x in row)
        root_full = math.exp(_log_big(full_norm) / n) if full_norm else 0.0
        root_v = math.exp(_log_big(v_norm) / n) if v_norm else 0.0
        rows.append((n, root_full, root_v))
    return rows
