"""The affine cubic surface, its compactification, and the involutive
dynamics on it.

The surface is the zero set of

    f(x, theta) = x1 x2 x3 + x1^2 + x2^2 + x3^2
                  - theta1 x1 - theta2 x2 - theta3 x3 + theta4,

a quadric in each coordinate, so flipping to the second root of the
x_i-quadric defines an involution sigma_i that preserves f identically.  In
homogeneous coordinates sigma_i becomes a birational map that blows down the
line at infinity L_i = {X0 = Xi = 0} to the coordinate point p_i.  The
catalogue of the 27 lines is parametrized explicitly by the exponential
parameters b.

Composition convention (locked): word application is rightmost letter first,
i.e. word_apply("s1 s2", x) = sigma_1(sigma_2(x)).  Under this convention the
half-step maps satisfy g_i^2 = sigma_i sigma_{i+1} as words; the regression
test pins the convention.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .params import BParams, ThetaParams, a_to_theta, b_to_a, discriminant
from .words import CoxeterWord

__all__ = [
    "RIGHTMOST_FIRST",
    "EscapeError",
    "IndeterminatePointError",
    "SingularSurfaceError",
    "f_eval",
    "grad_f",
    "sigma_apply",
    "word_apply",
    "g_apply",
    "sigma_jacobian",
    "word_jacobian",
    "proj_normalize",
    "proj_point",
    "coordinate_point",
    "sigma_projective",
    "LineSpec",
    "LinesCatalog",
    "lines_catalog",
    "line_exchange_check",
    "on_surface_tol",
    "random_surface_point",
]

# word letters act right-to-left; see module docstring
RIGHTMOST_FIRST = True

ESCAPE_NORM = 1e150
PROJ_DEGENERATE_TOL = 1e-14


class EscapeError(RuntimeError):
    """Orbit left the numerically representable range mid-composition."""

    def __init__(self, message, point=None, step=None):
        super().__init__(message)
        self.point = point
        self.step = step


class IndeterminatePointError(ValueError):
    """The projective map is undefined (or degenerate) at this point."""


class SingularSurfaceError(ValueError):
    """Parameters lie on the discriminant locus."""


def _theta_tuple(theta):
    if isinstance(theta, ThetaParams):
        return theta
    return ThetaParams(*(complex(t) for t in theta))


def f_eval(x, theta):
    """The cubic f(x, theta); broadcasts over leading axes of x."""
    t1, t2, t3, t4 = _theta_tuple(theta)
    x = np.asarray(x)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return (x1 * x2 * x3 + x1 * x1 + x2 * x2 + x3 * x3
            - t1 * x1 - t2 * x2 - t3 * x3 + t4)


def grad_f(x, theta):
    t1, t2, t3, t4 = _theta_tuple(theta)
    x = np.asarray(x, dtype=complex)
    g = np.empty_like(x)
    g[..., 0] = x[..., 1] * x[..., 2] + 2 * x[..., 0] - t1
    g[..., 1] = x[..., 0] * x[..., 2] + 2 * x[..., 1] - t2
    g[..., 2] = x[..., 0] * x[..., 1] + 2 * x[..., 2] - t3
    return g


def on_surface_tol(x, tol=1e-9):
    """Cubic-growth tolerance |f| < tol * (1 + ||x||^3)."""
    x = np.asarray(x)
    return tol * (1 + np.abs(x).max(axis=-1) ** 3)


_OTHERS = {1: (1, 2), 2: (0, 2), 3: (0, 1)}


def sigma_apply(i, x, theta):
    """x_i -> theta_i - x_i - x_j x_k, the other coordinates unchanged."""
    t = _theta_tuple(theta)
    x = np.array(x, dtype=complex, copy=True)
    j, k = _OTHERS[i]
    x[..., i - 1] = t[i - 1] - x[..., i - 1] - x[..., j] * x[..., k]
    return x


def word_apply(w, x, theta, escape_norm=ESCAPE_NORM):
    """Apply a word of involutions, rightmost letter first."""
    letters = w.letters if isinstance(w, CoxeterWord) else tuple(w)
    x = np.array(x, dtype=complex, copy=True)
    for step, i in enumerate(reversed(letters)):
        x = sigma_apply(i, x, theta)
        m = np.abs(x).max()
        if not np.isfinite(m) or m > escape_norm:
            raise EscapeError(
                f"coordinate norm exceeded {escape_norm:g} after letter "
                f"{step + 1} of {len(letters)}", point=x, step=step + 1)
    return x


def sigma_jacobian(i, x):
    """Ambient 3x3 Jacobian of sigma_i at x (unit determinant -1 by shape)."""
    x = np.asarray(x, dtype=complex)
    j, k = _OTHERS[i]
    d = np.eye(3, dtype=complex)
    d[i - 1, i - 1] = -1
    d[i - 1, j] = -x[k]
    d[i - 1, k] = -x[j]
    return d


def word_jacobian(w, x, theta):
    """(image point, chain-rule Jacobian) of a word application at x."""
    letters = w.letters if isinstance(w, CoxeterWord) else tuple(w)
    x = np.array(x, dtype=complex, copy=True)
    jac = np.eye(3, dtype=complex)
    for i in reversed(letters):
        jac = sigma_jacobian(i, x) @ jac
        x = sigma_apply(i, x, theta)
    return x, jac


def g_apply(i, x, theta):
    """Half-step map: returns (x', theta') with theta_i, theta_j swapped.

    (i, j, k) is the cyclic permutation of (1, 2, 3) starting at i; the
    image lies on the surface with the swapped parameters.
    """
    t = list(_theta_tuple(theta))
    j = i % 3 + 1
    k = j % 3 + 1
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    out[..., i - 1] = t[j - 1] - x[..., j - 1] - x[..., k - 1] * x[..., i - 1]
    out[..., j - 1] = x[..., i - 1]
    out[..., k - 1] = x[..., k - 1]
    t[i - 1], t[j - 1] = t[j - 1], t[i - 1]
    return out, ThetaParams(*t)


# --- projective picture ---

def proj_normalize(X):
    X = np.asarray(X, dtype=complex)
    m = np.abs(X).max()
    if m == 0:
        raise ValueError("zero vector is not a projective point")
    return X / m


def proj_point(x):
    """Affine point -> [1 : x1 : x2 : x3], normalized."""
    x = np.asarray(x, dtype=complex)
    return proj_normalize(np.concatenate([[1.0 + 0j], x]))


def coordinate_point(i):
    """p_i, the intersection of the two lines at infinity L_j and L_k."""
    X = np.zeros(4, dtype=complex)
    X[i] = 1.0
    return X


def _is_near(X, Y, tol):
    return np.abs(proj_normalize(X) - proj_normalize(Y)).max() < tol


def sigma_projective(i, X, theta, tol=1e-12):
    """Birational extension of sigma_i to homogeneous coordinates.

    [X0 : Xi : Xj : Xk] -> [X0^2 : theta_i X0^2 - X0 Xi - Xj Xk : X0 Xj : X0 Xk]

    The line L_i (where X0 = Xi = 0) is blown down to p_i; this includes the
    corner points p_j and p_k of L_i.  The point p_i itself is the unique
    indeterminacy point.  Elsewhere on the plane at infinity the raw
    quadratic formula degenerates and no value is assigned.
    """
    t = _theta_tuple(theta)
    X = proj_normalize(X)
    if _is_near(X, coordinate_point(i), tol):
        raise IndeterminatePointError(f"p_{i} is the indeterminacy point of sigma_{i}")
    j, k = [c for c in (1, 2, 3) if c != i]
    if abs(X[0]) < tol and abs(X[i]) < tol:
        return coordinate_point(i)  # blow-down of L_i
    out = np.empty(4, dtype=complex)
    out[0] = X[0] * X[0]
    out[i] = t[i - 1] * X[0] * X[0] - X[0] * X[i] - X[j] * X[k]
    out[j] = X[0] * X[j]
    out[k] = X[0] * X[k]
    if np.abs(out).max() < PROJ_DEGENERATE_TOL:
        raise IndeterminatePointError(
            f"sigma_{i} degenerates at {X}: all homogeneous components vanish"
        )
    return proj_normalize(out)


# --- the 27 lines ---

def _cyc(i):
    j = i % 3 + 1
    return i, j, j % 3 + 1


@dataclass(frozen=True)
class LineSpec:
    """One of the lines on the projective cubic.

    For the 24 finite lines the two linear equations are, with arguments
    (p, q; r, s) and (i, j, k) the cyclic permutation starting at the group
    index i:

        X_i = (p q + 1/(p q)) X_0
        X_j + (p q) X_k = (p (s + 1/s) + q (r + 1/r)) X_0

    eq1/eq2 hold the coefficient 4-vectors c with c . X = 0.  The three
    lines at infinity carry the equations X_0 = 0, X_i = 0 instead.
    """

    label: str
    group: int            # which line at infinity it meets (1, 2, 3)
    pair: int             # row of the four intersecting pairs, 0 for L_i
    args: tuple           # (p, q, r, s); () for the lines at infinity
    eq1: tuple
    eq2: tuple
    at_infinity: bool = False

    def residual(self, X):
        X = np.asarray(X, dtype=complex)
        r1 = abs(sum(c * x for c, x in zip(self.eq1, X)))
        r2 = abs(sum(c * x for c, x in zip(self.eq2, X)))
        return max(r1, r2)

    def sample_points(self, count=20, radius=1.0):
        """Deterministic sample along the line, unit-circle parameter."""
        i, j, k = _cyc(self.group)
        pts = []
        if self.at_infinity:
            # [0 : ... ] with X_i = 0; parametrize remaining two coordinates
            for t in range(count):
                z = radius * cmath.exp(2j * cmath.pi * t / count)
                X = np.zeros(4, dtype=complex)
                X[j], X[k] = 1.0, z
                pts.append(X)
            return pts
        p, q, r, s = self.args
        a = p * q + 1 / (p * q)
        c = p * (s + 1 / s) + q * (r + 1 / r)
        for t in range(count):
            z = radius * cmath.exp(2j * cmath.pi * t / count)
            X = np.zeros(4, dtype=complex)
            X[0] = 1.0
            X[i] = a
            X[k] = z
            X[j] = c - p * q * z
            pts.append(X)
        return pts


def _finite_line(label, group, pair, p, q, r, s):
    i, j, k = _cyc(group)
    eq1 = [0j, 0j, 0j, 0j]
    eq1[i] = 1.0 + 0j
    eq1[0] = -(p * q + 1 / (p * q))
    eq2 = [0j, 0j, 0j, 0j]
    eq2[j] = 1.0 + 0j
    eq2[k] = p * q
    eq2[0] = -(p * (s + 1 / s) + q * (r + 1 / r))
    return LineSpec(label, group, pair, (p, q, r, s), tuple(eq1), tuple(eq2))


def _flabel(a, b):
    a, b = sorted((a, b))
    return f"F{a}{b}"


@dataclass(frozen=True)
class LinesCatalog:
    theta: ThetaParams
    finite: tuple          # 24 LineSpec
    at_infinity: tuple     # 3 LineSpec (F14, F25, F36)

    def __getitem__(self, label):
        for line in self.finite + self.at_infinity:
            if line.label == label:
                return line
        raise KeyError(label)

    def group(self, i):
        return tuple(l for l in self.finite if l.group == i)

    def to_json_dict(self):
        out = {}
        for line in self.finite + self.at_infinity:
            out[line.label] = {
                "group": line.group,
                "pair": line.pair,
                "at_infinity": line.at_infinity,
                "eq1": [[c.real, c.imag] for c in line.eq1],
                "eq2": [[c.real, c.imag] for c in line.eq2],
            }
        return out


def lines_catalog(b: BParams, singular_tol=1e-12, verify_tol=1e-10) -> LinesCatalog:
    """All 27 lines, labelled per the eight-lines-per-group table.

    The eight finite lines meeting L_i come in four intersecting pairs
    {E_i, G_{i+3}}, {E_{i+3}, G_i}, {F_jk, F_{j+3,k+3}}, {F_{j,k+3}, F_{j+3,k}}
    with (i, j, k) cyclic.  Every produced line is checked to lie on the
    surface; a singular surface is rejected up front.
    """
    b = BParams(*b).validate()
    disc = discriminant(b)
    if abs(disc) < singular_tol:
        raise SingularSurfaceError(
            f"discriminant {disc:.3e} vanishes; the cubic is singular and the "
            "line catalogue degenerates"
        )
    theta = a_to_theta(b_to_a(b))
    bv = list(b)
    finite = []
    for gi in (1, 2, 3):
        i, j, k = _cyc(gi)
        bi, bj, bk, b4 = bv[i - 1], bv[j - 1], bv[k - 1], bv[3]
        rows = [
            (f"E{i}", 1, (bi, b4, bj, bk)),
            (f"G{i + 3}", 1, (1 / bi, 1 / b4, bj, bk)),
            (f"E{i + 3}", 2, (bj, bk, bi, b4)),
            (f"G{i}", 2, (1 / bj, 1 / bk, bi, b4)),
            (_flabel(j, k), 3, (1 / bi, b4, bj, bk)),
            (_flabel(j + 3, k + 3), 3, (bi, 1 / b4, bj, bk)),
            (_flabel(j, k + 3), 4, (1 / bj, bk, bi, b4)),
            (_flabel(j + 3, k), 4, (bj, 1 / bk, bi, b4)),
        ]
        for label, pair, args in rows:
            finite.append(_finite_line(label, gi, pair, *args))
    at_inf = []
    for gi, label in ((1, "F14"), (2, "F25"), (3, "F36")):
        eq1 = [0j, 0j, 0j, 0j]
        eq1[0] = 1.0 + 0j
        eq2 = [0j, 0j, 0j, 0j]
        eq2[gi] = 1.0 + 0j
        at_inf.append(LineSpec(label, gi, 0, (), tuple(eq1), tuple(eq2),
                               at_infinity=True))
    catalog = LinesCatalog(theta, tuple(finite), tuple(at_inf))
    for line in catalog.finite + catalog.at_infinity:
        for X in line.sample_points(20):
            res = abs(_homogeneous_f(X, theta))
            if res > verify_tol * max(1.0, np.abs(X).max() ** 3):
                raise SingularSurfaceError(
                    f"line {line.label} fails the surface equation "
                    f"(residual {res:.3e}); check parameters"
                )
    return catalog


def _homogeneous_f(X, theta):
    t1, t2, t3, t4 = _theta_tuple(theta)
    X0, X1, X2, X3 = (complex(c) for c in X)
    return (X1 * X2 * X3 + X0 * (X1 * X1 + X2 * X2 + X3 * X3)
            - X0 * X0 * (t1 * X1 + t2 * X2 + t3 * X3) + t4 * X0**3)


def line_exchange_check(i, b: BParams, samples=20, tol=1e-9, guard=1e-3):
    """Verify that sigma_i swaps the four E/G pairs of the other two groups.

    For (i, j, k) a permutation the exchanged pairs are E_j <-> G_{j+3},
    E_{j+3} <-> G_j, E_k <-> G_{k+3}, E_{k+3} <-> G_k.  Sample points on each
    source line must land on the partner line (both directions), and must not
    satisfy the partner equations before mapping (non-degeneracy guard).
    Returns True, or raises AssertionError naming the failing pair.
    """
    catalog = lines_catalog(b)
    theta = catalog.theta
    j, k = [c for c in (1, 2, 3) if c != i]
    pairs = []
    for m in (j, k):
        pairs.append((f"E{m}", f"G{m + 3}"))
        pairs.append((f"E{m + 3}", f"G{m}"))
    for src_label, dst_label in pairs:
        for a_label, b_label in ((src_label, dst_label), (dst_label, src_label)):
            src, dst = catalog[a_label], catalog[b_label]
            worst_pre = 0.0
            for X in src.sample_points(samples, radius=1.3):
                x = np.asarray(X[1:]) / X[0]
                worst_pre = max(worst_pre, dst.residual(X))
                y = sigma_apply(i, x, theta)
                Y = np.concatenate([[1.0 + 0j], y])
                res = dst.residual(Y)
                if res > tol * max(1.0, np.abs(Y).max()):
                    raise AssertionError(
                        f"sigma_{i} does not map {a_label} onto {b_label}: "
                        f"residual {res:.3e}"
                    )
            if worst_pre < guard:
                raise AssertionError(
                    f"degenerate check: {a_label} already satisfies the "
                    f"equations of {b_label} before mapping"
                )
    return True


def random_surface_point(theta, rng, real=False, box=3.0):
    """A point on f = 0: draw (x1, x2) and solve the x3-quadric.

    With real=True, retries until the quadric has real roots, landing on the
    real surface slice (useful for seeding bounded orbits).
    """
    t = _theta_tuple(theta)
    for _ in range(10_000):
        if real:
            x1, x2 = rng.uniform(-box, box, 2)
        else:
            x1, x2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        bq = x1 * x2 - t[2]
        cq = x1 * x1 + x2 * x2 - t[0] * x1 - t[1] * x2 + t[3]
        disc = complex(bq * bq - 4 * cq)
        if real:
            if disc.real < 0 or abs(disc.imag) > 1e-12:
                continue
        x3 = (-bq + cmath.sqrt(disc)) / 2
        return np.array([x1, x2, x3], dtype=complex)
    raise RuntimeError("could not sample a surface point; is theta sensible?")
