"""Numerical dynamics on the cubic surface: orbit iteration, Lyapunov
exponent estimation, and a multi-start Gauss-Newton oracle that hunts all
periodic points independently of the exact counting formula.

The oracle solves the overdetermined system (word^N(x) - x, f(x)) = 0 over
ambient C^3 in the least-squares sense, with Levenberg-Marquardt damping and
analytic Jacobians.  Accepted roots get a high-precision polish (mpmath, 40
digits) before deduplication so that genuinely distinct roots separate at the
dedupe scale.  Searches are batched; with several threads the batch is split
into fixed-size chunks whose contents do not depend on the thread count, so
results are reproducible for a given seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from . import cohomology
from .params import discriminant
from .surface import EscapeError, _OTHERS, _theta_tuple, f_eval, grad_f, word_apply
from .words import CoxeterWord, classify, free_reduce, is_analytically_stable

__all__ = [
    "OrbitRecord",
    "iterate_orbit",
    "LyapunovEstimate",
    "lyapunov",
    "FixedPointSet",
    "find_fixed_points",
    "ConsistencyRow",
    "count_consistency",
    "SEARCH_CHUNK",
]

ORBIT_ESCAPE_NORM = 1e8
SEARCH_CHUNK = 512
POLISH_DPS = 40


def _letters(w):
    red = free_reduce(w if isinstance(w, CoxeterWord) else CoxeterWord(tuple(w)))
    return red.letters


@dataclass
class OrbitRecord:
    word: CoxeterWord
    seed: np.ndarray
    n_steps: int
    sample_stride: int
    samples: np.ndarray          # (n_samples, 3) complex, includes the seed
    sample_steps: np.ndarray     # iterate index of each sample
    escaped: bool
    escape_step: int | None
    max_f_drift: float           # max |f| / (1 + ||x||^3) along the orbit


def iterate_orbit(w, x0, theta, n_steps, sample_stride=1) -> OrbitRecord:
    """Iterate the word map, recording every sample_stride-th point.

    Escape (norm above 1e8) flags the record and returns the partial orbit.
    """
    letters = _letters(w)
    theta = _theta_tuple(theta)
    x = np.array(x0, dtype=complex)
    samples = [x.copy()]
    steps = [0]
    drift = float(abs(f_eval(x, theta)) / (1 + np.abs(x).max() ** 3))
    escaped = False
    escape_step = None
    for n in range(1, n_steps + 1):
        try:
            x = word_apply(letters, x, theta, escape_norm=ORBIT_ESCAPE_NORM)
        except EscapeError:
            escaped, escape_step = True, n
            break
        if np.abs(x).max() > ORBIT_ESCAPE_NORM:
            escaped, escape_step = True, n
            break
        drift = max(drift, float(abs(f_eval(x, theta)) / (1 + np.abs(x).max() ** 3)))
        if n % sample_stride == 0:
            samples.append(x.copy())
            steps.append(n)
    return OrbitRecord(CoxeterWord(letters), np.array(x0, dtype=complex),
                       n_steps, sample_stride, np.array(samples),
                       np.array(steps), escaped, escape_step, drift)


@dataclass
class LyapunovEstimate:
    word: CoxeterWord
    seed: np.ndarray
    n_steps: int          # word applications actually used
    renorm_stride: int
    L_plus: float
    L_minus: float
    reliable: bool        # False when the orbit escaped early


def _chart_frame(x, g):
    """Tangent frame at x in the chart dropping the steepest coordinate.

    Returns (drop index c, 3x2 embedding of the chart plane into the tangent
    space ker df).
    """
    c = int(np.argmax(np.abs(g)))
    keep = [t for t in range(3) if t != c]
    E = np.zeros((3, 2), dtype=complex)
    for col, u in enumerate(keep):
        E[u, col] = 1.0
        E[c, col] = -g[u] / g[c]
    return c, keep, E


def lyapunov(w, x0, theta, n_steps, renorm_stride=1) -> LyapunovEstimate:
    """Both Lyapunov exponents of the word map along one orbit.

    The tangent map is reduced to 2x2 in the chart that eliminates the
    coordinate with the largest |df/dx_i|, rescaled so the invariant area
    form has unit determinant (hence L+ + L- = 0 up to rounding), and
    QR-orthonormalized every renorm_stride steps.
    """
    letters = _letters(w)
    theta = _theta_tuple(theta)
    x = np.array(x0, dtype=complex)
    logs = np.zeros(2)
    Q = np.eye(2, dtype=complex)
    done = 0
    reliable = True
    for n in range(n_steps):
        g0 = grad_f(x, theta)
        c0, _, E = _chart_frame(x, g0)
        with np.errstate(over="ignore", invalid="ignore"):
            y, J = _word_jacobian(letters, x, theta)
        if not np.isfinite(y).all() or np.abs(y).max() > ORBIT_ESCAPE_NORM:
            reliable = False
            break
        g1 = grad_f(y, theta)
        c1 = int(np.argmax(np.abs(g1)))
        keep1 = [t for t in range(3) if t != c1]
        A = (J @ E)[keep1, :]
        # unit area normalization: |det A| * |g0[c0]/g1[c1]| = 1 pointwise
        A = A * math.sqrt(abs(g0[c0] / g1[c1]))
        Q = A @ Q
        done += 1
        if done % renorm_stride == 0:
            Q, R = np.linalg.qr(Q)
            logs += np.log(np.abs(np.diag(R)))
        x = y
    if done and done % renorm_stride != 0:
        Q, R = np.linalg.qr(Q)
        logs += np.log(np.abs(np.diag(R)))
    if done == 0:
        return LyapunovEstimate(CoxeterWord(letters), np.asarray(x0), 0,
                                renorm_stride, math.nan, math.nan, False)
    exps = sorted(logs / done, reverse=True)
    return LyapunovEstimate(CoxeterWord(letters), np.asarray(x0), done,
                            renorm_stride, float(exps[0]), float(exps[1]),
                            reliable)


def _word_jacobian(letters, x, theta):
    J = np.eye(3, dtype=complex)
    y = np.array(x, dtype=complex)
    for i in reversed(letters):
        j, k = _OTHERS[i]
        D = np.eye(3, dtype=complex)
        D[i - 1, i - 1] = -1.0
        D[i - 1, j] = -y[k]
        D[i - 1, k] = -y[j]
        J = D @ J
        y[i - 1] = theta[i - 1] - y[i - 1] - y[j] * y[k]
    return y, J


# --- batched residual/Jacobian for the fixed point search ---

def _batch_apply(letters, X, theta, with_jac):
    m = X.shape[0]
    Y = X.copy()
    J = np.broadcast_to(np.eye(3, dtype=complex), (m, 3, 3)).copy() if with_jac else None
    for i in reversed(letters):
        j, k = _OTHERS[i]
        if with_jac:
            D = np.broadcast_to(np.eye(3, dtype=complex), (m, 3, 3)).copy()
            D[:, i - 1, i - 1] = -1.0
            D[:, i - 1, j] = -Y[:, k]
            D[:, i - 1, k] = -Y[:, j]
            J = D @ J
        Y[:, i - 1] = theta[i - 1] - Y[:, i - 1] - Y[:, j] * Y[:, k]
    return Y, J


def _batch_residual(letters, X, theta, with_jac=True):
    Y, J = _batch_apply(letters, X, theta, with_jac)
    R = np.concatenate([Y - X, f_eval(X, theta)[:, None]], axis=1)
    if not with_jac:
        return R, None
    Jr = np.concatenate(
        [J - np.eye(3, dtype=complex)[None], grad_f(X, theta)[:, None, :]], axis=1
    )
    return R, Jr


def _lm_chunk(letters, X, theta, maxiter=120):
    """Levenberg-Marquardt on one chunk of starts; returns converged points."""
    lam = np.full(X.shape[0], 1e-3)
    diag = np.arange(3)
    with np.errstate(over="ignore", invalid="ignore"):
        R, Jr = _batch_residual(letters, X, theta)
        cost = (np.abs(R) ** 2).sum(axis=1)
        cost = np.where(np.isfinite(cost), cost, np.inf)
        for _ in range(maxiter):
            A = np.einsum("mij,mik->mjk", Jr.conj(), Jr)
            g = np.einsum("mij,mi->mj", Jr.conj(), R)
            A2 = A.copy()
            A2[:, diag, diag] += lam[:, None] * (1 + np.abs(A[:, diag, diag]))
            A2[~np.isfinite(A2).all(axis=(1, 2))] = np.eye(3)
            g = np.where(np.isfinite(g), g, 0)
            try:
                step = np.linalg.solve(A2, g[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                A2[:, diag, diag] += 1e-6
                step = np.linalg.solve(A2, g[:, :, None])[:, :, 0]
            Xn = X - step
            Rn, _ = _batch_residual(letters, Xn, theta, with_jac=False)
            costn = (np.abs(Rn) ** 2).sum(axis=1)
            costn = np.where(np.isfinite(costn), costn, np.inf)
            accept = costn < cost
            X = np.where(accept[:, None], Xn, X)
            cost = np.where(accept, costn, cost)
            lam = np.clip(np.where(accept, lam * 0.33, lam * 2.5), 1e-14, 1e10)
            R, Jr = _batch_residual(letters, X, theta)
            R = np.where(np.isfinite(R), R, 1e9)
            Jr = np.where(np.isfinite(Jr), Jr, 0)
    return X


def _polish_root(letters, x, theta, iters=8):
    """Gauss-Newton refinement in 40-digit arithmetic; returns (point, resid)."""
    with mp.workdps(POLISH_DPS):
        t = [mp.mpc(c) for c in theta]
        z = [mp.mpc(c) for c in x]

        def apply_jac(z):
            J = mp.eye(3)
            y = list(z)
            for i in reversed(letters):
                j, k = _OTHERS[i]
                D = mp.eye(3)
                D[i - 1, i - 1] = mp.mpf(-1)
                D[i - 1, j] = -y[k]
                D[i - 1, k] = -y[j]
                J = D * J
                y[i - 1] = t[i - 1] - y[i - 1] - y[j] * y[k]
            return y, J

        def fval(z):
            return (z[0] * z[1] * z[2] + z[0] ** 2 + z[1] ** 2 + z[2] ** 2
                    - t[0] * z[0] - t[1] * z[1] - t[2] * z[2] + t[3])

        def gradf(z):
            return [z[1] * z[2] + 2 * z[0] - t[0],
                    z[0] * z[2] + 2 * z[1] - t[1],
                    z[0] * z[1] + 2 * z[2] - t[2]]

        for _ in range(iters):
            y, J = apply_jac(z)
            r = [y[0] - z[0], y[1] - z[1], y[2] - z[2], fval(z)]
            g = gradf(z)
            Jr = mp.matrix(4, 3)
            for a in range(3):
                for bcol in range(3):
                    Jr[a, bcol] = J[a, bcol] - (1 if a == bcol else 0)
            for bcol in range(3):
                Jr[3, bcol] = g[bcol]
            JH = Jr.H
            A = JH * Jr
            rhs = JH * mp.matrix(r)
            try:
                step = mp.lu_solve(A, rhs)
            except Exception:
                break
            z = [z[a] - step[a] for a in range(3)]
        y, _ = apply_jac(z)
        resid = max(abs(y[a] - z[a]) for a in range(3)) + abs(fval(z))
        return np.array([complex(c) for c in z]), float(resid)


@dataclass
class FixedPointSet:
    word: CoxeterWord
    period: int
    points: list = field(default_factory=list)     # polished points
    residuals: list = field(default_factory=list)
    basin_counts: list = field(default_factory=list)
    starts_used: int = 0
    tol_resid: float = 1e-10
    tol_dedupe: float = 1e-6

    @property
    def count(self):
        return len(self.points)

    def to_json_dict(self):
        return {
            "word": self.word.to_text(),
            "N": self.period,
            "found_count": self.count,
            "starts": self.starts_used,
            "points": [
                {
                    "x": [[c.real, c.imag] for c in pt],
                    "residual": r,
                    "basin": bc,
                }
                for pt, r, bc in zip(self.points, self.residuals, self.basin_counts)
            ],
        }


def find_fixed_points(w, period, theta, starts=2000, tol_resid=1e-10,
                      tol_dedupe=1e-6, seed=0, start_scale=3.0, b=None,
                      threads=1) -> FixedPointSet:
    """Multi-start search for all points with word^period(x) = x on f = 0.

    Starts are complex Gaussian draws (deterministic for a given seed).  An
    empty result is a valid outcome.  When the b parameters are supplied the
    search refuses near-singular surfaces, where periodic points may collide
    and the exact counts do not apply.
    """
    letters = _letters(w)
    if not is_analytically_stable(CoxeterWord(letters)):
        raise cohomology.NotAnalyticallyStableError(
            "fixed point search needs an analytically stable word; "
            "use minimal_form first"
        )
    if classify(CoxeterWord(letters)).is_elementary:
        raise cohomology.ElementaryWordError(
            "elementary words have curves of periodic points; the finite "
            "count theorem does not apply"
        )
    if b is not None and abs(discriminant(b)) < 1e-8:
        raise ValueError(
            "parameters are too close to the discriminant locus "
            "(|disc| < 1e-8); periodic points may collide"
        )
    theta = _theta_tuple(theta)
    full = tuple(letters) * period
    rng = np.random.default_rng(seed)
    X0 = (rng.normal(size=(starts, 3)) + 1j * rng.normal(size=(starts, 3)))
    X0 = X0 * start_scale
    chunks = [X0[i:i + SEARCH_CHUNK] for i in range(0, starts, SEARCH_CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda c: _lm_chunk(full, c, theta), chunks))
    else:
        results = [_lm_chunk(full, c, theta) for c in chunks]
    X = np.concatenate(results, axis=0)
    with np.errstate(over="ignore", invalid="ignore"):
        Y, _ = _batch_apply(full, X, theta, with_jac=False)
        res = np.abs(Y - X).max(axis=1) + np.abs(f_eval(X, theta))
    scale = 1 + np.abs(X).max(axis=1)
    good = np.isfinite(res) & (res < tol_resid * scale)

    out = FixedPointSet(CoxeterWord(letters), period, starts_used=starts,
                        tol_resid=tol_resid, tol_dedupe=tol_dedupe)
    # polish, then dedupe (single-threaded merge)
    polished = {}
    for x in X[good]:
        key = tuple(np.round(x, 8))  # collapse trivially identical floats
        if key not in polished:
            polished[key] = (*_polish_root(full, x, theta), 0)
        pt, r, c = polished[key]
        polished[key] = (pt, r, c + 1)
    for pt, r, nbasin in polished.values():
        if r > tol_resid * (1 + np.abs(pt).max()):
            continue
        merged = False
        for idx, existing in enumerate(out.points):
            if np.abs(pt - existing).max() < tol_dedupe * (1 + np.abs(existing).max()):
                out.basin_counts[idx] += nbasin
                merged = True
                break
        if not merged:
            out.points.append(pt)
            out.residuals.append(r)
            out.basin_counts.append(nbasin)
    return out


@dataclass
class ConsistencyRow:
    period: int
    formula_affine: int
    found: int
    starts: int
    escalated: bool

    @property
    def deficit(self):
        return self.formula_affine - self.found

    @property
    def excess(self):
        return self.found - self.formula_affine


def count_consistency(w, theta, n_max, starts=2000, seed=0, tol_resid=1e-10,
                      tol_dedupe=1e-6, b=None, threads=1,
                      escalation_factor=4):
    """Oracle counts against the exact formula for periods 1..n_max.

    The oracle is a lower bound (multi-start can miss basins), so a deficit
    triggers one automatic re-run with escalation_factor more starts before
    the row is flagged.  An excess always indicates a dedupe failure.
    """
    letters = _letters(w)
    rows = []
    for period in range(1, n_max + 1):
        formula_affine, _ = cohomology.periodic_count(letters, period)
        fps = find_fixed_points(letters, period, theta, starts=starts,
                                tol_resid=tol_resid, tol_dedupe=tol_dedupe,
                                seed=seed, b=b, threads=threads)
        escalated = False
        if fps.count < formula_affine:
            escalated = True
            fps = find_fixed_points(letters, period, theta,
                                    starts=starts * escalation_factor,
                                    tol_resid=tol_resid,
                                    tol_dedupe=tol_dedupe,
                                    seed=seed + 1, b=b, threads=threads)
        rows.append(ConsistencyRow(period, formula_affine, fps.count,
                                   fps.starts_used, escalated))
    return rows
