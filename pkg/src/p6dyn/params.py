"""The four coupled parameter spaces of the system and the maps between them.

kappa lives on the affine slice 2*k0 + k1 + k2 + k3 + k4 = 1.  From it we
derive trace coordinates a, exponentials b, and the cubic-surface parameters
theta:

    a_i = 2 cos(pi k_i)  (i = 1,2,3),     a_4 = -2 cos(pi k_4)
    b_i = exp(i pi k_i)  (i = 1,2,3),     b_4 = -exp(i pi k_4)
    theta_i = a_i a_4 + a_j a_k,          theta_4 = a1 a2 a3 a4 + sum a_i^2 - 4

so that a_i = b_i + 1/b_i for all i.  The wall set collects the parameter
hyperplanes where the surface degenerates; off the walls the discriminant
below is nonzero and the projective cubic is smooth.
"""

from __future__ import annotations

import cmath
import itertools
import json
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "KappaParams",
    "MonodromyData",
    "BParams",
    "ThetaParams",
    "KAPPA_STAR",
    "kappa_params",
    "kappa_to_a",
    "kappa_to_b",
    "b_to_a",
    "a_to_theta",
    "rh",
    "on_wall",
    "WallReport",
    "discriminant",
    "ResolvedParams",
    "resolve_parameters",
    "load_parameters",
]

KAPPA_SUM_TOL = 1e-12


class KappaParams(NamedTuple):
    k0: complex
    k1: complex
    k2: complex
    k3: complex
    k4: complex

    def validate(self):
        s = 2 * self.k0 + self.k1 + self.k2 + self.k3 + self.k4
        if abs(s - 1) > KAPPA_SUM_TOL:
            raise ValueError(
                f"kappa violates 2*k0 + k1 + k2 + k3 + k4 = 1 (sum = {s})"
            )
        return self


class MonodromyData(NamedTuple):
    a1: complex
    a2: complex
    a3: complex
    a4: complex


class BParams(NamedTuple):
    b1: complex
    b2: complex
    b3: complex
    b4: complex

    def validate(self):
        if any(x == 0 for x in self):
            raise ValueError("b parameters must be nonzero")
        return self


class ThetaParams(NamedTuple):
    t1: complex
    t2: complex
    t3: complex
    t4: complex


def kappa_params(k0, k1, k2, k3, k4) -> KappaParams:
    return KappaParams(complex(k0), complex(k1), complex(k2),
                       complex(k3), complex(k4)).validate()


# generic work point used throughout the tests: on the affine slice and
# off every wall (all entries non-integral, all signed sums non-odd)
KAPPA_STAR = kappa_params(3 / 16, 1 / 8, 1 / 8, 1 / 8, 1 / 4)


def kappa_to_a(kappa: KappaParams) -> MonodromyData:
    _, k1, k2, k3, k4 = kappa
    return MonodromyData(
        2 * cmath.cos(cmath.pi * k1),
        2 * cmath.cos(cmath.pi * k2),
        2 * cmath.cos(cmath.pi * k3),
        -2 * cmath.cos(cmath.pi * k4),
    )


def kappa_to_b(kappa: KappaParams) -> BParams:
    _, k1, k2, k3, k4 = kappa
    i_pi = 1j * cmath.pi
    return BParams(
        cmath.exp(i_pi * k1),
        cmath.exp(i_pi * k2),
        cmath.exp(i_pi * k3),
        -cmath.exp(i_pi * k4),
    ).validate()


def b_to_a(b: BParams) -> MonodromyData:
    return MonodromyData(*(x + 1 / x for x in b))


def a_to_theta(a: MonodromyData) -> ThetaParams:
    a1, a2, a3, a4 = a
    return ThetaParams(
        a1 * a4 + a2 * a3,
        a2 * a4 + a1 * a3,
        a3 * a4 + a1 * a2,
        a1 * a2 * a3 * a4 + a1 * a1 + a2 * a2 + a3 * a3 + a4 * a4 - 4,
    )


def rh(kappa: KappaParams) -> ThetaParams:
    """Parameter-level Riemann-Hilbert map kappa -> theta."""
    return a_to_theta(kappa_to_a(kappa))


class WallReport(NamedTuple):
    on_wall: bool
    witnesses: tuple

    def __bool__(self):
        return self.on_wall


def _near_integer(z: complex, tol: float):
    m = round(z.real)
    return (abs(z - m) <= tol), m


def _near_odd_integer(z: complex, tol: float):
    m = round((z.real - 1) / 2)
    return (abs(z - (2 * m + 1)) <= tol), 2 * m + 1


def on_wall(kappa: KappaParams, tol: float = 1e-9) -> WallReport:
    """Test whether kappa lies on one of the degenerate hyperplanes.

    Walls: some k_i (i = 1..4) integral, or some signed sum
    k1 +- k2 +- k3 +- k4 an odd integer.  Returns the violated relations.
    """
    _, k1, k2, k3, k4 = kappa
    witnesses = []
    for i, k in enumerate((k1, k2, k3, k4), start=1):
        hit, m = _near_integer(k, tol)
        if hit:
            witnesses.append(f"k{i} = {m}")
    for signs in itertools.product((1, -1), repeat=3):
        s = k1 + signs[0] * k2 + signs[1] * k3 + signs[2] * k4
        hit, m = _near_odd_integer(s, tol)
        if hit:
            pretty = "k1 " + " ".join(
                f"{'+' if sg > 0 else '-'} k{i}" for sg, i in zip(signs, (2, 3, 4))
            )
            witnesses.append(f"{pretty} = {m}")
    return WallReport(bool(witnesses), tuple(witnesses))


def discriminant(b: BParams) -> complex:
    """Discriminant of the cubic surface in the exponential parameters.

    prod (b_l - 1/b_l)^2 * prod over all 16 sign patterns of (b^eps - 1);
    vanishes exactly when the projective cubic is singular.
    """
    b = BParams(*b).validate()
    value = 1 + 0j
    for x in b:
        value *= (x - 1 / x) ** 2
    for eps in itertools.product((1, -1), repeat=4):
        prod = 1 + 0j
        for x, e in zip(b, eps):
            prod *= x if e > 0 else 1 / x
        value *= prod - 1
    return value


# --- external JSON interface ---

@dataclass(frozen=True)
class ResolvedParams:
    """A parameter set resolved to theta, keeping whatever else is known.

    theta is always available; kappa and b only when derivable from the
    input (b cannot be recovered from theta alone without root finding,
    which is out of scope here).
    """

    source: str
    theta: ThetaParams
    kappa: KappaParams | None = None
    b: BParams | None = None

    def require_b(self) -> BParams:
        if self.b is None:
            raise ValueError(
                "this operation needs the b parameters; supply kappa or b "
                "(theta alone does not determine them)"
            )
        return self.b


def _as_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    raise ValueError(f"cannot read complex number from {v!r}; use [re, im]")


def resolve_parameters(obj: dict) -> ResolvedParams:
    """Resolve a {"kappa": ...} / {"theta": ...} / {"b": ...} mapping."""
    keys = [k for k in ("kappa", "theta", "b") if k in obj]
    if len(keys) != 1:
        raise ValueError(
            "parameter object must contain exactly one of 'kappa', 'theta', 'b'"
        )
    key = keys[0]
    values = [_as_complex(v) for v in obj[key]]
    if key == "kappa":
        if len(values) != 5:
            raise ValueError("kappa needs 5 entries")
        kappa = kappa_params(*values)
        return ResolvedParams("kappa", rh(kappa), kappa=kappa, b=kappa_to_b(kappa))
    if key == "b":
        if len(values) != 4:
            raise ValueError("b needs 4 entries")
        b = BParams(*values).validate()
        return ResolvedParams("b", a_to_theta(b_to_a(b)), b=b)
    if len(values) != 4:
        raise ValueError("theta needs 4 entries")
    return ResolvedParams("theta", ThetaParams(*values))


def load_parameters(text_or_path: str) -> ResolvedParams:
    """Accept inline JSON or @file syntax."""
    if text_or_path.startswith("@"):
        with open(text_or_path[1:]) as fh:
            obj = json.load(fh)
    else:
        obj = json.loads(text_or_path)
    return resolve_parameters(obj)
