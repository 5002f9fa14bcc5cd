"""Bender–Dunne polynomial sequences and their critical polynomials.

Each family's recurrence has the shape

    A_m P_{m+1} + B_m P_m + C_m P_{m-1} (+ D_m P_{m-2}) = 0,   P_0 = 1,

with A_m vanishing at m = 2j. Rows m < 2j are solved for P_{m+1}; the row
m = 2j, with its P_{2j+1} term gone, is the critical polynomial whose roots
quantize the spectrum.

Eigenfunction coefficients are computed on a separate path: the governing
ODE for the polynomial factor is written as p2 R'' + p1 R' + p0 R = 0 and
powers of the variable are collected mechanically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ExactlySolvableRegime, NotAnEigenvalue, NumericalFailure, RejectedInput
from .numkit import FLOAT, RATIONAL, UniPoly, real_roots, to_scalar
from .params import TRIG_FAMILIES, FamilyParams, normalize_family

# sigma_min / sigma_max of the column-scaled ODE matrix at an accepted root
NULL_TOL = 1e-7


@dataclass(frozen=True)
class RecurrenceSpec:
    family: str  # recurrence tag: the three hyperbolic families share "eckart"
    j2: int
    A: tuple
    B: tuple
    C: tuple
    D: tuple | None
    var: str
    mode: str
    q: object = 0


@dataclass(frozen=True)
class BdSequence:
    polys: tuple
    critical: UniPoly
    family: str
    params: FamilyParams


@dataclass(frozen=True)
class CoeffVector:
    c: tuple
    root: float
    family: str
    normalization: str = "c0=1"

    def __len__(self):
        return len(self.c)


def _s(v, mode):
    return to_scalar(v, mode)


def make_recurrence(family, params, as_printed=False):
    """Recurrence coefficients for rows m = 0..2j.

    ``as_printed`` only matters for the general Coulomb family, whose
    printed diagonal carries +a where the ODE gives -a.
    """
    family = normalize_family(family)
    if params.j2 < 0:
        raise RejectedInput("j must be non-negative")
    mode = params.mode
    s = lambda v: _s(v, mode)  # noqa: E731
    J = Fraction(params.j2, 2) if mode == RATIONAL else params.j2 / 2
    q = s(params.q)
    rows = range(params.j2 + 1)
    var = params.var if family != "hulthen" and family != "rosen_morse" else "λ"

    def poly(c0, c1=0):
        return UniPoly((c0, c1), var, mode)

    A = tuple(2 * q * (2 * J - m) for m in rows)
    D = None
    if family in TRIG_FAMILIES:
        L, Ap = s(params.L), s(params.A)
        B = tuple(poly(-(2 * (L + 2 * J - m + 2)) * (L + m + 1) + Ap, -(L + m + 1)) for m in rows)
        C = tuple(poly(m * (4 * L + 4 * J - 2 * m + 6), m) for m in rows)
        tag = "eckart"
    elif family == "coulomb":
        ell, a = s(params.ell), s(params.a)
        sign = 1 if as_printed else -1
        B = tuple(poly(a * (ell + m + 1) + sign * a, ell + m + 1) for m in rows)
        C = tuple(poly(m * (2 * ell + m + 1)) for m in rows)
        tag = "coulomb"
    elif family == "coulomb_eps":
        ell = s(params.ell)
        B = tuple(poly(0, -1) for m in rows)
        C = tuple(poly(m * (2 * ell + m + 1)) for m in rows)
        tag = "coulomb_eps"
    else:
        ell, a = s(params.ell), s(params.a)
        A = tuple(2 * q * (m - 2 * J) for m in rows)
        quarter = Fraction(1, 4) if mode == RATIONAL else 0.25
        B = tuple(poly(quarter * (2 * a * (4 * J - 2 * m + 4) - ell * ell), quarter * 2 * a) for m in rows)
        C = tuple(poly(-m * ell) for m in rows)
        D = tuple(poly(-m * (m - 1)) for m in rows)
        tag = "oscillator"
    return RecurrenceSpec(tag, params.j2, A, B, C, D, var, mode, q)


def _row(spec, m, polys):
    zero = UniPoly((), spec.var, spec.mode)
    acc = spec.B[m] * polys[m]
    if m >= 1:
        acc = acc + spec.C[m] * polys[m - 1]
    if spec.D is not None and m >= 2:
        acc = acc + spec.D[m] * polys[m - 2]
    return acc if m >= 0 else zero


def build_sequence(spec, params=None):
    """P_0..P_{2j} by forward division, plus the critical polynomial."""
    if spec.j2 > 0 and spec.q == 0:
        raise ExactlySolvableRegime(
            "q = 0 with j > 0: every A_m vanishes; use families.exact_case for this regime")
    polys = [UniPoly((1,), spec.var, spec.mode)]
    for m in range(spec.j2):
        polys.append(-_row(spec, m, polys).scale(1 / spec.A[m] if spec.mode == FLOAT
                                                 else Fraction(1) / spec.A[m]))
    critical = _row(spec, spec.j2, polys)
    return BdSequence(tuple(polys), critical, spec.family, params)


def sequence_for(params, as_printed=False):
    return build_sequence(make_recurrence(params.family, params, as_printed), params)


def monic_normal_form(seq, m):
    """P_m scaled to leading coefficient 1; m = 2j + 1 gives the monic critical polynomial."""
    if m == len(seq.polys):
        return seq.critical.monic()
    if not 0 <= m < len(seq.polys):
        raise RejectedInput(f"m={m} outside 0..{len(seq.polys)}")
    return seq.polys[m].monic()


def spectrum_roots(seq, tol=1e-12):
    if seq.critical.is_zero():
        raise NumericalFailure("critical polynomial vanishes identically", "bd_recurrence")
    return real_roots(seq.critical, tol)


# --- ODE path ---------------------------------------------------------------

def ode_coefficients(family, params, root):
    """(p2, p1, p0) of the polynomial-factor ODE, as float UniPolys in z or x."""
    family = normalize_family(family)
    p = params.as_float()
    j = p.j2 / 2
    q = p.q
    r = float(root)
    if family in TRIG_FAMILIES:
        L, A, lam = p.L, p.A, r
        p2 = (0.0, 2.0, -2.0)
        p1 = (-4 * (L + j + 1) - lam, 4 * j + lam, 2 * q)
        p0 = (lam * (L + 1) + 2 * L * (L + 3) - A + 4 * j * (L + 1) + 4, -4 * j * q)
        var = "z"
    elif family in ("coulomb", "coulomb_eps"):
        ell = p.ell
        a = -r if family == "coulomb_eps" else p.a
        beta = (r + a) / 2
        p2 = (0.0, 1.0)
        p1 = (2 * (ell + 1), 2 * beta, -2 * q)
        p0 = (2 * beta * (ell + 1) - a, 4 * q * j)
        var = "x"
    else:
        ell, a = p.ell, p.a
        E = -0.5 * a * (r + 4 * j + 5)
        p2 = (1.0,)
        p1 = (ell, a, -2 * q)
        p0 = (ell * ell / 4 + a / 2 + E, 4 * q * j)
        var = "x"
    return tuple(UniPoly(c, var, FLOAT) for c in (p2, p1, p0))


def ode_matrix(family, params, root, degree=None):
    """Columns: the ODE operator applied to 1, v, v^2, ..., v^degree."""
    degree = params.j2 if degree is None else int(degree)
    p2, p1, p0 = ode_coefficients(family, params, root)
    cols = []
    for n in range(degree + 1):
        mono = lambda k: UniPoly((0.0,) * k + (1.0,), p2.var, FLOAT)  # noqa: E731
        img = p0 * mono(n)
        if n >= 1:
            img = img + p1 * mono(n - 1).scale(n)
        if n >= 2:
            img = img + p2 * mono(n - 2).scale(n * (n - 1))
        cols.append(img.coeffs)
    nrow = max((len(c) for c in cols), default=1)
    M = np.zeros((max(nrow, degree + 1), degree + 1))
    for n, c in enumerate(cols):
        M[: len(c), n] = c
    return M


def coeff_vector_from_ode(family, params, root, degree=None, tol=NULL_TOL):
    """Polynomial-factor coefficients (c_0 = 1) at a spectral root.

    Raises :class:`NotAnEigenvalue` when the collected system has no
    non-trivial solution, i.e. ``root`` does not quantize.
    """
    M = ode_matrix(family, params, root, degree)
    if not np.all(np.isfinite(M)):
        raise NumericalFailure("non-finite ODE coefficient matrix", "bd_recurrence")
    if M.shape[1] == 1:
        if np.any(np.abs(M[:, 0]) > tol * max(1.0, np.abs(M).max())):
            raise NotAnEigenvalue(f"root {root!r} does not satisfy the degree-0 condition", "bd_recurrence")
        return CoeffVector((1.0,), float(root), normalize_family(family))
    scale = np.linalg.norm(M, axis=0)
    scale[scale == 0] = 1.0
    Ms = M / scale
    _, sv, vt = np.linalg.svd(Ms)
    ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if ratio > tol:
        raise NotAnEigenvalue(
            f"root {float(root)!r} is not an eigenvalue (sigma ratio {ratio:.3e})", "bd_recurrence")
    c = vt[-1] / scale
    cmax = np.abs(c).max()
    if abs(c[0]) < 1e-12 * cmax:
        # polynomial factor vanishes at the origin of its variable
        k = int(np.argmax(np.abs(c) >= 1e-12 * cmax))
        c[:k] = 0.0
        c = c / c[k]
        return CoeffVector(tuple(float(v) for v in c), float(root), normalize_family(family),
                           normalization=f"c{k}=1")
    c = c / c[0]
    return CoeffVector(tuple(float(v) for v in c), float(root), normalize_family(family))
