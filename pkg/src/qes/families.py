"""The five potential families: potentials, energies, eigenfunctions.

Hyperbolic families use z = exp(-2 alpha x). Eigenfunctions are evaluated in
log form (log|gauge| + log|R|) so that grids reaching far into a growing or
decaying tail do not overflow before the caller rescales.

Two energy readings exist per level. ``stated_energy`` evaluates the printed
closed form literally; ``consistent_energy`` is the value implied by the
gauge factor and the potential, which is what the numerical oracle should
recover.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bd_recurrence import coeff_vector_from_ode
from .errors import DomainError, NumericalFailure, RejectedInput
from .numkit import RATIONAL
from .params import COULOMB_FAMILIES, TRIG_FAMILIES, FamilyParams, make_params, normalize_family

LOG_MAX = 700.0


def _arr(x):
    return np.asarray(x, dtype=float)


def _half_line(x, family):
    x = _arr(x)
    if np.any(x <= 0):
        bad = x[x <= 0].flat[0]
        raise DomainError(f"{family}: x={bad!r} outside the domain (0, inf)")
    return x


def _jf(p):
    return p.j2 / 2


# --- potentials ---------------------------------------------------------------

def _eckart_V(p, x):
    al, L, A, q, lam, j = p.f("alpha"), p.f("L"), p.f("A"), p.f("q"), _root(p), _jf(p)
    z = np.exp(-2 * al * x)
    omz = -np.expm1(-2 * al * x)
    bracket = L * (L + 1) * al**2 * 4 * z / omz**2 + A * al**2 * (1 + z) / omz
    qterm = q * al**2 * z**2 * (q * z**2 + (lam - 4 * j) * z - (4 * L - 4 * j + lam + 2)) / omz**2
    return bracket + qterm


def _rosen_morse_V(p, x):
    al, L, A, q, lam, j = p.f("alpha"), p.f("L"), p.f("A"), p.f("q"), _root(p), _jf(p)
    K = 4 * L - 4 * j + lam + 2
    out = np.empty_like(x)
    pos = x >= 0
    # x >= 0: z = exp(-2 alpha x) <= 1
    z = np.exp(-2 * al * x[pos])
    out[pos] = (-L * (L + 1) * al**2 * 4 * z / (1 + z) ** 2 + A * al**2 * (1 - z) / (1 + z)
                + q * al**2 * z**2 * (q * z**2 - (lam - 4 * j) * z - K) / (1 + z) ** 2)
    # x < 0: u = exp(2 alpha x) < 1
    u = np.exp(2 * al * x[~pos])
    with np.errstate(over="ignore"):
        out[~pos] = (-L * (L + 1) * al**2 * 4 * u / (1 + u) ** 2 + A * al**2 * (u - 1) / (u + 1)
                     + q * al**2 * (q / u**2 - (lam - 4 * j) / u - K) / (u + 1) ** 2)
    return out


def _coulomb_V(p, x):
    ell, q = p.f("ell"), p.f("q")
    a = p.f("a")
    eps = _root(p)
    return ell * (ell + 1) / x**2 + a / x - q * (eps + a) * x + q * q * x**2


def _oscillator_V(p, x):
    ell, a, q, j = p.f("ell"), p.f("a"), p.f("q"), _jf(p)
    return ((a * ell / 2 - 2 * q * (1 + 2 * j)) * x + (a * a / 4 - q * ell) * x**2
            - q * a * x**3 + q * q * x**4)


def _root(p):
    if p.root is None:
        raise RejectedInput(f"{p.family}: spectral root not set (the potential depends on it)")
    return float(p.root)


def printed_hulthen_V(p, x, *, term2_A=True, denom="printed"):
    """The displayed Hultén potential, optionally with its two suspect pieces repaired."""
    al, L, A, q, lam, j = p.f("alpha"), p.f("L"), p.f("A"), p.f("q"), _root(p), _jf(p)
    y = np.exp(-al * x)
    r = y / -np.expm1(-al * x)
    t1 = al**2 / 2 * (2 * L * (L + 1) + A) * r
    t2 = L * (L + 1) * (A if term2_A else 1.0) * (al * r) ** 2
    if denom == "printed":
        den = 4 * np.expm1(2 * al * x) ** 2
    else:
        den = 4 * np.expm1(al * x) ** 2
    t3 = q * al**2 / den * (q * np.exp(-2 * al * x) + (lam - 4 * j) * y - (4 * L - 4 * j + lam + 2))
    return t1 + t2 + t3


def printed_rosen_morse_V(p, x, *, trig="tan", qterm="printed"):
    """The displayed Rosen-Morse potential; ``trig``/``qterm`` switch the suspect pieces."""
    al, L, A, q, lam, j = p.f("alpha"), p.f("L"), p.f("A"), p.f("q"), _root(p), _jf(p)
    sech2 = 1 / np.cosh(al * x) ** 2
    odd = np.tan(al * x) if trig == "tan" else np.tanh(al * x)
    bracket = -L * (L + 1) * al**2 * sech2 + A * al**2 * odd
    if q == 0:
        qt = 0.0
    elif qterm == "printed":
        with np.errstate(divide="ignore", invalid="ignore"):
            qt = (q * al**2 / np.expm1(2 * al * x) ** 2
                  * (q * np.exp(-4 * al * x) + (lam - 4 * j) * np.exp(-2 * al * x)
                     - (4 * L - 4 * j + lam + 2)))
    else:
        qt = _rosen_morse_V(p, x) - (-L * (L + 1) * al**2 * sech2 + A * al**2 * np.tanh(al * x))
    return bracket + qt


def potential_value(p, x, as_printed=False):
    """V(x) for the family of ``p``; vectorized over x.

    Hultén and Rosen-Morse default to the transform-defined potentials; with
    ``as_printed`` the literal displays are returned instead.
    """
    fam = p.family
    scalar = np.isscalar(x)
    x = _arr(np.atleast_1d(x))
    if fam in ("eckart", "hulthen", "coulomb", "coulomb_eps"):
        x = _half_line(x, fam)
    if fam == "eckart":
        out = _eckart_V(p, x)
    elif fam == "hulthen":
        out = printed_hulthen_V(p, x) if as_printed else 0.25 * (_eckart_V(p, x / 2) - p.f("A") * p.f("alpha") ** 2)
    elif fam == "rosen_morse":
        out = printed_rosen_morse_V(p, x) if as_printed else _rosen_morse_V(p, x)
    elif fam in COULOMB_FAMILIES:
        out = _coulomb_V(p, x)
    else:
        out = _oscillator_V(p, x)
    return float(out[0]) if scalar else out


# --- energies -----------------------------------------------------------------

def _num(p):
    """Scalars in the precision of ``p`` (Fractions stay exact)."""
    conv = (lambda v: v) if p.mode == RATIONAL else float
    return conv


def eq6_energy(L, A, alpha, lam, j):
    return (A - (2 * L + lam / 2 + 4 * j + 3) ** 2) * alpha**2


def eckart_consistent_energy(L, A, alpha, lam, j):
    return (A - (2 * L + 2 * j + lam / 2 + 3) ** 2) * alpha**2


def stated_energy(p, root=None):
    """Literal evaluation of the family's printed energy formula."""
    p = p if root is None else p.with_root(root)
    c = _num(p)
    r = c(p.root)
    J = p.j if p.mode == RATIONAL else p.j2 / 2
    fam = p.family
    if fam in TRIG_FAMILIES:
        E6 = eq6_energy(c(p.L), c(p.A), c(p.alpha), r, J)
        if fam == "hulthen":
            return (E6 + c(p.A) * c(p.alpha) ** 2) / 4
        return E6
    if fam == "coulomb":
        return -(r + c(p.a)) ** 2 / 4 + 2 * c(p.q) * (c(p.ell) + 2 * J + Fraction(3, 2))
    if fam == "coulomb_eps":
        return 2 * c(p.q) * (c(p.ell) + 2 * J + Fraction(3, 2))
    return (r + 4 * J + 5) * c(p.a) / 2


def consistent_energy(p, root=None):
    """Energy implied by the gauge factor and the potential at this root."""
    p = p if root is None else p.with_root(root)
    c = _num(p)
    r = c(p.root)
    J = p.j if p.mode == RATIONAL else p.j2 / 2
    fam = p.family
    if fam in TRIG_FAMILIES:
        E = eckart_consistent_energy(c(p.L), c(p.A), c(p.alpha), r, J)
        if fam == "hulthen":
            return (E - c(p.A) * c(p.alpha) ** 2) / 4
        return E
    if fam in COULOMB_FAMILIES:
        return stated_energy(p)
    return -(r + 4 * J + 5) * c(p.a) / 2


# --- exact (q = 0) cases --------------------------------------------------------

@dataclass(frozen=True)
class ExactCase:
    family: str
    m: int
    root: object          # value that makes the ODE terminate at degree m
    root_printed: object  # closed form as printed
    E_printed: object     # printed closed-form energy
    E_chain: object       # printed energy formula evaluated at the printed root
    E_consistent: object  # energy implied by gauge factor and potential


def _exact(v):
    if isinstance(v, (int, Fraction, str)) and not isinstance(v, bool):
        return Fraction(v)
    return float(v)


def exact_case(family, L_or_ell, A_or_a, alpha=1, m=0, j=0):
    family = normalize_family(family)
    if int(m) != m or m < 0:
        raise RejectedInput("m must be a non-negative integer")
    L_or_ell, A_or_a, alpha, j = (_exact(v) for v in (L_or_ell, A_or_a, alpha, j))
    if family in TRIG_FAMILIES:
        L, A, al = L_or_ell, A_or_a, alpha
        n = L + m + 1
        if n == 0:
            raise DomainError("pole: L + m + 1 = 0")
        lam = A / n - 2 * (L + 2 * j - m + 2)
        E8 = al**2 / 4 * ((A / n) ** 2 + 4 * n**2)
        E6 = eq6_energy(L, A, al, lam, j)
        Ec = eckart_consistent_energy(L, A, al, lam, j)
        if family == "hulthen":
            shift = A * al**2
            return ExactCase(family, m, lam, lam, (E8 + shift) / 4, (E6 + shift) / 4, (Ec - shift) / 4)
        return ExactCase(family, m, lam, lam, E8, E6, Ec)
    if family == "coulomb":
        ell, a = L_or_ell, A_or_a
        n = ell + m + 1
        if n == 0:
            raise DomainError("pole: ell + m + 1 = 0")
        eps_p = -a * (1 + 1 / n)
        eps = -a + a / n
        E22 = ((a / 2) / n) ** 2
        chain = -(eps_p + a) ** 2 / 4
        Ec = -(eps + a) ** 2 / 4
        return ExactCase(family, m, eps, eps_p, E22, chain, Ec)
    raise RejectedInput(f"{family} has no q = 0 exactly solvable case")


# --- eigenfunctions -------------------------------------------------------------

def _poly_log_abs(c, v):
    """log|sum c_k v^k| and its sign, robust for large |v|."""
    c = np.asarray(c, dtype=float)
    v = _arr(v)
    d = len(c) - 1
    big = np.abs(v) > 1
    val = np.zeros_like(v)
    # |v| <= 1: plain Horner
    vs = v[~big]
    acc = np.zeros_like(vs)
    for ck in c[::-1]:
        acc = acc * vs + ck
    val[~big] = acc
    logscale = np.zeros_like(v)
    if d == 0:
        val[big] = c[0]
    elif np.any(big):
        vb = v[big]
        w = 1 / vb
        acc = np.zeros_like(vb)
        for ck in c:  # sum c_k w^(d-k)
            acc = acc * w + ck
        val[big] = acc
        logscale[big] = d * np.log(np.abs(vb))
        sgn_big = np.sign(vb) ** d
        val[big] *= sgn_big
    with np.errstate(divide="ignore"):
        return np.log(np.abs(val)) + logscale, np.sign(val)


@dataclass(frozen=True)
class EigenfunctionSpec:
    family: str
    params: FamilyParams
    root: float
    coeffs: tuple
    variable: str
    gauge: str
    sign_fix: float = 1.0

    def log_gauge(self, x):
        p = self.params
        x = _arr(x)
        fam = self.family
        j = _jf(p)
        if fam in ("eckart", "hulthen"):
            xe = x / 2 if fam == "hulthen" else x
            al, L, q, lam = p.f("alpha"), p.f("L"), p.f("q"), self.root
            z = np.exp(-2 * al * xe)
            return ((L - q / 2 + 1) * np.log(-np.expm1(-2 * al * xe))
                    + al * xe * (2 * L + 2 * j + 3 + lam / 2) - q * z / 2)
        if fam == "rosen_morse":
            al, L, q, lam = p.f("alpha"), p.f("L"), p.f("q"), self.root
            t = -2 * al * x
            with np.errstate(over="ignore"):
                return ((L - q / 2 + 1) * np.logaddexp(0.0, t)
                        + al * x * (2 * L + 2 * j + 3 + lam / 2) + q * np.exp(t) / 2)
        if fam in COULOMB_FAMILIES:
            ell, q = p.f("ell"), p.f("q")
            beta = (self.root + p.f("a")) / 2
            return (ell + 1) * np.log(x) + beta * x - q * x * x / 2
        ell, a, q = p.f("ell"), p.f("a"), p.f("q")
        return ell * x / 2 + a * x * x / 4 - q * x**3 / 3

    def mapped_variable(self, x):
        x = _arr(x)
        fam = self.family
        if fam == "eckart":
            return np.exp(-2 * self.params.f("alpha") * x)
        if fam == "hulthen":
            return np.exp(-self.params.f("alpha") * x)
        if fam == "rosen_morse":
            with np.errstate(over="ignore"):
                return -np.exp(-2 * self.params.f("alpha") * x)
        return x

    def log_abs(self, x):
        """(log|psi|, sign psi) on an array of points."""
        x = _arr(np.atleast_1d(x))
        if self.family in ("eckart", "hulthen", "coulomb", "coulomb_eps"):
            _half_line(x, self.family)
        lr, sr = _poly_log_abs(self.coeffs, self.mapped_variable(x))
        return self.log_gauge(x) + lr, sr * self.sign_fix

    def scaled_values(self, x):
        """psi / max|psi| over ``x`` together with log(max|psi|)."""
        la, s = self.log_abs(x)
        finite = np.isfinite(la)
        if not np.any(finite):
            raise NumericalFailure("eigenfunction vanishes or overflows on every point", "families")
        top = np.max(la[finite])
        with np.errstate(under="ignore"):
            vals = np.where(finite, s * np.exp(np.where(finite, la - top, -np.inf)), 0.0)
        if np.any(np.isposinf(la)):
            raise NumericalFailure("eigenfunction overflows on part of the grid", "families")
        return vals, top


def eigenfunction_value(spec, x):
    scalar = np.isscalar(x)
    la, s = spec.log_abs(x)
    if np.any(la > LOG_MAX):
        worst = _arr(np.atleast_1d(x))[np.argmax(la)]
        raise NumericalFailure(f"psi overflows at x={worst!r} (log|psi|={np.max(la):.1f})", "families")
    with np.errstate(under="ignore"):
        out = s * np.exp(la)
    return float(out[0]) if scalar else out


_VARS = {"eckart": "z=exp(-2*alpha*x)", "hulthen": "z=exp(-alpha*x)",
         "rosen_morse": "v=-exp(-2*alpha*x)", "coulomb": "x", "coulomb_eps": "x", "oscillator": "x"}
_GAUGES = {
    "eckart": "(1-z)^(L-q/2+1) exp(alpha x (2L+2j+3+lam/2) - q z/2)",
    "hulthen": "eckart gauge at x/2",
    "rosen_morse": "(1+exp(-2 alpha x))^(L-q/2+1) exp(alpha x (2L+2j+3+lam/2) + q exp(-2 alpha x)/2)",
    "coulomb": "x^(ell+1) exp(x (eps+a)/2 - q x^2/2)",
    "coulomb_eps": "x^(ell+1) exp(-q x^2/2)",
    "oscillator": "exp(ell x/2 + a x^2/4 - q x^3/3)",
}


def make_eigenfunction(p, root=None, coeffs=None, degree=None):
    """Assemble psi for one level; coefficients come from the ODE path when not given."""
    p = p if root is None else p.with_root(root)
    r = float(p.root)
    if coeffs is None:
        coeffs = coeff_vector_from_ode(p.family, p, r, degree).c
    spec = EigenfunctionSpec(p.family, p, r, tuple(coeffs), _VARS[p.family], _GAUGES[p.family])
    if p.family == "rosen_morse":
        la, s = spec.log_abs(np.array([0.0]))
        spec = EigenfunctionSpec(p.family, p, r, tuple(coeffs), spec.variable, spec.gauge,
                                 float(s[0]) if s[0] != 0 else 1.0)
    return spec


@dataclass
class QesLevel:
    root: float
    E_stated: float
    E_derived: float | None
    E_consistent: float
    coeffs: tuple
    residual: float | None = None
    constancy: float | None = None
    normalizable: bool | None = None
    fd_match: float | None = None


def natural_length(p):
    """Length scale used for default domains."""
    fam = p.family
    if fam == "eckart" or fam == "rosen_morse":
        return 1 / p.f("alpha")
    if fam == "hulthen":
        return 2 / p.f("alpha")
    q = p.f("q")
    if fam in COULOMB_FAMILIES:
        if q > 0:
            return 1 / np.sqrt(q)
        beta = abs((float(p.root) + p.f("a")) / 2) if p.root is not None else 0.0
        return 1 / max(beta, 1e-3)
    return q ** (-1 / 3)


def default_params(family):
    """Reference parameter points used by the CLI examples and scripts."""
    family = normalize_family(family)
    table = {
        "eckart": dict(j=Fraction(1, 2), L=1, A=-6, alpha=1, q=Fraction(1, 2)),
        "hulthen": dict(j=Fraction(1, 2), L=1, A=-6, alpha=1, q=Fraction(1, 2)),
        "rosen_morse": dict(j=Fraction(1, 2), L=1, A=-6, alpha=1, q=Fraction(1, 2)),
        "coulomb": dict(j=Fraction(1, 2), ell=0, a=2, q=1),
        "coulomb_eps": dict(j=Fraction(1, 2), ell=0, q=1),
        "oscillator": dict(j=0, ell=2, a=2, q=1),
    }
    return make_params(family, **table[family])
