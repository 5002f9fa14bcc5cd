"""Numerical checks that do not rely on any closed-form energy.

* ``fd_spectrum``: lowest eigenvalues of the 3-point finite-difference
  Hamiltonian on a Dirichlet grid, by Sturm-count multisection.
* ``residual_norm`` / ``derive_energy``: 5-point second differences of an
  assembled eigenfunction, giving |(-d2 + V - E) psi| and V - psi''/psi.
* ``compute_levels``: the full pipeline from parameters to checked levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import families as fam
from .bd_recurrence import coeff_vector_from_ode, sequence_for, spectrum_roots
from .errors import DegenerateGrid, DomainError, NumericalFailure, RejectedInput
from .params import COULOMB_FAMILIES, TRIG_FAMILIES

MIN_POINTS = 64
NODE_CUT = 1e-8
WINDOW_DECADES = 23.0  # keep |psi| >= e^-23 max (about 1e-10) in audit windows
STEP_PER_WAVENUMBER = 0.008
NODE_BAND = 16
MAX_POINTS = 400_000
LOG_PSI_MAX = 60.0
STIFF_MAX = 300.0


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise RejectedInput(f"grid needs n >= {MIN_POINTS} interior points, got {self.n}")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise RejectedInput(f"bad grid interval [{self.x_min}, {self.x_max}]")

    @property
    def h(self):
        return (self.x_max - self.x_min) / (self.n + 1)

    def points(self):
        return self.x_min + self.h * np.arange(1, self.n + 1)


# --- eigensolver ----------------------------------------------------------------

def _tridiagonal(V, g):
    x = g.points()
    v = np.asarray(V(x), dtype=float)
    bad = ~np.isfinite(v)
    if np.any(bad):
        raise DomainError(f"potential is not finite at x={x[bad][0]!r}")
    h2 = g.h**2
    return 2.0 / h2 + v, np.full(g.n - 1, 1.0 / h2**2)


def sturm_count(d, e2, mu):
    """Number of eigenvalues below each entry of ``mu`` (vectorized over mu)."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    tiny = np.finfo(float).tiny ** 0.5
    count = np.zeros(mu.shape, dtype=np.int64)
    piv = d[0] - mu
    for i in range(len(d)):
        if i:
            piv = d[i] - mu - e2[i - 1] / piv
        piv = np.where(piv == 0.0, -tiny, piv)
        count += piv < 0
    return count


def _bracket(d, e2):
    off = np.sqrt(e2)
    rad = np.zeros_like(d)
    rad[:-1] += off
    rad[1:] += off
    return float(np.min(d - rad)), float(np.max(d + rad))


def _multisect(d, e2, targets, lo, hi, splits=32, rtol=1e-14):
    """Locate eigenvalues with indices ``targets`` (0-based) in [lo, hi]."""
    targets = np.asarray(targets)
    a = np.full(targets.shape, lo, dtype=float)
    b = np.full(targets.shape, hi, dtype=float)
    frac = np.arange(1, splits) / splits
    for _ in range(200):
        width = b - a
        if np.all(width <= rtol * np.maximum(1.0, np.maximum(abs(a), abs(b)))):
            break
        pts = a[:, None] + width[:, None] * frac[None, :]
        cnt = sturm_count(d, e2, pts.ravel()).reshape(pts.shape)
        # eigenvalue index t lies left of a point iff count(point) > t
        right = cnt > targets[:, None]
        first = np.argmax(right, axis=1)
        has = right.any(axis=1)
        new_b = np.where(has, pts[np.arange(len(targets)), first], b)
        new_a = np.where(has & (first > 0), pts[np.arange(len(targets)), np.maximum(first - 1, 0)], a)
        new_a = np.where(~has, pts[:, -1], new_a)
        a, b = new_a, new_b
    return 0.5 * (a + b)


def fd_spectrum(V, g, k):
    """Lowest ``k`` eigenvalues of -d2/dx2 + V with Dirichlet ends, O(h^2)."""
    if int(k) != k or k < 1 or k > g.n:
        raise RejectedInput(f"k must be in 1..{g.n}")
    d, e2 = _tridiagonal(V, g)
    lo, hi = _bracket(d, e2)
    return [float(v) for v in _multisect(d, e2, np.arange(int(k)), lo, hi)]


def fd_eigenvalues_between(V, g, lo, hi):
    """All grid eigenvalues in [lo, hi)."""
    d, e2 = _tridiagonal(V, g)
    c_lo, c_hi = sturm_count(d, e2, [lo, hi])
    idx = np.arange(c_lo, c_hi)
    if len(idx) == 0:
        return []
    glo, ghi = _bracket(d, e2)
    return [float(v) for v in _multisect(d, e2, idx, min(lo, glo), max(hi, ghi))]


# --- finite-difference checks ------------------------------------------------------

def _second_difference(psi, h):
    return (-psi[:-4] + 16 * psi[1:-3] - 30 * psi[2:-2] + 16 * psi[3:-1] - psi[4:]) / (12 * h * h)


def _grid_data(spec, g):
    x = g.points()
    psi, _ = spec.scaled_values(x)
    if not np.any(psi[2:-2] != 0):
        raise DegenerateGrid("psi underflows on every interior grid point", "oracle")
    V = fam.potential_value(spec.params, x)
    return x, psi, V


def residual_norm(spec, E, g):
    """|| -psi'' + (V - E) psi ||_2 / ||psi||_2 over interior points (2-point end bands dropped)."""
    x, psi, V = _grid_data(spec, g)
    d2 = _second_difference(psi, g.h)
    core = psi[2:-2]
    norm = np.linalg.norm(core)
    if norm == 0:
        raise DegenerateGrid("psi vanishes on the grid", "oracle")
    return float(np.linalg.norm(-d2 + (V[2:-2] - E) * core) / norm)


def _valid_points(psi):
    """Interior points usable for V - psi''/psi.

    Excludes |psi| < 1e-8 max|psi| and a band of NODE_BAND points on each side
    of every sign change, where roundoff in psi dominates the ratio.
    """
    core = psi[2:-2]
    big = np.abs(core) >= NODE_CUT * np.max(np.abs(psi))
    flips = np.flatnonzero(np.sign(psi[1:]) != np.sign(psi[:-1]))
    near = np.zeros(len(psi), dtype=bool)
    for i in flips:
        near[max(i - NODE_BAND + 1, 0): i + NODE_BAND + 1] = True
    return big & ~near[2:-2]


def derive_energy(spec, g):
    """(mean, std) of V - psi''/psi over valid interior points."""
    x, psi, V = _grid_data(spec, g)
    d2 = _second_difference(psi, g.h)
    ok = _valid_points(psi)
    if np.count_nonzero(ok) < 16:
        raise DegenerateGrid(f"only {np.count_nonzero(ok)} usable points for the gauge oracle", "oracle")
    e = V[2:-2][ok] - d2[ok] / psi[2:-2][ok]
    return float(np.mean(e)), float(np.std(e))


# --- domains and windows -------------------------------------------------------------

def is_half_line(family):
    return family in ("eckart", "hulthen") or family in COULOMB_FAMILIES


def _finite_top(la):
    fin = np.isfinite(la)
    return np.max(la[fin]) if np.any(fin) else -np.inf


def default_domain(spec):
    """Truncated natural domain: [1e-3 s, 20 s] on the half line, [-X, X] otherwise.

    On the full line X doubles from s until |psi| at both ends is below 1e-12
    of its maximum, or until psi stops being representable there.
    """
    s = fam.natural_length(spec.params)
    if is_half_line(spec.family):
        return 1e-3 * s, 20.0 * s
    X = s
    for _ in range(8):
        with np.errstate(over="ignore", invalid="ignore"):
            la, _ = spec.log_abs(np.linspace(-2 * X, 2 * X, 801))
        if not np.all(np.isfinite(la[[0, -1]])) or np.max(np.abs(la)) > 600:
            break
        top = _finite_top(la[200:601])
        if la[200] < top - 27.7 and la[600] < top - 27.7:
            break
        X *= 2
    return -X, X


def audit_domain(spec):
    """Region scanned for the audit window: away from the origin singularity on the half line."""
    s = fam.natural_length(spec.params)
    if is_half_line(spec.family):
        return 0.1 * s, 20.0 * s
    lo, hi = default_domain(spec)
    return max(lo, -8 * s), min(hi, 8 * s)


def audit_grid(spec, E=None, domain=None):
    """Grid restricted to where psi is representable relative to its maximum.

    The step is tied to the local wavenumber sqrt|V - E| so the 5-point
    stencil error stays well below the audit thresholds.
    """
    lo, hi = domain or audit_domain(spec)
    probe = np.linspace(lo, hi, 4001)
    with np.errstate(over="ignore", invalid="ignore"):
        la, _ = spec.log_abs(probe)
    fin = np.isfinite(la)
    if not np.any(fin):
        raise DegenerateGrid("psi is not representable anywhere on the audit domain", "oracle")
    # Large |log psi| costs absolute accuracy in psi itself, which the
    # 1/h^2 stencil amplifies; stay in the segment where |log psi| is moderate.
    E = fam.consistent_energy(spec.params) if E is None else float(E)
    with np.errstate(over="ignore", invalid="ignore"):
        stiff = np.abs(fam.potential_value(spec.params, probe) - float(E))
    stiff = np.where(np.isfinite(stiff), stiff, np.inf)
    # the 5-point residual is absolute, so keep |V - E| moderate as well
    soft = stiff <= max(STIFF_MAX, 2.0 * np.min(stiff))
    mag = np.where(fin & soft, np.abs(la), np.inf)
    if not np.any(np.isfinite(mag)):
        mag = np.where(fin, np.abs(la), np.inf)
        soft = np.ones_like(soft)
    centre = int(np.argmin(mag))
    ok = soft & (mag <= max(LOG_PSI_MAX, mag[centre] + 20.0))
    left = centre
    while left > 0 and ok[left - 1]:
        left -= 1
    right = centre
    while right < len(ok) - 1 and ok[right + 1]:
        right += 1
    seg = np.zeros_like(ok)
    seg[left:right + 1] = True
    top = np.max(la[seg])
    keep = np.where(seg & (la >= top - WINDOW_DECADES))[0]
    i0, i1 = max(keep[0] - 1, 0), min(keep[-1] + 1, len(probe) - 1)
    if i1 - i0 < 20:
        i0, i1 = max(i0 - 10, 0), min(i1 + 10, len(probe) - 1)
    a, b = probe[i0], probe[i1]
    xs = np.linspace(a, b, 2001)
    V = fam.potential_value(spec.params, xs)
    kappa = np.sqrt(np.max(np.abs(V - float(E))) + 1.0)
    h = STEP_PER_WAVENUMBER / kappa
    if is_half_line(spec.family):
        # psi ~ x^p with non-integer p near the origin: keep h/x small
        h = min(h, a / 100)
    n = int(np.clip((b - a) / h, 4 * MIN_POINTS, MAX_POINTS))
    return GridSpec(float(a), float(b), n)


def _log_integral(spec, lo, hi, n=40001):
    x = np.linspace(lo, hi, n)
    la, _ = spec.log_abs(x)
    la = np.where(np.isfinite(la), 2 * la, -np.inf)
    top = np.max(la)
    if not np.isfinite(top):
        return top
    return top + np.log(np.sum(np.exp(la - top)) * (x[1] - x[0]))


def normalizability(spec, domain=None):
    """Ratio of the norm integral over the doubled domain to the original one."""
    lo, hi = domain or default_domain(spec)
    if is_half_line(spec.family):
        lo2, hi2 = lo / 2, 2 * hi
    else:
        lo2, hi2 = 2 * lo, 2 * hi
    with np.errstate(over="ignore", invalid="ignore"):
        i1 = _log_integral(spec, lo, hi)
        i2 = _log_integral(spec, lo2, hi2)
    if not np.isfinite(i1) or np.isnan(i2):
        return float("inf")
    return float(np.exp(min(i2 - i1, 700.0)))


def is_normalizable(spec, domain=None, ratio=1.01):
    return normalizability(spec, domain) < ratio


# --- pipeline -------------------------------------------------------------------------

def level_specs(params):
    """(root, EigenfunctionSpec) for every real quantized root of ``params``."""
    if params.q == 0 and (params.j2 > 0 or params.m is not None) and params.family != "oscillator" \
            and params.family != "coulomb_eps":
        m = params.m or 0
        if params.family in TRIG_FAMILIES:
            ex = fam.exact_case(params.family, params.L, params.A, params.alpha, m, params.j)
        else:
            ex = fam.exact_case("coulomb", params.ell, params.a, 1, m)
        p = params.with_root(ex.root)
        cv = coeff_vector_from_ode(p.family, p, float(ex.root), degree=m)
        return [(ex.root, fam.make_eigenfunction(p, coeffs=cv.c))], None
    seq = sequence_for(params)
    roots = spectrum_roots(seq)
    out = []
    for r in roots.distinct:
        p = params.with_root(r)
        out.append((r, fam.make_eigenfunction(p)))
    return out, roots


def fd_check(spec, E, n=None):
    """Nearest finite-difference eigenvalue to E on the default domain, and the tolerance used."""
    lo, hi = default_domain(spec)
    if is_half_line(spec.family):
        # no grid point at the singularity; an offset start biases attractive levels by O(x_min)
        lo = 0.0
    if n is None:
        n = 20000
    g = GridSpec(lo, hi, n)
    V = lambda x: fam.potential_value(spec.params, x)  # noqa: E731
    scale = 1.0 + abs(E)
    tol = max(1e-3, 5 * g.h**2 * scale**2)
    found = fd_eigenvalues_between(V, g, E - 50 * tol, E + 50 * tol)
    if not found:
        return None, tol
    near = min(found, key=lambda v: abs(v - E))
    return near, tol


def compute_levels(params, with_fd=False, grid=None):
    """Levels sorted by derived energy, with residuals and normalizability.

    ``grid`` is a GridSpec shared by all levels, or a callable mapping an
    EigenfunctionSpec to its grid; by default each level gets ``audit_grid``.
    """
    pairs, roots = level_specs(params)
    levels = []
    for r, spec in pairs:
        p = spec.params
        Ec = float(fam.consistent_energy(p))
        g = grid(spec) if callable(grid) else (grid or audit_grid(spec, Ec))
        Ed, dev = derive_energy(spec, g)
        res = residual_norm(spec, Ed, g)
        norm = is_normalizable(spec)
        lvl = fam.QesLevel(root=float(r), E_stated=float(fam.stated_energy(p)), E_derived=Ed,
                           E_consistent=Ec, coeffs=spec.coeffs, residual=res,
                           constancy=dev, normalizable=norm)
        if with_fd and norm:
            near, _ = fd_check(spec, Ed)
            lvl.fd_match = near
        levels.append(lvl)
    levels.sort(key=lambda lv: lv.E_derived)
    return levels, roots


def require_finite(value, what):
    if not np.isfinite(value):
        raise NumericalFailure(f"{what} is not finite", "oracle")
    return value


def audit_family(p, g=None):
    """Formula audit; implemented in :mod:`qes.audit`."""
    from .audit import audit_family as _audit

    return _audit(p, g)
