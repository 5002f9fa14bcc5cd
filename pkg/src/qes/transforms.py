"""Maps between families and the alpha -> 0 limit scanner.

The Hultén and Rosen-Morse maps only relabel the family: the potentials
themselves are defined in ``families`` from the Eckart expression (x -> x/2
for Hultén, z -> -z for Rosen-Morse). The limit maps send target
parameters to source parameters at a given alpha; the scanner then
measures sup |(V - E)_source - (V - E)_target| on a probe grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import families as fam
from .errors import NumericalFailure, RejectedInput
from .numkit import FLOAT
from .params import COULOMB_FAMILIES, FamilyParams

MAP_VARIANTS = ("corrected", "printed", "corrupted")
COULOMB_PROBE = (0.2, 3.0)
OSCILLATOR_PROBE = (-2.0, 2.0)
PROBE_POINTS = 51
DEFAULT_ALPHAS = (0.04, 0.02, 0.01)


def _need_trig(p, what):
    if p.family != "eckart":
        raise RejectedInput(f"{what} expects Eckart parameters, got {p.family}")


def eckart_to_hulthen(p):
    """Hultén parameters sharing (L, A, q, alpha, j) and the spectral root."""
    _need_trig(p, "eckart_to_hulthen")
    return p.with_family("hulthen")


def eckart_to_rosen_morse(p):
    _need_trig(p, "eckart_to_rosen_morse")
    return p.with_family("rosen_morse")


def hulthen_energy_printed(E_eckart, A, alpha):
    return (E_eckart + A * alpha**2) / 4


def hulthen_energy_from_eckart(E_eckart, A, alpha):
    """Energy of the x -> x/2 image of an Eckart level: V_H = (V_E(x/2) - A alpha^2)/4."""
    return (E_eckart - A * alpha**2) / 4


def _check_variant(variant):
    if variant not in MAP_VARIANTS:
        raise RejectedInput(f"unknown map variant {variant!r}; expected one of {', '.join(MAP_VARIANTS)}")


def _check_alpha(alpha):
    alpha = float(alpha)
    if not alpha > 0 or not np.isfinite(alpha):
        raise RejectedInput(f"alpha must be positive and finite, got {alpha!r}; "
                            "the limit is taken by the scanner, not by substitution")
    return alpha


def _target_root(t):
    if t.root is None:
        raise RejectedInput(f"{t.family}: the limit map needs the spectral value eps")
    return t.f("root")


def coulomb_limit_params(target, alpha, variant="corrected"):
    """Eckart parameters whose (V - E) tends to the Coulomb one as alpha -> 0.

    ``printed`` keeps the displayed A-term 4aq/alpha^3, which makes the
    limit diverge; ``corrected`` uses q(a + eps)/(4 alpha^3);
    ``corrupted`` drops the 3q^2/(8 alpha^4) term (negative control).
    """
    _check_variant(variant)
    if target.family not in COULOMB_FAMILIES:
        raise RejectedInput(f"coulomb_limit_params expects a Coulomb target, got {target.family}")
    al = _check_alpha(alpha)
    t = target.as_float()
    ell, a, q, eps, j = t.ell, t.a, t.q, _target_root(t), t.j2 / 2
    lam = 2 + 4 * j + (a + eps) / al - 2 * q / al**2
    third = 4 * a * q if variant == "printed" else q * (a + eps) / 4
    A = a / al - q * ell / al**2 + third / al**3
    if variant != "corrupted":
        A -= 3 * q * q / (8 * al**4)
    return FamilyParams("eckart", t.j2, q=q / (2 * al**2), L=ell + q / (4 * al**2), A=A,
                        alpha=al, root=lam, mode=FLOAT)


def oscillator_limit_params(target, alpha, variant="corrected"):
    """Rosen-Morse parameters whose (V - E) tends to the oscillator one as alpha -> 0.

    ``printed`` keeps the displayed L-term -3q/(2 alpha^3); ``corrected``
    uses -3q/(4 alpha^3); ``corrupted`` drops 3q^2/(8 alpha^6) from A.
    """
    _check_variant(variant)
    if target.family != "oscillator":
        raise RejectedInput(f"oscillator_limit_params expects an oscillator target, got {target.family}")
    al = _check_alpha(alpha)
    t = target.as_float()
    ell, a, q, eps, j = t.ell, t.a, t.q, _target_root(t), t.j2 / 2
    if not q > 0:
        raise RejectedInput("the oscillator map needs q > 0")
    cubic = 3 * q / 2 if variant == "printed" else 3 * q / 4
    L = -ell / (4 * al) + a / (2 * al**2) - cubic / al**3
    lam = eps + 3 * ell / (2 * al) - a / al**2 + 2 * q / al**3
    A = ((2 * a * ell - q * (3 * eps + 4 * j + 10)) / (4 * al**3) - 7 * q * ell / (8 * al**4)
         + q * a / (4 * al**5))
    if variant != "corrupted":
        A -= 3 * q * q / (8 * al**6)
    return FamilyParams("rosen_morse", t.j2, q=q / (2 * al**3), L=L, A=A, alpha=al, root=lam, mode=FLOAT)


def shifted_potential(p, x):
    """V(x) - E with the energy implied by the eigenfunction."""
    return fam.potential_value(p, x) - float(fam.consistent_energy(p))


@dataclass(frozen=True)
class LimitMap:
    name: str
    source: str
    target: FamilyParams
    substitute: Callable[[float], FamilyParams]
    probe: tuple = COULOMB_PROBE
    variant: str = "corrected"

    def probe_grid(self, n=PROBE_POINTS):
        return np.linspace(self.probe[0], self.probe[1], n)


def coulomb_limit_map(target, variant="corrected"):
    _check_variant(variant)
    return LimitMap("coulomb", "eckart", target,
                    lambda al: coulomb_limit_params(target, al, variant), COULOMB_PROBE, variant)


def oscillator_limit_map(target, variant="corrected"):
    _check_variant(variant)
    return LimitMap("oscillator", "rosen_morse", target,
                    lambda al: oscillator_limit_params(target, al, variant), OSCILLATOR_PROBE, variant)


def identity_map(target, probe=COULOMB_PROBE):
    """Source equal to target for every alpha: the deviation is identically zero."""
    return LimitMap("identity", target.family, target, lambda al: target, probe, "identity")


@dataclass(frozen=True)
class ConvergenceRecord:
    map_name: str
    variant: str
    alphas: tuple
    deviations: tuple
    orders: tuple  # orders[i] compares alphas[i-1] and alphas[i]; orders[0] is None
    probe: tuple
    threshold: float | None = None  # deviations strictly decrease for alpha <= threshold
    notes: tuple = field(default_factory=tuple)

    @property
    def decreasing(self):
        d = self.deviations
        return all(d[i + 1] < d[i] for i in range(len(d) - 1))

    @property
    def converged(self):
        """Not flagged: deviations strictly decrease (or are identically zero)."""
        return self.decreasing or all(v == 0 for v in self.deviations)

    @property
    def min_order(self):
        vals = [o for o in self.orders if o is not None]
        return min(vals) if vals else None

    def rows(self):
        return [(a, d, o) for a, d, o in zip(self.alphas, self.deviations, self.orders)]


def limit_convergence_scan(lmap, probe_grid=None, alphas=DEFAULT_ALPHAS):
    """Sup-norm deviation of (V - E) at each alpha, with log-ratio order estimates."""
    alphas = tuple(float(a) for a in alphas)
    if not alphas:
        raise RejectedInput("alpha list is empty")
    for a in alphas:
        _check_alpha(a)
    if any(alphas[i + 1] >= alphas[i] for i in range(len(alphas) - 1)):
        raise RejectedInput("alphas must be strictly decreasing")
    x = lmap.probe_grid() if probe_grid is None else np.asarray(probe_grid, dtype=float)
    if x.size == 0:
        raise RejectedInput("probe grid is empty")
    ref = shifted_potential(lmap.target, x)
    devs = []
    for al in alphas:
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                src = shifted_potential(lmap.substitute(al), x)
                dev = float(np.max(np.abs(src - ref)))
        except (FloatingPointError, OverflowError, ZeroDivisionError) as exc:
            raise NumericalFailure(f"overflow in the {lmap.name} map at alpha={al!r}: {exc}",
                                   "transforms") from exc
        if not np.isfinite(dev):
            raise NumericalFailure(f"non-finite deviation in the {lmap.name} map at alpha={al!r}",
                                   "transforms")
        devs.append(dev)
    orders = [None]
    for i in range(1, len(alphas)):
        if devs[i - 1] > 0 and devs[i] > 0:
            orders.append(float(np.log(devs[i - 1] / devs[i]) / np.log(alphas[i - 1] / alphas[i])))
        else:
            orders.append(None)
    threshold = None
    for i in range(len(devs)):
        if all(devs[k + 1] < devs[k] for k in range(i, len(devs) - 1)):
            threshold = alphas[i]
            break
    rec = ConvergenceRecord(lmap.name, lmap.variant, alphas, tuple(devs), tuple(orders),
                            (float(x[0]), float(x[-1]), int(x.size)), threshold)
    if rec.converged:
        return rec
    return replace(rec, notes=("deviation does not decrease with alpha: limit not reached",))


def rosen_morse_mirror_spread(p, x):
    """Spread of log|psi_RM(x)| - log|psi_E(-x)| over ``x``.

    Zero spread would mean psi_RM(x) is proportional to the Eckart
    eigenfunction reflected to -x. The statement is tested here, not assumed.
    """
    pf = p.as_float()
    rm = fam.make_eigenfunction(pf.with_family("rosen_morse"))
    x = np.asarray(x, dtype=float)
    al, L, q, lam, j = pf.alpha, pf.L, pf.q, rm.root, pf.j2 / 2
    w = np.exp(2 * al * x)  # the Eckart variable at -x
    la_e = ((L - q / 2 + 1) * np.log(np.abs(np.expm1(2 * al * x)))
            - al * x * (2 * L + 2 * j + 3 + lam / 2) - q * w / 2)
    lr, _ = fam._poly_log_abs(rm.coeffs, w)
    la_rm, _ = rm.log_abs(x)
    d = la_rm - (la_e + lr)
    d = d[np.isfinite(d)]
    if d.size < 2:
        raise NumericalFailure("mirror check: no finite comparison points", "transforms")
    return float(np.max(d) - np.min(d))


def rosen_morse_imag_part(p, x, shift_denominator=2):
    """Relative imaginary part of the Eckart potential continued by x -> x + i pi/(k alpha).

    k = 2 is the shift used for the canonical Rosen-Morse family; k = 4 is
    the displayed one. Evaluated in complex arithmetic from the Eckart
    expression, independently of the real closed form in ``families``.
    """
    pf = p.as_float()
    al, L, A, q, lam, j = pf.alpha, pf.L, pf.A, pf.q, pf.f("root"), pf.j2 / 2
    xc = np.asarray(x, dtype=float) + 1j * np.pi / (shift_denominator * al)
    z = np.exp(-2 * al * xc)
    omz = 1 - z
    V = (L * (L + 1) * al**2 * 4 * z / omz**2 + A * al**2 * (1 + z) / omz
         + q * al**2 * z**2 * (q * z**2 + (lam - 4 * j) * z - (4 * L - 4 * j + lam + 2)) / omz**2)
    scale = np.maximum(np.abs(V), 1.0)
    return float(np.max(np.abs(V.imag) / scale)), V.real


def with_target_root(target, eps):
    return replace(target, root=eps) if target.family != "coulomb_eps" else target.with_root(eps)
