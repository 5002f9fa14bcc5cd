"""Per-family parameter bundle shared by every layer."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import RejectedInput
from .numkit import FLOAT, RATIONAL, to_scalar

TRIG_FAMILIES = ("eckart", "hulthen", "rosen_morse")
COULOMB_FAMILIES = ("coulomb", "coulomb_eps")
FAMILIES = TRIG_FAMILIES + COULOMB_FAMILIES + ("oscillator",)

# Fields each family needs besides j and q.
REQUIRED = {
    "eckart": ("L", "A", "alpha"),
    "hulthen": ("L", "A", "alpha"),
    "rosen_morse": ("L", "A", "alpha"),
    "coulomb": ("ell", "a"),
    "coulomb_eps": ("ell",),
    "oscillator": ("ell", "a"),
}


def normalize_family(tag):
    tag = str(tag).strip().lower().replace("-", "_")
    aliases = {"rosenmorse": "rosen_morse", "hulten": "hulthen", "coulombeps": "coulomb_eps"}
    tag = aliases.get(tag, tag)
    if tag not in FAMILIES:
        raise RejectedInput(f"unknown family {tag!r}; expected one of {', '.join(FAMILIES)}")
    return tag


def parse_j2(j):
    """Return the integer 2j from 0.5, '1/2', Fraction(3, 2), 1, ..."""
    if isinstance(j, bool):
        raise RejectedInput("j must be a number")
    try:
        jf = Fraction(str(j).strip()) if isinstance(j, str) else Fraction(j)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise RejectedInput(f"cannot parse j={j!r}") from exc
    two_j = 2 * jf
    if two_j.denominator != 1 or two_j < 0:
        raise RejectedInput(f"j must be a non-negative integer or half-integer, got {j!r}")
    return int(two_j)


def spectral_var(family):
    return "λ" if family in TRIG_FAMILIES else "ε"


@dataclass(frozen=True)
class FamilyParams:
    """Symbols of one family at one parameter point.

    ``root`` is the spectral value (λ for the hyperbolic families, ε
    otherwise) and is ``None`` until a level has been picked. For
    ``coulomb_eps`` the charge ``a`` is tied to the root by a = -ε.
    """

    family: str
    j2: int
    q: object = 0
    L: object = None
    A: object = None
    alpha: object = None
    ell: object = None
    a: object = None
    root: object = None
    m: int | None = None
    mode: str = RATIONAL

    @property
    def j(self):
        return Fraction(self.j2, 2)

    @property
    def var(self):
        return spectral_var(self.family)

    def with_root(self, root):
        root = to_scalar(root, self.mode) if self.mode == RATIONAL and _exactish(root) else root
        if self.family == "coulomb_eps":
            return replace(self, root=root, a=-root)
        return replace(self, root=root)

    def with_family(self, family):
        return replace(self, family=normalize_family(family))

    def as_float(self):
        conv = {k: (None if getattr(self, k) is None else float(getattr(self, k)))
                for k in ("q", "L", "A", "alpha", "ell", "a", "root")}
        return replace(self, mode=FLOAT, **conv)

    def f(self, name):
        """Float value of a field."""
        v = getattr(self, name)
        if v is None:
            raise RejectedInput(f"{self.family}: parameter {name} is not set")
        return float(v)

    def echo(self):
        out = {"family": self.family, "j": str(self.j), "q": self.q}
        for k in REQUIRED[self.family]:
            out[k] = getattr(self, k)
        if self.family == "coulomb_eps" and self.a is not None:
            out["a"] = self.a
        if self.root is not None:
            out["root"] = self.root
        if self.m is not None:
            out["m"] = self.m
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in out.items()}


def _exactish(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def make_params(family, j=0, *, q=0, L=None, A=None, alpha=None, ell=None, a=None,
                eps=None, root=None, m=None, precision=None):
    """Validate and build a :class:`FamilyParams`.

    Precision defaults to rational when every numeric input is an int,
    Fraction or a decimal/fraction string, and to float otherwise.
    """
    family = normalize_family(family)
    j2 = parse_j2(j)
    if eps is not None and root is None:
        root = eps
    raw = {"q": q, "L": L, "A": A, "alpha": alpha, "ell": ell, "a": a, "root": root}
    given = {k: v for k, v in raw.items() if v is not None}
    if precision is None:
        precision = RATIONAL if all(_exactish(v) or isinstance(v, str) for v in given.values()) else FLOAT
    if precision not in (RATIONAL, FLOAT):
        raise RejectedInput(f"unknown precision {precision!r}")
    vals = {}
    for k, v in given.items():
        if isinstance(v, str):
            try:
                v = Fraction(v.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise RejectedInput(f"cannot parse {k}={v!r}") from exc
        vals[k] = to_scalar(v, precision)
    missing = [k for k in REQUIRED[family] if k not in vals]
    if missing:
        raise RejectedInput(f"{family} needs parameter(s): {', '.join(missing)}")
    if "alpha" in vals and not vals["alpha"] > 0:
        raise RejectedInput("alpha must be positive")
    if family in COULOMB_FAMILIES and vals["q"] < 0:
        raise RejectedInput("q must be non-negative for the Coulomb families")
    if family in COULOMB_FAMILIES and vals["ell"] < 0:
        raise RejectedInput("ell must be non-negative")
    if family == "oscillator":
        if vals["a"] == 0:
            raise RejectedInput("oscillator needs a != 0")
        if not vals["q"] > 0:
            raise RejectedInput("oscillator needs q > 0")
    if m is not None:
        if int(m) != m or m < 0:
            raise RejectedInput(f"m must be a non-negative integer, got {m!r}")
        m = int(m)
    if family == "coulomb_eps":
        if "root" in vals:
            vals["a"] = -vals["root"]
        elif "a" in vals:
            vals["root"] = -vals["a"]
    return FamilyParams(family=family, j2=j2, m=m, mode=precision, **vals)
