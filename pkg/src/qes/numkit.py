"""Scalar and univariate-polynomial arithmetic plus real-root isolation.

Two scalar modes are supported: exact rationals (``fractions.Fraction``)
and IEEE doubles. A polynomial never mixes modes. Rational polynomials get
exact Sturm-sequence root isolation; float polynomials go through a balanced
companion matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

import numpy as np
from scipy.linalg import matrix_balance

from .errors import NumericalFailure, RejectedInput

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

STURM_TOL = 1e-12
COMPANION_IMAG_TOL = 1e-9
FLOAT_MERGE_TOL = 1e-7


def to_scalar(value, mode):
    """Coerce ``value`` to the scalar type of ``mode``.

    Floats are converted to rationals exactly (binary expansion), so callers
    that want 1/10 rather than 0.1000000000000000055 must pass a Fraction or
    a decimal string.
    """
    if mode == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (Rational, str)):
            return Fraction(value)
        if isinstance(value, Real):
            v = float(value)
            if not np.isfinite(v):
                raise RejectedInput(f"non-finite value {value!r} in rational mode")
            return Fraction(v)
        raise RejectedInput(f"cannot interpret {value!r} as a rational scalar")
    if mode == FLOAT:
        return float(value)
    raise RejectedInput(f"unknown scalar mode {mode!r}")


def is_rational_value(value):
    return isinstance(value, (Rational, Fraction)) and not isinstance(value, bool)


@dataclass(frozen=True)
class UniPoly:
    """Polynomial in one variable, coefficients in ascending powers.

    Trailing zeros are stripped on construction, so ``coeffs == ()`` is the
    zero polynomial and ``coeffs[-1]`` is otherwise the leading coefficient.
    """

    coeffs: tuple
    var: str = "λ"
    mode: str = RATIONAL

    def __post_init__(self):
        if self.mode not in MODES:
            raise RejectedInput(f"unknown scalar mode {self.mode!r}")
        cs = [to_scalar(c, self.mode) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c, var="λ", mode=RATIONAL):
        return cls((c,), var, mode)

    @classmethod
    def monomial(cls, var="λ", mode=RATIONAL, power=1, coeff=1):
        return cls((0,) * power + (coeff,), var, mode)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lead(self):
        if not self.coeffs:
            raise RejectedInput("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _zero(self):
        return 0 if self.mode == RATIONAL else 0.0

    def __call__(self, x):
        acc = self._zero() * x if isinstance(x, np.ndarray) else self._zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _check(self, other):
        if other.mode != self.mode:
            raise RejectedInput(f"scalar mode mismatch: {self.mode} vs {other.mode}")
        if other.var != self.var:
            raise RejectedInput(f"variable mismatch: {self.var} vs {other.var}")

    def _like(self, coeffs):
        return UniPoly(tuple(coeffs), self.var, self.mode)

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = self._like((other,))
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        z = self._zero()
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return self._like(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return self._like(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = self._like((other,))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = to_scalar(c, self.mode)
        return self._like(c * x for x in self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return self.scale(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return self._like(())
        out = [self._zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for k, b in enumerate(other.coeffs):
                out[i + k] += a * b
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise RejectedInput("only non-negative integer powers are supported")
        out = self._like((1,))
        for _ in range(k):
            out = out * self
        return out

    def derivative(self):
        return self._like(k * c for k, c in enumerate(self.coeffs) if k)

    def divmod(self, other):
        self._check(other)
        if other.is_zero():
            raise RejectedInput("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quo = [self._zero()] * max(len(rem) - dq, 0)
        lead = other.lead
        for k in range(len(rem) - 1, dq - 1, -1):
            if self.mode == RATIONAL:
                c = rem[k] / lead
            else:
                c = rem[k] / lead
            quo[k - dq] = c
            for i, b in enumerate(other.coeffs):
                rem[k - dq + i] -= c * b
            rem[k] = self._zero()
        return self._like(quo), self._like(rem[:dq] if dq > 0 else ())

    def monic(self):
        if self.is_zero():
            return self
        lead = self.lead
        if self.mode == RATIONAL:
            return self._like(c / lead for c in self.coeffs)
        return self._like(c / lead for c in self.coeffs)

    def to_float(self):
        return UniPoly(tuple(float(c) for c in self.coeffs), self.var, FLOAT)

    def to_rational(self):
        return UniPoly(tuple(to_scalar(c, RATIONAL) for c in self.coeffs), self.var, RATIONAL)

    def negate_variable(self):
        """p(-v)."""
        return self._like(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"({c})*{self.var}")
            else:
                terms.append(f"({c})*{self.var}^{k}")
        return " + ".join(reversed(terms))


def poly_arith(p, q, op):
    """Apply ``op`` in {add, sub, mul, scale}; for scale ``q`` is a scalar."""
    if op == "scale":
        return p.scale(q)
    if not isinstance(q, UniPoly):
        raise RejectedInput(f"{op} needs two polynomials")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise RejectedInput(f"unknown polynomial operation {op!r}")


def poly_gcd(p, q):
    """Monic gcd over Q."""
    if p.mode != RATIONAL or q.mode != RATIONAL:
        raise RejectedInput("gcd is only defined in rational mode")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def square_free_decomposition(p):
    """Yun's algorithm: returns [(f_i, i)] with p = c * prod f_i**i, f_i square-free."""
    if p.is_zero():
        raise RejectedInput("square-free decomposition of the zero polynomial")
    out = []
    if p.degree < 1:
        return out
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p.divmod(a)[0]
    c = dp.divmod(a)[0]
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, i))
        b = b.divmod(a)[0]
        c = d.divmod(a)[0]
        d = c - b.derivative()
        i += 1
    return out


@dataclass(frozen=True)
class RootSet:
    """Real roots with multiplicities plus the number of non-real roots."""

    real_roots: tuple
    complex_count: int
    method: str

    @property
    def values(self):
        return [v for v, k in self.real_roots for _ in range(k)]

    @property
    def distinct(self):
        return [v for v, _ in self.real_roots]

    @property
    def real_count(self):
        return sum(k for _, k in self.real_roots)

    @property
    def degree(self):
        return self.real_count + self.complex_count


def sturm_sequence(p):
    seq = [p, p.derivative()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        seq.append(-seq[-2].divmod(seq[-1])[1])
    return [s for s in seq if not s.is_zero()]


def sign_changes(seq, x):
    signs = []
    for s in seq:
        v = s(x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _cauchy_bound(p):
    lead = abs(p.lead)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def _isolate(f, tol):
    """Distinct real roots of square-free rational ``f`` as floats."""
    seq = sturm_sequence(f)
    bound = _cauchy_bound(f)
    lo, hi = -bound, bound
    count = sign_changes(seq, lo) - sign_changes(seq, hi)
    stack = [(lo, hi, count)]
    roots = []
    tol = Fraction(tol)
    while stack:
        a, b, c = stack.pop()
        if c == 0:
            continue
        if c == 1:
            roots.append(_refine(f, seq, a, b, tol))
            continue
        mid = (a + b) / 2
        left = sign_changes(seq, a) - sign_changes(seq, mid)
        stack.append((a, mid, left))
        stack.append((mid, b, c - left))
    return sorted(roots)


def _refine(f, seq, a, b, tol):
    # exactly one root in (a, b]; keep halving past ``tol`` down to double resolution
    if f(b) == 0:
        return float(b)
    fa = f(a)
    while True:
        width = b - a
        if width < tol and width <= Fraction(2) ** -52 * max(abs(a), abs(b), 1):
            break
        mid = (a + b) / 2
        fm = f(mid)
        if fm == 0:
            return float(mid)
        if fa != 0:
            left = (fa > 0) != (fm > 0)
        else:
            left = sign_changes(seq, a) - sign_changes(seq, mid) == 1
        if left:
            b = mid
        else:
            a, fa = mid, fm
    return float((a + b) / 2)


def sturm_real_roots(p, tol=STURM_TOL):
    """Real roots of a rational polynomial, isolated by Sturm sign counting.

    Multiplicities come from the square-free decomposition; each square-free
    factor is isolated and refined by bisection until the bracket is below
    ``tol``.
    """
    if p.is_zero():
        raise RejectedInput("sturm_real_roots: zero polynomial")
    if p.mode != RATIONAL:
        p = p.to_rational()
    if p.degree < 1:
        return RootSet((), 0, "sturm")
    found = []
    for f, mult in square_free_decomposition(p):
        found.extend((r, mult) for r in _isolate(f, tol))
    found.sort()
    merged = []
    for v, k in found:
        if merged and v == merged[-1][0]:
            merged[-1] = (v, merged[-1][1] + k)
        else:
            merged.append((v, k))
    nreal = sum(k for _, k in merged)
    return RootSet(tuple(merged), p.degree - nreal, "sturm")


def companion_all_roots(p):
    """All roots via eigenvalues of the balanced companion matrix.

    Eigenvalues within ``FLOAT_MERGE_TOL`` of each other are clustered; a
    cluster whose centroid has |imag| < 1e-9 (1 + |real|) is reported as one
    real root whose multiplicity is the cluster size.
    """
    if p.is_zero():
        raise RejectedInput("companion_all_roots: zero polynomial")
    pf = p.to_float() if p.mode == RATIONAL else p
    if not all(np.isfinite(c) for c in pf.coeffs):
        raise NumericalFailure("non-finite polynomial coefficient", "numkit")
    n = pf.degree
    if n < 1:
        return RootSet((), 0, "companion")
    c = np.array(pf.coeffs, dtype=float)
    if n == 1:
        with np.errstate(over="ignore"):
            eig = np.array([-c[0] / c[1]], dtype=complex)
        if not np.isfinite(eig[0]):
            raise NumericalFailure("overflow in the linear root", "numkit")
    else:
        comp = np.zeros((n, n))
        comp[1:, :-1] = np.eye(n - 1)
        with np.errstate(all="raise"):
            try:
                comp[:, -1] = -c[:-1] / c[-1]
                bal, _ = matrix_balance(comp, permute=False)
            except FloatingPointError as exc:
                raise NumericalFailure(f"overflow while balancing: {exc}", "numkit") from exc
        if not np.all(np.isfinite(bal)):
            raise NumericalFailure("overflow while balancing the companion matrix", "numkit")
        eig = np.linalg.eigvals(bal)
    eig = sorted(eig, key=lambda z: (z.real, z.imag))
    clusters = []
    for z in eig:
        for cl in clusters:
            if abs(z - np.mean(cl)) < FLOAT_MERGE_TOL:
                cl.append(z)
                break
        else:
            clusters.append([z])
    real = []
    for cl in clusters:
        centre = np.mean(cl)
        if abs(centre.imag) < COMPANION_IMAG_TOL * (1 + abs(centre.real)):
            real.append((float(centre.real), len(cl)))
    real.sort()
    nreal = sum(k for _, k in real)
    return RootSet(tuple(real), n - nreal, "companion")


def real_roots(p, tol=STURM_TOL):
    """Sturm for rational polynomials, companion matrix for float ones."""
    if p.mode == RATIONAL:
        return sturm_real_roots(p, tol)
    return companion_all_roots(p)
