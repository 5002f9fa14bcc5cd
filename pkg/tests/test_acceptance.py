"""Acceptance criteria 1-9. Each test prints one [PASS]/[FAIL] line, then asserts."""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from qes import families as fam
from qes import transforms as tr
from qes.audit import audit_family
from qes.bd_recurrence import monic_normal_form, sequence_for, spectrum_roots
from qes.cli import main
from qes.numkit import UniPoly
from qes.oracle import GridSpec, compute_levels, derive_energy, fd_spectrum, residual_norm
from qes.params import make_params

from conftest import rand_frac


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail
    return emit


def eps_params(j, q=1, ell=0):
    return make_params("coulomb_eps", j, q=q, ell=ell)


def test_criterion_1_root_table(verdict):
    t0 = time.perf_counter()
    s153 = math.sqrt(153)
    closed = {
        0: [0.0],
        1: [-2.0, 2.0],
        2: [-math.sqrt(20), 0.0, math.sqrt(20)],
        3: sorted(s * math.sqrt(2 * (15 + t * s153)) for s in (1, -1) for t in (1, -1)),
    }
    # the printed 7-decimal literals carry errors near 5e-7; they get a loose sanity check only
    printed = {2: [-4.472135955, 0.0, 4.472135955], 3: [-7.3985557, -2.2937671, 2.2937671, 7.3985557]}
    worst, lit = 0.0, 0.0
    for j2, want in closed.items():
        got = spectrum_roots(sequence_for(eps_params(Fraction(j2, 2)))).values
        if len(got) != len(want):
            worst = math.inf
            break
        worst = max(worst, max(abs(a - b) for a, b in zip(sorted(got), want)))
        if j2 in printed:
            lit = max(lit, max(abs(a - b) for a, b in zip(sorted(got), printed[j2])))
    dt = time.perf_counter() - t0
    verdict(1, worst <= 1e-9 and lit <= 1e-6 and dt < 1,
            f"max |root - closed form| = {worst:.1e}, vs printed literals {lit:.1e}, {dt:.2f}s")


def displayed_P(m, q, ell, j):
    e = UniPoly.monomial("ε")
    c = UniPoly.constant
    if m == 1:
        return e
    if m == 2:
        return e * e + c(-8 * q * j * (ell + 1), "ε")
    if m == 3:
        return e * (e * e + c(4 * q * (2 * ell + 3 - 2 * j * (3 * ell + 4)), "ε"))
    return (e * e * e * e + c(4 * q * (8 * ell + 15 - 4 * j * (4 * ell + 5)), "ε") * e * e
            + c(192 * j * (j - 1) * (ell * ell + 3 * ell + 2) * q * q, "ε"))


def test_criterion_2_polynomial_identities(verdict, rng):
    t0 = time.perf_counter()
    mismatches = []
    for _ in range(5):
        q = rand_frac(rng, 0, 3) + Fraction(1, 8)
        ell = rand_frac(rng, 0, 3)
        j = Fraction(rng.randint(3, 6), 2)
        seq = sequence_for(eps_params(j, q=q, ell=ell))
        for m in range(1, 5):
            if monic_normal_form(seq, m) != displayed_P(m, q, ell, j):
                mismatches.append(f"P{m}(q={q}, l={ell}, j={j})")
    dt = time.perf_counter() - t0
    verdict(2, not mismatches and dt < 1,
            f"{20 - len(mismatches)}/20 exact matches, {dt:.2f}s"
            + (f"; mismatches: {', '.join(mismatches)}" if mismatches else ""))


def test_criterion_3_root_negation(verdict, rng):
    bad = []
    for _ in range(10):
        q = rand_frac(rng, 0, 3) + Fraction(1, 8)
        ell = rand_frac(rng, 0, 3)
        for j2 in range(7):
            crit = sequence_for(eps_params(Fraction(j2, 2), q=q, ell=ell)).critical.monic()
            if crit.negate_variable() != crit.scale((-1) ** crit.degree):
                bad.append((q, ell, j2))
                continue
            vals = sorted(spectrum_roots(sequence_for(eps_params(Fraction(j2, 2), q=q, ell=ell))).values)
            if not np.allclose(vals, sorted(-v for v in vals), atol=1e-9):
                bad.append((q, ell, j2))
    verdict(3, not bad, f"70 critical polynomials checked, {len(bad)} not negation-invariant")


def test_criterion_4_two_electron(verdict):
    t0 = time.perf_counter()
    p = make_params("coulomb_eps", "1/2", q=1, ell=0, root=-2)
    spec = fam.make_eigenfunction(p)
    g = GridSpec(0.05, 7, 4000)
    E, dev = derive_energy(spec, g)
    res = residual_norm(spec, E, g)
    coeffs = np.asarray(spec.coeffs, dtype=float)
    eq30 = audit_family(make_params("coulomb_eps", "1/2", q=1, ell=0)).verdict("Eq30")
    fd = fd_spectrum(lambda x: 2 / x + x * x, GridSpec(1e-3, 12, 12000), 1)[0]
    dt = time.perf_counter() - t0
    ok = (abs(E - 5) < 1e-8 and eq30 == "consistent" and np.allclose(coeffs, [1, 1], atol=1e-12)
          and res < 1e-8 and abs(fd - 5) < 1e-3 and dt < 30)
    verdict(4, ok, f"E_derived = {E:.12f}, Eq30 {eq30}, coeffs {coeffs.tolist()}, residual {res:.1e}, "
                   f"fd E0 = {fd:.6f}, {dt:.1f}s")


def random_params(r, family):
    j = Fraction(r.randint(0, 4), 2)
    f = lambda lo, hi, den=4: rand_frac(r, lo, hi, den)  # noqa: E731
    if family in ("eckart", "hulthen", "rosen_morse"):
        return make_params(family, j, L=f(0, 2, 2), A=f(-10, 10, 2), alpha=r.choice([Fraction(1, 2), 1, 2]),
                           q=f(0, 2) + Fraction(1, 4))
    if family == "coulomb":
        return make_params(family, j, ell=r.randint(0, 2), a=f(-3, 3), q=f(0, 2) + Fraction(1, 4))
    if family == "coulomb_eps":
        return make_params(family, j, ell=r.randint(0, 2), q=f(0, 2) + Fraction(1, 4))
    return make_params(family, j, ell=f(-2, 2), a=(f(0, 3) + Fraction(1, 2)) * r.choice([1, -1]),
                       q=f(0, 2) + Fraction(1, 4))


def test_criterion_5_residual_suite(verdict):
    r = random.Random(5)
    t0 = time.perf_counter()
    fams = ("eckart", "hulthen", "rosen_morse", "coulomb", "oscillator")
    count, worst_res, worst_c, bad = 0, 0.0, 0.0, []
    for i in range(20):
        p = random_params(r, fams[i % len(fams)])
        levels, _ = compute_levels(p)
        for lv in levels:
            count += 1
            rel = lv.constancy / (1 + abs(lv.E_derived))
            worst_res, worst_c = max(worst_res, lv.residual), max(worst_c, rel)
            if not (lv.residual < 1e-6 and rel < 1e-6):
                bad.append(p.echo())
    dt = time.perf_counter() - t0
    verdict(5, count > 0 and not bad and dt < 120,
            f"{count} levels over 20 parameter sets: max residual {worst_res:.1e}, "
            f"max relative constancy {worst_c:.1e}, {dt:.1f}s")


TRIG_POINTS = [("1/2", dict(q=Fraction(1, 2), L=1, A=-6, alpha=1)),
               (1, dict(q=1, L=Fraction(1, 2), A=-4, alpha=Fraction(1, 2))),
               (0, dict(q=1, L=2, A=3, alpha=2)),
               ("3/2", dict(q=Fraction(3, 4), L=1, A=-8, alpha=1))]


def test_criterion_6_transform_invariance(verdict):
    same_roots, eq13, rm, real = True, 0.0, 0.0, 0.0
    for j, kw in TRIG_POINTS:
        p = make_params("eckart", j, **kw)
        trip = {f: p.with_family(f) for f in ("eckart", "hulthen", "rosen_morse")}
        crits = [sequence_for(t).critical for t in trip.values()]
        same_roots &= crits[0] == crits[1] == crits[2]
        lv = {f: sorted(compute_levels(t)[0], key=lambda v: v.root) for f, t in trip.items()}
        A, al = float(p.A), float(p.alpha)
        for e, h, r in zip(lv["eckart"], lv["hulthen"], lv["rosen_morse"]):
            same_roots &= e.root == h.root == r.root
            eq13 = max(eq13, abs(tr.hulthen_energy_printed(e.E_derived, A, al) - h.E_derived))
            rm = max(rm, abs(r.E_derived - e.E_derived))
            im, _ = tr.rosen_morse_imag_part(trip["rosen_morse"].with_root(r.root), np.linspace(-3, 3, 41))
            real = max(real, im)
    ok = same_roots and eq13 <= 1e-8 and rm <= 1e-8 and real <= 1e-12
    verdict(6, ok, f"identical roots {same_roots}; Hultén printed energy map off by {eq13:.2e}; "
                   f"Rosen-Morse vs Eckart E_derived {rm:.1e}; imaginary part {real:.1e}")


def test_criterion_7_limit_scans(verdict):
    t0 = time.perf_counter()
    coul = tr.limit_convergence_scan(tr.coulomb_limit_map(make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)))
    osc_t = make_params("oscillator", 0, q=1, ell=2, a=2, root=-3)
    osc = tr.limit_convergence_scan(tr.oscillator_limit_map(osc_t))
    ctrl = [tr.limit_convergence_scan(tr.coulomb_limit_map(coul_t, "corrupted"))
            for coul_t in [make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)]]
    ctrl.append(tr.limit_convergence_scan(tr.oscillator_limit_map(osc_t, "corrupted")))
    dt = time.perf_counter() - t0
    ok = (coul.decreasing and osc.decreasing and coul.min_order >= 1 and osc.min_order >= 1
          and all(not c.converged and c.notes for c in ctrl) and dt < 30)
    verdict(7, ok, f"Coulomb decreasing {coul.decreasing}, orders {[round(o, 3) for o in coul.orders[1:]]}; "
                   f"oscillator decreasing {osc.decreasing}, orders {[round(o, 3) for o in osc.orders[1:]]}; "
                   f"corrupted controls flagged {all(not c.converged for c in ctrl)}; {dt:.1f}s")


def test_criterion_8_audit_findings(verdict, tmp_path, capsys):
    eck = audit_family(make_params("eckart", 0, q=0, L=0, A=12, alpha=1, m=0))
    got = {
        "Eq8": eck.verdict("Eq8"),
        "Eq22": audit_family(make_params("coulomb", 0, q=0, ell=0, a=-2, m=0)).verdict("Eq22"),
        "Eq26": audit_family(make_params("oscillator", 0, q=1, ell=2, a=2)).verdict("Eq26"),
        "Eq30": audit_family(make_params("coulomb_eps", "1/2", q=1, ell=0)).verdict("Eq30"),
        "Eq13": eck.verdict("Eq13"),
    }
    want = {"Eq8": "sign-flip", "Eq22": "sign-flip", "Eq26": "sign-flip", "Eq30": "consistent",
            "Eq13": "consistent"}
    argv = ["audit", "--family", "eckart", "--L", "0", "--A", "12", "--alpha", "1", "--q", "0", "--m", "0",
            "--reproducible", "--out"]
    outs = []
    for name in ("a.json", "b.json"):
        assert main(argv + [str(tmp_path / name)]) == 0
        outs.append((tmp_path / name).read_bytes())
    capsys.readouterr()
    identical = outs[0] == outs[1]
    wrong = {k: v for k, v in got.items() if v != want[k]}
    verdict(8, not wrong and identical,
            f"verdicts {got}; byte-identical {identical}"
            + (f"; differs from expected on {sorted(wrong)}" if wrong else ""))


def test_criterion_9_fd_order(verdict):
    errs = [abs(fd_spectrum(lambda x: x * x, GridSpec(-10, 10, n), 1)[0] - 1) for n in (999, 1999)]
    ratio = errs[0] / errs[1]
    verdict(9, 3.6 <= ratio <= 4.4, f"E0 errors {errs[0]:.3e} -> {errs[1]:.3e}, ratio {ratio:.3f}")
