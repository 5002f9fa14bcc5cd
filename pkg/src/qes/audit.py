"""Formula audit: printed closed forms against the numerical oracle.

Every energy formula id in ``ENERGY_IDS`` and potential display id in
``POTENTIAL_IDS`` appears exactly once in a report, with verdict
``not-applicable`` when it does not concern the audited family. Extra
findings (suffixed ids and transform checks) follow the core ones.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import families as fam
from . import transforms as tr
from .bd_recurrence import sequence_for, spectrum_roots
from .errors import QesError
from .oracle import compute_levels, fd_check, level_specs
from .params import TRIG_FAMILIES

ENERGY_IDS = ("Eq6", "Eq8", "Eq13", "Eq19", "Eq22", "Eq26", "Eq30")
POTENTIAL_IDS = ("Eq5", "Eq12", "Eq15", "Eq17", "Eq24")
CORE_IDS = ("Eq5", "Eq6", "Eq8", "Eq12", "Eq13", "Eq15", "Eq17", "Eq19", "Eq22", "Eq24", "Eq26", "Eq30")
# sign disagreements that are known and listed in the README
DOCUMENTED_SIGN_FLIPS = frozenset({"Eq8", "Eq22", "Eq26"})

CONSISTENT, SIGN_FLIP, INCONSISTENT, NA = "consistent", "sign-flip", "inconsistent", "not-applicable"
ENERGY_TOL = 1e-6
ORACLE_TOL = 1e-6
POTENTIAL_RTOL = 1e-9
REALITY_TOL = 1e-12


@dataclass(frozen=True)
class Finding:
    formula_id: str
    family: str
    stated: tuple
    oracle: tuple
    abs_discrepancy: float | None
    rel_discrepancy: float | None
    verdict: str
    notes: str = ""


@dataclass
class AuditReport:
    family: str
    params: dict
    findings: list = field(default_factory=list)
    levels: dict = field(default_factory=dict)

    def get(self, formula_id):
        hits = [f for f in self.findings if f.formula_id == formula_id]
        if len(hits) != 1:
            raise KeyError(f"{formula_id}: {len(hits)} findings")
        return hits[0]

    def verdict(self, formula_id):
        return self.get(formula_id).verdict

    def strict_failures(self):
        out = []
        for f in self.findings:
            if f.verdict == INCONSISTENT:
                out.append(f.formula_id)
            elif f.verdict == SIGN_FLIP and f.formula_id not in DOCUMENTED_SIGN_FLIPS:
                out.append(f.formula_id)
        return out

    def to_dict(self):
        return {
            "family": self.family,
            "params": self.params,
            "findings": [asdict(f) for f in self.findings],
            "levels": {k: [asdict(lv) for lv in v] for k, v in self.levels.items()},
        }


def _energy_verdict(stated, oracle, tol=ENERGY_TOL):
    s, o = float(stated), float(oracle)
    scale = 1.0 + abs(o)
    if abs(s - o) <= tol * scale:
        return CONSISTENT
    if abs(s + o) <= tol * scale:
        return SIGN_FLIP
    return INCONSISTENT


def _combine(verdicts):
    v = set(verdicts)
    if not v:
        return NA
    if v == {CONSISTENT}:
        return CONSISTENT
    if v <= {CONSISTENT, SIGN_FLIP}:
        return SIGN_FLIP
    return INCONSISTENT


def _energy_finding(fid, family, stated, oracle, notes=""):
    stated = tuple(float(s) for s in stated)
    oracle = tuple(float(o) for o in oracle)
    if not stated:
        return Finding(fid, family, (), (), None, None, NA, notes or "no levels")
    diffs = [abs(s - o) for s, o in zip(stated, oracle)]
    rels = [d / abs(o) for d, o in zip(diffs, oracle) if o != 0]
    verdict = _combine(_energy_verdict(s, o) for s, o in zip(stated, oracle))
    if verdict == SIGN_FLIP and fid in DOCUMENTED_SIGN_FLIPS:
        notes = (notes + "; " if notes else "") + "documented sign disagreement"
    return Finding(fid, family, stated, oracle, max(diffs), max(rels) if rels else None, verdict, notes)


def _na(fid, family, why):
    return Finding(fid, family, (), (), None, None, NA, why)


def _oracle_finding(fid, family, levels, notes):
    """Potential display checked through its eigenfunctions: residual and constancy."""
    if not levels:
        return _na(fid, family, "no levels")
    res = max(lv.residual for lv in levels)
    cst = max(lv.constancy / (1 + abs(lv.E_derived)) for lv in levels)
    ok = res < ORACLE_TOL and cst < ORACLE_TOL
    return Finding(fid, family, (), (res, cst), res, cst, CONSISTENT if ok else INCONSISTENT,
                   notes + "; oracle = (max residual, max relative constancy)")


def _display_finding(fid, family, printed, canonical, notes):
    printed, canonical = np.asarray(printed), np.asarray(canonical)
    fin = np.isfinite(printed) & np.isfinite(canonical)
    if not np.any(fin):
        return _na(fid, family, notes + "; nothing comparable on the probe grid")
    d = np.abs(printed[fin] - canonical[fin])
    scale = np.maximum(np.abs(canonical[fin]), 1.0)
    rel = float(np.max(d / scale))
    verdict = CONSISTENT if rel < POTENTIAL_RTOL and np.all(fin) else INCONSISTENT
    if not np.all(fin):
        notes += "; printed display not finite on part of the probe grid"
    return Finding(fid, family, (), (), float(np.max(d)), rel, verdict, notes)


def _fd_finding(family, pairs_levels):
    stated, oracle, ok = [], [], True
    for spec, lv in pairs_levels:
        if not lv.normalizable:
            continue
        near, tol = fd_check(spec, lv.E_derived)
        stated.append(lv.E_derived)
        oracle.append(np.nan if near is None else near)
        ok &= near is not None and abs(near - lv.E_derived) <= tol
    if not stated:
        return _na(f"fd-{family}", family, "no normalizable levels")
    diffs = [abs(s - o) for s, o in zip(stated, oracle)]
    return Finding(f"fd-{family}", family, tuple(stated), tuple(float(o) for o in oracle),
                   float(np.nanmax(diffs)) if np.any(np.isfinite(diffs)) else None, None,
                   CONSISTENT if ok else INCONSISTENT,
                   "E_derived of normalizable levels against the finite-difference spectrum")


def _levels_with_specs(params, grid):
    pairs, _ = level_specs(params)
    levels, _ = compute_levels(params, grid=grid)
    by_root = {lv.root: lv for lv in levels}
    return [(spec, by_root[float(r)]) for r, spec in pairs]


def _probe(p, n=41):
    s = fam.natural_length(p)
    if p.family in ("rosen_morse", "oscillator"):
        return np.linspace(-3 * s, 3 * s, n)
    return np.linspace(0.05 * s, 6 * s, n)


def _audit_trig(p, grid, findings, levels):
    triple = {f: p.with_family(f) for f in TRIG_FAMILIES}
    data = {f: _levels_with_specs(q, grid) for f, q in triple.items()}
    for f, items in data.items():
        levels[f] = [lv for _, lv in items]
    eck = sorted(data["eckart"], key=lambda t: t[1].root)
    hul = sorted(data["hulthen"], key=lambda t: t[1].root)
    rm = sorted(data["rosen_morse"], key=lambda t: t[1].root)
    A, al = float(p.A), float(p.alpha)
    exact = p.q == 0 and (p.j2 > 0 or p.m is not None)

    findings["Eq5"] = _oracle_finding("Eq5", "eckart", [lv for _, lv in eck],
                                      "Eckart potential with its gauge eigenfunction")
    findings["Eq6"] = _energy_finding("Eq6", "eckart", [lv.E_stated for _, lv in eck],
                                      [lv.E_derived for _, lv in eck])
    if exact:
        m = p.m or 0
        ex = fam.exact_case("eckart", p.L, p.A, p.alpha, m, p.j)
        findings["Eq8"] = _energy_finding("Eq8", "eckart", [ex.E_printed],
                                          [eck[0][1].E_derived], f"q = 0, m = {m}")
    else:
        findings["Eq8"] = _na("Eq8", "eckart", "only the q = 0 exactly solvable case")

    # Hultén: the Eckart oracle energy fed through the printed energy map
    findings["Eq13"] = _energy_finding(
        "Eq13", "hulthen", [tr.hulthen_energy_printed(e.E_derived, A, al) for _, e in eck],
        [h.E_derived for _, h in hul], "input: Eckart E_derived")
    x = _probe(triple["hulthen"])
    extra = []
    for spec, _ in hul[:1]:
        hp = spec.params
        canon = fam.potential_value(hp, x)
        findings["Eq12"] = _display_finding("Eq12", "hulthen", fam.printed_hulthen_V(hp, x), canon,
                                            "display as printed vs (V_E(x/2) - A alpha^2)/4")
        extra.append(_display_finding("Eq12-term2", "hulthen",
                                      fam.printed_hulthen_V(hp, x, denom="fixed"), canon,
                                      "display with only the q-term denominator repaired"))
        extra.append(_display_finding("Eq12-qterm", "hulthen",
                                      fam.printed_hulthen_V(hp, x, term2_A=False), canon,
                                      "display with only the second-term A removed"))
        extra.append(_display_finding("Eq12-repaired", "hulthen",
                                      fam.printed_hulthen_V(hp, x, term2_A=False, denom="fixed"), canon,
                                      "display with both repairs"))
        xs = x[x > 0]
        e_spec = eck[0][0]
        h_vals, _ = spec.scaled_values(2 * xs)
        e_vals, _ = e_spec.scaled_values(xs)
        rel = float(np.max(np.abs(h_vals - e_vals)))
        extra.append(Finding("Eq14", "hulthen", (), (), rel, rel,
                             CONSISTENT if rel < 1e-12 else INCONSISTENT, "psi_H(2x) against psi_E(x)"))
    if "Eq12" not in findings:
        findings["Eq12"] = _na("Eq12", "hulthen", "no levels")

    extra.append(_energy_finding("RM-energy", "rosen_morse", [e.E_derived for _, e in eck],
                                 [r.E_derived for _, r in rm], "Eckart E_derived vs Rosen-Morse E_derived"))
    x = _probe(triple["rosen_morse"])
    for spec, _ in rm[:1]:
        rp = spec.params
        canon = fam.potential_value(rp, x)
        findings["Eq15"] = _display_finding("Eq15", "rosen_morse", fam.printed_rosen_morse_V(rp, x),
                                            canon, "display as printed vs continued Eckart potential")
        extra.append(_display_finding("Eq15-trig", "rosen_morse",
                                      fam.printed_rosen_morse_V(rp, x, qterm="continued"), canon,
                                      "tan kept, q-term continued"))
        extra.append(_display_finding("Eq15-qterm", "rosen_morse",
                                      fam.printed_rosen_morse_V(rp, x, trig="tanh"), canon,
                                      "tan read as tanh, q-term as printed"))
        im2, _ = tr.rosen_morse_imag_part(rp, x, 2)
        im4, _ = tr.rosen_morse_imag_part(rp, x, 4)
        extra.append(Finding("RM-reality", "rosen_morse", (), (im2,), im2, im2,
                             CONSISTENT if im2 < REALITY_TOL else INCONSISTENT,
                             "imaginary part after the shift i pi/(2 alpha)"))
        extra.append(Finding("RM-shift-printed", "rosen_morse", (), (im4,), im4, im4,
                             CONSISTENT if im4 < REALITY_TOL else INCONSISTENT,
                             "imaginary part after the displayed shift i pi/(4 alpha)"))
        spread = tr.rosen_morse_mirror_spread(rp, np.linspace(0.1, 3, 30) * fam.natural_length(rp))
        extra.append(Finding("RM-mirror", "rosen_morse", (), (spread,), spread, None,
                             CONSISTENT if spread < 1e-8 else INCONSISTENT,
                             "psi_RM(x) proportional to psi_E(-x); spread of the log ratio"))
    if "Eq15" not in findings:
        findings["Eq15"] = _na("Eq15", "rosen_morse", "no levels")
    for f in TRIG_FAMILIES:
        extra.append(_fd_finding(f, data[f]))
    for fid in ("Eq17", "Eq19", "Eq22", "Eq30"):
        findings[fid] = _na(fid, "coulomb", "not audited at hyperbolic parameters")
    for fid in ("Eq24", "Eq26"):
        findings[fid] = _na(fid, "oscillator", "not audited at hyperbolic parameters")
    return extra


def _audit_coulomb(p, grid, findings, levels):
    items = _levels_with_specs(p, grid)
    levels[p.family] = [lv for _, lv in items]
    lv = [l for _, l in items]
    extra = []
    findings["Eq17"] = _oracle_finding("Eq17", p.family, lv, "Coulomb potential with its gauge eigenfunction")
    findings["Eq19"] = _energy_finding(
        "Eq19", p.family, [fam.stated_energy(s.params.with_family("coulomb")) for s, _ in items],
        [l.E_derived for l in lv])
    exact = p.family == "coulomb" and p.q == 0 and (p.j2 > 0 or p.m is not None)
    if exact:
        m = p.m or 0
        ex = fam.exact_case("coulomb", p.ell, p.a, 1, m)
        findings["Eq22"] = _energy_finding("Eq22", "coulomb", [ex.E_printed], [lv[0].E_derived],
                                           f"q = 0, m = {m}")
        extra.append(_energy_finding("Eq21", "coulomb", [ex.root_printed], [ex.root],
                                     "printed root vs the root that terminates the series"))
    else:
        findings["Eq22"] = _na("Eq22", "coulomb", "only the q = 0 exactly solvable case")
    if p.family == "coulomb_eps":
        findings["Eq30"] = _energy_finding("Eq30", "coulomb_eps", [l.E_stated for l in lv],
                                           [l.E_derived for l in lv])
    else:
        findings["Eq30"] = _na("Eq30", "coulomb", "only the eps = -a family")
    if p.family == "coulomb" and p.q != 0:
        canon = sorted(spectrum_roots(sequence_for(p)).values)
        printed = sorted(spectrum_roots(sequence_for(p, as_printed=True)).values)
        if len(canon) == len(printed) and canon:
            extra.append(_energy_finding("Eq20-diagonal", "coulomb", printed, canon,
                                         "roots of the printed recurrence vs the ODE-derived one"))
        else:
            extra.append(Finding("Eq20-diagonal", "coulomb", tuple(printed), tuple(canon), None, None,
                                 INCONSISTENT, "root counts differ"))
    extra.append(_fd_finding(p.family, items))
    for fid in ("Eq5", "Eq6", "Eq8", "Eq12", "Eq13", "Eq15"):
        findings[fid] = _na(fid, "eckart", "not audited at Coulomb parameters")
    for fid in ("Eq24", "Eq26"):
        findings[fid] = _na(fid, "oscillator", "not audited at Coulomb parameters")
    return extra


def _audit_oscillator(p, grid, findings, levels):
    items = _levels_with_specs(p, grid)
    levels["oscillator"] = [lv for _, lv in items]
    lv = [l for _, l in items]
    extra = []
    findings["Eq24"] = _oracle_finding("Eq24", "oscillator", lv,
                                       "oscillator potential with its gauge eigenfunction")
    findings["Eq26"] = _energy_finding("Eq26", "oscillator", [l.E_stated for l in lv],
                                       [l.E_derived for l in lv])
    extra.append(_fd_finding("oscillator", items))
    for fid in ("Eq5", "Eq6", "Eq8", "Eq12", "Eq13", "Eq15"):
        findings[fid] = _na(fid, "eckart", "not audited at oscillator parameters")
    for fid in ("Eq17", "Eq19", "Eq22", "Eq30"):
        findings[fid] = _na(fid, "coulomb", "not audited at oscillator parameters")
    return extra


def audit_family(p, g=None):
    """Audit every printed formula that concerns the family of ``p``.

    Hyperbolic parameters audit the Eckart, Hultén and Rosen-Morse triple
    together, since the Hultén energy map needs the Eckart energy.
    """
    findings, levels = {}, {}
    try:
        if p.family in TRIG_FAMILIES:
            extra = _audit_trig(p.with_family("eckart"), g, findings, levels)
        elif p.family == "oscillator":
            extra = _audit_oscillator(p, g, findings, levels)
        else:
            extra = _audit_coulomb(p, g, findings, levels)
    except QesError as exc:
        raise type(exc)(f"audit of {p.family}: {exc}") from exc
    ordered = [findings[fid] for fid in CORE_IDS] + extra
    return AuditReport(p.family, p.echo(), ordered, levels)
