"""Audit verdicts at the reference points and a few extra hyperbolic points."""

from fractions import Fraction

from qes.audit import CORE_IDS, audit_family
from qes.params import make_params

POINTS = [
    make_params("eckart", 0, q=0, L=0, A=12, alpha=1, m=0),
    make_params("eckart", "1/2", q=Fraction(1, 2), L=1, A=-6, alpha=1),
    make_params("coulomb", 0, q=0, ell=0, a=-2, m=0),
    make_params("coulomb", "1/2", q=1, ell=0, a=2),
    make_params("coulomb_eps", "1/2", q=1, ell=0),
    make_params("oscillator", 0, q=1, ell=2, a=2),
]


def main():
    for p in POINTS:
        rep = audit_family(p)
        print(p.echo())
        for f in rep.findings:
            if f.verdict == "not-applicable":
                continue
            tag = "core " if f.formula_id in CORE_IDS else "extra"
            print(f"  {tag} {f.formula_id:<16} {f.verdict:<13} rel={f.rel_discrepancy}")
        print(f"  strict failures: {rep.strict_failures() or 'none'}")


if __name__ == "__main__":
    main()
