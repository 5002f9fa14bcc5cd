"""Critical roots of the eps = -a family for q = 1, l = 0 and j = 0 .. 3."""

from fractions import Fraction

from qes.bd_recurrence import sequence_for, spectrum_roots
from qes.params import make_params


def main():
    for j2 in range(7):
        p = make_params("coulomb_eps", Fraction(j2, 2), q=1, ell=0)
        seq = sequence_for(p)
        roots = spectrum_roots(seq)
        vals = ", ".join(f"{v:+.10f}" for v in sorted(roots.values))
        print(f"j={str(p.j):>3}  deg={seq.critical.degree}  complex={roots.complex_count}  roots: {vals}")


if __name__ == "__main__":
    main()
