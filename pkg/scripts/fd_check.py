"""Grid refinement of the finite-difference oracle on the harmonic and two-electron potentials."""

from qes.oracle import GridSpec, fd_spectrum


def main():
    for label, V, lo, hi, exact in (("x^2", lambda x: x * x, -10.0, 10.0, 1.0),
                                    ("2/x + x^2", lambda x: 2 / x + x * x, 1e-3, 12.0, 5.0),
                                    ("x_min = 0", lambda x: 2 / x + x * x, 0.0, 12.0, 5.0)):
        prev = None
        for n in (999, 1999, 3999, 7999):
            err = abs(fd_spectrum(V, GridSpec(lo, hi, n), 1)[0] - exact)
            ratio = "" if prev is None else f"  ratio {prev / err:.3f}"
            print(f"{label:<10} n={n:<5} |E0 - {exact:g}| = {err:.3e}{ratio}")
            prev = err


if __name__ == "__main__":
    main()
