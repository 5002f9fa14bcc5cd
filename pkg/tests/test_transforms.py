from fractions import Fraction

import numpy as np
import pytest

from qes import families as fam
from qes import transforms as tr
from qes.errors import NumericalFailure, RejectedInput
from qes.oracle import compute_levels, level_specs
from qes.params import make_params

TRIG = dict(q=Fraction(1, 2), L=1, A=-6, alpha=1)


def test_hulthen_energy_maps():
    assert tr.hulthen_energy_printed(-37, 12, 1) == Fraction(-25, 4)
    assert tr.hulthen_energy_from_eckart(-37, 12, 1) == Fraction(-49, 4)


def test_hulthen_identity_on_probe_grid():
    p = make_params("eckart", "1/2", **TRIG)
    pairs, _ = level_specs(p)
    x = np.linspace(0.1, 8, 200)
    for r, _ in pairs:
        e = p.with_root(r)
        h = tr.eckart_to_hulthen(e)
        want = 0.25 * (fam.potential_value(e, x / 2) - (-6))
        got = fam.potential_value(h, x)
        assert np.max(np.abs(got - want) / np.maximum(1, np.abs(want))) < 1e-12


def test_hulthen_psi_halving():
    p = make_params("eckart", "1/2", **TRIG)
    for r, spec_e in level_specs(p)[0]:
        spec_h = fam.make_eigenfunction(tr.eckart_to_hulthen(p.with_root(r)), coeffs=spec_e.coeffs)
        assert fam.eigenfunction_value(spec_h, 2.0) == pytest.approx(fam.eigenfunction_value(spec_e, 1.0),
                                                                      rel=1e-13)


def test_transform_rejects_other_families():
    with pytest.raises(RejectedInput):
        tr.eckart_to_hulthen(make_params("coulomb", 0, q=1, ell=0, a=1))


def test_rosen_morse_reality_and_closed_form():
    p = make_params("rosen_morse", "1/2", **TRIG)
    x = np.linspace(-4, 4, 81)
    for r, _ in level_specs(p)[0]:
        q = p.with_root(r)
        im, re = tr.rosen_morse_imag_part(q, x)
        assert im < 1e-12
        V = fam.potential_value(q, x)
        assert np.max(np.abs(re - V) / np.maximum(1, np.abs(V))) < 1e-10
        im4, _ = tr.rosen_morse_imag_part(q, x, 4)
        assert im4 > 1e-3


def test_rosen_morse_bracket_is_sech_tanh():
    p = make_params("rosen_morse", 0, q=0, L=1, A=3, alpha=Fraction(1, 2), root=0)
    x = np.linspace(-3, 3, 31)
    want = -2 * 0.25 / np.cosh(x / 2) ** 2 + 3 * 0.25 * np.tanh(x / 2)
    assert np.allclose(fam.potential_value(p, x), want, atol=1e-13)


def test_rosen_morse_residual_with_eckart_energy():
    p = make_params("eckart", "1/2", **TRIG)
    eck = {lv.root: lv for lv in compute_levels(p)[0]}
    rm = compute_levels(tr.eckart_to_rosen_morse(p))[0]
    for lv in rm:
        assert lv.residual < 1e-6
        assert lv.E_derived == pytest.approx(eck[lv.root].E_derived, abs=1e-8)


def test_coulomb_limit_params_example():
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    s = tr.coulomb_limit_params(t, 0.1)
    assert s.q == pytest.approx(50) and s.L == pytest.approx(25)
    assert fam.stated_energy(t) == 5


def test_oscillator_limit_params_example():
    t = make_params("oscillator", 0, q=1, ell=2, a=2, root=-3)
    s = tr.oscillator_limit_params(t, 0.5)
    assert s.q == pytest.approx(4)
    x = np.linspace(-2, 2, 9)
    assert np.allclose(fam.potential_value(t, x), -x**2 - 2 * x**3 + x**4, atol=1e-13)


def test_alpha_zero_rejected():
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    with pytest.raises(RejectedInput):
        tr.coulomb_limit_params(t, 0)
    with pytest.raises(RejectedInput):
        tr.oscillator_limit_params(make_params("oscillator", 0, q=1, ell=2, a=2, root=-3), 0.0)


def test_coulomb_scan_decreasing():
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    rec = tr.limit_convergence_scan(tr.coulomb_limit_map(t), alphas=(0.04, 0.02, 0.01))
    assert rec.decreasing and rec.converged
    lo = tr.limit_convergence_scan(tr.coulomb_limit_map(t), alphas=(1e-2, 1e-3))
    assert lo.deviations[1] < lo.deviations[0]


def test_identity_map_zero():
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    rec = tr.limit_convergence_scan(tr.identity_map(t))
    assert rec.deviations == (0.0, 0.0, 0.0) and rec.converged


@pytest.mark.parametrize("variant", ["corrupted", "printed"])
def test_broken_maps_flagged(variant):
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    rec = tr.limit_convergence_scan(tr.coulomb_limit_map(t, variant))
    assert not rec.converged and rec.notes
    o = make_params("oscillator", 0, q=1, ell=2, a=2, root=-3)
    rec = tr.limit_convergence_scan(tr.oscillator_limit_map(o, variant))
    assert not rec.converged


def test_scan_overflow_names_alpha():
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    with pytest.raises(NumericalFailure) as err:
        tr.limit_convergence_scan(tr.coulomb_limit_map(t), alphas=(1e-2, 1e-80))
    assert "1e-80" in str(err.value)


def test_scan_input_validation():
    t = make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)
    m = tr.coulomb_limit_map(t)
    for bad in ((), (0.01, 0.02), (0.02, -0.01)):
        with pytest.raises(RejectedInput):
            tr.limit_convergence_scan(m, alphas=bad)
    with pytest.raises(RejectedInput):
        tr.coulomb_limit_map(t, "nonsense")


def test_mirror_relation_reported_not_assumed():
    p = make_params("rosen_morse", "1/2", **TRIG)
    r = level_specs(p)[0][0][0]
    spread = tr.rosen_morse_mirror_spread(p.with_root(r), np.linspace(0.1, 3, 30))
    assert spread > 1e-3
