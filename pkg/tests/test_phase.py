"""Phase-qubit tests: washboard potential, bound levels, readout ordering."""

import math

import numpy as np
import pytest

from scqsim.core import ValidationError
from scqsim.phase import (
    PhaseQubitParams,
    bound_state_count,
    plasma_spacing,
    readout_transitions,
    washboard_potential,
    well_domain,
    well_levels,
)

EJ = 10.0


def params(s=0.0, ratio=1e4):
    return PhaseQubitParams(ej=EJ, ec=EJ / ratio, s=s)


class TestPotential:
    def test_untilted_origin(self):
        assert washboard_potential(0.0, params()) == pytest.approx(-EJ, abs=0.0)

    def test_minimum_at_arcsin(self):
        p = params(s=0.6)
        phi0 = math.asin(0.6)
        # U'(phi0) = Ej (sin phi0 - s) = 0
        eps = 1e-6
        left = washboard_potential(phi0 - eps, p)
        right = washboard_potential(phi0 + eps, p)
        assert washboard_potential(phi0, p) < min(left, right)

    def test_bias_cap(self):
        with pytest.raises(ValidationError):
            PhaseQubitParams(ej=EJ, ec=1e-3, s=1.0)
        with pytest.raises(ValidationError):
            PhaseQubitParams(ej=EJ, ec=1e-3, s=-0.1)

    def test_regime_warning(self):
        with pytest.warns(UserWarning):
            PhaseQubitParams(ej=1.0, ec=0.5, s=0.0)

    def test_domain_brackets_minimum(self):
        p = params(s=0.4)
        lo, hi = well_domain(p)
        assert lo < math.asin(0.4) < hi


class TestWellLevels:
    def test_harmonic_limit(self):
        # s = 0, Ej/Ec = 1e6: spacing sqrt(2 Ec Ej) within 2%
        p = params(s=0.0, ratio=1e6)
        wl = well_levels(p, k=2)
        spacing = wl.energies[1] - wl.energies[0]
        assert spacing == pytest.approx(math.sqrt(2.0 * p.ec * p.ej), rel=0.02)

    @pytest.mark.parametrize("s", np.linspace(0.0, 0.95, 8))
    def test_anharmonicity(self, s):
        wl = well_levels(params(s=float(s)), k=3)
        if wl.energies.size >= 3:
            e = wl.energies
            assert (e[2] - e[1]) < (e[1] - e[0])

    def test_cubic_correction_formula(self):
        # E1 - E0 within 3% of (1 - s^2)^(1/4) sqrt(2 Ec Ej) while >= 5 bound
        for s in (0.0, 0.2, 0.4, 0.6, 0.8):
            p = params(s=s)
            wl = well_levels(p, k=5)
            assert not wl.truncated  # >= 5 bound states here
            gap = wl.energies[1] - wl.energies[0]
            assert gap == pytest.approx(plasma_spacing(p), rel=0.03)

    def test_count_non_increasing(self):
        counts = [bound_state_count(params(s=float(s))) for s in np.arange(0.0, 0.91, 0.1)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))
        assert counts[0] > counts[-1] > 0

    def test_truncated_flag_and_exact_count(self):
        p = params(s=0.9)
        exact = bound_state_count(p)
        wl = well_levels(p, k=exact + 10)
        assert wl.truncated
        assert wl.bound_count == exact
        assert wl.energies.size == exact
        ok = well_levels(p, k=2)
        assert not ok.truncated and ok.energies.size == 2

    def test_levels_below_barrier(self):
        p = params(s=0.5)
        wl = well_levels(p, k=6)
        assert np.all(wl.energies < wl.barrier_top)
        assert np.all(np.diff(wl.energies) > 0)
        assert wl.well_minimum < wl.energies[0]

    def test_grid_refinement_converged(self):
        p = params(s=0.3)
        a = well_levels(p, k=2)
        b = well_levels(p, k=2, grid=1 << 15)
        gap_a = a.energies[1] - a.energies[0]
        gap_b = b.energies[1] - b.energies[0]
        assert abs(gap_a - gap_b) <= 1e-5 * gap_b


class TestReadout:
    def test_ordering_everywhere(self):
        for s in (0.0, 0.3, 0.6, 0.9):
            nu01, nu12 = readout_transitions(params(s=s))
            assert nu12 < nu01

    def test_huge_ratio(self):
        nu01, nu12 = readout_transitions(params(s=0.9, ratio=1e6))
        assert nu12 / nu01 < 1.0

    def test_tilt_softens_and_empties_the_well(self):
        freqs = [readout_transitions(params(s=s))[0] for s in (0.0, 0.3, 0.6, 0.9)]
        assert all(a > b for a, b in zip(freqs, freqs[1:]))
        counts = [bound_state_count(params(s=s)) for s in (0.0, 0.5, 0.9)]
        assert counts[0] > counts[1] > counts[2]

    def test_too_few_bound_states(self):
        # a nearly washed-out well holds fewer than three levels
        shallow = PhaseQubitParams(ej=10.0, ec=10.0 / 1e3, s=0.98)
        assert bound_state_count(shallow) < 3
        with pytest.raises(ValidationError):
            readout_transitions(shallow)
