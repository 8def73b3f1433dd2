import math

import numpy as np
import pytest

from oracles import polarization_enumeration
from pbspurify.fock import (
    OUTCOMES,
    BranchLabel,
    FockVector,
    ModeIndex,
    apply_correction,
    apply_pbs,
    bell_projector,
    prepare_branch_state,
    project_detection,
    rejected_mass,
    transform,
)
from pbspurify.temporal import default_convention

CONV = default_convention()
PHI, PSI = BranchLabel.PHI_PLUS, BranchLabel.PSI_PLUS


def single(mode, amp=1.0):
    return FockVector.from_creations([(amp, [mode])])


def passed(b1, b2, tau1=0.0, tau2=0.0, phase=1j):
    state = prepare_branch_state(b1, b2, tau1, tau2, CONV)
    return apply_pbs(apply_pbs(state, "A", phase), "B", phase)


class TestFockVector:
    def test_bosonic_normalization(self):
        m = ModeIndex("A", "in1", "H", 0)
        state = FockVector.from_creations([(1 / math.sqrt(2), [m, m])])
        assert state.norm2() == pytest.approx(1.0)
        assert state.photon_number() == 2

    def test_inhomogeneous(self):
        a, b = ModeIndex("A", "in1", "H"), ModeIndex("B", "in1", "H")
        state = FockVector.from_creations([(1, [a]), (1, [a, b])])
        with pytest.raises(ValueError):
            state.photon_number()

    def test_hom_bunching(self):
        # 50:50 mixing of two indistinguishable photons never gives a coincidence.
        a, b = ModeIndex("A", "in1", "H"), ModeIndex("A", "in2", "H")
        c, d = ModeIndex("A", "out_keep", "H"), ModeIndex("A", "out_detect", "H")
        s = 1 / math.sqrt(2)
        out = transform(FockVector.from_creations([(1, [a, b])]), {a: ((c, s), (d, s)), b: ((c, s), (d, -s))})
        assert out[[c, d]] == pytest.approx(0)
        assert out.norm2() == pytest.approx(1.0)


class TestPrepare:
    def test_phi_phi_matched(self):
        state = prepare_branch_state(PHI, PHI, 0.0, 0.0, CONV)
        assert len(state) == 4
        assert state.norm2() == pytest.approx(1.0, abs=1e-12)
        for pa, pb in (("H", "H"), ("V", "V")):
            for qa, qb in (("H", "H"), ("V", "V")):
                modes = [ModeIndex("A", "in1", pa, 0), ModeIndex("B", "in1", pb, 0),
                         ModeIndex("A", "in2", qa, 0), ModeIndex("B", "in2", qb, 0)]
                assert state[modes] == pytest.approx(0.5)

    def test_phi_psi_matched(self):
        state = prepare_branch_state(PHI, PSI, 0.0, 0.0, CONV)
        assert len(state) == 4
        modes = [ModeIndex("A", "in1", "H"), ModeIndex("B", "in1", "H"),
                 ModeIndex("A", "in2", "V"), ModeIndex("B", "in2", "H")]
        assert state[modes] == pytest.approx(0.5)

    def test_displaced_photon_splits(self):
        state = prepare_branch_state(PHI, PHI, 0.4, 0.0, CONV)
        assert state.norm2() == pytest.approx(1.0, abs=1e-12)
        base = [ModeIndex("A", "in1", "H", 0), ModeIndex("B", "in1", "H", 0), ModeIndex("B", "in2", "H", 0)]
        w0 = state[base + [ModeIndex("A", "in2", "H", 0)]]
        w1 = state[base + [ModeIndex("A", "in2", "H", 1)]]
        assert w0 == pytest.approx(0.5 * math.sqrt(0.74), abs=1e-12)
        assert w1 == pytest.approx(0.5 * math.sqrt(0.26), abs=1e-12)


class TestPBS:
    def test_single_photon_convention(self):
        out = apply_pbs(single(ModeIndex("A", "in1", "H")), "A")
        assert out[[ModeIndex("A", "out_keep", "H")]] == 1
        out = apply_pbs(single(ModeIndex("A", "in1", "V")), "A")
        assert out[[ModeIndex("A", "out_detect", "V")]] == 1j
        out = apply_pbs(single(ModeIndex("A", "in2", "V", 1)), "A")
        assert out[[ModeIndex("A", "out_keep", "V", 1)]] == 1j
        out = apply_pbs(single(ModeIndex("A", "in2", "H", 1)), "A")
        assert out[[ModeIndex("A", "out_detect", "H", 1)]] == 1

    def test_other_party_untouched(self):
        m = ModeIndex("B", "in1", "V")
        assert apply_pbs(single(m), "A")[[m]] == 1

    def test_norm(self):
        assert passed(PHI, PHI, 0.3, 0.2).norm2() == pytest.approx(1.0, abs=1e-12)

    def test_unknown_party(self):
        with pytest.raises(ValueError):
            apply_pbs(single(ModeIndex("A", "in1", "H")), "C")


class TestDetection:
    def test_phi_phi_plus_plus(self):
        rho, prob = project_detection(passed(PHI, PHI), ("+", "+"))
        assert prob == pytest.approx(1 / 8, abs=1e-15)
        np.testing.assert_allclose(rho / prob, bell_projector("phi+"), atol=1e-12)

    def test_phi_phi_plus_minus(self):
        rho, prob = project_detection(passed(PHI, PHI), ("+", "-"))
        np.testing.assert_allclose(rho / prob, bell_projector("phi-"), atol=1e-12)

    @pytest.mark.parametrize("outcome", OUTCOMES)
    def test_cross_parity_never_heralds(self, outcome):
        for b1, b2 in ((PHI, PSI), (PSI, PHI)):
            _, prob = project_detection(passed(b1, b2), outcome)
            assert prob == 0.0

    @pytest.mark.parametrize("b1", list(BranchLabel))
    @pytest.mark.parametrize("b2", list(BranchLabel))
    @pytest.mark.parametrize("outcome", OUTCOMES)
    @pytest.mark.parametrize("phase", [1j, 1.0])
    def test_matches_polarization_enumeration(self, b1, b2, outcome, phase):
        rho, prob = project_detection(passed(b1, b2, phase=phase), outcome)
        expected = polarization_enumeration(b1.value, b2.value, outcome, phase)
        np.testing.assert_allclose(rho, expected, atol=1e-15)
        assert prob == pytest.approx(np.trace(expected).real, abs=1e-15)

    def test_requires_four_photons(self):
        with pytest.raises(ValueError):
            project_detection(single(ModeIndex("A", "out_detect", "H")), ("+", "+"))

    def test_completeness_with_mismatch(self):
        state = passed(PHI, PSI, 0.35, -0.5)
        total = sum(project_detection(state, o)[1] for o in OUTCOMES) + rejected_mass(state)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_mismatch_reduces_coherence(self):
        rho, prob = project_detection(passed(PHI, PHI, 0.4, 0.4), ("+", "+"))
        rho = rho / prob
        # HH/VV coherence shrinks by the product of both visibilities.
        assert rho[0, 3].real == pytest.approx(0.5 * 0.74 * 0.74, abs=1e-12)


class TestCorrection:
    def test_identity_outcomes(self):
        phi = bell_projector("phi+")
        np.testing.assert_array_equal(apply_correction(phi, ("+", "+")), phi)
        np.testing.assert_array_equal(apply_correction(phi, ("-", "-")), phi)

    @pytest.mark.parametrize("outcome", [("+", "-"), ("-", "+")])
    def test_phase_flip(self, outcome):
        np.testing.assert_allclose(apply_correction(bell_projector("phi-"), outcome), bell_projector("phi+"))
        np.testing.assert_allclose(apply_correction(bell_projector("psi-"), outcome), bell_projector("psi+"))
