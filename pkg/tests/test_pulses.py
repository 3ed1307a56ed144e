import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitcal.pulses import (
    ATOMIC_GATES,
    DragParams,
    PwcParams,
    discretize_drag,
    drag_parameter_space,
    drag_signal,
    envelope_derivative,
    gate_pulse,
    gaussian_envelope,
    pwc_parameter_space,
    pwc_signal,
    sample_signal,
    step_midpoints,
)

TWO_PI = 2 * np.pi


@pytest.fixture()
def drag():
    return DragParams(
        amplitude=2.0e8,
        drag_coeff=4.0e-10,
        drive_freq=4.8e9,
        phase=0.0,
        gate_time=15e-9,
        gauss_width=3.75e-9,
    )


class TestGaussianEnvelope:
    def test_peak_is_one(self, drag):
        assert gaussian_envelope(drag.gate_time / 2, drag) == pytest.approx(1.0)

    def test_boundaries_are_zero(self, drag):
        assert gaussian_envelope(0.0, drag) == pytest.approx(0.0, abs=1e-15)
        assert gaussian_envelope(drag.gate_time, drag) == pytest.approx(0.0, abs=1e-15)

    @given(st.floats(0.0, 1.0))
    def test_symmetry_about_midpoint(self, frac):
        p = DragParams(1.0, 0.0, 4.8e9, 0.0, 15e-9, 3.75e-9)
        t = frac * p.gate_time
        assert gaussian_envelope(t, p) == pytest.approx(
            gaussian_envelope(p.gate_time - t, p), abs=1e-12
        )

    def test_out_of_window_rejected(self, drag):
        with pytest.raises(ValueError):
            gaussian_envelope(-1e-12, drag)
        with pytest.raises(ValueError):
            gaussian_envelope(drag.gate_time * 1.001, drag)

    def test_derivative_matches_finite_differences(self, drag):
        t = np.linspace(0.05, 0.95, 31) * drag.gate_time
        h = 1e-14
        numeric = (gaussian_envelope(t + h, drag) - gaussian_envelope(t - h, drag)) / (2 * h)
        analytic = envelope_derivative(t, drag)
        scale = np.abs(analytic).max()
        np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-6 * scale)


class TestDragSignal:
    def test_peak_value_is_amplitude_when_phase_cancels(self):
        p = DragParams(
            amplitude=3.3e8,
            drag_coeff=0.0,
            drive_freq=4.8e9,
            phase=-TWO_PI * 4.8e9 * 15e-9 / 2,
            gate_time=15e-9,
            gauss_width=3.75e-9,
        )
        assert drag_signal(p.gate_time / 2, p) == pytest.approx(p.amplitude)

    def test_zero_amplitude_is_zero_everywhere(self, drag):
        p = DragParams(0.0, drag.drag_coeff, 4.8e9, 0.3, 15e-9, 3.75e-9)
        t = np.linspace(0.0, p.gate_time, 257)
        assert np.all(drag_signal(t, p) == 0.0)

    def test_quadrature_vanishes_at_peak(self, drag):
        # envelope derivative is zero at the center for any drag coefficient
        for eta in (-2e-9, 0.0, 3e-9):
            p = DragParams(2e8, eta, 4.8e9, 0.0, 15e-9, 3.75e-9)
            reference = DragParams(2e8, 0.0, 4.8e9, 0.0, 15e-9, 3.75e-9)
            t = p.gate_time / 2
            assert drag_signal(t, p) == pytest.approx(drag_signal(t, reference))

    def test_eta_zero_equals_plain_gaussian_carrier(self, drag):
        p = DragParams(drag.amplitude, 0.0, drag.drive_freq, 0.7, 15e-9, 3.75e-9)
        t = np.linspace(0.0, p.gate_time, 1001)
        expected = p.amplitude * gaussian_envelope(t, p) * np.cos(
            TWO_PI * p.drive_freq * t + p.phase
        )
        np.testing.assert_allclose(drag_signal(t, p), expected, atol=1e-12)


class TestPwcSignal:
    def test_constant_envelope(self):
        p = PwcParams(np.full(41, 2.5), np.zeros(41), 4.8e9, 0.4, 15e-9)
        t = np.linspace(0.0, p.gate_time, 500)
        expected = 2.5 * np.cos(TWO_PI * p.drive_freq * t + p.phase)
        np.testing.assert_allclose(pwc_signal(t, p), expected, atol=1e-12)

    def test_last_instant_uses_final_step(self):
        steps = np.arange(41.0)
        p = PwcParams(steps, np.zeros(41), 0.0, 0.0, 15e-9)
        t = np.nextafter(p.gate_time, 0.0)
        assert pwc_signal(t, p) == pytest.approx(40.0)

    def test_out_of_window_rejected(self):
        p = PwcParams(np.ones(41), np.zeros(41), 4.8e9, 0.0, 15e-9)
        with pytest.raises(ValueError):
            pwc_signal(15.1e-9, p)

    def test_discretized_drag_close_to_drag_signal(self, drag):
        pwc = discretize_drag(drag, 41)
        t = drag.gate_time * ((np.arange(4096) + 0.5) / 4096)
        gap = np.abs(pwc_signal(t, pwc) - drag_signal(t, drag))
        # bounded by the envelope Lipschitz constant times the step width
        lipschitz = np.abs(
            drag.amplitude * envelope_derivative(t, drag)
        ).max() + np.abs(drag.drag_coeff * drag.amplitude).max() * np.abs(
            np.gradient(envelope_derivative(t, drag), t)
        ).max()
        assert gap.max() <= lipschitz * (drag.gate_time / 41)


class TestDiscretizeDrag:
    def test_zero_amplitude_zeroes_everything(self, drag):
        p = DragParams(0.0, drag.drag_coeff, 4.8e9, 0.0, 15e-9, 3.75e-9)
        pwc = discretize_drag(p)
        assert np.all(pwc.inphase_steps == 0.0)
        assert np.all(pwc.quadrature_steps == 0.0)

    def test_zero_drag_zeroes_quadrature(self, drag):
        p = DragParams(drag.amplitude, 0.0, 4.8e9, 0.0, 15e-9, 3.75e-9)
        assert np.all(discretize_drag(p).quadrature_steps == 0.0)

    def test_center_step_equals_amplitude(self, drag):
        pwc = discretize_drag(drag, 41)
        assert pwc.inphase_steps[20] == pytest.approx(drag.amplitude, abs=1e-6 * drag.amplitude)

    def test_center_quadrature_step_exactly_zero(self, drag):
        assert discretize_drag(drag, 41).quadrature_steps[20] == 0.0

    def test_refinement_converges_linearly(self, drag):
        t = drag.gate_time * ((np.arange(8192) + 0.5) / 8192)
        reference = drag_signal(t, drag)

        def max_err(steps):
            pwc = discretize_drag(drag, steps)
            return np.abs(pwc_signal(t, pwc) - reference).max()

        ratio = max_err(41) / max_err(410)
        assert 8.0 < ratio < 12.0

    def test_carries_carrier_settings(self, drag):
        pwc = discretize_drag(drag)
        assert pwc.drive_freq == drag.drive_freq
        assert pwc.phase == drag.phase
        assert pwc.gate_time == drag.gate_time


class TestGatePulse:
    def test_x90p_keeps_amplitude_and_phase(self, drag):
        p = gate_pulse("X90p", drag)
        assert p.amplitude == drag.amplitude
        assert p.phase == drag.phase

    def test_y90m_flips_amplitude_offsets_phase(self, drag):
        p = gate_pulse("Y90m", drag)
        assert p.amplitude == -drag.amplitude
        assert p.phase == drag.phase + np.pi / 2

    def test_pi_rotations_double_amplitude(self, drag):
        assert gate_pulse("X180", drag).amplitude == 2 * drag.amplitude
        assert gate_pulse("Y180", drag).amplitude == 2 * drag.amplitude

    def test_identity_zero_signal(self, drag):
        p = gate_pulse("Id", drag)
        assert np.all(sample_signal(p, 64) == 0.0)

    def test_unknown_tag_rejected(self, drag):
        with pytest.raises(ValueError, match="unknown atomic gate"):
            gate_pulse("Z90p", drag)

    def test_pwc_gate_scaling(self):
        pwc = PwcParams(np.ones(41), 0.5 * np.ones(41), 4.8e9, 0.0, 15e-9)
        out = gate_pulse("X180", pwc)
        assert np.all(out.inphase_steps == 2.0)
        assert np.all(out.quadrature_steps == 1.0)

    def test_all_tags_produce_signals(self, drag):
        for tag in ATOMIC_GATES:
            assert sample_signal(gate_pulse(tag, drag), 128).shape == (128,)


class TestParameterSpace:
    def test_drag_round_trip(self, drag_space):
        x = drag_space.nominal + np.array([1e7, 1e-11, 5e5])
        params = drag_space.from_vector(x)
        np.testing.assert_allclose(drag_space.to_vector(params), x, rtol=1e-12)

    def test_pwc_round_trip(self, pwc_space, rng):
        x = pwc_space.nominal + rng.normal(0.0, 1e6, pwc_space.dimension)
        params = pwc_space.from_vector(x)
        np.testing.assert_array_equal(pwc_space.to_vector(params), x)

    def test_pwc_dimension_is_82(self, pwc_space):
        assert pwc_space.dimension == 82

    def test_drag_dimension_is_3(self, drag_space):
        assert drag_space.dimension == 3

    def test_clamp(self, drag_space):
        x = drag_space.upper + 1.0
        np.testing.assert_array_equal(drag_space.clamp(x), drag_space.upper)

    def test_nominal_within_bounds_required(self, drag):
        with pytest.raises(ValueError):
            drag_parameter_space(drag, 4.8e9, amplitude_bounds=(3e8, 4e8))

    def test_wrong_vector_length_rejected(self, drag_space):
        with pytest.raises(ValueError):
            drag_space.from_vector(np.zeros(4))

    def test_pwc_bounds_centered_on_discretized_nominal(self, drag):
        space = pwc_parameter_space(drag, 4.8e9, num_steps=41, halfwidth_frac=0.4)
        pwc = discretize_drag(drag, 41)
        nominal = np.concatenate([pwc.inphase_steps, pwc.quadrature_steps])
        np.testing.assert_allclose(space.nominal, nominal)
        np.testing.assert_allclose(space.upper - space.nominal, 0.4 * drag.amplitude)


def test_step_midpoints_center_is_exact():
    mids = step_midpoints(15e-9, 41)
    assert mids[20] == 15e-9 * 0.5
