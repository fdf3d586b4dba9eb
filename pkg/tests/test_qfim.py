"""Tests for the analytic QFIM assembly, bounds, scans, and reductions."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from dqmet import network, qfim, states
from dqmet.network import NonUnitaryError, validate_weights
from dqmet.qfim import (
    ComplexResidualError,
    aligned_coherent_amplitude,
    closed_form_variance,
    effective_qfi_diagnostic,
    family_state,
    global_variance,
    pure_qfim_exact,
    qfim_assemble,
    qfim_coefficients,
    qfim_mixed_coefficients,
    scaling_scan,
    scan_point,
    sensitivity_bounds,
    single_input_variance,
)
from dqmet.states import (
    Coherent,
    CustomFock,
    EvenCat,
    Fock,
    SqueezedThermal,
    SqueezedVacuum,
    as_spectral,
    moments_of,
)


def paired_from_half(half):
    """Interleave (+h, -h) pairs and normalize through the validator."""
    raw = []
    for h in half:
        raw.extend([h, -h])
    return validate_weights(raw)


def random_paired(rng, d):
    half = rng.uniform(0.1, 1.0, size=d) * rng.choice([-1.0, 1.0], size=d)
    return paired_from_half(half)


def random_unitary(rng, modes):
    z = rng.normal(size=(modes, modes)) + 1j * rng.normal(size=(modes, modes))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


custom_fock_states = st.lists(
    st.complex_numbers(max_magnitude=1.0, allow_infinity=False, allow_nan=False),
    min_size=2,
    max_size=6,
).filter(lambda cs: sum(abs(c) ** 2 for c in cs) > 1e-4).map(
    lambda cs: CustomFock(
        tuple(c / math.sqrt(sum(abs(x) ** 2 for x in cs)) for c in cs)
    )
)


class TestCoefficients:
    def test_coherent_probe_leaves_only_cross(self):
        m = moments_of(Coherent(1.0))
        c_u, c_v, c_s = qfim_coefficients(m, 1.0)
        assert c_u == pytest.approx(0.0, abs=1e-12)
        assert c_v == pytest.approx(0.0, abs=1e-12)
        # g = alpha1/2 for a coherent probe, amplitude passes unrotated
        assert c_s == pytest.approx(8.0 * 0.5, abs=1e-12)

    def test_squeezed_vacuum_closed_forms(self):
        r, n2 = 0.5, 2.0
        m = moments_of(SqueezedVacuum(r))
        c_u, c_v, c_s = qfim_coefficients(m, math.sqrt(n2))
        sh2 = math.sinh(r) ** 2
        assert c_u == pytest.approx(4.0 * sh2 * (2.0 * sh2 + 1.0), rel=1e-12)
        assert c_v == pytest.approx(
            8.0 * n2 * (sh2 + math.sinh(r) * math.cosh(r)), rel=1e-12
        )
        assert c_s == pytest.approx(0.0, abs=1e-12)

    def test_fock_probe(self):
        m = moments_of(Fock(3))
        for alpha in (0.7, 2.0, 1.0 + 1.0j):
            c_u, c_v, c_s = qfim_coefficients(m, alpha)
            assert c_u == pytest.approx(-12.0, abs=1e-12)
            assert c_v == pytest.approx(24.0 * abs(alpha) ** 2, rel=1e-12)
            assert c_s == pytest.approx(0.0, abs=1e-12)

    def test_reference_phase_is_consumed(self):
        # the alignment convention should make the coefficients depend on
        # |alpha| only, for squeezed and for displaced probes alike
        probes = [
            moments_of(SqueezedVacuum(0.7, 1.1)),
            moments_of(CustomFock((0.6, 0.5j, 0.4, -0.2, 0.43588989435406733j))),
        ]
        for m in probes:
            base = qfim_coefficients(m, 1.3)
            for phi in (0.4, -2.0, 3.1):
                rotated = qfim_coefficients(m, 1.3 * cmath.exp(1j * phi))
                assert rotated == pytest.approx(base, rel=1e-12, abs=1e-12)

    def test_alignment_matches_squeezing_axis(self):
        theta = 0.9
        m = moments_of(SqueezedVacuum(0.5, theta))
        aligned = aligned_coherent_amplitude(m, 2.0)
        # xi1 has phase theta+pi, so alpha' sits at half of that
        want = cmath.phase(m.xi1) / 2.0
        assert abs(aligned) == pytest.approx(2.0, rel=1e-12)
        assert cmath.phase(aligned) == pytest.approx(want, abs=1e-12)

    def test_vacuum_probe_all_zero(self):
        m = moments_of(Coherent(0.0))
        assert qfim_coefficients(m, 3.0) == pytest.approx((0.0, 0.0, 0.0), abs=1e-13)

    @given(state=custom_fock_states, amp=st.floats(0.0, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_coefficient_inequalities(self, state, amp):
        m = moments_of(state)
        c_u, c_v, c_s = qfim_coefficients(m, amp)
        assert math.isfinite(c_u) and math.isfinite(c_v) and math.isfinite(c_s)
        assert c_v >= -1e-10
        # nu1 >= 0 bounds c_u from below by the number mean
        assert c_u >= -4.0 * m.n1 - 1e-9


class TestMixedCoefficients:
    def test_pure_reduction_squeezed(self):
        rho = as_spectral(SqueezedVacuum(0.5), cutoff=40)
        pure = qfim_coefficients(moments_of(SqueezedVacuum(0.5)), math.sqrt(2.0))
        mixed = qfim_mixed_coefficients(rho, math.sqrt(2.0))
        assert mixed == pytest.approx(pure, rel=1e-8, abs=1e-8)

    def test_pure_reduction_displaced_probe(self):
        state = CustomFock((0.6, 0.5j, 0.4, -0.2, 0.43588989435406733j))
        rho = as_spectral(state, cutoff=40)
        pure = qfim_coefficients(moments_of(state), 1.7)
        mixed = qfim_mixed_coefficients(rho, 1.7)
        assert mixed == pytest.approx(pure, rel=1e-8, abs=1e-8)

    def test_squeezed_thermal_family(self):
        r = 1.0
        nt = 0.1 * math.sinh(r) ** 2
        rho = as_spectral(SqueezedThermal(r, 0.0, nt), cutoff=250)
        n2 = 1.5
        c_u, c_v, c_s = qfim_mixed_coefficients(rho, math.sqrt(n2))
        power = 0.5 * (math.exp(2.0 * r) / (1.0 + 2.0 * nt) - 1.0)
        assert c_v == pytest.approx(8.0 * n2 * power, rel=1e-6)
        assert c_s == pytest.approx(0.0, abs=1e-8)
        assert math.isfinite(c_u)

    def test_thermal_probe_classical(self):
        nt = 0.8
        rho = as_spectral(SqueezedThermal(0.0, 0.0, nt), cutoff=60)
        c_u, c_v, c_s = qfim_mixed_coefficients(rho, 2.0)
        # a thermal probe is invariant under the number generator and no
        # better than vacuum for displacement sensing
        assert c_v == 0.0
        assert c_u == pytest.approx(-4.0 * nt, rel=1e-8)
        assert c_s == pytest.approx(0.0, abs=1e-8)


class TestAssemble:
    def test_reference_only_is_diagonal(self):
        w = validate_weights([0.3, -0.3, 0.2, -0.2])
        u_mat = network.build_optimal_network(w)
        n2 = 5.0
        bundle = qfim_assemble((0.0, 0.0, 0.0), u_mat, 0.0, n2)
        want = np.diag(4.0 * n2 * np.abs(w.entries))
        assert np.allclose(bundle.matrix, want, atol=1e-12)
        assert np.allclose(bundle.v, w.entries, atol=1e-12)
        assert bundle.column_phase == pytest.approx(0.0, abs=1e-12)

    def test_vacuum_inputs_zero_matrix(self):
        w = validate_weights([0.5, -0.5])
        bundle = qfim_assemble(
            (0.0, 0.0, 0.0), network.build_optimal_network(w), 0.0, 0.0
        )
        assert np.all(bundle.matrix == 0.0)

    def test_recomposition_psd_and_balance(self):
        rng = np.random.default_rng(11)
        probes = [
            SqueezedVacuum(0.8, 0.3),
            EvenCat(1.2),
            Fock(2),
            Coherent(0.9 + 0.4j),
        ]
        for probe in probes:
            m = moments_of(probe)
            w = random_paired(rng, int(rng.integers(1, 4)))
            u_mat = network.build_optimal_network(w)
            n2 = float(rng.uniform(0.0, 4.0))
            bundle = qfim_assemble(
                qfim_coefficients(m, math.sqrt(n2)), u_mat, m.n1, n2
            )
            scale = max(1.0, float(np.max(np.abs(bundle.matrix))))
            assert np.allclose(bundle.matrix, bundle.recompose(), atol=1e-12 * scale)
            assert np.allclose(bundle.matrix, bundle.matrix.T, atol=1e-12 * scale)
            assert np.linalg.eigvalsh(bundle.matrix)[0] >= -1e-10 * scale
            assert abs(bundle.v.sum()) <= 1e-12

    def test_column_phase_recorded_and_invertible(self):
        m = moments_of(SqueezedVacuum(0.6, 0.9))
        w = validate_weights([0.35, -0.35, 0.15, -0.15])
        u_rot = network.build_optimal_network(w).astype(complex)
        chi0 = 0.77
        u_rot[:, 1] *= cmath.exp(1j * chi0)
        n2 = 1.69
        bundle = qfim_assemble(qfim_coefficients(m, 1.3), u_rot, m.n1, n2)
        assert bundle.column_phase == pytest.approx(-chi0, abs=1e-12)
        assert np.allclose(bundle.v, w.entries, atol=1e-12)
        # the physical reference amplitude that realizes the assembled
        # matrix undoes the recorded column phase
        physical = aligned_coherent_amplitude(m, 1.3) * cmath.exp(
            -1j * bundle.column_phase
        )
        truth = pure_qfim_exact(m, physical, u_rot)
        assert np.allclose(truth, bundle.matrix, atol=1e-12 * np.max(bundle.matrix))

    def test_incompatible_column_phases_raise(self):
        j = np.arange(3)
        dft = np.exp(2j * np.pi * np.outer(j, j) / 3) / math.sqrt(3)
        with pytest.raises(ComplexResidualError):
            qfim_assemble((1.0, 1.0, 0.0), dft, 1.0, 1.0)

    def test_non_unitary_raises(self):
        with pytest.raises(NonUnitaryError):
            qfim_assemble((0.0, 0.0, 0.0), np.eye(2) * 1.5, 1.0, 1.0)


class TestVariance:
    def test_reference_only_standard_quantum_limit(self):
        w = validate_weights([0.3, -0.3, 0.2, -0.2])
        u_mat = network.build_optimal_network(w)
        n2 = 7.0
        m = moments_of(Coherent(0.0))
        bundle = qfim_assemble(qfim_coefficients(m, math.sqrt(n2)), u_mat, 0.0, n2)
        assert global_variance(bundle, w) == pytest.approx(1.0 / n2, rel=1e-13)

    def test_squeezed_reference_example(self):
        m = moments_of(SqueezedVacuum(0.5))
        n2 = 2.0
        w = validate_weights([0.5, -0.5])
        bundle = qfim_assemble(
            qfim_coefficients(m, math.sqrt(n2)),
            network.build_optimal_network(w),
            m.n1,
            n2,
        )
        var = global_variance(bundle, w)
        n_tot = m.n1 + n2
        power = m.n1 + math.sinh(0.5) * math.cosh(0.5)
        assert var == pytest.approx(4.0 / (4.0 * n_tot + 8.0 * n2 * power), rel=1e-12)

    def test_closed_form_matches_numeric_inverse(self):
        rng = np.random.default_rng(23)
        probes = [
            SqueezedVacuum(0.9, -0.4),
            EvenCat(1.1),
            Fock(4),
            Coherent(1.2 - 0.3j),
            CustomFock((0.5, 0.5, 0.5, 0.5)),
        ]
        for probe in probes:
            m = moments_of(probe)
            for d in (1, 2, 3, 4):
                w = random_paired(rng, d)
                n2 = float(rng.uniform(0.1, 5.0))
                bundle = qfim_assemble(
                    qfim_coefficients(m, math.sqrt(n2)),
                    network.build_optimal_network(w),
                    m.n1,
                    n2,
                )
                var = global_variance(bundle, w)
                closed = closed_form_variance(
                    bundle.c_u, bundle.c_v, bundle.c_s, bundle.N_total
                )
                assert var == pytest.approx(closed, rel=1e-10)

    def test_both_schemes_share_the_closed_form(self):
        m = moments_of(SqueezedVacuum(0.8))
        n2 = 2.5
        coeffs = qfim_coefficients(m, math.sqrt(n2))
        w_paired = validate_weights([0.25, -0.25, 0.15, -0.15, 0.1, -0.1])
        w_reduced = validate_weights([0.5, -0.3], scheme="reduced")
        variances = []
        for w in (w_paired, w_reduced):
            bundle = qfim_assemble(
                coeffs, network.build_optimal_network(w), m.n1, n2
            )
            variances.append(global_variance(bundle, w))
        assert variances[0] == pytest.approx(variances[1], rel=1e-12)

    def test_empty_network_is_unsupported(self):
        w = validate_weights([0.5, -0.5])
        bundle = qfim_assemble(
            (0.0, 0.0, 0.0), network.build_optimal_network(w), 0.0, 0.0
        )
        assert math.isinf(global_variance(bundle, w))

    def test_weight_length_mismatch_raises(self):
        w2 = validate_weights([0.5, -0.5])
        w4 = validate_weights([0.3, -0.3, 0.2, -0.2])
        bundle = qfim_assemble(
            (0.0, 0.0, 0.0), network.build_optimal_network(w4), 0.0, 1.0
        )
        with pytest.raises(ValueError):
            global_variance(bundle, w2)


class TestBounds:
    def test_reference_only_sql(self):
        report = sensitivity_bounds(moments_of(Coherent(0.0)), 100.0)
        assert report.bound_exact == pytest.approx(0.1, rel=1e-13)
        assert report.bound_universal == pytest.approx(0.1, rel=1e-13)
        assert report.variance_q == pytest.approx(0.01, rel=1e-13)
        assert report.scaling_exponent == pytest.approx(0.5, abs=1e-13)

    def test_balanced_squeezed_example(self):
        r = math.asinh(math.sqrt(2.0))
        report = sensitivity_bounds(moments_of(SqueezedVacuum(r)), 2.0)
        power = 2.0 + math.sqrt(6.0)
        want = 1.0 / math.sqrt(4.0 + 4.0 * power)
        assert report.bound_universal == pytest.approx(want, rel=1e-12)
        # c_s = 0 makes the two bounds coincide
        assert report.bound_exact == pytest.approx(report.bound_universal, rel=1e-12)
        assert report.variance_q == pytest.approx(report.bound_exact**2, rel=1e-12)

    def test_small_total_energy_has_no_exponent(self):
        report = sensitivity_bounds(moments_of(SqueezedVacuum(0.4)), 1.0)
        assert report.scaling_exponent is None

    def test_displaced_probe_first_bound_looser(self):
        # a coherent probe drives c_s without c_v; the first bound then
        # rises above the universal one and is reported unclamped
        n2 = 50.0
        report = sensitivity_bounds(moments_of(Coherent(math.sqrt(50.0))), n2)
        assert report.bound_universal == pytest.approx(0.1, rel=1e-12)
        assert report.bound_exact == pytest.approx(1.0 / math.sqrt(75.0), rel=1e-12)
        assert report.bound_exact > report.bound_universal

    def test_mixed_probe_report(self):
        rho = as_spectral(SqueezedThermal(0.3, 0.0, 0.05), cutoff=40)
        report = sensitivity_bounds(rho, 1.0)
        assert report.variance_q == pytest.approx(report.bound_exact**2, rel=1e-10)
        assert report.bound_exact <= report.bound_universal * (1.0 + 1e-10)

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValueError):
            sensitivity_bounds(moments_of(Coherent(0.0)), 1.0, scheme="ring")

    @given(state=custom_fock_states, n2=st.floats(0.0, 6.0))
    @settings(max_examples=40, deadline=None)
    def test_bound_chain(self, state, n2):
        report = sensitivity_bounds(moments_of(state), n2)
        if math.isfinite(report.variance_q):
            assert report.variance_q >= report.bound_exact**2 * (1.0 - 1e-12)
        assert report.bound_exact**2 >= report.bound_universal**2 * (1.0 - 1e-12)


class TestScan:
    def test_squeezed_family_peaks_at_balanced_split(self):
        rows = scaling_scan("sv", [0.25, 0.5, 1.0, 2.0, 4.0], 1e4)
        best = max(rows, key=lambda row: row.s)
        assert best.sigma == 1.0
        assert best.s == pytest.approx(1.0, abs=1e-3)

    def test_thermal_family_peak_shifts(self):
        rows = scaling_scan("st", [0.25, 0.5, 1.0, 2.0, 4.0], 1e4)
        best = max(rows, key=lambda row: row.s)
        assert best.sigma != 1.0

    def test_vanishing_probe_recovers_sql(self):
        row = scan_point("sv", 1e-7, 1e4)
        assert row.s == pytest.approx(0.5, abs=5e-3)

    def test_cat_row_solves_the_size_equation(self):
        row = scan_point("cat", 1.0, 20.0)
        x = row.W - row.n1
        assert x * math.tanh(x) == pytest.approx(row.n1, rel=1e-10)

    def test_rows_partition_the_energy(self):
        for family in ("sv", "cat", "st"):
            row = scan_point(family, 0.7, 50.0)
            assert row.n1 + row.n2 == pytest.approx(50.0, rel=1e-12)
            assert row.n1 / row.n2 == pytest.approx(0.7, rel=1e-12)
            assert row.bound_universal == pytest.approx(
                1.0 / math.sqrt(50.0 + 2.0 * row.n2 * row.W), rel=1e-12
            )

    def test_family_states_hit_the_target_mean(self):
        n1 = 2.3
        sv = family_state("sv", n1)
        assert math.sinh(sv.squeeze_modulus) ** 2 == pytest.approx(n1, rel=1e-12)
        cat = family_state("cat", n1)
        assert moments_of(cat).n1 == pytest.approx(n1, rel=1e-9)
        st_state = family_state("st", n1)
        y = math.sinh(st_state.squeeze_modulus) ** 2
        nt = st_state.thermal_occupation
        assert nt == pytest.approx(0.1 * y, rel=1e-12)
        assert (2.0 * nt + 1.0) * y + nt == pytest.approx(n1, rel=1e-12)

    def test_scan_input_validation(self):
        with pytest.raises(ValueError):
            scan_point("sv", -1.0, 10.0)
        with pytest.raises(ValueError):
            scan_point("sv", 1.0, 0.5)
        with pytest.raises(ValueError):
            scan_point("ring", 1.0, 10.0)


class TestSingleInput:
    def test_paired_weights_locked_to_sql(self):
        rng = np.random.default_rng(31)
        for probe in (SqueezedVacuum(1.0), EvenCat(1.4), Fock(2)):
            m = moments_of(probe)
            w = random_paired(rng, 2)
            u_mat = network.build_optimal_network(w)
            var = single_input_variance(m, u_mat, w)
            assert var == pytest.approx(1.0 / m.n1, rel=1e-12)

    def test_positive_weights_can_beat_sql(self):
        m = moments_of(SqueezedVacuum(1.0))
        w = validate_weights([0.25, -0.25, 0.25, -0.25])
        u_mat = network.build_optimal_network(w)
        var = single_input_variance(m, u_mat, np.array([0.25] * 4))
        assert var < 0.5 / m.n1

    def test_number_eigenstate_probe_never_beats_sql(self):
        m = moments_of(Fock(2))
        w = validate_weights([0.25, -0.25, 0.25, -0.25])
        u_mat = network.build_optimal_network(w)
        for raw in ([0.25] * 4, [0.4, 0.3, 0.2, 0.1]):
            # zero number variance kills the collective direction outright
            assert math.isinf(single_input_variance(m, u_mat, np.array(raw)))
        paired = single_input_variance(m, u_mat, w)
        assert paired >= 1.0 / m.n1 - 1e-12

    def test_matches_general_evaluator(self):
        m = moments_of(EvenCat(1.4))
        w = validate_weights([0.3, -0.3, 0.2, -0.2])
        u_mat = network.build_optimal_network(w)
        direct = single_input_variance(m, u_mat, w)
        full = pure_qfim_exact(m, 0.0, u_mat)
        solved = 4.0 * float(w.entries @ np.linalg.solve(full, w.entries))
        assert direct == pytest.approx(solved, rel=1e-9)

    def test_scaling_stays_at_sql(self):
        w = validate_weights([0.5, -0.5])
        slopes = []
        for n_target in (10.0, 100.0, 1000.0):
            r = math.asinh(math.sqrt(n_target))
            m = moments_of(SqueezedVacuum(r))
            u_mat = network.build_optimal_network(w)
            var = single_input_variance(m, u_mat, w)
            slopes.append((math.log(n_target), math.log(math.sqrt(var))))
        xs, ys = zip(*slopes)
        slope = np.polyfit(xs, ys, 1)[0]
        assert -slope == pytest.approx(0.5, abs=0.05)


class TestPureExact:
    def test_coherent_pair_truth(self):
        rng = np.random.default_rng(7)
        for _ in range(6):
            modes = int(rng.integers(2, 6))
            u_mat = random_unitary(rng, modes)
            a1 = complex(rng.normal(), rng.normal())
            a2 = complex(rng.normal(), rng.normal())
            m = moments_of(Coherent(a1))
            result = pure_qfim_exact(m, a2, u_mat)
            amps = np.zeros(modes, complex)
            amps[:2] = (a1, a2)
            gamma = u_mat.conj() @ amps
            truth = np.diag(4.0 * np.abs(gamma) ** 2)
            assert np.allclose(result, truth, atol=1e-16 + 1e-12 * np.max(truth))

    def test_centered_probe_matches_assembly(self):
        for theta in (0.0, 0.9, -1.7):
            m = moments_of(SqueezedVacuum(0.6, theta))
            aligned = aligned_coherent_amplitude(m, 1.3)
            for raw in ([0.5, -0.5], [0.35, -0.35, 0.15, -0.15]):
                w = validate_weights(raw)
                u_mat = network.build_optimal_network(w)
                exact = pure_qfim_exact(m, aligned, u_mat)
                bundle = qfim_assemble(
                    qfim_coefficients(m, 1.3), u_mat, m.n1, 1.69
                )
                assert np.allclose(
                    exact, bundle.matrix, atol=1e-12 * np.max(np.abs(exact))
                )

    def test_decomposition_needs_centered_probe(self):
        # with a displaced probe the rank-two form redistributes weight
        # between the diagonal and the cross term; the general evaluator is
        # the one that matches physical reality (dark-port mode carries no
        # phase information at all)
        m = moments_of(Coherent(1.0))
        w = validate_weights([0.5, -0.5])
        u_mat = network.build_optimal_network(w)
        truth = pure_qfim_exact(m, 1.0, u_mat)
        assert np.allclose(truth, np.diag([8.0, 0.0]), atol=1e-12)
        bundle = qfim_assemble(qfim_coefficients(m, 1.0), u_mat, m.n1, 1.0)
        assert np.allclose(bundle.matrix, np.diag([6.0, 2.0]), atol=1e-12)

    def test_needs_reference_port(self):
        m = moments_of(Coherent(1.0))
        with pytest.raises(ValueError):
            pure_qfim_exact(m, 0.0, np.eye(1))


class TestDiagnostic:
    def test_plane_report_on_matched_network(self):
        m = moments_of(SqueezedVacuum(0.5))
        n2 = 2.0
        w = validate_weights([0.5, -0.5])
        bundle = qfim_assemble(
            qfim_coefficients(m, math.sqrt(n2)),
            network.build_optimal_network(w),
            m.n1,
            n2,
        )
        report = effective_qfi_diagnostic(bundle, w)
        assert report["cos_angle"] == pytest.approx(0.0, abs=1e-12)
        assert report["n_v"] == pytest.approx(float(w.entries @ w.entries), rel=1e-12)
        assert report["c_v_eff"] == pytest.approx(bundle.c_v * report["n_v"], rel=1e-12)
        assert report["noiseless_variance"] == pytest.approx(
            4.0 / bundle.c_v, rel=1e-10
        )

    def test_weight_outside_plane_diverges(self):
        w4 = validate_weights([0.3, -0.3, 0.2, -0.2])
        m = moments_of(SqueezedVacuum(0.5))
        bundle = qfim_assemble(
            qfim_coefficients(m, 1.0), network.build_optimal_network(w4), m.n1, 1.0
        )
        outside = validate_weights([0.2, -0.2, 0.3, -0.3])
        report = effective_qfi_diagnostic(bundle, outside)
        assert math.isinf(report["noiseless_variance"])
