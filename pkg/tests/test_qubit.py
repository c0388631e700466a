"""Qubit algebra: trine geometry, Born rule, collapse mechanics.

Frozen expectations were derived by hand from the 2x2 linear algebra
(inner products of the stated amplitudes) or recomputed here with an
independent numpy kron oracle where the package uses staged scalar math.
"""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trinegamble.qubit import (
    ATOL,
    LABELS,
    BlochVector,
    CheckOutcome,
    DensityOperator,
    Povm,
    PureState,
    TwoQubitState,
    bloch_from_state,
    born_probabilities,
    check_fail_probability,
    depolarize,
    local_measure_branches,
    local_measure_collapse,
    mixture_density,
    optimal_povm,
    partial_trace,
    project_check,
    remote_povm_branches,
    remote_povm_collapse,
    sample_outcome,
    state_from_bloch,
    trine_states,
    uniform_label,
)

from conftest import four_sigma, random_basis, random_pair, random_pure

SQRT3_2 = math.sqrt(3.0) / 2.0


# ---------------------------------------------------------------------------
# hypothesis building blocks

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def pure_states(draw):
    raw = [draw(finite) for _ in range(4)]
    norm2 = sum(v * v for v in raw)
    if norm2 < 1e-4:
        raw[0] = 1.0
    return PureState.from_unnormalized(complex(raw[0], raw[1]), complex(raw[2], raw[3]))


@st.composite
def pair_states(draw):
    raw = [draw(finite) for _ in range(8)]
    norm2 = sum(v * v for v in raw)
    if norm2 < 1e-4:
        raw[0] = 1.0
    return TwoQubitState.from_unnormalized(
        complex(raw[0], raw[1]), complex(raw[2], raw[3]),
        complex(raw[4], raw[5]), complex(raw[6], raw[7]),
    )


# ---------------------------------------------------------------------------
# trine geometry


def test_trine_amplitudes():
    t = trine_states()
    assert t["a"].a0 == 1.0 and t["a"].a1 == 0.0
    assert t["b"].a0 == 0.5 and t["b"].a1 == pytest.approx(SQRT3_2, abs=0)
    assert t["c"].a0 == 0.5 and t["c"].a1 == pytest.approx(-SQRT3_2, abs=0)


def test_trine_pairwise_overlap_squared_is_one_quarter():
    t = trine_states()
    for x, y in (("a", "b"), ("a", "c"), ("b", "c")):
        assert abs(t[x].fidelity(t[y]) - 0.25) < 1e-12


def test_trine_bloch_vectors_form_plane_trident():
    t = trine_states()
    vecs = {lab: bloch_from_state(t[lab]) for lab in LABELS}
    assert vecs["a"].x == pytest.approx(0.0, abs=1e-12)
    assert vecs["a"].z == pytest.approx(1.0, abs=1e-12)
    assert vecs["b"].x == pytest.approx(SQRT3_2, abs=1e-12)
    assert vecs["b"].z == pytest.approx(-0.5, abs=1e-12)
    for lab in LABELS:
        assert vecs[lab].y == 0.0
    # pairwise angle 2*pi/3
    for x, y in (("a", "b"), ("a", "c"), ("b", "c")):
        assert vecs[x].dot(vecs[y]) == pytest.approx(-0.5, abs=1e-12)


def test_pure_state_rejects_bad_norm_and_nan():
    with pytest.raises(ValueError):
        PureState(1.0, 1.0)
    with pytest.raises(ValueError):
        PureState(float("nan"), 0.0)
    with pytest.raises(ValueError):
        PureState.from_unnormalized(0.0, 0.0)


@given(pure_states())
def test_orthogonal_companion(s):
    o = s.orthogonal()
    assert abs(s.inner(o)) < 1e-12
    assert abs(abs(o.a0) ** 2 + abs(o.a1) ** 2 - 1.0) < 1e-9


@given(pure_states())
def test_bloch_round_trip(s):
    v = bloch_from_state(s)
    assert abs(v.norm() - 1.0) < 1e-9
    back = state_from_bloch(v)
    assert back.fidelity(s) > 1.0 - 1e-9


def test_state_from_bloch_rejects_non_unit():
    with pytest.raises(ValueError):
        state_from_bloch(BlochVector(0.5, 0.0, 0.0))
    with pytest.raises(ValueError):
        BlochVector(1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# mixtures and density operators


def test_mixture_of_antipodal_states_is_maximally_mixed():
    rho = mixture_density([0.5, 0.5], [PureState(1.0, 0.0), PureState(0.0, 1.0)])
    b = rho.bloch()
    assert abs(b.x) < 1e-12 and abs(b.y) < 1e-12 and abs(b.z) < 1e-12


def test_single_component_mixture_is_the_projector():
    t = trine_states()
    rho = mixture_density([1.0], [t["b"]])
    assert rho.expectation(t["b"]) == pytest.approx(1.0, abs=1e-12)


def test_uniform_trine_mixture_is_maximally_mixed():
    t = trine_states()
    rho = mixture_density([1 / 3, 1 / 3, 1 / 3], [t[lab] for lab in LABELS])
    b = rho.bloch()
    assert abs(b.x) < 1e-12 and abs(b.y) < 1e-12 and abs(b.z) < 1e-12


def test_mixture_weights_must_sum_to_one():
    t = trine_states()
    with pytest.raises(ValueError):
        mixture_density([0.7, 0.7], [t["a"], t["b"]])
    with pytest.raises(ValueError):
        mixture_density([1.5, -0.5], [t["a"], t["b"]])


@given(st.lists(st.tuples(st.floats(0.01, 1.0), pure_states()), min_size=1, max_size=4))
def test_mixture_bloch_is_weight_average(parts):
    total = sum(w for w, _ in parts)
    weights = [w / total for w, _ in parts]
    states = [s for _, s in parts]
    rho = mixture_density(weights, states)
    bx = sum(w * bloch_from_state(s).x for w, s in zip(weights, states))
    by = sum(w * bloch_from_state(s).y for w, s in zip(weights, states))
    bz = sum(w * bloch_from_state(s).z for w, s in zip(weights, states))
    b = rho.bloch()
    assert abs(b.x - bx) < 1e-9 and abs(b.y - by) < 1e-9 and abs(b.z - bz) < 1e-9


def test_density_operator_validation():
    with pytest.raises(ValueError):
        DensityOperator([[0.6, 0.0], [0.0, 0.6]])  # trace
    with pytest.raises(ValueError):
        DensityOperator([[1.2, 0.0], [0.0, -0.2]])  # eigenvalue
    with pytest.raises(ValueError):
        DensityOperator([[0.5, 0.3], [0.1, 0.5]])  # hermiticity


# ---------------------------------------------------------------------------
# the trine discriminator


def test_discriminator_elements_complete_and_positive():
    povm = optimal_povm()
    total = np.zeros((2, 2), dtype=complex)
    for e in povm.elements:
        m = np.asarray(e, dtype=complex)
        assert np.linalg.eigvalsh(m).min() > -1e-9
        total += m
    assert np.max(np.abs(total - np.eye(2))) < 1e-12
    assert povm.labels == LABELS


def test_born_rule_on_matching_trine_state():
    probs = born_probabilities(trine_states()["a"], optimal_povm())
    assert abs(probs[0] - 2.0 / 3.0) < 1e-12
    assert abs(probs[1] - 1.0 / 6.0) < 1e-12
    assert abs(probs[2] - 1.0 / 6.0) < 1e-12


def test_uniform_honest_input_guessed_correctly_two_thirds():
    povm = optimal_povm()
    t = trine_states()
    correct = sum(born_probabilities(t[lab], povm)[k] for k, lab in enumerate(LABELS)) / 3.0
    assert abs(correct - 2.0 / 3.0) < 1e-12


def test_born_on_maximally_mixed_is_uniform():
    probs = born_probabilities(DensityOperator.maximally_mixed(), optimal_povm())
    for p in probs:
        assert abs(p - 1.0 / 3.0) < 1e-12


@given(pure_states())
def test_born_output_is_probability_vector(s):
    probs = born_probabilities(s, optimal_povm())
    for p in probs:
        assert 0.0 <= p <= 1.0
    assert abs(sum(probs) - 1.0) < 1e-12


def test_born_rejects_non_states():
    with pytest.raises(TypeError):
        born_probabilities("a", optimal_povm())


def test_povm_constructor_rejects_incomplete_elements():
    half = np.eye(2) * 0.4
    with pytest.raises(ValueError):
        Povm((half, half), ("a", "b"), None)


# ---------------------------------------------------------------------------
# sampling


def test_sample_outcome_degenerate_and_deterministic():
    r = random.Random(5)
    assert all(sample_outcome((1.0, 0.0, 0.0), r) == 0 for _ in range(50))
    r1, r2 = random.Random(9), random.Random(9)
    seq1 = [sample_outcome((0.3, 0.3, 0.4), r1) for _ in range(200)]
    seq2 = [sample_outcome((0.3, 0.3, 0.4), r2) for _ in range(200)]
    assert seq1 == seq2


def test_sample_outcome_zero_probability_entries_never_fire():
    r = random.Random(17)
    assert all(sample_outcome((0.0, 1.0, 0.0), r) == 1 for _ in range(2000))
    draws = [sample_outcome((0.5, 0.5, 0.0), r) for _ in range(5000)]
    assert 2 not in draws


def test_sample_outcome_frequencies_match_born_weights():
    probs = (2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0)
    n = 1_000_000
    r = random.Random(123)
    counts = [0, 0, 0]
    for _ in range(n):
        counts[sample_outcome(probs, r)] += 1
    for k in range(3):
        assert abs(counts[k] / n - probs[k]) < four_sigma(probs[k], n)


def test_sample_outcome_validates_input():
    r = random.Random(0)
    with pytest.raises(ValueError):
        sample_outcome((0.5, 0.4), r)
    with pytest.raises(ValueError):
        sample_outcome((-0.2, 1.2), r)


def test_uniform_label_spread():
    r = random.Random(31)
    n = 60_000
    counts = {lab: 0 for lab in LABELS}
    for _ in range(n):
        counts[uniform_label(r)] += 1
    for lab in LABELS:
        assert abs(counts[lab] / n - 1 / 3) < four_sigma(1 / 3, n)


# ---------------------------------------------------------------------------
# the claim check


def test_check_fail_probability_frozen_points():
    t = trine_states()
    assert check_fail_probability(t["a"], "a") == 0.0
    assert check_fail_probability(t["b"], "b") == 0.0  # exact despite sqrt3 rounding
    assert abs(check_fail_probability(t["b"], "a") - 0.75) < 1e-12
    with pytest.raises(ValueError):
        check_fail_probability(t["a"], "d")


def test_check_fail_probability_follows_half_angle_law():
    # state at Bloch angle theta from the claimed trine direction
    for theta in np.linspace(0.0, math.pi, 40):
        s = state_from_bloch(BlochVector(math.sin(theta), 0.0, math.cos(theta)))
        want = 1.0 - math.cos(theta / 2.0) ** 2
        assert abs(check_fail_probability(s, "a") - want) < 1e-12


def test_project_check_eigenstate_never_fails():
    t = trine_states()
    r = random.Random(77)
    assert all(project_check(t["a"], "a", r) is CheckOutcome.PASS for _ in range(10_000))
    assert all(project_check(t["c"], "c", r) is CheckOutcome.PASS for _ in range(10_000))


def test_project_check_cross_trine_fails_three_quarters():
    t = trine_states()
    r = random.Random(88)
    n = 100_000
    fails = sum(project_check(t["b"], "a", r) is CheckOutcome.FAIL for _ in range(n))
    assert abs(fails / n - 0.75) < four_sigma(0.75, n)


def test_project_check_rate_at_arbitrary_angle():
    theta = 1.1
    s = state_from_bloch(BlochVector(math.sin(theta), 0.0, math.cos(theta)))
    want = 1.0 - math.cos(theta / 2.0) ** 2
    r = random.Random(99)
    n = 100_000
    fails = sum(project_check(s, "a", r) is CheckOutcome.FAIL for _ in range(n))
    assert abs(fails / n - want) < four_sigma(want, n)


# ---------------------------------------------------------------------------
# channel noise


def test_depolarize_endpoints():
    t = trine_states()
    rho = t["b"].density()
    same = depolarize(rho, 0.0)
    assert np.allclose(same.matrix, rho.matrix, atol=1e-15)
    flat = depolarize(rho, 1.0)
    assert np.allclose(flat.matrix, np.eye(2) / 2.0, atol=1e-15)


def test_depolarize_makes_eigenstate_check_fail_at_half_lambda():
    t = trine_states()
    noisy = depolarize(t["a"].density(), 0.1)
    assert abs(check_fail_probability(noisy, "a") - 0.05) < 1e-12


def test_depolarize_validates_lambda():
    rho = trine_states()["a"].density()
    with pytest.raises(ValueError):
        depolarize(rho, -0.1)
    with pytest.raises(ValueError):
        depolarize(rho, 1.1)


@given(pure_states(), st.floats(0.0, 1.0, allow_nan=False))
def test_depolarize_keeps_valid_density(s, lam):
    rho = depolarize(s.density(), lam)  # constructor revalidates everything
    assert abs(rho.matrix[0, 0].real + rho.matrix[1, 1].real - 1.0) < 1e-9
    assert rho.bloch().norm() <= 1.0 + 1e-9


# ---------------------------------------------------------------------------
# two-qubit reductions and collapse


def test_partial_trace_of_correlated_pair_is_flat():
    rho = partial_trace(TwoQubitState.phi_plus(), keep=1)
    assert np.allclose(rho.matrix, np.eye(2) / 2.0, atol=1e-12)
    rho0 = partial_trace(TwoQubitState.singlet(), keep=0)
    assert np.allclose(rho0.matrix, np.eye(2) / 2.0, atol=1e-12)


def test_partial_trace_of_product_state_recovers_factors():
    t = trine_states()
    psi = TwoQubitState.from_product(t["a"], t["b"])
    assert partial_trace(psi, keep=0).expectation(t["a"]) == pytest.approx(1.0, abs=1e-12)
    assert partial_trace(psi, keep=1).expectation(t["b"]) == pytest.approx(1.0, abs=1e-12)


@given(pair_states())
def test_partial_trace_yields_valid_density(psi):
    for keep in (0, 1):
        rho = partial_trace(psi, keep)
        tr = rho.matrix[0, 0].real + rho.matrix[1, 1].real
        assert abs(tr - 1.0) < 1e-9


def test_local_collapse_on_singlet_anticorrelates():
    psi = TwoQubitState.singlet()
    t = trine_states()
    basis = (t["a"], t["a"].orthogonal())
    branches = local_measure_branches(psi, basis)
    assert abs(branches[0][0] - 0.5) < 1e-12
    assert abs(branches[1][0] - 0.5) < 1e-12
    # outcome u leaves the partner in the orthogonal state
    assert branches[0][1].fidelity(basis[1]) > 1.0 - 1e-12
    assert branches[1][1].fidelity(basis[0]) > 1.0 - 1e-12


def test_local_collapse_on_product_state_is_inert():
    t = trine_states()
    psi = TwoQubitState.from_product(t["a"], t["b"])
    basis = (t["a"], t["a"].orthogonal())
    branches = local_measure_branches(psi, basis)
    assert abs(branches[0][0] - 1.0) < 1e-12
    assert branches[0][1].fidelity(t["b"]) > 1.0 - 1e-12
    assert branches[1][1] is None  # unreachable branch carries no state
    r = random.Random(3)
    for _ in range(5000):
        j, bob, p = local_measure_collapse(psi, basis, r)
        assert j == 0 and p == pytest.approx(1.0, abs=1e-9)


def test_local_collapse_requires_orthonormal_basis():
    t = trine_states()
    with pytest.raises(ValueError):
        local_measure_branches(TwoQubitState.singlet(), (t["a"], t["b"]))
    with pytest.raises(ValueError):
        local_measure_collapse(TwoQubitState.singlet(), (t["a"], t["b"]), random.Random(0))


def test_local_collapse_sampling_matches_branch_weights():
    rng_np = np.random.default_rng(42)
    psi = random_pair(rng_np)
    basis = random_basis(rng_np)
    branches = local_measure_branches(psi, basis)
    r = random.Random(1234)
    n = 50_000
    hits = [0, 0]
    for _ in range(n):
        j, _, _ = local_measure_collapse(psi, basis, r)
        hits[j] += 1
    assert abs(hits[0] / n - branches[0][0]) < four_sigma(branches[0][0], n)


def test_steering_average_recovers_reduced_state():
    """Probability-weighted collapsed Bloch vectors must average to the
    partner's reduced state, whatever basis the holder measures in."""
    rng_np = np.random.default_rng(2024)
    for _ in range(100):
        psi = random_pair(rng_np)
        basis = random_basis(rng_np)
        target = partial_trace(psi, keep=1).bloch()
        x = y = z = 0.0
        for p, branch in local_measure_branches(psi, basis):
            if branch is None:
                continue
            b = bloch_from_state(branch)
            x += p * b.x
            y += p * b.y
            z += p * b.z
        assert abs(x - target.x) < 1e-9
        assert abs(y - target.y) < 1e-9
        assert abs(z - target.z) < 1e-9


def _kron_joint_distribution(psi, basis, povm):
    """Independent oracle: joint outcome probabilities via explicit 4x4
    operators, no staged collapse."""
    v = psi.vector()
    eye = np.eye(2, dtype=complex)
    out = np.zeros((2, 3))
    for j, u in enumerate(basis):
        uv = np.array([u.a0, u.a1], dtype=complex)
        pj = np.outer(uv, uv.conj())
        for k, e in enumerate(povm.elements):
            op = np.kron(pj, np.asarray(e, dtype=complex))
            out[j, k] = (v.conj() @ op @ v).real
    return out


def test_measurement_order_does_not_matter():
    """Staged keeper-first and sender-first computations both reproduce the
    kron-oracle joint distribution."""
    povm = optimal_povm()
    rng_np = np.random.default_rng(7)
    for _ in range(100):
        psi = random_pair(rng_np)
        basis = random_basis(rng_np)
        oracle = _kron_joint_distribution(psi, basis, povm)

        keeper_first = np.zeros((2, 3))
        for j, (p, branch) in enumerate(local_measure_branches(psi, basis)):
            if branch is None:
                continue
            for k, q in enumerate(born_probabilities(branch, povm)):
                keeper_first[j, k] = p * q

        sender_first = np.zeros((2, 3))
        for k, (p, kept) in enumerate(remote_povm_branches(psi, povm)):
            if kept is None:
                continue
            for j in range(2):
                sender_first[j, k] = p * basis[j].fidelity(kept)

        assert np.max(np.abs(keeper_first - oracle)) < 1e-9
        assert np.max(np.abs(sender_first - oracle)) < 1e-9


def test_remote_collapse_needs_rank_one_elements():
    flat = np.eye(2, dtype=complex) / 3.0
    povm = Povm((flat, flat, flat), ("a", "b", "c"), None)
    with pytest.raises(ValueError):
        remote_povm_branches(TwoQubitState.singlet(), povm)
    with pytest.raises(ValueError):
        remote_povm_collapse(TwoQubitState.singlet(), povm, random.Random(0))


def test_remote_collapse_sampling_matches_branch_weights():
    rng_np = np.random.default_rng(11)
    psi = random_pair(rng_np)
    povm = optimal_povm()
    branches = remote_povm_branches(psi, povm)
    r = random.Random(55)
    n = 60_000
    hits = [0, 0, 0]
    for _ in range(n):
        k, kept, p = remote_povm_collapse(psi, povm, r)
        assert abs(p - branches[k][0]) < 1e-12
        assert kept.fidelity(branches[k][1]) > 1.0 - 1e-12
        hits[k] += 1
    for k in range(3):
        assert abs(hits[k] / n - branches[k][0]) < four_sigma(branches[k][0], n)
