"""Rate-matrix machinery: blocks, solver, closed forms, stationary law."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from aloha_priority.errors import (
    DegenerateParameterError,
    NoConvergenceError,
    SingularBlockError,
    UnstableParameterError,
)
from aloha_priority.model import AccessProbabilities
from aloha_priority.qbd import (
    ds2_pi0,
    ds2_service_rate_q1,
    ds2_service_rate_q1_series,
    ds2_stationary,
    qbd_blocks,
    rate_matrix_closed_form,
    solve_rate_matrix,
    spectral_radius,
    spectral_radius_closed_form,
)

HALF = AccessProbabilities(0.5, 0.5)


def _stable_grid(rng, n):
    """Random (p, l2) points strictly inside the queue-2 stability bound."""
    points = []
    while len(points) < n:
        p = AccessProbabilities(rng.uniform(0.05, 0.95), rng.uniform(0.05, 1.0))
        bound = p.p2 * (1.0 - p.p1) / (1.0 + p.p1 * p.p2)
        if bound < 0.02:
            continue
        points.append((p, rng.uniform(0.3, 0.9) * bound))
    return points


class TestBlocks:
    def test_reference_blocks(self):
        blocks = qbd_blocks(HALF, 0.1)
        assert_allclose(blocks.b, [[0.925, 0.0], [0.0, 0.0]], rtol=1e-15)
        assert_allclose(blocks.a0, [[0.225, 0.0], [0.0, 0.0]], rtol=1e-15)
        assert_allclose(blocks.a1, [[0.475, 0.9], [0.225, 0.0]], rtol=1e-15)
        assert_allclose(blocks.a2, [[0.05, 0.1], [0.025, 0.0]], rtol=1e-15)

    def test_interior_columns_stochastic(self):
        rng = np.random.default_rng(211)
        for _ in range(200):
            p = AccessProbabilities(rng.uniform(0, 1), rng.uniform(0, 1))
            l2 = rng.uniform(0.01, 0.99)
            blocks = qbd_blocks(p, l2)
            sums = blocks.a0.sum(axis=0) + blocks.a1.sum(axis=0) + blocks.a2.sum(axis=0)
            assert_allclose(sums, [1.0, 1.0], atol=1e-14)
            for block in (blocks.b, blocks.a0, blocks.a1, blocks.a2):
                assert np.all(block >= 0.0) and np.all(block <= 1.0)

    def test_assembled_structure(self):
        t = qbd_blocks(HALF, 0.1).assemble(6)
        # interior columns sum to 1; level-0 ON column too
        sums = t.sum(axis=0)
        assert_allclose(sums[2:10], 1.0, atol=1e-14)
        assert_allclose(sums[0], 1.0, atol=1e-14)
        with pytest.raises(ValueError):
            qbd_blocks(HALF, 0.1).assemble(2)


class TestRateMatrix:
    def test_closed_form_reference(self):
        r = rate_matrix_closed_form(HALF, 0.1)
        assert_allclose(r, [[1.0 / 3.0, 4.0 / 9.0], [0.1, 0.1]], rtol=1e-14)

    def test_solver_matches_closed_form(self):
        rng = np.random.default_rng(223)
        for p, l2 in _stable_grid(rng, 40):
            r = rate_matrix_closed_form(p, l2)
            solved = solve_rate_matrix(qbd_blocks(p, l2))
            assert np.max(np.abs(solved - r)) < 1e-8

    def test_balance_equation(self):
        rng = np.random.default_rng(227)
        eye = np.eye(2)
        for p, l2 in _stable_grid(rng, 40):
            blocks = qbd_blocks(p, l2)
            r = rate_matrix_closed_form(p, l2)
            residual = blocks.a2 + (blocks.a1 - eye) @ r + blocks.a0 @ (r @ r)
            assert np.max(np.abs(residual)) < 1e-12

    def test_iterates_increase_monotonically(self):
        blocks = qbd_blocks(HALF, 0.1)
        m = np.linalg.inv(np.eye(2) - blocks.a1)
        r = np.zeros((2, 2))
        for _ in range(50):
            r_next = m @ (blocks.a2 + blocks.a0 @ r @ r)
            assert np.all(r_next >= r - 1e-15)
            r = r_next

    def test_boundary_point_does_not_converge(self):
        # at (0.5, 0.5, l2=0.2) the chain is exactly critical: sp(R) = 1 and
        # the linear-rate fixed point stalls
        with pytest.raises(NoConvergenceError):
            solve_rate_matrix(qbd_blocks(HALF, 0.2), max_iter=20_000)

    def test_degenerate_parameters(self):
        with pytest.raises(DegenerateParameterError):
            rate_matrix_closed_form(AccessProbabilities(1.0, 0.5), 0.1)
        with pytest.raises(DegenerateParameterError):
            rate_matrix_closed_form(AccessProbabilities(0.5, 0.0), 0.1)
        with pytest.raises(DegenerateParameterError):
            spectral_radius_closed_form(AccessProbabilities(1.0, 0.5), 0.1)

    def test_singular_block_detected(self):
        # with no arrivals and p1 = 1, phase ON -> OFF -> ON cycles forever at
        # the same level, so A1 has a unit eigenvalue and I - A1 is singular
        blocks = qbd_blocks(AccessProbabilities(1.0, 0.5), 0.0)
        with pytest.raises(SingularBlockError):
            solve_rate_matrix(blocks)


class TestSpectralRadius:
    def test_reference_value(self):
        sp = spectral_radius_closed_form(HALF, 0.1)
        assert_allclose(sp, 0.457613871580016, rtol=1e-12)
        assert_allclose(spectral_radius(rate_matrix_closed_form(HALF, 0.1)), sp, atol=1e-15)

    def test_boundary_witness(self):
        # l2 = 0.2 sits exactly on the queue-2 bound at p=(0.5,0.5)
        r = rate_matrix_closed_form(HALF, 0.2)
        assert_allclose(r, [[0.75, 1.0], [0.2, 0.2]], rtol=1e-14)
        assert abs(spectral_radius(r) - 1.0) < 1e-9
        assert abs(spectral_radius_closed_form(HALF, 0.2) - 1.0) < 1e-9

    def test_two_routes_agree(self):
        rng = np.random.default_rng(229)
        for p, l2 in _stable_grid(rng, 60):
            a = spectral_radius(rate_matrix_closed_form(p, l2))
            b = spectral_radius_closed_form(p, l2)
            assert abs(a - b) < 1e-10

    def test_stability_equivalence_on_grid(self):
        # sp(R) < 1 exactly when l2 is below the closed-form bound, both ways
        n = 20
        for i in range(1, n):
            for j in range(1, n + 1):
                p = AccessProbabilities(i / n, j / n)
                bound = p.p2 * (1.0 - p.p1) / (1.0 + p.p1 * p.p2)
                for k in range(1, n):
                    l2 = k / n
                    if abs(l2 - bound) <= 1e-9:
                        continue
                    sp = spectral_radius(rate_matrix_closed_form(p, l2))
                    assert (sp < 1.0) == (l2 < bound), (p, l2, sp, bound)


class TestStationaryLaw:
    def test_pi0_reference(self):
        assert_allclose(ds2_pi0(HALF, 0.1), 5.0 / 9.0, rtol=1e-14)

    def test_pi0_unstable_and_degenerate(self):
        with pytest.raises(UnstableParameterError):
            ds2_pi0(HALF, 0.2)
        with pytest.raises(UnstableParameterError):
            ds2_pi0(HALF, 0.5)
        with pytest.raises(DegenerateParameterError):
            ds2_pi0(AccessProbabilities(1.0, 0.5), 0.1)

    def test_stationary_reference_levels(self):
        stat = ds2_stationary(HALF, 0.1, 5)
        assert_allclose(stat.levels[0], [5.0 / 9.0, 0.0], rtol=1e-14)
        assert_allclose(stat.levels[1], [5.0 / 27.0, 1.0 / 18.0], rtol=1e-13)

    def test_normalization(self):
        rng = np.random.default_rng(233)
        for p, l2 in _stable_grid(rng, 30):
            pi0 = ds2_pi0(p, l2)
            r = rate_matrix_closed_form(p, l2)
            total = np.ones(2) @ np.linalg.solve(np.eye(2) - r, [pi0, 0.0])
            assert abs(total - 1.0) < 1e-10

    def test_level_cut_balance(self):
        # down-flow across each level boundary equals up-flow in steady state
        rng = np.random.default_rng(239)
        for p, l2 in _stable_grid(rng, 30):
            stat = ds2_stationary(p, l2, 40)
            pi_on, eps = stat.levels[:, 0], stat.levels[:, 1]
            down = (1.0 - l2) * (1.0 - p.p1) * p.p2 * pi_on[1:]
            up = l2 * (1.0 - p.p2 + p.p1 * p.p2) * pi_on[:-1] + l2 * eps[:-1]
            assert np.max(np.abs(down - up)) < 1e-10

    def test_off_phase_empty_level_zero(self):
        stat = ds2_stationary(HALF, 0.1, 10)
        assert stat.levels[0, 1] == 0.0


class TestServiceRate:
    def test_closed_form_reference(self):
        assert_allclose(ds2_service_rate_q1(HALF, 0.1), 0.45, rtol=1e-14)
        assert_allclose(
            ds2_service_rate_q1(AccessProbabilities(0.3, 0.8), 0.2),
            0.3 * (1.0 - 0.3 - 0.2 * 0.3) / 0.7,
            rtol=1e-14,
        )

    def test_series_route_agrees(self):
        rng = np.random.default_rng(241)
        for p, l2 in _stable_grid(rng, 40):
            closed = ds2_service_rate_q1(p, l2)
            series = ds2_service_rate_q1_series(p, l2)
            assert abs(closed - series) < 1e-10

    def test_errors(self):
        with pytest.raises(DegenerateParameterError):
            ds2_service_rate_q1(AccessProbabilities(1.0, 0.5), 0.1)
        with pytest.raises(UnstableParameterError):
            ds2_service_rate_q1(HALF, 0.3)
