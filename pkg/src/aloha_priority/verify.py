"""Self-contained verification suites behind the ``verify`` CLI command.

Each suite pits two independent routes to the same quantity against each
other: closed forms against the truncated-chain oracle, the rate-matrix
solver against its explicit form, simulation against stationary laws, grid
maximisation against the optimised envelope.  A suite returns plain check
rows so the CLI can render them and tests can assert on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle, qbd, simulate
from .model import AccessProbabilities, ArrivalRates, DominanceMode, ProtocolKind
from .simulate import DEFAULT_SEED
from .stability import ds1_steady_state, ds3_steady_state
from .sweep import compare_envelopes, sweep as run_sweep


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool


def _check(name: str, value: float, threshold: float) -> CheckResult:
    return CheckResult(name, float(value), float(threshold), bool(value < threshold))


def ds1_analytic_vector(p: AccessProbabilities, l1: float, k_max: int) -> np.ndarray:
    """Closed-form stationary law arranged on the oracle's state grid."""
    ss = ds1_steady_state(p, l1)
    v = np.zeros(2 * (k_max + 1))
    for k in range(k_max + 1):
        v[2 * k] = ss.pi(k)
        v[2 * k + 1] = ss.eps(k)
    return v


def ds2_analytic_vector(p: AccessProbabilities, l2: float, k_max: int) -> np.ndarray:
    levels = qbd.ds2_stationary(p, l2, k_max).levels
    v = np.zeros(2 * (k_max + 1))
    v[0::2] = levels[:, 0]
    v[1::2] = levels[:, 1]
    return v


def oracle_tv(mode: DominanceMode, p: AccessProbabilities, rate: float, k_max: int = 200) -> float:
    """Total variation between the truncated oracle and the closed form."""
    chain = oracle.build_chain(mode, p, rate, k_max)
    pi = oracle.stationary(chain)
    if mode is DominanceMode.DS1:
        analytic = ds1_analytic_vector(p, rate, k_max)
    else:
        analytic = ds2_analytic_vector(p, rate, k_max)
    return oracle.total_variation(pi, analytic)


def local_balance_residual(
    mode: DominanceMode, p: AccessProbabilities, rate: float, k_max: int = 30
) -> float:
    """Stationarity residual of the closed form against the enumerated kernel.

    Levels within two of the truncation cap are skipped: their inflow is
    distorted by the clamp, while every lower level sees exactly the infinite
    chain's dynamics, so the closed form must satisfy those equations to
    floating-point accuracy.
    """
    chain = oracle.build_chain(mode, p, rate, k_max)
    if mode is DominanceMode.DS1:
        analytic = ds1_analytic_vector(p, rate, k_max)
    else:
        analytic = ds2_analytic_vector(p, rate, k_max)
    residual = chain.matrix @ analytic - analytic
    return float(np.max(np.abs(residual[: 2 * (k_max - 1)])))


def qbd_grid_points(step: float = 0.05, band: float = 1e-9) -> list[tuple[float, float, float]]:
    """All (p1, p2, l2) grid combinations strictly inside the queue-2 bound.

    The band keeps out near-boundary points; the grid contains one exact
    boundary hit, (0.25, 0.8, 0.5), where sp(R) = 1 and the fixed point
    cannot reach solver tolerance.
    """
    n = round(1.0 / step)
    points = []
    for i in range(1, n):
        p1 = i / n
        for j in range(1, n + 1):
            p2 = j / n
            bound = p2 * (1.0 - p1) / (1.0 + p1 * p2)
            for k in range(1, n):
                l2 = k / n
                if l2 < bound - band:
                    points.append((p1, p2, l2))
    return points


def suite_ds1() -> list[CheckResult]:
    points = [
        (AccessProbabilities(0.5, 0.5), 0.2),
        (AccessProbabilities(1.0, 1.0), 0.3),
        (AccessProbabilities(0.8, 0.6), 0.25),
        (AccessProbabilities(0.35, 0.9), 0.1),
    ]
    checks = []
    for p, l1 in points:
        tag = f"p=({p.p1},{p.p2}),l1={l1}"
        checks.append(
            _check(f"ds1 oracle tv {tag}", oracle_tv(DominanceMode.DS1, p, l1), 1e-8)
        )
        checks.append(
            _check(
                f"ds1 balance residual {tag}",
                local_balance_residual(DominanceMode.DS1, p, l1),
                1e-12,
            )
        )
        ss = ds1_steady_state(p, l1)
        checks.append(
            _check(f"ds1 total mass {tag}", abs(ss.total_mass() - 1.0), 1e-12)
        )
    return checks


def suite_qbd() -> list[CheckResult]:
    max_balance = 0.0
    max_solver = 0.0
    max_sp = 0.0
    equivalence_ok = True
    eye = np.eye(2)
    for p1, p2, l2 in qbd_grid_points():
        p = AccessProbabilities(p1, p2)
        blocks = qbd.qbd_blocks(p, l2)
        r = qbd.rate_matrix_closed_form(p, l2)
        residual = blocks.a2 + (blocks.a1 - eye) @ r + blocks.a0 @ (r @ r)
        max_balance = max(max_balance, float(np.max(np.abs(residual))))
        solved = qbd.solve_rate_matrix(blocks)
        max_solver = max(max_solver, float(np.max(np.abs(solved - r))))
        max_sp = max(
            max_sp,
            abs(qbd.spectral_radius(r) - qbd.spectral_radius_closed_form(p, l2)),
        )
    # stability equivalence sweeps the full l2 grid, both directions
    n = 20
    for i in range(1, n):
        for j in range(1, n + 1):
            p = AccessProbabilities(i / n, j / n)
            bound = (j / n) * (1.0 - i / n) / (1.0 + (i / n) * (j / n))
            for k in range(1, n):
                l2 = k / n
                if abs(l2 - bound) <= 1e-9:
                    continue
                sp = qbd.spectral_radius(qbd.rate_matrix_closed_form(p, l2))
                if (sp < 1.0) != (l2 < bound):
                    equivalence_ok = False

    checks = [
        _check("qbd R-balance residual (0.05 grid)", max_balance, 1e-10),
        _check("qbd solver vs closed form (0.05 grid)", max_solver, 1e-8),
        _check("qbd sp vs closed-form sp (0.05 grid)", max_sp, 1e-10),
        CheckResult("qbd stability equivalence", float(equivalence_ok), 1.0, equivalence_ok),
    ]

    for p1, p2, l2 in [(0.5, 0.5, 0.1), (0.3, 0.8, 0.2), (0.2, 0.9, 0.3)]:
        p = AccessProbabilities(p1, p2)
        tag = f"p=({p1},{p2}),l2={l2}"
        stat = qbd.ds2_stationary(p, l2, 60)
        pi_on = stat.levels[:, 0]
        eps = stat.levels[:, 1]
        lhs = (1.0 - l2) * (1.0 - p1) * p2 * pi_on[1:]
        rhs = l2 * (1.0 - p2 + p1 * p2) * pi_on[:-1] + l2 * eps[:-1]
        checks.append(
            _check(f"qbd level-cut balance {tag}", float(np.max(np.abs(lhs - rhs))), 1e-10)
        )
        r = qbd.rate_matrix_closed_form(p, l2)
        total = float(
            np.ones(2) @ np.linalg.solve(np.eye(2) - r, np.array([stat.pi0, 0.0]))
        )
        checks.append(_check(f"qbd normalization {tag}", abs(total - 1.0), 1e-10))
        checks.append(
            _check(f"qbd oracle tv {tag}", oracle_tv(DominanceMode.DS2, p, l2), 1e-8)
        )
        checks.append(
            _check(
                f"qbd mu1 series vs closed {tag}",
                abs(qbd.ds2_service_rate_q1(p, l2) - qbd.ds2_service_rate_q1_series(p, l2)),
                1e-10,
            )
        )
    return checks


def suite_ds3(horizon: int = 200_000, seed: int = DEFAULT_SEED) -> list[CheckResult]:
    checks = []
    for p1, p2 in [(0.5, 0.5), (0.7, 0.3), (0.9, 0.8)]:
        p = AccessProbabilities(p1, p2)
        metrics = simulate.run(
            simulate.SimulationConfig(
                kind=ProtocolKind.FEEDBACK_PRIORITY,
                mode=DominanceMode.DS3,
                p=p,
                l=ArrivalRates(0.5, 0.5),  # arrivals are irrelevant when saturated
                horizon=horizon,
                seed=seed,
            )
        )
        ss = ds3_steady_state(p)
        tag = f"p=({p1},{p2})"
        checks.append(
            _check(
                f"ds3 reserved-phase occupancy vs closed form {tag} (3 se)",
                abs(metrics.backoff_occupancy - ss.pi_reserved),
                3.0 * metrics.occupancy_stderr,
            )
        )
        checks.append(
            _check(
                f"ds3 mu1 vs closed form {tag} (4 se)",
                abs(metrics.empirical_mu[0] - ss.mu1),
                4.0 * metrics.mu_stderr[0],
            )
        )
        checks.append(
            _check(
                f"ds3 mu2 vs closed form {tag} (4 se)",
                abs(metrics.empirical_mu[1] - ss.mu2),
                4.0 * metrics.mu_stderr[1],
            )
        )
    return checks


def suite_containment() -> list[CheckResult]:
    dataset = run_sweep()
    cmp = compare_envelopes(dataset)
    checks = [
        _check("containment numeric vs closed-form envelope", cmp.max_abs_deviation, 0.02),
        CheckResult(
            "containment closed-form envelope above ra",
            cmp.min_margin_closed_over_ra,
            0.0,
            cmp.min_margin_closed_over_ra > 0.0,
        ),
        CheckResult(
            "containment closed-form envelope below td",
            cmp.min_margin_td_over_closed,
            0.0,
            cmp.min_margin_td_over_closed > 0.0,
        ),
        _check(
            "containment knee near 1/3",
            abs(cmp.knee_lambda1 - 1.0 / 3.0),
            2.0 * dataset.lambda_step + 1e-12,
        ),
        CheckResult(
            "containment sweep samples all stable",
            float(np.all(dataset.samples[:, 4] == 1.0)),
            1.0,
            bool(np.all(dataset.samples[:, 4] == 1.0)),
        ),
    ]
    return checks


SUITES = {
    "ds1": suite_ds1,
    "qbd": suite_qbd,
    "ds3": suite_ds3,
    "containment": suite_containment,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        results = []
        for suite in SUITES.values():
            results.extend(suite())
        return results
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name]()
