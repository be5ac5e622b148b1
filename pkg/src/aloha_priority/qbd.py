"""Quasi-birth-death analysis of queue 2 under a saturated queue 1 (DS2).

With queue 1 saturated, queue 2's length k together with the channel phase
(ON = normal slot, OFF = reserved slot after a collision) forms a QBD chain
whose transition matrix has the block-tridiagonal layout

        | B   A0          |
        | A2  A1  A0      |
    T = |     A2  A1  A0  |
        |         ..  ..  |

Orientation convention, used consistently for every matrix in this module:
COLUMN stochastic.  Entry M[i, j] is the probability of moving FROM phase j
(at the source level) TO phase i (at the destination level), so interior
columns of the assembled matrix sum to 1 and stationary vectors are column
vectors with v_{k+1} = R v_k.  Phase index 0 is ON, index 1 is OFF.

The minimal nonnegative rate matrix R solves

    A2 + (A1 - I) R + A0 R^2 = 0,

equivalently R = (I - A1)^{-1} (A2 + A0 R^2), and the fixed-point iteration
from R = 0 increases monotonically to it.  For this chain R also has an
explicit elementwise form, and its spectral radius an explicit scalar form;
the solver, the closed form, and the two radius routes are all exposed so
they can be played against each other.

Level 0 has no reserved-phase state in practice: OFF follows a collision,
which needs queue 2 nonempty, and the resolving slot serves queue 1.  The
block B therefore only populates the ON column; the (unreachable) 0-OFF
column of the assembled matrix is deficient and carries no stationary mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateParameterError,
    NoConvergenceError,
    SingularBlockError,
    UnstableParameterError,
)
from .model import AccessProbabilities


@dataclass(frozen=True)
class QbdBlocks:
    """The four 2x2 blocks of the queue-2 chain, column-stochastic orientation.

    b: level 0 to itself; a2: up one level; a1: same level; a0: down one.
    """

    b: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    def assemble(self, n_levels: int) -> np.ndarray:
        """Truncated block-tridiagonal matrix for structural inspection.

        Columns of interior levels (1 .. n_levels - 2) sum to 1.  The 0-OFF
        column and the last level's columns are deficient (no up-block past
        the truncation); this helper is for looking at structure, not for
        computing stationary laws.
        """
        if n_levels < 3:
            raise ValueError("need at least 3 levels to show interior structure")
        n = 2 * n_levels
        t = np.zeros((n, n))
        t[0:2, 0:2] = self.b
        t[2:4, 0:2] = self.a2
        for k in range(1, n_levels):
            r = 2 * k
            t[r - 2 : r, r : r + 2] = self.a0
            t[r : r + 2, r : r + 2] = self.a1
            if k + 1 < n_levels:
                t[r + 2 : r + 4, r : r + 2] = self.a2
        return t


@dataclass(frozen=True)
class Ds2Stationary:
    """Stationary law of the queue-2 chain: levels[k] = (pi_k, eps_k).

    pi_k is the probability of level k in phase ON, eps_k in phase OFF;
    eps_0 = 0 since level 0 cannot be in a reserved slot.
    """

    pi0: float
    levels: np.ndarray


def qbd_blocks(p: AccessProbabilities, l2: float) -> QbdBlocks:
    """Transition blocks of the queue-2 chain for given access probabilities.

    Derived from the slot dynamics with queue 1 saturated: an ON slot sees a
    queue-1 transmission with probability p1, a queue-2 transmission (when
    nonempty) with probability p2, and an arrival with probability l2 before
    either; an OFF slot serves queue 1 surely and only the arrival coin acts.
    """
    p1, p2 = p.p1, p.p2
    b = np.array(
        [
            [(1.0 - l2) + l2 * (1.0 - p1) * p2, 0.0],
            [0.0, 0.0],
        ]
    )
    a0 = np.array(
        [
            [(1.0 - l2) * (1.0 - p1) * p2, 0.0],
            [0.0, 0.0],
        ]
    )
    a1 = np.array(
        [
            [l2 * p2 * (1.0 - p1) + (1.0 - l2) * (1.0 - p2), 1.0 - l2],
            [(1.0 - l2) * p1 * p2, 0.0],
        ]
    )
    a2 = np.array(
        [
            [l2 * (1.0 - p2), l2],
            [l2 * p1 * p2, 0.0],
        ]
    )
    return QbdBlocks(b=b, a0=a0, a1=a1, a2=a2)


def _inv2(m: np.ndarray, what: str) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) <= 1e-14:
        raise SingularBlockError(f"{what} is singular (det = {det})")
    return (
        np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
    )


def solve_rate_matrix(
    blocks: QbdBlocks,
    tol: float = 1e-12,
    max_iter: int = 10**6,
) -> np.ndarray:
    """Minimal nonnegative solution of A2 + (A1 - I) R + A0 R^2 = 0.

    Plain fixed-point iteration R <- (I - A1)^{-1} (A2 + A0 R^2) starting
    from R = 0.  The iterates increase entrywise and converge linearly at
    rate sp(R); near the stability boundary that is slow but dependable,
    and the closed form is available as a cross-check.  Raises
    NoConvergenceError (carrying the last update size) at the iteration cap.
    """
    m = _inv2(np.eye(2) - blocks.a1, "I - A1")
    a0, a2 = blocks.a0, blocks.a2
    r = np.zeros((2, 2))
    for _ in range(max_iter):
        r_next = m @ (a2 + a0 @ (r @ r))
        delta = np.max(np.abs(r_next - r))
        r = r_next
        if delta < tol:
            return r
    raise NoConvergenceError(
        f"rate-matrix iteration did not reach tol={tol} in {max_iter} steps",
        residual=delta,
    )


def rate_matrix_closed_form(p: AccessProbabilities, l2: float) -> np.ndarray:
    """Explicit elementwise R; undefined at p1 = 1 or p2 = 0."""
    p1, p2 = p.p1, p.p2
    if p1 == 1.0 or p2 == 0.0:
        raise DegenerateParameterError(
            "closed-form R undefined at p1 = 1 or p2 = 0 (queue 2 never succeeds)"
        )
    d = (1.0 - l2) * (1.0 - p1) * p2
    r_off = l2 * p1 / (1.0 - p1)
    return np.array(
        [
            [l2 * (1.0 - p2 + p1 * p2) / d, l2 / d],
            [r_off, r_off],
        ]
    )


def spectral_radius(r: np.ndarray) -> float:
    """Largest eigenvalue modulus of a 2x2 matrix via the trace/det quadratic.

    For a nonnegative R the discriminant is nonnegative, so both eigenvalues
    are real and no complex arithmetic is needed.
    """
    tr = r[0, 0] + r[1, 1]
    det = r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0]
    disc = tr * tr - 4.0 * det
    if disc < 0.0:
        # not reachable for nonnegative matrices; guard against misuse
        return float(np.max(np.abs(np.linalg.eigvals(r))))
    root = disc**0.5
    return max(abs(tr + root), abs(tr - root)) / 2.0


def spectral_radius_closed_form(p: AccessProbabilities, l2: float) -> float:
    """Explicit scalar form of sp(R); same degeneracies as the closed-form R."""
    p1, p2 = p.p1, p.p2
    if p1 == 1.0 or p2 == 0.0:
        raise DegenerateParameterError(
            "closed-form sp(R) undefined at p1 = 1 or p2 = 0"
        )
    disc = (
        1.0
        - 2.0 * p2
        + p2**2
        + 4.0 * p1 * p2
        - 2.0 * l2 * p1 * p2
        - 2.0 * l2 * p1 * p2**2
        + l2**2 * p1**2 * p2**2
    )
    num = l2 * (1.0 - p2 - l2 * p1 * p2 + 2.0 * p1 * p2 + disc**0.5)
    den = 2.0 * p2 * (1.0 - l2 - p1 + l2 * p1)
    return num / den


def ds2_pi0(p: AccessProbabilities, l2: float) -> float:
    """Stationary probability of an empty queue 2 in phase ON.

    Exists iff l2 < p2 (1 - p1) / (1 + p1 p2); raises UnstableParameterError
    otherwise (and DegenerateParameterError where that bound is identically
    zero, at p1 = 1 or p2 = 0).
    """
    p1, p2 = p.p1, p.p2
    if p1 == 1.0 or p2 == 0.0:
        raise DegenerateParameterError("queue 2 has no service at p1 = 1 or p2 = 0")
    if l2 >= p2 * (1.0 - p1) / (1.0 + p1 * p2):
        raise UnstableParameterError(
            f"queue 2 unstable under saturated queue 1 at l2 = {l2}"
        )
    return (p2 - l2 - p1 * p2 - l2 * p1 * p2) / ((1.0 - l2) * (1.0 - p1) * p2)


def ds2_stationary(p: AccessProbabilities, l2: float, k_max: int) -> Ds2Stationary:
    """Matrix-geometric stationary law up to level k_max: v_k = R^k v_0.

    v_0 = (pi_0, 0); the full sequence sums to (I - R)^{-1} v_0, whose entry
    total is 1 when the chain is stable.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    pi0 = ds2_pi0(p, l2)
    r = rate_matrix_closed_form(p, l2)
    if spectral_radius(r) >= 1.0:
        raise UnstableParameterError("sp(R) >= 1; no stationary law")
    levels = np.empty((k_max + 1, 2))
    v = np.array([pi0, 0.0])
    for k in range(k_max + 1):
        levels[k] = v
        v = r @ v
    return Ds2Stationary(pi0=pi0, levels=levels)


def ds2_service_rate_q1(p: AccessProbabilities, l2: float) -> float:
    """Saturated queue-1 success rate, closed form p1 (1 - p1 - l2 p1) / (1 - p1).

    Valid while queue 2 is stable in this dominant system.
    """
    p1 = p.p1
    if p1 == 1.0:
        raise DegenerateParameterError(
            "closed form undefined at p1 = 1 (queue 2 starves, chain unstable)"
        )
    ds2_pi0(p, l2)  # raises if outside the stability region
    return p1 * (1.0 - p1 - l2 * p1) / (1.0 - p1)


def ds2_service_rate_q1_series(p: AccessProbabilities, l2: float) -> float:
    """Same rate accumulated from the stationary law instead of the closed form.

    Success happens in an ON slot with no queue-2 interference, weight
    p1 (1 - p2) against nonempty levels and p1 (1 - l2 p2) against level 0
    (an arrival may contend immediately), plus every OFF slot:

        mu1 = p1 (1 - l2 p2) pi_0 + sum_{k>=1} [p1 (1 - p2) pi_k + eps_k].
    """
    pi0 = ds2_pi0(p, l2)
    r = rate_matrix_closed_form(p, l2)
    if spectral_radius(r) >= 1.0:
        raise UnstableParameterError("sp(R) >= 1; no stationary law")
    tail = _inv2(np.eye(2) - r, "I - R") @ np.array([pi0, 0.0]) - np.array([pi0, 0.0])
    weights = np.array([p.p1 * (1.0 - p.p2), 1.0])
    return p.p1 * (1.0 - l2 * p.p2) * pi0 + float(weights @ tail)
