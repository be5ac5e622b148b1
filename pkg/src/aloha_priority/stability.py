"""Closed-form stability analysis for the feedback-priority protocol.

Everything here is an explicit formula; the heavy matrix-analytic machinery
for the second dominant system lives in :mod:`aloha_priority.qbd`.

Dominant system 1 (DS1) saturates queue 2.  Queue 1 then evolves as a birth
and death chain augmented with a reserved-slot flag; its traffic intensity is

    rho = l1 (1 - p1 + l1 p1 p2) / (p1 (1 - l1) (1 - l1 p2))

and when rho < 1 the stationary law is geometric with ratio rho on the
normal-phase levels, with a proportional reserved-phase component.  Queue 2's
saturated service rate comes out as mu2 = p2 (1 - l1 - l1 p2).

Dominant system 3 (DS3) saturates both queues, giving a two-state chain over
the phase alone and the saturated rates

    mu1'' = p1 / (1 + p1 p2),      mu2'' = p2 (1 - p1) / (1 + p1 p2).

The fixed-p stability region is the union of the two dominant-system regions
(``union_region_contains``); maximising its upper boundary over p yields the
protocol envelope ``priority_boundary``,

    l2 = 1 - 2 l1            for l1 <= 1/3,
    l2 = (1 - l1)^2 / (4 l1)  for l1 >  1/3,

attained at p1 = 1, p2 = min(1, (1 - l1) / (2 l1)).  For context,
``ra_boundary`` is the classical random-access envelope (1 - sqrt(l1))^2 and
``td_boundary`` the time-division outer bound 1 - l1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateParameterError, UnstableParameterError
from .model import AccessProbabilities, ArrivalRates


@dataclass(frozen=True)
class RegionVerdict:
    """Outcome of a membership test against a stability region.

    ``binding`` names the first violated constraint when unstable, None when
    stable.  A point exactly on a boundary counts as unstable (the strict
    inequality fails there).
    """

    stable: bool
    binding: str | None = None


@dataclass(frozen=True)
class Ds1SteadyState:
    """Geometric stationary law of the queue-1 chain under saturated queue 2.

    pi(k) is the probability of k packets with the channel in normal phase,
    eps(k) the probability of k packets in a reserved slot.  eps(0) = 0: a
    reserved slot follows a collision, which requires queue 1 nonempty, and
    the retransmission that empties it also ends the phase.
    """

    rho: float
    pi0: float
    eps1: float

    def pi(self, k: int) -> float:
        if k < 0:
            raise ValueError("level must be nonnegative")
        return self.pi0 * self.rho**k

    def eps(self, k: int) -> float:
        if k < 0:
            raise ValueError("level must be nonnegative")
        if k == 0:
            return 0.0
        return self.eps1 * self.rho ** (k - 1)

    def total_mass(self) -> float:
        """Sum of all pi(k) and eps(k); equals 1 for a valid steady state."""
        return (self.pi0 + self.eps1) / (1.0 - self.rho)


@dataclass(frozen=True)
class Ds3SteadyState:
    """Stationary phase occupancy and service rates with both queues saturated."""

    pi_normal: float
    pi_reserved: float
    mu1: float
    mu2: float


def ds1_rho(p: AccessProbabilities, l1: float) -> float:
    """Traffic intensity of queue 1 when queue 2 is saturated."""
    if p.p1 == 0.0:
        raise DegenerateParameterError("ds1_rho undefined at p1 = 0 (no service)")
    if l1 * p.p2 >= 1.0:
        raise DegenerateParameterError("ds1_rho undefined at l1 * p2 = 1")
    num = l1 * (1.0 - p.p1 + l1 * p.p1 * p.p2)
    den = p.p1 * (1.0 - l1) * (1.0 - l1 * p.p2)
    return num / den


def ds1_steady_state(p: AccessProbabilities, l1: float) -> Ds1SteadyState:
    """Stationary distribution of the queue-1 chain in dominant system 1.

    Requires rho < 1; raises UnstableParameterError otherwise.
    """
    rho = ds1_rho(p, l1)
    if rho >= 1.0:
        raise UnstableParameterError(
            f"queue 1 unstable under saturated queue 2: rho = {rho}"
        )
    pi0 = (p.p1 - l1 * (1.0 + p.p1 * p.p2)) / (p.p1 * (1.0 - l1))
    eps1 = l1 * p.p2 / (1.0 - l1 * p.p2) * pi0
    return Ds1SteadyState(rho=rho, pi0=pi0, eps1=eps1)


def ds1_service_rate_q2(p: AccessProbabilities, l1: float) -> float:
    """Long-run success rate of saturated queue 2, valid while queue 1 is stable."""
    rho = ds1_rho(p, l1)
    if rho >= 1.0:
        raise UnstableParameterError(
            f"service rate formula needs queue 1 stable: rho = {rho}"
        )
    return p.p2 * (1.0 - l1 - l1 * p.p2)


def ds3_steady_state(p: AccessProbabilities) -> Ds3SteadyState:
    """Two-state phase chain with both queues saturated.

    Collisions happen with probability p1 p2 in a normal slot and every
    reserved slot returns to normal, so the reserved-phase occupancy is
    p1 p2 / (1 + p1 p2).
    """
    denom = 1.0 + p.p1 * p.p2
    pi_reserved = p.p1 * p.p2 / denom
    return Ds3SteadyState(
        pi_normal=1.0 / denom,
        pi_reserved=pi_reserved,
        mu1=p.p1 / denom,
        mu2=p.p2 * (1.0 - p.p1) / denom,
    )


def ds1_region_contains(p: AccessProbabilities, l: ArrivalRates) -> RegionVerdict:
    """Stability region certified by dominant system 1.

    (l1, l2) is inside iff l1 < p1 / (1 + p1 p2) and l2 < p2 (1 - l1 - l1 p2).
    """
    if not l.l1 < p.p1 / (1.0 + p.p1 * p.p2):
        return RegionVerdict(stable=False, binding="l1")
    if not l.l2 < p.p2 * (1.0 - l.l1 - l.l1 * p.p2):
        return RegionVerdict(stable=False, binding="l2")
    return RegionVerdict(stable=True)


def ds2_region_contains(p: AccessProbabilities, l: ArrivalRates) -> RegionVerdict:
    """Stability region certified by dominant system 2.

    The l2 clause l2 < p2 (1 - p1) / (1 + p1 p2) is checked first; it can
    never hold at p1 = 1, which keeps the second clause's division by
    (1 - p1) safe.
    """
    if not l.l2 < p.p2 * (1.0 - p.p1) / (1.0 + p.p1 * p.p2):
        return RegionVerdict(stable=False, binding="l2")
    if not l.l1 < p.p1 * (1.0 - p.p1 - l.l2 * p.p1) / (1.0 - p.p1):
        return RegionVerdict(stable=False, binding="l1")
    return RegionVerdict(stable=True)


def union_region_contains(p: AccessProbabilities, l: ArrivalRates) -> RegionVerdict:
    """Stability region at fixed p: the union of the two dominant-system regions.

    When both certificates fail, ``binding`` concatenates their individual
    binding constraints.
    """
    v1 = ds1_region_contains(p, l)
    if v1.stable:
        return RegionVerdict(stable=True)
    v2 = ds2_region_contains(p, l)
    if v2.stable:
        return RegionVerdict(stable=True)
    return RegionVerdict(stable=False, binding=f"ds1.{v1.binding},ds2.{v2.binding}")


def priority_boundary(l1: float) -> float:
    """Upper boundary of the feedback-priority stability region, optimised over p.

    Piecewise: 1 - 2 l1 up to l1 = 1/3 (where the optimal p2 saturates at 1),
    then (1 - l1)^2 / (4 l1).  The two branches join with matching value and
    slope.  Defined on [0, 1] by continuity.
    """
    if not 0.0 <= l1 <= 1.0:
        raise ValueError(f"l1 must lie in [0, 1], got {l1!r}")
    if l1 <= 1.0 / 3.0:
        return 1.0 - 2.0 * l1
    return (1.0 - l1) ** 2 / (4.0 * l1)


def optimal_p2(l1: float) -> float:
    """Queue-2 access probability attaining the envelope (with p1 = 1)."""
    if l1 == 0.0:
        raise DegenerateParameterError("optimal p2 undefined at l1 = 0")
    if not 0.0 < l1 <= 1.0:
        raise ValueError(f"l1 must lie in (0, 1], got {l1!r}")
    return min(1.0, (1.0 - l1) / (2.0 * l1))


def ra_boundary(l1: float) -> float:
    """Envelope of conventional random access without feedback priority."""
    if not 0.0 <= l1 <= 1.0:
        raise ValueError(f"l1 must lie in [0, 1], got {l1!r}")
    return (1.0 - l1**0.5) ** 2


def td_boundary(l1: float) -> float:
    """Time-division outer bound: the two rates share the channel perfectly."""
    if not 0.0 <= l1 <= 1.0:
        raise ValueError(f"l1 must lie in [0, 1], got {l1!r}")
    return 1.0 - l1
