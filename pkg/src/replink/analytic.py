"""Closed-form rate, utilization, and purification formulas.

These are the deterministic oracles the Monte Carlo engine is validated
against. Each protocol has a round built from a one-way signalling delay
plus clocked transmission slots; rates are expected entangled pairs per
round divided by the round duration.

Protocol conventions, with tau_l the one-way link delay and tau_c the
hardware cycle time:

* meet-in-the-middle: round tau_l + N*tau_c, rate N*p / round.
* sender-receiver:    round 2*tau_l + N_A*tau_c, expected pairs per round
  E[min(X, N_B)] with X ~ Binomial(N_A, p) because the receiver rejects
  photons once its memory is full.
* midpoint-source:    round tau_l + N*K*tau_c where K latch attempts fill
  one time bin; the per-bin entanglement probability accounts for each
  receiver locking onto its first latched photon and pairs matching only
  when both sides latched the same attempt index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .params import (
    ConfigurationError,
    Duration,
    MemoryBudget,
    ProtocolConfig,
    ProtocolKind,
    validate_probability,
)

__all__ = [
    "RateBundle",
    "MpsEntanglement",
    "PurificationBounds",
    "FastClockEstimates",
    "round_time",
    "mitm_rate",
    "sr_rate",
    "sr_expected_pairs_per_round",
    "sr_receiver_allocation",
    "mps_attempts_per_bin",
    "mps_entanglement",
    "mps_bin_utilization",
    "mps_rate",
    "fast_clock_estimates",
    "purification_bounds",
]


@dataclass(frozen=True)
class RateBundle:
    """A protocol's analytic rate with its utilization and ceiling."""

    rate_per_s: float
    utilization: float
    upper_bound_per_s: float
    round_time: Duration

    def __post_init__(self):
        if not 0.0 <= self.utilization <= 1.0:
            raise ValueError(f"utilization out of range: {self.utilization}")
        if self.rate_per_s > self.upper_bound_per_s:
            raise ValueError(
                f"rate {self.rate_per_s} exceeds its upper bound {self.upper_bound_per_s}"
            )


@dataclass(frozen=True)
class MpsEntanglement:
    """Per-bin entanglement probability for the midpoint-source protocol.

    ``p_ent_sum`` is the attempt-by-attempt sum; ``p_ent_closed`` the
    geometric-series closed form, valid for symmetric sides (for
    asymmetric inputs it simply mirrors the sum). The bounds bracket the
    closed form whenever K is chosen to make latching near-certain; they
    are degenerate (0, 1) for asymmetric sides.
    """

    k_attempts: int
    p_latch: float
    p_ent_sum: float
    p_ent_closed: float
    lower_bound: float
    upper_bound: float
    p_left: float
    p_right: float
    p_mid: float

    @property
    def p_ent(self) -> float:
        return self.p_ent_sum


@dataclass(frozen=True)
class PurificationBounds:
    """Error and success numbers for the 7-to-1 code-based purification."""

    epsilon_in: float
    epsilon_out: float
    p_success: float
    epsilon_total: float
    link_count: int


@dataclass(frozen=True)
class FastClockEstimates:
    """Rate approximations in the regime where clocking cost is negligible."""

    r_mitm: float
    r_mps: float
    ratio: float


def round_time(config: ProtocolConfig, tau_link: Duration, tau_clock: Duration) -> Duration:
    """Duration of one protocol round."""
    if config.kind is ProtocolKind.MITM:
        return tau_link + config.memory.n_per_side * tau_clock
    if config.kind is ProtocolKind.SR:
        return 2 * tau_link + config.memory.n_sender * tau_clock
    return tau_link + config.memory.n_per_side * config.k_attempts * tau_clock


def mitm_rate(n: int, p: float, tau_link: Duration, tau_clock: Duration) -> RateBundle:
    """Meet-in-the-middle rate N*p/round, with F = N*tau_clock/round.

    The identity rate == utilization * upper_bound holds exactly: the rate
    is computed as that product.
    """
    if n < 0:
        raise ConfigurationError("memory count must be non-negative")
    validate_probability(p, "p")
    config = ProtocolConfig(ProtocolKind.MITM, MemoryBudget.symmetric(n))
    tau_round = round_time(config, tau_link, tau_clock)
    if tau_round.ps == 0:
        raise ConfigurationError("round time is zero; nothing can be scheduled")
    utilization = (n * tau_clock.ps) / tau_round.ps
    upper = p / tau_clock.seconds
    return RateBundle(
        rate_per_s=utilization * upper,
        utilization=utilization,
        upper_bound_per_s=upper,
        round_time=tau_round,
    )


def sr_expected_pairs_per_round(n_a: int, n_b: int, p: float) -> float:
    """E[min(X, N_B)] for X ~ Binomial(N_A, p).

    Evaluated as N_A*p - sum_{x > N_B} (x - N_B) P(X = x) so the result
    never exceeds the mean; the pmf comes from log-space evaluation, which
    stays stable for large N_A.
    """
    validate_probability(p, "p")
    if n_b >= n_a:
        return n_a * p
    x = np.arange(n_b + 1, n_a + 1)
    excess = float(np.dot(x - n_b, stats.binom.pmf(x, n_a, p)))
    return n_a * p - excess


def sr_rate(n_a: int, n_b: int, p: float, tau_link: Duration, tau_clock: Duration) -> RateBundle:
    """Sender-receiver rate: expected latched pairs per round / round time.

    Utilization is the sender's inner-loop fraction N_A*tau_clock/round;
    the receiver tracks it closely since it attempts every transmission
    until full, but has no closed form of its own.
    """
    if not n_a >= n_b >= 0:
        raise ConfigurationError(f"need n_sender >= n_receiver >= 0, got ({n_a}, {n_b})")
    config = ProtocolConfig(ProtocolKind.SR, MemoryBudget.sender_receiver(n_a, n_b))
    tau_round = round_time(config, tau_link, tau_clock)
    if tau_round.ps == 0:
        raise ConfigurationError("round time is zero; nothing can be scheduled")
    pairs = sr_expected_pairs_per_round(n_a, n_b, p)
    return RateBundle(
        rate_per_s=pairs / tau_round.seconds,
        utilization=(n_a * tau_clock.ps) / tau_round.ps,
        upper_bound_per_s=(n_a * p) / tau_round.seconds,
        round_time=tau_round,
    )


def sr_receiver_allocation(n: int, p: float) -> MemoryBudget:
    """Split a 2N-qubit link budget into sender and receiver shares.

    The receiver gets 6 + ceil(2*N*p/(p+1)) qubits so that, with
    purification consuming seven pairs at a time, it can hold roughly the
    number of latches the sender's transmissions produce per round.
    """
    if n < 0:
        raise ConfigurationError("memory count must be non-negative")
    validate_probability(p, "p")
    n_receiver = 6 + math.ceil(2 * n * p / (p + 1))
    n_sender = 2 * n - n_receiver
    if n_sender < 0:
        raise ConfigurationError(
            f"memory budget too small for the allocation rule: 2N = {2 * n} "
            f"cannot cover the {n_receiver} receiver qubits it implies"
        )
    return MemoryBudget.sender_receiver(n_sender, n_receiver)


def mps_attempts_per_bin(p_l: float, p_m: float) -> int:
    """Latch attempts per time bin: K = ceil(3 / (p_l * p_m)).

    The numerator 3 makes the per-bin latch probability exceed 0.95.
    """
    validate_probability(p_l, "p_l")
    validate_probability(p_m, "p_m")
    product = p_l * p_m
    if product <= 0.0:
        raise ConfigurationError("latching is impossible when p_l * p_m = 0")
    return math.ceil(3.0 / product)


def mps_entanglement(p_l: float, p_r: float, p_m: float, k: int) -> MpsEntanglement:
    """Per-bin entanglement probability after K latch attempts.

    Each attempt generates a photon pair with probability p_m; each side
    latches its photon with probability p_l (p_r) and then rejects further
    photons. A bin yields entanglement only if both sides latch the same
    attempt, so the probability is the sum over the attempt index of
    p'' * (no earlier latch on either side)^(attempts so far), with
    p'' = p_l * p_m * p_r.
    """
    validate_probability(p_l, "p_l")
    validate_probability(p_r, "p_r")
    validate_probability(p_m, "p_m")
    if k < 1:
        raise ConfigurationError("at least one latch attempt per bin is required")

    p_joint = p_l * p_m * p_r
    survive = 1.0 - p_m * (p_l + p_r) + p_joint  # neither side latches this attempt
    p_latch = 1.0 - (1.0 - p_l * p_m) ** k

    if p_joint == 0.0:
        p_sum = 0.0
    else:
        terms = []
        running = 0.0
        for j in range(k):
            term = p_joint * survive**j
            terms.append(term)
            running += term
            # geometric tail bound; safe to stop once it cannot move the sum
            if survive < 1.0 and term * survive / (1.0 - survive) < 1e-18 * max(running, p_joint):
                break
        p_sum = math.fsum(terms)

    symmetric = p_l == p_r
    if symmetric and p_l > 0.0:
        shrink = p_joint * (2.0 / p_l - 1.0)
        p_closed = (p_l / (2.0 - p_l)) * (1.0 - (1.0 - shrink) ** k)
    elif symmetric:
        p_closed = 0.0
    else:
        p_closed = p_sum

    if symmetric:
        lower = 0.95 * p_l / 2.0
        upper = p_l / (2.0 - p_l) if p_l > 0.0 else 0.0
    else:
        lower, upper = 0.0, 1.0

    return MpsEntanglement(
        k_attempts=k,
        p_latch=p_latch,
        p_ent_sum=p_sum,
        p_ent_closed=p_closed,
        lower_bound=lower,
        upper_bound=upper,
        p_left=p_l,
        p_right=p_r,
        p_mid=p_m,
    )


def mps_bin_utilization(p_l: float, p_m: float, k: int) -> float:
    """In-bin active fraction (1/K) * sum_k k*y*(1-y)^k with y = p_l*p_m."""
    y = p_l * p_m
    if y == 0.0:
        return 0.0
    j = np.arange(1, k + 1, dtype=float)
    return float(np.sum(j * y * (1.0 - y) ** j)) / k


def mps_rate(n: int, ent: MpsEntanglement, tau_link: Duration, tau_clock: Duration) -> RateBundle:
    """Midpoint-source rate N*p_ent/round over a round of N bins of K attempts."""
    if n < 0:
        raise ConfigurationError("memory count must be non-negative")
    config = ProtocolConfig(
        ProtocolKind.MPS, MemoryBudget.symmetric(n), k_attempts=ent.k_attempts
    )
    tau_round = round_time(config, tau_link, tau_clock)
    if tau_round.ps == 0:
        raise ConfigurationError("round time is zero; nothing can be scheduled")
    tau_bin = ent.k_attempts * tau_clock
    f_bin = mps_bin_utilization(ent.p_left, ent.p_mid, ent.k_attempts)
    utilization = n * f_bin * (tau_bin.ps / tau_round.ps)
    bound_prob = ent.upper_bound if ent.upper_bound > 0 else 1.0
    return RateBundle(
        rate_per_s=(n * ent.p_ent_sum) / tau_round.seconds,
        utilization=utilization,
        upper_bound_per_s=(n * bound_prob) / tau_round.seconds,
        round_time=tau_round,
    )


def fast_clock_estimates(
    n: int, p_bsa: float, p_optical: float, tau_link: Duration
) -> FastClockEstimates:
    """Rates when clocking time is negligible against the signalling delay.

    The two-sender arrangement pays the optical transmission twice per
    attempt, the midpoint source only once per side, so their ratio is
    1/(2*p_optical) independent of everything else.
    """
    validate_probability(p_bsa, "p_bsa")
    validate_probability(p_optical, "p_optical")
    if tau_link.ps == 0:
        raise ConfigurationError("fast-clock estimates need a nonzero link delay")
    seconds = tau_link.seconds
    r_mitm = n * p_bsa * p_optical * p_optical / seconds
    r_mps = n * p_bsa * p_optical / (2.0 * seconds)
    ratio = math.inf if p_optical == 0.0 else 1.0 / (2.0 * p_optical)
    return FastClockEstimates(r_mitm=r_mitm, r_mps=r_mps, ratio=ratio)


def purification_bounds(epsilon_in: float, link_count: int) -> PurificationBounds:
    """Output error and success probability of 7-to-1 purification.

    With i.i.d. input error eps, decoding succeeds with probability
    (1-eps)^7 and the surviving pair has error at most
    7*eps^3*(1-eps)^4 + eps^7; a chain of links multiplies the output
    error by the link count.
    """
    eps = validate_probability(epsilon_in, "epsilon_in")
    if link_count < 0:
        raise ConfigurationError("link count must be non-negative")
    epsilon_out = 7.0 * eps**3 * (1.0 - eps) ** 4 + eps**7
    return PurificationBounds(
        epsilon_in=eps,
        epsilon_out=epsilon_out,
        p_success=(1.0 - eps) ** 7,
        epsilon_total=link_count * epsilon_out,
        link_count=link_count,
    )
