"""
Finite-Population Model
Closed forms for N users who each wait for their previous request to finish
before thinking up the next one (machine-interference birth-death chain
served in processor sharing).
"""

from dataclasses import replace
import math
from typing import Dict
import logging

import numpy as np
from scipy import optimize, special

from src.constants import LOG_SPACE_POPULATION
from src.model.formulas import mean_transfer_time
from src.model.types import FinitePopulationSpec, LoadPoint, RatePrediction
from src.utils.validation import InvalidClassError

logger = logging.getLogger(__name__)


def finite_population_distribution(spec: FinitePopulationSpec) -> np.ndarray:
    """
    Stationary distribution P(n), n = 0..N.

    Birth rate (N - n) * gamma, death rate mu = C / m_X, giving
    P(n) proportional to N! / (N - n)! * (gamma / mu)^n.

    Returns:
        Array of N + 1 probabilities summing to 1
    """
    n_users = spec.population
    ratio = spec.think_rate / spec.service_rate
    states = np.arange(n_users + 1)

    if n_users > LOG_SPACE_POPULATION:
        log_terms = (
            special.gammaln(n_users + 1)
            - special.gammaln(n_users - states + 1)
            + states * math.log(ratio)
        )
        log_terms -= log_terms.max()
        terms = np.exp(log_terms)
    else:
        terms = np.empty(n_users + 1)
        terms[0] = 1.0
        for n in range(1, n_users + 1):
            terms[n] = terms[n - 1] * (n_users - n + 1) * ratio

    return terms / terms.sum()


def finite_population_throughput(spec: FinitePopulationSpec) -> RatePrediction:
    """
    Mean transfer time and per-user rate of the finite-population model.

    Uses Little's law with the effective arrival rate gamma * (N - E[n]).
    """
    probs = finite_population_distribution(spec)
    mean_in_system = float(np.dot(np.arange(len(probs)), probs))
    effective_arrival_rate = spec.think_rate * (spec.population - mean_in_system)

    if mean_in_system <= 0 or effective_arrival_rate <= 0:
        # Underflow at vanishing load: a lone flow never shares
        transfer_time = spec.mean_size / spec.capacity
    else:
        transfer_time = mean_in_system / effective_arrival_rate
        transfer_time = max(transfer_time, spec.mean_size / spec.capacity)

    return RatePrediction(
        mean_transfer_time=transfer_time,
        per_user_throughput=spec.mean_size / transfer_time,
        conditional_time_per_bit=transfer_time / spec.mean_size,
    )


def busy_fraction(spec: FinitePopulationSpec) -> float:
    """Fraction of time at least one flow is active, 1 - P(0)."""
    return float(1.0 - finite_population_distribution(spec)[0])


def think_rate_for_utilization(
    population: int,
    mean_size: float,
    capacity: float,
    target_utilization: float,
) -> float:
    """
    Think rate gamma at which N users keep the channel busy a target fraction of time.

    Raises:
        InvalidClassError: If the target is outside (0, 1)
    """
    if not 0 < target_utilization < 1:
        raise InvalidClassError(
            f"Target utilization must be in (0, 1), got {target_utilization!r}"
        )
    service_rate = capacity / mean_size

    def gap(log_gamma: float) -> float:
        spec = FinitePopulationSpec(population, math.exp(log_gamma), mean_size, capacity)
        return busy_fraction(spec) - target_utilization

    low, high = math.log(service_rate) - 30.0, math.log(service_rate) + 30.0
    log_gamma = optimize.brentq(gap, low, high, xtol=1e-14, rtol=1e-14, maxiter=500)
    return math.exp(log_gamma)


def infinite_population_gap(spec: FinitePopulationSpec) -> Dict[str, float]:
    """
    Compare the finite-population transfer time with the infinite-population
    formula at the same utilization.

    Returns:
        Dict with utilization, both transfer times and the relative gap
    """
    prediction = finite_population_throughput(spec)
    utilization = busy_fraction(spec)
    infinite_time = mean_transfer_time(spec.mean_size, spec.capacity, LoadPoint.of(utilization))
    gap = abs(prediction.mean_transfer_time - infinite_time) / infinite_time
    logger.debug(
        f"N={spec.population}: D_finite={prediction.mean_transfer_time:.6g} "
        f"D_infinite={infinite_time:.6g} gap={gap:.4%}"
    )
    return {
        "population": spec.population,
        "utilization": utilization,
        "finite_transfer_time": prediction.mean_transfer_time,
        "infinite_transfer_time": infinite_time,
        "relative_gap": gap,
    }


def matched_spec(population: int, mean_size: float, capacity: float,
                 utilization: float) -> FinitePopulationSpec:
    """Finite-population spec tuned to a target utilization."""
    gamma = think_rate_for_utilization(population, mean_size, capacity, utilization)
    return FinitePopulationSpec(population, gamma, mean_size, capacity)


def with_population(spec: FinitePopulationSpec, population: int) -> FinitePopulationSpec:
    """Same aggregate request intensity N * gamma spread over a different population."""
    return replace(
        spec,
        population=population,
        think_rate=spec.think_rate * spec.population / population,
    )
