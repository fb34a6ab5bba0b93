"""Synthetic mixtures of product distributions, with and without a direct link."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

SAMPLES_PER_COMPONENT = 300
GAP_MEAN = 2.0
GAP_SD = 0.3
LINK_STRENGTH = 4.0

FAMILIES = ("normal", "student_t", "stretched_beta", "two_normal_mixture")
NORMAL_SDS = (0.7, 1.0, 1.3)
T_DFS = (3, 10)
BETA_SHAPES = (0.5, 1.0)
MIXTURE_OFFSET = 1.0
MIXTURE_SD = float(np.sqrt(0.7))


@dataclass(frozen=True)
class Marginal:
    """One per-dimension distribution of a component, centred at zero."""

    family: str
    params: tuple

    def sample(self, rng, size):
        if self.family == "normal":
            (sd,) = self.params
            return rng.normal(0.0, sd, size)
        if self.family == "student_t":
            (df,) = self.params
            return rng.standard_t(df, size)
        if self.family == "stretched_beta":
            a, b = self.params
            mean = a / (a + b)
            sd = np.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))
            return (rng.beta(a, b, size) - mean) / sd
        if self.family == "two_normal_mixture":
            signs = np.where(rng.random(size) < 0.5, -1.0, 1.0)
            return signs * MIXTURE_OFFSET + rng.normal(0.0, MIXTURE_SD, size)
        raise ValueError(f"unknown family {self.family!r}")

    def to_dict(self):
        return {"family": self.family, "params": list(self.params)}


@dataclass
class ComponentSpec:
    per_dimension: list
    centers: list

    def to_dict(self):
        return {
            "per_dimension": [m.to_dict() for m in self.per_dimension],
            "centers": [float(c) for c in self.centers],
        }


@dataclass
class SimulatedDataset:
    data: np.ndarray
    truth_labels: np.ndarray
    specs: list
    seed: int

    @property
    def m(self):
        return len(self.specs)


def random_marginal(rng):
    family = FAMILIES[rng.integers(len(FAMILIES))]
    if family == "normal":
        params = (NORMAL_SDS[rng.integers(len(NORMAL_SDS))],)
    elif family == "student_t":
        params = (T_DFS[rng.integers(len(T_DFS))],)
    elif family == "stretched_beta":
        params = (BETA_SHAPES[rng.integers(2)], BETA_SHAPES[rng.integers(2)])
    else:
        params = ()
    return Marginal(family, params)


def simulate_confounded(d, m, seed):
    """Draw ``300 * m`` points from a random m-component product mixture.

    Each point gets a uniform label in ``1..m``. In every dimension the
    component centres are laid out left to right with gaps drawn from
    N(2, 0.3**2), and each (component, dimension) cell gets its own
    randomly chosen marginal family.
    """
    if d < 2:
        raise ConfigurationError(f"need d >= 2, got {d}")
    if m < 1:
        raise ConfigurationError(f"need m >= 1, got {m}")
    rng = np.random.default_rng(seed)
    n = SAMPLES_PER_COMPONENT * m

    labels = rng.integers(1, m + 1, size=n)
    centers = np.zeros((m, d))
    for j in range(d):
        gaps = rng.normal(GAP_MEAN, GAP_SD, size=m - 1)
        centers[1:, j] = np.cumsum(gaps)
    specs = [
        ComponentSpec([random_marginal(rng) for _ in range(d)], list(centers[i]))
        for i in range(m)
    ]

    data = np.empty((n, d))
    for i, spec in enumerate(specs):
        rows = np.flatnonzero(labels == i + 1)
        for j, marginal in enumerate(spec.per_dimension):
            data[rows, j] = centers[i, j] + marginal.sample(rng, rows.size)
    return SimulatedDataset(data, labels, specs, seed)


def simulate_direct_link(confounder_states, seed):
    """Two-variable confounded data with ``x2`` additionally shifted by ``4 * x1``."""
    if confounder_states not in (1, 3):
        raise ConfigurationError(
            f"confounder_states must be 1 or 3, got {confounder_states}"
        )
    sim = simulate_confounded(2, confounder_states, seed)
    data = sim.data.copy()
    data[:, 1] = data[:, 1] + LINK_STRENGTH * data[:, 0]
    return SimulatedDataset(data, sim.truth_labels, sim.specs, seed)
