"""scikit-learn style wrappers around the GA and the exhaustive oracle."""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .evaluation import Solution, objectives
from .ga import GAConfig, evolve
from .oracle import DEFAULT_MAX_PAIRS, enumerate_front
from .validation import check_instance


class ParetoGA(BaseEstimator):
    """Multi-objective GA for the m-PDPTW.

    ``fit`` takes an instance (object, mapping, JSON text or path) and stores
    the non-dominated routings it found.

    Attributes
    ----------
    archive_ : ParetoArchive
    front_ : ndarray of shape (n_solutions, 3)
        Objective vectors (vehicles, tardiness, cost) sorted lexicographically.
    solutions_ : list of Solution
        Routings aligned with ``front_``.
    history_ : list of int
        Archive size after each generation (index 0 is the initial population).
    """

    def __init__(
        self,
        population_size=50,
        generations=200,
        crossover_rate=0.6,
        mutation_rate=0.3,
        copy_rate=None,
        pairing_sample=4,
        random_state=0,
    ):
        self.population_size = population_size
        self.generations = generations
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.copy_rate = copy_rate
        self.pairing_sample = pairing_sample
        self.random_state = random_state

    def _config(self) -> GAConfig:
        return GAConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            copy_rate=self.copy_rate,
            rng_seed=self.random_state,
            pairing_sample=self.pairing_sample,
        )

    def fit(self, X, y=None):
        inst = check_instance(X)
        cfg = self._config()
        history: list[int] = []
        start = time.perf_counter()
        archive = evolve(inst, cfg, callback=lambda gen, arc, _: history.append(len(arc)))
        self.fit_time_ = time.perf_counter() - start
        self.instance_ = inst
        self.config_ = cfg
        self.archive_ = archive
        entries = archive.sorted_entries()
        self.front_ = np.array([tuple(v) for v, _ in entries], dtype=float).reshape(-1, 3)
        self.solutions_ = [s for _, s in entries]
        self.history_ = history
        self.n_generations_ = cfg.generations
        return self

    def transform(self, X):
        """Objective vectors of the given routings on the fitted instance."""
        check_is_fitted(self, "archive_")
        rows = [tuple(objectives(self.instance_, s if isinstance(s, Solution) else Solution(s))) for s in X]
        return np.array(rows, dtype=float).reshape(-1, 3)


class ExhaustiveFront(BaseEstimator):
    """Exact Pareto front by enumeration; only for a handful of requests."""

    def __init__(self, max_pairs=DEFAULT_MAX_PAIRS):
        self.max_pairs = max_pairs

    def fit(self, X, y=None):
        inst = check_instance(X)
        result = enumerate_front(inst, self.max_pairs)
        self.instance_ = inst
        self.archive_ = result.front
        entries = result.front.sorted_entries()
        self.front_ = np.array([tuple(v) for v, _ in entries], dtype=float).reshape(-1, 3)
        self.solutions_ = [s for _, s in entries]
        self.enumerated_count_ = result.enumerated_count
        self.feasible_count_ = result.feasible_count
        return self
