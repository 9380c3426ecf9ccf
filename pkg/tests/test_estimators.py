#!/usr/bin/env python3
"""
Tests for the effort estimators.
"""

import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.datasets import RATING_TERMS, load_dataset
from src.errors import (
    EmptyDatasetError,
    EstimationError,
    MissingValueError,
    ZeroSimilarityError,
)
from src.estimators import (
    effort_multipliers_for,
    estimate,
    estimate_cocomo_adjusted,
    estimate_cocomo_for_project,
    estimate_crisp_knn,
    estimate_dataset_mean,
    estimate_fuzzy_analogy,
    load_multipliers,
)
from src.fuzzy import build_partitions
from src.models.dataset import Project
from src.models.estimation import (
    CocomoInputs,
    EstimationConfig,
    EstimationMode,
    Fallback,
    SimilarityConfig,
)
from src.models.fuzzy import FuzzyConfig, PartitionMethod
from src.similarity import similarity_vector

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def toy():
    return load_dataset(FIXTURES / "toy.csv")


@pytest.fixture
def toy_partitions(toy):
    return build_partitions(toy, FuzzyConfig(k_sets=2, method=PartitionMethod.UNIFORM))


@pytest.fixture
def cocomo():
    dataset = load_dataset(FIXTURES / "toy_cocomo.arff")
    return dataset.model_copy(update={"size_column": "loc"})


@pytest.fixture
def cocomo_partitions(cocomo):
    return build_partitions(cocomo, FuzzyConfig(k_sets=3))


def _query(**values):
    return Project(id="query", values=values)


def _scaled(dataset, factor):
    projects = [
        project.model_copy(update={"actual_effort": project.actual_effort * factor})
        for project in dataset.projects
    ]
    return dataset.with_projects(projects)


def _random_queries(n, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield _query(
            rely=RATING_TERMS[rng.integers(len(RATING_TERMS))],
            cplx=RATING_TERMS[rng.integers(len(RATING_TERMS))],
            loc=float(rng.uniform(0.0, 40.0)),
        )


def test_weighted_mean_of_two_cases(toy, toy_partitions):
    result = estimate_fuzzy_analogy(_query(size=25.0), toy, toy_partitions)
    assert result.value == pytest.approx(150.0)
    assert result.mode == EstimationMode.FUZZY_ANALOGY
    assert not result.fallback_used
    weights = {c.project_id: c.weight for c in result.contributions}
    assert weights == pytest.approx({"a": 0.75, "b": 0.25})


def test_equal_similarities_give_dataset_mean(toy, toy_partitions):
    result = estimate_fuzzy_analogy(_query(size=50.0), toy, toy_partitions)
    assert result.value == pytest.approx(200.0)


def test_zero_similarity_fallback(cocomo):
    config = EstimationConfig(
        similarity=SimilarityConfig(features=["rely"]), fuzzy=FuzzyConfig(overlap=1.0)
    )
    partitions = build_partitions(cocomo, config.fuzzy, ["rely"])
    query = _query(rely="xh", cplx="n", loc=5.0)

    result = estimate_fuzzy_analogy(query, cocomo, partitions, config)
    assert result.fallback_used
    assert result.value == pytest.approx(56.0)
    assert len(result.contributions) == len(cocomo)

    strict = config.model_copy(update={"fallback": Fallback.ERROR})
    with pytest.raises(ZeroSimilarityError):
        estimate_fuzzy_analogy(query, cocomo, partitions, strict)


def test_convexity_and_normalization(cocomo, cocomo_partitions):
    low, high = min(cocomo.efforts), max(cocomo.efforts)
    for query in _random_queries(1000):
        result = estimate_fuzzy_analogy(query, cocomo, cocomo_partitions)
        assert low <= result.value <= high
        assert math.fsum(c.weight for c in result.contributions) == pytest.approx(1.0, abs=1e-9)


def test_effort_scale_equivariance(cocomo, cocomo_partitions):
    scaled = _scaled(cocomo, 3.5)
    for query in _random_queries(50, seed=5):
        base = estimate_fuzzy_analogy(query, cocomo, cocomo_partitions).value
        assert estimate_fuzzy_analogy(query, scaled, cocomo_partitions).value == pytest.approx(
            3.5 * base, rel=1e-12
        )


def test_permutation_invariance(cocomo, cocomo_partitions):
    reversed_cases = cocomo.with_projects(list(reversed(cocomo.projects)))
    for query in _random_queries(50, seed=9):
        forward = estimate_fuzzy_analogy(query, cocomo, cocomo_partitions).value
        backward = estimate_fuzzy_analogy(query, reversed_cases, cocomo_partitions).value
        assert backward == pytest.approx(forward, rel=1e-12)


def test_weight_power_sharpens_towards_nearest(toy, toy_partitions):
    config = EstimationConfig(weight_power=2.0)
    result = estimate_fuzzy_analogy(_query(size=25.0), toy, toy_partitions, config)
    # weights 0.5625 : 0.0625
    assert result.value == pytest.approx((0.5625 * 100 + 0.0625 * 300) / 0.625)


def test_missing_query_feature_is_named(toy, toy_partitions):
    with pytest.raises(MissingValueError, match="size"):
        estimate_fuzzy_analogy(_query(size=None), toy, toy_partitions)


def test_empty_dataset(toy, toy_partitions):
    empty = toy.with_projects([])
    with pytest.raises(EmptyDatasetError):
        estimate_fuzzy_analogy(_query(size=1.0), empty, toy_partitions)
    with pytest.raises(EmptyDatasetError):
        estimate_dataset_mean(empty)


def test_cocomo_identity_case():
    inputs = CocomoInputs(size=100.0)
    assert estimate_cocomo_adjusted(inputs, a=1.0, b=1.0) == 100.0


def test_cocomo_published_calibration():
    inputs = CocomoInputs(size=100.0, distances=[4.0, 6.0])
    value = estimate_cocomo_adjusted(inputs)
    assert value == pytest.approx(2.94 * 100**1.01)
    assert value == pytest.approx(307.86, abs=0.01)

    halved = CocomoInputs(size=100.0, distances=[4.0, 6.0], effort_multipliers=[0.5])
    assert estimate_cocomo_adjusted(halved) == pytest.approx(value / 2)


def test_cocomo_inputs_validation():
    with pytest.raises(ValidationError):
        CocomoInputs(size=0.0)
    with pytest.raises(ValidationError):
        CocomoInputs(size=10.0, effort_multipliers=[1.2, 0.0])


def _cocomo(size, distances, multipliers):
    return estimate_cocomo_adjusted(
        CocomoInputs(size=size, distances=distances, effort_multipliers=multipliers)
    )


def test_cocomo_monotonicity():
    rng = np.random.default_rng(21)
    step = 1e-3
    for _ in range(100):
        size = float(rng.uniform(1.5, 500.0))
        distances = rng.uniform(0.0, 1.0, size=3).tolist()
        multipliers = rng.uniform(0.5, 1.7, size=4).tolist()
        base = _cocomo(size, distances, multipliers)
        assert _cocomo(size + step, distances, multipliers) > base
        assert _cocomo(size, distances[:-1] + [distances[-1] + step], multipliers) > base
        assert _cocomo(size, distances, multipliers[:-1] + [multipliers[-1] + step]) > base


def test_bundled_multiplier_table():
    table = load_multipliers()
    assert table["rely"]["n"] == 1.0
    assert table["rely"]["vh"] == 1.40
    assert table["cplx"]["xh"] == 1.65
    assert "loc" not in table


def test_multiplier_table_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"rely": {"n": -1.0}}')
    with pytest.raises(EstimationError):
        load_multipliers(bad)
    with pytest.raises(EstimationError):
        load_multipliers(tmp_path / "missing.json")


def test_effort_multipliers_for_project():
    table = {"rely": {"h": 1.15}, "cplx": {"n": 1.0}}
    project = _query(rely="h", cplx="xh", loc=10.0)
    # undefined rating counts as 1.0; numeric attributes carry no multiplier
    assert effort_multipliers_for(project, table) == [1.15, 1.0]


def test_cocomo_for_project(cocomo, cocomo_partitions):
    config = EstimationConfig(mode=EstimationMode.COCOMO_ADJUSTED, k=2)
    table = load_multipliers()
    query = _query(rely="h", cplx="vh", loc=10.0)
    result = estimate_cocomo_for_project(query, cocomo, cocomo_partitions, config, table)

    sims = similarity_vector(query, cocomo.projects, cocomo_partitions, config.similarity)
    top = np.argsort(-sims, kind="stable")[:2]
    distance = sum(1.0 - sims[i] for i in top)
    expected = 2.94 * 10.0 ** (0.91 + 0.01 * distance) * 1.15 * 1.30
    assert result.value == pytest.approx(expected)
    assert result.mode == EstimationMode.COCOMO_ADJUSTED
    assert [c.project_id for c in result.contributions] == [cocomo.projects[i].id for i in top]


def test_cocomo_needs_size_column(cocomo, cocomo_partitions):
    no_size = cocomo.model_copy(update={"size_column": None})
    with pytest.raises(EstimationError):
        estimate_cocomo_for_project(
            _query(rely="h", cplx="n", loc=10.0), no_size, cocomo_partitions
        )


def test_crisp_knn(toy):
    assert estimate_crisp_knn(_query(size=10.0), toy, k=2).value == pytest.approx(200.0)
    nearest = estimate_crisp_knn(_query(size=100.0), toy, k=1)
    assert nearest.value == 300.0
    assert nearest.contributions[0].project_id == "b"
    with pytest.raises(EstimationError):
        estimate_crisp_knn(_query(size=10.0), toy, k=3)


def test_crisp_knn_exact_match_and_ties(cocomo):
    match = cocomo.projects[2]
    result = estimate_crisp_knn(_query(**match.values), cocomo, k=1)
    assert result.value == match.actual_effort

    # projects 1, 2 and 6 all match on cplx; dataset order wins
    tied = estimate_crisp_knn(_query(rely="vl", cplx="h", loc=0.0), cocomo, k=1, features=["cplx"])
    assert tied.contributions[0].project_id == "1"


def test_crisp_knn_unknown_feature(cocomo):
    with pytest.raises(EstimationError, match="nope"):
        estimate_crisp_knn(_query(**cocomo.projects[0].values), cocomo, k=1, features=["nope"])


def test_dataset_mean():
    dataset = load_dataset(FIXTURES / "toy.csv")
    assert estimate_dataset_mean(dataset) == 200.0
    single = dataset.with_projects(dataset.projects[:1])
    assert estimate_dataset_mean(single) == 100.0


def test_estimate_dispatch(toy, toy_partitions):
    query = _query(size=25.0)
    assert estimate(query, toy, toy_partitions).value == pytest.approx(150.0)
    mean = estimate(query, toy, {}, EstimationConfig(mode=EstimationMode.DATASET_MEAN))
    assert mean.value == 200.0
    assert mean.mode == EstimationMode.DATASET_MEAN
    knn = estimate(query, toy, {}, EstimationConfig(mode=EstimationMode.CRISP_KNN, k=1))
    assert knn.value == 100.0
