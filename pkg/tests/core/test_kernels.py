from __future__ import annotations

import math

import numpy as np
import pytest

from sflsim.core.tensor import Tensor
from sflsim.errors import CaseAssemblyError, EvaluationError
from sflsim.kernels import kernel_gradient, kernel_value, make_kernel


def test_wendland_2d_peak_value_and_support() -> None:
    kernel = make_kernel("Wp52220", 1.0)

    assert kernel.h == 0.5
    assert kernel.support == 1.0
    assert kernel_value(kernel, 0.0).item() == pytest.approx(7.0 / (4.0 * math.pi * 0.25))
    assert kernel_value(kernel, 1.0).item() == 0.0
    assert kernel_value(kernel, 1.5).item() == 0.0


@pytest.mark.parametrize("keyword", ["Wp51220", "Wp52220", "Wp53220"])
def test_wendland_kernels_integrate_to_one(keyword: str) -> None:
    kernel = make_kernel(keyword, 2.0)
    r = np.linspace(0.0, 2.0, 20001)
    w = kernel.value(r)
    shell = {1: 2.0 * np.ones_like(r), 2: 2.0 * math.pi * r, 3: 4.0 * math.pi * r**2}[kernel.dimension]

    assert np.trapezoid(w * shell, r) == pytest.approx(1.0, rel=1e-6)


def test_gradient_points_toward_the_neighbor() -> None:
    kernel = make_kernel("Wp52220", 1.0)

    grad = kernel_gradient(kernel, Tensor.vector([0.2, 0.0]))

    assert grad.values[0] > 0.0
    assert grad.values[1] == 0.0
    assert grad.values[0] == pytest.approx(float(kernel.radial_slope(np.array(0.2))))


def test_gradient_of_coincident_pair_is_an_error() -> None:
    kernel = make_kernel("Wp52220", 1.0)

    with pytest.raises(EvaluationError, match="zero-length"):
        kernel_gradient(kernel, Tensor.vector([0.0, 0.0]))


def test_unknown_keyword_lists_registered_keywords() -> None:
    with pytest.raises(CaseAssemblyError, match="registered keywords: Wp51220"):
        make_kernel("Wp92220", 1.0)


def test_nonpositive_support_is_rejected() -> None:
    with pytest.raises(EvaluationError, match="must be positive"):
        make_kernel("Wp52220", 0.0)


@pytest.mark.parametrize("keyword", ["Wp51220", "Wp52220", "Wp53220"])
def test_radial_slope_matches_central_differences(keyword: str) -> None:
    kernel = make_kernel(keyword, 1.0)
    step = 1e-6

    for distance in np.linspace(0.05, 0.9, 20):
        numeric = -(kernel.value(np.array(distance + step)) - kernel.value(np.array(distance - step))) / (2 * step)
        assert float(kernel.radial_slope(np.array(distance))) == pytest.approx(float(numeric), rel=1e-6)


@pytest.mark.parametrize("keyword", ["Wp51220", "Wp52220", "Wp53220"])
def test_kernel_value_never_increases_with_distance(keyword: str) -> None:
    kernel = make_kernel(keyword, 1.0)
    r = np.sort(np.random.default_rng(5).uniform(0.0, 1.2, 500))

    w = kernel.value(r)

    assert np.all(np.diff(w) <= 0.0)
    assert np.all(w[r >= 1.0] == 0.0)


@pytest.mark.parametrize(("keyword", "dimension"), [("Wp51220", 1), ("Wp52220", 2), ("Wp53220", 3)])
def test_gradient_is_antisymmetric_in_the_pair_vector(keyword: str, dimension: int) -> None:
    kernel = make_kernel(keyword, 1.0)
    rel = np.random.default_rng(dimension).uniform(-0.6, 0.6, (200, dimension))
    distance = np.linalg.norm(rel, axis=1)

    forward = kernel.gradient(rel, distance)
    backward = kernel.gradient(-rel, distance)

    assert np.array_equal(forward, -backward)
