from __future__ import annotations

import numpy as np
import pytest

from sflsim.errors import EvaluationError
from sflsim.scheduler.runner import run

STRIP = {"cell_size": "1|1", "minimum": "0|0", "maximum": "3|1", "boundary": "0|0"}


def test_two_unit_masses_attract_with_unit_acceleration(build_case, evaluate) -> None:
    case = build_case(domain=STRIP, points=[(0.5, 0.5), (1.5, 0.5)], fields=[("m", "1")])

    acceleration = evaluate(case, "nbody_gravity(m, 1)")

    assert acceleration[0, :, 0].tolist() == [1.0, 0.0]
    assert acceleration[1, :, 0].tolist() == [-1.0, 0.0]


def test_total_momentum_change_vanishes(build_case, evaluate) -> None:
    case = build_case(
        domain=STRIP,
        points=[(0.5, 0.2), (1.5, 0.3), (1.0, 0.9)],
        fields=[("m", "1 + 10*comp(r,0)")],
    )

    acceleration = evaluate(case, "nbody_gravity(m, 6.674e-11*1e10)")
    mass = evaluate(case, "m")

    assert np.abs(np.sum(mass * acceleration, axis=0)).max() < 1e-12


def test_coincident_particles_without_softening_are_an_error(build_case, evaluate) -> None:
    case = build_case(domain=STRIP, points=[(0.5, 0.5), (0.5, 0.5)], fields=[("m", "1")])

    with pytest.raises(EvaluationError, match="particles 0 and 1 coincide"):
        evaluate(case, "nbody_gravity(m, 1)")


def test_softening_allows_coincident_particles(build_case, evaluate) -> None:
    case = build_case(domain=STRIP, points=[(0.5, 0.5), (0.5, 0.5), (1.5, 0.5)], fields=[("m", "1")])

    acceleration = evaluate(case, "nbody_gravity(m, 1, 0.1)")

    assert np.all(np.isfinite(acceleration))
    assert acceleration[0, 0, 0] == pytest.approx(1.0 / (1.0 + 0.01) ** 1.5)


def test_periodic_boundaries_add_no_images(build_case, evaluate) -> None:
    case = build_case(
        domain={"cell_size": "1", "minimum": "0", "maximum": "4", "boundary": "1"},
        points=[(0.5,), (3.5,)],
        fields=[("m", "1")],
    )

    acceleration = evaluate(case, "nbody_gravity(m, 1)")

    assert acceleration[0, 0, 0] == pytest.approx(1.0 / 9.0)


def test_inactive_particles_are_not_sources(build_case, evaluate) -> None:
    case = build_case(domain=STRIP, points=[(0.5, 0.5), (1.5, 0.5), (2.5, 0.5)], fields=[("m", "1")])
    case.system.active[2] = False

    acceleration = evaluate(case, "nbody_gravity(m, 1)")

    assert acceleration[0, 0, 0] == 1.0


def test_circular_orbit_keeps_its_energy_and_radius(build_case) -> None:
    case = build_case(
        domain={"cell_size": "1|1", "minimum": "-2|-2", "maximum": "2|2", "boundary": "0|0"},
        points=[(0.0, 0.0), (1.0, 0.0)],
        variables=[("dt", "0.002")],
        fields=[
            ("m", "1 - (1 - 1e-6)*(comp(r,0) > 0.5)"),
            ("v", "(comp(r,0) > 0.5)*(0|1)"),
            ("acc", "0|0"),
        ],
        equations=[
            ("gravity", "acc=nbody_gravity(m, 1)"),
            ("velocity", "v=euler(v,acc,dt)"),
            ("orbit", "r=euler(r,v,dt)"),
        ],
        simulated_time=2 * np.pi,
        print_interval=2 * np.pi,
    )

    run(case)

    positions = case.system.positions
    velocity = case.workspace.fields["v"].data[:, :, 0]
    separation = float(np.linalg.norm(positions[1] - positions[0]))
    energy = 0.5 * float(np.sum((velocity[1] - velocity[0]) ** 2)) - 1.0 / separation
    assert separation == pytest.approx(1.0, abs=1e-2)
    assert energy == pytest.approx(-0.5, rel=1e-2)
    assert case.system.active.all()
