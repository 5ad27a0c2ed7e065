import math

import numpy as np
import pytest

from sphdyn.rational import apply, make_map
from sphdyn.sphere import SpherePoint, chordal_arrays
from sphdyn.zoo import (
    FamilyLabel,
    chebyshev_map,
    identity_map,
    lattes4,
    power_map,
    random_map,
    standard_zoo,
    tanh_product,
    theorem1_map,
)
from sphdyn.knorm import k_norm
from sphdyn.periodic import periodic_cycles

from oracles import chordal


def test_power_maps():
    assert identity_map().degree == 1
    assert power_map(2).degree == 2 and power_map(5).degree == 5


@pytest.mark.parametrize("n,degree", [(1, 3), (2, 10), (3, 21), (4, 36), (5, 55), (6, 78)])
def test_theorem1_degree(n, degree):
    assert theorem1_map(n).degree == degree


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_theorem1_matches_tanh_product(n):
    f = theorem1_map(n)
    rng = np.random.default_rng(n)
    z = rng.uniform(-1.5, 1.5, 50) + 1j * rng.uniform(-1.5, 1.5, 50)
    w = np.exp(2 * z)
    got = np.array([apply(f, SpherePoint.from_complex(x)).to_complex() for x in w])
    want = tanh_product(n, n * z)
    assert np.max(chordal(got, want)) < 1e-8


def test_theorem1_single_point():
    f = theorem1_map(1)
    got = apply(f, SpherePoint.from_complex(math.exp(0.2))).to_complex()
    want = math.tanh(0.1 - 2) * math.tanh(0.1) * math.tanh(0.1 + 2)
    assert abs(got - want) < 1e-8


def test_theorem1_range():
    with pytest.raises(ValueError):
        theorem1_map(0)
    with pytest.raises(ValueError):
        theorem1_map(7)


def test_lattes_duplication_formula():
    f = lattes4()
    assert f.degree == 4
    assert apply(f, SpherePoint.from_complex(complex("inf"))).is_infinity
    z = np.array([0.3 + 0.1j, 2.0 - 1.0j, -0.7j])
    want = (z ** 2 + 1) ** 2 / (4 * z * (z ** 2 - 1))
    got = np.array([apply(f, SpherePoint.from_complex(x)).to_complex() for x in z])
    assert np.allclose(got, want, rtol=1e-13)


def test_lattes_multiplier_at_infinity():
    cyc = [c for c in periodic_cycles(lattes4(), 1) if c.points[0].is_infinity]
    assert len(cyc) == 1 and abs(cyc[0].multiplier - 4) < 1e-8


def test_chebyshev_semiconjugacy():
    assert np.allclose(chebyshev_map(2).num.coeffs * 1.0, np.array([-2, 0, 1]) / 2)
    assert np.allclose(chebyshev_map(3).num.coeffs, np.array([0, -3, 0, 1]) / 3)
    assert apply(chebyshev_map(2), SpherePoint.from_complex(2)).to_complex() == pytest.approx(2)
    w = np.exp(1j * np.linspace(0.1, 3, 7)) * 1.3
    for d in range(2, 9):
        f = chebyshev_map(d)
        got = np.array([apply(f, SpherePoint.from_complex(x + 1 / x)).to_complex() for x in w])
        assert np.allclose(got, w ** d + w ** -d, rtol=1e-10)


def test_random_map_determinism():
    assert random_map(5, 0) == random_map(5, 0)
    assert random_map(3, 1) == random_map(3, 1)
    assert random_map(3, 1) != random_map(3, 2)
    assert k_norm(random_map(2, 7)).value >= math.sqrt(2)


def test_family_labels():
    lab = FamilyLabel.parse("random:d=5:seed=42")
    assert str(lab) == "random:d=5:seed=42" and lab.build() == random_map(5, 42)
    assert FamilyLabel.parse("lattes4").build() == lattes4()
    assert FamilyLabel.parse("theorem1:n=2").build().degree == 10
    for bad in ["nope", "power", "power:d=x", "power:d=2:e=3", "lattes4:d=2", "power:d"]:
        with pytest.raises(ValueError):
            FamilyLabel.parse(bad)


def test_standard_zoo_builds():
    labels = standard_zoo()
    assert len(labels) == 31
    for lab in labels:
        f = lab.build()
        make_map(f.num.coeffs, f.den.coeffs)
