import math

import numpy as np
import pytest

from sphdyn.ergodic import (
    ChiEstimate,
    birkhoff_forward,
    chi_average,
    estimates_agree,
    generic_start,
    invariance_pvalue,
    mu_sample,
    preimages,
)
from sphdyn.periodic import chi_max_lower
from sphdyn.rational import apply
from sphdyn.sphere import INFINITY, SpherePoint, chordal_distance
from sphdyn.zoo import chebyshev_map, lattes4, power_map, random_map, theorem1_map


def test_preimage_examples():
    z2 = power_map(2)
    four = sorted(p.to_complex().real for p in preimages(z2, SpherePoint.from_complex(4)))
    assert np.allclose(four, [-2, 2])
    zero = preimages(z2, SpherePoint.from_complex(0))
    assert len(zero) == 2 and all(abs(p.to_complex()) < 1e-12 for p in zero)
    inf = preimages(z2, INFINITY)
    assert len(inf) == 2 and all(p.is_infinity for p in inf)


def test_fiber_correctness():
    rng = np.random.default_rng(0)
    for i in range(100):
        f = random_map(2 + i % 5, 500 + i)
        w = SpherePoint.from_complex(complex(*rng.standard_normal(2)) * 2)
        pre = preimages(f, w)
        assert len(pre) == f.degree
        for p in pre:
            assert chordal_distance(apply(f, p), w) < 1e-8


def test_generic_start_avoids_exceptional_points():
    # 0.5 + 0.5i is generic for z^2; the exceptional points 0 and infinity get nudged
    assert generic_start(power_map(2)).to_complex() == 0.5 + 0.5j
    p = generic_start(power_map(2), start=0)
    assert abs(p.to_complex()) > 0


def test_mu_sample_for_z_squared():
    s = mu_sample(power_map(2), n_paths=2000, burn_in=40, seed=0)
    z = np.array([p.to_complex() for p in s.points])
    assert len(z) == 2000 == s.n_paths
    assert abs(np.mean(np.log(np.abs(z)))) < 1e-6
    assert np.mean((np.abs(z) > 0.97) & (np.abs(z) < 1.03)) >= 0.95
    # argument is uniform on the circle: compare to direct sampling
    args = np.sort(np.angle(z))
    from scipy.stats import kstest

    assert kstest(args, "uniform", args=(-math.pi, 2 * math.pi)).pvalue > 1e-3


def test_mu_sample_chebyshev_segment():
    s = mu_sample(chebyshev_map(2), n_paths=2000, burn_in=40, seed=1)
    z = np.array([p.to_complex() for p in s.points])
    assert np.mean(np.abs(z.imag) < 0.02) >= 0.95
    assert np.all(np.abs(z.real) <= 2 + 1e-6)


def test_mu_sample_determinism_and_validation():
    f = random_map(3, 9)
    a = mu_sample(f, n_paths=300, seed=4)
    b = mu_sample(f, n_paths=300, seed=4)
    assert a.coords.tobytes() == b.coords.tobytes()
    c = mu_sample(f, n_paths=300, seed=5)
    assert c.coords.tobytes() != a.coords.tobytes()
    assert mu_sample(f, n_paths=300, seed=4, depth=3).depth == 3
    with pytest.raises(ValueError):
        mu_sample(f, burn_in=10)
    with pytest.raises(ValueError):
        mu_sample(f, n_paths=0)


def test_mu_sample_independent_of_threads():
    import numba

    f = random_map(3, 9)
    before = numba.get_num_threads()
    try:
        numba.set_num_threads(1)
        a = mu_sample(f, n_paths=500, seed=2)
    finally:
        numba.set_num_threads(before)
    b = mu_sample(f, n_paths=500, seed=2)
    assert a.coords.tobytes() == b.coords.tobytes()


@pytest.mark.parametrize("f,expected", [(power_map(2), math.log(2)), (power_map(3), math.log(3)),
                                        (lattes4(), math.log(2)), (chebyshev_map(2), math.log(2))])
def test_chi_average_known_values(f, expected):
    est = chi_average(f, n_paths=4000, seed=0)
    assert est.method == "ensemble_backward" and est.n_samples == 4000
    assert abs(est.value - expected) <= max(3 * est.stderr, 0.02)
    assert list(est.to_dict()) == ["value", "stderr", "n_samples", "method"]


@pytest.mark.parametrize("f", [power_map(2), lattes4(), chebyshev_map(3), theorem1_map(1),
                               random_map(2, 3), random_map(4, 4)])
def test_chi_average_between_floor_and_chi_max(f):
    est = chi_average(f, n_paths=2000, seed=3)
    tol = max(3 * est.stderr, 0.02)
    assert est.value >= 0.5 * math.log(f.degree) - tol
    assert est.value <= chi_max_lower(f, 2) + tol


def test_mu_invariance_ks():
    for f in [power_map(3), lattes4(), random_map(2, 21), theorem1_map(1)]:
        assert invariance_pvalue(f, mu_sample(f, n_paths=2000, seed=7)) > 1e-3


def test_birkhoff_on_invariant_circle():
    start = SpherePoint.from_complex(np.exp(2j * math.pi * (math.sqrt(5) - 1) / 2))
    est = birkhoff_forward(power_map(2), start, 10_000, scheme="pullback")
    assert est.value == pytest.approx(math.log(2), abs=0.01)
    assert est.method == "birkhoff_forward"


def test_birkhoff_escaping_orbit_hits_sentinel():
    est = birkhoff_forward(power_map(2), SpherePoint.from_complex(2), 200)
    assert est.value == -math.inf and est.flagged == 1


def test_birkhoff_short_vs_long_lattes():
    f = lattes4()
    start = mu_sample(f, n_paths=1, seed=11).points[0]
    short = birkhoff_forward(f, start, 100)
    long = birkhoff_forward(f, start, 10_000)
    assert estimates_agree(short, long)


def test_birkhoff_validation():
    with pytest.raises(ValueError):
        birkhoff_forward(power_map(2), SpherePoint.from_complex(1j), 50)
    with pytest.raises(ValueError):
        birkhoff_forward(power_map(2), SpherePoint.from_complex(1j), 500, scheme="sideways")


def test_estimates_agree_floor():
    a = ChiEstimate(1.0, 0.0, 10, "ensemble_backward")
    b = ChiEstimate(1.0 + 1e-15, 0.0, 10, "birkhoff_forward")
    assert estimates_agree(a, b)
    assert not estimates_agree(a, ChiEstimate(1.1, 0.01, 10, "birkhoff_forward"))
