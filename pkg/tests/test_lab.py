import math

import pytest

from sphdyn.lab import (
    GROWTH_COLUMNS,
    growth_table_csv,
    inequality_chain_report,
    k_infinity_bracket,
    subadditivity_violations,
    theorem1_growth_table,
)
from sphdyn.rational import iterate
from sphdyn.zoo import chebyshev_map, lattes4, power_map, random_map, theorem1_map


def test_bracket_power_map():
    br = k_infinity_bracket(power_map(2), n_max=5, m_max=3)
    assert br.upper == pytest.approx(math.log(2), abs=1e-6)
    assert br.lower == pytest.approx(math.log(2), abs=1e-6)
    assert len(br.per_n) == 5


def test_bracket_lattes():
    br = k_infinity_bracket(lattes4(), n_max=4, m_max=2)
    assert br.lower >= math.log(4) - 1e-8
    assert br.upper <= math.log(4) + 0.15


def test_bracket_validation():
    with pytest.raises(ValueError):
        k_infinity_bracket(power_map(2), n_max=1)


@pytest.mark.parametrize("f", [power_map(3), chebyshev_map(2), random_map(2, 1000), random_map(3, 1001)])
def test_bracket_order_and_subadditivity(f):
    br = k_infinity_bracket(f, n_max=4)
    assert br.lower <= br.upper + 1e-6
    assert subadditivity_violations(br.per_n) == []
    assert br.to_dict()["gap"] == br.gap


def test_upper_nonincreasing_in_n_max():
    f = random_map(2, 5)
    uppers = [k_infinity_bracket(f, n_max=n).upper for n in (2, 3, 4)]
    assert uppers[0] >= uppers[1] >= uppers[2]


def test_homogeneity_of_iterates():
    f = random_map(2, 8)
    one = k_infinity_bracket(f, n_max=4).upper
    two = k_infinity_bracket(iterate(f, 2), n_max=2).upper
    assert two == pytest.approx(2 * one, rel=0.1)


def test_subadditivity_helper():
    assert subadditivity_violations([1.0, 1.0, 1.0]) == []
    # a_2 = 4 > a_1 + a_1 = 2
    assert subadditivity_violations([1.0, 2.0]) == [(1, 1)]


def test_chain_report_power_map():
    rep = inequality_chain_report(power_map(3), label="power:d=3", n_paths=2000)
    log3 = math.log(3)
    for v in (rep.log_k, rep.k_inf_upper, rep.k_inf_lower, rep.chi_a.value):
        assert v == pytest.approx(log3, abs=1e-6)
    assert rep.chain_ok and not rep.gaps["strict_chi_a_chi_m"]
    keys = list(rep.to_dict())
    assert keys[:6] == ["map_label", "degree", "log_k", "k_inf_upper", "k_inf_lower", "chi_a"]


def test_chain_report_lattes_strict_gap():
    rep = inequality_chain_report(lattes4(), label="lattes4")
    assert rep.chain_ok
    assert rep.chi_a.value == pytest.approx(math.log(2), abs=max(3 * rep.chi_a.stderr, 0.02))
    assert rep.k_inf_lower >= math.log(4) - 1e-8
    assert rep.gaps["strict_chi_a_chi_m"]


def test_chain_report_theorem1():
    f = theorem1_map(2)
    rep = inequality_chain_report(f, label="theorem1:n=2", n_paths=2000)
    assert rep.chain_ok
    # near-extremal family: log K exceeds half log d by a bounded amount
    assert rep.log_k - 0.5 * math.log(f.degree) < 4.0


def test_growth_table():
    rows = theorem1_growth_table(3)
    assert [r["degree"] for r in rows] == [3, 10, 21]
    assert all(r["k"] >= 2 for r in rows)
    assert rows[0]["k"] >= math.sqrt(3)
    r2, r3 = rows[1]["ratio"], rows[2]["ratio"]
    assert max(r2, r3) / min(r2, r3) <= 2
    text = growth_table_csv(rows)
    assert text.splitlines()[0] == ",".join(GROWTH_COLUMNS) == "n,degree,k,ratio,phi"
    assert len(text.splitlines()) == 4
    with pytest.raises(ValueError):
        theorem1_growth_table(5)
