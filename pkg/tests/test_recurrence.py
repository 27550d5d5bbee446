import math

import numpy as np
import pytest

import oracles
from reference_tables import LINK_EXPONENTS, TABLES
from hashrep.bell import BellDiagonal, NoiseParams, depolarize, swap
from hashrep.recurrence import (
    TimeModel,
    UnreachableFidelity,
    bdcz_chain,
    compare_1998,
    dejmps_step,
    optimize_working_fidelity,
    purify_to,
    stochastic_purify_pairs,
    working_fidelity_sweep,
)


def test_dejmps_matches_density_matrix_on_1000_states():
    rng = np.random.default_rng(20240501)
    worst = 0.0
    for _ in range(1000):
        a, b = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        res = dejmps_step(BellDiagonal(tuple(a)), BellDiagonal(tuple(b)))
        ref, ps = oracles.dejmps_oracle(a, b, 1.0, 0)
        worst = max(worst, np.abs(np.array(res.out.p) - ref).max(), abs(res.p_success - ps))
    assert worst <= 1e-10


@pytest.mark.parametrize("pending", [0, 1])
def test_dejmps_noise_layers_match_density_matrix(pending):
    rng = np.random.default_rng(pending)
    for _ in range(20):
        a, b = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        res = dejmps_step(BellDiagonal(tuple(a)), BellDiagonal(tuple(b)), NoiseParams(0.97), pending)
        ref, ps = oracles.dejmps_oracle(a, b, 0.97, pending + 1)
        np.testing.assert_allclose(res.out.p, ref, atol=1e-10)
        assert res.p_success == pytest.approx(ps, abs=1e-10)


def test_dejmps_improves_werner():
    s = BellDiagonal.werner(0.8)
    out = dejmps_step(s, s).out
    assert out.fidelity() > 0.8


def test_purify_bookkeeping():
    s = BellDiagonal.werner(0.9)
    noise = NoiseParams(0.99)
    res = purify_to(s, 0.97, noise, span=4)
    x, M, pend = s, 1.0, 0
    for _ in range(res.rounds):
        x, ps = dejmps_step(x, x, noise, pend)
        M, pend = M * 2 / ps, 1
    assert res.state.fidelity() >= 0.97
    assert res.pairs_consumed == pytest.approx(M)
    assert res.time_elapsed == pytest.approx(4 * res.rounds)
    assert res.pending_layers == 1


def test_purify_unreachable():
    with pytest.raises(UnreachableFidelity):
        purify_to(BellDiagonal.werner(0.9), 0.999, NoiseParams(0.98))


def test_stochastic_pair_count_within_two_percent():
    s = BellDiagonal.werner(0.9)
    noise = NoiseParams(0.99)
    analytic = purify_to(s, 0.97, noise).pairs_consumed
    sampled = stochastic_purify_pairs(s, 0.97, noise, trials=4000, seed=1)
    assert sampled == pytest.approx(analytic, rel=0.02)


def test_chain_structure():
    noise = NoiseParams(0.99)
    k = 3
    res = bdcz_chain(0.95, k, 0.96, noise)
    assert len(res.history) == k + 1
    assert all(h.state.fidelity() >= 0.96 for h in res.history)
    # time: purification rounds at span 2^level plus one swap per level
    t = sum(2**lvl for lvl in range(k))
    rounds_time = 0.0
    prev = 0
    for lvl, h in enumerate(res.history):
        rounds_time += (h.rounds - prev) * 2**lvl
        prev = h.rounds
    assert res.time == pytest.approx(rounds_time + t)
    assert res.rate == pytest.approx(1 / (res.pairs * res.time))
    # final output noise: two layers per end once the last round has run
    last = res.history[-1].state
    assert res.state.p == pytest.approx(depolarize(last, 0.99**2).p)


def test_noiseless_chain_swaps_plainly():
    res = bdcz_chain(0.99, 1, 0.5)
    assert res.pairs == 1.0
    assert res.state.p == pytest.approx(swap(BellDiagonal.werner(0.99), BellDiagonal.werner(0.99)).p)
    assert res.time == 1.0


def test_time_models():
    assert TimeModel.two_way().purify_cost == 2.0
    fast = bdcz_chain(0.95, 2, 0.96, NoiseParams(0.99), TimeModel.fitted())
    slow = bdcz_chain(0.95, 2, 0.96, NoiseParams(0.99), TimeModel.two_way())
    assert slow.time > fast.time and slow.pairs == fast.pairs


def test_optimizer_beats_grid():
    opt = optimize_working_fidelity(0.95, 7, NoiseParams(0.99))
    best_grid = max(r.rate for r in opt.sweep if r.rate is not None)
    assert opt.rate >= best_grid
    again = working_fidelity_sweep(0.95, 7, NoiseParams(0.99), [opt.F_work])[0]
    assert again.rate == pytest.approx(opt.rate)


@pytest.fixture(scope="module")
def comparison():
    return compare_1998()


@pytest.mark.parametrize("F", [0.95, 0.99])
def test_comparison_against_published_tables(comparison, F):
    rows = [r for r in comparison if r.F_in == F]
    ref = TABLES[F]
    assert [r.links for r in rows] == [2**k for k in LINK_EXPONENTS]
    for i, r in enumerate(rows):
        assert abs(math.log10(r.rate_1998 / ref["rate_1998"][i])) <= 1.0
        assert abs(r.F_out_1998 - ref["F_out_1998"][i]) <= 0.02
        assert abs(math.log10(r.rate_2017 / ref["rate_2017"][i])) <= 1.0
        assert round(r.F_out_2017, 4) == ref["F_out_2017"][i]


def test_hashing_ratio_grows(comparison):
    for F in (0.95, 0.99):
        ratios = [r.rate_2017 / r.rate_1998 for r in comparison if r.F_in == F]
        assert ratios[-1] >= 1e8
        assert ratios[-1] > ratios[0]


def test_dejmps_trivial_cases():
    perfect = BellDiagonal.perfect()
    res = dejmps_step(perfect, perfect)
    assert res.out.fidelity() == 1.0 and res.p_success == 1.0
    for F in np.linspace(0.51, 0.99, 25):
        s = BellDiagonal.werner(float(F))
        assert dejmps_step(s, s).out.fidelity() > F


def test_noiseless_fixed_point_is_perfect():
    x = BellDiagonal.werner(0.6)
    for _ in range(40):
        x = dejmps_step(x, x).out
    assert x.fidelity() > 1 - 1e-9


def test_purify_no_op_and_monotone_cost():
    s = purify_to(BellDiagonal.werner(0.97), 0.96)
    assert s.pairs_consumed == 1.0 and s.time_elapsed == 0.0
    costs = [purify_to(BellDiagonal.werner(F), 0.98, NoiseParams(0.995)).pairs_consumed for F in (0.8, 0.85, 0.9, 0.95)]
    assert costs == sorted(costs, reverse=True)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_swap_only_chain_multiplies_werner_weight(k):
    res = bdcz_chain(0.99, k, 0.3)
    q = (4 * 0.99 - 1) / 3
    assert res.state.is_werner()
    assert (4 * res.F_out - 1) / 3 == pytest.approx(q ** (2**k), rel=1e-12)


def test_pair_count_curve_has_interior_minimum():
    opt = optimize_working_fidelity(0.95, 7, NoiseParams(0.99))
    rows = [r for r in opt.sweep if r.pairs is not None]
    i = min(range(len(rows)), key=lambda j: rows[j].pairs)
    assert 0 < i < len(rows) - 1
    assert rows[0].pairs > rows[i].pairs < rows[-1].pairs
    assert all(r.pairs_no_retry <= r.pairs for r in rows)


def test_rate_drops_about_a_decade_per_doubling(comparison):
    for F in (0.95, 0.99):
        rates = [r.rate_1998 for r in comparison if r.F_in == F]
        steps = [math.log10(a / b) for a, b in zip(rates, rates[1:])]
        assert all(0.5 <= s <= 1.5 for s in steps)
        assert all(r.rate_1998 < r.rate_2017 for r in comparison)
