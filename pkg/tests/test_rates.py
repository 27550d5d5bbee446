import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hashrep.bell import NoiseParams
from hashrep.bounds import DeltaSchedule, bennett_terms, global_private_fidelity, noisy_input_fidelity
from hashrep.rates import (
    RepeaterScenario,
    ZeroYieldError,
    channel_count,
    memory_requirement,
    rate_continuous,
    rate_single_shot,
    table_rate_2017,
    with_n,
)


@pytest.fixture
def worked():
    return RepeaterScenario.from_km(
        10000, 1000, eta=2 / 3, tp=1e-6, n=2000, resource_noise=NoiseParams(0.99), F_in=0.95
    )


def test_worked_example_rate(worked):
    assert worked.l0 == 10_000.0
    assert worked.t0_s == pytest.approx(5e-5)
    rep = rate_continuous(worked)
    c = 1 - bennett_terms(0.93607).S - 2 * 2000**-0.25
    assert rep.yield_c == pytest.approx(c, rel=1e-12)
    assert rep.rate_per_channel == pytest.approx(c * (2 / 3) / (5e-5 + 1e-6), rel=1e-12)
    assert 2500 <= rep.rate_per_channel <= 3600
    assert rep.n_channels == 3300
    assert rep.rate_absolute == pytest.approx(3300 * rep.rate_per_channel)
    assert rep.F_out == pytest.approx(0.985075)


def test_single_channel_rate(worked):
    rep = rate_continuous(dataclasses.replace(worked, channels="single"))
    eps = 2000**-0.25
    expected = rep.yield_c * 2000 / (2000 * (1.5 + eps) * 5e-5 + 1e-6)
    assert rep.rate_per_channel == pytest.approx(expected, rel=1e-12)
    assert rep.rate_per_channel == pytest.approx(3113.0, abs=0.01)


def test_single_shot_includes_classical_delay(worked):
    rep = rate_single_shot(worked)
    assert rep.t_c == pytest.approx(0.05)
    assert rep.rate_per_channel == pytest.approx(rep.yield_c * (2 / 3) / (5e-5 + 1e-6 + 0.05))
    split = rate_single_shot(dataclasses.replace(worked, split_corrections=True))
    assert split.rate_per_channel > rep.rate_per_channel


def test_channel_count():
    cc = channel_count(2000, 2 / 3, 2000**-0.25, 1000)
    assert cc.n_c == math.ceil(2000 * (1.5 + 2000**-0.25))
    assert cc.shortfall_bound == pytest.approx(math.exp(-math.sqrt(2000)))
    assert cc.success_all_links == pytest.approx(1.0)
    with pytest.raises(ValueError):
        channel_count(10, 0.0, 0.1)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.0, 1.0), st.integers(1, 10**5))
def test_channel_count_covers_expectation(eta, eps, n):
    assert channel_count(n, eta, eps).n_c * eta >= n * (1 + eps * eta) - 1e-6


def test_memory(worked):
    mid = memory_requirement(worked, "intermediate")
    end = memory_requirement(worked, "end_station")
    assert mid.storage_time == pytest.approx(5e-5)
    assert mid.qubits == 8000
    assert end.storage_time == pytest.approx(0.05)
    assert end.qubits == 8000 + math.floor(2000 * rate_continuous(worked).yield_c)
    assert not end.exceeds_earth_bound
    single = memory_requirement(dataclasses.replace(worked, channels="single"), "intermediate")
    assert single.qubits == 4001
    with pytest.raises(ValueError):
        memory_requirement(worked, "relay")


def test_zero_yield_raises(worked):
    with pytest.raises(ZeroYieldError):
        rate_continuous(with_n(worked, 50))


def test_validation():
    with pytest.raises(ValueError):
        RepeaterScenario(1000.0, 10, eta=0.0)
    with pytest.raises(ValueError):
        RepeaterScenario(-1.0, 10)


def test_table_rate_minimal_n():
    noise = NoiseParams(0.99)
    r = table_rate_2017(0.95, 128, noise)
    F_eff = noisy_input_fidelity(0.95, noise)
    s = DeltaSchedule.power(0.25)
    at = global_private_fidelity(F_eff, r.n, s, 128)
    below = global_private_fidelity(F_eff, r.n - 1, s, 128)
    assert at.F_gp >= 0.95 and at.yield_c > 0
    assert below.F_gp < 0.95 or below.yield_c <= 0
    assert r.rate == pytest.approx(at.yield_c / 64)
    assert r.F_out == pytest.approx(0.985075)


def test_channel_count_trivial_and_decreasing():
    assert channel_count(500, 1.0, 0.0).n_c == 500
    a = channel_count(1000, 0.5, 1000**-0.25).shortfall_bound
    b = channel_count(16000, 0.5, 16000**-0.25).shortfall_bound
    assert b < a


def test_unit_yield_rate():
    s = RepeaterScenario(1000.0, 1, t0=1e-3, tp=1e-4)
    rep = rate_continuous(dataclasses.replace(s, F_in=1.0, n=10**8))
    assert rep.rate_per_channel == pytest.approx(rep.yield_c / 1.1e-3)


def test_single_channel_rate_approaches_many_channel_limit(worked):
    big = dataclasses.replace(worked, channels="single", n=10**9)
    rep = rate_continuous(big)
    assert rep.rate_per_channel == pytest.approx(rep.yield_c * (2 / 3) / big.t0_s, rel=0.01)


def test_single_shot_halves_when_links_double(worked):
    longer = dataclasses.replace(worked, L_total=2 * worked.L_total, N_links=2 * worked.N_links)
    assert longer.l0 == worked.l0
    ratio = rate_single_shot(longer).rate_per_channel / rate_single_shot(worked).rate_per_channel
    assert ratio == pytest.approx(0.5, rel=1e-3)
