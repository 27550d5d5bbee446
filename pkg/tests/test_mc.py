import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hashrep.bell import BellDiagonal, NoiseParams, entropy
from hashrep.bounds import DeltaSchedule
from hashrep.gf2 import parity
from hashrep.mc import (
    ErrorEnsemble,
    RoundsExceedError,
    hashing_rounds,
    run_hashing,
    sample_ensemble,
    simulate_chain,
    trial_seed,
    validate_bound,
    wilson_interval,
)


def brute_candidates(run, n, source, delta):
    """Likely strings consistent with every parity, by enumerating all 4^n."""
    S = entropy(source)
    out = []
    for y in range(4**n):
        if not all(pr.check(y) for pr in run.rounds):
            continue
        nl = 0.0
        for i in range(n):
            p = source.p[(y >> (2 * i)) & 3]
            if p == 0:
                nl = math.inf
                break
            nl -= math.log2(p)
        if math.isfinite(nl) and abs(nl / n - S) <= delta + 1e-12:
            out.append(y)
    return out


@pytest.mark.parametrize("F,n,delta", [(0.9, 4, 0.4), (0.95, 5, 0.5), (0.8, 5, 0.3), (0.9, 6, 0.6)])
def test_exhaustive_decoder_matches_brute_force(F, n, delta):
    src = BellDiagonal.werner(F)
    for t in range(25):
        ens = sample_ensemble(src, n, trial_seed(3, t, 0))
        run = run_hashing(ens, delta, trial_seed(3, t, 1), "exhaustive")
        cands = brute_candidates(run, n, src, delta)
        assert run.candidates == len(cands)
        assert run.success == (run.truth_likely and cands == [ens.bits])


def test_rounds_are_parities_of_truth():
    ens = sample_ensemble(BellDiagonal.werner(0.9), 40, 11)
    run = run_hashing(ens, 0.2, 12, "approximate")
    assert run.n_rounds == hashing_rounds(40, entropy(ens.source), 0.2)
    assert all(parity(r.subset & ens.bits) == r.outcome for r in run.rounds)
    assert all(r.subset != 0 for r in run.rounds)


def test_approximate_is_one_sided():
    """The approximate decoder never reports a failure the exhaustive one would not."""
    src = BellDiagonal.werner(0.9)
    for t in range(60):
        ens = sample_ensemble(src, 10, trial_seed(5, t, 0))
        ex = run_hashing(ens, 0.5, trial_seed(5, t, 1), "exhaustive")
        ap = run_hashing(ens, 0.5, trial_seed(5, t, 1), "approximate")
        if ex.success:
            assert ap.success
        if not ap.success and ap.truth_likely:
            assert ap.decoded != ens.bits
            assert all(r.check(ap.decoded) for r in ap.rounds)


def test_determinism():
    src = BellDiagonal.werner(0.95)
    a = sample_ensemble(src, 100, trial_seed(7, 3, 0))
    b = sample_ensemble(src, 100, trial_seed(7, 3, 0))
    assert a == b
    assert run_hashing(a, 0.3, 9) == run_hashing(b, 0.3, 9)
    assert sample_ensemble(src, 100, trial_seed(7, 4, 0)) != a


def test_sampling_frequencies():
    src = BellDiagonal((0.7, 0.1, 0.15, 0.05))
    ens = sample_ensemble(src, 20000, 1)
    freq = np.bincount(ens.symbols(), minlength=4) / 20000
    np.testing.assert_allclose(freq, src.p, atol=0.015)


def test_perfect_source_always_succeeds():
    ens = sample_ensemble(BellDiagonal.perfect(), 8, 0)
    assert ens.bits == 0
    assert run_hashing(ens, 0.3, 0).success


def test_rounds_limit():
    with pytest.raises(RoundsExceedError):
        hashing_rounds(10, 1.9, 0.2)
    with pytest.raises(ValueError):
        ErrorEnsemble(1 << 10, 4, BellDiagonal.perfect())


@settings(max_examples=100, deadline=None)
@given(st.integers(100, 2000), st.data())
def test_wilson_matches_closed_form(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(k, n)
    olo, ohi = oracles.wilson_oracle(k, n)
    assert lo == pytest.approx(max(0.0, olo), abs=1e-9)
    assert hi == pytest.approx(min(1.0, ohi), abs=1e-9)


def test_informative_exhaustive_bound_dominates():
    # a fixed large slack brings p1 + p2 below one at n = 12
    (rep,) = validate_bound(0.95, [12], DeltaSchedule.fixed(0.8), trials=300, seed=2, mode="exhaustive")
    assert rep.bound_informative
    assert not rep.approximate
    assert rep.dominated and rep.strictly_dominated


def test_validate_rejects_few_trials():
    with pytest.raises(ValueError):
        validate_bound(0.9, [8], DeltaSchedule.power(0.25), trials=10)


def test_chain_consistent_with_bound():
    rep = simulate_chain(0.95, 3, 100, 0.35, NoiseParams(0.99), trials=150, seed=4)
    assert rep.consistent
    assert 0.0 <= rep.empirical_fidelity <= 0.985075 + 1e-12
    assert rep.fidelity_ci[0] <= rep.empirical_fidelity <= rep.fidelity_ci[1]
