"""One function per CLI command; each returns a ``ResultTable``."""

from __future__ import annotations

import math
from typing import Callable, Dict, List

from .. import __version__
from ..bounds import (
    DeltaSchedule,
    NTooSmallError,
    concatenated_n_to_1,
    fidelity_yield_sweep,
    fit_alpha_beta,
    n_min_search,
    n_to_1_delta,
    n_to_1_infidelity,
    noisy_input_fidelity,
    yield_and_overhead,
    bennett_terms,
)
from ..clifford import HashingCircuit, jamiolkowski_resource, station_resource
from ..mc import simulate_chain, validate_bound
from ..rates import memory_requirement, rate_continuous, rate_single_shot
from ..recurrence import compare_1998, optimize_working_fidelity
from .config import ScenarioConfig
from .table import ResultTable


class ComputationError(RuntimeError):
    """A module failed while running a command."""


def _need(values: List, what: str) -> List:
    if not values:
        raise ComputationError(f"config needs a non-empty sweep.{what}")
    return values


def _schedules(cfg: ScenarioConfig) -> List[DeltaSchedule]:
    specs = cfg.sweep.delta or [cfg.scenario.delta]
    return [s.schedule() for s in specs]


def bounds_sweep(cfg: ScenarioConfig) -> ResultTable:
    t = ResultTable(
        ["schedule", "F_raw", "F_eff", "n", "N_links", "delta", "S", "p1", "p2",
         "F_gp", "F_gp_linear", "F_pair_out", "yield_c", "m"]
    )
    noise = cfg.scenario.noise()
    F_values = _need(cfg.sweep.F_values(), "F")
    n_values = _need(cfg.sweep.n_values(), "n")
    for sched in _schedules(cfg):
        for N in cfg.sweep.N:
            for pt in fidelity_yield_sweep(F_values, n_values, sched, N, noise):
                b = pt.bound
                t.add(sched.label(), pt.F_raw, pt.F_eff, b.n, N, b.delta, b.S, b.p1, b.p2,
                      b.F_gp, b.F_gp_linear, pt.F_pair_out, b.yield_c, b.m)
    return t


def yield_sweep(cfg: ScenarioConfig) -> ResultTable:
    t = ResultTable(["schedule", "F_raw", "F_eff", "n", "delta", "yield_c", "m", "overhead_many", "overhead_single"])
    noise = cfg.scenario.noise()
    for sched in _schedules(cfg):
        for F in _need(cfg.sweep.F_values(), "F"):
            F_eff = noisy_input_fidelity(F, noise)
            S = bennett_terms(F_eff).S
            for n in _need(cfg.sweep.n_values(), "n"):
                d = sched.resolve(n, S)
                many = yield_and_overhead(F_eff, max(d, 0.0), "many", n)
                single = yield_and_overhead(F_eff, max(d, 0.0), "single", n)
                m = math.floor(n * many.c + 1e-9)
                t.add(sched.label(), F, F_eff, n, d, 1.0 - S - 2.0 * d, m, many.overhead, single.overhead)
    return t


def nto1(cfg: ScenarioConfig) -> ResultTable:
    t = ResultTable(["F_in", "n", "delta", "F_prime", "infidelity", "purifies"])
    for F in _need(cfg.sweep.F_values(), "F"):
        for n in _need(cfg.sweep.n_values(), "n"):
            d = n_to_1_delta(F, n)
            try:
                eps = n_to_1_infidelity(F, n)
            except NTooSmallError:
                t.add(F, n, d, None, None, False)
                continue
            t.add(F, n, d, 1.0 - eps, eps, 1.0 - eps >= F)
    return t


def nmin(cfg: ScenarioConfig) -> ResultTable:
    t = ResultTable(["F_in", "N_links", "F_target", "n_min", "F_at_n_min", "fit_estimate", "alpha", "beta", "fit_r2"])
    for F in _need(cfg.sweep.F_values(), "F"):
        fit = fit_alpha_beta(F)
        for N in cfg.sweep.N:
            target = F if cfg.target is None else cfg.target
            res = n_min_search(F, N, target)
            t.add(F, N, target, res.n, res.fidelity, fit.n_estimate(N, target), fit.alpha, fit.beta, fit.r_squared)
    return t


def concat(cfg: ScenarioConfig) -> ResultTable:
    t = ResultTable(["F_in", "scheme", "block_size", "level", "total_pairs", "infidelity", "fidelity", "stalled"])
    levels = cfg.sweep.levels
    for F in _need(cfg.sweep.F_values(), "F"):
        for b in _need(cfg.sweep.block_sizes, "block_sizes"):
            res = concatenated_n_to_1(F, b, levels)
            for lvl, (eps, tot) in enumerate(zip(res.infidelities, res.total_pairs)):
                t.add(F, "concatenated", b, lvl, tot, eps, 1.0 - eps, res.stalled_at is not None)
        # direct n -> 1 on the same resource axis
        for n in cfg.sweep.n_values():
            try:
                eps = n_to_1_infidelity(F, n)
            except NTooSmallError:
                continue
            t.add(F, "direct", n, 1, n, eps, 1.0 - eps, False)
    return t


def rates(cfg: ScenarioConfig) -> ResultTable:
    t = ResultTable(
        ["n", "channels", "mode", "rate_per_channel_Hz", "rate_absolute_Hz", "n_channels", "t0_s", "t_c_s",
         "overhead", "yield_c", "F_eff", "F_out", "success_all_links", "store_intermediate_s",
         "qubits_intermediate", "store_end_s", "qubits_end", "t_c_exceeds_earth_bound"]
    )
    for n in cfg.sweep.n_values() or [cfg.scenario.n]:
        s = cfg.scenario.build(n)
        mi = memory_requirement(s, "intermediate")
        me = memory_requirement(s, "end_station")
        for rep in (rate_continuous(s), rate_single_shot(s)):
            t.add(n, s.channels, rep.mode, rep.rate_per_channel, rep.rate_absolute, rep.n_channels, s.t0_s, rep.t_c,
                  rep.overhead_O, rep.yield_c, rep.F_eff, rep.F_out, rep.success_prob_all_links,
                  mi.storage_time, mi.qubits, me.storage_time, me.qubits, me.exceeds_earth_bound)
    return t


def _link_label(k: int) -> str:
    return f"2^{k}"


def compare(cfg: ScenarioConfig) -> ResultTable:
    noise = cfg.scenario.noise()
    ks = cfg.sweep.link_exponents
    F_values = cfg.sweep.F_values() or [0.95, 0.99]
    if cfg.view == "working_sweep":
        t = ResultTable(["F_in", "links", "F_work", "pairs_M", "pairs_no_retry", "time_t_segment", "rate", "F_out"])
        for F in F_values:
            for k in ks:
                opt = optimize_working_fidelity(F, k, noise)
                for row in opt.sweep:
                    t.add(F, _link_label(k), row.F_work, row.pairs, row.pairs_no_retry, row.time, row.rate, row.F_out)
                t.metadata[f"optimum F={F:g} {_link_label(k)}"] = {"F_work": opt.F_work, "rate": opt.rate}
        return t
    t = ResultTable(["F_in", "quantity"] + [_link_label(k) for k in ks])
    rows = compare_1998(F_values, ks, noise, cfg.scenario.delta.schedule())
    for F in F_values:
        mine = [r for r in rows if r.F_in == F]
        t.add(F, "rate (1998)", *[r.rate_1998 for r in mine])
        t.add(F, "rate (2017)", *[r.rate_2017 for r in mine])
        t.add(F, "F_out (1998)", *[r.F_out_1998 for r in mine])
        t.add(F, "F_out (2017)", *[r.F_out_2017 for r in mine])
        t.metadata[f"F={F:g}"] = {
            "F_work_1998": [r.F_work for r in mine],
            "n_2017": [r.n_2017 for r in mine],
        }
    return t


def mc_validate(cfg: ScenarioConfig) -> ResultTable:
    sched = _schedules(cfg)[0]
    if cfg.view == "chain":
        t = ResultTable(["F_in", "N_links", "n", "delta", "trials", "all_succeeded", "fidelity", "ci_low", "ci_high",
                         "analytic_fidelity", "consistent"])
        noise = cfg.scenario.noise()
        for F in _need(cfg.sweep.F_values(), "F"):
            for n in _need(cfg.sweep.n_values(), "n"):
                F_eff = noisy_input_fidelity(F, noise)
                d = sched.resolve(n, bennett_terms(F_eff).S)
                for N in cfg.sweep.N:
                    r = simulate_chain(F, N, n, d, noise, cfg.trials, cfg.seed, cfg.mode)
                    t.add(F, N, n, d, r.trials, r.all_succeeded, r.empirical_fidelity, r.fidelity_ci[0],
                          r.fidelity_ci[1], r.analytic_fidelity, r.consistent)
        return t
    t = ResultTable(["F_in", "n", "delta", "trials", "failures", "p_fail", "wilson_low", "wilson_high",
                     "analytic_bound", "approximate", "dominated"])
    for F in _need(cfg.sweep.F_values(), "F"):
        for r in validate_bound(F, _need(cfg.sweep.n_values(), "n"), sched, cfg.trials, cfg.seed, cfg.mode):
            t.add(F, r.n, r.delta, r.trials, r.failures, r.empirical_p_fail, r.wilson_ci[0], r.wilson_ci[1],
                  r.analytic_bound, r.approximate, r.dominated)
    return t


def resource_state(cfg: ScenarioConfig) -> ResultTable:
    c = cfg.circuit
    if c is None:
        raise ComputationError("resource-state needs a 'circuit' section")
    if c.rounds is not None:
        circ = HashingCircuit(c.n, tuple((int(m), int(tg)) for m, tg in c.rounds))
    else:
        circ = HashingCircuit.random(c.n, c.random_rounds, cfg.seed if c.seed is None else c.seed)
    if c.station:
        res = station_resource(jamiolkowski_resource(circ, "B"), jamiolkowski_resource(circ, "A"))
        kind = "station"
    else:
        res = jamiolkowski_resource(circ, c.side)
        kind = f"hashing-{c.side}"
    doc = res.to_json()
    t = ResultTable(["resource", "qubit", "label", "local_clifford", "neighbors"])
    for q in range(doc["n_qubits"]):
        nbrs = sorted(b if a == q else a for a, b in doc["edges"] if q in (a, b))
        t.add(kind, q, doc["io_labels"][q], doc["local_cliffords"][q], " ".join(map(str, nbrs)))
    t.metadata["graph"] = doc
    return t


COMMAND_TABLE: Dict[str, Callable[[ScenarioConfig], ResultTable]] = {
    "bounds-sweep": bounds_sweep,
    "yield-sweep": yield_sweep,
    "nto1": nto1,
    "nmin": nmin,
    "concat": concat,
    "rates": rates,
    "compare-1998": compare,
    "mc-validate": mc_validate,
    "resource-state": resource_state,
}


def run(command: str, cfg: ScenarioConfig) -> ResultTable:
    """Run ``command`` and attach metadata; module errors become ``ComputationError``."""
    fn = COMMAND_TABLE.get(command)
    if fn is None:
        raise ComputationError(f"unknown command {command!r}")
    try:
        table = fn(cfg)
    except ComputationError:
        raise
    except (ValueError, ArithmeticError, RuntimeError) as e:
        raise ComputationError(f"{command}: {e}") from e
    extra = dict(table.metadata)
    table.metadata = {
        "command": command,
        "config_sha256": cfg.semantic_hash(),
        "seed": cfg.seed,
        "version": __version__,
        **extra,
    }
    return table

