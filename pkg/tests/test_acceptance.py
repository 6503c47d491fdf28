"""Exit criteria. Each test carries one criterion and prints PASS/FAIL in the
terminal summary (``pytest tests/test_acceptance.py``)."""

import time

import numpy as np
import pytest

from atomsim import (
    DomainError,
    Mode,
    PcapFormatError,
    SimConfig,
    Trace,
    TruncatedPcapError,
    absolute_throughput_gbps,
    apply_alpha,
    oracle_simulate,
    parse_pcap_lengths,
    read_cycles,
    relative_throughput,
    run_sweep,
    simulate,
)
from atomsim.analysis import format_sweep_csv
from atomsim.trace import BIMODAL_CDF, synth_trace

from conftest import pcap_bytes

NB, BLK = Mode.NONBLOCKING, Mode.BLOCKING


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def run_pair(trace, depth):
    nb = simulate(trace, SimConfig(depth=depth, mode=NB))
    blk = simulate(trace, SimConfig(depth=depth, mode=BLK))
    return nb, blk


def closed_form_hazards(trace, depth, chunk=80):
    sizes = trace.sizes[1:]
    return int(np.count_nonzero(sizes <= chunk * (depth - 1)))


def random_cases(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 501))
        yield Trace(rng.integers(64, 1519, size=n)), int(rng.integers(1, 33))


@criterion(1, "fast simulation equals per-cycle oracle on 1000 random cases, both modes, < 30 s")
def test_oracle_equivalence():
    # Compile outside the timed window.
    oracle_simulate(Trace([64]), SimConfig(depth=2, mode=BLK))
    start = time.perf_counter()
    checked = 0
    for trace, depth in random_cases(1000, seed=20240101):
        for mode in (NB, BLK):
            config = SimConfig(depth=depth, mode=mode)
            fast, slow = simulate(trace, config), oracle_simulate(trace, config)
            assert fast.hazard_count == slow.hazard_count
            assert np.array_equal(fast.entry_cycles, slow.entry_cycles)
            assert fast.duration_cycles == slow.duration_cycles
            assert fast == slow
            checked += 1
    elapsed = time.perf_counter() - start
    assert checked == 2000
    assert elapsed < 30.0, f"{elapsed:.1f} s"


@criterion(2, "all-64B trace, N=1e4, D=2: hazard_count = N-1, rate = (N-1)/(N+2) >= 0.99")
def test_worst_case_regime():
    n = 10**4
    r = simulate(Trace([64] * n), SimConfig(depth=2, mode=NB))
    assert r.hazard_count == n - 1
    assert r.duration_cycles == n + 2
    assert r.hazard_rate_time == (n - 1) / (n + 2)
    assert r.hazard_rate_time >= 0.99


@criterion(3, "D=1: zero hazards and relative throughput exactly 1.0 on any trace")
def test_baseline_regime():
    traces = [t for t, _ in random_cases(200, seed=3)]
    traces += [Trace([64] * 1000), Trace([1500] * 50), Trace([1]), Trace([9216, 64, 1, 80, 81])]
    for trace in traces:
        nb, blk = run_pair(trace, 1)
        assert nb.hazard_count == 0
        assert relative_throughput(nb, blk) == 1.0


@criterion(4, "read_cycles(64, 80) = 1 and read_cycles(1500, 80) = 19")
def test_read_latency_anchors():
    assert read_cycles(64, 80) == 1
    assert read_cycles(1500, 80) == 19


@criterion(5, "hazard_count = #{i>=2 : size_i <= 80(D-1)} on every run, both simulators")
def test_hazard_closed_form():
    cases = list(random_cases(500, seed=55))
    cases += [(Trace([64] * 300), d) for d in (1, 2, 5)]
    cases += [(Trace([1500, 1500]), d) for d in (18, 19, 20, 21)]
    cases += [(Trace([80, 81, 160, 161, 1440, 1441]), d) for d in range(1, 22)]
    for trace, depth in cases:
        config = SimConfig(depth=depth, mode=NB)
        expected = closed_form_hazards(trace, depth)
        assert simulate(trace, config).hazard_count == expected
        assert oracle_simulate(trace, config).hazard_count == expected


@criterion(6, "all-64B, N=1e4, D in {2,4,8}: rel. throughput 1/D +-0.001, abs. 512/D Gb/s +-1%")
def test_locking_throughput_closed_form():
    trace = Trace([64] * 10**4)
    for depth in (2, 4, 8):
        nb, blk = run_pair(trace, depth)
        assert abs(relative_throughput(nb, blk) - 1 / depth) <= 0.001
        gbps = absolute_throughput_gbps(blk, SimConfig(depth=depth, mode=BLK))
        assert abs(gbps - 512 / depth) <= 0.01 * 512 / depth


@criterion(7, "no-loss regime: rel. throughput 1.0 whenever no hazards; bimodal D=19 rate 0.05 +-0.005")
def test_no_loss_regime():
    n = 10**5
    bimodal = synth_trace(list(BIMODAL_CDF), n, seed=2015)
    jumbo = Trace([1500] * 1000)
    min_read = int(read_cycles(jumbo.sizes[1:], 80).min())
    assert min_read == 19
    for depth in range(1, min_read + 1):
        nb, blk = run_pair(jumbo, depth)
        assert nb.hazard_count == 0
        assert relative_throughput(nb, blk) == 1.0
        nb, blk = run_pair(bimodal, depth)
        if nb.hazard_count == 0:
            assert relative_throughput(nb, blk) == 1.0
    nb = simulate(bimodal, SimConfig(depth=19, mode=NB))
    assert abs(nb.hazard_rate_time - 0.05) <= 0.005


@criterion(8, "monotonicity suite on 100 random traces: zero violations")
def test_monotonicity_suite():
    rng = np.random.default_rng(8)
    alphas = [0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0]
    depths = list(range(1, 33))
    violations = {"hazard_vs_depth": 0, "rel_vs_depth": 0, "rel_vs_alpha": 0,
                  "locking_ge": 0, "zero_hazards_but_slower": 0,
                  "equal_durations_despite_hazards": 0}
    for _ in range(100):
        base = Trace(rng.integers(64, 1519, size=int(rng.integers(2, 501))))
        grid = {}
        for alpha in alphas:
            scaled = apply_alpha(base, alpha)
            for depth in depths:
                nb, blk = run_pair(scaled, depth)
                grid[alpha, depth] = (nb.hazard_count, relative_throughput(nb, blk))
                if blk.duration_cycles < nb.duration_cycles:
                    violations["locking_ge"] += 1
                equal = blk.duration_cycles == nb.duration_cycles
                if nb.hazard_count == 0 and not equal:
                    violations["zero_hazards_but_slower"] += 1
                if nb.hazard_count > 0 and equal:
                    violations["equal_durations_despite_hazards"] += 1
        for alpha in alphas:
            for d1, d2 in zip(depths, depths[1:]):
                if grid[alpha, d2][0] < grid[alpha, d1][0]:
                    violations["hazard_vs_depth"] += 1
                if grid[alpha, d2][1] > grid[alpha, d1][1]:
                    violations["rel_vs_depth"] += 1
        for depth in depths:
            for a1, a2 in zip(alphas, alphas[1:]):
                if grid[a2, depth][1] < grid[a1, depth][1]:
                    violations["rel_vs_alpha"] += 1
    print(violations)
    assert violations == dict.fromkeys(violations, 0), violations


@criterion(9, "pcap fixtures: normal, swapped, nanosecond, incl_len != orig_len, truncated")
def test_ingestion_fidelity():
    assert list(parse_pcap_lengths(pcap_bytes([(60, 1500)]))) == [1500]
    assert list(parse_pcap_lengths(pcap_bytes([(64, 64), (64, 64)], order=">"))) == [64, 64]
    for order in "<>":
        ns = pcap_bytes([(54, 1514), (60, 60)], magic=0xA1B23C4D, order=order)
        assert list(parse_pcap_lengths(ns)) == [1514, 60]
    snapped = pcap_bytes([(96, 9000), (40, 576), (0, 64)])
    assert list(parse_pcap_lengths(snapped)) == [9000, 576, 64]

    with pytest.raises(PcapFormatError):
        parse_pcap_lengths(b"\x00" * 24)
    with pytest.raises(TruncatedPcapError) as exc:
        parse_pcap_lengths(pcap_bytes([])[:24] + b"\x00" * 7)
    assert exc.value.record_index == 1
    with pytest.raises(TruncatedPcapError) as exc:
        parse_pcap_lengths(pcap_bytes([(60, 60), (60, 60), (60, 60)])[:-30])
    assert exc.value.record_index == 3
    with pytest.raises(DomainError):
        parse_pcap_lengths(pcap_bytes([(0, 0)]))


@criterion(10, "sweep 3 alphas x 19 depths x 2 modes on 1e6 packets < 60 s, byte-identical reruns")
def test_performance_envelope():
    trace = synth_trace(list(BIMODAL_CDF), 10**6, seed=10)
    run_sweep(Trace([64, 1500]), [1], [2])  # warm the kernels
    outputs = []
    for _ in range(2):
        start = time.perf_counter()
        rows = run_sweep(trace, [0, 0.2, 1], range(1, 20))
        elapsed = time.perf_counter() - start
        assert len(rows) == 57
        assert elapsed < 60.0, f"{elapsed:.1f} s"
        outputs.append(format_sweep_csv(rows).encode())
    assert outputs[0] == outputs[1]
