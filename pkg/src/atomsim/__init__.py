"""Cycle-accurate simulator for multi-cycle stateful actions in an RMT-like switch."""

from atomsim.errors import (
    DomainError,
    ParseError,
    PcapFormatError,
    TruncatedPcapError,
)
from atomsim.trace import (
    CdfPoint,
    PacketRecord,
    Trace,
    apply_alpha,
    empirical_cdf,
    normalize_trace,
    parse_pcap_lengths,
    parse_size_csv,
    scale_packet_size,
    synth_trace,
)
from atomsim.simcore import (
    Mode,
    SimConfig,
    SimResult,
    arrival_cycles,
    oracle_simulate,
    read_cycles,
    simulate,
    simulate_blocking,
    simulate_nonblocking,
)
from atomsim.analysis import (
    SweepRow,
    absolute_throughput_gbps,
    relative_throughput,
    run_sweep,
)

__version__ = "0.1.0"
