"""Store-and-forward reader feeding a D-stage stateful action pipeline.

Timing model, in clock cycles:

* the reader pulls ``chunk_bytes`` per cycle with no gaps between packets,
  so packet ``i`` occupies reader cycles ``[a[i-1], a[i] - 1]`` where ``a``
  is the running sum of per-packet read cycles (``a[0] = 0``);
* its header reaches the action pipeline at cycle ``a[i]``;
* an admitted packet occupies the pipeline for ``depth`` cycles.

Non-blocking mode admits every header on arrival and counts a hazard when
the predecessor is still inside. Blocking mode holds headers in an unbounded
FIFO until the pipeline is empty.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

import numpy as np

from atomsim import kernels
from atomsim.errors import DomainError
from atomsim.trace import MIN_PACKET_BYTES, Trace


class Mode(str, enum.Enum):
    NONBLOCKING = "nonblocking"
    BLOCKING = "blocking"


@dataclass(frozen=True)
class SimConfig:
    chunk_bytes: int = 80
    depth: int = 1
    mode: Mode = Mode.NONBLOCKING
    clock_hz: int = 1_000_000_000
    min_packet_bytes: int = MIN_PACKET_BYTES

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("chunk_bytes", "depth", "clock_hz", "min_packet_bytes"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise DomainError(f"{name} must be >= 1, got {value}")

    @property
    def line_rate_bps(self) -> int:
        return self.chunk_bytes * 8 * self.clock_hz


@dataclass(frozen=True, eq=False)
class SimResult:
    packet_count: int
    total_bits: int
    hazard_count: int
    duration_cycles: int
    entry_cycles_last: int
    mode: Mode
    depth: int
    alpha: float | None
    trace_digest: str
    entry_cycles: np.ndarray

    @property
    def hazard_rate_time(self) -> float:
        return self.hazard_count / self.duration_cycles

    @property
    def hazard_rate_packets(self) -> float:
        return self.hazard_count / self.packet_count

    def __eq__(self, other):
        if not isinstance(other, SimResult):
            return NotImplemented
        return self.summary() == other.summary() and np.array_equal(
            self.entry_cycles, other.entry_cycles
        )

    def summary(self) -> dict:
        """JSON-ready fields; per-packet entry cycles are left out."""
        return {
            "mode": self.mode.value,
            "depth": self.depth,
            "alpha": self.alpha,
            "packet_count": self.packet_count,
            "total_bits": self.total_bits,
            "hazard_count": self.hazard_count,
            "duration_cycles": self.duration_cycles,
            "entry_cycles_last": self.entry_cycles_last,
            "hazard_rate_time": self.hazard_rate_time,
            "hazard_rate_packets": self.hazard_rate_packets,
            "trace_digest": self.trace_digest,
        }


def read_cycles(size, chunk_bytes=80):
    """Cycles needed to pull a packet off the wire: ``ceil(size / chunk)``.

    Accepts a scalar or an integer array.
    """
    if chunk_bytes < 1:
        raise DomainError(f"chunk_bytes must be >= 1, got {chunk_bytes}")
    if np.ndim(size) == 0:
        if size < 1:
            raise DomainError(f"size must be >= 1, got {size}")
        return -(-int(size) // int(chunk_bytes))
    size = np.asarray(size, dtype=np.int64)
    if size.size and size.min() < 1:
        raise DomainError("sizes must be >= 1")
    return -(-size // chunk_bytes)


def _require_nonempty(trace: Trace):
    if len(trace) == 0:
        raise DomainError("cannot simulate an empty trace")


def arrival_cycles(trace: Trace, config: SimConfig) -> np.ndarray:
    _require_nonempty(trace)
    return np.cumsum(read_cycles(trace.sizes, config.chunk_bytes))


def trace_digest(trace: Trace) -> str:
    return hashlib.blake2b(trace.sizes.tobytes(), digest_size=16).hexdigest()


def _check_mode(config: SimConfig, expected: Mode):
    if config.mode is not expected:
        raise DomainError(f"config.mode is {config.mode.value}, expected {expected.value}")


def _result(trace, config, hazards, entries, digest=None):
    last = int(entries[-1])
    return SimResult(
        packet_count=len(trace),
        total_bits=trace.total_bits,
        hazard_count=int(hazards),
        duration_cycles=last + config.depth,
        entry_cycles_last=last,
        mode=config.mode,
        depth=config.depth,
        alpha=trace.alpha_applied,
        trace_digest=digest or trace_digest(trace),
        entry_cycles=entries,
    )


def simulate_nonblocking(trace: Trace, config: SimConfig, *, arrivals=None, digest=None) -> SimResult:
    """Admit every header on arrival; count entries that find the pipeline busy.

    ``arrivals`` and ``digest`` may be passed in when the caller already has
    them for this trace and chunk size.
    """
    _check_mode(config, Mode.NONBLOCKING)
    if arrivals is None:
        arrivals = arrival_cycles(trace, config)
    # Arrivals are strictly increasing, so the predecessor is the only packet
    # that can still be inside when a header enters.
    hazards = np.count_nonzero(np.diff(arrivals) < config.depth)
    return _result(trace, config, hazards, arrivals, digest)


def simulate_blocking(trace: Trace, config: SimConfig, *, arrivals=None, digest=None) -> SimResult:
    """Single-occupancy locking: ``e[i] = max(a[i], e[i-1] + depth)``."""
    _check_mode(config, Mode.BLOCKING)
    if arrivals is None:
        arrivals = arrival_cycles(trace, config)
    entries = kernels.blocking_entries(arrivals, config.depth)
    return _result(trace, config, 0, entries, digest)


def simulate(trace: Trace, config: SimConfig, **kwargs) -> SimResult:
    if config.mode is Mode.BLOCKING:
        return simulate_blocking(trace, config, **kwargs)
    return simulate_nonblocking(trace, config, **kwargs)


def oracle_simulate(trace: Trace, config: SimConfig) -> SimResult:
    """Cycle-by-cycle reference model for either mode. Slow; for checking."""
    _require_nonempty(trace)
    reads = read_cycles(trace.sizes, config.chunk_bytes)
    entries, hazard_flags, end = kernels.oracle_loop(
        reads, config.depth, config.mode is Mode.BLOCKING
    )
    result = _result(trace, config, hazard_flags.sum(), entries)
    if result.duration_cycles != end:
        raise AssertionError(
            f"oracle drained at cycle {end}, expected {result.duration_cycles}"
        )
    return result
