"""Figure-level metrics and the (alpha x depth) experiment grid."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Sequence

from atomsim.errors import DomainError
from atomsim.simcore import (
    Mode,
    SimConfig,
    SimResult,
    arrival_cycles,
    simulate_blocking,
    simulate_nonblocking,
    trace_digest,
)
from atomsim.trace import Trace, apply_alpha

SWEEP_FIELDS = (
    "alpha",
    "depth",
    "hazard_rate_time",
    "hazard_rate_packets",
    "relative_throughput",
    "absolute_throughput_gbps",
    "duration_nonblocking",
    "duration_blocking",
)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    depth: int
    hazard_rate_time: float
    hazard_rate_packets: float
    relative_throughput: float
    absolute_throughput_gbps: float
    duration_nonblocking: int
    duration_blocking: int


def relative_throughput(nb: SimResult, blk: SimResult) -> float:
    """Completion-time ratio of the unlocked run to the locked run (<= 1)."""
    if nb.mode is not Mode.NONBLOCKING or blk.mode is not Mode.BLOCKING:
        raise DomainError("expected one non-blocking and one blocking result")
    if nb.trace_digest != blk.trace_digest or nb.packet_count != blk.packet_count:
        raise DomainError("results come from different traces")
    if nb.depth != blk.depth:
        raise DomainError(f"depth mismatch: {nb.depth} vs {blk.depth}")
    return nb.duration_cycles / blk.duration_cycles


def absolute_throughput_gbps(result: SimResult, config: SimConfig) -> float:
    if result.duration_cycles <= 0:
        raise DomainError("duration must be positive")
    return result.total_bits * config.clock_hz / result.duration_cycles / 1e9


def run_sweep(trace: Trace, alphas: Sequence[float], depths: Sequence[int],
              config: SimConfig | None = None) -> list[SweepRow]:
    """One row per (alpha, depth), alpha outer.

    ``absolute_throughput_gbps`` is that of the blocking run; the non-blocking
    run always carries the offered load.
    """
    config = config or SimConfig()
    if len(trace) == 0:
        raise DomainError("cannot sweep an empty trace")
    for d in depths:
        if int(d) != d or d < 1:
            raise DomainError(f"depths must be integers >= 1, got {d}")
    rows = []
    for alpha in alphas:
        scaled = apply_alpha(trace, alpha, config.min_packet_bytes)
        arrivals = arrival_cycles(scaled, config)
        digest = trace_digest(scaled)
        for depth in depths:
            nb = simulate_nonblocking(
                scaled, replace(config, depth=int(depth), mode=Mode.NONBLOCKING),
                arrivals=arrivals, digest=digest,
            )
            blk_config = replace(config, depth=int(depth), mode=Mode.BLOCKING)
            blk = simulate_blocking(scaled, blk_config, arrivals=arrivals, digest=digest)
            rows.append(SweepRow(
                alpha=float(alpha),
                depth=int(depth),
                hazard_rate_time=nb.hazard_rate_time,
                hazard_rate_packets=nb.hazard_rate_packets,
                relative_throughput=relative_throughput(nb, blk),
                absolute_throughput_gbps=absolute_throughput_gbps(blk, blk_config),
                duration_nonblocking=nb.duration_cycles,
                duration_blocking=blk.duration_cycles,
            ))
    return rows


def _fmt(value):
    if isinstance(value, int):
        return str(value)
    return f"{value:.6f}"


def format_sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(SWEEP_FIELDS)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, f)) for f in SWEEP_FIELDS))
    return "\n".join(lines) + "\n"


def format_sweep_json(rows: Sequence[SweepRow]) -> str:
    # Same six-digit rounding as the CSV so both forms carry identical values.
    out = []
    for row in rows:
        obj = {}
        for name in SWEEP_FIELDS:
            value = getattr(row, name)
            obj[name] = value if isinstance(value, int) else round(value, 6)
        out.append(obj)
    return json.dumps(out, indent=2) + "\n"


def parse_sweep_csv(text: str) -> list[dict]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != ",".join(SWEEP_FIELDS):
        raise DomainError("not a sweep table")
    return [dict(zip(SWEEP_FIELDS, line.split(","))) for line in lines[1:]]

