"""Packet-size traces: ingestion, synthesis and the alpha size transform.

A trace keeps only the order and wire size of each packet. Timestamps are
dropped on ingest, which gives the back-to-back (accelerated) replay the
simulator assumes.

Synthetic traces use numpy's ``PCG64`` bit generator seeded through
``numpy.random.default_rng(seed)``; the golden tests pin its output.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from atomsim.errors import DomainError, ParseError, PcapFormatError, TruncatedPcapError

MIN_PACKET_BYTES = 64
MAX_PACKET_BYTES = 9216

SOURCES = ("pcap", "csv", "synthetic", "transformed")


@dataclass(frozen=True)
class PacketRecord:
    size_bytes: int

    def __post_init__(self):
        if self.size_bytes < 1:
            raise DomainError(f"packet size must be >= 1 byte, got {self.size_bytes}")


@dataclass(frozen=True)
class CdfPoint:
    size_bytes: int
    cum_fraction: float


class Trace:
    """Ordered packet sizes plus where they came from.

    Sizes are held in a read-only ``int64`` array; ``records`` materialises
    :class:`PacketRecord` objects on demand.
    """

    __slots__ = ("_sizes", "source", "alpha_applied")

    def __init__(self, sizes, source="csv", alpha_applied=None):
        if source not in SOURCES:
            raise DomainError(f"unknown trace source {source!r}")
        arr = np.array(sizes, dtype=np.int64, copy=True).reshape(-1)
        if arr.size and arr.min() < 1:
            raise DomainError(f"packet size must be >= 1 byte, got {int(arr.min())}")
        arr.flags.writeable = False
        self._sizes = arr
        self.source = source
        self.alpha_applied = alpha_applied

    @classmethod
    def from_records(cls, records: Iterable[PacketRecord], source="csv", alpha_applied=None):
        return cls([r.size_bytes for r in records], source, alpha_applied)

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes

    @property
    def records(self) -> list[PacketRecord]:
        return [PacketRecord(int(s)) for s in self._sizes]

    def __len__(self):
        return int(self._sizes.shape[0])

    def __iter__(self):
        return (int(s) for s in self._sizes)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.source == other.source
            and self.alpha_applied == other.alpha_applied
            and np.array_equal(self._sizes, other._sizes)
        )

    def __hash__(self):
        return hash((self.source, self.alpha_applied, self._sizes.tobytes()))

    def __repr__(self):
        head = ", ".join(str(int(s)) for s in self._sizes[:8])
        if len(self) > 8:
            head += ", ..."
        return f"Trace([{head}], n={len(self)}, source={self.source!r}, alpha={self.alpha_applied})"

    @property
    def total_bits(self) -> int:
        return int(self._sizes.sum()) * 8


# --- CSV ---------------------------------------------------------------------


def parse_size_csv(text) -> Trace:
    """Parse ``size[,timestamp_ns]`` lines. ``#`` starts a comment line."""
    if isinstance(text, (bytes, bytearray, memoryview)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    sizes = []
    for lineno, raw in enumerate(io.StringIO(text, newline=None), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) > 2:
            raise ParseError(f"expected 'size[,timestamp_ns]', got {line!r}", lineno)
        try:
            values = [int(f, 10) for f in fields]
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if values[0] < 1:
            raise DomainError(f"line {lineno}: packet size must be >= 1, got {values[0]}")
        sizes.append(values[0])
    return Trace(sizes, source="csv")


def format_size_csv(trace: Trace) -> str:
    return "".join(f"{int(s)}\n" for s in trace.sizes)


# --- pcap --------------------------------------------------------------------

_GLOBAL_HEADER = 24
_RECORD_HEADER = 16

# First four file bytes -> (struct byte order, nanosecond timestamps)
_MAGICS = {
    b"\xa1\xb2\xc3\xd4": (">", False),
    b"\xd4\xc3\xb2\xa1": ("<", False),
    b"\xa1\xb2\x3c\x4d": (">", True),
    b"\x4d\x3c\xb2\xa1": ("<", True),
}


@dataclass(frozen=True)
class PcapHeader:
    byte_order: str
    nanosecond: bool
    version_major: int
    version_minor: int
    snaplen: int
    linktype: int


def read_pcap_header(data: bytes) -> PcapHeader:
    if len(data) < 4 or bytes(data[:4]) not in _MAGICS:
        raise PcapFormatError(f"bad pcap magic {bytes(data[:4]).hex() or '<empty>'}")
    if len(data) < _GLOBAL_HEADER:
        raise PcapFormatError(f"global header truncated at {len(data)} of 24 bytes")
    order, nano = _MAGICS[bytes(data[:4])]
    major, minor, _zone, _sigfigs, snaplen, linktype = struct.unpack_from(order + "HHiIII", data, 4)
    return PcapHeader(order, nano, major, minor, snaplen, linktype)


def parse_pcap_lengths(data) -> Trace:
    """Wire sizes (``orig_len``) of every record in a classic libpcap capture."""
    data = memoryview(data).cast("B")
    header = read_pcap_header(data)
    rec = struct.Struct(header.byte_order + "IIII")
    total = len(data)
    pos = _GLOBAL_HEADER
    sizes = []
    index = 0
    while pos < total:
        index += 1
        if pos + _RECORD_HEADER > total:
            raise TruncatedPcapError(
                f"record header truncated ({total - pos} of 16 bytes)", index
            )
        _sec, _subsec, incl_len, orig_len = rec.unpack_from(data, pos)
        pos += _RECORD_HEADER
        if pos + incl_len > total:
            raise TruncatedPcapError(
                f"payload truncated ({total - pos} of {incl_len} bytes)", index
            )
        if orig_len == 0:
            raise DomainError(f"record {index}: orig_len is 0")
        sizes.append(orig_len)
        pos += incl_len
    return Trace(sizes, source="pcap")


def build_pcap(records: Sequence[tuple[int, int]], byte_order="<", nanosecond=False,
               linktype=1, snaplen=65535) -> bytes:
    """Serialise ``(incl_len, orig_len)`` pairs as a capture with zeroed payloads."""
    magic = 0xA1B23C4D if nanosecond else 0xA1B2C3D4
    out = [struct.pack(byte_order + "IHHiIII", magic, 2, 4, 0, 0, snaplen, linktype)]
    for i, (incl, orig) in enumerate(records):
        out.append(struct.pack(byte_order + "IIII", i, 0, incl, orig))
        out.append(bytes(incl))
    return b"".join(out)


# --- alpha transform ---------------------------------------------------------


def _as_fraction(alpha) -> Fraction:
    # Decimal literals like 0.29 are taken at face value, not as the nearest
    # binary double, so floor(alpha * span) matches hand arithmetic.
    if isinstance(alpha, Fraction):
        frac = alpha
    elif isinstance(alpha, (int, np.integer)):
        frac = Fraction(int(alpha))
    else:
        a = float(alpha)
        if a != a:
            raise DomainError("alpha is NaN")
        frac = Fraction(repr(a))
    if frac < 0 or frac > 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return frac


def scale_packet_size(size: int, alpha, min_size: int = MIN_PACKET_BYTES) -> int:
    """Shrink ``size`` toward ``min_size``: ``min + floor(alpha * (size - min))``."""
    frac = _as_fraction(alpha)
    if size < min_size:
        raise DomainError(f"size {size} is below the minimum packet size {min_size}")
    return min_size + (frac.numerator * (size - min_size)) // frac.denominator


def apply_alpha(trace: Trace, alpha, min_size: int = MIN_PACKET_BYTES) -> Trace:
    if len(trace) == 0:
        raise DomainError("cannot transform an empty trace")
    frac = _as_fraction(alpha)
    sizes = trace.sizes
    if sizes.min() < min_size:
        bad = int(np.argmax(sizes < min_size))
        raise DomainError(
            f"record {bad + 1}: size {int(sizes[bad])} is below the minimum packet size {min_size}"
        )
    span = sizes - min_size
    if frac.denominator == 1:
        scaled = min_size + span * frac.numerator
    elif frac.denominator < 2**62 and frac.numerator * max(int(span.max()), 1) < 2**62:
        scaled = min_size + (span * frac.numerator) // frac.denominator
    else:
        scaled = np.array(
            [min_size + (frac.numerator * int(s)) // frac.denominator for s in span],
            dtype=np.int64,
        )
    return Trace(scaled, source="transformed", alpha_applied=float(alpha))


def normalize_trace(trace: Trace, min_size: int = MIN_PACKET_BYTES,
                    max_size: int = MAX_PACKET_BYTES) -> Trace:
    """Clamp every size into ``[min_size, max_size]``.

    Real captures carry runts (e.g. 60-byte frames recorded without FCS) and
    the occasional oversized frame; the switch never sees either.
    """
    if min_size < 1 or max_size < min_size:
        raise DomainError(f"invalid size bounds [{min_size}, {max_size}]")
    clipped = np.clip(trace.sizes, min_size, max_size)
    if np.array_equal(clipped, trace.sizes):
        return trace
    return Trace(clipped, source=trace.source, alpha_applied=trace.alpha_applied)


# --- CDFs --------------------------------------------------------------------


def empirical_cdf(trace: Trace) -> list[CdfPoint]:
    if len(trace) == 0:
        raise DomainError("empirical CDF of an empty trace")
    values, counts = np.unique(trace.sizes, return_counts=True)
    cum = np.cumsum(counts)
    total = int(cum[-1])
    return [CdfPoint(int(v), int(c) / total) for v, c in zip(values, cum)]


def validate_cdf(cdf: Sequence[CdfPoint]) -> None:
    if not cdf:
        raise DomainError("CDF has no points")
    prev_size, prev_frac = 0, 0.0
    for i, p in enumerate(cdf):
        if p.size_bytes < 1:
            raise DomainError(f"CDF point {i}: size must be >= 1, got {p.size_bytes}")
        if not (0.0 < p.cum_fraction <= 1.0):
            raise DomainError(f"CDF point {i}: cum_fraction {p.cum_fraction} outside (0, 1]")
        if i and p.size_bytes <= prev_size:
            raise DomainError(f"CDF point {i}: sizes must be strictly increasing")
        if i and p.cum_fraction <= prev_frac:
            raise DomainError(f"CDF point {i}: cum_fraction must be strictly increasing")
        prev_size, prev_frac = p.size_bytes, p.cum_fraction
    if cdf[-1].cum_fraction != 1.0:
        raise DomainError(f"last cum_fraction must be exactly 1, got {cdf[-1].cum_fraction}")


def synth_trace(cdf: Sequence[CdfPoint], n: int, seed: int) -> Trace:
    """Draw ``n`` sizes by inverse-CDF sampling.

    Each draw takes ``u`` uniform on (0, 1] and emits the smallest size whose
    cumulative fraction reaches ``u``.
    """
    validate_cdf(cdf)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)
    fracs = np.array([p.cum_fraction for p in cdf], dtype=np.float64)
    sizes = np.array([p.size_bytes for p in cdf], dtype=np.int64)
    idx = np.searchsorted(fracs, u, side="left")
    return Trace(sizes[idx], source="synthetic")


def format_cdf_csv(cdf: Sequence[CdfPoint]) -> str:
    # repr() round-trips floats exactly, so a re-read CDF still ends at 1.0.
    lines = ["size_bytes,cum_fraction"]
    lines += [f"{p.size_bytes},{p.cum_fraction!r}" for p in cdf]
    return "\n".join(lines) + "\n"


def parse_cdf_csv(text: str) -> list[CdfPoint]:
    points = []
    for lineno, raw in enumerate(io.StringIO(text, newline=None), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if lineno == 1 and line.replace(" ", "") == "size_bytes,cum_fraction":
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError(f"expected 'size_bytes,cum_fraction', got {line!r}", lineno)
        try:
            points.append(CdfPoint(int(parts[0]), float(parts[1])))
        except ValueError:
            raise ParseError(f"bad number in {line!r}", lineno) from None
    validate_cdf(points)
    return points


BIMODAL_CDF = (CdfPoint(64, 0.5), CdfPoint(1500, 1.0))
