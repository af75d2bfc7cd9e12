"""PER-table ingestion, theory/simulation sweeps and order studies.

The measured input is a CSV table of per-device packet error rates keyed
by SNR and scheme; SNR is an opaque row key (no SNR-to-PER model is
bundled).  A sweep turns each (snr, scheme) key into a theory row and, if
requested, a simulation row whose seed is derived from the master seed
and the row key, so extending the table never perturbs existing rows.
"""

from __future__ import annotations

import csv
import hashlib
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import avg_aoc_ms
from .domain import PerVector, SchemeKind, TimingModel
from .sim import SimConfig, simulate_ms

__all__ = [
    "MODES",
    "PerTable",
    "SweepRow",
    "load_per_table",
    "single_point_table",
    "run_sweep",
    "run_order_study",
    "default_order_patterns",
    "emit_rows",
]

MODES = ("theory", "simulation")

_HEADER = ("snr_db", "scheme", "device_id", "per")
_OUT_HEADER = ("snr_db", "scheme", "mode", "avg_aoc_ms", "ci_halfwidth_ms", "seed")
_SEED_MASK = 2 ** 64 - 1


@dataclass(frozen=True)
class PerTable:
    """Validated packet-error-rate rows (snr_db, scheme, device_id, per).

    For every (snr_db, scheme) key present, device ids 1..N must each
    appear exactly once; each key then yields one PerVector.
    """

    rows: tuple[tuple[float, SchemeKind, int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        grouped: dict[tuple[float, SchemeKind], dict[int, float]] = {}
        for snr, scheme, device, per in self.rows:
            if not isinstance(scheme, SchemeKind):
                raise ValueError(f"scheme must be a SchemeKind, got {scheme!r}")
            if not isinstance(device, int) or device < 1:
                raise ValueError(f"device_id must be a positive int, got {device!r}")
            devices = grouped.setdefault((float(snr), scheme), {})
            if device in devices:
                raise ValueError(
                    f"duplicate device {device} for ({snr} dB, {scheme.token})"
                )
            devices[device] = float(per)
        vectors: dict[tuple[float, SchemeKind], PerVector] = {}
        for key, devices in grouped.items():
            snr, scheme = key
            n = len(devices)
            if sorted(devices) != list(range(1, n + 1)):
                raise ValueError(
                    f"incomplete device set for ({snr} dB, {scheme.token})"
                )
            vectors[key] = PerVector(tuple(devices[d] for d in range(1, n + 1)))
        object.__setattr__(self, "_vectors", vectors)

    def keys(self) -> list[tuple[float, SchemeKind]]:
        """(snr_db, scheme) keys sorted by SNR then scheme token."""
        return sorted(self._vectors, key=lambda k: (k[0], k[1].token))

    def vector(self, snr_db: float, scheme: SchemeKind) -> PerVector:
        return self._vectors[(float(snr_db), scheme)]


@dataclass(frozen=True)
class SweepRow:
    """One output record of a sweep or order study.

    Theory rows carry ci_halfwidth_ms = 0 and seed = 0.  order is set only
    by order studies (the transmission order the row was computed under).
    """

    snr_db: float
    scheme: SchemeKind
    mode: str
    avg_aoc_ms: float
    ci_halfwidth_ms: float
    seed: int
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (math.isfinite(self.avg_aoc_ms) and self.avg_aoc_ms > 0.0):
            raise ValueError(f"avg_aoc_ms must be > 0, got {self.avg_aoc_ms!r}")
        if math.isnan(self.ci_halfwidth_ms) or self.ci_halfwidth_ms < 0.0:
            raise ValueError(f"ci_halfwidth_ms must be >= 0, got {self.ci_halfwidth_ms!r}")
        if not (0 <= self.seed <= _SEED_MASK):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mode == "theory" and (self.ci_halfwidth_ms != 0.0 or self.seed != 0):
            raise ValueError("theory rows carry ci_halfwidth_ms = 0 and seed = 0")
        if self.order is not None:
            object.__setattr__(self, "order", tuple(int(d) for d in self.order))


def load_per_table(path) -> PerTable:
    """Parse and validate a PER table from CSV.

    Expected header: snr_db,scheme,device_id,per.  Scheme tokens are
    tdma-nr, tdma-r and fdma; the shorthand tdma applies one row to both
    TDMA schemes.  Parse errors name the offending line.
    """
    rows: list[tuple[float, SchemeKind, int, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(s.strip() for s in header) != _HEADER:
            raise ValueError(
                f"bad header in {path}: expected {','.join(_HEADER)}"
            )
        for line, record in enumerate(reader, start=2):
            if not record or all(not s.strip() for s in record):
                continue
            if len(record) != 4:
                raise ValueError(f"expected 4 fields at line {line}")
            snr_s, scheme_s, device_s, per_s = (s.strip() for s in record)
            try:
                snr = float(snr_s)
            except ValueError:
                raise ValueError(f"invalid snr_db {snr_s!r} at line {line}") from None
            if not math.isfinite(snr):
                raise ValueError(f"invalid snr_db {snr_s!r} at line {line}")
            schemes = _parse_scheme_token(scheme_s, line)
            try:
                device = int(device_s)
            except ValueError:
                raise ValueError(
                    f"invalid device_id {device_s!r} at line {line}"
                ) from None
            if device < 1:
                raise ValueError(f"invalid device_id {device_s!r} at line {line}")
            try:
                per = float(per_s)
            except ValueError:
                raise ValueError(f"invalid per {per_s!r} at line {line}") from None
            if not (0.0 <= per < 1.0):
                raise ValueError(f"per out of range [0,1) at line {line}")
            for scheme in schemes:
                rows.append((snr, scheme, device, per))
    return PerTable(tuple(rows))


def _parse_scheme_token(token: str, line: int) -> tuple[SchemeKind, ...]:
    if token == "tdma":
        return (SchemeKind.TDMA_NR, SchemeKind.TDMA_R)
    try:
        return (SchemeKind.from_token(token),)
    except ValueError:
        raise ValueError(f"unknown scheme token {token!r} at line {line}") from None


def single_point_table(
    p: PerVector,
    schemes=tuple(SchemeKind),
    snr_db: float = 0.0,
) -> PerTable:
    """Table with one PerVector shared by the given schemes at one key."""
    rows = [
        (snr_db, scheme, device + 1, per)
        for scheme in schemes
        for device, per in enumerate(p.probs)
    ]
    return PerTable(tuple(rows))


def _derive_seed(master: int, *parts) -> int:
    key = ":".join(str(part) for part in parts).encode("ascii")
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return (master ^ int.from_bytes(digest, "big")) & _SEED_MASK


def _check_master_seed(seed: int) -> None:
    if not isinstance(seed, int) or isinstance(seed, bool) or not (0 <= seed <= _SEED_MASK):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")


def run_sweep(
    table: PerTable,
    timing: TimingModel,
    modes=MODES,
    horizon: int = 100_000,
    seed: int = 0,
) -> list[SweepRow]:
    """Theory and/or simulation rows for every (snr, scheme) key.

    Simulation seeds derive from the master seed and the row key, so rows
    are independent of which other keys the table happens to contain.
    Rows come back sorted by (snr_db, scheme, mode).
    """
    mode_set = set(modes)
    if not mode_set or not mode_set.issubset(MODES):
        raise ValueError(f"modes must be a non-empty subset of {MODES}, got {modes!r}")
    _check_master_seed(seed)
    rows: list[SweepRow] = []
    for snr, scheme in table.keys():
        p = table.vector(snr, scheme)
        if "theory" in mode_set:
            rows.append(SweepRow(
                snr_db=snr,
                scheme=scheme,
                mode="theory",
                avg_aoc_ms=avg_aoc_ms(scheme, p, timing),
                ci_halfwidth_ms=0.0,
                seed=0,
            ))
        if "simulation" in mode_set:
            run_seed = _derive_seed(seed, "sweep", repr(float(snr)), scheme.token)
            result = simulate_ms(SimConfig(scheme, p, horizon, run_seed), timing)
            rows.append(SweepRow(
                snr_db=snr,
                scheme=scheme,
                mode="simulation",
                avg_aoc_ms=result.avg_aoc,
                ci_halfwidth_ms=result.ci_halfwidth,
                seed=run_seed,
            ))
    rows.sort(key=lambda r: (r.snr_db, r.scheme.token, r.mode))
    return rows


def run_order_study(
    p: PerVector,
    orders,
    timing: TimingModel,
    horizon: int = 100_000,
    seed: int = 0,
) -> list[SweepRow]:
    """Theory and simulation rows per transmission order and TDMA scheme.

    Theory rows evaluate the closed forms on the order-permuted PerVector;
    simulation rows pass the order through SimConfig.  FDMA has no order
    (all devices transmit simultaneously) and is omitted.
    """
    _check_master_seed(seed)
    normalized = [tuple(int(d) for d in order) for order in orders]
    if not normalized:
        raise ValueError("order study needs at least one order")
    if len(set(normalized)) != len(normalized):
        raise ValueError("duplicate order in order study")
    rows: list[SweepRow] = []
    for order in normalized:
        permuted = p.permuted(order)
        for scheme in (SchemeKind.TDMA_NR, SchemeKind.TDMA_R):
            rows.append(SweepRow(
                snr_db=0.0,
                scheme=scheme,
                mode="theory",
                avg_aoc_ms=avg_aoc_ms(scheme, permuted, timing),
                ci_halfwidth_ms=0.0,
                seed=0,
                order=order,
            ))
            run_seed = _derive_seed(
                seed, "order", "-".join(map(str, order)), scheme.token
            )
            result = simulate_ms(
                SimConfig(scheme, p, horizon, run_seed, order=order), timing
            )
            rows.append(SweepRow(
                snr_db=0.0,
                scheme=scheme,
                mode="simulation",
                avg_aoc_ms=result.avg_aoc,
                ci_halfwidth_ms=result.ci_halfwidth,
                seed=run_seed,
                order=order,
            ))
    return rows


def default_order_patterns(n: int) -> list[tuple[int, ...]]:
    """Reference transmission orders: index order, last-device-first, and
    a mid-round promotion of the last device (distinct patterns only)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    patterns = [tuple(range(1, n + 1)), (n,) + tuple(range(1, n))]
    if n >= 5:
        patterns.append((1, 2, 3, n) + tuple(range(4, n)))
    unique: list[tuple[int, ...]] = []
    for pattern in patterns:
        if pattern not in unique:
            unique.append(pattern)
    return unique


def _fmt(value: float) -> str:
    if not math.isfinite(value):
        return "inf" if value > 0 else "-inf"
    return np.format_float_positional(
        value, precision=6, unique=False, fractional=False, trim="0"
    )


def emit_rows(rows, dest=None) -> None:
    """Write rows as CSV with 6-significant-digit fixed-decimal values.

    dest may be a path, an open text stream, or None for stdout.  An
    `order` column is appended when any row carries one.  Output is
    newline-terminated and byte-identical for identical rows.
    """
    with_order = any(row.order is not None for row in rows)
    header = _OUT_HEADER + (("order",) if with_order else ())
    lines = [",".join(header)]
    for row in rows:
        fields = [
            _fmt(row.snr_db),
            row.scheme.token,
            row.mode,
            _fmt(row.avg_aoc_ms),
            _fmt(row.ci_halfwidth_ms),
            str(row.seed),
        ]
        if with_order:
            fields.append("-".join(map(str, row.order)) if row.order else "")
        lines.append(",".join(fields))
    text = "\n".join(lines) + "\n"
    if dest is None:
        sys.stdout.write(text)
    elif hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")
