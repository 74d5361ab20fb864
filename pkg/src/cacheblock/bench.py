"""Run circuits through the chunk engine and collect transfer reports."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field

from . import chunks, dense
from .chunks import Mode, SpaceConfig
from .circuit import Circuit
from .transpiler import cache_block

ORACLE_MAX_QUBITS = 22

CSV_COLUMNS = (
    "circuit", "n", "depth", "seed", "nc", "spaces", "fast_capacity", "mode",
    "inter_space_sends", "inter_space_bytes", "tier_fetches", "tier_evictions",
    "chunk_swaps_inserted", "sections", "oracle_diff", "wall_ms",
)


@dataclass
class CircuitInfo:
    name: str
    n: int
    depth: int | None = None
    seed: int | None = None


@dataclass
class RunReport:
    circuit: CircuitInfo
    nc: int
    spaces: int
    fast_capacity: int | None
    mode: str
    ledger: dict[str, int]
    breakdown: list[dict] = field(default_factory=list)
    gates_per_section: list[int] = field(default_factory=list)
    chunk_swaps_inserted: int = 0
    sections: int = 0
    final_map: list[int] | None = None
    oracle_diff: float | None = None
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> RunReport:
        data = dict(data)
        data["circuit"] = CircuitInfo(**data["circuit"])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        return cls.from_dict(json.loads(text))

    def csv_row(self) -> dict:
        row = {
            "circuit": self.circuit.name,
            "n": self.circuit.n,
            "depth": self.circuit.depth,
            "seed": self.circuit.seed,
            "nc": self.nc,
            "spaces": self.spaces,
            "fast_capacity": self.fast_capacity,
            "mode": self.mode,
            "chunk_swaps_inserted": self.chunk_swaps_inserted,
            "sections": self.sections,
            "oracle_diff": self.oracle_diff,
            "wall_ms": round(self.wall_ms, 3),
        }
        row.update(self.ledger)
        return {k: ("" if row[k] is None else row[k]) for k in CSV_COLUMNS}


def write_csv(reports, fh, header: bool = True):
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    if header:
        writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())


def csv_text(reports, header: bool = True) -> str:
    buf = io.StringIO()
    write_csv(reports, buf, header)
    return buf.getvalue()


def run(c: Circuit, info: CircuitInfo, nc: int, cfg: SpaceConfig, mode: Mode | str,
        verify: bool = False, restore_order: bool = False) -> RunReport:
    """Execute ``c`` once and report its ledger.

    Blocked mode transpiles first. With ``verify`` the gathered state is
    compared against the dense simulator (after undoing the qubit map).
    """
    mode = Mode(mode)
    start = time.perf_counter()
    state = chunks.partition(c.n_qubits, nc, cfg)
    result = None
    program = c
    if mode is Mode.BLOCKED:
        result = cache_block(c, nc, restore_order=restore_order)
        program = result.circuit
    ledger = chunks.execute(state, program, mode)
    wall_ms = (time.perf_counter() - start) * 1e3

    report = RunReport(
        circuit=info,
        nc=nc,
        spaces=cfg.num_spaces,
        fast_capacity=cfg.fast_capacity,
        mode=mode.value,
        ledger=ledger.totals(),
        breakdown=[asdict(e) for e in ledger.breakdown],
        wall_ms=wall_ms,
    )
    if result is not None:
        report.gates_per_section = list(result.stats.gates_per_section)
        report.chunk_swaps_inserted = result.stats.chunk_swaps_inserted
        report.sections = result.stats.sections
        report.final_map = list(result.final_map.mapping)

    if verify:
        if c.n_qubits > ORACLE_MAX_QUBITS:
            raise ValueError(f"oracle check limited to {ORACLE_MAX_QUBITS} qubits")
        got = chunks.gather(state)
        if result is not None:
            got = dense.permute_qubits(got, result.final_map.mapping)
        report.oracle_diff = dense.max_abs_diff(got, dense.simulate(c))
    return report


def _ratio(a: int, b: int) -> float | None:
    return a / b if b else None


def compare(c: Circuit, info: CircuitInfo, nc: int, cfg: SpaceConfig,
            verify: bool = False, restore_order: bool = False) -> dict:
    """Both modes on the same circuit, side by side, with baseline/blocked ratios."""
    base = run(c, info, nc, cfg, Mode.BASELINE, verify)
    blocked = run(c, info, nc, cfg, Mode.BLOCKED, verify, restore_order)
    tier = lambda r: r.ledger["tier_fetches"] + r.ledger["tier_evictions"]  # noqa: E731
    return {
        "baseline": base.to_dict(),
        "blocked": blocked.to_dict(),
        "ratios": {
            "inter_space_sends": _ratio(base.ledger["inter_space_sends"],
                                        blocked.ledger["inter_space_sends"]),
            "tier_traffic": _ratio(tier(base), tier(blocked)),
        },
    }
