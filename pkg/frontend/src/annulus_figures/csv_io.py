"""Readers for the annulus CLI's CSV files.

Files start with ``# key=value`` comment lines, then one or more blocks
separated by blank lines; each block is a header row plus data rows.
Column sets are validated against the expected schema exactly.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    """Input CSV does not match the expected column schema."""


@dataclass(frozen=True)
class Block:
    header: tuple[str, ...]
    rows: tuple[dict[str, str], ...]

    def column(self, name: str) -> list[str]:
        return [row[name] for row in self.rows]

    def floats(self, name: str) -> list[float]:
        return [float(row[name]) for row in self.rows if row[name] != ""]


def read_blocks(path: str | Path) -> list[Block]:
    lines = Path(path).read_text().splitlines()
    content = [l for l in lines if not l.startswith("#")]
    blocks: list[Block] = []
    chunk: list[str] = []
    for line in content + [""]:
        if line.strip() == "":
            if chunk:
                parsed = list(csv.reader(chunk))
                header = tuple(parsed[0])
                rows = tuple(
                    dict(zip(header, row)) for row in parsed[1:]
                )
                blocks.append(Block(header=header, rows=rows))
                chunk = []
        else:
            chunk.append(line)
    if not blocks:
        raise SchemaError(f"{path}: no CSV content found")
    return blocks


SIM_HEADER = (
    "circuit", "n", "L", "K", "policy", "fasty",
    "t_total", "n_t", "cpi_t", "rho_route", "wallclock_s",
)
SWEEP_HEADER = ("param", "value", "circuit", "metric", "metric_value")
MULTI_HEADER = ("workload", "q", "b0", "by", "t_alone", "t_conc", "slowdown")
MULTI_AGG_HEADER = ("mean_slowdown", "efficiency", "jain")


def expect(block: Block, header: tuple[str, ...], path) -> Block:
    if block.header != header:
        raise SchemaError(
            f"{path}: expected columns {','.join(header)}, "
            f"got {','.join(block.header)}"
        )
    if not block.rows:
        raise SchemaError(f"{path}: block has no data rows")
    return block


def read_sim(path: str | Path) -> Block:
    return expect(read_blocks(path)[0], SIM_HEADER, path)


def read_sweep(path: str | Path) -> Block:
    return expect(read_blocks(path)[0], SWEEP_HEADER, path)


def read_multi(path: str | Path) -> tuple[Block, Block]:
    blocks = read_blocks(path)
    if len(blocks) < 2:
        raise SchemaError(f"{path}: expected workload and aggregate blocks")
    return (
        expect(blocks[0], MULTI_HEADER, path),
        expect(blocks[1], MULTI_AGG_HEADER, path),
    )


def density_class(circuit_name: str) -> str:
    """Class tag from generated circuit names (synth-<class>-...)."""
    parts = circuit_name.split("-")
    if len(parts) >= 2 and parts[0] == "synth" and parts[1] in (
        "low", "medium", "high",
    ):
        return parts[1]
    return "other"
