"""Command-line front end.

Subcommands: ``gen`` (synthetic circuit pools), ``transpile`` (gate lists
to layered circuits), ``sim`` (single-workload latency runs and ring
sweeps), ``multi`` (concurrent workloads under a sharing policy), and
``sweep`` (hyperparameter sweeps in long CSV format). Every output embeds
the hash of its fully resolved run configuration and a sibling
``*.config.json`` carries the configuration itself, so identical
invocations reproduce identical bytes.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import circuit as circ_mod
from . import multiprog as multi_mod
from .errors import AnnulusError, CapacityError
from .fast_y import FastYModel, optimize
from .floorplan import Floorplan, FloorplanConfig, auto_config, build
from .placement import PlacementWeights, greedy_place, random_place, reversed_place
from .scheduler import (
    ExecutionTrace,
    LatencyModel,
    cpi_t,
    rho_route,
    simulate,
    trace_rows,
    wallclock,
)

EXIT_INPUT_ERROR = 2
EXIT_CAPACITY_ERROR = 3

DENSITY_CLASSES = ("low", "medium", "high")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def write_csv(path: Path, header: list[str], rows: list[list], config: dict,
              extra_blocks: list[tuple[list[str], list[list]]] | None = None) -> None:
    """Deterministic CSV with the config hash embedded as a comment line."""
    lines = [f"# run_config_hash={config_hash(config)}"]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    for block_header, block_rows in extra_blocks or []:
        lines.append("")
        lines.append(",".join(block_header))
        lines.extend(",".join(_fmt(v) for v in row) for row in block_rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    sidecar = path.with_suffix(path.suffix + ".config.json")
    sidecar.write_text(json.dumps(config, sort_keys=True, indent=1) + "\n")


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise AnnulusError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise AnnulusError("config file must hold a JSON object")
    return doc


def _merge(section: dict, overrides: dict) -> dict:
    out = dict(section)
    for key, value in overrides.items():
        if value is not None:
            out[key] = value
    return out


def resolve_settings(args) -> dict:
    """File config -> paper defaults -> command-line overrides."""
    file_cfg = _load_config_file(getattr(args, "config", None))
    weights = _merge(
        _merge(asdict(PlacementWeights()), file_cfg.get("weights", {})),
        {
            "alpha_t": getattr(args, "alpha_t", None),
            "alpha_y": getattr(args, "alpha_y", None),
            "lambda_t": getattr(args, "lambda_t", None),
            "lambda_y": getattr(args, "lambda_y", None),
            "lambda_int": getattr(args, "lambda_int", None),
        },
    )
    model = _merge(
        _merge(asdict(LatencyModel()), file_cfg.get("model", {})),
        {
            "movement_mode": getattr(args, "movement", None),
            "lane_pipelining": (
                False if getattr(args, "no_pipelining", False) else None
            ),
            "worst_case_corner": (
                True if getattr(args, "worst_case_corner", False) else None
            ),
        },
    )
    multi = _merge(
        _merge(
            {"eta_t": 1.0, "eta_m": 2.0, "b_y_total": None},
            file_cfg.get("multi", {}),
        ),
        {
            "eta_t": getattr(args, "eta_t", None),
            "eta_m": getattr(args, "eta_m", None),
            "b_y_total": getattr(args, "by_total", None),
        },
    )
    floorplan = _merge(
        _merge(
            {"n": None, "outer_rings": None, "lanes": 4, "code_distance": 11},
            file_cfg.get("floorplan", {}),
        ),
        {
            "n": getattr(args, "n", None),
            "outer_rings": getattr(args, "outer_rings", None),
            "lanes": getattr(args, "lanes", None),
            "code_distance": getattr(args, "code_distance", None),
        },
    )
    return {
        "weights": weights,
        "model": model,
        "multi": multi,
        "floorplan": floorplan,
        "seed": getattr(args, "seed", 0) or 0,
        "fasty": getattr(args, "fasty", "on"),
    }


def _weights(settings: dict) -> PlacementWeights:
    return PlacementWeights(**settings["weights"])


def _model(settings: dict) -> LatencyModel:
    return LatencyModel(**settings["model"])


def _floorplan_for(
    circuits: list,
    settings: dict,
    headroom: bool,
    extra_qubits: int = 0,
    min_ring0: int = 0,
) -> Floorplan:
    fpcfg = settings["floorplan"]
    total_q = sum(c.num_qubits for c in circuits) + extra_qubits
    s_max = sum(circ_mod.totals(c)[1] for c in circuits)
    if fpcfg["n"] is not None:
        config = FloorplanConfig(
            n=fpcfg["n"],
            outer_rings=fpcfg["outer_rings"] or 0,
            lanes=fpcfg["lanes"],
            code_distance=fpcfg["code_distance"],
        )
        fp = build(config)
        if sum(fp.ring_sizes) < total_q:
            raise CapacityError(
                f"{total_q} qubits exceed capacity {sum(fp.ring_sizes)} of the "
                f"requested n={fpcfg['n']} L={fpcfg['outer_rings'] or 0} floorplan"
            )
        return fp
    config = auto_config(
        total_q,
        max(s_max, 1),
        outer_rings=fpcfg["outer_rings"],
        lanes=fpcfg["lanes"],
        code_distance=fpcfg["code_distance"],
        fasty_headroom=headroom,
        min_ring0=min_ring0,
    )
    return build(config)


def _read_circuits(paths: list[str]) -> list:
    out = []
    for path in paths:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise AnnulusError(f"cannot read circuit file {path}: {exc}") from None
        out.append(circ_mod.parse_circuit(text))
    return out


def _sim_one(circuit, fp: Floorplan, settings: dict, placement_policy: str,
             seed: int) -> tuple[ExecutionTrace, object]:
    weights = _weights(settings)
    model = _model(settings)
    if placement_policy == "greedy":
        placement = greedy_place(circuit, fp, weights)
    elif placement_policy == "reversed":
        placement = reversed_place(circuit, fp, weights)
    elif placement_policy == "random":
        placement = random_place(circuit, fp, seed=seed)
    else:
        raise AnnulusError(f"unknown placement policy {placement_policy!r}")
    if settings["fasty"] == "on":
        budget = fp.ring_sizes[0] // 4
        placement = optimize(
            circuit, placement, fp, FastYModel(), budget=budget,
            weights=weights, latency_model=model,
        )
    return simulate(circuit, placement, fp, model), placement


# --- gen ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    settings = resolve_settings(args)
    q_lo, q_hi = _parse_range(args.qubits)
    j_lo, j_hi = _parse_range(args.layers)
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    for cls in classes:
        if cls not in DENSITY_CLASSES:
            raise AnnulusError(f"unknown density class {cls!r}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.PCG64(settings["seed"]))
    entries = []
    for i in range(args.count):
        cls = classes[i % len(classes)]
        params = circ_mod.SynthParams(
            num_qubits=int(rng.integers(q_lo, q_hi + 1)),
            num_layers=int(rng.integers(j_lo, j_hi + 1)),
            density_class=cls,
            multi_qubit_fraction=args.multi_qubit_fraction,
            max_rotation_arity=args.max_arity,
            seed=int(rng.integers(0, 2**63 - 1)),
        )
        circuit = circ_mod.generate(params)
        n_t, s_max = circ_mod.totals(circuit)
        filename = f"circuit_{i:04d}.json"
        (out_dir / filename).write_text(circ_mod.serialize_circuit(circuit))
        entries.append(
            {
                "file": filename,
                "name": circuit.name,
                "density_class": cls,
                "num_qubits": params.num_qubits,
                "num_layers": params.num_layers,
                "seed": params.seed,
                "n_t": n_t,
                "s_max": s_max,
            }
        )
    manifest = {
        "config": {
            "count": args.count,
            "qubits": args.qubits,
            "layers": args.layers,
            "classes": classes,
            "multi_qubit_fraction": args.multi_qubit_fraction,
            "max_rotation_arity": args.max_arity,
            "seed": settings["seed"],
        },
        "circuits": entries,
    }
    manifest["config_hash"] = config_hash(manifest["config"])
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n"
    )
    print(f"wrote {args.count} circuits and manifest to {out_dir}")
    return 0


def _parse_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            value = int(parts[0])
            return value, value
        if len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
            if lo > hi:
                raise ValueError
            return lo, hi
    except ValueError:
        pass
    raise AnnulusError(f"expected LO:HI or N, got {text!r}")


# --- transpile ---------------------------------------------------------------


def cmd_transpile(args) -> int:
    from . import transpiler as trans

    try:
        text = Path(args.gatefile).read_text()
    except OSError as exc:
        raise AnnulusError(f"cannot read gate file: {exc}") from None
    gates = trans.parse_gates(text)
    rotations = trans.to_rotations(gates)
    name = args.name or Path(args.gatefile).stem
    circuit = trans.commute_cliffords(rotations, gates.num_qubits, name=name)
    if args.verify:
        if gates.num_qubits > 4:
            raise AnnulusError("--verify requires at most 4 qubits")
        u_in = trans.oracle_unitary(gates, gates.num_qubits)
        u_out = trans.oracle_unitary(circuit, gates.num_qubits)
        if not trans.equal_up_to_phase(u_in, u_out):
            print("verify: FAIL (transpiled unitary differs)", file=sys.stderr)
            return 1
        print("verify: ok (unitary preserved up to global phase)")
    doc = circ_mod.serialize_circuit(circuit)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(doc)
        print(f"wrote {args.out} (layerizer=greedy-v1)")
    else:
        sys.stdout.write(doc)
    return 0


# --- sim ---------------------------------------------------------------------

SIM_HEADER = [
    "circuit", "n", "L", "K", "policy", "fasty",
    "t_total", "n_t", "cpi_t", "rho_route", "wallclock_s",
]


def cmd_sim(args) -> int:
    settings = resolve_settings(args)
    circuits = _read_circuits(args.circuits)
    weightless = settings["fasty"] != "on"
    if args.or_sweep:
        lo, hi = _parse_range(args.or_sweep)
        ring_counts = list(range(lo, hi + 1))
    else:
        ring_counts = [None]

    rows = []
    for circuit in circuits:
        for ell in ring_counts:
            local = dict(settings)
            if ell is not None:
                local = {**settings, "floorplan": {**settings["floorplan"],
                                                   "n": None, "outer_rings": ell}}
            fp = _floorplan_for([circuit], local, headroom=not weightless)
            trace, _ = _sim_one(
                circuit, fp, local, args.placement, settings["seed"]
            )
            cpi = cpi_t(trace)
            rho = rho_route(trace) if trace.sum_meas > 0 else None
            rows.append([
                circuit.name,
                fp.n,
                fp.config.outer_rings,
                fp.config.lanes,
                args.placement,
                settings["fasty"] == "on",
                trace.t_total,
                trace.n_t,
                cpi,
                rho,
                wallclock(trace, fp.config.code_distance),
            ])
            if args.trace_dir:
                trace_path = Path(args.trace_dir) / (
                    f"{circuit.name}_L{fp.config.outer_rings}.csv"
                )
                write_csv(
                    trace_path,
                    ["j", "t_move", "t_meas"],
                    [list(r) for r in trace_rows(trace)],
                    settings,
                    extra_blocks=[(
                        ["t_total", "tau_msf", "n_t", "cpi_t", "rho_route",
                         "wallclock_s"],
                        [[trace.t_total, trace.tau_msf, trace.n_t, cpi, rho,
                          wallclock(trace, fp.config.code_distance)]],
                    )],
                )
    write_csv(Path(args.out), SIM_HEADER, rows, settings)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


# --- multi -------------------------------------------------------------------

MULTI_HEADER = ["workload", "q", "b0", "by", "t_alone", "t_conc", "slowdown"]
MULTI_AGG_HEADER = ["mean_slowdown", "efficiency", "jain"]


def cmd_multi(args) -> int:
    settings = resolve_settings(args)
    circuits = _read_circuits(args.circuits)
    policies = (
        list(multi_mod.POLICIES) if args.policy == "all" else [args.policy]
    )
    w_count = len(circuits)
    lanes = max(settings["floorplan"]["lanes"], w_count)
    local = {**settings, "floorplan": {**settings["floorplan"], "lanes": lanes}}
    total_q = sum(c.num_qubits for c in circuits)
    min_ring0 = int(np.ceil(total_q / multi_mod.RING0_TIGHTNESS))
    fp = _floorplan_for(
        circuits, local, headroom=True, extra_qubits=lanes,
        min_ring0=min_ring0,
    )
    cfg = multi_mod.MultiConfig(
        eta_t=settings["multi"]["eta_t"],
        eta_m=settings["multi"]["eta_m"],
        b_y_total=settings["multi"]["b_y_total"],
    )
    out = Path(args.out)
    for policy in policies:
        report = multi_mod.simulate_concurrent(
            circuits,
            fp,
            cfg,
            _weights(settings),
            _model(settings),
            policy=policy,
            fasty=settings["fasty"] == "on",
            seed=settings["seed"],
        )
        rows = [
            [r.index, r.num_qubits, r.b0, r.by, r.t_alone, r.t_conc, r.slowdown]
            for r in report.workloads
        ]
        agg = [[report.mean_slowdown, report.efficiency, report.jain]]
        path = (
            out if len(policies) == 1
            else out.with_name(f"{out.stem}.{policy}{out.suffix}")
        )
        write_csv(
            path, MULTI_HEADER, rows, {**settings, "policy": policy},
            extra_blocks=[(MULTI_AGG_HEADER, agg)],
        )
        print(
            f"{policy}: mean_slowdown={report.mean_slowdown:.4f} "
            f"efficiency={report.efficiency:.4f} jain={report.jain:.4f} -> {path}"
        )
    return 0


# --- sweep -------------------------------------------------------------------

SWEEP_HEADER = ["param", "value", "circuit", "metric", "metric_value"]
SWEEP_PARAMS = ("lambda_t", "lambda_y", "lambda_int", "alpha_t", "alpha_y", "or")


def cmd_sweep(args) -> int:
    settings = resolve_settings(args)
    circuits = _read_circuits(args.circuits)
    if args.param not in SWEEP_PARAMS:
        raise AnnulusError(f"sweep param must be one of {SWEEP_PARAMS}")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise AnnulusError(f"bad sweep values {args.values!r}") from None
    if not values:
        raise AnnulusError("no sweep values given")

    rows = []
    for value in values:
        local = json.loads(json.dumps(settings))  # deep copy
        if args.param == "or":
            local["floorplan"]["n"] = None
            local["floorplan"]["outer_rings"] = int(value)
        else:
            local["weights"][args.param] = value
        for circuit in circuits:
            fp = _floorplan_for([circuit], local, headroom=True)
            trace, _ = _sim_one(
                circuit, fp, local, "greedy", settings["seed"]
            )
            cpi = cpi_t(trace)
            rho = rho_route(trace) if trace.sum_meas > 0 else None
            for metric, metric_value in (
                ("t_total", trace.t_total),
                ("cpi_t", cpi),
                ("rho_route", rho),
                ("sum_t_move", trace.sum_move),
            ):
                rows.append([args.param, value, circuit.name, metric, metric_value])
    write_csv(Path(args.out), SWEEP_HEADER, rows, settings)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


# --- argument plumbing ---------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (flags override)")
    parser.add_argument("--seed", type=int, default=0)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="grid side (default: auto-sized)")
    parser.add_argument("--or", dest="outer_rings", type=int,
                        help="outer ring count (default: auto)")
    parser.add_argument("--lanes", type=int, help="CR entry lanes (default 4)")
    parser.add_argument("--d", dest="code_distance", type=int,
                        help="code distance for wall-clock (default 11)")
    parser.add_argument("--fasty", choices=("on", "off"), default="on")
    parser.add_argument("--movement", choices=("stateless", "promote_inward"))
    parser.add_argument("--no-pipelining", action="store_true")
    parser.add_argument("--worst-case-corner", action="store_true")
    for name in ("alpha-t", "alpha-y", "lambda-t", "lambda-y", "lambda-int"):
        parser.add_argument(
            f"--{name}", dest=name.replace("-", "_"), type=float
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annulus",
        description="Annular surface-code floorplan simulator and optimizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic circuit pool")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--count", type=int, default=10)
    p_gen.add_argument("--qubits", default="10:100", help="LO:HI or N")
    p_gen.add_argument("--layers", default="10:100", help="LO:HI or N")
    p_gen.add_argument("--classes", default="low,medium,high")
    p_gen.add_argument("--multi-qubit-fraction", type=float, default=0.3)
    p_gen.add_argument("--max-arity", type=int, default=4)
    _add_common(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_tr = sub.add_parser("transpile", help="gate list -> layered circuit")
    p_tr.add_argument("gatefile")
    p_tr.add_argument("--out")
    p_tr.add_argument("--name")
    p_tr.add_argument("--verify", action="store_true",
                      help="check the unitary oracle (<= 4 qubits)")
    _add_common(p_tr)
    p_tr.set_defaults(func=cmd_transpile)

    p_sim = sub.add_parser("sim", help="simulate circuits on the floorplan")
    p_sim.add_argument("circuits", nargs="+")
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--or-sweep", help="LO:HI outer-ring sweep")
    p_sim.add_argument("--placement", choices=("greedy", "reversed", "random"),
                       default="greedy")
    p_sim.add_argument("--trace-dir", help="write per-layer trace tables here")
    _add_model_flags(p_sim)
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_sim)

    p_multi = sub.add_parser("multi", help="concurrent workload report")
    p_multi.add_argument("circuits", nargs="+")
    p_multi.add_argument("--out", required=True)
    p_multi.add_argument("--policy", default="proposed",
                         choices=multi_mod.POLICIES + ("all",))
    p_multi.add_argument("--eta-t", dest="eta_t", type=float)
    p_multi.add_argument("--eta-m", dest="eta_m", type=float)
    p_multi.add_argument("--by-total", dest="by_total", type=int)
    _add_model_flags(p_multi)
    _add_common(p_multi)
    p_multi.set_defaults(func=cmd_multi)

    p_sweep = sub.add_parser("sweep", help="hyperparameter sweep (long CSV)")
    p_sweep.add_argument("circuits", nargs="+")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated")
    _add_model_flags(p_sweep)
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY_ERROR
    except AnnulusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
