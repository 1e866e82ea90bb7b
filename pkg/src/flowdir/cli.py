"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 compute error.
Failures additionally emit one machine-readable JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import mcda, scenario as scen, server, sue, sweep as sweep_mod, tntp
from .netmodel import (Configuration, ConfigurationError, InfeasibleNetworkError,
                       decode, feasibility_diagnostics)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_COMPUTE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit_error(kind: str, message: str):
    print(json.dumps({"error": {"kind": kind, "message": message}}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--network", help="TNTP network file (default: bundled Sioux Falls)")
    common.add_argument("--trips", help="TNTP trips file (default: bundled Sioux Falls)")
    common.add_argument("--nodes", help="comma-separated node ids for subnetwork "
                                        "extraction (default: 5,6,8,9,10,16,17)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sigma", type=float, default=0.1)
    common.add_argument("--max-iterations", type=int, default=200)
    common.add_argument("--gap-tolerance", type=float, default=1e-3)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output path (subcommand-specific)")

    p = _Parser(prog="flowdir", description="Roadway directionality decision support")
    sub = p.add_subparsers(dest="command", required=True)

    def add_command(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    add_command("extract", help="write subnetwork TNTP files for --nodes")

    p_sweep = add_command("sweep", help="evaluate every feasible configuration to CSV")
    p_sweep.add_argument("--emit-bc", action="store_true", help="per-arc betweenness columns")
    p_sweep.add_argument("--emit-flows", action="store_true", help="per-arc flow columns")
    p_sweep.add_argument("--no-rank", action="store_true", help="skip ranking the records")

    p_rank = add_command("rank", help="rank an existing sweep CSV by travel time")
    p_rank.add_argument("--in", dest="input", required=True)

    p_train = add_command("train", help="fit a scoring model from a ranked sweep CSV")
    p_train.add_argument("--in", dest="input", required=True)
    p_train.add_argument("--alpha-grid", help="comma-separated ridge penalties "
                                              "(default: 0.001,0.005,0.009,0.01,0.1,0.5,1.0,10.0)")
    p_train.add_argument("--folds", type=int, default=10)
    p_train.add_argument("--cv-seed", type=int, default=0)

    p_score = add_command("score", help="score a configuration or raw metrics")
    p_score.add_argument("--model", help="model JSON (default: bundled reference model)")
    p_score.add_argument("--sweep", help="sweep CSV supplying scaling ranges for the "
                                         "reference model")
    group = p_score.add_mutually_exclusive_group(required=True)
    group.add_argument("--code", type=int, help="configuration code to evaluate")
    group.add_argument("--trits", help="configuration trits string, link 0 leftmost")
    group.add_argument("--metrics", help="raw tbc,tltf,stt triple")
    group.add_argument("--scaled", help="already-scaled tbc,tltf,stt triple")

    p_scn = add_command("scenario", help="evaluate and compare scenarios")
    scn_sub = p_scn.add_subparsers(dest="scenario_command", required=True)
    p_run = scn_sub.add_parser("run", parents=[common], help="evaluate one configuration under a scenario")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--code", type=int)
    p_run.add_argument("--trits")
    p_run.add_argument("--model")
    p_run.add_argument("--sweep")
    p_best = scn_sub.add_parser("best", parents=[common], help="best configuration satisfying a scenario")
    p_best.add_argument("--scenario", required=True)
    p_best.add_argument("--model")
    p_best.add_argument("--sweep")
    p_cmp = scn_sub.add_parser("compare", parents=[common], help="run the evacuation case-study comparison")
    p_cmp.add_argument("--sweep", help="ranked sweep CSV to reuse (else a sweep is run)")
    p_cmp.add_argument("--model")
    p_cmp.add_argument("--surge", type=float, default=1.0,
                       help="demand multiplier for the evacuating origin")

    p_serve = add_command("serve", help="start the HTTP service")
    p_serve.add_argument("--port", type=int,
                         default=int(os.environ.get("FLOWDIR_PORT", "8000")))
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--sweep", help="ranked sweep CSV to preload")
    p_serve.add_argument("--model", help="model JSON to preload")
    p_serve.add_argument("--ui", help="directory with the built UI bundle")

    add_command("feasibility", help="print the feasibility census for --nodes")
    return p


DEFAULT_NODES = "5,6,8,9,10,16,17"


def _load_inputs(args):
    net = tntp.load_network(args.network) if args.network else None
    trips = tntp.load_trips(args.trips) if args.trips else None
    if net is None or trips is None:
        bundled_net, bundled_trips = tntp.load_sioux_falls()
        net = net or bundled_net
        trips = trips or bundled_trips
    nodes_arg = args.nodes or DEFAULT_NODES
    try:
        nodes = {int(tok) for tok in nodes_arg.split(",") if tok.strip()}
    except ValueError:
        raise UsageError(f"--nodes must be comma-separated integers, got {nodes_arg!r}") from None
    return tntp.extract_subnetwork(net, trips, nodes)


def _params(args) -> sue.SueParams:
    return sue.SueParams(sigma=args.sigma, max_iterations=args.max_iterations,
                         gap_tolerance=args.gap_tolerance, seed=args.seed)


def _load_model(model_path, sweep_path) -> mcda.ScoreModel:
    if model_path:
        return mcda.model_from_json(Path(model_path).read_text())
    model = mcda.reference_model()
    if sweep_path:
        ds = sweep_mod.load_csv(sweep_path)
        rows = [(r.tbc, r.tltf, r.stt) for r in ds.records]
        model = model.with_scaling(mcda.ScalingParams.from_rows(rows))
    return model


def _print_json(payload):
    print(mcda.canonical_json(payload))


def _parse_triple(text: str, flag: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"{flag} expects tbc,tltf,stt")
    try:
        return tuple(float(x) for x in parts)  # type: ignore[return-value]
    except ValueError:
        raise UsageError(f"{flag} expects three numbers, got {text!r}") from None


def _cmd_extract(args) -> int:
    links, demand = _load_inputs(args)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    arcs = []
    for link in links:
        arcs.append(tntp.ArcRecord(link.a, link.b, link.fwd.capacity, link.fwd.free_flow_time,
                                   link.fwd.free_flow_time, link.fwd.bpr_b, link.fwd.bpr_power))
        arcs.append(tntp.ArcRecord(link.b, link.a, link.bwd.capacity, link.bwd.free_flow_time,
                                   link.bwd.free_flow_time, link.bwd.bpr_b, link.bwd.bpr_power))
    arcs.sort(key=lambda a: (a.init_node, a.term_node))
    nodes = sorted({n for link in links for n in link.nodes})
    ds = tntp.NetworkDataset(metadata={
        "NUMBER OF ZONES": len(nodes),
        "NUMBER OF NODES": max(nodes),
        "FIRST THRU NODE": min(nodes),
        "NUMBER OF LINKS": len(arcs),
    }, arcs=tuple(arcs))
    net_path = out_dir / "subnet_net.tntp"
    trips_path = out_dir / "subnet_trips.tntp"
    net_path.write_text(tntp.serialize_network(ds))
    trips_path.write_text(tntp.serialize_trips(demand))
    _print_json({"network": str(net_path), "trips": str(trips_path),
                 "nodes": nodes, "links": len(links)})
    return EXIT_OK


def _cmd_sweep(args) -> int:
    links, demand = _load_inputs(args)
    include = set()
    if args.emit_bc:
        include.add("bc")
    if args.emit_flows:
        include.add("flow")
    ds = sweep_mod.run_sweep(links, demand, _params(args), parallelism=args.workers,
                             include=frozenset(include))
    if not args.no_rank:
        ds = sweep_mod.rank_by_stt(ds)
    out = args.out or "sweep.csv"
    sweep_mod.save_csv(ds, out)
    _print_json({"out": out, "n_feasible": len(ds.records),
                 "dataset_hash": ds.provenance.dataset_hash})
    return EXIT_OK


def _cmd_rank(args) -> int:
    ds = sweep_mod.rank_by_stt(sweep_mod.load_csv(args.input))
    out = args.out or args.input
    sweep_mod.save_csv(ds, out)
    _print_json({"out": out, "n_feasible": len(ds.records)})
    return EXIT_OK


def _cmd_train(args) -> int:
    ds = sweep_mod.load_csv(args.input)
    if any(r.rank == 0 for r in ds.records):
        ds = sweep_mod.rank_by_stt(ds)
    alphas = mcda.DEFAULT_ALPHA_GRID
    if args.alpha_grid:
        try:
            alphas = tuple(float(a) for a in args.alpha_grid.split(",") if a.strip())
        except ValueError:
            raise UsageError(f"--alpha-grid expects comma-separated numbers") from None
    model = mcda.train_model(ds, alphas=alphas, k=args.folds, seed=args.cv_seed)
    text = mcda.model_to_json(model)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def _cmd_score(args) -> int:
    model = _load_model(args.model, args.sweep)
    if args.scaled is not None:
        triple = _parse_triple(args.scaled, "--scaled")
        _print_json({"scaled": list(triple), "dcs": mcda.score_scaled(model, triple),
                     "model_id": mcda.model_id(model)})
        return EXIT_OK
    if args.metrics is not None:
        triple = _parse_triple(args.metrics, "--metrics")
        _print_json({"tbc": triple[0], "tltf": triple[1], "stt": triple[2],
                     "dcs": mcda.score(model, triple), "model_id": mcda.model_id(model)})
        return EXIT_OK
    links, demand = _load_inputs(args)
    if args.trits is not None:
        config = Configuration.from_trits(args.trits)
        if len(config) != len(links):
            raise UsageError(f"expected {len(links)} trits, got {len(config)}")
    else:
        config = decode(args.code, len(links))
    state = server.default_state(links, demand, _params(args), model=model)
    payload = server.evaluate_config_payload(state, config.code)
    _print_json(payload)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    links, demand = _load_inputs(args)
    params = _params(args)
    model = _load_model(args.model, getattr(args, "sweep", None))

    if args.scenario_command == "run":
        scenario = scen.load_scenario(args.scenario)
        if args.code is None and args.trits is None:
            raise UsageError("scenario run requires --code or --trits")
        config = (Configuration.from_trits(args.trits) if args.trits is not None
                  else decode(args.code, len(links)))
        metrics = scen.evaluate_scenario(links, demand, scenario, config, params, model)
        _print_json(metrics.__dict__)
        return EXIT_OK

    if args.scenario_command == "best":
        scenario = scen.load_scenario(args.scenario)
        config, metrics = scen.best_under_constraints(links, demand, scenario, params, model)
        _print_json(metrics.__dict__)
        return EXIT_OK

    # compare: the evacuation case-study pipeline
    if args.sweep:
        ds = sweep_mod.load_csv(args.sweep)
    else:
        ds = sweep_mod.rank_by_stt(
            sweep_mod.run_sweep(links, demand, params, parallelism=args.workers))
    if args.model is None:
        rows = [(r.tbc, r.tltf, r.stt) for r in ds.records]
        model = mcda.reference_model().with_scaling(mcda.ScalingParams.from_rows(rows))
    presets = scen.case_study_preset(links, surge=args.surge)
    best_code, _ = scen.best_from_sweep(ds, model)
    config_a = decode(best_code, len(links))
    rows = [scen.evaluate_scenario(links, demand, presets[0], config_a, params, model)]
    config_b = presets[1].apply_locks(config_a)
    rows.append(scen.evaluate_scenario(links, demand, presets[1], config_b, params, model))
    rows.append(scen.evaluate_scenario(links, demand, presets[2], config_b, params, model))
    comparison = scen.compare(rows, baseline_index=0)
    if args.out:
        Path(args.out).write_text(scen.comparison_to_csv(comparison))
    print(scen.comparison_table(comparison), end="")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    links, demand = _load_inputs(args)
    sweep_ds = sweep_mod.load_csv(args.sweep) if args.sweep else None
    model = mcda.model_from_json(Path(args.model).read_text()) if args.model else None
    state = server.default_state(links, demand, _params(args), model=model, sweep_ds=sweep_ds)
    ui_dir = args.ui
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    app = server.create_app(state, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _cmd_feasibility(args) -> int:
    links, demand = _load_inputs(args)
    diag = feasibility_diagnostics(links, demand)
    _print_json({
        "n_links": diag.n_links,
        "total": diag.total,
        "feasible_by_demand": diag.feasible_by_demand,
        "strongly_connected": diag.strongly_connected,
        "feasible_excluding_all_two_way": diag.feasible_excluding_all_two_way,
        "zero_demand_pairs": [list(p) for p in diag.zero_demand_pairs],
    })
    return EXIT_OK


_COMMANDS = {
    "extract": _cmd_extract,
    "sweep": _cmd_sweep,
    "rank": _cmd_rank,
    "train": _cmd_train,
    "score": _cmd_score,
    "scenario": _cmd_scenario,
    "serve": _cmd_serve,
    "feasibility": _cmd_feasibility,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE
    except (tntp.TntpError, sweep_mod.SweepSchemaError, mcda.ModelError, scen.ScenarioError,
            ConfigurationError, FileNotFoundError, json.JSONDecodeError) as exc:
        _emit_error("data", str(exc))
        return EXIT_DATA
    except (InfeasibleNetworkError, ArithmeticError, ValueError) as exc:
        _emit_error("compute", str(exc))
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
