"""JSON-over-HTTP service exposing the evaluation pipeline.

All bodies are canonical JSON (sorted keys, full-precision floats) so that
identical requests return byte-identical responses and CLI output can be
compared against API payloads directly. Every response carries provenance:
the base seed, the perception sigma, and the active model id.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import mcda, scenario as scen
from .netmodel import (Configuration, ConfigurationError, InfeasibleNetworkError, Link,
                       enumerate_feasible)
from .sue import SueParams
from .sweep import SweepDataset, rank_by_stt, run_sweep
from .tntp import DemandMatrix


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


@dataclass
class ServiceState:
    links: list[Link]
    demand: DemandMatrix
    params: SueParams
    model: mcda.ScoreModel
    sweep_ds: SweepDataset | None = None
    eval_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    sweep_progress: dict = field(default_factory=lambda: {
        "running": False, "done": 0, "total": 0, "rate": 0.0})

    def provenance(self) -> dict:
        return {
            "seed": self.params.seed,
            "sigma": self.params.sigma,
            "model_id": mcda.model_id(self.model),
        }


def _canonical(payload, status: int = 200) -> Response:
    return Response(content=mcda.canonical_json(payload) + "\n",
                    media_type="application/json", status_code=status)


def _error(status: int, message: str) -> Response:
    return _canonical({"error": {"status": status, "message": message}}, status=status)


def metrics_payload(state: ServiceState, metrics: scen.ScenarioMetrics) -> dict:
    return {
        "code": metrics.code,
        "trits": metrics.trits,
        "tbc": metrics.tbc,
        "tltf": metrics.tltf,
        "stt": metrics.stt,
        "dcs": metrics.dcs,
        "converged": metrics.converged,
        "gap": metrics.gap,
        "iterations": metrics.iterations,
        "provenance": state.provenance(),
    }


def evaluate_config_payload(state: ServiceState, code: int,
                            scenario: scen.Scenario | None = None) -> dict:
    """Evaluate one configuration (optionally under a scenario), cached."""
    n_links = len(state.links)
    if not 0 <= code < 3**n_links:
        raise ApiError(404, f"code {code} out of range for {n_links} links")
    scenario = scenario or scen.Scenario(name="")
    key = (code, scen.scenario_to_json(scenario), mcda.model_id(state.model))
    with state.lock:
        cached = state.eval_cache.get(key)
    if cached is not None:
        return cached
    from .netmodel import decode
    config = decode(code, n_links)
    try:
        metrics = scen.evaluate_scenario(state.links, state.demand, scenario, config,
                                         state.params, state.model)
    except InfeasibleNetworkError as exc:
        raise ApiError(422, f"infeasible configuration: no path for demand pair "
                            f"{exc.origin} -> {exc.destination}") from None
    except scen.ScenarioError as exc:
        raise ApiError(400, str(exc)) from None
    payload = metrics_payload(state, metrics)
    with state.lock:
        state.eval_cache[key] = payload
    return payload


def _parse_orientations(body: dict, n_links: int) -> Configuration:
    if "code" in body:
        code = body["code"]
        if not isinstance(code, int) or not 0 <= code < 3**n_links:
            raise ApiError(400, f"code must be an integer in [0, {3**n_links})")
        from .netmodel import decode
        return decode(code, n_links)
    if "trits" in body:
        try:
            config = Configuration.from_trits(str(body["trits"]))
        except ConfigurationError as exc:
            raise ApiError(400, str(exc)) from None
    elif "orientations" in body:
        names = body["orientations"]
        if not isinstance(names, list):
            raise ApiError(400, "orientations must be a list of "
                                "two_way|forward|backward")
        try:
            from .netmodel import Orientation
            config = Configuration(tuple(Orientation.from_name(n) for n in names))
        except (ConfigurationError, TypeError) as exc:
            raise ApiError(400, str(exc)) from None
    else:
        raise ApiError(400, "body must contain one of: orientations, trits, code")
    if len(config) != n_links:
        raise ApiError(400, f"expected {n_links} link orientations, got {len(config)}")
    return config


def create_app(state: ServiceState, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="flowdir", version="0.1.0")

    @app.exception_handler(ApiError)
    async def _api_error(_, exc: ApiError):
        return _error(exc.status, exc.message)

    @app.get("/api/health")
    def health():
        return _canonical({"status": "ok"})

    @app.get("/api/network")
    def network():
        links = [{
            "index": i,
            "a": link.a,
            "b": link.b,
            "fwd": {"capacity": link.fwd.capacity, "fft": link.fwd.free_flow_time,
                    "b": link.fwd.bpr_b, "power": link.fwd.bpr_power},
            "bwd": {"capacity": link.bwd.capacity, "fft": link.bwd.free_flow_time,
                    "b": link.bwd.bpr_b, "power": link.bwd.bpr_power},
            "reverse_copied": link.reverse_copied,
        } for i, link in enumerate(state.links)]
        nodes = sorted({n for link in state.links for n in link.nodes})
        return _canonical({
            "nodes": nodes,
            "links": links,
            "demand_total": state.demand.total(),
            "provenance": state.provenance(),
        })

    @app.get("/api/config/{code}")
    def config_metrics(code: int):
        return _canonical(evaluate_config_payload(state, code))

    @app.post("/api/evaluate")
    async def evaluate(request: Request):
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            raise ApiError(400, "request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise ApiError(400, "request body must be a JSON object")
        config = _parse_orientations(body, len(state.links))
        scenario = scen.Scenario(name="")
        if body.get("scenario") is not None:
            try:
                scenario = scen.scenario_from_json(mcda.canonical_json(body["scenario"]))
            except (scen.ScenarioError, ValueError) as exc:
                raise ApiError(400, f"malformed scenario: {exc}") from None
        payload = dict(evaluate_config_payload(state, config.code, scenario))
        baseline_code = body.get("baseline_code")
        if baseline_code is not None:
            if not isinstance(baseline_code, int):
                raise ApiError(400, "baseline_code must be an integer")
            base = evaluate_config_payload(state, baseline_code)
            payload["baseline_code"] = baseline_code
            payload["deltas"] = {
                "tbc": payload["tbc"] - base["tbc"],
                "tltf": payload["tltf"] - base["tltf"],
                "stt": payload["stt"] - base["stt"],
                "dcs": payload["dcs"] - base["dcs"],
                "pct_change_stt": (base["stt"] - payload["stt"]) / base["stt"] * 100.0
                if base["stt"] else 0.0,
            }
        return _canonical(payload)

    @app.get("/api/ranking")
    def ranking(top: int = 10):
        with state.lock:
            ds = state.sweep_ds
        if ds is None:
            raise ApiError(409, "no sweep loaded; POST /api/sweep or start with --sweep")
        rows = [{
            "code": r.code, "trits": r.trits, "rank": r.rank, "tbc": r.tbc,
            "tltf": r.tltf, "stt": r.stt, "converged": r.converged,
        } for r in ds.records[:max(top, 0)]]
        return _canonical({"rows": rows, "n_feasible": len(ds.records),
                           "provenance": state.provenance()})

    @app.post("/api/sweep")
    async def sweep_endpoint(request: Request):
        raw = await request.body()
        body = {}
        if raw:
            try:
                body = json.loads(raw)
            except json.JSONDecodeError:
                raise ApiError(400, "request body is not valid JSON") from None
        workers = body.get("workers", 1)
        if not isinstance(workers, int) or workers < 1:
            raise ApiError(400, "workers must be a positive integer")
        with state.lock:
            if state.sweep_progress["running"]:
                raise ApiError(409, "a sweep is already running")
            state.sweep_progress.update(running=True, done=0, total=0, rate=0.0)

        def report(done, total, rate):
            state.sweep_progress.update(done=done, total=total, rate=rate)

        try:
            ds = rank_by_stt(run_sweep(state.links, state.demand, state.params,
                                       parallelism=workers, progress=report))
        finally:
            state.sweep_progress["running"] = False
        with state.lock:
            state.sweep_ds = ds
            state.eval_cache.clear()
        return _canonical({"n_feasible": len(ds.records),
                           "dataset_hash": ds.provenance.dataset_hash,
                           "provenance": state.provenance()})

    @app.get("/api/sweep/progress")
    def sweep_progress():
        return _canonical(dict(state.sweep_progress))

    @app.post("/api/train")
    async def train(request: Request):
        raw = await request.body()
        body = {}
        if raw:
            try:
                body = json.loads(raw)
            except json.JSONDecodeError:
                raise ApiError(400, "request body is not valid JSON") from None
        with state.lock:
            ds = state.sweep_ds
        if ds is None:
            raise ApiError(409, "no sweep loaded; POST /api/sweep first")
        try:
            model = mcda.train_model(
                ds,
                alphas=tuple(body.get("alphas", mcda.DEFAULT_ALPHA_GRID)),
                k=int(body.get("folds", 10)),
                seed=int(body.get("seed", 0)),
            )
        except (mcda.ModelError, TypeError, ValueError) as exc:
            raise ApiError(400, str(exc)) from None
        with state.lock:
            state.model = model
            state.eval_cache.clear()
        return _canonical(json.loads(mcda.model_to_json(model)))

    @app.get("/api/model")
    def model():
        return _canonical(json.loads(mcda.model_to_json(state.model)))

    @app.get("/api/presets/case-study")
    def presets():
        try:
            presets = scen.case_study_preset(state.links)
        except scen.ScenarioError as exc:
            raise ApiError(409, str(exc)) from None
        return _canonical({
            "scenarios": [json.loads(scen.scenario_to_json(s)) for s in presets],
            "provenance": state.provenance(),
        })

    @app.get("/api/feasibility")
    def feasibility():
        feasible = sum(1 for _ in enumerate_feasible(state.links, state.demand))
        return _canonical({
            "n_links": len(state.links),
            "total": 3**len(state.links),
            "feasible": feasible,
            "provenance": state.provenance(),
        })

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def default_state(links: list[Link], demand: DemandMatrix, params: SueParams,
                  model: mcda.ScoreModel | None = None,
                  sweep_ds: SweepDataset | None = None) -> ServiceState:
    if model is None:
        model = mcda.reference_model()
        if sweep_ds is not None and sweep_ds.records:
            rows = [(r.tbc, r.tltf, r.stt) for r in sweep_ds.records]
            model = model.with_scaling(mcda.ScalingParams.from_rows(rows))
    return ServiceState(links=links, demand=demand, params=params, model=model,
                        sweep_ds=sweep_ds)
