"""Exhaustive evaluation of every feasible configuration.

Each feasible code gets a topology pass (total betweenness) and a full
stochastic assignment (system travel time, total link flow) under a seed
derived from the code, so results never depend on worker count or
scheduling order.
"""
from __future__ import annotations

import csv
import hashlib
import io
import multiprocessing
import sys
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .netmodel import Link, decode, directed_view, enumerate_feasible
from .sue import SueParams, sue_assign
from .topo import edge_betweenness, tbc
from .tntp import DemandMatrix

CSV_COLUMNS = ["code", "trits", "feasible", "tbc", "tltf", "stt", "converged", "gap", "rank"]


class SweepSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class SweepRecord:
    code: int
    trits: str
    tbc: float
    tltf: float
    stt: float
    converged: bool
    gap: float
    rank: int = 0
    feasible: bool = True
    extras: tuple[tuple[str, float], ...] = ()  # optional per-arc bc/flow columns


@dataclass(frozen=True)
class Provenance:
    dataset_hash: str
    params: SueParams
    nodes: tuple[int, ...]
    created: str


@dataclass(frozen=True)
class SweepDataset:
    records: tuple[SweepRecord, ...]
    provenance: Provenance


def dataset_hash(links: list[Link], demand: DemandMatrix) -> str:
    h = hashlib.sha256()
    for link in links:
        h.update(repr((link.a, link.b, link.fwd, link.bwd)).encode())
    for pair in sorted(demand.positive_pairs()):
        h.update(repr((pair, demand.get(pair))).encode())
    return "sha256:" + h.hexdigest()[:16]


def evaluate_config(links: list[Link], demand: DemandMatrix, params: SueParams,
                    code: int, include: frozenset = frozenset()) -> SweepRecord:
    """Metrics for one configuration under its code-derived seed.

    `include` may request per-arc detail columns: "bc" and/or "flow".
    """
    config = decode(code, len(links))
    dn = directed_view(links, config)
    result = sue_assign(dn, demand, params.for_config(code))
    bc = edge_betweenness(dn)
    extras = []
    if "bc" in include:
        extras += [(f"bc:{t}>{h}", v) for (t, h), v in sorted(bc.items())]
    if "flow" in include:
        extras += [(f"flow:{t}>{h}", v) for (t, h), v in sorted(result.arc_flow.items())]
    return SweepRecord(
        code=code,
        trits=config.trits(),
        tbc=tbc(bc),
        tltf=result.tltf,
        stt=result.stt,
        converged=result.converged,
        gap=result.final_gap,
        extras=tuple(extras),
    )


_WORKER_STATE: dict = {}


def _worker_init(links, demand, params, include):
    _WORKER_STATE["args"] = (links, demand, params, include)


def _worker_chunk(codes: list[int]) -> list[SweepRecord]:
    links, demand, params, include = _WORKER_STATE["args"]
    return [evaluate_config(links, demand, params, code, include) for code in codes]


def run_sweep(links: list[Link], demand: DemandMatrix, params: SueParams,
              parallelism: int = 1, progress=None,
              include: frozenset = frozenset()) -> SweepDataset:
    """Evaluate all feasible configurations and return unranked records.

    `progress` defaults to a 1 Hz configs/second line on stderr; pass
    False to silence it or a callable taking (done, total, rate).
    """
    codes = [code for code, _ in enumerate_feasible(links, demand)]
    total = len(codes)
    if progress is None:
        progress = _stderr_progress
    elif progress is False:
        progress = lambda done, total, rate: None

    records: list[SweepRecord] = []
    started = time.monotonic()
    last_report = started

    if parallelism <= 1:
        for i, code in enumerate(codes, start=1):
            records.append(evaluate_config(links, demand, params, code, include))
            now = time.monotonic()
            if now - last_report >= 1.0 or i == total:
                progress(i, total, i / max(now - started, 1e-9))
                last_report = now
    else:
        chunk = 64
        chunks = [codes[i:i + chunk] for i in range(0, total, chunk)]
        done = 0
        with multiprocessing.Pool(parallelism, initializer=_worker_init,
                                  initargs=(links, demand, params, include)) as pool:
            for batch in pool.imap(_worker_chunk, chunks):
                records.extend(batch)
                done += len(batch)
                now = time.monotonic()
                if now - last_report >= 1.0 or done == total:
                    progress(done, total, done / max(now - started, 1e-9))
                    last_report = now
        records.sort(key=lambda r: r.code)

    provenance = Provenance(
        dataset_hash=dataset_hash(links, demand),
        params=params,
        nodes=tuple(sorted({n for link in links for n in link.nodes})),
        created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    return SweepDataset(records=tuple(records), provenance=provenance)


def _stderr_progress(done: int, total: int, rate: float):
    print(f"sweep: {done}/{total} configs ({rate:.0f}/s)", file=sys.stderr, flush=True)


def rank_by_stt(ds: SweepDataset) -> SweepDataset:
    """Assign ranks: N for the lowest travel time down to 1 for the highest,
    equal values broken in favor of the smaller code. Output is sorted best
    first (rank descending)."""
    n = len(ds.records)
    by_quality = sorted(ds.records, key=lambda r: (r.stt, r.code))
    ranked = tuple(replace(rec, rank=n - i) for i, rec in enumerate(by_quality))
    return SweepDataset(records=ranked, provenance=ds.provenance)


def _fmt(x: float) -> str:
    return repr(float(x))


def save_csv(ds: SweepDataset, path: str | Path) -> None:
    buf = io.StringIO()
    p = ds.provenance
    buf.write("# flowdir sweep v1\n")
    buf.write(f"# dataset_hash={p.dataset_hash}\n")
    buf.write(f"# sigma={_fmt(p.params.sigma)} max_iterations={p.params.max_iterations} "
              f"gap_tolerance={_fmt(p.params.gap_tolerance)} seed={p.params.seed}\n")
    buf.write("# nodes=" + ",".join(str(n) for n in p.nodes) + "\n")
    buf.write(f"# created={p.created}\n")
    extra_cols = sorted({name for r in ds.records for name, _ in r.extras})
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + extra_cols)
    for r in ds.records:
        row = [r.code, r.trits, str(r.feasible).lower(), _fmt(r.tbc),
               _fmt(r.tltf), _fmt(r.stt), str(r.converged).lower(),
               _fmt(r.gap), r.rank]
        extras = dict(r.extras)
        row += [(_fmt(extras[c]) if c in extras else "") for c in extra_cols]
        writer.writerow(row)
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def load_csv(path: str | Path) -> SweepDataset:
    text = Path(path).read_text(encoding="utf-8")
    meta: dict[str, str] = {}
    body_lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            entry = line[1:].strip()
            for token in entry.split():
                if "=" in token:
                    key, _, value = token.partition("=")
                    meta[key] = value
        elif line.strip():
            body_lines.append(line)
    reader = csv.DictReader(io.StringIO("\n".join(body_lines)))
    field_names = reader.fieldnames or []
    for col in CSV_COLUMNS:
        if col not in field_names:
            raise SweepSchemaError(f"missing column {col!r}")

    records = []
    for row in reader:
        records.append(SweepRecord(
            code=int(row["code"]),
            trits=row["trits"],
            feasible=row["feasible"] == "true",
            tbc=float(row["tbc"]),
            tltf=float(row["tltf"]),
            stt=float(row["stt"]),
            converged=row["converged"] == "true",
            gap=float(row["gap"]),
            rank=int(row["rank"]),
        ))
    try:
        params = SueParams(
            sigma=float(meta["sigma"]),
            max_iterations=int(meta["max_iterations"]),
            gap_tolerance=float(meta["gap_tolerance"]),
            seed=int(meta["seed"]),
        )
        provenance = Provenance(
            dataset_hash=meta["dataset_hash"],
            params=params,
            nodes=tuple(int(n) for n in meta["nodes"].split(",") if n),
            created=meta["created"],
        )
    except KeyError as exc:
        raise SweepSchemaError(f"missing provenance field {exc.args[0]!r}") from None
    return SweepDataset(records=tuple(records), provenance=provenance)
