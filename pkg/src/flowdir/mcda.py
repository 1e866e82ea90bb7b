"""Configuration scoring: feature scaling, rank labels, and ridge regression.

A ranked sweep becomes a training table: features (tbc, tltf, stt) min-max
scaled to [0, 1], label = rank scaled the same way so the best configuration
gets 1.0 and the worst 0.0. A linear model with an unpenalized intercept is
fit in closed form; the ridge penalty is chosen by k-fold cross validation
over a fixed alpha grid.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .sweep import SweepDataset

FEATURES = ("tbc", "tltf", "stt")
DEFAULT_ALPHA_GRID = (0.001, 0.005, 0.009, 0.01, 0.1, 0.5, 1.0, 10.0)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingParams:
    """Per-feature (min, max) ranges from the training dataset."""

    tbc: tuple[float, float]
    tltf: tuple[float, float]
    stt: tuple[float, float]

    def ranges(self) -> tuple[tuple[float, float], ...]:
        return (self.tbc, self.tltf, self.stt)

    @classmethod
    def identity(cls) -> "ScalingParams":
        return cls(tbc=(0.0, 1.0), tltf=(0.0, 1.0), stt=(0.0, 1.0))

    @classmethod
    def from_rows(cls, rows) -> "ScalingParams":
        cols = list(zip(*rows))
        if len(cols) != 3:
            raise ModelError("expected rows of (tbc, tltf, stt)")
        lo = [min(c) for c in cols]
        hi = [max(c) for c in cols]
        return cls(tbc=(lo[0], hi[0]), tltf=(lo[1], hi[1]), stt=(lo[2], hi[2]))


def minmax_scale(values, params: ScalingParams) -> tuple[tuple[float, ...], tuple[str, ...]]:
    """Scale one (tbc, tltf, stt) row to [0, 1].

    Returns the scaled row plus warning tags for degenerate ranges and for
    inputs clamped because they fall outside the training range.
    """
    scaled = []
    warnings = []
    for name, value, (lo, hi) in zip(FEATURES, values, params.ranges()):
        if hi <= lo:
            scaled.append(0.0)
            warnings.append(f"{name}: degenerate range, scaled to 0")
            continue
        z = (value - lo) / (hi - lo)
        if z < 0.0 or z > 1.0:
            warnings.append(f"{name}: outside training range, clamped")
            z = min(1.0, max(0.0, z))
        scaled.append(z)
    return tuple(scaled), tuple(warnings)


@dataclass(frozen=True)
class ScoreModel:
    intercept: float
    weights: tuple[float, float, float]
    alpha: float
    scaling: ScalingParams
    cv_mae: float | None = None
    cv_r2: float | None = None
    provenance: dict = field(default_factory=dict)

    def with_scaling(self, scaling: ScalingParams) -> "ScoreModel":
        return replace(self, scaling=scaling)


def score_scaled(model: ScoreModel, scaled) -> float:
    """DCS from already-scaled [0, 1] inputs."""
    return model.intercept + sum(w * x for w, x in zip(model.weights, scaled))


def score(model: ScoreModel, metrics) -> float:
    """DCS from raw (tbc, tltf, stt); inputs are scaled (and clamped) first."""
    scaled, _ = minmax_scale(metrics, model.scaling)
    return score_scaled(model, scaled)


def reference_model() -> ScoreModel:
    """Bundled reference coefficients with identity scaling.

    Intended for replication and as a default scorer once real scaling
    ranges are attached via `with_scaling`.
    """
    return ScoreModel(
        intercept=1.178,
        weights=(-0.129, 0.086, -1.180),
        alpha=0.01,
        scaling=ScalingParams.identity(),
        cv_mae=0.092,
        cv_r2=0.623,
        provenance={"source": "bundled-reference"},
    )


def assign_dcs(ranked: SweepDataset) -> list[tuple[int, tuple[float, float, float], float]]:
    """Label each ranked record: best rank -> 1.0, worst -> 0.0, linear in rank.

    Returns (code, (tbc, tltf, stt), label) rows.
    """
    n = len(ranked.records)
    if n == 0:
        return []
    if any(r.rank == 0 for r in ranked.records):
        raise ModelError("dataset is unranked; run rank_by_stt first")
    rows = []
    for r in ranked.records:
        label = 0.0 if n == 1 else (r.rank - 1) / (n - 1)
        rows.append((r.code, (r.tbc, r.tltf, r.stt), label))
    return rows


def ridge_fit(X, y, alpha: float, scaling: ScalingParams | None = None) -> ScoreModel:
    """Closed-form fit of y ~ intercept + X @ w with the intercept unpenalized.

    Solves the 4x4 augmented normal equations; the penalty applies to the
    three feature weights only.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ModelError("X must be N x 3 (tbc, tltf, stt)")
    n = X.shape[0]
    if n < 4:
        raise ModelError("need at least 4 rows to fit")
    if alpha < 0:
        raise ModelError("alpha must be >= 0")

    ones = np.ones((n, 1))
    Z = np.hstack([ones, X])
    A = Z.T @ Z
    A[1:, 1:] += alpha * np.eye(3)
    rhs = Z.T @ y
    if alpha == 0 and np.linalg.cond(A) > 1e12:
        raise ModelError("singular normal equations (collinear features); use alpha > 0")
    try:
        beta = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        raise ModelError("singular normal equations (collinear features); use alpha > 0") from None
    return ScoreModel(
        intercept=float(beta[0]),
        weights=(float(beta[1]), float(beta[2]), float(beta[3])),
        alpha=alpha,
        scaling=scaling or ScalingParams.identity(),
    )


@dataclass(frozen=True)
class CvStat:
    alpha: float
    mae: float
    r2: float


def cross_validate(X, y, alphas=DEFAULT_ALPHA_GRID, k: int = 10,
                   seed: int = 0) -> tuple[float, list[CvStat]]:
    """Mean held-out MAE and R^2 per alpha; best = argmin MAE, ties to the
    smaller alpha. Folds are contiguous slices of a seeded shuffle."""
    alphas = tuple(alphas)
    if not alphas:
        raise ModelError("empty alpha grid")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < k:
        raise ModelError(f"need at least k={k} rows, got {n}")

    order = np.random.default_rng(seed).permutation(n)
    folds = np.array_split(order, k)

    stats = []
    for alpha in alphas:
        maes, r2s = [], []
        for fold in folds:
            mask = np.ones(n, dtype=bool)
            mask[fold] = False
            model = ridge_fit(X[mask], y[mask], alpha)
            pred = model.intercept + X[fold] @ np.array(model.weights)
            err = pred - y[fold]
            maes.append(float(np.mean(np.abs(err))))
            ss_res = float(np.sum(err**2))
            ss_tot = float(np.sum((y[fold] - np.mean(y[fold])) ** 2))
            r2s.append(1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0)
        stats.append(CvStat(alpha=alpha, mae=float(np.mean(maes)), r2=float(np.mean(r2s))))

    best = min(stats, key=lambda s: (s.mae, s.alpha))
    return best.alpha, stats


def train_model(ranked: SweepDataset, alphas=DEFAULT_ALPHA_GRID, k: int = 10,
                seed: int = 0) -> ScoreModel:
    """Full training pass over a ranked sweep dataset."""
    rows = assign_dcs(ranked)
    raw = [feats for _, feats, _ in rows]
    y = [label for _, _, label in rows]
    scaling = ScalingParams.from_rows(raw)
    X = [minmax_scale(feats, scaling)[0] for feats in raw]
    best_alpha, stats = cross_validate(X, y, alphas=alphas, k=k, seed=seed)
    chosen = next(s for s in stats if s.alpha == best_alpha)
    model = ridge_fit(X, y, best_alpha, scaling=scaling)
    return replace(
        model,
        cv_mae=chosen.mae,
        cv_r2=chosen.r2,
        provenance={
            "trained_on": ranked.provenance.dataset_hash,
            "n_rows": len(rows),
            "cv_folds": k,
            "cv_seed": seed,
            "alpha_grid": list(alphas),
        },
    )


def model_id(model: ScoreModel) -> str:
    payload = canonical_json({
        "intercept": model.intercept,
        "weights": dict(zip(FEATURES, model.weights)),
        "alpha": model.alpha,
        "scaling": _scaling_dict(model.scaling),
    })
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _scaling_dict(s: ScalingParams) -> dict:
    return {name: {"min": lo, "max": hi} for name, (lo, hi) in zip(FEATURES, s.ranges())}


def model_to_json(model: ScoreModel) -> str:
    return canonical_json({
        "intercept": model.intercept,
        "weights": dict(zip(FEATURES, model.weights)),
        "alpha": model.alpha,
        "cv_mae": model.cv_mae,
        "cv_r2": model.cv_r2,
        "scaling": _scaling_dict(model.scaling),
        "provenance": model.provenance,
    })


def model_from_json(text: str) -> ScoreModel:
    try:
        doc = json.loads(text)
        weights = tuple(float(doc["weights"][name]) for name in FEATURES)
        scaling = ScalingParams(**{
            name: (float(doc["scaling"][name]["min"]), float(doc["scaling"][name]["max"]))
            for name in FEATURES
        })
        return ScoreModel(
            intercept=float(doc["intercept"]),
            weights=weights,
            alpha=float(doc["alpha"]),
            cv_mae=None if doc.get("cv_mae") is None else float(doc["cv_mae"]),
            cv_r2=None if doc.get("cv_r2") is None else float(doc["cv_r2"]),
            scaling=scaling,
            provenance=doc.get("provenance", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model document: {exc}") from None
