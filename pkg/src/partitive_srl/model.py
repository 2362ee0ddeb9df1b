"""Boosted decision trees for per-token ARG1 scoring.

Discrete two-class AdaBoost over depth-limited trees.  Each round fits a
greedy tree that minimizes weighted misclassification using midpoint
thresholds on single features, ties broken toward the lowest feature
index and then the lowest threshold.  Stage weights use the standard
half-log-odds form scaled by the shrinkage factor; sample weights are
reweighted exponentially and renormalized.  Boosting stops early on a
perfect round, on a round no better than chance, or when no split
improves on a constant prediction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Instance, Sentence
from .errors import ModelError

# floor keeps the stage weight finite on a perfect round
_EPS_FLOOR = 1e-16


class TreeNode:
    """One node of a weighted-misclassification decision tree."""

    __slots__ = ("feature", "threshold", "left", "right", "prediction", "gain")

    def __init__(
        self,
        prediction: int,
        feature: int | None = None,
        threshold: float | None = None,
        left: "TreeNode | None" = None,
        right: "TreeNode | None" = None,
        gain: float = 0.0,
    ):
        self.prediction = prediction
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.gain = gain

    def is_leaf(self) -> bool:
        return self.feature is None

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(len(X), dtype=np.int8)
        stack = [(self, np.arange(len(X)))]
        while stack:
            node, rows = stack.pop()
            if node.is_leaf():
                out[rows] = node.prediction
                continue
            mask = X[rows, node.feature] <= node.threshold
            stack.append((node.left, rows[mask]))
            stack.append((node.right, rows[~mask]))
        return out

    def to_dict(self) -> dict:
        if self.is_leaf():
            return {"p": self.prediction}
        return {
            "f": self.feature,
            "t": self.threshold,
            "gain": self.gain,
            "p": self.prediction,
            "l": self.left.to_dict(),
            "r": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        if "f" not in data:
            return cls(prediction=data["p"])
        return cls(
            prediction=data["p"],
            feature=data["f"],
            threshold=data["t"],
            gain=data["gain"],
            left=cls.from_dict(data["l"]),
            right=cls.from_dict(data["r"]),
        )


def _majority(wpos: float, wneg: float) -> int:
    # exact ties go to the positive class
    return 1 if wpos >= wneg else -1


_SPLIT_BLOCK = 128  # general feature columns scored per vectorized pass


class _SplitContext:
    """Per-fit column layout: 0/1 indicator columns split off from the rest.

    Indicator columns have a single candidate boundary, so their weighted
    split error comes from three vector-matrix products per node instead
    of a sort-and-scan.  The remaining columns keep a stable presort.
    """

    __slots__ = ("bin_cols", "gen_cols", "x_bin", "presort")

    def __init__(self, X: np.ndarray) -> None:
        is_binary = np.all((X == 0.0) | (X == 1.0), axis=0)
        self.bin_cols = np.nonzero(is_binary)[0]
        self.gen_cols = np.nonzero(~is_binary)[0]
        self.x_bin = (
            np.ascontiguousarray(X[:, self.bin_cols])
            if len(self.bin_cols)
            else None
        )
        self.presort = (
            np.argsort(X[:, self.gen_cols], axis=0, kind="stable")
            if len(self.gen_cols)
            else None
        )


def _best_binary_split(ctx, pos_w, neg_w, in_node, k):
    """Candidate over indicator columns, or None."""
    if ctx.x_bin is None:
        return None
    wp = np.where(in_node, pos_w, 0.0)
    wn = np.where(in_node, neg_w, 0.0)
    total_pos = float(np.sum(wp))
    total_neg = float(np.sum(wn))
    right_pos = wp @ ctx.x_bin  # weight of positives valued 1
    right_neg = wn @ ctx.x_bin
    ones = in_node.astype(np.float64) @ ctx.x_bin
    err = np.minimum(total_pos - right_pos, total_neg - right_neg) + np.minimum(
        right_pos, right_neg
    )
    err[(ones == 0.0) | (ones == float(k))] = np.inf
    local = int(np.argmin(err))
    error = float(err[local])
    if not math.isfinite(error):
        return None
    return (error, int(ctx.bin_cols[local]), 0.5)


def _best_general_split(X, ctx, pos_w, neg_w, in_node, k):
    """Candidate over the remaining columns, or None."""
    if ctx.presort is None:
        return None
    best = None
    d_gen = len(ctx.gen_cols)
    for start in range(0, d_gen, _SPLIT_BLOCK):
        stop = min(start + _SPLIT_BLOCK, d_gen)
        block = np.ascontiguousarray(ctx.presort[:, start:stop].T)
        # every column keeps the same k rows, so the mask reshapes cleanly
        sorted_rows = block[in_node[block]].reshape(stop - start, k)
        values = X[sorted_rows, ctx.gen_cols[start:stop][:, None]]
        cpos = np.cumsum(pos_w[sorted_rows], axis=1)
        cneg = np.cumsum(neg_w[sorted_rows], axis=1)
        left_pos = cpos[:, :-1]
        left_neg = cneg[:, :-1]
        err = np.minimum(left_pos, left_neg) + np.minimum(
            cpos[:, -1:] - left_pos, cneg[:, -1:] - left_neg
        )
        err[values[:, :-1] >= values[:, 1:]] = np.inf
        flat = int(np.argmin(err))
        row, cut = divmod(flat, k - 1)
        error = float(err[row, cut])
        if not math.isfinite(error):
            continue
        if best is None or error < best[0]:
            threshold = float((values[row, cut] + values[row, cut + 1]) / 2.0)
            best = (error, int(ctx.gen_cols[start + row]), threshold)
    return best


def _best_split(X, y, w, rows, ctx):
    """Best (error, feature, threshold) over midpoint splits, or None.

    Ties resolve to the lowest error, then the lowest feature index,
    then the lowest threshold: each candidate scan takes the first
    minimum in ascending feature and threshold order, and the two
    candidates merge lexicographically.
    """
    k = len(rows)
    if k < 2:
        return None
    in_node = np.zeros(len(X), dtype=bool)
    in_node[rows] = True
    pos_w = np.where(y == 1, w, 0.0)
    neg_w = w - pos_w
    candidates = [
        c
        for c in (
            _best_binary_split(ctx, pos_w, neg_w, in_node, k),
            _best_general_split(X, ctx, pos_w, neg_w, in_node, k),
        )
        if c is not None
    ]
    if not candidates:
        return None
    return min(candidates)


def _fit_tree(X, y, w, rows, depth, ctx) -> TreeNode:
    wpos = float(np.sum(w[rows][y[rows] == 1]))
    wneg = float(np.sum(w[rows][y[rows] == -1]))
    prediction = _majority(wpos, wneg)
    node_error = min(wpos, wneg)
    if depth == 0 or node_error == 0.0:
        return TreeNode(prediction=prediction)
    best = _best_split(X, y, w, rows, ctx)
    if best is None:
        return TreeNode(prediction=prediction)
    split_error, feature, threshold = best
    if not split_error < node_error:
        return TreeNode(prediction=prediction)
    mask = X[rows, feature] <= threshold
    left = _fit_tree(X, y, w, rows[mask], depth - 1, ctx)
    right = _fit_tree(X, y, w, rows[~mask], depth - 1, ctx)
    return TreeNode(
        prediction=prediction,
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        gain=node_error - split_error,
    )


@dataclass
class BoostModel:
    trees: list[TreeNode]
    alphas: list[float]
    width: int
    depth: int
    shrinkage: float
    seed: int
    rounds_requested: int
    class_balanced: bool = False
    metadata: dict = field(default_factory=dict)

    def margin_batch(self, X: np.ndarray) -> np.ndarray:
        margins = np.zeros(len(X), dtype=np.float64)
        for tree, alpha in zip(self.trees, self.alphas):
            margins += alpha * tree.predict_batch(X).astype(np.float64)
        return margins

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        if X.ndim != 2 or X.shape[1] != self.width:
            raise ModelError(
                f"expected {self.width} features, got {X.shape[1] if X.ndim == 2 else 'bad shape'}"
            )
        if len(self.trees) == 0:
            return np.full(len(X), 0.5, dtype=np.float64)
        return 1.0 / (1.0 + np.exp(-2.0 * self.margin_batch(X)))

    def score(self, x: np.ndarray) -> float:
        return float(self.score_batch(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def _as_signed(y) -> np.ndarray:
    arr = np.asarray(y)
    values = set(np.unique(arr).tolist())
    if values <= {0, 1}:
        return np.where(arr == 1, 1, -1).astype(np.int8)
    if values <= {-1, 1}:
        return arr.astype(np.int8)
    raise ModelError(f"labels must be binary, got values {sorted(values)}")


def fit_adaboost(
    X,
    y,
    rounds: int = 200,
    depth: int = 2,
    shrinkage: float = 1.0,
    seed: int = 0,
    class_balanced: bool = False,
) -> BoostModel:
    """Fit the boosted tree classifier.

    The procedure is deterministic; the seed is recorded in the model so
    downstream artifacts can state how they were produced.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ModelError("X must be a 2-d array")
    if np.isnan(X).any():
        raise ModelError("X contains NaN")
    y_signed = _as_signed(y)
    if len(X) != len(y_signed):
        raise ModelError(f"X has {len(X)} rows but y has {len(y_signed)}")
    if len(X) < 2:
        raise ModelError("need at least two training rows")
    if len(set(y_signed.tolist())) < 2:
        raise ModelError("training labels are single-class")
    if rounds < 0 or depth < 1 or shrinkage <= 0:
        raise ModelError("rounds must be >= 0, depth >= 1, shrinkage > 0")

    n = len(X)
    if class_balanced:
        n_pos = int(np.sum(y_signed == 1))
        n_neg = n - n_pos
        w = np.where(y_signed == 1, 1.0 / (2 * n_pos), 1.0 / (2 * n_neg))
    else:
        w = np.full(n, 1.0 / n, dtype=np.float64)

    ctx = _SplitContext(X)
    all_rows = np.arange(n)
    trees: list[TreeNode] = []
    alphas: list[float] = []
    for _ in range(rounds):
        tree = _fit_tree(X, y_signed, w, all_rows, depth, ctx)
        if tree.is_leaf():
            break
        pred = tree.predict_batch(X)
        eps = float(np.sum(w[pred != y_signed]))
        if eps >= 0.5:
            break
        alpha = shrinkage * 0.5 * math.log((1.0 - eps) / max(eps, _EPS_FLOOR))
        trees.append(tree)
        alphas.append(alpha)
        if eps == 0.0:
            break
        w = w * np.exp(-alpha * y_signed * pred)
        w = w / np.sum(w)
    return BoostModel(
        trees=trees,
        alphas=alphas,
        width=X.shape[1],
        depth=depth,
        shrinkage=shrinkage,
        seed=seed,
        rounds_requested=rounds,
        class_balanced=class_balanced,
    )


def feature_importances(
    model: BoostModel, names: Sequence[str]
) -> list[tuple[str, float]]:
    """Stage-weighted error reduction per feature, normalized to sum to 1.

    Every feature appears in the result; features never chosen by a split
    get exactly 0.  Sorted by importance, descending, stable by feature
    index on ties.
    """
    if len(names) != model.width:
        raise ModelError(f"expected {model.width} names, got {len(names)}")
    raw = np.zeros(model.width, dtype=np.float64)

    def walk(node: TreeNode, alpha: float) -> None:
        if node.is_leaf():
            return
        raw[node.feature] += alpha * node.gain
        walk(node.left, alpha)
        walk(node.right, alpha)

    for tree, alpha in zip(model.trees, model.alphas):
        walk(tree, alpha)
    total = float(np.sum(raw))
    if total > 0:
        raw = raw / total
    order = sorted(range(model.width), key=lambda i: (-raw[i], i))
    return [(names[i], float(raw[i])) for i in order]


MODEL_FORMAT = "srl-adaboost"
MODEL_VERSION = 1


def model_to_json(model: BoostModel) -> str:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "width": model.width,
        "depth": model.depth,
        "shrinkage": model.shrinkage,
        "seed": model.seed,
        "rounds_requested": model.rounds_requested,
        "class_balanced": model.class_balanced,
        "metadata": model.metadata,
        "rounds": [
            {"alpha": alpha, "tree": tree.to_dict()}
            for tree, alpha in zip(model.trees, model.alphas)
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def model_from_json(text: str) -> BoostModel:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"bad model file: {exc}") from None
    if payload.get("format") != MODEL_FORMAT:
        raise ModelError("not a boosted-tree model file")
    if payload.get("version") != MODEL_VERSION:
        raise ModelError(f"unsupported model version {payload.get('version')}")
    rounds = payload["rounds"]
    return BoostModel(
        trees=[TreeNode.from_dict(r["tree"]) for r in rounds],
        alphas=[float(r["alpha"]) for r in rounds],
        width=payload["width"],
        depth=payload["depth"],
        shrinkage=payload["shrinkage"],
        seed=payload["seed"],
        rounds_requested=payload["rounds_requested"],
        class_balanced=payload.get("class_balanced", False),
        metadata=payload.get("metadata", {}),
    )


@dataclass
class Dataset:
    """Design matrix plus the sentence context needed for decoding and scoring."""

    keys: list[tuple[int, int]]
    X: np.ndarray
    y: np.ndarray
    sentences: list[Sentence]
    instances: list[Instance]


@dataclass
class GridSpec:
    rounds: tuple[int, ...] = (200,)
    depths: tuple[int, ...] = (2,)
    shrinkages: tuple[float, ...] = (1.0,)
    metric: str = "f1"


def grid_search(
    spec: GridSpec,
    train: Dataset,
    dev: Dataset,
    seed: int = 0,
    tau: float = 0.5,
    decode_mode: str = "threshold",
    class_balanced: bool = False,
) -> tuple[BoostModel, list[dict]]:
    """Train every combination and keep the best dev F1.

    Ties prefer fewer rounds, then smaller depth, then larger shrinkage.
    """
    from .ensemble import DecodeMode, ScoreTable, decode
    from .evaluation import prf

    if len(dev.keys) == 0:
        raise ModelError("empty dev set")
    if not spec.rounds or not spec.depths or not spec.shrinkages:
        raise ModelError("empty hyperparameter grid")
    report: list[dict] = []
    best = None
    best_key = None
    for rounds in spec.rounds:
        for depth in spec.depths:
            for shrinkage in spec.shrinkages:
                model = fit_adaboost(
                    train.X,
                    train.y,
                    rounds=rounds,
                    depth=depth,
                    shrinkage=shrinkage,
                    seed=seed,
                    class_balanced=class_balanced,
                )
                scores = model.score_batch(dev.X)
                table = ScoreTable.from_rows(
                    zip(dev.keys, scores.tolist()), source="gridsearch"
                )
                predictions = decode(table, DecodeMode(decode_mode), tau=tau)
                result = prf(predictions, dev.instances, dev.sentences)
                report.append(
                    {
                        "rounds": rounds,
                        "depth": depth,
                        "shrinkage": shrinkage,
                        "precision": result.precision,
                        "recall": result.recall,
                        "f1": result.f1,
                    }
                )
                key = (-result.f1, rounds, depth, -shrinkage)
                if best is None or key < best_key:
                    best = model
                    best_key = key
    return best, report
