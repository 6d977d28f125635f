"""Chunk-level detection pipeline: chunking, per-chunk verdicts, aggregation,
and per-family threshold calibration.

A file is split into fixed 10 KB chunks, every chunk gets a binary verdict
(from the built-in statistical classifier or from an external verdict file),
and the file is labeled encrypted when the fraction p of encrypted-labeled
chunks reaches the family threshold t_file(F). The statistical classifier
scores a chunk by its exact KL divergence to uniform in bits and calls it
encrypted when the score falls at or below theta; 0.05 bits sits roughly
three times above the ~0.018-bit expectation for a uniform 10 KB sample.

Verdict interchange format: one record per line, tab-separated fields
``index  label  score``, UTF-8, sorted by index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .bytestats import histogram, normalize
from .cryptosim import EncryptionPlan
from .errors import (
    ChunkLenTooSmallError,
    ChunkTooSmallError,
    EmptyFamilyError,
    EmptyFileError,
    IndexGapError,
    MalformedVerdictFileError,
    NoVerdictsError,
    UnknownFamilyError,
)

DEFAULT_CHUNK_LEN = 10240
MIN_CHUNK_LEN = 256
DEFAULT_CHUNK_THETA = 0.05
BALANCED_ACCURACY = "balanced_accuracy"
ACCURACY = "accuracy"


@dataclass(frozen=True)
class ChunkVerdict:
    index: int
    label: int  # 1 = encrypted
    score: float

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")
        if self.index < 0:
            raise ValueError("index must be >= 0")


@dataclass(frozen=True)
class FileVerdict:
    chunk_count: int
    encrypted_fraction: float
    threshold: float
    label: int

    def __post_init__(self):
        if self.chunk_count < 1:
            raise ValueError("chunk_count must be >= 1")
        if self.label != (1 if self.encrypted_fraction >= self.threshold else 0):
            raise ValueError("label inconsistent with threshold rule")


@dataclass(frozen=True)
class FamilyThresholds:
    thresholds: Mapping[str, float]
    calibration_metric: str
    flat_families: frozenset  # families whose calibration objective was flat

    def __post_init__(self):
        for fam, t in self.thresholds.items():
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"threshold for {fam!r} outside [0, 1]")


def chunk(file_bytes: bytes, chunk_len: int = DEFAULT_CHUNK_LEN) -> List[bytes]:
    """Split into ceil(N / chunk_len) non-overlapping chunks.

    The final chunk may be shorter; a tail below 256 bytes is merged into the
    previous chunk (histograms of tiny tails are pure noise).
    """
    if chunk_len < MIN_CHUNK_LEN:
        raise ChunkLenTooSmallError(f"chunk_len must be >= {MIN_CHUNK_LEN}")
    n = len(file_bytes)
    if n == 0:
        raise EmptyFileError("cannot chunk an empty file")
    chunks = [file_bytes[i:i + chunk_len] for i in range(0, n, chunk_len)]
    if len(chunks) > 1 and len(chunks[-1]) < MIN_CHUNK_LEN:
        tail = chunks.pop()
        chunks[-1] = chunks[-1] + tail
    return chunks


def chunk_kl_to_uniform_bits(chunk_bytes: bytes) -> float:
    """Exact KL divergence of the chunk's byte distribution to uniform, in bits."""
    dist = normalize(histogram(chunk_bytes))
    p = dist.probs
    mask = p > 0
    return float((p[mask] * np.log2(256.0 * p[mask])).sum())


def classify_chunk_stat(chunk_bytes: bytes, theta_chunk: float = DEFAULT_CHUNK_THETA,
                        index: int = 0) -> ChunkVerdict:
    """Statistical chunk verdict: encrypted iff KL-to-uniform <= theta_chunk."""
    if len(chunk_bytes) < MIN_CHUNK_LEN:
        raise ChunkTooSmallError(f"chunk must be >= {MIN_CHUNK_LEN} bytes")
    score = chunk_kl_to_uniform_bits(chunk_bytes)
    return ChunkVerdict(index=index, label=1 if score <= theta_chunk else 0, score=score)


def read_external_verdicts(path: Union[str, Path]) -> List[ChunkVerdict]:
    """Parse a verdict interchange file into verdicts sorted by index.

    Raises MalformedVerdictFileError on parse errors, bad labels, or
    duplicate indices, and IndexGapError when indices are not a contiguous
    run starting at 0.
    """
    verdicts = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedVerdictFileError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
            try:
                index = int(parts[0])
                label = int(parts[1])
                score = float(parts[2])
            except ValueError as exc:
                raise MalformedVerdictFileError(f"{path}:{lineno}: {exc}") from exc
            if label not in (0, 1):
                raise MalformedVerdictFileError(f"{path}:{lineno}: label must be 0 or 1")
            if index < 0:
                raise MalformedVerdictFileError(f"{path}:{lineno}: negative index")
            verdicts.append(ChunkVerdict(index=index, label=label, score=score))

    verdicts.sort(key=lambda v: v.index)
    seen = [v.index for v in verdicts]
    if len(set(seen)) != len(seen):
        raise MalformedVerdictFileError(f"{path}: duplicate chunk index")
    if seen and seen != list(range(seen[-1] + 1)):
        raise IndexGapError(f"{path}: chunk indices must run 0..{len(seen) - 1} without gaps")
    return verdicts


def write_verdicts(verdicts: Sequence[ChunkVerdict], path: Union[str, Path]) -> None:
    """Write the tab-separated verdict interchange file, sorted by index."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in sorted(verdicts, key=lambda v: v.index):
            fh.write(f"{v.index}\t{v.label}\t{v.score:.6g}\n")


def aggregate(verdicts: Sequence[ChunkVerdict], t_file: float) -> FileVerdict:
    """File-level decision: encrypted iff the labeled fraction p >= t_file."""
    if not verdicts:
        raise NoVerdictsError("aggregate needs at least one chunk verdict")
    if not 0.0 <= t_file <= 1.0:
        raise ValueError("t_file must be in [0, 1]")
    p = sum(v.label for v in verdicts) / len(verdicts)
    return FileVerdict(chunk_count=len(verdicts), encrypted_fraction=p,
                       threshold=t_file, label=1 if p >= t_file else 0)


def _objective(tp: int, tn: int, fp: int, fn: int, metric: str) -> float:
    if metric == ACCURACY:
        total = tp + tn + fp + fn
        return (tp + tn) / total if total else 0.0
    if metric == BALANCED_ACCURACY:
        recalls = []
        if tp + fn:
            recalls.append(tp / (tp + fn))
        if tn + fp:
            recalls.append(tn / (tn + fp))
        return sum(recalls) / len(recalls) if recalls else 0.0
    raise ValueError(f"unknown objective {metric!r}")


def calibrate_thresholds(
    validation: Iterable[Tuple[str, float, int]],
    grid_step: float = 0.01,
    objective: str = BALANCED_ACCURACY,
) -> FamilyThresholds:
    """Pick t_file(F) per family by exhaustive grid search over [0, 1].

    `validation` holds (family, encrypted_fraction, true_label) records.
    Ties break toward the smallest threshold; families whose objective is
    flat across the whole grid are flagged.
    """
    if not 0.0 < grid_step <= 1.0:
        raise ValueError("grid_step must be in (0, 1]")
    by_family: Dict[str, List[Tuple[float, int]]] = {}
    for family, fraction, truth in validation:
        if truth not in (0, 1):
            raise ValueError("true labels must be 0 or 1")
        by_family.setdefault(family, []).append((float(fraction), int(truth)))
    if not by_family:
        raise EmptyFamilyError("calibration needs at least one validation record")

    n_steps = int(round(1.0 / grid_step))
    grid = [min(round(i * grid_step, 12), 1.0) for i in range(n_steps + 1)]

    thresholds: Dict[str, float] = {}
    flat = set()
    for family, records in sorted(by_family.items()):
        if not records:
            raise EmptyFamilyError(f"no validation records for family {family!r}")
        scores = []
        for t in grid:
            tp = sum(1 for p, y in records if y == 1 and p >= t)
            fn = sum(1 for p, y in records if y == 1 and p < t)
            fp = sum(1 for p, y in records if y == 0 and p >= t)
            tn = sum(1 for p, y in records if y == 0 and p < t)
            scores.append(_objective(tp, tn, fp, fn, objective))
        best = max(scores)
        thresholds[family] = grid[scores.index(best)]  # first index == smallest threshold
        if best == min(scores):
            flat.add(family)
    return FamilyThresholds(thresholds=dict(thresholds), calibration_metric=objective,
                            flat_families=frozenset(flat))


def best_score_threshold(scores: Sequence[float], labels: Sequence[int],
                         objective: str = BALANCED_ACCURACY) -> float:
    """1-D threshold search over raw scores (label 1 iff score <= theta).

    Candidates are midpoints between adjacent sorted scores plus the
    endpoints; ties break toward the smallest threshold. Used to calibrate
    the chunk statistic and endpoint-only baselines.
    """
    if len(scores) != len(labels) or not scores:
        raise ValueError("scores and labels must be non-empty and aligned")
    uniq = sorted(set(scores))
    candidates = [uniq[0] - 1.0]
    candidates += [(a + b) / 2.0 for a, b in zip(uniq, uniq[1:])]
    candidates.append(uniq[-1])
    best_theta, best_obj = candidates[0], -1.0
    for theta in candidates:
        tp = sum(1 for s, y in zip(scores, labels) if y == 1 and s <= theta)
        fn = sum(1 for s, y in zip(scores, labels) if y == 1 and s > theta)
        fp = sum(1 for s, y in zip(scores, labels) if y == 0 and s <= theta)
        tn = sum(1 for s, y in zip(scores, labels) if y == 0 and s > theta)
        obj = _objective(tp, tn, fp, fn, objective)
        if obj > best_obj:
            best_theta, best_obj = theta, obj
    return best_theta


def write_thresholds(thresholds: FamilyThresholds, path: Union[str, Path]) -> None:
    """Persist a calibrated threshold table as versioned JSON."""
    payload = {
        "schema_version": 1,
        "kind": "family-thresholds",
        "calibration_metric": thresholds.calibration_metric,
        "flat_families": sorted(thresholds.flat_families),
        "thresholds": dict(sorted(thresholds.thresholds.items())),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_thresholds(path: Union[str, Path]) -> FamilyThresholds:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("schema_version") != 1 or obj.get("kind") != "family-thresholds":
        raise MalformedVerdictFileError(f"{path}: not a v1 family-thresholds file")
    return FamilyThresholds(thresholds=obj["thresholds"],
                            calibration_metric=obj.get("calibration_metric", BALANCED_ACCURACY),
                            flat_families=frozenset(obj.get("flat_families", [])))


def scan_file(
    file_bytes: bytes,
    family: str,
    thresholds: FamilyThresholds,
    classifier: Optional[Callable[[bytes, int], ChunkVerdict]] = None,
    chunk_len: int = DEFAULT_CHUNK_LEN,
) -> FileVerdict:
    """Full pipeline for one file: chunk, classify every chunk, aggregate.

    `classifier` maps (chunk_bytes, index) to a ChunkVerdict; the default is
    the statistical classifier at theta = 0.05 bits.
    """
    if family not in thresholds.thresholds:
        raise UnknownFamilyError(f"family {family!r} missing from threshold table")
    if classifier is None:
        classifier = classify_chunk_stat_default
    verdicts = [classifier(c, i) for i, c in enumerate(chunk(file_bytes, chunk_len))]
    return aggregate(verdicts, thresholds.thresholds[family])


def classify_chunk_stat_default(chunk_bytes: bytes, index: int = 0) -> ChunkVerdict:
    """Statistical classifier at the default theta, in (chunk, index) form."""
    return classify_chunk_stat(chunk_bytes, DEFAULT_CHUNK_THETA, index)


def make_stat_classifier(theta_chunk: float) -> Callable[[bytes, int], ChunkVerdict]:
    """Statistical classifier with a custom theta, in (chunk, index) form."""
    def _classify(chunk_bytes: bytes, index: int = 0) -> ChunkVerdict:
        return classify_chunk_stat(chunk_bytes, theta_chunk, index)
    return _classify


def chunk_truth_labels(plan: EncryptionPlan, chunk_len: int = DEFAULT_CHUNK_LEN) -> List[int]:
    """Ground-truth chunk labels for evaluation: a chunk counts as encrypted
    when at least half of its bytes fall inside the plan's ranges."""
    n = plan.file_length
    if n == 0:
        return []
    bounds = []
    pos = 0
    while pos < n:
        bounds.append((pos, min(pos + chunk_len, n)))
        pos += chunk_len
    if len(bounds) > 1 and bounds[-1][1] - bounds[-1][0] < MIN_CHUNK_LEN:
        last = bounds.pop()
        bounds[-1] = (bounds[-1][0], last[1])

    labels = []
    for start, end in bounds:
        covered = 0
        for off, length in plan.ranges:
            lo = max(start, off)
            hi = min(end, off + length)
            if hi > lo:
                covered += hi - lo
        labels.append(1 if 2 * covered >= end - start else 0)
    return labels
