"""Corpus ingestion, synthetic corpora, experiment manifests, result tables.

Family labels come from the file extension first, then from a short list of
magic-byte signatures, else "unknown". Synthetic corpora provide desk-scale
stand-ins for real mixed-file datasets with three archetypes whose byte
distributions bracket the spectrum:

* text            - skewed ASCII unigram sampler (txt-like, entropy ~4.4 bits)
* structured      - constant record headers over a low-cardinality, zero-heavy
                    payload (xls-like, large distance from uniform)
* precompressed   - keystream bytes with sparse constant markers (mp4-like,
                    entropy above 7.99 bits)

Manifests are line-delimited JSON with a mandatory schema version header;
result tables are comma-separated with 6-significant-digit formatting.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bytestats import QuantileBand
from .cryptosim import EncryptionMode, EncryptionPlan
from .errors import (
    EmptyCorpusError,
    MalformedLineError,
    ManifestValidationError,
    SchemaMismatchError,
    SpecInvalidError,
)
from .mixture import FamilyConstant

MANIFEST_SCHEMA_VERSION = 1
ATLAS_SCHEMA_VERSION = 1

#: The eleven file families tracked by the atlas, grouped by compression class.
FAMILIES = ("bmp", "png", "txt", "doc", "docx", "pdf", "ppt", "xls", "jpg", "mp3", "mp4")

_MAGIC_SIGNATURES = (
    (b"\x89PNG\r\n\x1a\n", "png"),
    (b"\xff\xd8\xff", "jpg"),
    (b"%PDF", "pdf"),
    (b"PK\x03\x04", "docx"),  # zip container; docx is the zip-based family here
)

TEXT = "text"
STRUCTURED = "structured"
PRECOMPRESSED = "precompressed"
ARCHETYPES = (TEXT, STRUCTURED, PRECOMPRESSED)

#: Default family name per archetype, mirroring the corpus each one imitates.
ARCHETYPE_FAMILY = {TEXT: "txt", STRUCTURED: "xls", PRECOMPRESSED: "mp4"}


@dataclass(frozen=True)
class FileRecord:
    path: Path
    family: str
    size_bytes: int
    content_digest: str  # sha256 hex


@dataclass(frozen=True)
class FamilySpec:
    family: str
    archetype: str
    count: int
    min_size: int
    max_size: int

    def __post_init__(self):
        if self.archetype not in ARCHETYPES:
            raise SpecInvalidError(f"unknown archetype {self.archetype!r}")
        if self.count < 1:
            raise SpecInvalidError("count must be >= 1")
        if not 0 < self.min_size <= self.max_size:
            raise SpecInvalidError("need 0 < min_size <= max_size")


@dataclass(frozen=True)
class CorpusSpec:
    out_dir: Path
    families: Tuple[FamilySpec, ...]

    def __post_init__(self):
        if not self.families:
            raise SpecInvalidError("corpus spec needs at least one family")
        names = [f.family for f in self.families]
        if len(set(names)) != len(names):
            raise SpecInvalidError("duplicate family in corpus spec")


@dataclass(frozen=True)
class ManifestEntry:
    record: FileRecord
    plan: EncryptionPlan
    key_id: str
    nonce_hex: str
    output_path: Path


@dataclass(frozen=True)
class ExperimentManifest:
    entries: Tuple[ManifestEntry, ...]
    seed: int
    mode: EncryptionMode
    alpha_grid: Tuple[float, ...]

    def validate(self) -> None:
        nonces = [e.nonce_hex for e in self.entries]
        if len(set(nonces)) != len(nonces):
            raise ManifestValidationError("duplicate nonce across manifest records")
        outputs = [str(e.output_path) for e in self.entries]
        if len(set(outputs)) != len(outputs):
            raise ManifestValidationError("duplicate output path across manifest records")


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def classify_family(path: Path, head: bytes) -> str:
    """Extension rule first, magic-byte sniff as fallback, else unknown."""
    ext = path.suffix.lower().lstrip(".")
    if ext in FAMILIES:
        return ext
    for magic, family in _MAGIC_SIGNATURES:
        if head.startswith(magic):
            return family
    return "unknown"


def scan_corpus(root: Union[str, Path],
                errors: Optional[List[Tuple[Path, Exception]]] = None) -> List[FileRecord]:
    """One record per regular file under root, ordered by path.

    Per-file read failures are appended to `errors` (when given) instead of
    aborting the scan.
    """
    root = Path(root)
    if not root.is_dir():
        raise EmptyCorpusError(f"not a readable directory: {root}")
    records = []
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        try:
            data = path.read_bytes()
        except OSError as exc:
            if errors is not None:
                errors.append((path, exc))
            continue
        records.append(FileRecord(
            path=path,
            family=classify_family(path, data[:16]),
            size_bytes=len(data),
            content_digest=_digest(data),
        ))
    return records


# --- synthetic archetypes ---------------------------------------------------

def _text_unigram_table() -> Tuple[np.ndarray, np.ndarray]:
    """Byte values and probabilities of the skewed ASCII sampler."""
    freq = {
        " ": 0.1600, "e": 0.0900, "t": 0.0660, "a": 0.0600, "o": 0.0550,
        "i": 0.0520, "n": 0.0500, "s": 0.0470, "h": 0.0450, "r": 0.0430,
        "d": 0.0310, "l": 0.0290, "c": 0.0210, "u": 0.0200, "m": 0.0180,
        "w": 0.0170, "f": 0.0160, "g": 0.0150, "y": 0.0140, "p": 0.0140,
        "b": 0.0110, "v": 0.0080, "k": 0.0060, "j": 0.0012, "x": 0.0010,
        "q": 0.0008, "z": 0.0006, "\n": 0.0200, ",": 0.0080, ".": 0.0080,
    }
    for ch in "ETAONISHR":
        freq[ch] = 0.0020
    for ch in "0123456789":
        freq[ch] = 0.0010
    values = np.array([ord(c) for c in freq], dtype=np.uint8)
    probs = np.array(list(freq.values()))
    return values, probs / probs.sum()

_TEXT_VALUES, _TEXT_PROBS = _text_unigram_table()

_RECORD_HEADER = bytes([0x09, 0x08, 0x10, 0x00, 0x42, 0x49, 0x46, 0x38])
_PAYLOAD_VALUES = np.arange(1, 17, dtype=np.uint8)  # low-cardinality cell bytes
_MARKER = b"mdatmoov"
_MARKER_STRIDE = 640  # structured fraction 8/640 = 1.25%, keeps entropy >= 7.99


def text_unigram_distribution() -> np.ndarray:
    """Full 256-bin probability vector of the text archetype's sampler."""
    probs = np.zeros(256)
    probs[_TEXT_VALUES] = _TEXT_PROBS
    return probs


def generate_archetype_bytes(archetype: str, size: int, rng: np.random.Generator) -> bytes:
    """Deterministically sample `size` bytes of the given archetype."""
    if size < 0:
        raise SpecInvalidError("size must be >= 0")
    if archetype == TEXT:
        return rng.choice(_TEXT_VALUES, size=size, p=_TEXT_PROBS).tobytes()
    if archetype == STRUCTURED:
        # 64-byte records: constant 8-byte header, payload 60% zeros and
        # 40% low-cardinality cell bytes
        n_records = size // 64 + 1
        payload = rng.choice(_PAYLOAD_VALUES, size=n_records * 56)
        zero_mask = rng.random(n_records * 56) < 0.60
        payload[zero_mask] = 0
        records = np.concatenate([
            np.tile(np.frombuffer(_RECORD_HEADER, dtype=np.uint8), (n_records, 1)),
            payload.reshape(n_records, 56),
        ], axis=1)
        return records.reshape(-1)[:size].tobytes()
    if archetype == PRECOMPRESSED:
        buf = bytearray(rng.bytes(size))
        marker = np.frombuffer(_MARKER, dtype=np.uint8)
        for pos in range(0, size - len(_MARKER), _MARKER_STRIDE):
            buf[pos:pos + len(_MARKER)] = marker.tobytes()
        return bytes(buf)
    raise SpecInvalidError(f"unknown archetype {archetype!r}")


def synth_corpus(spec: CorpusSpec, seed: int) -> List[FileRecord]:
    """Write a deterministic synthetic corpus to spec.out_dir.

    Files land under <out_dir>/<family>/<family>_<index>.<family>; the same
    spec and seed always produce byte-identical corpora.
    """
    out = Path(spec.out_dir)
    records = []
    for fam in spec.families:
        fam_dir = out / fam.family
        fam_dir.mkdir(parents=True, exist_ok=True)
        for i in range(fam.count):
            # per-file generator keyed by (family, index) so parallel or
            # partial regeneration yields identical bytes
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed,
                                       spawn_key=(hash_family(fam.family), i)))
            size = int(rng.integers(fam.min_size, fam.max_size + 1))
            data = generate_archetype_bytes(fam.archetype, size, rng)
            path = fam_dir / f"{fam.family}_{i:04d}.{fam.family}"
            path.write_bytes(data)
            records.append(FileRecord(path=path, family=fam.family,
                                      size_bytes=size, content_digest=_digest(data)))
    return records


def hash_family(family: str) -> int:
    """Stable small integer for seeding, independent of PYTHONHASHSEED."""
    return int.from_bytes(hashlib.sha256(family.encode()).digest()[:4], "big")


# --- manifests ---------------------------------------------------------------

def _mode_to_json(mode: EncryptionMode) -> dict:
    return {"variant": mode.variant, "fraction": mode.fraction,
            "block_size": mode.block_size, "size_threshold": mode.size_threshold}


def _mode_from_json(obj: dict) -> EncryptionMode:
    return EncryptionMode(variant=obj["variant"], fraction=obj["fraction"],
                          block_size=obj["block_size"], size_threshold=obj["size_threshold"])


def _entry_to_json(entry: ManifestEntry) -> dict:
    return {
        "path": str(entry.record.path),
        "family": entry.record.family,
        "size_bytes": entry.record.size_bytes,
        "content_digest": entry.record.content_digest,
        "mode": _mode_to_json(entry.plan.mode),
        "ranges": [[off, length] for off, length in entry.plan.ranges],
        "file_length": entry.plan.file_length,
        "achieved_coverage": entry.plan.achieved_coverage,
        "key_id": entry.key_id,
        "nonce": entry.nonce_hex,
        "output_path": str(entry.output_path),
    }


def _entry_from_json(obj: dict) -> ManifestEntry:
    record = FileRecord(path=Path(obj["path"]), family=obj["family"],
                        size_bytes=obj["size_bytes"], content_digest=obj["content_digest"])
    plan = EncryptionPlan(
        ranges=tuple((int(off), int(length)) for off, length in obj["ranges"]),
        file_length=obj["file_length"],
        achieved_coverage=obj["achieved_coverage"],
        mode=_mode_from_json(obj["mode"]),
    )
    return ManifestEntry(record=record, plan=plan, key_id=obj["key_id"],
                         nonce_hex=obj["nonce"], output_path=Path(obj["output_path"]))


def write_manifest(manifest: ExperimentManifest, path: Union[str, Path]) -> None:
    """Write a line-delimited manifest; invariants are enforced here."""
    manifest.validate()
    header = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": "experiment-manifest",
        "seed": manifest.seed,
        "mode": _mode_to_json(manifest.mode),
        "alpha_grid": list(manifest.alpha_grid),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for entry in manifest.entries:
            fh.write(json.dumps(_entry_to_json(entry), sort_keys=True) + "\n")


def read_manifest(path: Union[str, Path]) -> ExperimentManifest:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise SchemaMismatchError(f"{path}: empty manifest")

    def parse(lineno: int, line: str) -> dict:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLineError(f"{path}:{lineno}: {exc}") from exc
        if not isinstance(obj, dict):
            raise MalformedLineError(f"{path}:{lineno}: expected an object")
        return obj

    header = parse(1, lines[0])
    if header.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"{path}: schema_version {header.get('schema_version')!r}, "
            f"expected {MANIFEST_SCHEMA_VERSION}")
    try:
        entries = tuple(_entry_from_json(parse(i + 2, ln)) for i, ln in enumerate(lines[1:]))
        manifest = ExperimentManifest(
            entries=entries,
            seed=header["seed"],
            mode=_mode_from_json(header["mode"]),
            alpha_grid=tuple(header["alpha_grid"]),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedLineError(f"{path}: missing field {exc}") from exc
    manifest.validate()
    return manifest


# --- result tables -----------------------------------------------------------

def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def emit_atlas_table(
    rows: Iterable[Tuple[str, float, str, QuantileBand]],
    path: Union[str, Path],
) -> None:
    """Comma-separated quantile table, rows sorted by (family, metric, alpha).

    Row fields: family, alpha, metric, q10, q25, q50, q75, q90.
    """
    rows = list(rows)
    if not rows:
        raise EmptyCorpusError("atlas table needs at least one aggregate row")
    rows.sort(key=lambda r: (r[0], r[2], r[1]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# atlas-table v{ATLAS_SCHEMA_VERSION}\n")
        fh.write("family,alpha,metric,q10,q25,q50,q75,q90\n")
        for family, alpha, metric, band in rows:
            fields = [family, _fmt6(alpha), metric, _fmt6(band.q10), _fmt6(band.q25),
                      _fmt6(band.q50), _fmt6(band.q75), _fmt6(band.q90)]
            fh.write(",".join(fields) + "\n")


def emit_family_constants(constants: Sequence[FamilyConstant], path: Union[str, Path]) -> None:
    """Comma-separated family-constant table, sorted by family."""
    if not constants:
        raise EmptyCorpusError("family constant table needs at least one row")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# family-constants v{ATLAS_SCHEMA_VERSION}\n")
        fh.write("family,c_squared_median,ci_low,ci_high,replicates,subset_size\n")
        for fc in sorted(constants, key=lambda c: c.family):
            fh.write(",".join([
                fc.family, _fmt6(fc.c_squared_median), _fmt6(fc.ci_low),
                _fmt6(fc.ci_high), str(fc.replicates), str(fc.subset_size),
            ]) + "\n")
