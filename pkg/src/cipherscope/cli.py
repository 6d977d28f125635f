"""Command-line orchestration for the three studies: atlas, model, detection.

Subcommands:

  synth      generate a deterministic synthetic corpus
  encrypt    apply an intermittent-encryption mode across a corpus
  atlas      per-family metric quantiles over an alpha grid + trend report
  model      family constants, detectability ceilings and alpha* per family
  calibrate  per-family file thresholds from labeled validation data
  scan       chunk-level detection over a directory
  encode     per-chunk 16x16 graymap dataset + label manifest

All randomness flows from --seed; defaults mirror the study parameters
(10240-byte chunks, 64 KB blocks, 10 MB adaptive threshold, 200-file subsets,
100 replicates). Exit status: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import atlas as atlas_mod
from . import corpus as corpus_mod
from . import cryptosim, detection, mixture
from .bytestats import histogram, normalize
from .errors import CipherscopeError
from .histimage import encode as encode_hist
from .histimage import write_image

DEFAULT_ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
LABELS_MANIFEST = "labels.jsonl"
VERDICT_SUFFIX = ".verdicts.tsv"


def _map_jobs(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _parse_family_spec(text: str) -> corpus_mod.FamilySpec:
    parts = text.split(":")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError(
            "expected FAMILY:ARCHETYPE:COUNT:MIN_SIZE:MAX_SIZE")
    try:
        return corpus_mod.FamilySpec(
            family=parts[0], archetype=parts[1], count=int(parts[2]),
            min_size=int(parts[3]), max_size=int(parts[4]))
    except (ValueError, CipherscopeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _default_family_specs() -> Tuple[corpus_mod.FamilySpec, ...]:
    return tuple(
        corpus_mod.FamilySpec(family=corpus_mod.ARCHETYPE_FAMILY[a], archetype=a,
                              count=200, min_size=1_000_000, max_size=1_048_576)
        for a in corpus_mod.ARCHETYPES)


def cmd_synth(args) -> int:
    specs = tuple(args.family) if args.family else _default_family_specs()
    records = corpus_mod.synth_corpus(
        corpus_mod.CorpusSpec(out_dir=Path(args.out), families=specs), seed=args.seed)
    print(f"wrote {len(records)} files under {args.out}")
    return 0


def _load_corpus(root: str) -> List[corpus_mod.FileRecord]:
    errors: List[Tuple[Path, Exception]] = []
    records = corpus_mod.scan_corpus(root, errors=errors)
    for path, exc in errors:
        print(f"warning: skipped {path}: {exc}", file=sys.stderr)
    if not records:
        raise CipherscopeError(f"no readable files under {root}")
    return records


def cmd_encrypt(args) -> int:
    records = _load_corpus(args.in_dir)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    alphas = tuple(args.alpha) if args.alpha else ((1.0,) if args.mode in ("full", "adaptive") else None)
    if alphas is None:
        raise CipherscopeError(f"--alpha is required for mode {args.mode!r}")

    registry = cryptosim.NonceRegistry()
    tasks = []
    index = 0
    for record in records:
        for alpha in alphas:
            mode = cryptosim.EncryptionMode(
                variant=args.mode, fraction=alpha,
                block_size=args.block_size, size_threshold=args.size_threshold)
            key, nonce = cryptosim.derive_key_nonce(args.seed, index)
            registry.register(nonce)
            out_path = out_dir / f"{record.path.stem}__{args.mode}_a{alpha:g}{record.path.suffix}"
            tasks.append((record, mode, key, nonce, out_path))
            index += 1

    def run(task):
        record, mode, key, nonce, out_path = task
        data = record.path.read_bytes()
        file_plan = cryptosim.plan(mode, len(data))
        out_path.write_bytes(cryptosim.apply(data, file_plan, key, nonce))
        return corpus_mod.ManifestEntry(
            record=record, plan=file_plan, key_id=cryptosim.key_id(key),
            nonce_hex=nonce.hex(), output_path=out_path)

    entries = _map_jobs(run, tasks, args.jobs)
    manifest = corpus_mod.ExperimentManifest(
        entries=tuple(entries), seed=args.seed,
        mode=cryptosim.EncryptionMode(variant=args.mode, fraction=alphas[0],
                                      block_size=args.block_size,
                                      size_threshold=args.size_threshold),
        alpha_grid=alphas)
    corpus_mod.write_manifest(manifest, args.manifest)
    print(f"encrypted {len(records)} files x {len(alphas)} alphas -> {args.out}; "
          f"manifest {args.manifest}")
    return 0


def cmd_atlas(args) -> int:
    records = _load_corpus(args.in_dir)
    grid = tuple(args.alpha) if args.alpha else DEFAULT_ALPHA_GRID

    def load(record):
        return record.family, record.path.read_bytes()

    pairs = _map_jobs(load, records, args.jobs)
    result = atlas_mod.compute_atlas(pairs, grid, seed=args.seed)
    corpus_mod.emit_atlas_table(result.bands, args.out_table)
    atlas_mod.emit_trend_table(result.trends, args.out_trends)
    print(f"atlas over {len(records)} files, {len(grid)} alphas -> "
          f"{args.out_table}, {args.out_trends}")
    return 0


def cmd_model(args) -> int:
    records = _load_corpus(args.in_dir)
    by_family: Dict[str, List[corpus_mod.FileRecord]] = {}
    for record in records:
        by_family.setdefault(record.family, []).append(record)

    constants = []
    for family in sorted(by_family):
        dists, weights = [], []
        for record in by_family[family]:
            hist = histogram(record.path.read_bytes())
            if hist.total == 0:
                continue
            dists.append(normalize(hist))
            weights.append(hist.total)
        if not dists:
            continue
        constants.append(mixture.estimate_family_constant(
            dists, family, subset_size=args.subset, replicates=args.replicates,
            seed=args.seed, weights=weights, method=args.method))
    if not constants:
        raise CipherscopeError("no non-empty files to estimate from")
    corpus_mod.emit_family_constants(constants, args.out_constants)

    grid = tuple(args.alpha) if args.alpha else DEFAULT_ALPHA_GRID
    ceiling_rows = []
    for fc in constants:
        for alpha in grid:
            ceiling_rows.append((fc.family, alpha,
                                 mixture.ceiling(fc.c_squared_median, alpha)))
        try:
            a_star = mixture.alpha_star(fc.c_squared_median, args.tau)
            star_text = f"{a_star:.5f}"
        except CipherscopeError:
            star_text = "undefined (degenerate family, c^2 == 0)"
        print(f"family={fc.family} c2={fc.c_squared_median:.6g} "
              f"ci=[{fc.ci_low:.6g}, {fc.ci_high:.6g}] "
              f"alpha_star(tau={args.tau:g})={star_text}")
    if args.out_ceilings:
        with open(args.out_ceilings, "w", encoding="utf-8") as fh:
            fh.write("# ceiling-table v1\nfamily,alpha,ceiling_bits\n")
            for family, alpha, value in ceiling_rows:
                fh.write(f"{family},{alpha:.6g},{value:.6g}\n")
    print(f"family constants -> {args.out_constants}")
    return 0


def _truth_by_output(manifest: corpus_mod.ExperimentManifest) -> Dict[Path, corpus_mod.ManifestEntry]:
    return {Path(e.output_path).resolve(): e for e in manifest.entries}


def cmd_calibrate(args) -> int:
    manifest = corpus_mod.read_manifest(args.manifest)
    truth = _truth_by_output(manifest)
    classifier = detection.make_stat_classifier(args.theta)

    samples: List[Tuple[str, float, int]] = []

    def fraction_of(path: Path) -> float:
        chunks = detection.chunk(path.read_bytes(), args.chunk_len)
        verdicts = [classifier(c, i) for i, c in enumerate(chunks)]
        return sum(v.label for v in verdicts) / len(verdicts)

    encrypted = _load_corpus(args.encrypted)
    for record in encrypted:
        entry = truth.get(record.path.resolve())
        if entry is None:
            print(f"warning: {record.path} not in manifest, skipped", file=sys.stderr)
            continue
        label = 1 if entry.plan.achieved_coverage > 0 else 0
        samples.append((entry.record.family, fraction_of(record.path), label))
    if args.pristine:
        for record in _load_corpus(args.pristine):
            samples.append((record.family, fraction_of(record.path), 0))

    thresholds = detection.calibrate_thresholds(samples, grid_step=args.grid_step)
    detection.write_thresholds(thresholds, args.out)
    flat = f"; flat objective for {sorted(thresholds.flat_families)}" if thresholds.flat_families else ""
    print(f"calibrated {len(thresholds.thresholds)} families -> {args.out}{flat}")
    return 0


def cmd_scan(args) -> int:
    records = _load_corpus(args.in_dir)
    if args.thresholds:
        thresholds = detection.read_thresholds(args.thresholds)
    else:
        families = sorted({r.family for r in records})
        thresholds = detection.FamilyThresholds(
            thresholds={f: args.t_file for f in families},
            calibration_metric="fixed", flat_families=frozenset())
    classifier = detection.make_stat_classifier(args.theta)
    truth = None
    if args.manifest:
        truth = _truth_by_output(corpus_mod.read_manifest(args.manifest))

    def scan_one(record):
        if args.verdicts:
            verdict_path = Path(args.verdicts) / (record.path.name + VERDICT_SUFFIX)
            chunk_verdicts = detection.read_external_verdicts(verdict_path)
            t_file = thresholds.thresholds.get(record.family)
            if t_file is None:
                raise detection.UnknownFamilyError(
                    f"family {record.family!r} missing from threshold table")
            return detection.aggregate(chunk_verdicts, t_file)
        return detection.scan_file(record.path.read_bytes(), record.family,
                                   thresholds, classifier, args.chunk_len)

    verdicts = _map_jobs(scan_one, records, args.jobs)

    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("# scan-table v1\n")
        fh.write("path,family,chunk_count,encrypted_fraction,threshold,label\n")
        for record, fv in zip(records, verdicts):
            fh.write(f"{record.path},{record.family},{fv.chunk_count},"
                     f"{fv.encrypted_fraction:.6g},{fv.threshold:.6g},{fv.label}\n")

    flagged = sum(fv.label for fv in verdicts)
    print(f"scanned {len(records)} files, {flagged} labeled encrypted -> {args.out}")
    if truth is not None:
        matched = [(r, fv, truth[r.path.resolve()]) for r, fv in zip(records, verdicts)
                   if r.path.resolve() in truth]
        if matched:
            correct = sum(1 for _, fv, e in matched
                          if fv.label == (1 if e.plan.achieved_coverage > 0 else 0))
            print(f"ground truth: {correct}/{len(matched)} correct "
                  f"({100.0 * correct / len(matched):.2f}%)")
            by_alpha: Dict[float, List[int]] = {}
            for _, fv, e in matched:
                target = 1 if e.plan.achieved_coverage > 0 else 0
                by_alpha.setdefault(e.plan.mode.fraction, []).append(
                    1 if fv.label == target else 0)
            for alpha in sorted(by_alpha):
                oks = by_alpha[alpha]
                print(f"  alpha={alpha:g}: {sum(oks)}/{len(oks)} "
                      f"({100.0 * sum(oks) / len(oks):.2f}%)")
    return 0


def cmd_encode(args) -> int:
    records = _load_corpus(args.in_dir)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = None
    if args.manifest:
        truth = _truth_by_output(corpus_mod.read_manifest(args.manifest))

    n_images = 0
    with open(out_dir / LABELS_MANIFEST, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"schema_version": 1, "kind": "chunk-image-labels",
                             "chunk_len": args.chunk_len}) + "\n")
        for record in records:
            data = record.path.read_bytes()
            if not data:
                continue
            chunks = detection.chunk(data, args.chunk_len)
            if truth is not None:
                entry = truth.get(record.path.resolve())
                if entry is None:
                    print(f"warning: {record.path} not in manifest, labeled {args.label}",
                          file=sys.stderr)
                    labels = [args.label] * len(chunks)
                else:
                    labels = detection.chunk_truth_labels(entry.plan, args.chunk_len)
            else:
                labels = [args.label] * len(chunks)
            for i, (chunk_bytes, label) in enumerate(zip(chunks, labels)):
                name = f"{record.path.stem}__c{i:04d}__l{label}.pgm"
                write_image(encode_hist(histogram(chunk_bytes)), out_dir / name)
                fh.write(json.dumps({
                    "image": name, "source": record.path.name,
                    "chunk_index": i, "label": label}, sort_keys=True) + "\n")
                n_images += 1
    print(f"encoded {n_images} chunk images -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cipherscope",
        description="Measurement, modeling, and detection for intermittently encrypted files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", action="append", type=_parse_family_spec,
                   metavar="FAMILY:ARCHETYPE:COUNT:MIN:MAX",
                   help="repeatable; archetypes: text, structured, precompressed")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("encrypt", help="apply an encryption mode across a corpus")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", required=True, choices=cryptosim.VARIANTS)
    p.add_argument("--alpha", action="append", type=float,
                   help="coverage fraction; repeat for a grid")
    p.add_argument("--block-size", type=int, default=cryptosim.DEFAULT_BLOCK_SIZE)
    p.add_argument("--size-threshold", type=int, default=cryptosim.DEFAULT_SIZE_THRESHOLD)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", required=True, help="output manifest path")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_encrypt)

    p = sub.add_parser("atlas", help="metric quantiles over an alpha grid + trends")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--alpha", action="append", type=float,
                   help="grid point; default 0.0..1.0 step 0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-table", required=True)
    p.add_argument("--out-trends", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_atlas)

    p = sub.add_parser("model", help="family constants, ceilings, alpha*")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--subset", type=int, default=200)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--method", choices=("pool", "mean"), default="pool")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=_positive_float, default=0.01,
                   help="detector threshold for alpha*")
    p.add_argument("--alpha", action="append", type=float)
    p.add_argument("--out-constants", required=True)
    p.add_argument("--out-ceilings")
    p.set_defaults(handler=cmd_model)

    p = sub.add_parser("calibrate", help="per-family thresholds from labeled data")
    p.add_argument("--encrypted", required=True, help="directory of encrypted outputs")
    p.add_argument("--manifest", required=True, help="ground-truth manifest")
    p.add_argument("--pristine", help="directory of pristine files (negatives)")
    p.add_argument("--theta", type=float, default=detection.DEFAULT_CHUNK_THETA)
    p.add_argument("--chunk-len", type=int, default=detection.DEFAULT_CHUNK_LEN)
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--out", required=True, help="output thresholds JSON")
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("scan", help="chunk-level detection over a directory")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--thresholds", help="thresholds JSON from `calibrate`")
    p.add_argument("--t-file", type=float, default=0.5,
                   help="fallback threshold when no table is given")
    p.add_argument("--theta", type=float, default=detection.DEFAULT_CHUNK_THETA)
    p.add_argument("--chunk-len", type=int, default=detection.DEFAULT_CHUNK_LEN)
    p.add_argument("--verdicts", help="directory of external verdict files")
    p.add_argument("--manifest", help="ground-truth manifest for summary accuracy")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("encode", help="chunk graymap dataset + label manifest")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--chunk-len", type=int, default=detection.DEFAULT_CHUNK_LEN)
    p.add_argument("--manifest", help="ground-truth manifest for chunk labels")
    p.add_argument("--label", type=int, choices=(0, 1), default=0,
                   help="label for files without ground truth")
    p.set_defaults(handler=cmd_encode)

    return parser


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CipherscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
