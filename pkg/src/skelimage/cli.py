"""Batch command line tying ingestion, encoding, tensor I/O, manifests, and
score fusion together.

Subcommands:

    encode   skeleton files -> one <sample_id>.tensor per sample
    info     print a tensor file's header (dims, dtype, layout)
    preview  export selected tensor channels as a PNG
    split    build train/test manifests from a sample metadata table
    fuse     late-fuse score files and report macro accuracy

Per-sample failures during ``encode`` are logged and counted but never
abort the batch; the exit code is 0 only when every sample encoded.
Worker count affects wall time only, never output bytes.
"""

from __future__ import annotations

import argparse
import csv
import glob as globlib
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .baselines import (
    COORDINATE,
    NAIVE_MOTION,
    TSSI,
    encode_coordinate_image,
    encode_naive_motion,
    encode_tssi,
)
from .chain_builder import ChainOrder, default_chain, load_chain
from .fusion_eval import late_fuse, per_class_accuracy, read_labels, read_scores, write_scores
from .motion_encoder import (
    DEFAULT_MAGNITUDE_THRESHOLD,
    DEFAULT_MAX_PERSONS,
    DEFAULT_TARGET_WIDTH,
    MAGNITUDE,
    MAGNITUDE_ORIENTATION,
    ORIENTATION,
    EncodedImage,
    EncoderConfig,
    encode_skelemotion,
    stack_persons,
)
from .skeleton_data import (
    SampleInfo,
    SkeletonParseError,
    SkeletonSequence,
    build_manifest,
    parse_interchange,
    parse_ntu_skeleton,
    read_manifest_ids,
    select_bodies,
    write_manifest,
)
from .tensor_io import TensorFormatError, export_png, read_header, read_tensor, write_tensor

REPRESENTATIONS = (
    "coord",
    "tssi",
    "naive-motion",
    "skelemotion-mag",
    "skelemotion-ori",
    "skelemotion-magori",
)

_SKELEMOTION_KINDS = {
    "skelemotion-mag": MAGNITUDE,
    "skelemotion-ori": ORIENTATION,
    "skelemotion-magori": MAGNITUDE_ORIENTATION,
}

_CONFIG_KEYS = ("representation", "distances", "threshold", "width", "persons")


@dataclass(frozen=True)
class JobSpec:
    """One batch encoding job."""

    inputs: tuple[str, ...]
    out_dir: str
    config: EncoderConfig
    representation: str
    chain: ChainOrder
    manifest: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")


def load_sequence(path: str | Path) -> SkeletonSequence:
    """Parse one input file: .json as interchange, anything else as NTU text."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        seq = parse_interchange(text)
        if not seq.sample_id:
            seq = replace(seq, sample_id=path.stem)
        return seq
    return parse_ntu_skeleton(text, sample_id=path.stem)


def encode_sample(
    seq: SkeletonSequence, representation: str, cfg: EncoderConfig, chain: ChainOrder
) -> EncodedImage:
    """Select bodies, encode each, and stack persons into one image."""
    tracks = select_bodies(seq, cfg.max_persons)
    images = []
    for track in tracks:
        if representation in _SKELEMOTION_KINDS:
            images.append(encode_skelemotion(track, chain, cfg))
        elif representation == COORDINATE:
            images.append(encode_coordinate_image(track, cfg))
        elif representation == TSSI:
            images.append(encode_tssi(track, chain, cfg))
        elif representation == NAIVE_MOTION:
            images.append(encode_naive_motion(track, cfg))
        else:
            raise ValueError(f"unknown representation {representation!r}")
    return stack_persons(images, cfg.max_persons)


def _encode_one(task: tuple) -> tuple[str, str | None, int, str | None]:
    path, out_dir, representation, cfg, chain = task
    try:
        seq = load_sequence(path)
        image = encode_sample(seq, representation, cfg, chain)
        out_path = Path(out_dir) / f"{seq.sample_id}.tensor"
        nbytes = write_tensor(image, out_path)
        return path, seq.sample_id, nbytes, None
    except Exception as exc:  # per-sample isolation: log and continue the batch
        return path, None, 0, f"{type(exc).__name__}: {exc}"


def run_encode_job(job: JobSpec) -> tuple[int, int]:
    """Encode every input of a job; returns (encoded, failed) counts."""
    inputs = list(job.inputs)
    if job.manifest:
        keep = set(read_manifest_ids(job.manifest))
        inputs = [p for p in inputs if Path(p).stem in keep]
    tasks = [(p, job.out_dir, job.representation, job.config, job.chain) for p in inputs]
    if job.workers > 1:
        with ProcessPoolExecutor(max_workers=job.workers) as pool:
            results = list(pool.map(_encode_one, tasks))
    else:
        results = [_encode_one(t) for t in tasks]
    encoded = failed = 0
    for path, _, _, err in results:
        if err is None:
            encoded += 1
        else:
            failed += 1
            print(f"FAIL {path}: {err}", file=sys.stderr)
    return encoded, failed


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Parse 'key = value' option lines; '#' starts a comment."""
    options: dict[str, str] = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not value:
            raise ValueError(f"{path}:{n}: expected 'key = value'")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{n}: unknown option {key!r}")
        options[key] = value
    return options


def _parse_distances(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"bad distances list {text!r}; expected e.g. 5,10,15") from None


def config_from_args(args: argparse.Namespace) -> tuple[EncoderConfig, str, ChainOrder]:
    """Resolve encoder settings: flags win over the config file over defaults."""
    file_opts = parse_config_file(args.config) if args.config else {}

    representation = args.representation or file_opts.get("representation") or "skelemotion-mag"
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")

    distances_text = args.distances if args.distances is not None else file_opts.get("distances")
    threshold = args.threshold if args.threshold is not None else file_opts.get("threshold")
    width = args.width if args.width is not None else file_opts.get("width")
    persons = args.persons if args.persons is not None else file_opts.get("persons")

    cfg = EncoderConfig(
        representation=_SKELEMOTION_KINDS.get(representation, MAGNITUDE),
        distances=_parse_distances(distances_text) if distances_text else None,
        magnitude_threshold=float(threshold) if threshold is not None else DEFAULT_MAGNITUDE_THRESHOLD,
        target_width=int(width) if width is not None else DEFAULT_TARGET_WIDTH,
        max_persons=int(persons) if persons is not None else DEFAULT_MAX_PERSONS,
    )
    chain = load_chain(args.chain_file) if args.chain_file else default_chain()
    return cfg, representation, chain


def expand_inputs(patterns: list[str]) -> list[str]:
    """Expand glob patterns, deduplicate, and sort for deterministic order."""
    paths: set[str] = set()
    for pattern in patterns:
        paths.update(globlib.glob(pattern))
    return sorted(paths)


def cmd_encode(args: argparse.Namespace) -> int:
    inputs = expand_inputs(args.inputs)
    if not inputs:
        print("error: no input files matched", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        print(f"error: cannot write to output directory {out_dir}: {exc}", file=sys.stderr)
        return 2
    cfg, representation, chain = config_from_args(args)
    job = JobSpec(
        inputs=tuple(inputs),
        out_dir=str(out_dir),
        config=cfg,
        representation=representation,
        chain=chain,
        manifest=args.manifest,
        workers=args.workers,
    )
    started = time.monotonic()
    encoded, failed = run_encode_job(job)
    elapsed = time.monotonic() - started
    print(f"encoded {encoded} failed {failed} elapsed {elapsed:.2f}s")
    return 0 if failed == 0 else 1


def cmd_info(args: argparse.Namespace) -> int:
    version, (rows, width, channels), dtype_tag, layout = read_header(args.path)
    print(f"{rows} {width} {channels}")
    print(f"version: {version}")
    print(f"dtype: {dtype_tag}")
    print(f"layout: {layout}")
    return 0


def cmd_preview(args: argparse.Namespace) -> int:
    img = read_tensor(args.path)
    channels = [int(tok) for tok in args.channels.split(",") if tok.strip()]
    export_png(img, channels, args.out)
    print(f"wrote {args.out}")
    return 0


def _read_sample_table(path: str | Path) -> list[SampleInfo]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "sample_id" not in reader.fieldnames:
            raise ValueError(f"{path}: table needs a 'sample_id' column")
        samples = []
        for n, row in enumerate(reader, start=2):
            sample_id = (row.get("sample_id") or "").strip()
            if not sample_id:
                raise ValueError(f"{path}:{n}: empty sample_id")
            subject = (row.get("subject") or "").strip() or None
            camera = (row.get("camera") or "").strip() or None
            setup_text = (row.get("setup") or "").strip()
            setup = None
            if setup_text:
                try:
                    setup = int(setup_text)
                except ValueError:
                    raise ValueError(
                        f"{path}:{n}: sample {sample_id!r} has non-integer setup "
                        f"{setup_text!r}"
                    ) from None
            samples.append(SampleInfo(sample_id, subject=subject, camera=camera, setup=setup))
    return samples


def cmd_split(args: argparse.Namespace) -> int:
    samples = _read_sample_table(args.table)
    kwargs = {}
    if args.protocol == "cross-subject":
        if not args.train_subjects:
            print("error: cross-subject split needs --train-subjects", file=sys.stderr)
            return 2
        kwargs["train_subjects"] = {tok.strip() for tok in args.train_subjects.split(",")}
    elif args.protocol == "cross-view":
        if not args.test_camera:
            print("error: cross-view split needs --test-camera", file=sys.stderr)
            return 2
        kwargs["test_camera"] = args.test_camera
    manifest = build_manifest(samples, args.protocol, **kwargs)
    train_path, test_path = write_manifest(manifest, Path(args.out))
    print(f"train {len(manifest.train_ids)} -> {train_path}")
    print(f"test {len(manifest.test_ids)} -> {test_path}")
    return 0


def cmd_fuse(args: argparse.Namespace) -> int:
    matrices = [read_scores(p) for p in args.scores]
    fused = late_fuse(matrices)
    if args.out:
        write_scores(fused, args.out)
        print(f"wrote {args.out}")
    report = per_class_accuracy(fused, read_labels(args.labels))
    for cls, acc in report.per_class.items():
        print(f"class {cls} accuracy {acc:.6f}")
    print(f"mean accuracy {report.mean_accuracy:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skelimage",
        description="Skeleton-image representation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode skeleton files into tensor files")
    enc.add_argument("inputs", nargs="+", help=".skeleton/.json files or glob patterns")
    enc.add_argument("--out", required=True, help="output directory")
    enc.add_argument("--representation", choices=REPRESENTATIONS, default=None)
    enc.add_argument("--distances", default=None, help="comma-separated, e.g. 5,10,15")
    enc.add_argument("--threshold", type=float, default=None, help="orientation magnitude threshold")
    enc.add_argument("--width", type=int, default=None, help="target image width")
    enc.add_argument("--persons", type=int, default=None, help="person blocks per image")
    enc.add_argument("--workers", type=int, default=1, help="parallel worker count")
    enc.add_argument("--config", default=None, help="'key = value' options file; flags win")
    enc.add_argument("--chain-file", default=None, help="custom chain order, one joint index per line")
    enc.add_argument("--manifest", default=None, help="only encode samples listed in this manifest")
    enc.set_defaults(func=cmd_encode)

    info = sub.add_parser("info", help="print a tensor file header")
    info.add_argument("path")
    info.set_defaults(func=cmd_info)

    prev = sub.add_parser("preview", help="export tensor channels as a PNG")
    prev.add_argument("path")
    prev.add_argument("--channels", default="0", help="1 or 3 comma-separated channel indices")
    prev.add_argument("--out", required=True, help="output PNG path")
    prev.set_defaults(func=cmd_preview)

    split = sub.add_parser("split", help="build protocol manifests from a metadata table")
    split.add_argument("table", help="CSV with sample_id and subject/camera/setup columns")
    split.add_argument("--protocol", required=True, choices=("cross-subject", "cross-view", "cross-setup"))
    split.add_argument("--train-subjects", default=None, help="comma-separated training subject ids")
    split.add_argument("--test-camera", default=None, help="camera id held out for testing")
    split.add_argument("--out", required=True, help="directory for train/test manifests")
    split.set_defaults(func=cmd_split)

    fuse = sub.add_parser("fuse", help="late-fuse score files and report macro accuracy")
    fuse.add_argument("scores", nargs="+", help="score files to fuse")
    fuse.add_argument("--labels", required=True, help="'sample_id label' ground-truth file")
    fuse.add_argument("--out", default=None, help="write the fused score file here")
    fuse.set_defaults(func=cmd_fuse)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SkeletonParseError, TensorFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
