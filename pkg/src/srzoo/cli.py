"""Command-line entry point.

Subcommands: inspect | degrade | infer | bench | validate | search |
init-weights. Every subcommand takes --json for machine-readable
output. Exit codes: 0 success, 1 runtime failure, 2 usage error.

A --config file holds flat `key=value` lines mirroring flag names;
explicit flags win over file values. The only environment override is
SRZOO_THREADS (numeric thread cap recorded into bench reports and
exported to the BLAS layer for subprocesses).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import data as D
from .evaluation import metrics as M
from .evaluation import timing as TM
from .evaluation import tracks as TR
from .ir import counters
from .ir.executor import forward
from .ir.graph import fingerprint, infer_shapes, receptive_field
from .ir.weights import WeightMismatchError, check_store, init_weights, load_weights, save_weights
from .zoo import UnknownArchError, build_model, get_entry
from . import search as S

BASELINE_ENTRY = TR.EntryRecord("MSRResNet", 28.70, 1_517_571, 0.130, baseline=True)


class UsageError(ValueError):
    pass


def _parse_shape(text: str) -> tuple:
    try:
        dims = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad shape {text!r}, expected like 1x3x64x64") from None
    if len(dims) != 4 or any(d < 1 for d in dims):
        raise UsageError(f"bad shape {text!r}, expected 4 positive dims")
    return dims


def _parse_sets(pairs) -> dict:
    out = {}
    for item in pairs or []:
        for piece in item.split(","):
            piece = piece.strip()
            if not piece:
                continue
            key, sep, val = piece.partition("=")
            if not sep or not key:
                raise UsageError(f"bad --set entry {piece!r}, expected key=value")
            out[key.strip()] = val.strip()
    return out


def _read_config_file(path: str) -> dict:
    vals = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, val = line.partition("=")
                if not sep:
                    raise UsageError(f"{path}:{ln}: expected key=value, got {line!r}")
                vals[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from None
    return vals


def _threads_default() -> int:
    env = os.environ.get("SRZOO_THREADS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 0  # 0 = leave the BLAS layer alone


def _emit(args, payload: dict, text_lines) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _model_runner(graph, store):
    def run(img):
        y = forward(graph, store, img.astype(np.float32) / 255.0, check=False)
        return y * 255.0

    return run


def _load_model_weights(graph, path: str):
    store = load_weights(path)
    check_store(graph, store)  # refuses mismatched weights before any image work
    return store


# ---------------------------------------------------------------- commands

def cmd_inspect(args) -> int:
    graph = build_model(args.model, _parse_sets(args.set))
    shape = _parse_shape(args.input)
    p_tag = counters.count_params_by_tag(graph)
    m_tag = counters.count_macs_by_tag(graph, shape)
    payload = {
        "model": args.model,
        "input_shape": list(shape),
        "fingerprint": fingerprint(graph),
        "receptive_field": receptive_field(graph),
        "params": {
            "total": counters.count_params(graph),
            "by_block": p_tag,
            "share_pct": counters.share_percentages(p_tag),
        },
        "macs": {
            "total": counters.count_macs(graph, shape),
            "by_block": m_tag,
            "share_pct": counters.share_percentages(m_tag),
        },
    }
    lines = [
        f"model           {args.model}",
        f"input           {args.input}",
        f"params          {payload['params']['total']:,}",
        f"macs            {payload['macs']['total']:,}",
        f"receptive field {payload['receptive_field']}",
        f"fingerprint     {payload['fingerprint'][:16]}",
        "block            params        share%    macs            share%",
    ]
    for tag in sorted(set(p_tag) | set(m_tag)):
        lines.append(
            f"{tag:16s} {p_tag.get(tag, 0):>12,}  {payload['params']['share_pct'].get(tag, 0.0):7.2f}"
            f"  {m_tag.get(tag, 0):>14,}  {payload['macs']['share_pct'].get(tag, 0.0):7.2f}"
        )
    _emit(args, payload, lines)
    return 0


def cmd_degrade(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    pairs, skipped = [], []
    for path in D.list_images(args.hr):
        name = os.path.basename(path)
        stem = os.path.splitext(name)[0]
        try:
            hr = D.load_png(path)
        except D.DataError as exc:
            skipped.append({"file": name, "reason": str(exc)})
            print(f"warning: skipped {name}: {exc}", file=sys.stderr)
            continue
        try:
            lr = D.degrade_bicubic_x4(hr)
        except D.DataError as exc:
            skipped.append({"file": name, "reason": str(exc)})
            print(f"warning: skipped {name}: {exc}", file=sys.stderr)
            continue
        out_path = os.path.join(args.out, name)
        D.save_png(lr, out_path)
        pairs.append({
            "id": stem,
            "hr": path,
            "lr": out_path,
            "hr_size": [int(hr.shape[2]), int(hr.shape[3])],
            "lr_size": [int(lr.shape[2]), int(lr.shape[3])],
        })
    manifest = {"pairs": pairs, "skipped": skipped}
    manifest_path = os.path.join(args.out, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    lines = [f"degraded {len(pairs)} image(s), skipped {len(skipped)}, manifest {manifest_path}"]
    _emit(args, manifest, lines)
    return 0


def cmd_infer(args) -> int:
    graph = build_model(args.model, _parse_sets(args.set))
    store = _load_model_weights(graph, args.weights)
    paths = D.list_images(args.lr)
    if not paths:
        raise D.DataError(f"no PNG images in {args.lr!r}")
    os.makedirs(args.out, exist_ok=True)
    run = _model_runner(graph, store)
    written = []
    for path in paths:
        sr = run(D.load_png(path))
        out_path = os.path.join(args.out, os.path.basename(path))
        D.save_png(sr, out_path)
        written.append(out_path)
    payload = {"model": args.model, "count": len(written), "outputs": written}
    _emit(args, payload, [f"wrote {len(written)} SR image(s) to {args.out}"])
    return 0


def _mean_psnr(scores) -> object:
    if any(s.infinite for s in scores):
        return "inf"
    return float(np.mean([s.db for s in scores]))


def cmd_bench(args) -> int:
    graph = build_model(args.model, _parse_sets(args.set))
    if args.weights:
        store = _load_model_weights(graph, args.weights)
    else:
        store = init_weights(graph, seed=args.seed)
    paths = D.list_images(args.lr)
    if not paths:
        raise TM.BenchError(f"no PNG images in {args.lr!r}")
    images = [D.load_png(p) for p in paths]
    run = _model_runner(graph, store)
    trials, best = TM.time_model(run, images, trials=args.trials)

    shape = images[0].shape
    p_tag = counters.count_params_by_tag(graph)
    m_tag = counters.count_macs_by_tag(graph, shape)
    psnr_val = None
    verdicts = None
    if args.gt:
        scores = []
        for path, img in zip(paths, images):
            gt = D.load_png(os.path.join(args.gt, os.path.basename(path)))
            scores.append(M.psnr(run(img), gt))
        psnr_val = _mean_psnr(scores)
        if isinstance(psnr_val, float):
            entry = TR.EntryRecord(args.model, psnr_val, sum(p_tag.values()), best)
            verdicts = {}
            for t in (1, 2, 3):
                v = TR.validate_track(entry, BASELINE_ENTRY, t)
                verdicts[str(t)] = {"ranked": v.ranked, "reasons": list(v.reasons)}
    env = TM.environment_metadata()
    if args.threads:
        env["threads"] = args.threads
    report = TM.BenchReport(
        model_id=args.model,
        params=sum(p_tag.values()),
        params_by_block=p_tag,
        macs=sum(m_tag.values()),
        macs_by_block=m_tag,
        input_shape=shape,
        image_count=len(images),
        trials=trials,
        best_avg_runtime=best,
        psnr=psnr_val,
        track_verdicts=verdicts,
        env=env,
    )
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json or not args.out:
        print(text)
    else:
        print(f"bench report written to {args.out} (best {best:.4f}s over {args.trials} trials)")
    return 0


def cmd_validate(args) -> int:
    if args.builtin:
        track, entries = TR.load_fixture(args.builtin)
    else:
        if not args.entries:
            raise UsageError("validate needs an entries file or --builtin N")
        try:
            with open(args.entries, "r", encoding="utf-8") as fh:
                track, entries = TR.load_entries(fh.read())
        except OSError as exc:
            raise TR.TrackError(f"cannot read entries file: {exc}") from None
    if args.track:
        track = args.track
    if track not in (1, 2, 3):
        raise UsageError("no track given; use --track 1|2|3 or a file with a track field")
    result = TR.rank_entries(entries, track)
    payload = {
        "track": track,
        "ranked": [
            {"rank": i + 1, "team": v.entry.team, "psnr": v.entry.psnr,
             "params": v.entry.params, "runtime_s": v.entry.runtime_s}
            for i, v in enumerate(result.ranked)
        ],
        "unranked": [
            {"team": v.entry.team, "psnr": v.entry.psnr, "params": v.entry.params,
             "runtime_s": v.entry.runtime_s, "reasons": list(v.reasons)}
            for v in result.unranked
        ],
    }
    lines = [f"track {track}", "rank team            psnr   params     runtime"]
    for row in payload["ranked"]:
        lines.append(
            f"({row['rank']})  {row['team']:15s} {row['psnr']:.2f}  {row['params']:>9,}  {row['runtime_s']:.3f}"
        )
    for row in payload["unranked"]:
        lines.append(
            f"(-)  {row['team']:15s} {row['psnr']:.2f}  {row['params']:>9,}  {row['runtime_s']:.3f}"
            f"  [{'; '.join(row['reasons'])}]"
        )
    _emit(args, payload, lines)
    return 0


def cmd_search(args) -> int:
    if args.full:
        configs = list(S.enumerate_krahaon_space())
    else:
        configs = S.sample(S.enumerate_krahaon_space(), seed=args.seed, k=args.sample)
    scanned = len(configs)
    shape = _parse_shape(args.input)
    bounded = any(b is not None for b in (args.max_params, args.max_macs, args.max_rf))
    if bounded:
        results = S.filter_constraints(
            configs, max_params=args.max_params, max_macs=args.max_macs,
            max_rf=args.max_rf, input_shape=shape,
        )
    else:
        # no bounds: measuring the whole space is a minutes-scale job, so
        # only the displayed head is measured
        head = sorted(configs)[: args.limit or len(configs)]
        results = S.filter_constraints(head, input_shape=shape)
    cap = args.limit or len(results)
    payload = {
        "scanned": scanned,
        "kept": len(results) if bounded else None,
        "results": [
            {"config": [r.config.x, r.config.y, r.config.z,
                        r.config.n_x, r.config.n_y, r.config.n_z],
             "params": r.params, "macs": r.macs, "rf": r.rf}
            for r in results[:cap]
        ],
    }
    lines = [f"scanned {scanned} config(s)" + (f", kept {len(results)}" if bounded else "")]
    lines.append("x   y   z   n_x n_y n_z    params        macs       rf")
    for r in results[:cap]:
        c = r.config
        lines.append(
            f"{c.x:<3d} {c.y:<3d} {c.z:<3d} {c.n_x:<3d} {c.n_y:<3d} {c.n_z:<3d}"
            f" {r.params:>10,} {r.macs:>13,}  {r.rf}"
        )
    _emit(args, payload, lines)
    return 0


def cmd_init_weights(args) -> int:
    graph = build_model(args.model, _parse_sets(args.set))
    store = init_weights(graph, seed=args.seed, scheme=args.scheme)
    save_weights(store, args.out)
    payload = {
        "model": args.model,
        "fingerprint": store.fingerprint,
        "seed": args.seed,
        "scheme": args.scheme,
        "path": args.out,
        "values": store.total_values,
    }
    _emit(args, payload, [f"wrote {store.total_values:,} values to {args.out}"])
    return 0


# ---------------------------------------------------------------- wiring

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srzoo", description="constrained x4 super-resolution zoo")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="flat key=value config file; flags win")
        p.add_argument("--threads", type=int, default=_threads_default(),
                       help="thread cap recorded in reports (SRZOO_THREADS)")

    p = sub.add_parser("inspect", help="parameter/MAC/receptive-field report")
    p.add_argument("model")
    p.add_argument("--input", default="1x3x32x32")
    p.add_argument("--set", action="append", help="model config override key=value")
    common(p)
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("degrade", help="generate x4-downscaled counterparts")
    p.add_argument("--hr", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_degrade)

    p = sub.add_parser("infer", help="run a model over a directory of images")
    p.add_argument("model")
    p.add_argument("--weights", required=True)
    p.add_argument("--lr", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--set", action="append")
    common(p)
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("bench", help="timed inference report")
    p.add_argument("model")
    p.add_argument("--lr", required=True)
    p.add_argument("--weights")
    p.add_argument("--gt", help="reference images for fidelity scoring")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--set", action="append")
    common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("validate", help="constraint-check and rank entry records")
    p.add_argument("entries", nargs="?")
    p.add_argument("--track", type=int, choices=(1, 2, 3))
    p.add_argument("--builtin", type=int, choices=(1, 2, 3),
                   help="use a packaged result table instead of a file")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("search", help="enumerate/sample the narrowing space")
    p.add_argument("--full", action="store_true", help="scan every config")
    p.add_argument("--sample", type=int, default=300)
    p.add_argument("--max-params", type=int)
    p.add_argument("--max-macs", type=int)
    p.add_argument("--max-rf", type=int)
    p.add_argument("--input", default="1x3x32x32")
    p.add_argument("--limit", type=int, default=20, help="max table rows to print")
    common(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("init-weights", help="write a fresh weight file for a model")
    p.add_argument("model")
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", default="kaiming_uniform")
    p.add_argument("--set", action="append")
    common(p)
    p.set_defaults(fn=cmd_init_weights)
    return ap


def _apply_config_file(parser: argparse.ArgumentParser, path: str) -> None:
    """Install file values as subparser defaults so explicit flags win."""
    file_vals = _read_config_file(path)
    subparsers = parser._subparsers._group_actions[0].choices.values()  # type: ignore[union-attr]
    known = set()
    for sp in subparsers:
        defaults = {}
        for action in sp._actions:
            known.add(action.dest)
            if action.dest not in file_vals:
                continue
            raw = file_vals[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[action.dest] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif action.dest == "set":
                defaults[action.dest] = [p for p in raw.split(",") if p.strip()]
            elif action.type is not None:
                defaults[action.dest] = action.type(raw)
            else:
                defaults[action.dest] = raw
        if defaults:
            sp.set_defaults(**defaults)
    for k in sorted(set(file_vals) - known):
        print(f"warning: config key {k!r} matches no flag, ignored", file=sys.stderr)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    # first pass just to find --config; file values become defaults, flags win
    if "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            parser.error("--config needs a path")
        try:
            _apply_config_file(parser, argv[idx + 1])
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except (TypeError, ValueError) as exc:
            print(f"error: bad config value: {exc}", file=sys.stderr)
            return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        return args.fn(args)
    except (UsageError, UnknownArchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (D.DataError, TR.TrackError, TM.BenchError, WeightMismatchError,
            ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
