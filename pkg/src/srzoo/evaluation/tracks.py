"""Per-track constraint validation and ranking of challenge-style entries.

An entry competes in one of three tracks (1: fewest parameters,
2: lowest runtime, 3: highest PSNR) but must hold its ground against
the reference entry on ALL THREE metrics to be ranked at all; an entry
that loses on any metric, including the one it optimizes, drops to the
unranked tail. Published rankings admit a small measurement slack on
the non-structural metrics, reproduced here: PSNR may trail by up to
0.01 dB and runtime may exceed the reference by up to 10%; parameter
counts are exact and get no slack.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

PSNR_TOL_DB = 0.01
RUNTIME_SLACK = 0.10
_EPS = 1e-9

TRACK_METRICS = {1: "params", 2: "runtime_s", 3: "psnr"}


class TrackError(ValueError):
    pass


@dataclass(frozen=True)
class EntryRecord:
    team: str
    psnr: float
    params: int
    runtime_s: float
    baseline: bool = False

    def __post_init__(self):
        if self.params < 1:
            raise TrackError(f"{self.team}: params must be >= 1, got {self.params}")
        if self.runtime_s <= 0:
            raise TrackError(f"{self.team}: runtime must be positive, got {self.runtime_s}")


@dataclass(frozen=True)
class TrackVerdict:
    entry: EntryRecord
    ranked: bool
    reasons: tuple


def validate_track(entry: EntryRecord, baseline: EntryRecord, track: int) -> TrackVerdict:
    if track not in TRACK_METRICS:
        raise TrackError(f"unknown track {track!r}, expected 1, 2 or 3")
    reasons = []
    if entry.psnr < baseline.psnr - PSNR_TOL_DB - _EPS:
        reasons.append(f"psnr {entry.psnr:.2f} < {baseline.psnr:.2f}")
    if entry.params > baseline.params:
        reasons.append(f"params {entry.params:,} > {baseline.params:,}")
    if entry.runtime_s > baseline.runtime_s * (1.0 + RUNTIME_SLACK) + _EPS:
        reasons.append(f"runtime {entry.runtime_s:.3f} > {baseline.runtime_s:.3f}")
    return TrackVerdict(entry=entry, ranked=not reasons, reasons=tuple(reasons))


def _sort_key(track: int):
    def key(v: TrackVerdict):
        e = v.entry
        if track == 1:
            lead = (e.params, e.runtime_s, -e.psnr)
        elif track == 2:
            lead = (e.runtime_s, e.params, -e.psnr)
        else:
            lead = (-e.psnr, e.params, e.runtime_s)
        return lead + (e.team,)

    return key


@dataclass(frozen=True)
class RankingResult:
    track: int
    ranked: tuple  # TrackVerdicts in final order
    unranked: tuple  # TrackVerdicts, same ordering rule, after the ranked block


def rank_entries(entries: Sequence[EntryRecord], track: int) -> RankingResult:
    if track not in TRACK_METRICS:
        raise TrackError(f"unknown track {track!r}, expected 1, 2 or 3")
    baselines = [e for e in entries if e.baseline]
    if not baselines:
        raise TrackError("entry list has no baseline row to validate against")
    if len(baselines) > 1:
        raise TrackError(f"entry list has {len(baselines)} baseline rows, expected 1")
    baseline = baselines[0]
    verdicts = [validate_track(e, baseline, track) for e in entries]
    key = _sort_key(track)
    ranked = sorted((v for v in verdicts if v.ranked), key=key)
    unranked = sorted((v for v in verdicts if not v.ranked), key=key)
    return RankingResult(track=track, ranked=tuple(ranked), unranked=tuple(unranked))


def entry_from_dict(d: dict) -> EntryRecord:
    try:
        return EntryRecord(
            team=str(d["team"]),
            psnr=float(d["psnr"]),
            params=int(d["params"]),
            runtime_s=float(d["runtime_s"]),
            baseline=bool(d.get("baseline", False)),
        )
    except KeyError as exc:
        raise TrackError(f"entry record missing field {exc.args[0]!r}") from None


def load_entries(text: str) -> tuple[int, list]:
    """Parse an entries document: {"track": n, "entries": [...]}."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "entries" not in doc:
        raise TrackError('entries document must be {"track": n, "entries": [...]}')
    track = int(doc.get("track", 0))
    return track, [entry_from_dict(d) for d in doc["entries"]]


def load_fixture(track: int) -> tuple[int, list]:
    """The packaged result table for a track (generation-phase data)."""
    if track not in TRACK_METRICS:
        raise TrackError(f"unknown track {track!r}, expected 1, 2 or 3")
    ref = resources.files("srzoo.evaluation").joinpath(f"fixtures/track{track}.json")
    return load_entries(ref.read_text(encoding="utf-8"))
