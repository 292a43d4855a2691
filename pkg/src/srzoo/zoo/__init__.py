"""Model zoo registry.

Each entry couples a builder with its default config, the externally
reported parameter count for that architecture, and the tolerance our
reconstruction is held to (builders are re-derived from block diagrams,
so counts match within a few percent; the reference model is exact).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Callable, Optional

from ..ir.graph import Graph
from .assr import AssrConfig, build_assr
from .awsrn import AwsrnConfig, build_awsrn
from .dilaresnet import TRACK1, TRACK2, TRACK3, DilaResNetConfig, build_dilaresnet
from .imdn import ImdnConfig, build_imdn
from .invres import BLOCK_MENU, InvResConfig, build_invres, inverted_residual
from .krahaon import KrahaonConfig, build_krahaon
from .msrresnet import MsrResNetConfig, build_msrresnet
from .noucsr import NoucsrConfig, build_noucsr
from .ppz import PpzConfig, build_ppz
from .recdense import RecDenseConfig, build_recdense
from .wmrn import WmrnConfig, build_wmrn


class UnknownArchError(ValueError):
    pass


@dataclass(frozen=True)
class ArchEntry:
    arch_id: str
    builder: Callable[[Any], Graph]
    config_cls: type
    default: Any
    reported_params: int
    param_tol: float  # relative; 0.0 means the count must match exactly
    skip: Optional[str]  # global residual path: "bilinear", "bicubic", or None
    note: str


_ENTRIES = (
    ArchEntry("msrresnet", build_msrresnet, MsrResNetConfig, MsrResNetConfig(),
              1_517_571, 0.0, "bilinear", "reference residual model, exact"),
    ArchEntry("imdn", build_imdn, ImdnConfig, ImdnConfig(),
              893_936, 0.10, None, "information multi-distillation body"),
    ArchEntry("noucsr", build_noucsr, NoucsrConfig, NoucsrConfig(),
              1_227_340, 0.10, "bilinear", "parameter-free tap-concat upsampler"),
    ArchEntry("assr", build_assr, AssrConfig, AssrConfig(),
              1_127_064, 0.10, None, "aggregated blocks with channel gating"),
    ArchEntry("krahaon", build_krahaon, KrahaonConfig, KrahaonConfig(),
              1_461_735, 0.10, "bilinear", "progressively narrowing body"),
    ArchEntry("awsrn", build_awsrn, AwsrnConfig, AwsrnConfig(),
              1_387_258, 0.10, "bilinear", "adaptive-weight units, multi-kernel tail"),
    ArchEntry("dilaresnet-t1", build_dilaresnet, DilaResNetConfig, TRACK1,
              852_874, 0.10, "bilinear", "dilated blocks, period-7 weight sharing"),
    ArchEntry("dilaresnet-t2", build_dilaresnet, DilaResNetConfig, TRACK2,
              1_074_447, 0.10, "bilinear", "dilated blocks, width 60"),
    ArchEntry("dilaresnet-t3", build_dilaresnet, DilaResNetConfig, TRACK3,
              1_369_859, 0.10, "bilinear", "dilated blocks, full-width"),
    ArchEntry("recdense", build_recdense, RecDenseConfig, RecDenseConfig(),
              910_467, 0.10, "bilinear", "recursive dense groups, shared legs"),
    ArchEntry("ppz", build_ppz, PpzConfig, PpzConfig(),
              818_432, 0.10, "bicubic", "pruned body, h-swish, gated blocks"),
    ArchEntry("invres", build_invres, InvResConfig, InvResConfig(),
              1_204_227, 0.10, "bilinear", "inverted-residual body"),
    ArchEntry("wmrn", build_wmrn, WmrnConfig, WmrnConfig(),
              536_005, 0.15, "bilinear", "two-branch depthwise-separable blocks"),
)

REGISTRY: dict[str, ArchEntry] = {e.arch_id: e for e in _ENTRIES}


def arch_ids() -> tuple[str, ...]:
    return tuple(REGISTRY)


def get_entry(arch_id: str) -> ArchEntry:
    try:
        return REGISTRY[arch_id]
    except KeyError:
        known = ", ".join(REGISTRY)
        raise UnknownArchError(f"unknown model {arch_id!r}; known models: {known}") from None


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _coerce(annotation: str, raw: Any) -> Any:
    """Turn a key=value string into the field's type; typed values pass through."""
    if not isinstance(raw, str):
        return raw
    s = raw.strip()
    if "None" in annotation and s.lower() in ("none", "null"):
        return None
    if annotation.startswith("tuple[tuple"):
        # dilation patterns: "1x1,2x2"
        out = []
        for part in s.split(","):
            a, _, c = part.strip().partition("x")
            out.append((int(a), int(c)))
        return tuple(out)
    if annotation.startswith("tuple[str"):
        return tuple(p.strip() for p in s.split(",")) if s else ()
    if annotation.startswith("tuple["):
        return tuple(int(p) for p in s.split(",")) if s else ()
    if "bool" in annotation:
        return _parse_bool(s)
    if "int" in annotation:
        return int(s)
    if "float" in annotation:
        return float(s)
    return s


def build_model(arch_id: str, overrides: Optional[dict[str, Any]] = None) -> Graph:
    """Build a registered model, optionally replacing config fields.

    Override values may be strings (CLI key=value form) or already-typed
    values; strings are coerced against the config field annotations.
    """
    entry = get_entry(arch_id)
    cfg = entry.default
    if overrides:
        anns = {f.name: str(f.type) for f in dataclasses.fields(entry.config_cls)}
        fixed = {}
        for key, raw in overrides.items():
            if key not in anns:
                valid = ", ".join(sorted(anns))
                raise ValueError(f"unknown config key {key!r} for {arch_id}; valid keys: {valid}")
            try:
                fixed[key] = _coerce(anns[key], raw)
            except (ValueError, TypeError) as exc:
                raise ValueError(f"bad value for {arch_id} config key {key!r}: {exc}") from None
        cfg = dataclasses.replace(cfg, **fixed)
    return entry.builder(cfg)


__all__ = [
    "ArchEntry", "REGISTRY", "UnknownArchError", "arch_ids", "get_entry", "build_model",
    "MsrResNetConfig", "build_msrresnet",
    "ImdnConfig", "build_imdn",
    "NoucsrConfig", "build_noucsr",
    "AssrConfig", "build_assr",
    "KrahaonConfig", "build_krahaon",
    "AwsrnConfig", "build_awsrn",
    "DilaResNetConfig", "TRACK1", "TRACK2", "TRACK3", "build_dilaresnet",
    "RecDenseConfig", "build_recdense",
    "PpzConfig", "build_ppz",
    "InvResConfig", "BLOCK_MENU", "build_invres", "inverted_residual",
    "WmrnConfig", "build_wmrn",
]
