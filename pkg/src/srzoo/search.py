"""Structural architecture search: space enumeration and constraint filtering.

Two spaces are covered. The progressive-narrowing space varies three
channel widths and three block counts (97,104 points); the block-menu
space assigns one of four block kinds to each body position. Search is
purely structural: candidates are built as graphs and measured with the
parameter/MAC/receptive-field counters, never trained.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .ir.counters import count_macs, count_params
from .ir.graph import receptive_field
from .zoo.invres import BLOCK_MENU, InvResConfig, build_invres
from .zoo.krahaon import KrahaonConfig, build_krahaon

X_CHOICES = (48, 64, 80, 96)
N_X_RANGE = (10, 30)  # inclusive
N_Y_RANGE = (0, 16)
N_Z_RANGE = (0, 16)


@dataclass(frozen=True, order=True)
class SearchConfig:
    """One point of the narrowing space. Invalid points refuse to construct."""

    x: int
    y: int
    z: int
    n_x: int
    n_y: int
    n_z: int

    def __post_init__(self):
        if self.x not in X_CHOICES:
            raise ValueError(f"x={self.x} not in {X_CHOICES}")
        if self.y not in (self.x // 2, self.x // 4):
            raise ValueError(f"y={self.y} must be x/2 or x/4 of x={self.x}")
        if self.z not in (self.y // 2, self.y // 4):
            raise ValueError(f"z={self.z} must be y/2 or y/4 of y={self.y}")
        for name, val, (lo, hi) in (
            ("n_x", self.n_x, N_X_RANGE),
            ("n_y", self.n_y, N_Y_RANGE),
            ("n_z", self.n_z, N_Z_RANGE),
        ):
            if not lo <= val <= hi:
                raise ValueError(f"{name}={val} outside [{lo}, {hi}]")

    def to_arch(self) -> KrahaonConfig:
        return KrahaonConfig(self.x, self.y, self.z, self.n_x, self.n_y, self.n_z)


def enumerate_krahaon_space() -> Iterator[SearchConfig]:
    """Every valid point exactly once, in a fixed nested order."""
    for x in X_CHOICES:
        for y in (x // 2, x // 4):
            for z in (y // 2, y // 4):
                for n_x in range(N_X_RANGE[0], N_X_RANGE[1] + 1):
                    for n_y in range(N_Y_RANGE[0], N_Y_RANGE[1] + 1):
                        for n_z in range(N_Z_RANGE[0], N_Z_RANGE[1] + 1):
                            yield SearchConfig(x, y, z, n_x, n_y, n_z)


def space_size() -> int:
    n_x = N_X_RANGE[1] - N_X_RANGE[0] + 1
    n_y = N_Y_RANGE[1] - N_Y_RANGE[0] + 1
    n_z = N_Z_RANGE[1] - N_Z_RANGE[0] + 1
    return len(X_CHOICES) * 2 * 2 * n_x * n_y * n_z


def sample(space: Iterable[SearchConfig], seed: int, k: int) -> list:
    pool = list(space)
    if k > len(pool):
        raise ValueError(f"cannot sample {k} configs from a space of {len(pool)}")
    return random.Random(seed).sample(pool, k)


@dataclass(frozen=True)
class SearchResult:
    config: SearchConfig
    params: int
    macs: int
    rf: Optional[int]


def measure(config: SearchConfig, input_shape=(1, 3, 32, 32)) -> SearchResult:
    graph = build_krahaon(config.to_arch())
    rf = receptive_field(graph)
    return SearchResult(
        config=config,
        params=count_params(graph),
        macs=count_macs(graph, input_shape),
        rf=rf,
    )


def filter_constraints(
    configs: Iterable[SearchConfig],
    max_params: Optional[int] = None,
    max_macs: Optional[int] = None,
    max_rf: Optional[int] = None,
    input_shape=(1, 3, 32, 32),
) -> list:
    """Measure each config and keep the ones under every given bound.

    Results come back sorted by ascending parameter count, then MACs.
    Bounds left as None do not constrain. Building every candidate is
    linear in the number of configs (about 1 ms each), so full-space
    filtering is a minutes-scale batch job.
    """
    kept = []
    for cfg in configs:
        res = measure(cfg, input_shape)
        if max_params is not None and res.params > max_params:
            continue
        if max_macs is not None and res.macs > max_macs:
            continue
        if max_rf is not None and (res.rf is None or res.rf > max_rf):
            continue
        kept.append(res)
    kept.sort(key=lambda r: (r.params, r.macs))
    return kept


def enumerate_block_menus(depth: int) -> Iterator[tuple[str, ...]]:
    """All per-position assignments from the four-kind block menu."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    return itertools.product(BLOCK_MENU, repeat=depth)


def build_menu_model(menu: tuple[str, ...], width: int = 80):
    """Construct a body from an explicit per-position block-kind tuple."""
    return build_invres(InvResConfig(width=width, blocks=len(menu), menu=tuple(menu)))
