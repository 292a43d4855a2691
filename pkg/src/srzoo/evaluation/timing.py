"""Best-of-N wall-clock benchmark harness.

Runtimes are machine facts, not model facts, so reports carry
environment metadata and timing asserts structure (3 trials, best=min),
never absolute values. Measurements take a process-wide guard: two
concurrent benchmarks in one process would time each other's noise.
"""

from __future__ import annotations

import json
import platform
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class BenchError(RuntimeError):
    pass


class BenchBusyError(BenchError):
    pass


_MEASURE_GUARD = threading.Lock()


def environment_metadata() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
        "system": platform.system(),
        "processor": platform.processor() or "unknown",
    }


def time_model(run: Callable, images: Sequence, trials: int = 3) -> tuple[list, float]:
    """Average per-image wall time for `trials` consecutive passes.

    Each trial starts with one untimed warm-up call on the first image,
    then times a full pass over `images`. Returns (per-trial averages,
    best average), best being the minimum.
    """
    if not images:
        raise BenchError("cannot benchmark an empty image set")
    if trials < 1:
        raise BenchError(f"trials must be >= 1, got {trials}")
    if not _MEASURE_GUARD.acquire(blocking=False):
        raise BenchBusyError("another measurement is already running in this process")
    try:
        averages = []
        for _ in range(trials):
            run(images[0])  # warm-up, excluded
            t0 = time.perf_counter()
            for img in images:
                run(img)
            averages.append((time.perf_counter() - t0) / len(images))
        return averages, min(averages)
    finally:
        _MEASURE_GUARD.release()


@dataclass
class BenchReport:
    model_id: str
    params: int
    params_by_block: dict
    macs: int
    macs_by_block: dict
    input_shape: tuple
    image_count: int
    trials: list
    best_avg_runtime: float
    psnr: Optional[object] = None  # float dB, "inf", or None when no reference
    track_verdicts: Optional[dict] = None
    env: dict = field(default_factory=environment_metadata)

    def __post_init__(self):
        if self.trials and self.best_avg_runtime != min(self.trials):
            raise BenchError("best_avg_runtime must equal the minimum trial average")

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["input_shape"] = list(self.input_shape)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        d = json.loads(text)
        d["input_shape"] = tuple(d["input_shape"])
        return cls(**d)
