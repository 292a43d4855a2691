"""Weight storage, deterministic initialization, and the SRBW1 file format.

SRBW1 layout (all integers little-endian):

    bytes 0..4   magic b"SRBW1"
    bytes 5..8   uint32 header byte length
    header       UTF-8 text: fingerprint, seed, scheme, slot count, then one
                 "<name> <d0>x<d1>... <payload byte offset>" line per slot
    payload      raw float32 little-endian slot data, in header order

Weights round-trip bitwise. Loading verifies magic, header shape, and
payload length; stores remember (seed, scheme, graph fingerprint) so a
mismatched graph is rejected before any compute.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, fingerprint, param_slots

MAGIC = b"SRBW1"


class WeightFormatError(ValueError):
    """Raised when a weight file cannot be parsed."""


class WeightMismatchError(ValueError):
    """Raised when a store does not belong to the graph it is used with."""


@dataclass
class WeightStore:
    """Mapping of parameter slot name -> float32 array, plus provenance."""

    slots: dict[str, np.ndarray] = field(default_factory=dict)
    seed: int | None = None
    scheme: str = ""
    fingerprint: str = ""

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.slots[name]
        except KeyError:
            raise KeyError(f"weight store has no slot {name!r}") from None

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        self.slots[name] = np.ascontiguousarray(np.asarray(value, dtype=np.float32))

    def __contains__(self, name: str) -> bool:
        return name in self.slots

    def __len__(self) -> int:
        return len(self.slots)

    def items(self):
        return self.slots.items()

    @property
    def total_values(self) -> int:
        return sum(int(a.size) for a in self.slots.values())

    def copy(self) -> "WeightStore":
        return WeightStore(
            slots={k: v.copy() for k, v in self.slots.items()},
            seed=self.seed,
            scheme=self.scheme,
            fingerprint=self.fingerprint,
        )


def check_store(graph: Graph, store: WeightStore) -> None:
    """Verify the store carries exactly the graph's slots with right shapes."""
    fp = fingerprint(graph)
    if store.fingerprint and store.fingerprint != fp:
        raise WeightMismatchError(
            f"weight store fingerprint {store.fingerprint[:12]}... does not match "
            f"graph {graph.name!r} fingerprint {fp[:12]}..."
        )
    for slot in param_slots(graph):
        if slot.name not in store:
            raise WeightMismatchError(f"weight store is missing slot {slot.name!r}")
        got = tuple(store[slot.name].shape)
        if got != slot.shape:
            raise WeightMismatchError(
                f"slot {slot.name!r} has shape {got}, graph expects {slot.shape}"
            )


KNOWN_SCHEMES = ("kaiming_uniform", "kaiming_normal")


def _parse_scheme(scheme: str) -> tuple[str, float]:
    if scheme in KNOWN_SCHEMES:
        return scheme, 0.0
    if scheme.startswith("constant:"):
        try:
            return "constant", float(scheme.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad constant scheme {scheme!r}, expected 'constant:<value>'") from None
    raise ValueError(
        f"unknown init scheme {scheme!r}; expected one of {KNOWN_SCHEMES} or 'constant:<value>'"
    )


def init_weights(graph: Graph, seed: int = 0, scheme: str = "kaiming_uniform") -> WeightStore:
    """Deterministically initialize every slot of the graph.

    kaiming_uniform draws weights from U(-b, b) with b = sqrt(6 / fan_in);
    kaiming_normal from N(0, 2 / fan_in). Biases start at zero under both.
    constant:<v> fills weights and biases with v. Learnable scalar slots
    always take their declared init value. Same (seed, scheme, graph)
    always produces bitwise-identical stores.
    """
    kind, const = _parse_scheme(scheme)
    fp = fingerprint(graph)
    rng = np.random.default_rng([seed & 0xFFFFFFFF, int(fp[:16], 16)])
    store = WeightStore(seed=seed, scheme=scheme, fingerprint=fp)
    scale_inits = {
        f"{n.id}.scale": n.scale_init
        for n in graph.nodes
        if n.kind == "scale" and n.scale_learnable
    }
    for slot in param_slots(graph):
        if slot.kind == "scale":
            store[slot.name] = np.full(slot.shape, scale_inits[slot.name], dtype=np.float32)
            continue
        if kind == "constant":
            store[slot.name] = np.full(slot.shape, const, dtype=np.float32)
            continue
        if slot.kind.endswith("bias"):
            store[slot.name] = np.zeros(slot.shape, dtype=np.float32)
            continue
        if kind == "kaiming_uniform":
            bound = math.sqrt(6.0 / slot.fan_in)
            store[slot.name] = rng.uniform(-bound, bound, size=slot.shape).astype(np.float32)
        else:
            std = math.sqrt(2.0 / slot.fan_in)
            store[slot.name] = (rng.standard_normal(slot.shape) * std).astype(np.float32)
    return store


def save_weights(store: WeightStore, path: str) -> None:
    lines = [
        f"fingerprint {store.fingerprint or '-'}",
        f"seed {store.seed if store.seed is not None else '-'}",
        f"scheme {store.scheme or '-'}",
        f"slots {len(store.slots)}",
    ]
    offset = 0
    payload = bytearray()
    for name, arr in store.items():
        dims = "x".join(str(d) for d in arr.shape) or "1"
        lines.append(f"{name} {dims} {offset}")
        raw = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        payload.extend(raw)
        offset += len(raw)
    header = ("\n".join(lines) + "\n").encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(bytes(payload))


def load_weights(path: str) -> WeightStore:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 4:
        raise WeightFormatError(f"{path}: file too short to be a weight file")
    if blob[: len(MAGIC)] != MAGIC:
        raise WeightFormatError(f"{path}: bad magic, not an SRBW1 weight file")
    (hlen,) = struct.unpack_from("<I", blob, len(MAGIC))
    hstart = len(MAGIC) + 4
    if hstart + hlen > len(blob):
        raise WeightFormatError(f"{path}: truncated header (declared {hlen} bytes)")
    try:
        header = blob[hstart : hstart + hlen].decode("utf-8")
    except UnicodeDecodeError as e:
        raise WeightFormatError(f"{path}: header is not valid UTF-8 ({e})") from None
    lines = [ln for ln in header.split("\n") if ln]
    if len(lines) < 4:
        raise WeightFormatError(f"{path}: header has {len(lines)} lines, expected >= 4")

    def _field(idx: int, key: str) -> str:
        parts = lines[idx].split(" ", 1)
        if len(parts) != 2 or parts[0] != key:
            raise WeightFormatError(f"{path}: header line {idx + 1} should start with {key!r}")
        return parts[1]

    fp = _field(0, "fingerprint")
    seed_s = _field(1, "seed")
    scheme = _field(2, "scheme")
    try:
        nslots = int(_field(3, "slots"))
    except ValueError:
        raise WeightFormatError(f"{path}: bad slot count") from None
    if len(lines) != 4 + nslots:
        raise WeightFormatError(
            f"{path}: header declares {nslots} slots but has {len(lines) - 4} slot lines"
        )
    payload = blob[hstart + hlen :]
    store = WeightStore(
        seed=None if seed_s == "-" else int(seed_s),
        scheme="" if scheme == "-" else scheme,
        fingerprint="" if fp == "-" else fp,
    )
    for ln in lines[4:]:
        parts = ln.split(" ")
        if len(parts) != 3:
            raise WeightFormatError(f"{path}: malformed slot line {ln!r}")
        name, dims_s, off_s = parts
        try:
            shape = tuple(int(d) for d in dims_s.split("x"))
            off = int(off_s)
        except ValueError:
            raise WeightFormatError(f"{path}: malformed slot line {ln!r}") from None
        nbytes = 4 * math.prod(shape)
        if off < 0 or off + nbytes > len(payload):
            raise WeightFormatError(
                f"{path}: slot {name!r} spans [{off}, {off + nbytes}) beyond payload "
                f"of {len(payload)} bytes"
            )
        arr = np.frombuffer(payload, dtype="<f4", count=math.prod(shape), offset=off)
        store.slots[name] = np.ascontiguousarray(arr.reshape(shape))
    return store
