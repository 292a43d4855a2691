"""Layer-graph intermediate representation.

A model is a DAG of LayerSpec nodes declared in topological order. Nodes
are pure: all learnable state lives in a WeightStore keyed by parameter
slot names derived from node ids. Convolution nodes may alias one weight
slot through shared groups (recurrent reuse); sharing changes parameter
counts, never per-node compute.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..tensor import ACTIVATIONS, RESIZE_MODES, ConvParams

KINDS = (
    "input",
    "conv",
    "activation",
    "pixel_shuffle",
    "resize",
    "global_avg_pool",
    "concat",
    "split",
    "add",
    "mul",
    "scale",
    "dense",
)


class GraphError(ValueError):
    """Raised when a graph is structurally invalid."""


@dataclass(frozen=True)
class LayerSpec:
    """One node of a model graph. Fields beyond (id, kind, inputs,
    block_tag) are interpreted only by the matching kind."""

    id: str
    kind: str
    inputs: tuple[str, ...] = ()
    block_tag: str = ""
    conv: ConvParams | None = None
    act_kind: str = "leaky_relu"
    act_alpha: float = 0.2
    shuffle_r: int = 2
    scale_num: int = 1
    scale_den: int = 1
    resize_mode: str = "bilinear"
    resize_antialias: bool = False
    resize_align_corners: bool = False
    split_sizes: tuple[int, ...] = ()
    split_index: int = 0
    scale_learnable: bool = False
    scale_init: float = 1.0
    dense_in: int = 0
    dense_out: int = 0
    dense_bias: bool = True

    @property
    def resize_scale(self) -> Fraction:
        return Fraction(self.scale_num, self.scale_den)


@dataclass(frozen=True)
class Graph:
    name: str
    nodes: tuple[LayerSpec, ...]
    output: str
    shared_groups: tuple[tuple[str, ...], ...] = ()
    meta: tuple[tuple[str, str], ...] = ()
    _by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._by_id.update({n.id: n for n in self.nodes})

    def node(self, node_id: str) -> LayerSpec:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise GraphError(f"graph {self.name!r} has no node {node_id!r}") from None

    @property
    def input_id(self) -> str:
        for n in self.nodes:
            if n.kind == "input":
                return n.id
        raise GraphError(f"graph {self.name!r} has no input node")

    def meta_dict(self) -> dict[str, str]:
        return dict(self.meta)

    def consumers(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            for src in n.inputs:
                out[src].append(n.id)
        return out


_ARITY = {
    "input": (0, 0),
    "conv": (1, 1),
    "activation": (1, 1),
    "pixel_shuffle": (1, 1),
    "resize": (1, 1),
    "global_avg_pool": (1, 1),
    "concat": (2, None),
    "split": (1, 1),
    "add": (2, None),
    "mul": (2, 2),
    "scale": (1, 1),
    "dense": (1, 1),
}


def validate_graph(graph: Graph) -> None:
    """Structural validation: ids, ordering, arity, kinds, shared groups."""
    seen: set[str] = set()
    input_count = 0
    for n in graph.nodes:
        if not n.id or any(ch.isspace() or ch == "," for ch in n.id):
            raise GraphError(f"node id {n.id!r} is empty or contains whitespace/comma")
        if n.id in seen:
            raise GraphError(f"duplicate node id {n.id!r}")
        if n.kind not in KINDS:
            raise GraphError(f"node {n.id!r} has unknown kind {n.kind!r}")
        lo, hi = _ARITY[n.kind]
        if len(n.inputs) < lo or (hi is not None and len(n.inputs) > hi):
            raise GraphError(
                f"node {n.id!r} ({n.kind}) takes "
                f"{lo if hi == lo else f'{lo}+' if hi is None else f'{lo}..{hi}'} "
                f"inputs, got {len(n.inputs)}"
            )
        for src in n.inputs:
            if src not in seen:
                raise GraphError(
                    f"node {n.id!r} references {src!r} which is not declared earlier "
                    "(nodes must be in topological order)"
                )
        if n.kind == "input":
            input_count += 1
        if n.kind == "conv" and n.conv is None:
            raise GraphError(f"conv node {n.id!r} is missing ConvParams")
        if n.kind == "activation" and n.act_kind not in ACTIVATIONS:
            raise GraphError(f"node {n.id!r} has unknown activation {n.act_kind!r}")
        if n.kind == "resize":
            if n.resize_mode not in RESIZE_MODES:
                raise GraphError(f"node {n.id!r} has unknown resize mode {n.resize_mode!r}")
            if n.scale_num <= 0 or n.scale_den <= 0:
                raise GraphError(f"node {n.id!r} has non-positive scale")
        if n.kind == "pixel_shuffle" and n.shuffle_r < 1:
            raise GraphError(f"node {n.id!r} has invalid upscale factor {n.shuffle_r}")
        if n.kind == "split":
            if not n.split_sizes or any(s < 1 for s in n.split_sizes):
                raise GraphError(f"split node {n.id!r} needs positive sizes")
            if not 0 <= n.split_index < len(n.split_sizes):
                raise GraphError(
                    f"split node {n.id!r} index {n.split_index} out of range "
                    f"for sizes {n.split_sizes}"
                )
        if n.kind == "dense" and (n.dense_in < 1 or n.dense_out < 1):
            raise GraphError(f"dense node {n.id!r} needs positive in/out sizes")
        seen.add(n.id)
    if input_count != 1:
        raise GraphError(f"graph {graph.name!r} must have exactly one input node, has {input_count}")
    if graph.output not in seen:
        raise GraphError(f"output node {graph.output!r} does not exist")

    grouped: set[str] = set()
    for group in graph.shared_groups:
        if len(group) < 2:
            raise GraphError(f"shared group {group} needs at least two members")
        ref: ConvParams | None = None
        for nid in group:
            node = graph.node(nid)
            if node.kind != "conv":
                raise GraphError(f"shared group member {nid!r} is not a conv node")
            if nid in grouped:
                raise GraphError(f"node {nid!r} appears in more than one shared group")
            grouped.add(nid)
            if ref is None:
                ref = node.conv
            elif node.conv != ref:
                raise GraphError(
                    f"shared group {group} mixes differing conv configurations "
                    f"({nid!r} differs from {group[0]!r})"
                )


def _ceil_scale(size: int, num: int, den: int) -> int:
    return -((-size * num) // den)


def infer_shapes(graph: Graph, input_shape: tuple[int, int, int, int]) -> dict[str, tuple[int, int, int, int]]:
    """Propagate the input shape through the DAG; raises GraphError with the
    offending node id and dimensions on any mismatch."""
    validate_graph(graph)
    n0, c0, h0, w0 = input_shape
    if n0 < 1 or c0 < 1 or h0 < 1 or w0 < 1:
        raise GraphError(f"input shape {input_shape} must be positive")
    shapes: dict[str, tuple[int, int, int, int]] = {}
    for node in graph.nodes:
        src = [shapes[s] for s in node.inputs]
        if node.kind == "input":
            shape = (n0, c0, h0, w0)
        elif node.kind == "conv":
            p = node.conv
            n, c, h, w = src[0]
            if c != p.in_channels:
                raise GraphError(
                    f"node {node.id!r}: input has {c} channels, conv expects {p.in_channels}"
                )
            try:
                oh, ow = p.out_hw(h, w)
            except ValueError as e:
                raise GraphError(f"node {node.id!r}: {e}") from None
            shape = (n, p.out_channels, oh, ow)
        elif node.kind in ("activation", "scale"):
            shape = src[0]
        elif node.kind == "pixel_shuffle":
            n, c, h, w = src[0]
            r = node.shuffle_r
            if c % (r * r):
                raise GraphError(
                    f"node {node.id!r}: {c} channels not divisible by r^2 = {r * r}"
                )
            shape = (n, c // (r * r), h * r, w * r)
        elif node.kind == "resize":
            n, c, h, w = src[0]
            shape = (
                n,
                c,
                _ceil_scale(h, node.scale_num, node.scale_den),
                _ceil_scale(w, node.scale_num, node.scale_den),
            )
        elif node.kind == "global_avg_pool":
            n, c, _, _ = src[0]
            shape = (n, c, 1, 1)
        elif node.kind == "concat":
            n, _, h, w = src[0]
            for i, s in enumerate(src[1:], start=1):
                if s[0] != n or s[2] != h or s[3] != w:
                    raise GraphError(
                        f"node {node.id!r}: concat input {i} has shape {s}, "
                        f"incompatible with {src[0]}"
                    )
            shape = (n, sum(s[1] for s in src), h, w)
        elif node.kind == "split":
            n, c, h, w = src[0]
            if sum(node.split_sizes) != c:
                raise GraphError(
                    f"node {node.id!r}: split sizes {node.split_sizes} must sum to {c}"
                )
            shape = (n, node.split_sizes[node.split_index], h, w)
        elif node.kind in ("add", "mul"):
            full = None
            for i, s in enumerate(src):
                if s[0] != src[0][0] or s[1] != src[0][1]:
                    raise GraphError(
                        f"node {node.id!r}: operand {i} shape {s} disagrees with "
                        f"{src[0]} in batch/channels"
                    )
                if (s[2], s[3]) != (1, 1):
                    if full is not None and (s[2], s[3]) != full:
                        raise GraphError(
                            f"node {node.id!r}: operand {i} spatial {s[2]}x{s[3]} "
                            f"disagrees with {full[0]}x{full[1]}"
                        )
                    full = (s[2], s[3])
            hw = full if full is not None else (1, 1)
            shape = (src[0][0], src[0][1], hw[0], hw[1])
        elif node.kind == "dense":
            n, c, h, w = src[0]
            if (h, w) != (1, 1):
                raise GraphError(
                    f"node {node.id!r}: dense expects a (n, c, 1, 1) input, got spatial {h}x{w}"
                )
            if c != node.dense_in:
                raise GraphError(
                    f"node {node.id!r}: input has {c} channels, dense expects {node.dense_in}"
                )
            shape = (n, node.dense_out, 1, 1)
        else:  # pragma: no cover - guarded by validate_graph
            raise GraphError(f"node {node.id!r} has unknown kind {node.kind!r}")
        shapes[node.id] = shape
    return shapes


@dataclass(frozen=True)
class ParamSlot:
    name: str
    shape: tuple[int, ...]
    kind: str  # conv_weight | conv_bias | dense_weight | dense_bias | scale
    owner: str
    block_tag: str
    fan_in: int


def slot_owner_map(graph: Graph) -> dict[str, str]:
    """node id -> id of the node owning its parameter slots (sharing-aware)."""
    order = {n.id: i for i, n in enumerate(graph.nodes)}
    owner = {n.id: n.id for n in graph.nodes}
    for group in graph.shared_groups:
        head = min(group, key=lambda nid: order[nid])
        for nid in group:
            owner[nid] = head
    return owner


def param_slots(graph: Graph) -> list[ParamSlot]:
    """Unique parameter slots in graph order (shared convs contribute once)."""
    owner = slot_owner_map(graph)
    slots: list[ParamSlot] = []
    emitted: set[str] = set()
    for node in graph.nodes:
        own = owner[node.id]
        if own != node.id:
            continue  # slots emitted by the owning member
        if node.kind == "conv":
            p = node.conv
            fan_in = (p.in_channels // p.groups) * p.kernel[0] * p.kernel[1]
            name = f"{own}.weight"
            if name not in emitted:
                emitted.add(name)
                slots.append(ParamSlot(name, p.weight_shape, "conv_weight", own, node.block_tag, fan_in))
            if p.has_bias:
                name = f"{own}.bias"
                emitted.add(name)
                slots.append(ParamSlot(name, (p.out_channels,), "conv_bias", own, node.block_tag, fan_in))
        elif node.kind == "dense":
            name = f"{node.id}.weight"
            slots.append(ParamSlot(name, (node.dense_out, node.dense_in), "dense_weight", node.id, node.block_tag, node.dense_in))
            if node.dense_bias:
                slots.append(ParamSlot(f"{node.id}.bias", (node.dense_out,), "dense_bias", node.id, node.block_tag, node.dense_in))
        elif node.kind == "scale" and node.scale_learnable:
            slots.append(ParamSlot(f"{node.id}.scale", (1,), "scale", node.id, node.block_tag, 1))
    return slots


def fingerprint(graph: Graph) -> str:
    """Stable hash of the ordered (slot name, shape) list."""
    h = hashlib.sha256()
    for slot in param_slots(graph):
        h.update(slot.name.encode())
        h.update(b"|")
        h.update("x".join(str(d) for d in slot.shape).encode())
        h.update(b"\n")
    return h.hexdigest()


def rename_graph(graph: Graph, name: str) -> Graph:
    return replace(graph, name=name, _by_id={})


def receptive_field(graph: Graph) -> int | None:
    """Receptive field of one output pixel in input pixels, max over DAG paths.

    Composition: a conv with kernel k, dilation d grows the field by
    (k-1)*d*jump and multiplies jump by its stride; pixel_shuffle and
    resize divide jump by their scale; resize also adds its own kernel
    footprint. global_avg_pool makes the field unbounded, reported as None.
    """
    validate_graph(graph)
    # per node: (rf: Fraction, jump: Fraction | None, global: bool)
    state: dict[str, tuple[Fraction, Fraction | None, bool]] = {}
    for node in graph.nodes:
        if node.kind == "input":
            state[node.id] = (Fraction(1), Fraction(1), False)
            continue
        src = [state[s] for s in node.inputs]
        rf = max(s[0] for s in src)
        jumps = [s[1] for s in src if s[1] is not None]
        jump = jumps[0] if jumps else None
        is_global = any(s[2] for s in src)
        if node.kind == "conv":
            p = node.conv
            if jump is not None:
                kh, kw = p.kernel
                rf = rf + (max(kh, kw) - 1) * p.dilation * jump
                jump = jump * p.stride
        elif node.kind == "pixel_shuffle":
            if jump is not None:
                jump = jump / node.shuffle_r
        elif node.kind == "resize":
            scale = Fraction(node.scale_num, node.scale_den)
            if jump is not None:
                span = 2 if node.resize_mode == "bilinear" else 4
                widen = max(Fraction(1), 1 / scale) if node.resize_antialias else Fraction(1)
                rf = rf + (math.ceil(span * widen) - 1) * jump
                jump = jump / scale
        elif node.kind == "global_avg_pool":
            is_global = True
            jump = None
        state[node.id] = (rf, jump, is_global)
    rf, _, is_global = state[graph.output]
    if is_global:
        return None
    return math.ceil(rf)
