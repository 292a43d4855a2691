"""Line-oriented text serialization of layer graphs.

Format (one declaration per line, '#' starts a comment):

    srzoo-graph v1
    name <graph name>
    meta <key>=<value>
    node <id> <kind> [in=<a,b,...>] [tag=<tag>] [<kind fields>]
    share <id> <id> [...]
    output <id>

Serialization is deterministic and parse(to_text(g)) reproduces g exactly.
"""

from __future__ import annotations

from fractions import Fraction

from ..tensor import ConvParams
from .graph import Graph, GraphError, LayerSpec, validate_graph

HEADER = "srzoo-graph v1"


class GraphTextError(ValueError):
    """Raised when graph text cannot be parsed; includes the line number."""


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _conv_fields(p: ConvParams) -> str:
    return (
        f"cin={p.in_channels} cout={p.out_channels} k={p.kernel[0]}x{p.kernel[1]} "
        f"stride={p.stride} pad={p.padding[0]}x{p.padding[1]} dil={p.dilation} "
        f"groups={p.groups} padmode={p.pad_mode} bias={int(p.has_bias)}"
    )


def to_text(graph: Graph) -> str:
    validate_graph(graph)
    lines = [HEADER, f"name {graph.name}"]
    for k, v in graph.meta:
        lines.append(f"meta {k}={v}")
    for n in graph.nodes:
        parts = [f"node {n.id} {n.kind}"]
        if n.inputs:
            parts.append("in=" + ",".join(n.inputs))
        if n.block_tag:
            parts.append(f"tag={n.block_tag}")
        if n.kind == "conv":
            parts.append(_conv_fields(n.conv))
        elif n.kind == "activation":
            parts.append(f"fn={n.act_kind} alpha={_fmt_float(n.act_alpha)}")
        elif n.kind == "pixel_shuffle":
            parts.append(f"r={n.shuffle_r}")
        elif n.kind == "resize":
            parts.append(
                f"scale={n.scale_num}/{n.scale_den} mode={n.resize_mode} "
                f"antialias={int(n.resize_antialias)} align={int(n.resize_align_corners)}"
            )
        elif n.kind == "split":
            parts.append(
                "sizes=" + ",".join(str(s) for s in n.split_sizes) + f" index={n.split_index}"
            )
        elif n.kind == "scale":
            parts.append(f"learnable={int(n.scale_learnable)} init={_fmt_float(n.scale_init)}")
        elif n.kind == "dense":
            parts.append(f"cin={n.dense_in} cout={n.dense_out} bias={int(n.dense_bias)}")
        lines.append(" ".join(parts))
    for group in graph.shared_groups:
        lines.append("share " + " ".join(group))
    lines.append(f"output {graph.output}")
    return "\n".join(lines) + "\n"


def _parse_kv(tokens: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise GraphTextError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if k in out:
            raise GraphTextError(f"line {lineno}: duplicate field {k!r}")
        out[k] = v
    return out


def _need(kv: dict[str, str], key: str, lineno: int) -> str:
    if key not in kv:
        raise GraphTextError(f"line {lineno}: missing required field {key!r}")
    return kv.pop(key)


def _to_int(v: str, key: str, lineno: int) -> int:
    try:
        return int(v)
    except ValueError:
        raise GraphTextError(f"line {lineno}: field {key!r} must be an integer, got {v!r}") from None


def _to_float(v: str, key: str, lineno: int) -> float:
    try:
        return float(v)
    except ValueError:
        raise GraphTextError(f"line {lineno}: field {key!r} must be a number, got {v!r}") from None


def _to_pair(v: str, key: str, lineno: int) -> tuple[int, int]:
    parts = v.split("x")
    if len(parts) != 2:
        raise GraphTextError(f"line {lineno}: field {key!r} must look like AxB, got {v!r}")
    return (_to_int(parts[0], key, lineno), _to_int(parts[1], key, lineno))


def _parse_node(tokens: list[str], lineno: int) -> LayerSpec:
    if len(tokens) < 2:
        raise GraphTextError(f"line {lineno}: node needs '<id> <kind>'")
    nid, kind = tokens[0], tokens[1]
    kv = _parse_kv(tokens[2:], lineno)
    inputs = tuple(s for s in kv.pop("in", "").split(",") if s)
    tag = kv.pop("tag", "")
    spec = dict(id=nid, kind=kind, inputs=inputs, block_tag=tag)
    if kind == "conv":
        spec["conv"] = ConvParams(
            in_channels=_to_int(_need(kv, "cin", lineno), "cin", lineno),
            out_channels=_to_int(_need(kv, "cout", lineno), "cout", lineno),
            kernel=_to_pair(_need(kv, "k", lineno), "k", lineno),
            stride=_to_int(_need(kv, "stride", lineno), "stride", lineno),
            padding=_to_pair(_need(kv, "pad", lineno), "pad", lineno),
            dilation=_to_int(_need(kv, "dil", lineno), "dil", lineno),
            groups=_to_int(_need(kv, "groups", lineno), "groups", lineno),
            pad_mode=_need(kv, "padmode", lineno),
            has_bias=bool(_to_int(_need(kv, "bias", lineno), "bias", lineno)),
        )
    elif kind == "activation":
        spec["act_kind"] = _need(kv, "fn", lineno)
        spec["act_alpha"] = _to_float(_need(kv, "alpha", lineno), "alpha", lineno)
    elif kind == "pixel_shuffle":
        spec["shuffle_r"] = _to_int(_need(kv, "r", lineno), "r", lineno)
    elif kind == "resize":
        sc = _need(kv, "scale", lineno)
        if "/" not in sc:
            raise GraphTextError(f"line {lineno}: scale must look like num/den, got {sc!r}")
        num_s, den_s = sc.split("/", 1)
        spec["scale_num"] = _to_int(num_s, "scale", lineno)
        spec["scale_den"] = _to_int(den_s, "scale", lineno)
        spec["resize_mode"] = _need(kv, "mode", lineno)
        spec["resize_antialias"] = bool(_to_int(_need(kv, "antialias", lineno), "antialias", lineno))
        spec["resize_align_corners"] = bool(_to_int(_need(kv, "align", lineno), "align", lineno))
    elif kind == "split":
        sizes = _need(kv, "sizes", lineno)
        spec["split_sizes"] = tuple(_to_int(s, "sizes", lineno) for s in sizes.split(","))
        spec["split_index"] = _to_int(_need(kv, "index", lineno), "index", lineno)
    elif kind == "scale":
        spec["scale_learnable"] = bool(_to_int(_need(kv, "learnable", lineno), "learnable", lineno))
        spec["scale_init"] = _to_float(_need(kv, "init", lineno), "init", lineno)
    elif kind == "dense":
        spec["dense_in"] = _to_int(_need(kv, "cin", lineno), "cin", lineno)
        spec["dense_out"] = _to_int(_need(kv, "cout", lineno), "cout", lineno)
        spec["dense_bias"] = bool(_to_int(_need(kv, "bias", lineno), "bias", lineno))
    elif kind in ("input", "global_avg_pool", "concat", "add", "mul"):
        pass
    else:
        raise GraphTextError(f"line {lineno}: unknown node kind {kind!r}")
    if kv:
        raise GraphTextError(f"line {lineno}: unexpected fields {sorted(kv)}")
    try:
        return LayerSpec(**spec)
    except ValueError as e:
        raise GraphTextError(f"line {lineno}: {e}") from None


def from_text(text: str) -> Graph:
    lines = text.split("\n")
    if not lines or lines[0].strip() != HEADER:
        raise GraphTextError(f"line 1: expected header {HEADER!r}")
    name = ""
    meta: list[tuple[str, str]] = []
    nodes: list[LayerSpec] = []
    shares: list[tuple[str, ...]] = []
    output: str | None = None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head, rest = tokens[0], tokens[1:]
        if head == "name":
            if not rest:
                raise GraphTextError(f"line {lineno}: name needs a value")
            name = " ".join(rest)
        elif head == "meta":
            kv = _parse_kv(rest, lineno)
            meta.extend(sorted(kv.items()))
        elif head == "node":
            nodes.append(_parse_node(rest, lineno))
        elif head == "share":
            if len(rest) < 2:
                raise GraphTextError(f"line {lineno}: share needs at least two node ids")
            shares.append(tuple(rest))
        elif head == "output":
            if len(rest) != 1:
                raise GraphTextError(f"line {lineno}: output needs exactly one node id")
            output = rest[0]
        else:
            raise GraphTextError(f"line {lineno}: unknown declaration {head!r}")
    if output is None:
        raise GraphTextError("missing 'output' declaration")
    graph = Graph(
        name=name,
        nodes=tuple(nodes),
        output=output,
        shared_groups=tuple(shares),
        meta=tuple(meta),
    )
    try:
        validate_graph(graph)
    except GraphError as e:
        raise GraphTextError(str(e)) from None
    return graph
