"""Topological graph execution over the tensor kernels."""

from __future__ import annotations

import numpy as np

from .. import tensor as T
from .graph import Graph, validate_graph, slot_owner_map
from .weights import WeightStore, check_store


class GraphExecutionError(RuntimeError):
    """An op failed or received bad data during forward; names the node."""


def forward(graph: Graph, store: WeightStore, x: np.ndarray, check: bool = True) -> np.ndarray:
    """Run the graph on one NCHW batch and return the output node's value.

    Intermediate results are freed as soon as their last consumer ran.
    """
    if check:
        validate_graph(graph)
        check_store(graph, store)
    x = T.as_nchw(x)
    owner = slot_owner_map(graph)
    remaining: dict[str, int] = {n.id: 0 for n in graph.nodes}
    for node in graph.nodes:
        for src in node.inputs:
            remaining[src] += 1
    remaining[graph.output] += 1

    values: dict[str, np.ndarray] = {}
    for node in graph.nodes:
        src = [values[s] for s in node.inputs]
        try:
            if node.kind == "input":
                out = x
            elif node.kind == "conv":
                own = owner[node.id]
                bias = store[f"{own}.bias"] if node.conv.has_bias else None
                out = T.conv2d(src[0], node.conv, store[f"{own}.weight"], bias)
            elif node.kind == "activation":
                out = T.activation(src[0], node.act_kind, node.act_alpha)
            elif node.kind == "pixel_shuffle":
                out = T.pixel_shuffle(src[0], node.shuffle_r)
            elif node.kind == "resize":
                out = T.resize(
                    src[0],
                    node.resize_scale,
                    node.resize_mode,
                    antialias=node.resize_antialias,
                    align_corners=node.resize_align_corners,
                )
            elif node.kind == "global_avg_pool":
                out = T.global_avg_pool(src[0])
            elif node.kind == "concat":
                out = T.concat_channels(src)
            elif node.kind == "split":
                out = T.split_channels(src[0], node.split_sizes)[node.split_index]
            elif node.kind == "add":
                out = src[0]
                for operand in src[1:]:
                    out = T.elementwise(out, operand, "add")
            elif node.kind == "mul":
                out = T.elementwise(src[0], src[1], "mul")
            elif node.kind == "scale":
                if node.scale_learnable:
                    factor = float(store[f"{node.id}.scale"][0])
                else:
                    factor = node.scale_init
                out = T.elementwise(src[0], factor, "mul")
            elif node.kind == "dense":
                v = src[0].astype(np.float64)[:, :, 0, 0]
                w = store[f"{node.id}.weight"].astype(np.float64)
                y = v @ w.T
                if node.dense_bias:
                    y = y + store[f"{node.id}.bias"].astype(np.float64)
                out = np.ascontiguousarray(
                    y.astype(np.float32)[:, :, None, None]
                )
            else:  # pragma: no cover - validate_graph rejects unknown kinds
                raise ValueError(f"unknown kind {node.kind!r}")
        except Exception as e:
            raise GraphExecutionError(f"node {node.id!r} ({node.kind}): {e}") from e
        values[node.id] = out
        for s in node.inputs:
            remaining[s] -= 1
            if remaining[s] == 0:
                del values[s]
    return values[graph.output]
