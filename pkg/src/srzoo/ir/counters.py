"""Exact parameter and multiply-accumulate accounting for layer graphs.

Conventions: parameters include biases and learnable scalars; weights
aliased by a shared group are counted once (attributed to the owning
node's block tag). MACs count one multiply-accumulate per kernel tap:
k_h * k_w * (c_in / groups) * c_out * out_h * out_w per conv node and
in * out per dense node, for every node executed (sharing does not
reduce compute); biases, activations, resizes and elementwise ops are
free. MAC totals scale with the batch dimension of the given input.
"""

from __future__ import annotations

import math

from .graph import Graph, infer_shapes, param_slots


def count_params(graph: Graph) -> int:
    return sum(math.prod(slot.shape) for slot in param_slots(graph))


def count_params_by_tag(graph: Graph) -> dict[str, int]:
    out: dict[str, int] = {}
    for slot in param_slots(graph):
        out[slot.block_tag] = out.get(slot.block_tag, 0) + math.prod(slot.shape)
    return out


def _node_macs(node, in_shape, out_shape) -> int:
    if node.kind == "conv":
        p = node.conv
        taps = p.kernel[0] * p.kernel[1] * (p.in_channels // p.groups)
        n, _, oh, ow = out_shape
        return taps * p.out_channels * oh * ow * n
    if node.kind == "dense":
        return node.dense_in * node.dense_out * in_shape[0]
    return 0


def count_macs(graph: Graph, input_shape: tuple[int, int, int, int]) -> int:
    shapes = infer_shapes(graph, input_shape)
    total = 0
    for node in graph.nodes:
        if node.kind in ("conv", "dense"):
            total += _node_macs(node, shapes[node.inputs[0]], shapes[node.id])
    return total


def count_macs_by_tag(graph: Graph, input_shape: tuple[int, int, int, int]) -> dict[str, int]:
    shapes = infer_shapes(graph, input_shape)
    out: dict[str, int] = {}
    for node in graph.nodes:
        if node.kind in ("conv", "dense"):
            macs = _node_macs(node, shapes[node.inputs[0]], shapes[node.id])
            out[node.block_tag] = out.get(node.block_tag, 0) + macs
    return out


def share_percentages(by_tag: dict[str, int]) -> dict[str, float]:
    """Per-tag share of the total, in percent."""
    total = sum(by_tag.values())
    if total == 0:
        return {tag: 0.0 for tag in by_tag}
    return {tag: 100.0 * v / total for tag, v in by_tag.items()}
