"""Structured channel pruning on layer graphs.

prune_channels narrows one conv node's output channels and slices every
downstream consumer that can absorb the change (activations and scalar
scales pass through; consumer convs lose input slices). Anything else --
concat, split, pixel_shuffle, add, mul, pooling, dense, the graph output
itself -- makes the site structurally un-prunable and raises.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .graph import Graph, GraphError, fingerprint, validate_graph
from .weights import WeightStore, check_store

PASS_THROUGH = ("activation", "scale")


class PruneError(ValueError):
    """Raised when a prune site cannot be narrowed consistently."""


def prune_channels(
    graph: Graph,
    store: WeightStore,
    conv_id: str,
    keep: np.ndarray,
) -> tuple[Graph, WeightStore]:
    """Return a new (graph, store) with conv_id's output channels masked.

    keep is a boolean mask over the conv's output channels; at least one
    channel must survive. An all-true mask returns unchanged copies.
    """
    validate_graph(graph)
    check_store(graph, store)
    node = graph.node(conv_id)
    if node.kind != "conv":
        raise PruneError(f"node {conv_id!r} is a {node.kind} node, not a conv")
    for group in graph.shared_groups:
        if conv_id in group:
            raise PruneError(
                f"conv {conv_id!r} belongs to shared group {group}; pruning a "
                "shared slot would silently change its other users"
            )
    keep = np.asarray(keep, dtype=bool)
    if keep.shape != (node.conv.out_channels,):
        raise PruneError(
            f"mask has shape {tuple(keep.shape)}, conv {conv_id!r} has "
            f"{node.conv.out_channels} output channels"
        )
    if not keep.any():
        raise PruneError("mask must keep at least one channel")
    if keep.all():
        return graph, store.copy()
    if node.conv.groups != 1:
        raise PruneError(f"conv {conv_id!r} is grouped; channel pruning needs groups=1")

    consumers = graph.consumers()
    if graph.output == conv_id:
        raise PruneError(f"conv {conv_id!r} is the graph output; cannot narrow it")

    # Walk forward through pass-through nodes; collect convs whose input
    # slices must shrink. Anything else cannot absorb a narrowed channel set.
    to_narrow: list[str] = []
    frontier = [conv_id]
    seen = set()
    while frontier:
        cur = frontier.pop()
        for nxt_id in consumers[cur]:
            nxt = graph.node(nxt_id)
            if nxt.kind == "conv":
                if nxt.conv.groups != 1:
                    raise PruneError(
                        f"consumer conv {nxt_id!r} is grouped; cannot narrow its input"
                    )
                to_narrow.append(nxt_id)
            elif nxt.kind in PASS_THROUGH:
                if nxt_id == graph.output:
                    raise PruneError(
                        f"pruned channels reach the graph output via {nxt_id!r}"
                    )
                if nxt_id not in seen:
                    seen.add(nxt_id)
                    frontier.append(nxt_id)
            else:
                raise PruneError(
                    f"conv {conv_id!r} feeds node {nxt_id!r} of kind {nxt.kind!r}; "
                    "site is structurally un-prunable"
                )

    kept = int(keep.sum())
    new_nodes = []
    for n in graph.nodes:
        if n.id == conv_id:
            new_nodes.append(replace(n, conv=replace(n.conv, out_channels=kept)))
        elif n.id in to_narrow:
            new_nodes.append(replace(n, conv=replace(n.conv, in_channels=kept)))
        else:
            new_nodes.append(n)
    new_graph = Graph(
        name=graph.name,
        nodes=tuple(new_nodes),
        output=graph.output,
        shared_groups=graph.shared_groups,
        meta=graph.meta,
    )

    new_store = store.copy()
    new_store[f"{conv_id}.weight"] = store[f"{conv_id}.weight"][keep]
    if node.conv.has_bias:
        new_store[f"{conv_id}.bias"] = store[f"{conv_id}.bias"][keep]
    for nid in to_narrow:
        new_store[f"{nid}.weight"] = store[f"{nid}.weight"][:, keep]
    new_store.fingerprint = fingerprint(new_graph)
    try:
        check_store(new_graph, new_store)
    except Exception as e:  # pragma: no cover - internal consistency guard
        raise PruneError(f"pruned store failed validation: {e}") from e
    return new_graph, new_store
