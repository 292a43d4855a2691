"""Model intermediate representation: graphs, counters, weights, execution."""

from .counters import (
    count_macs,
    count_macs_by_tag,
    count_params,
    count_params_by_tag,
    share_percentages,
)
from .executor import GraphExecutionError, forward
from .graph import (
    Graph,
    GraphError,
    LayerSpec,
    ParamSlot,
    fingerprint,
    infer_shapes,
    param_slots,
    receptive_field,
    slot_owner_map,
    validate_graph,
)
from .pruning import PruneError, prune_channels
from .textfmt import GraphTextError, from_text, to_text
from .weights import (
    WeightFormatError,
    WeightMismatchError,
    WeightStore,
    check_store,
    init_weights,
    load_weights,
    save_weights,
)

__all__ = [
    "Graph",
    "GraphError",
    "GraphExecutionError",
    "GraphTextError",
    "LayerSpec",
    "ParamSlot",
    "PruneError",
    "WeightFormatError",
    "WeightMismatchError",
    "WeightStore",
    "check_store",
    "count_macs",
    "count_macs_by_tag",
    "count_params",
    "count_params_by_tag",
    "fingerprint",
    "forward",
    "from_text",
    "infer_shapes",
    "init_weights",
    "load_weights",
    "param_slots",
    "prune_channels",
    "receptive_field",
    "save_weights",
    "share_percentages",
    "slot_owner_map",
    "to_text",
    "validate_graph",
]
