"""Builder toolkit shared by the zoo architectures."""

from __future__ import annotations

from fractions import Fraction

from ..ir.graph import Graph, GraphError, LayerSpec, validate_graph
from ..tensor import ConvParams, same_padding


class GraphBuilder:
    """Accumulates LayerSpec nodes in declaration order.

    Methods return the new node's id so call sites chain naturally:

        x = b.input("lr")
        x = b.conv("head", x, 3, 64, tag="SfeBlk")
    """

    def __init__(self, name: str, meta: dict[str, object] | None = None):
        self.name = name
        self.nodes: list[LayerSpec] = []
        self.shared: list[tuple[str, ...]] = []
        self.meta = {k: str(v) for k, v in (meta or {}).items()}

    def _add(self, spec: LayerSpec) -> str:
        self.nodes.append(spec)
        return spec.id

    def input(self, node_id: str = "lr") -> str:
        return self._add(LayerSpec(id=node_id, kind="input"))

    def conv(
        self,
        node_id: str,
        src: str,
        cin: int,
        cout: int,
        k: int = 3,
        stride: int = 1,
        pad: tuple[int, int] | None = None,
        dilation: int = 1,
        groups: int = 1,
        pad_mode: str = "zero",
        bias: bool = True,
        tag: str = "",
    ) -> str:
        kernel = (k, k) if isinstance(k, int) else k
        if pad is None:
            pad = same_padding(kernel, dilation)
        params = ConvParams(
            in_channels=cin,
            out_channels=cout,
            kernel=kernel,
            stride=stride,
            padding=pad,
            dilation=dilation,
            groups=groups,
            pad_mode=pad_mode,
            has_bias=bias,
        )
        return self._add(
            LayerSpec(id=node_id, kind="conv", inputs=(src,), block_tag=tag, conv=params)
        )

    def act(self, node_id: str, src: str, fn: str = "leaky_relu", alpha: float = 0.2, tag: str = "") -> str:
        return self._add(
            LayerSpec(id=node_id, kind="activation", inputs=(src,), block_tag=tag,
                      act_kind=fn, act_alpha=alpha)
        )

    def pixel_shuffle(self, node_id: str, src: str, r: int, tag: str = "") -> str:
        return self._add(
            LayerSpec(id=node_id, kind="pixel_shuffle", inputs=(src,), block_tag=tag, shuffle_r=r)
        )

    def resize(
        self,
        node_id: str,
        src: str,
        scale: Fraction | int,
        mode: str = "bilinear",
        antialias: bool = False,
        align_corners: bool = False,
        tag: str = "",
    ) -> str:
        frac = Fraction(scale)
        return self._add(
            LayerSpec(
                id=node_id, kind="resize", inputs=(src,), block_tag=tag,
                scale_num=frac.numerator, scale_den=frac.denominator,
                resize_mode=mode, resize_antialias=antialias,
                resize_align_corners=align_corners,
            )
        )

    def gap(self, node_id: str, src: str, tag: str = "") -> str:
        return self._add(LayerSpec(id=node_id, kind="global_avg_pool", inputs=(src,), block_tag=tag))

    def concat(self, node_id: str, srcs: list[str], tag: str = "") -> str:
        return self._add(LayerSpec(id=node_id, kind="concat", inputs=tuple(srcs), block_tag=tag))

    def split(self, node_id: str, src: str, sizes: tuple[int, ...], index: int, tag: str = "") -> str:
        return self._add(
            LayerSpec(id=node_id, kind="split", inputs=(src,), block_tag=tag,
                      split_sizes=tuple(sizes), split_index=index)
        )

    def add(self, node_id: str, srcs: list[str], tag: str = "") -> str:
        return self._add(LayerSpec(id=node_id, kind="add", inputs=tuple(srcs), block_tag=tag))

    def mul(self, node_id: str, a: str, b: str, tag: str = "") -> str:
        return self._add(LayerSpec(id=node_id, kind="mul", inputs=(a, b), block_tag=tag))

    def scale(self, node_id: str, src: str, learnable: bool, init: float = 1.0, tag: str = "") -> str:
        return self._add(
            LayerSpec(id=node_id, kind="scale", inputs=(src,), block_tag=tag,
                      scale_learnable=learnable, scale_init=init)
        )

    def dense(self, node_id: str, src: str, cin: int, cout: int, bias: bool = True, tag: str = "") -> str:
        return self._add(
            LayerSpec(id=node_id, kind="dense", inputs=(src,), block_tag=tag,
                      dense_in=cin, dense_out=cout, dense_bias=bias)
        )

    def share(self, *node_ids: str) -> None:
        self.shared.append(tuple(node_ids))

    def build(self, output: str) -> Graph:
        graph = Graph(
            name=self.name,
            nodes=tuple(self.nodes),
            output=output,
            shared_groups=tuple(self.shared),
            meta=tuple(sorted(self.meta.items())),
        )
        validate_graph(graph)
        return graph


def residual_block(
    b: GraphBuilder,
    prefix: str,
    src: str,
    width: int,
    alpha: float = 0.2,
    dilations: tuple[int, int] = (1, 1),
    bias: bool = True,
    res_scale: float | None = None,
    act: str = "leaky_relu",
    tag: str = "",
) -> str:
    """Two 3x3 convs with a mid activation and an identity skip."""
    c1 = b.conv(f"{prefix}.conv1", src, width, width, dilation=dilations[0], bias=bias, tag=tag)
    a1 = b.act(f"{prefix}.act", c1, fn=act, alpha=alpha, tag=tag)
    c2 = b.conv(f"{prefix}.conv2", a1, width, width, dilation=dilations[1], bias=bias, tag=tag)
    body = c2
    if res_scale is not None:
        body = b.scale(f"{prefix}.res_scale", c2, learnable=False, init=res_scale, tag=tag)
    return b.add(f"{prefix}.add", [src, body], tag=tag)


def se_gate(
    b: GraphBuilder,
    prefix: str,
    src: str,
    channels: int,
    reduction: int = 4,
    gate: str = "sigmoid",
    tag: str = "",
) -> str:
    """Squeeze-excite: pool -> dense bottleneck -> gate -> channel rescale."""
    hidden = max(1, channels // reduction)
    g = b.gap(f"{prefix}.pool", src, tag=tag)
    d1 = b.dense(f"{prefix}.reduce", g, channels, hidden, tag=tag)
    a1 = b.act(f"{prefix}.relu", d1, fn="relu", tag=tag)
    d2 = b.dense(f"{prefix}.expand", a1, hidden, channels, tag=tag)
    a2 = b.act(f"{prefix}.gate", d2, fn=gate, tag=tag)
    return b.mul(f"{prefix}.rescale", src, a2, tag=tag)


def shuffle_upsampler(
    b: GraphBuilder,
    prefix: str,
    src: str,
    width: int,
    alpha: float = 0.2,
    stages: int = 2,
    bias: bool = True,
    tag: str = "UpsBlk",
) -> str:
    """MSRResNet-style x4 upsampler: (conv to 4w -> shuffle x2 -> lrelu) twice."""
    cur = src
    for i in range(1, stages + 1):
        c = b.conv(f"{prefix}.conv{i}", cur, width, 4 * width, bias=bias, tag=tag)
        s = b.pixel_shuffle(f"{prefix}.shuffle{i}", c, 2, tag=tag)
        cur = b.act(f"{prefix}.act{i}", s, alpha=alpha, tag=tag)
    return cur
