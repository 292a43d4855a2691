"""Graph IR: validation, shape inference, serialization, receptive field."""

import pytest

from srzoo.ir import graph as G
from srzoo.ir import textfmt
from srzoo.tensor import ConvParams
from srzoo.zoo import build_model


def node(nid, kind, inputs=(), **kw):
    return G.LayerSpec(id=nid, kind=kind, inputs=tuple(inputs), **kw)


def conv_node(nid, src, cin, cout, k=3, **kw):
    pad = (k // 2, k // 2)
    return node(nid, "conv", [src], conv=ConvParams(cin, cout, (k, k), padding=pad, **kw))


def chain(*nodes, output=None):
    return G.Graph(name="t", nodes=tuple(nodes), output=output or nodes[-1].id)


# -------------------------------------------------------------- validation

def test_validate_accepts_minimal_graph():
    g = chain(node("x", "input"), conv_node("c", "x", 3, 8))
    G.validate_graph(g)


def test_validate_rejects_duplicate_ids():
    g = chain(node("x", "input"), conv_node("x", "x", 3, 8), output="x")
    with pytest.raises(G.GraphError, match="duplicate node id 'x'"):
        G.validate_graph(g)


def test_validate_rejects_forward_reference():
    g = G.Graph(
        name="t",
        nodes=(node("x", "input"), node("a", "add", ["x", "later"]), conv_node("later", "x", 3, 3)),
        output="later",
    )
    with pytest.raises(G.GraphError, match="'a' references 'later'"):
        G.validate_graph(g)


def test_validate_rejects_unknown_kind_and_bad_arity():
    with pytest.raises(G.GraphError, match="unknown kind 'norm'"):
        G.validate_graph(chain(node("x", "input"), node("n", "norm", ["x"])))
    with pytest.raises(G.GraphError, match="'cat'"):
        G.validate_graph(chain(node("x", "input"), node("cat", "concat", ["x"])))


def test_validate_rejects_missing_output_and_multiple_inputs():
    g = G.Graph(name="t", nodes=(node("x", "input"),), output="nope")
    with pytest.raises(G.GraphError, match="output node 'nope'"):
        G.validate_graph(g)
    g2 = chain(node("x", "input"), node("y", "input"), output="y")
    with pytest.raises(G.GraphError, match="exactly one input"):
        G.validate_graph(g2)


def test_validate_shared_groups():
    a = conv_node("a", "x", 8, 8)
    b = conv_node("b", "a", 8, 8)
    g = G.Graph(name="t", nodes=(node("x", "input"), a, b), output="b",
                shared_groups=(("a", "b"),))
    G.validate_graph(g)
    # mixing differing conv configs is rejected
    c = conv_node("c", "b", 8, 8, k=1)
    g2 = G.Graph(name="t", nodes=(node("x", "input"), a, b, c), output="c",
                 shared_groups=(("a", "c"),))
    with pytest.raises(G.GraphError, match="differing conv configurations"):
        G.validate_graph(g2)
    # non-conv member
    g3 = G.Graph(name="t", nodes=(node("x", "input"), a, b), output="b",
                 shared_groups=(("x", "a"),))
    with pytest.raises(G.GraphError, match="not a conv node"):
        G.validate_graph(g3)


# --------------------------------------------------------- shape inference

def test_infer_shapes_msrresnet_x4():
    g = build_model("msrresnet")
    shapes = G.infer_shapes(g, (1, 3, 48, 48))
    assert shapes[g.output] == (1, 3, 192, 192)


def test_infer_shapes_channel_mismatch_names_node():
    g = chain(node("x", "input"), conv_node("body", "x", 16, 8))
    with pytest.raises(G.GraphError, match="node 'body'.*3 channels.*expects 16"):
        G.infer_shapes(g, (1, 3, 8, 8))


def test_infer_shapes_concat_mismatch_names_node():
    g = G.Graph(
        name="t",
        nodes=(
            node("x", "input"),
            conv_node("a", "x", 3, 4),
            node("down", "resize", ["x"], scale_num=1, scale_den=2),
            node("cat", "concat", ["a", "down"]),
        ),
        output="cat",
    )
    with pytest.raises(G.GraphError, match="node 'cat'"):
        G.infer_shapes(g, (1, 3, 8, 8))


def test_infer_shapes_pixel_shuffle_and_broadcast_add():
    g = G.Graph(
        name="t",
        nodes=(
            node("x", "input"),
            conv_node("up", "x", 3, 12),
            node("ps", "pixel_shuffle", ["up"], shuffle_r=2),
            node("gap", "global_avg_pool", ["ps"]),
            node("sum", "add", ["ps", "gap"]),
        ),
        output="sum",
    )
    shapes = G.infer_shapes(g, (2, 3, 5, 7))
    assert shapes["ps"] == (2, 3, 10, 14)
    assert shapes["gap"] == (2, 3, 1, 1)
    assert shapes["sum"] == (2, 3, 10, 14)


def test_infer_shapes_split_must_cover_channels():
    g = chain(node("x", "input"), node("s", "split", ["x"], split_sizes=(2, 2), split_index=0))
    with pytest.raises(G.GraphError, match="node 's'.*sum to 3"):
        G.infer_shapes(g, (1, 3, 4, 4))


def test_infer_shapes_resize_ceil():
    g = chain(node("x", "input"), node("d", "resize", ["x"], scale_num=1, scale_den=4))
    shapes = G.infer_shapes(g, (1, 3, 10, 8))
    assert shapes["d"] == (1, 3, 3, 2)  # ceil(10/4), 8/4


# -------------------------------------------------------- slots and hashes

def test_param_slots_order_and_sharing():
    a = conv_node("a", "x", 4, 4)
    b = conv_node("b", "a", 4, 4)
    g = G.Graph(name="t", nodes=(node("x", "input"), a, b), output="b")
    names = [s.name for s in G.param_slots(g)]
    assert names == ["a.weight", "a.bias", "b.weight", "b.bias"]

    shared = G.Graph(name="t", nodes=(node("x", "input"), a, b), output="b",
                     shared_groups=(("a", "b"),))
    names_shared = [s.name for s in G.param_slots(shared)]
    assert names_shared == ["a.weight", "a.bias"]


def test_fingerprint_stable_and_sensitive():
    g1 = build_model("msrresnet")
    g2 = build_model("msrresnet")
    assert G.fingerprint(g1) == G.fingerprint(g2)
    g3 = build_model("msrresnet", {"blocks": 10})
    assert G.fingerprint(g1) != G.fingerprint(g3)
    assert len(G.fingerprint(g1)) == 64  # sha256 hex


# ------------------------------------------------------------- text format

def test_text_roundtrip_all_builders_exact():
    for arch in ("msrresnet", "imdn", "assr", "recdense", "wmrn"):
        g = build_model(arch)
        text = textfmt.to_text(g)
        back = textfmt.from_text(text)
        assert back == g
        assert textfmt.to_text(back) == text


def test_text_parse_errors_carry_line_numbers():
    with pytest.raises(textfmt.GraphTextError, match="line 1: expected header"):
        textfmt.from_text("not a graph\n")
    bad_field = "srzoo-graph v1\nname t\nnode x input\nnode c conv in=x cin=3\noutput c\n"
    with pytest.raises(textfmt.GraphTextError, match="line 4: missing required field"):
        textfmt.from_text(bad_field)
    bad_int = "srzoo-graph v1\nname t\nnode x input\nnode p pixel_shuffle in=x r=two\noutput p\n"
    with pytest.raises(textfmt.GraphTextError, match="line 4: field 'r' must be an integer"):
        textfmt.from_text(bad_int)
    with pytest.raises(textfmt.GraphTextError, match="missing 'output'"):
        textfmt.from_text("srzoo-graph v1\nname t\nnode x input\n")


def test_text_comments_and_blank_lines_ignored():
    text = (
        "srzoo-graph v1\n"
        "name demo\n"
        "\n"
        "# a comment\n"
        "node x input\n"
        "node r resize in=x scale=4/1 mode=bilinear antialias=0 align=0  # inline\n"
        "output r\n"
    )
    g = textfmt.from_text(text)
    assert g.name == "demo"
    assert g.node("r").resize_scale == 4


# --------------------------------------------------------- receptive field

def test_receptive_field_small_cases():
    g1 = chain(node("x", "input"), conv_node("c", "x", 3, 8))
    assert G.receptive_field(g1) == 3
    g2 = chain(node("x", "input"), conv_node("c1", "x", 3, 8), conv_node("c2", "c1", 8, 8))
    assert G.receptive_field(g2) == 5
    g3 = chain(
        node("x", "input"),
        node("d", "conv", ["x"], conv=ConvParams(3, 8, (3, 3), padding=(2, 2), dilation=2)),
    )
    assert G.receptive_field(g3) == 5


def test_receptive_field_takes_max_path():
    g = G.Graph(
        name="t",
        nodes=(
            node("x", "input"),
            conv_node("deep1", "x", 3, 8),
            conv_node("deep2", "deep1", 8, 8),
            conv_node("wide", "x", 3, 8, k=1),
            node("sum", "add", ["deep2", "wide"]),
        ),
        output="sum",
    )
    assert G.receptive_field(g) == 5


def test_receptive_field_none_when_global():
    g = chain(
        node("x", "input"),
        conv_node("c", "x", 3, 8),
        node("g", "global_avg_pool", ["c"]),
        node("m", "mul", ["c", "g"]),
    )
    assert G.receptive_field(g) is None


def test_receptive_field_zoo_anchor():
    assert G.receptive_field(build_model("msrresnet")) == 71


def test_node_lookup_and_input_id():
    g = build_model("msrresnet")
    assert g.node(g.input_id).kind == "input"
    with pytest.raises(G.GraphError, match="no node 'ghost'"):
        g.node("ghost")
