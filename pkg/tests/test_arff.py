import numpy as np
import pytest

from ufsbench.arff import (
    ArffParseError,
    LabelSpec,
    label_spec_from_relation,
    parse_arff,
    parse_label_xml,
    serialize_arff,
)
from ufsbench.dataset import DatasetError, MultiLabelDataset

DENSE = """\
@relation demo
@attribute f1 numeric
@attribute f2 numeric
@attribute l1 {0,1}
@attribute l2 {0,1}
@data
1.0,2.0,0,1
3.5,-1.0,1,1
"""


def test_dense_parse():
    ds = parse_arff(DENSE, LabelSpec.last(2))
    assert ds.name == "demo"
    assert np.array_equal(ds.X, [[1.0, 2.0], [3.5, -1.0]])
    assert np.array_equal(ds.Y, [[0, 1], [1, 1]])
    assert ds.feature_names == ("f1", "f2")
    assert ds.label_names == ("l1", "l2")


def test_single_label_rejected():
    text = """@relation t
@attribute a numeric
@attribute b numeric
@attribute c {0,1}
@data
1,2,0
3,4,1
"""
    with pytest.raises(DatasetError, match="two labels"):
        parse_arff(text, LabelSpec.last(1))


def test_sparse_expansion():
    text = """@relation sparse
@attribute a numeric
@attribute b numeric
@attribute c numeric
@attribute l1 {0,1}
@attribute l2 {0,1}
@data
{0 2.5, 3 1}
{1 -1, 4 1}
{}
"""
    ds = parse_arff(text, LabelSpec.last(2))
    assert np.array_equal(ds.X, [[2.5, 0, 0], [0, -1, 0], [0, 0, 0]])
    assert np.array_equal(ds.Y, [[1, 0], [0, 1], [0, 0]])


def test_label_xml_order_defines_columns():
    spec = parse_label_xml(
        '<labels xmlns="http://mulan.sourceforge.net/labels">'
        '<label name="happy"/><label name="amazed"/></labels>'
    )
    assert spec.names == ("happy", "amazed")
    text = """@relation t
@attribute amazed {0,1}
@attribute f numeric
@attribute happy {0,1}
@data
1,0.5,0
0,0.25,1
"""
    ds = parse_arff(text, spec)
    assert ds.label_names == ("happy", "amazed")
    assert np.array_equal(ds.Y, [[0, 1], [1, 0]])
    assert ds.feature_names == ("f",)


def test_label_xml_errors():
    with pytest.raises(ArffParseError, match="no labels"):
        parse_label_xml("<labels></labels>")
    with pytest.raises(ArffParseError, match="duplicate"):
        parse_label_xml('<labels><label name="a"/><label name="a"/></labels>')
    with pytest.raises(ArffParseError, match="malformed"):
        parse_label_xml("<labels><label")


def test_meka_relation_convention():
    assert label_spec_from_relation("flags: -C 7") == LabelSpec.first(7)
    assert label_spec_from_relation("'foo -C -3'") == LabelSpec.last(3)
    assert label_spec_from_relation("plain-name") is None


def test_unknown_xml_label_name():
    text = """@relation t
@attribute f numeric
@attribute a {0,1}
@attribute b {0,1}
@data
1,0,1
"""
    with pytest.raises(ArffParseError, match="'c' not among"):
        parse_arff(text, LabelSpec.by_names(["a", "c"]))


def test_arity_mismatch_names_line():
    text = DENSE + "1.0,2.0,0\n"
    with pytest.raises(ArffParseError, match="line 9"):
        parse_arff(text, LabelSpec.last(2))


def test_non_binary_label_value_rejected():
    text = """@relation t
@attribute f numeric
@attribute a {0,1}
@attribute b {0,1}
@data
1,2,1
"""
    with pytest.raises(ArffParseError, match="non-binary"):
        parse_arff(text, LabelSpec.last(2))


def test_nonfinite_numeric_rejected():
    for token in ("NaN", "inf", "-Infinity"):
        text = f"""@relation t
@attribute f numeric
@attribute a {{0,1}}
@attribute b {{0,1}}
@data
{token},0,1
"""
        with pytest.raises(ArffParseError, match="non-finite"):
            parse_arff(text, LabelSpec.last(2))


def test_missing_feature_becomes_nan():
    text = """@relation t
@attribute f numeric
@attribute g numeric
@attribute a {0,1}
@attribute b {0,1}
@data
?,1,0,1
2,3,1,0
"""
    ds = parse_arff(text, LabelSpec.last(2))
    assert np.isnan(ds.X[0, 0])
    assert ds.X[1, 0] == 2


def test_all_missing_feature_column_rejected():
    text = """@relation t
@attribute f numeric
@attribute g numeric
@attribute a {0,1}
@attribute b {0,1}
@data
?,1,0,1
?,3,1,0
"""
    with pytest.raises(ArffParseError, match="no finite value"):
        parse_arff(text, LabelSpec.last(2))


def test_missing_label_rejected():
    text = """@relation t
@attribute f numeric
@attribute a {0,1}
@attribute b {0,1}
@data
1,?,1
"""
    with pytest.raises(ArffParseError, match="missing value in label"):
        parse_arff(text, LabelSpec.last(2))


def test_yes_no_labels_and_quoted_names():
    text = """@relation 'with space'
@attribute 'my feature' real
@attribute 'lab one' {no,yes}
@attribute 'lab two' {YES,NO}
@data
1.5,yes,NO
"""
    ds = parse_arff(text, LabelSpec.last(2))
    assert ds.name == "with space"
    assert ds.feature_names == ("my feature",)
    assert np.array_equal(ds.Y, [[1, 0]])


def test_multivalued_nominal_feature_rejected():
    text = """@relation t
@attribute color {red,green,blue}
@attribute a {0,1}
@attribute b {0,1}
@data
red,0,1
"""
    with pytest.raises(ArffParseError, match="non-binary nominal"):
        parse_arff(text, LabelSpec.last(2))


def test_numeric_label_column_01_accepted():
    text = """@relation t
@attribute f numeric
@attribute a numeric
@attribute b numeric
@data
0.5,0,1
1.5,1.0,0.0
"""
    ds = parse_arff(text, LabelSpec.last(2))
    assert np.array_equal(ds.Y, [[0, 1], [1, 0]])


def test_roundtrip_canonical_serialization(rng):
    X = rng.normal(size=(7, 4)) * 10.0 ** rng.integers(-8, 8, size=(7, 4))
    Y = (rng.random(size=(7, 3)) < 0.5).astype(int)
    ds = MultiLabelDataset("round trip", X, Y,
                           [f"f{i}" for i in range(4)],
                           [f"l{i}" for i in range(3)])
    text = serialize_arff(ds)
    back = parse_arff(text, LabelSpec.by_names(ds.label_names))
    assert back.name == ds.name
    assert np.array_equal(back.X, ds.X)
    assert np.array_equal(back.Y, ds.Y)
    assert back.feature_names == ds.feature_names
    assert back.label_names == ds.label_names
    # serialization is canonical: a second pass is byte-identical
    assert serialize_arff(back) == text


def test_roundtrip_preserves_missing_values():
    X = np.array([[1.0, np.nan], [np.nan, 2.0], [0.5, 0.25]])
    Y = np.array([[0, 1], [1, 0], [1, 1]])
    ds = MultiLabelDataset("gaps", X, Y, ["a", "b"], ["x", "y"])
    back = parse_arff(serialize_arff(ds), LabelSpec.last(2))
    assert np.array_equal(np.isnan(back.X), np.isnan(ds.X))
    assert np.array_equal(back.X[~np.isnan(ds.X)], ds.X[~np.isnan(ds.X)])


def test_no_data_section():
    with pytest.raises(ArffParseError, match="@data"):
        parse_arff("@relation t\n@attribute f numeric\n", LabelSpec.last(1))
