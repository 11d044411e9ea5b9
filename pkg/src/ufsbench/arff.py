"""ARFF reading/writing for multi-label datasets.

Supports dense and sparse instance sections, MULAN label-list XML companions,
and the MEKA convention of embedding ``-C n`` in the relation name.  Label
attributes must be binary (nominal two-valued or numeric 0/1); features must
be numeric.  ``?`` marks a missing feature value and is kept as NaN for the
training-fold imputation step downstream.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .dataset import MultiLabelDataset


class ArffParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class LabelSpec:
    """Identifies which ARFF attributes are labels.

    kind 'names' lists label attributes explicitly (XML order defines the
    Y column order); 'first'/'last' take a count of leading/trailing
    attributes in file order.
    """

    kind: str
    names: tuple[str, ...] = ()
    count: int = 0

    @staticmethod
    def by_names(names) -> "LabelSpec":
        return LabelSpec(kind="names", names=tuple(names))

    @staticmethod
    def first(n: int) -> "LabelSpec":
        return LabelSpec(kind="first", count=int(n))

    @staticmethod
    def last(n: int) -> "LabelSpec":
        return LabelSpec(kind="last", count=int(n))


def parse_label_xml(text: str) -> LabelSpec:
    """Parse a MULAN companion file: <labels><label name="..."/></labels>."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ArffParseError(f"malformed label XML: {exc}") from None
    names = []
    for el in root.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag == "label":
            name = el.get("name")
            if name is None:
                raise ArffParseError("<label> element without a name attribute")
            names.append(name)
    if not names:
        raise ArffParseError("label XML lists no labels")
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise ArffParseError(f"duplicate label names in XML: {dupes}")
    return LabelSpec.by_names(names)


_MEKA_C = re.compile(r"-C\s+(-?\d+)")


def label_spec_from_relation(relation: str) -> LabelSpec | None:
    """Extract a MEKA '-C n' label count from a relation name, if present.

    Positive n marks the first n attributes as labels, negative n the last
    |n| (both conventions appear in the wild).
    """
    m = _MEKA_C.search(relation)
    if m is None:
        return None
    n = int(m.group(1))
    if n == 0:
        return None
    return LabelSpec.first(n) if n > 0 else LabelSpec.last(-n)


_TRUE_TOKENS = {"1", "true", "yes", "y", "pos", "positive"}
_FALSE_TOKENS = {"0", "false", "no", "n", "neg", "negative"}

_BAD_NUMERIC = {"nan", "inf", "-inf", "+inf", "infinity", "-infinity", "+infinity"}


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _split_csv(line: str, lineno: int) -> list[str]:
    """Split a dense data line on commas, honoring single/double quotes."""
    out, buf, quote = [], [], None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
            else:
                buf.append(ch)
        elif ch in "'\"":
            quote = ch
        elif ch == ",":
            out.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    if quote:
        raise ArffParseError("unterminated quote", lineno)
    out.append("".join(buf).strip())
    return out


@dataclass
class _Attribute:
    name: str
    kind: str  # 'numeric' or 'nominal'
    domain: tuple[str, ...] = ()


_ATTR_RE = re.compile(r"@attribute\s+(.*)", re.IGNORECASE)


def _parse_attribute(rest: str, lineno: int) -> _Attribute:
    rest = rest.strip()
    if not rest:
        raise ArffParseError("@attribute without a name", lineno)
    if rest[0] in "'\"":
        closing = rest.find(rest[0], 1)
        if closing < 0:
            raise ArffParseError("unterminated quoted attribute name", lineno)
        name = rest[1:closing]
        type_part = rest[closing + 1 :].strip()
    else:
        parts = rest.split(None, 1)
        if len(parts) != 2:
            raise ArffParseError("@attribute missing a type", lineno)
        name, type_part = parts
    if not type_part:
        raise ArffParseError("@attribute missing a type", lineno)
    if type_part.startswith("{"):
        if not type_part.rstrip().endswith("}"):
            raise ArffParseError("unterminated nominal domain", lineno)
        inner = type_part.rstrip()[1:-1]
        domain = tuple(_unquote(v) for v in _split_csv(inner, lineno))
        if any(not v for v in domain):
            raise ArffParseError("empty value in nominal domain", lineno)
        return _Attribute(name=name, kind="nominal", domain=domain)
    kw = type_part.split()[0].lower()
    if kw in ("numeric", "real", "integer"):
        return _Attribute(name=name, kind="numeric")
    raise ArffParseError(f"unsupported attribute type '{type_part}'", lineno)


def _parse_numeric(token: str, lineno: int) -> float:
    if token == "?":
        return np.nan
    if token.lower() in _BAD_NUMERIC:
        raise ArffParseError(f"non-finite numeric value '{token}'", lineno)
    try:
        return float(token)
    except ValueError:
        raise ArffParseError(f"cannot parse numeric value '{token}'") from None


def _label_value(token: str, attr: _Attribute, lineno: int) -> int:
    token_l = _unquote(token).lower()
    if token_l == "?":
        raise ArffParseError(f"missing value in label '{attr.name}'", lineno)
    if token_l in _TRUE_TOKENS:
        return 1
    if token_l in _FALSE_TOKENS:
        return 0
    # numeric label columns holding exactly 0/1 are accepted
    try:
        v = float(token_l)
    except ValueError:
        raise ArffParseError(
            f"non-binary value '{token}' in label '{attr.name}'", lineno
        ) from None
    if v == 0.0:
        return 0
    if v == 1.0:
        return 1
    raise ArffParseError(f"non-binary value '{token}' in label '{attr.name}'", lineno)


def _resolve_label_columns(
    attrs: list[_Attribute], label_spec: LabelSpec
) -> list[int]:
    n = len(attrs)
    if label_spec.kind == "names":
        index = {a.name: i for i, a in enumerate(attrs)}
        cols = []
        for name in label_spec.names:
            if name not in index:
                raise ArffParseError(f"label '{name}' not among ARFF attributes")
            cols.append(index[name])
        return cols
    if label_spec.count < 1 or label_spec.count > n:
        raise ArffParseError(f"label count {label_spec.count} out of range")
    if label_spec.kind == "first":
        return list(range(label_spec.count))
    if label_spec.kind == "last":
        return list(range(n - label_spec.count, n))
    raise ArffParseError(f"unknown label spec kind '{label_spec.kind}'")


def parse_arff(text: str, label_spec: LabelSpec) -> MultiLabelDataset:
    """Parse ARFF text into a dataset, partitioning attributes per label_spec."""
    relation = ""
    attrs: list[_Attribute] = []
    data_start = None
    lines = text.splitlines()
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        lower = line.lower()
        if lower.startswith("@relation"):
            relation = _unquote(line[len("@relation") :].strip())
        elif lower.startswith("@attribute"):
            m = _ATTR_RE.match(line)
            attrs.append(_parse_attribute(m.group(1), i))
        elif lower.startswith("@data"):
            data_start = i
            break
        else:
            raise ArffParseError(f"unexpected header line '{line}'", i)
    if data_start is None:
        raise ArffParseError("no @data section found")
    if not attrs:
        raise ArffParseError("no @attribute declarations before @data")

    label_cols = _resolve_label_columns(attrs, label_spec)
    label_set = set(label_cols)
    feature_cols = [i for i in range(len(attrs)) if i not in label_set]
    for col in feature_cols:
        a = attrs[col]
        if a.kind == "nominal" and not _is_binary_domain(a.domain):
            raise ArffParseError(
                f"feature '{a.name}' has a non-binary nominal domain; only "
                "numeric features are supported"
            )

    n_attr = len(attrs)
    rows: list[np.ndarray] = []
    for i in range(data_start, len(lines)):
        lineno = i + 1
        line = lines[i].strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("{"):
            values = _parse_sparse_row(line, attrs, lineno)
        else:
            tokens = _split_csv(line, lineno)
            if len(tokens) != n_attr:
                raise ArffParseError(
                    f"instance has {len(tokens)} values, expected {n_attr}", lineno
                )
            values = np.empty(n_attr)
            for j, tok in enumerate(tokens):
                values[j] = _cell_value(tok, attrs[j], j in label_set, lineno)
        rows.append(values)
    if not rows:
        raise ArffParseError("no data rows")

    table = np.vstack(rows)
    X = table[:, feature_cols]
    Y = table[:, label_cols]
    if np.isnan(Y).any():
        raise ArffParseError("missing values in label columns")
    all_missing = ~np.isfinite(X).any(axis=0)
    if all_missing.any():
        bad = [attrs[feature_cols[j]].name for j in np.flatnonzero(all_missing)]
        raise ArffParseError(f"feature columns with no finite value: {bad}")
    return MultiLabelDataset(
        name=relation or "unnamed",
        X=X,
        Y=Y.astype(np.int8),
        feature_names=tuple(attrs[j].name for j in feature_cols),
        label_names=tuple(attrs[j].name for j in label_cols),
    )


def _is_binary_domain(domain: tuple[str, ...]) -> bool:
    lowered = {v.lower() for v in domain}
    return len(domain) == 2 and (
        lowered <= _TRUE_TOKENS | _FALSE_TOKENS
    )


def _cell_value(token: str, attr: _Attribute, is_label: bool, lineno: int) -> float:
    if is_label:
        return float(_label_value(token, attr, lineno))
    if attr.kind == "nominal":
        # binary nominal feature: reuse the truthy/falsy mapping
        return float(_label_value(token, attr, lineno))
    return _parse_numeric(_unquote(token), lineno)


def _parse_sparse_row(line: str, attrs: list[_Attribute], lineno: int) -> np.ndarray:
    if not line.endswith("}"):
        raise ArffParseError("unterminated sparse instance", lineno)
    inner = line[1:-1].strip()
    # sparse default: numeric 0 / first nominal value, which maps to 0 here
    values = np.zeros(len(attrs))
    if not inner:
        return values
    for item in _split_csv(inner, lineno):
        if not item:
            raise ArffParseError("empty entry in sparse instance", lineno)
        parts = item.split(None, 1)
        if len(parts) != 2:
            raise ArffParseError(f"malformed sparse entry '{item}'", lineno)
        try:
            idx = int(parts[0])
        except ValueError:
            raise ArffParseError(f"bad sparse index '{parts[0]}'") from None
        if not 0 <= idx < len(attrs):
            raise ArffParseError(f"sparse index {idx} out of range", lineno)
        attr = attrs[idx]
        is_label_like = attr.kind == "nominal"
        if attr.kind == "numeric":
            values[idx] = _parse_numeric(_unquote(parts[1]), lineno)
        else:
            values[idx] = float(_label_value(parts[1], attr, lineno))
    return values


def _quote_if_needed(name: str) -> str:
    if re.search(r"[\s,{}%']", name) or not name:
        return "'" + name.replace("'", "\\'") + "'"
    return name


def serialize_arff(d: MultiLabelDataset) -> str:
    """Canonical dense ARFF: features first, then binary nominal labels.

    Reals use 17 significant digits so float64 values round-trip exactly.
    """
    out = [f"@relation {_quote_if_needed(d.name)}", ""]
    for name in d.feature_names:
        out.append(f"@attribute {_quote_if_needed(name)} numeric")
    for name in d.label_names:
        out.append(f"@attribute {_quote_if_needed(name)} {{0,1}}")
    out.append("")
    out.append("@data")
    for i in range(d.n_instances):
        feats = ("?" if np.isnan(v) else f"{v:.17g}" for v in d.X[i])
        labels = (str(int(v)) for v in d.Y[i])
        out.append(",".join((*feats, *labels)))
    out.append("")
    return "\n".join(out)
