"""Hypothesis strategies for payloads, values and containers."""

import math

from hypothesis import strategies as st

from dataaccess.arrays import ArrayValue
from dataaccess.catalog import Array, CatalogSpec, Container, Scalar, WellKnown
from dataaccess.kinds import ScalarKind, ScalarValue, kind_bounds

K = ScalarKind

utf8_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)


def payload_strategy(kind):
    if kind is K.Bool:
        return st.booleans()
    if kind is K.Char:
        return st.characters(blacklist_categories=("Cs",))
    if kind is K.Float32:
        return st.floats(width=32)
    if kind is K.Float64:
        return st.floats()
    if kind is K.TimeStamp:
        return st.tuples(st.integers(0, 2**32 - 1), st.integers(0, 10**9 - 1))
    if kind is K.Text:
        return utf8_text
    lo, hi = kind_bounds(kind)
    return st.integers(lo, hi)


kinds = st.sampled_from(list(K))


@st.composite
def scalars(draw, kind=None):
    kind = draw(kinds) if kind is None else kind
    return ScalarValue(kind, draw(payload_strategy(kind)))


@st.composite
def arrays(draw, kind=None, max_rank=3, max_extent=4):
    kind = draw(kinds) if kind is None else kind
    dims = draw(st.lists(st.integers(1, max_extent), min_size=1, max_size=max_rank))
    n = math.prod(dims)
    return ArrayValue(kind, dims, draw(st.lists(payload_strategy(kind), min_size=n, max_size=n)))


user_names = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8).filter(
    lambda s: s not in {m.value for m in WellKnown} | {m.name for m in WellKnown})
property_ids = st.one_of(st.sampled_from(list(WellKnown)), user_names)


@st.composite
def containers(draw, max_props=5):
    ids = draw(st.lists(property_ids, max_size=max_props, unique=True))
    entries, bindings = [], {}
    for pid in ids:
        kind = draw(kinds)
        if draw(st.booleans()):
            entries.append((pid, Scalar(kind)))
            bindings[pid] = draw(scalars(kind))
        else:
            entries.append((pid, Array(kind)))
            bindings[pid] = draw(arrays(kind))
    return Container(CatalogSpec(entries), bindings)
