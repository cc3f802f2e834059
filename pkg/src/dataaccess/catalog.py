"""Property catalogs, containers, and adaptor-driven traversal.

A container owns its iteration: :func:`traverse` walks the catalog in order
and hands each property to an adaptor callback, arrays as whole typed
arrays.  :func:`get_element_dyn` is the per-element dynamic access path the
callback design avoids; it is kept as a benchmark baseline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .arrays import ArrayValue, copy_convert
from .convert import ConversionError, convert
from .kinds import ScalarKind, ScalarValue

__all__ = [
    "WellKnown",
    "PropertyId",
    "Scalar",
    "Array",
    "CatalogSpec",
    "Container",
    "Adaptor",
    "TraversalError",
    "ShapeMismatchError",
    "UnknownPropertyError",
    "AssignReport",
    "traverse",
    "assign",
    "get_element_dyn",
    "property_id",
    "standard_spec",
]


class WellKnown(enum.Enum):
    Value = "_value"
    AlarmStatus = "_alarm_status"
    AlarmSeverity = "_alarm_severity"
    TimeStamp = "_timestamp"

    def __str__(self):
        return self.name


PropertyId = Union[WellKnown, str]

_RESERVED = {m.value for m in WellKnown} | {m.name for m in WellKnown}


def property_id(pid: PropertyId) -> PropertyId:
    """Validate a property id; user names may not shadow well-known ones."""
    if isinstance(pid, WellKnown):
        return pid
    if not isinstance(pid, str) or not pid:
        raise ValueError(f"property name must be a nonempty str, got {pid!r}")
    if pid in _RESERVED:
        raise ValueError(f"{pid!r} is reserved for a well-known property")
    return pid


@dataclass(frozen=True)
class Scalar:
    kind: ScalarKind


@dataclass(frozen=True)
class Array:
    kind: ScalarKind


Shape = Union[Scalar, Array]


class CatalogSpec:
    """Ordered, duplicate-free list of ``(property id, shape)`` entries."""

    __slots__ = ("_entries", "_index")

    def __init__(self, entries: Iterable[tuple[PropertyId, Shape]] = ()):
        items = []
        index = {}
        for pid, shape in entries:
            pid = property_id(pid)
            if not isinstance(shape, (Scalar, Array)):
                raise TypeError(f"shape must be Scalar or Array, got {shape!r}")
            if pid in index:
                raise ValueError(f"duplicate property {pid}")
            if not isinstance(shape.kind, ScalarKind):
                raise TypeError(f"shape kind must be a ScalarKind, got {shape.kind!r}")
            index[pid] = shape
            items.append((pid, shape))
        self._entries = tuple(items)
        self._index = index

    def __iter__(self) -> Iterator[tuple[PropertyId, Shape]]:
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, pid):
        return pid in self._index

    def __getitem__(self, pid: PropertyId) -> Shape:
        return self._index[pid]

    def get(self, pid: PropertyId):
        return self._index.get(pid)

    @property
    def ids(self) -> tuple[PropertyId, ...]:
        return tuple(pid for pid, _ in self._entries)

    def __eq__(self, other):
        if not isinstance(other, CatalogSpec):
            return NotImplemented
        return self._entries == other._entries

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{pid}: {type(s).__name__}({s.kind.name})" for pid, s in self._entries)
        return f"CatalogSpec({{{body}}})"


def standard_spec(value: Shape, *extra: tuple[PropertyId, Shape]) -> CatalogSpec:
    """Value, alarm status/severity and timestamp, plus any user properties."""
    return CatalogSpec([
        (WellKnown.Value, value),
        (WellKnown.AlarmStatus, Scalar(ScalarKind.Enum16)),
        (WellKnown.AlarmSeverity, Scalar(ScalarKind.Enum16)),
        (WellKnown.TimeStamp, Scalar(ScalarKind.TimeStamp)),
        *extra,
    ])


class ShapeMismatchError(TypeError):
    pass


class UnknownPropertyError(KeyError):
    pass


def _check_binding(pid, shape: Shape, value) -> None:
    if isinstance(shape, Scalar):
        if not isinstance(value, ScalarValue):
            raise ShapeMismatchError(f"property {pid} is scalar, got {type(value).__name__}")
    elif not isinstance(value, ArrayValue):
        raise ShapeMismatchError(f"property {pid} is an array, got {type(value).__name__}")
    if value.kind is not shape.kind:
        raise TypeError(f"property {pid} holds {shape.kind.name}, got {value.kind.name}")


class Container:
    """A catalog with every property bound to a matching value."""

    __slots__ = ("spec", "_bindings")

    def __init__(self, spec: CatalogSpec, bindings: Mapping[PropertyId, ScalarValue | ArrayValue]):
        unknown = [pid for pid in bindings if pid not in spec]
        if unknown:
            raise UnknownPropertyError(f"not in catalog: {unknown}")
        for pid, shape in spec:
            if pid not in bindings:
                raise ValueError(f"property {pid} is unbound")
            _check_binding(pid, shape, bindings[pid])
        self.spec = spec
        self._bindings = {pid: bindings[pid] for pid in spec.ids}

    def __getitem__(self, pid: PropertyId):
        try:
            return self._bindings[pid]
        except KeyError:
            raise UnknownPropertyError(pid) from None

    def set(self, pid: PropertyId, value: ScalarValue | ArrayValue) -> None:
        shape = self.spec.get(pid)
        if shape is None:
            raise UnknownPropertyError(pid)
        _check_binding(pid, shape, value)
        self._bindings[pid] = value

    def items(self):
        return self._bindings.items()

    def traverse(self, adaptor: Adaptor) -> None:
        traverse(self, adaptor)

    def __eq__(self, other):
        if not isinstance(other, Container):
            return NotImplemented
        return self.spec == other.spec and self._bindings == other._bindings

    __hash__ = None

    def __repr__(self):
        return f"Container({self._bindings!r})"


class Adaptor:
    """Callbacks a container invokes once per property during traversal.

    Raising from a callback stops the traversal.
    """

    def on_scalar(self, pid: PropertyId, value: ScalarValue) -> None:
        pass

    def on_array(self, pid: PropertyId, array: ArrayValue) -> None:
        pass


class TraversalError(Exception):
    def __init__(self, pid: PropertyId, error: BaseException):
        super().__init__(f"traversal stopped at property {pid}: {error}")
        self.property_id = pid
        self.error = error


def traverse(c: Container, adaptor: Adaptor) -> None:
    """Call ``adaptor`` for each property of ``c`` in catalog order.

    The first callback exception is re-raised as :class:`TraversalError`
    naming the property.
    """
    on_scalar = adaptor.on_scalar
    on_array = adaptor.on_array
    bindings = c._bindings
    for pid, shape in c.spec._entries:
        try:
            if type(shape) is Scalar:
                on_scalar(pid, bindings[pid])
            else:
                on_array(pid, bindings[pid])
        except Exception as exc:
            raise TraversalError(pid, exc) from exc


@dataclass(frozen=True)
class AssignReport:
    converted: int
    skipped: int


class _AssignAdaptor(Adaptor):
    __slots__ = ("shapes", "staged", "skipped")

    def __init__(self, dst: Container):
        self.shapes = dst.spec._index
        self.staged = {}
        self.skipped = 0

    def on_scalar(self, pid, value):
        shape = self.shapes.get(pid)
        if shape is None:
            self.skipped += 1
        elif type(shape) is Scalar:
            self.staged[pid] = convert(value, shape.kind)
        else:
            raise ShapeMismatchError(f"property {pid}: scalar source, array destination")

    def on_array(self, pid, array):
        shape = self.shapes.get(pid)
        if shape is None:
            self.skipped += 1
        elif type(shape) is Array:
            self.staged[pid] = copy_convert(array, shape.kind)
        else:
            raise ShapeMismatchError(f"property {pid}: array source, scalar destination")


def assign(src: Container, dst: Container) -> AssignReport:
    """Convert ``src``'s properties into ``dst``'s declared kinds, matching by id.

    Properties missing from ``dst`` are skipped; ``dst`` properties missing
    from ``src`` keep their bindings.  All-or-nothing: on failure ``dst`` is
    left untouched and the error names the property.
    """
    adaptor = _AssignAdaptor(dst)
    try:
        traverse(src, adaptor)
    except TraversalError as exc:
        err = exc.error
        if isinstance(err, ConversionError):
            err.property_id = exc.property_id
        raise err from None
    dst._bindings.update(adaptor.staged)
    return AssignReport(len(adaptor.staged), adaptor.skipped)


def get_element_dyn(c: Container, pid: PropertyId, index: int) -> ScalarValue:
    """Fetch one element through a dynamically dispatched accessor."""
    try:
        binding = c._bindings[pid]
    except KeyError:
        raise UnknownPropertyError(pid) from None
    return binding.element(index)
