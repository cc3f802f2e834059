"""Type-safe scalar conversion, multi-dimensional arrays and property containers."""

from .arrays import ArrayValue, BoundsError, ChunkCursor, copy_convert, read_chunk, subarray
from .catalog import (
    Adaptor,
    Array,
    AssignReport,
    CatalogSpec,
    Container,
    Scalar,
    TraversalError,
    WellKnown,
    assign,
    get_element_dyn,
    standard_spec,
    traverse,
)
from .codec import DecodeError, DecodeFailure, decode, encode
from .convert import ConversionError, ConverterRegistry, ErrorClass, convert, instantiation_audit, registry_lookup
from .kinds import CanonicalKind, ScalarKind, ScalarValue, TimeStamp, f32, promote_kind, promote_value

__version__ = "0.1.0"
