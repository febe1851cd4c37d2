"""Intermediate representation of message types and the schema lowering pass.

Each node maps onto exactly one generator.  Infinite bounds are ``None``.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .errors import (ContradictoryFacets, UnresolvedReference, UnsupportedBuiltin,
                     UnsupportedConstruct, UnsupportedFacet)
from .schema import ComplexTypeDef, ElementDecl, SimpleTypeDef, XsdSchema
from .xmlutil import XSD_NS, QName

Number = Union[int, float]
Bound = Optional[Number]

INTEGER, FLOAT, BOOLEAN = 'integer', 'float', 'boolean'
# wire forms: decimal text, native value, or one character of a string
AS_TEXT, NATIVE, CHAR = 'text', 'native', 'char'


@dataclass(frozen=True)
class Scalar:
    kind: str
    min: Bound = None
    max: Bound = None
    wire: str = NATIVE
    min_open: bool = False
    max_open: bool = False

    def __post_init__(self):
        if self.kind not in (INTEGER, FLOAT, BOOLEAN):
            raise ValueError('unknown scalar kind %r' % self.kind)
        if self.min is not None and self.max is not None and self.min > self.max:
            raise ValueError('empty range [%r, %r]' % (self.min, self.max))


@dataclass(frozen=True)
class Enumeration:
    values: Tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError('enumeration needs at least one value')
        if len(set(self.values)) != len(self.values):
            raise ValueError('duplicate enumeration values')


@dataclass(frozen=True)
class ListOf:
    min_len: int
    max_len: Optional[int]
    inner: 'TypeIR'

    def __post_init__(self):
        if self.min_len < 0 or (self.max_len is not None and self.min_len > self.max_len):
            raise ValueError('bad list bounds [%r, %r]' % (self.min_len, self.max_len))

    @property
    def is_string(self) -> bool:
        return isinstance(self.inner, Scalar) and self.inner.wire == CHAR


@dataclass(frozen=True)
class TupleOf:
    fields: Tuple['NamedIR', ...]


@dataclass(frozen=True)
class ChoiceOf:
    alternatives: Tuple['NamedIR', ...]

    def __post_init__(self):
        if not self.alternatives:
            raise ValueError('choice needs at least one alternative')


TypeIR = Union[Scalar, Enumeration, ListOf, TupleOf, ChoiceOf]


@dataclass(frozen=True)
class NamedIR:
    """An element: its name, where it sits in the tree, and its type.

    Only ``local_name`` and ``ir`` take part in equality; the rest is
    naming metadata used for generator names and XML qualification.
    """
    local_name: str
    ancestor_path: Tuple[str, ...] = field(default=(), compare=False)
    namespace: str = field(default='', compare=False)
    ir: TypeIR = None
    type_name: Optional[str] = field(default=None, compare=False)
    position: Optional[int] = field(default=None, compare=False)
    qualified: bool = field(default=True, compare=False)

    @property
    def segment(self) -> str:
        if self.position is None:
            return self.local_name
        return '%s_%d' % (self.local_name, self.position)


def path_id(n: NamedIR) -> str:
    return '_'.join(n.ancestor_path + (n.segment,))


def walk(n: NamedIR):
    """Yield every NamedIR in the tree rooted at *n*, parents first."""
    yield n
    stack = [n.ir]
    while stack:
        ir = stack.pop()
        if isinstance(ir, ListOf):
            stack.append(ir.inner)
        elif isinstance(ir, (TupleOf, ChoiceOf)):
            children = ir.fields if isinstance(ir, TupleOf) else ir.alternatives
            for child in children:
                yield from walk(child)


_STRING = ListOf(0, None, Scalar(INTEGER, 32, 127, CHAR))

_BUILTINS = {
    'boolean': Scalar(BOOLEAN, wire=NATIVE),
    'float': Scalar(FLOAT, wire=AS_TEXT),
    'double': Scalar(FLOAT, wire=AS_TEXT),
    'integer': Scalar(INTEGER, wire=AS_TEXT),
    'nonPositiveInteger': Scalar(INTEGER, None, 0, AS_TEXT),
    'negativeInteger': Scalar(INTEGER, None, -1, AS_TEXT),
    'long': Scalar(INTEGER, -(1 << 63), (1 << 63) - 1, AS_TEXT),
    'int': Scalar(INTEGER, -(1 << 31), (1 << 31) - 1, NATIVE),
    'short': Scalar(INTEGER, -(1 << 15), (1 << 15) - 1, AS_TEXT),
    'byte': Scalar(INTEGER, -(1 << 7), (1 << 7) - 1, AS_TEXT),
    'nonNegativeInteger': Scalar(INTEGER, 0, None, AS_TEXT),
    'positiveInteger': Scalar(INTEGER, 1, None, AS_TEXT),
    'unsignedLong': Scalar(INTEGER, 0, (1 << 64) - 1, AS_TEXT),
    'unsignedInt': Scalar(INTEGER, 0, (1 << 32) - 1, AS_TEXT),
    'unsignedShort': Scalar(INTEGER, 0, (1 << 16) - 1, AS_TEXT),
    'unsignedByte': Scalar(INTEGER, 0, (1 << 8) - 1, AS_TEXT),
    'string': _STRING,
    # fractional decimals are not generated
    'decimal': Scalar(INTEGER, wire=AS_TEXT),
}


def builtin_ir(xsd_name: QName) -> TypeIR:
    if xsd_name.namespace != XSD_NS or xsd_name.local not in _BUILTINS:
        raise UnsupportedBuiltin('no generator for built-in type %s' % (xsd_name,))
    return _BUILTINS[xsd_name.local]


def _tighten_low(cur: Bound, cur_open: bool, new: Bound, new_open: bool):
    if new is None:
        return cur, cur_open
    if cur is None or new > cur:
        return new, new_open
    if new == cur:
        return cur, cur_open or new_open
    return cur, cur_open


def _tighten_high(cur: Bound, cur_open: bool, new: Bound, new_open: bool):
    if new is None:
        return cur, cur_open
    if cur is None or new < cur:
        return new, new_open
    if new == cur:
        return cur, cur_open or new_open
    return cur, cur_open


def _narrow_scalar(ir: Scalar, facets, where) -> Scalar:
    lo, hi = ir.min, ir.max
    lo_open, hi_open = ir.min_open, ir.max_open

    def finite(d):
        return d is not None and d.is_finite()

    if ir.kind == INTEGER:
        if finite(facets.min_inclusive):
            lo, _ = _tighten_low(lo, False, math.ceil(facets.min_inclusive), False)
        if finite(facets.min_exclusive):
            lo, _ = _tighten_low(lo, False, math.floor(facets.min_exclusive) + 1, False)
        if finite(facets.max_inclusive):
            hi, _ = _tighten_high(hi, False, math.floor(facets.max_inclusive), False)
        if finite(facets.max_exclusive):
            hi, _ = _tighten_high(hi, False, math.ceil(facets.max_exclusive) - 1, False)
    elif ir.kind == FLOAT:
        if finite(facets.min_inclusive):
            lo, lo_open = _tighten_low(lo, lo_open, float(facets.min_inclusive), False)
        if finite(facets.min_exclusive):
            lo, lo_open = _tighten_low(lo, lo_open, float(facets.min_exclusive), True)
        if finite(facets.max_inclusive):
            hi, hi_open = _tighten_high(hi, hi_open, float(facets.max_inclusive), False)
        if finite(facets.max_exclusive):
            hi, hi_open = _tighten_high(hi, hi_open, float(facets.max_exclusive), True)
    else:
        return ir
    if lo is not None and hi is not None and (lo > hi or (lo == hi and (lo_open or hi_open))):
        raise ContradictoryFacets('facets of %s leave an empty range' % (where,))
    return Scalar(ir.kind, lo, hi, ir.wire, lo_open, hi_open)


def lower_simple_type(schema: XsdSchema, definition: SimpleTypeDef) -> TypeIR:
    if definition.variety != 'restriction':
        raise UnsupportedConstruct('simple type %s uses xsd:%s derivation'
                                   % (definition.name, definition.variety))
    base = definition.base
    if base.namespace == XSD_NS:
        ir = builtin_ir(base)
    elif base in schema.simple_types:
        ir = lower_simple_type(schema, schema.simple_types[base])
    else:
        raise UnresolvedReference('simple type %s has unknown base %s' % (definition.name, base))
    facets = definition.facets
    if facets.pattern:
        raise UnsupportedFacet('pattern facet on %s' % (definition.name,))
    if facets.enumeration:
        return Enumeration(tuple(facets.enumeration))
    if isinstance(ir, Scalar):
        return _narrow_scalar(ir, facets, definition.name)
    if isinstance(ir, ListOf) and ir.is_string:
        lo, hi = ir.min_len, ir.max_len
        if facets.min_length is not None:
            lo = max(lo, facets.min_length)
        if facets.max_length is not None:
            hi = facets.max_length if hi is None else min(hi, facets.max_length)
        if hi is not None and lo > hi:
            raise ContradictoryFacets('length facets of %s leave no strings' % (definition.name,))
        return ListOf(lo, hi, ir.inner)
    return ir


class _Lowering:
    def __init__(self, schema: XsdSchema):
        self.schema = schema

    def type_ref(self, ref: QName, path: Tuple[str, ...]):
        """Lower the type named *ref* for an element whose own path is *path*."""
        if ref.namespace == XSD_NS:
            return builtin_ir(ref), None
        definition = self.schema.lookup_type(ref)
        if isinstance(definition, ComplexTypeDef):
            if definition.anonymous:
                return self.complex(definition, path), None
            return self.complex(definition, path + (ref.local,)), ref.local
        if definition.anonymous:
            return lower_simple_type(self.schema, definition), None
        return lower_simple_type(self.schema, definition), ref.local

    def complex(self, definition: ComplexTypeDef, path: Tuple[str, ...]) -> TypeIR:
        if definition.unsupported:
            raise UnsupportedConstruct('%s: %s' % (definition.name, definition.unsupported))
        children = tuple(self.element(decl, path) for decl in definition.children)
        if definition.combinator == 'choice':
            if not children:
                raise UnsupportedConstruct('empty choice in %s' % (definition.name,))
            return ChoiceOf(children)
        return TupleOf(children)

    def element(self, decl: ElementDecl, ancestors: Tuple[str, ...],
                position: Optional[int] = None) -> NamedIR:
        named = NamedIR(decl.name, ancestors, decl.namespace, None, position=position)
        ir, type_name = self.type_ref(decl.type_ref, ancestors + (named.segment,))
        if (decl.min_occurs, decl.max_occurs) != (1, 1):
            ir = ListOf(decl.min_occurs, decl.max_occurs, ir)
        return NamedIR(decl.name, ancestors, decl.namespace, ir, type_name, position,
                       decl.qualified)


def lower_element(schema: XsdSchema, element: QName, position: Optional[int] = None) -> NamedIR:
    """Lower a global element depth-first into a NamedIR tree.

    *position* is the element's argument position in an operation call;
    it becomes a ``_<n>`` suffix on the root's path segment.
    """
    if element not in schema.elements:
        raise UnresolvedReference('unknown element %s' % (element,))
    return _Lowering(schema).element(schema.elements[element], (), position)


def lower_type(schema: XsdSchema, name: QName) -> NamedIR:
    """Lower a named type on its own, the way it appears inside larger trees."""
    definition = schema.lookup_type(name)
    if definition is None:
        return NamedIR(name.local, (), name.namespace, builtin_ir(name))
    lowering = _Lowering(schema)
    if isinstance(definition, ComplexTypeDef):
        ir = lowering.complex(definition, (name.local,))
    else:
        ir = lower_simple_type(schema, definition)
    return NamedIR(name.local, (), name.namespace, ir)


def leaves(ir: TypeIR):
    if isinstance(ir, (Scalar, Enumeration)):
        yield ir
    elif isinstance(ir, ListOf):
        yield from leaves(ir.inner)
    else:
        children = ir.fields if isinstance(ir, TupleOf) else ir.alternatives
        for child in children:
            yield from leaves(child.ir)
