"""SOAP 1.1 envelopes: encoding generated values, classifying replies."""
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Dict, List, Optional, Union
from xml.sax.saxutils import escape, quoteattr

from .errors import LoweringError, MalformedXml, ShapeMismatch, WsdlPropError
from .generate import (BoolV, ChoiceV, FloatV, IntV, ListV, TextV, TupleV, Value,
                       chars, conforms)
from .ir import (BOOLEAN, CHAR, INTEGER, ChoiceOf, Enumeration, ListOf, NamedIR, Scalar,
                 TupleOf, TypeIR, lower_element)
from .schema import OperationDef, XsdSchema
from .xmlutil import SOAP_ENV_NS, local_name, parse_element, split_tag

_ENVELOPE = ('<?xml version="1.0" encoding="utf-8"?>\n'
             '<soap:Envelope xmlns:soap="%s"><soap:Body>%%s</soap:Body></soap:Envelope>'
             % SOAP_ENV_NS)

_INT_RE = re.compile(r'[+-]?\d+')
_FLOAT_RE = re.compile(r'[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?|[+-]?INF|NaN')


class DecodeError(WsdlPropError):
    """XML content does not have the shape the IR describes."""


@dataclass(frozen=True)
class Ok:
    body_element: Optional[ET.Element]


@dataclass(frozen=True)
class Fault:
    fault_code: str
    fault_string: str
    detail: Optional[str] = None


@dataclass(frozen=True)
class Malformed:
    reason: str


SoapResponseKind = Union[Ok, Fault, Malformed]


# -- encoding ------------------------------------------------------------

def _xml_char_ok(cp: int) -> bool:
    return (cp in (0x9, 0xA, 0xD) or 0x20 <= cp <= 0xD7FF or 0xE000 <= cp <= 0xFFFD
            or 0x10000 <= cp <= 0x10FFFF)


def _text(s: str) -> str:
    return escape(s, {'\r': '&#13;'})


def fits(ir: TypeIR, v: Value) -> bool:
    """Shape-only check: right variants and names, bounds not enforced."""
    if isinstance(ir, Scalar):
        if ir.kind == BOOLEAN:
            return isinstance(v, BoolV)
        if ir.kind == INTEGER:
            return isinstance(v, IntV) and type(v.value) is int
        return isinstance(v, FloatV) and math.isfinite(v.value)
    if isinstance(ir, Enumeration):
        return isinstance(v, TextV) and all(_xml_char_ok(ord(c)) for c in v.value)
    if isinstance(ir, ListOf):
        if not isinstance(v, ListV):
            return False
        if ir.is_string:
            return all(isinstance(i, IntV) and type(i.value) is int and _xml_char_ok(i.value)
                       for i in v.items)
        return all(fits(ir.inner, item) for item in v.items)
    if isinstance(ir, TupleOf):
        return (isinstance(v, TupleV) and len(v.fields) == len(ir.fields)
                and all(n == f.local_name and fits(f.ir, item)
                        for f, (n, item) in zip(ir.fields, v.fields)))
    if isinstance(ir, ChoiceOf):
        return (isinstance(v, ChoiceV) and 0 <= v.index < len(ir.alternatives)
                and fits(ir.alternatives[v.index].ir, v.value))
    return False


class _Writer:
    def __init__(self):
        self.parts: List[str] = []

    def element(self, named: NamedIR, v: Value, scope: Dict[str, str]):
        ir = named.ir
        if isinstance(ir, ListOf) and not ir.is_string:
            for item in v.items:
                self.single(named, ir.inner, item, scope)
        else:
            self.single(named, ir, v, scope)

    def single(self, named: NamedIR, ir: TypeIR, v: Value, scope: Dict[str, str]):
        decl = ''
        if named.qualified and named.namespace:
            prefix = scope.get(named.namespace)
            if prefix is None:
                prefix = 'ns%d' % len(scope)
                scope = dict(scope)
                scope[named.namespace] = prefix
                decl = ' xmlns:%s=%s' % (prefix, quoteattr(named.namespace))
            tag = '%s:%s' % (prefix, named.local_name)
        else:
            tag = named.local_name
        self.parts.append('<%s%s>' % (tag, decl))
        self.content(ir, v, scope)
        self.parts.append('</%s>' % tag)

    def content(self, ir: TypeIR, v: Value, scope):
        if isinstance(ir, Scalar):
            if ir.kind == BOOLEAN:
                self.parts.append('true' if v.value else 'false')
            elif ir.kind == INTEGER:
                self.parts.append(str(v.value))
            else:
                self.parts.append(repr(float(v.value)))
        elif isinstance(ir, Enumeration):
            self.parts.append(_text(v.value))
        elif isinstance(ir, ListOf):
            # only strings reach here; repeated elements are unrolled in element()
            self.parts.append(_text(''.join(chr(i.value) for i in v.items)))
        elif isinstance(ir, TupleOf):
            for f, (_, item) in zip(ir.fields, v.fields):
                self.element(f, item, scope)
        else:
            self.element(ir.alternatives[v.index], v.value, scope)


def encode_element(named: NamedIR, v: Value) -> str:
    if not fits(named.ir, v):
        raise ShapeMismatch('value does not fit the shape of element %s' % named.local_name)
    writer = _Writer()
    writer.element(named, v, {})
    return ''.join(writer.parts)


def envelope(body_xml: str) -> str:
    return _ENVELOPE % body_xml


def encode_request(op: OperationDef, schema: XsdSchema, ir: NamedIR, v: Value) -> str:
    """SOAP envelope carrying *v* as the input element of *op*.

    *ir* is the lowered input element (for rpc-literal this is the
    synthetic wrapper named after the operation).  Raises ShapeMismatch if
    *v* cannot be serialized under *ir*.
    """
    if (ir.namespace, ir.local_name) != tuple(op.input_element):
        ir = NamedIR(op.input_element.local, ir.ancestor_path, op.input_element.namespace,
                     ir.ir, ir.type_name, ir.position, True)
    return envelope(encode_element(ir, v))


def fault_envelope(code: str, string: str, detail: Optional[str] = None) -> str:
    body = '<soap:Fault><faultcode>%s</faultcode><faultstring>%s</faultstring>' % (
        _text(code), _text(string))
    if detail is not None:
        body += '<detail>%s</detail>' % _text(detail)
    return envelope(body + '</soap:Fault>')


# -- decoding ------------------------------------------------------------

def _body_child(document: Union[str, bytes]):
    """First element inside the Envelope's Body, or None when the Body is empty."""
    root = parse_element(document)
    if root.tag != '{%s}Envelope' % SOAP_ENV_NS:
        raise DecodeError('root element %s is not a SOAP 1.1 Envelope' % root.tag)
    body = root.find('{%s}Body' % SOAP_ENV_NS)
    if body is None:
        raise DecodeError('envelope has no Body')
    children = [c for c in body if isinstance(c.tag, str)]
    return children[0] if children else None


def decode_response(body: Union[str, bytes]) -> SoapResponseKind:
    """Classify a reply.  Never raises."""
    try:
        first = _body_child(body)
    except (MalformedXml, DecodeError) as exc:
        return Malformed(str(exc))
    except Exception as exc:  # classification must be total
        return Malformed('%s: %s' % (type(exc).__name__, exc))
    if first is not None and first.tag == '{%s}Fault' % SOAP_ENV_NS:
        def text(name):
            for child in first:
                if local_name(child.tag) == name:
                    return child
            return None

        code, string, detail = text('faultcode'), text('faultstring'), text('detail')
        detail_text = None
        if detail is not None:
            inner = ''.join(ET.tostring(c, encoding='unicode') for c in detail)
            detail_text = (detail.text or '') + inner
        return Fault((code.text or '').strip() if code is not None else '',
                     (string.text or '') if string is not None else '',
                     detail_text)
    return Ok(first)


def _scalar(ir: Scalar, text: str) -> Value:
    s = text.strip()
    if ir.kind == BOOLEAN:
        if s in ('true', '1'):
            return BoolV(True)
        if s in ('false', '0'):
            return BoolV(False)
        raise DecodeError('not a boolean: %r' % s)
    if ir.kind == INTEGER:
        if not _INT_RE.fullmatch(s):
            raise DecodeError('not an integer: %r' % s)
        return IntV(int(s))
    if not _FLOAT_RE.fullmatch(s):
        raise DecodeError('not a double: %r' % s)
    return FloatV(float(s.replace('INF', 'inf')))


def _children(elem):
    return [c for c in elem if isinstance(c.tag, str)]


def _consume(fields, children, i):
    """Decode *fields* from children[i:]; return (values, next index)."""
    values = []
    for f in fields:
        ir = f.ir
        if isinstance(ir, ListOf) and not ir.is_string:
            items = []
            while i < len(children) and local_name(children[i].tag) == f.local_name:
                items.append(_content(ir.inner, children[i]))
                i += 1
            values.append((f.local_name, ListV(tuple(items))))
        else:
            if i >= len(children) or local_name(children[i].tag) != f.local_name:
                found = local_name(children[i].tag) if i < len(children) else 'nothing'
                raise DecodeError('expected element %s, found %s' % (f.local_name, found))
            values.append((f.local_name, _content(ir, children[i])))
            i += 1
    return values, i


def _content(ir: TypeIR, elem) -> Value:
    if isinstance(ir, (Scalar, Enumeration)) or (isinstance(ir, ListOf) and ir.is_string):
        if _children(elem):
            raise DecodeError('unexpected child elements in %s' % elem.tag)
        text = elem.text or ''
        if isinstance(ir, Scalar):
            return _scalar(ir, text)
        if isinstance(ir, Enumeration):
            return TextV(text)
        return chars(text)
    children = _children(elem)
    if isinstance(ir, TupleOf):
        values, i = _consume(ir.fields, children, 0)
        if i != len(children):
            raise DecodeError('unexpected element %s' % local_name(children[i].tag))
        return TupleV(tuple(values))
    if isinstance(ir, ChoiceOf):
        for index, alt in enumerate(ir.alternatives):
            if children and local_name(children[0].tag) == alt.local_name:
                values, i = _consume([alt], children, 0)
                if i == len(children):
                    return ChoiceV(index, values[0][1])
        raise DecodeError('no choice alternative matches %s' % elem.tag)
    # a bare list outside any element cannot be told apart from its siblings
    raise DecodeError('cannot decode a repeated element on its own')


def decode_value(named: NamedIR, elem: ET.Element) -> Value:
    """Read the content of *elem* as a value of *named* (element names are matched by local name)."""
    if local_name(elem.tag) != named.local_name:
        raise DecodeError('expected element %s, found %s' % (named.local_name, elem.tag))
    return _content(named.ir, elem)


def decode_request(document: Union[str, bytes], named: NamedIR) -> Value:
    first = _body_child(document)
    if first is None:
        raise DecodeError('empty Body')
    return decode_value(named, first)


def relax_strings(ir: TypeIR) -> TypeIR:
    """Widen character ranges to all of Unicode; the 32..127 limit only binds generation."""
    if isinstance(ir, ListOf):
        if ir.is_string:
            return ListOf(ir.min_len, ir.max_len, Scalar(INTEGER, 0, 0x10FFFF, CHAR))
        return ListOf(ir.min_len, ir.max_len, relax_strings(ir.inner))
    if isinstance(ir, TupleOf):
        return TupleOf(tuple(_relax_named(f) for f in ir.fields))
    if isinstance(ir, ChoiceOf):
        return ChoiceOf(tuple(_relax_named(a) for a in ir.alternatives))
    return ir


def _relax_named(n: NamedIR) -> NamedIR:
    return NamedIR(n.local_name, n.ancestor_path, n.namespace, relax_strings(n.ir),
                   n.type_name, n.position, n.qualified)


def validate_response_type(op: OperationDef, schema: XsdSchema, r: SoapResponseKind,
                           output: Optional[NamedIR] = None) -> bool:
    """True when an Ok reply carries a well-typed output element of *op*."""
    if not isinstance(r, Ok) or r.body_element is None:
        return False
    if split_tag(r.body_element.tag) != op.output_element:
        return False
    try:
        named = output if output is not None else lower_element(schema, op.output_element, 1)
        value = decode_value(named, r.body_element)
    except (LoweringError, DecodeError, ValueError, OverflowError):
        return False
    return conforms(relax_strings(named.ir), value)
