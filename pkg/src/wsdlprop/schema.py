"""WSDL 1.1 / XSD parsing into an immutable service model.

Only the parts needed to generate document/literal (and rpc/literal)
requests are kept: global elements, simple types with their facets and
complex types built from a single ``sequence``, ``all`` or ``choice``.
Attributes are ignored.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union
from urllib.parse import urljoin, urlparse

from .errors import (ImportCycle, MalformedXml, RecursiveType,
                     UnresolvedReference, UnsupportedWsdl, WsdlError)
from .xmlutil import (SOAP_BINDING_NS, WSDL2_NS, WSDL_NS, XSD_NS, QName,
                      XmlDocument, local_name, parse_document, split_tag)

log = logging.getLogger(__name__)

Fetch = Callable[[str], Union[str, bytes]]

DOCUMENT_LITERAL = 'document-literal'
RPC_LITERAL = 'rpc-literal'

_SOAPENC_NS = 'http://schemas.xmlsoap.org/soap/encoding/'


@dataclass(frozen=True)
class FacetSet:
    min_inclusive: Optional[Decimal] = None
    max_inclusive: Optional[Decimal] = None
    min_exclusive: Optional[Decimal] = None
    max_exclusive: Optional[Decimal] = None
    enumeration: Optional[Tuple[str, ...]] = None
    min_length: Optional[int] = None
    max_length: Optional[int] = None
    # kept only so lowering can refuse it
    pattern: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class ElementDecl:
    name: str
    namespace: str
    type_ref: QName
    min_occurs: int = 1
    max_occurs: Optional[int] = 1  # None means unbounded
    qualified: bool = True

    @property
    def qname(self) -> QName:
        return QName(self.namespace, self.name)


@dataclass(frozen=True)
class SimpleTypeDef:
    name: QName
    base: Optional[QName]
    facets: FacetSet = FacetSet()
    variety: str = 'restriction'  # or 'list' / 'union', which lowering rejects
    anonymous: bool = False


@dataclass(frozen=True)
class ComplexTypeDef:
    name: QName
    combinator: str  # 'sequence' | 'all' | 'choice'
    children: Tuple[ElementDecl, ...]
    anonymous: bool = False
    unsupported: Optional[str] = None


@dataclass(frozen=True)
class XsdSchema:
    target_namespace: str
    elements: Dict[QName, ElementDecl]
    simple_types: Dict[QName, SimpleTypeDef]
    complex_types: Dict[QName, ComplexTypeDef]
    qualified_namespaces: FrozenSet[str] = frozenset()

    def lookup_type(self, name: QName):
        """Return the SimpleTypeDef/ComplexTypeDef for *name*, or None for XSD built-ins."""
        if name.namespace == XSD_NS:
            return None
        if name in self.complex_types:
            return self.complex_types[name]
        if name in self.simple_types:
            return self.simple_types[name]
        raise UnresolvedReference('unknown type %s' % (name,))


@dataclass(frozen=True)
class OperationDef:
    name: str
    soap_action: str
    input_element: QName
    output_element: QName
    style: str = DOCUMENT_LITERAL


@dataclass(frozen=True)
class WsdlModel:
    service_name: str
    endpoint_url: str
    operations: Tuple[OperationDef, ...]
    schema: XsdSchema

    def operation(self, name: str) -> OperationDef:
        for op in self.operations:
            if op.name == name:
                return op
        raise KeyError(name)


def _occurs(value: Optional[str], default: int) -> Optional[int]:
    if value is None:
        return default
    value = value.strip()
    if value == 'unbounded':
        return None
    try:
        n = int(value)
    except ValueError:
        raise UnsupportedWsdl('bad occurrence value %r' % value) from None
    if n < 0:
        raise UnsupportedWsdl('negative occurrence value %r' % value)
    return n


def _decimal(value: str) -> Decimal:
    try:
        return Decimal(value.strip())
    except InvalidOperation:
        raise UnsupportedWsdl('bad numeric facet value %r' % value) from None


def _natural(value: str) -> int:
    try:
        n = int(value.strip())
    except ValueError:
        raise UnsupportedWsdl('bad length facet value %r' % value) from None
    if n < 0:
        raise UnsupportedWsdl('negative length facet %r' % value)
    return n


class _SchemaCollector:
    """Accumulates declarations from every schema reachable from one WSDL."""

    def __init__(self, fetch: Optional[Fetch]):
        self.fetch = fetch
        self.elements: Dict[QName, ElementDecl] = {}
        self.simple_types: Dict[QName, SimpleTypeDef] = {}
        self.complex_types: Dict[QName, dict] = {}
        self.qualified: set = set()
        self.target_namespaces: List[str] = []
        self.loaded: set = set()
        self.loading: List[str] = []
        # element decls pending ref resolution: (owner key, index) handled at freeze
        self.refs: Dict[int, QName] = {}

    # -- loading ---------------------------------------------------------

    def load_location(self, location: str, base_url: str, default_ns: Optional[str]):
        url = urljoin(base_url, location) if base_url else location
        if url in self.loading:
            raise ImportCycle('schema import cycle through %s' % url)
        if url in self.loaded:
            return
        if self.fetch is None:
            log.warning('not fetching schema %s: no fetcher configured', url)
            return
        self.loading.append(url)
        try:
            doc = parse_document(self.fetch(url))
            root = doc.root
            if root.tag == '{%s}schema' % XSD_NS:
                self.add_schema(doc, root, url, default_ns)
            elif root.tag == '{%s}definitions' % WSDL_NS:
                for schema in root.iter('{%s}schema' % XSD_NS):
                    self.add_schema(doc, schema, url, None)
            else:
                raise UnsupportedWsdl('%s is not an XML schema' % url)
        finally:
            self.loading.pop()
        self.loaded.add(url)

    def add_schema(self, doc: XmlDocument, schema, base_url: str, default_ns: Optional[str]):
        tns = schema.get('targetNamespace', default_ns or '')
        if tns not in self.target_namespaces:
            self.target_namespaces.append(tns)
        qualified = schema.get('elementFormDefault', 'unqualified') == 'qualified'
        if qualified:
            self.qualified.add(tns)
        ctx = _SchemaContext(doc, tns, qualified)
        for child in schema:
            tag = child.tag
            if tag == '{%s}import' % XSD_NS:
                loc = child.get('schemaLocation')
                if loc:
                    self.load_location(loc, base_url, child.get('namespace'))
            elif tag == '{%s}include' % XSD_NS:
                loc = child.get('schemaLocation')
                if loc:
                    self.load_location(loc, base_url, tns)
            elif tag == '{%s}element' % XSD_NS:
                decl = self.element(ctx, child, path=(), top=True)
                self.elements[decl.qname] = decl
            elif tag == '{%s}simpleType' % XSD_NS:
                name = QName(tns, child.get('name', ''))
                self.simple_types[name] = self.simple_type(ctx, child, name, anonymous=False)
            elif tag == '{%s}complexType' % XSD_NS:
                name = QName(tns, child.get('name', ''))
                self.complex_types[name] = self.complex_type(ctx, child, name, (name.local,))

    # -- declarations ----------------------------------------------------

    def element(self, ctx, node, path, top=False) -> ElementDecl:
        if top:
            min_occurs, max_occurs = 1, 1
        else:
            min_occurs = _occurs(node.get('minOccurs'), 1)
            max_occurs = _occurs(node.get('maxOccurs'), 1)
            if max_occurs is not None and min_occurs > max_occurs:
                raise UnsupportedWsdl('minOccurs > maxOccurs on %s' % node.get('name'))
        ref = node.get('ref')
        if ref is not None and not top:
            target = ctx.resolve(node, ref)
            decl = ElementDecl(target.local, target.namespace, QName('', ''),
                               min_occurs, max_occurs, True)
            self.refs[id(decl)] = target
            return decl
        name = node.get('name')
        if not name:
            raise UnsupportedWsdl('element without a name')
        qualified = True if top else (node.get('form') == 'qualified'
                                      if node.get('form') else ctx.qualified)
        path = path + (name,)
        type_attr = node.get('type')
        if type_attr is not None:
            type_ref = ctx.resolve(node, type_attr)
        else:
            inline_ct = node.find('{%s}complexType' % XSD_NS)
            inline_st = node.find('{%s}simpleType' % XSD_NS)
            synthetic = QName(ctx.tns, '/'.join(path) + '#anon')
            if inline_ct is not None:
                self.complex_types[synthetic] = self.complex_type(
                    ctx, inline_ct, synthetic, path, anonymous=True)
                type_ref = synthetic
            elif inline_st is not None:
                self.simple_types[synthetic] = self.simple_type(
                    ctx, inline_st, synthetic, anonymous=True)
                type_ref = synthetic
            else:
                type_ref = QName(XSD_NS, 'anyType')
        return ElementDecl(name, ctx.tns, type_ref, min_occurs, max_occurs, qualified)

    def simple_type(self, ctx, node, name, anonymous) -> SimpleTypeDef:
        restriction = node.find('{%s}restriction' % XSD_NS)
        if restriction is None:
            variety = 'list' if node.find('{%s}list' % XSD_NS) is not None else 'union'
            return SimpleTypeDef(name, None, FacetSet(), variety, anonymous)
        base_attr = restriction.get('base')
        if base_attr is None:
            inner = restriction.find('{%s}simpleType' % XSD_NS)
            if inner is None:
                raise UnsupportedWsdl('restriction of %s has no base' % (name,))
            base = QName(name.namespace, name.local + '#base')
            self.simple_types[base] = self.simple_type(ctx, inner, base, anonymous=True)
        else:
            base = ctx.resolve(restriction, base_attr)
        facets = {}
        enumeration, pattern = [], []
        for facet in restriction:
            kind = local_name(facet.tag)
            value = facet.get('value')
            if value is None:
                continue
            if kind in ('minInclusive', 'maxInclusive', 'minExclusive', 'maxExclusive'):
                key = kind[:3].lower() + '_' + kind[3:].lower()
                facets[key] = _decimal(value)
            elif kind == 'enumeration':
                enumeration.append(value)
            elif kind == 'pattern':
                pattern.append(value)
            elif kind == 'length':
                facets['min_length'] = facets['max_length'] = _natural(value)
            elif kind == 'minLength':
                facets['min_length'] = _natural(value)
            elif kind == 'maxLength':
                facets['max_length'] = _natural(value)
        if 'min_inclusive' in facets and 'min_exclusive' in facets:
            raise UnsupportedWsdl('both minInclusive and minExclusive on %s' % (name,))
        if 'max_inclusive' in facets and 'max_exclusive' in facets:
            raise UnsupportedWsdl('both maxInclusive and maxExclusive on %s' % (name,))
        if enumeration:
            facets['enumeration'] = tuple(dict.fromkeys(enumeration))
        if pattern:
            facets['pattern'] = tuple(pattern)
        return SimpleTypeDef(name, base, FacetSet(**facets), 'restriction', anonymous)

    def complex_type(self, ctx, node, name, path, anonymous=False) -> dict:
        """Returns a mutable draft; extension bases are merged in ``freeze``."""
        draft = {'name': name, 'combinator': 'sequence', 'children': [],
                 'anonymous': anonymous, 'unsupported': None, 'extends': None}
        body = node
        content = node.find('{%s}complexContent' % XSD_NS)
        if node.find('{%s}simpleContent' % XSD_NS) is not None:
            draft['unsupported'] = 'simpleContent'
            return draft
        if content is not None:
            ext = content.find('{%s}extension' % XSD_NS)
            res = content.find('{%s}restriction' % XSD_NS)
            derivation = ext if ext is not None else res
            if derivation is None:
                draft['unsupported'] = 'empty complexContent'
                return draft
            base = ctx.resolve(derivation, derivation.get('base', ''))
            if base.namespace == _SOAPENC_NS:
                draft['unsupported'] = 'SOAP-encoded array %s' % (base,)
                return draft
            if ext is not None and base.namespace != XSD_NS:
                draft['extends'] = base
            body = derivation
        for child in body:
            kind = local_name(child.tag)
            if child.tag.startswith('{%s}' % XSD_NS) and kind in ('sequence', 'all', 'choice'):
                draft['combinator'] = kind
                self._particles(ctx, child, draft, path, kind)
            elif kind in ('group',):
                draft['unsupported'] = 'model group reference'
        return draft

    def _particles(self, ctx, group, draft, path, combinator):
        for child in group:
            if not isinstance(child.tag, str) or not child.tag.startswith('{%s}' % XSD_NS):
                continue
            kind = local_name(child.tag)
            if kind == 'element':
                draft['children'].append(self.element(ctx, child, path))
            elif kind == 'sequence' and combinator == 'sequence' and \
                    child.get('minOccurs', '1') == '1' and child.get('maxOccurs', '1') == '1':
                self._particles(ctx, child, draft, path, combinator)
            elif kind in ('sequence', 'choice', 'all', 'group', 'any'):
                draft['unsupported'] = 'nested %s particle' % kind
            # annotations are skipped

    # -- finalisation ----------------------------------------------------

    def _resolve_ref(self, decl: ElementDecl) -> ElementDecl:
        target = self.refs.get(id(decl))
        if target is None:
            return decl
        if target not in self.elements:
            raise UnresolvedReference('element ref to unknown %s' % (target,))
        glob = self.elements[target]
        return dataclasses.replace(decl, type_ref=glob.type_ref)

    def freeze(self) -> XsdSchema:
        done: Dict[QName, ComplexTypeDef] = {}
        active: List[QName] = []

        def finish(name):
            if name in done:
                return done[name]
            if name in active:
                raise RecursiveType('type %s extends itself' % (name,))
            if name not in self.complex_types:
                raise UnresolvedReference('unknown base type %s' % (name,))
            active.append(name)
            draft = self.complex_types[name]
            children = [self._resolve_ref(c) for c in draft['children']]
            unsupported = draft['unsupported']
            combinator = draft['combinator']
            if draft['extends'] is not None:
                base = finish(draft['extends'])
                if base.combinator == 'choice' and base.children:
                    unsupported = unsupported or 'extension of a choice'
                children = list(base.children) + children
                unsupported = unsupported or base.unsupported
            active.pop()
            done[name] = ComplexTypeDef(name, combinator, tuple(children),
                                        draft['anonymous'], unsupported)
            return done[name]

        for name in self.complex_types:
            finish(name)
        schema = XsdSchema(
            self.target_namespaces[0] if self.target_namespaces else '',
            self.elements, self.simple_types, done, frozenset(self.qualified))
        _check_references(schema)
        _check_recursion(schema)
        return schema


class _SchemaContext:
    def __init__(self, doc: XmlDocument, tns: str, qualified: bool):
        self.doc = doc
        self.tns = tns
        self.qualified = qualified

    def resolve(self, node, value: str) -> QName:
        try:
            return self.doc.resolve(node, value)
        except KeyError as exc:
            raise UnresolvedReference('undeclared prefix %s in %r' % (exc, value)) from None


def _check_references(schema: XsdSchema):
    def known(name):
        return (name.namespace == XSD_NS or name in schema.complex_types
                or name in schema.simple_types)

    for decl in schema.elements.values():
        if not known(decl.type_ref):
            raise UnresolvedReference('element %s has unknown type %s' % (decl.qname, decl.type_ref))
    for ct in schema.complex_types.values():
        for decl in ct.children:
            if not known(decl.type_ref):
                raise UnresolvedReference('element %s in %s has unknown type %s'
                                          % (decl.name, ct.name, decl.type_ref))
    for st in schema.simple_types.values():
        if st.base is not None and not known(st.base):
            raise UnresolvedReference('simple type %s has unknown base %s' % (st.name, st.base))
        if st.base is not None and st.base in schema.complex_types:
            raise UnresolvedReference('simple type %s restricts complex type %s'
                                      % (st.name, st.base))


def _check_recursion(schema: XsdSchema):
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {name: WHITE for name in schema.complex_types}
    simple_colour = {name: WHITE for name in schema.simple_types}

    def visit(name):
        colour[name] = GREY
        for decl in schema.complex_types[name].children:
            ref = decl.type_ref
            if ref in colour:
                if colour[ref] == GREY:
                    raise RecursiveType('recursive type %s reachable from itself' % (ref,))
                if colour[ref] == WHITE:
                    visit(ref)
        colour[name] = BLACK

    def visit_simple(name):
        simple_colour[name] = GREY
        base = schema.simple_types[name].base
        if base in simple_colour:
            if simple_colour[base] == GREY:
                raise RecursiveType('simple type %s derives from itself' % (base,))
            if simple_colour[base] == WHITE:
                visit_simple(base)
        simple_colour[name] = BLACK

    for name in schema.complex_types:
        if colour[name] == WHITE:
            visit(name)
    for name in schema.simple_types:
        if simple_colour[name] == WHITE:
            visit_simple(name)


# -- WSDL ----------------------------------------------------------------

def _w(local):
    return '{%s}%s' % (WSDL_NS, local)


def _s(local):
    return '{%s}%s' % (SOAP_BINDING_NS, local)


class _WsdlParts:
    def __init__(self):
        self.messages: Dict[QName, list] = {}
        self.port_types: Dict[QName, list] = {}
        self.bindings: Dict[QName, dict] = {}
        self.services: list = []


def _collect_wsdl(doc: XmlDocument, url: str, parts: _WsdlParts,
                  schemas: _SchemaCollector, fetch: Optional[Fetch]):
    root = doc.root
    tns = root.get('targetNamespace', '')

    def resolve(node, value):
        try:
            return doc.resolve(node, value or '')
        except KeyError as exc:
            raise UnresolvedReference('undeclared prefix %s in %r' % (exc, value)) from None

    for child in root:
        tag = child.tag
        if tag == _w('import'):
            loc = child.get('location')
            if not loc or fetch is None:
                continue
            target = urljoin(url, loc) if url else loc
            if target in schemas.loading:
                raise ImportCycle('WSDL import cycle through %s' % target)
            if target in schemas.loaded:
                continue
            schemas.loading.append(target)
            try:
                sub = parse_document(fetch(target))
                if sub.root.tag == '{%s}schema' % XSD_NS:
                    schemas.add_schema(sub, sub.root, target, child.get('namespace'))
                elif sub.root.tag == _w('definitions'):
                    _collect_wsdl(sub, target, parts, schemas, fetch)
            finally:
                schemas.loading.pop()
            schemas.loaded.add(target)
        elif tag == _w('types'):
            for schema in child.findall('{%s}schema' % XSD_NS):
                schemas.add_schema(doc, schema, url, None)
        elif tag == _w('message'):
            msg_parts = []
            for part in child.findall(_w('part')):
                element = part.get('element')
                type_ = part.get('type')
                msg_parts.append((part.get('name', ''),
                                  resolve(part, element) if element else None,
                                  resolve(part, type_) if type_ else None))
            parts.messages[QName(tns, child.get('name', ''))] = msg_parts
        elif tag == _w('portType'):
            ops = []
            for op in child.findall(_w('operation')):
                inp = op.find(_w('input'))
                out = op.find(_w('output'))
                ops.append((op.get('name', ''),
                            resolve(inp, inp.get('message')) if inp is not None else None,
                            resolve(out, out.get('message')) if out is not None else None))
            parts.port_types[QName(tns, child.get('name', ''))] = ops
        elif tag == _w('binding'):
            soap = child.find(_s('binding'))
            if soap is None:
                continue
            ops = {}
            for op in child.findall(_w('operation')):
                soap_op = op.find(_s('operation'))
                body = op.find('%s/%s' % (_w('input'), _s('body')))
                ops[op.get('name', '')] = {
                    'action': soap_op.get('soapAction', '') if soap_op is not None else '',
                    'style': soap_op.get('style') if soap_op is not None else None,
                    'use': body.get('use', 'literal') if body is not None else 'literal',
                    'namespace': body.get('namespace') if body is not None else None,
                }
            parts.bindings[QName(tns, child.get('name', ''))] = {
                'port_type': resolve(child, child.get('type')),
                'style': soap.get('style', 'document'),
                'ops': ops,
                'tns': tns,
            }
        elif tag == _w('service'):
            ports = []
            for port in child.findall(_w('port')):
                address = port.find(_s('address'))
                ports.append((resolve(port, port.get('binding')),
                              address.get('location') if address is not None else None))
            parts.services.append((child.get('name', ''), ports))


def _rpc_wrapper(schemas: _SchemaCollector, ns: str, name: str, msg_parts) -> QName:
    children = []
    for part_name, element, type_ in msg_parts:
        if element is not None:
            if element not in schemas.elements:
                raise UnresolvedReference('part %s refers to unknown element %s' % (part_name, element))
            glob = schemas.elements[element]
            children.append(ElementDecl(glob.name, glob.namespace, glob.type_ref, 1, 1, True))
        else:
            children.append(ElementDecl(part_name, ns, type_, 1, 1, False))
    qname = QName(ns, name)
    synthetic = QName(ns, name + '#anon')
    schemas.complex_types[synthetic] = {
        'name': synthetic, 'combinator': 'sequence', 'children': children,
        'anonymous': True, 'unsupported': None, 'extends': None}
    schemas.elements[qname] = ElementDecl(name, ns, synthetic, 1, 1, True)
    return qname


def parse_wsdl(document: Union[str, bytes], base_url: str = '',
               fetch: Optional[Fetch] = None) -> WsdlModel:
    """Parse a WSDL 1.1 document into a :class:`WsdlModel`.

    *fetch* is used to retrieve imported schemas and WSDL documents,
    each absolute location at most once.  Every failure surfaces as a
    :class:`~wsdlprop.errors.WsdlError` subclass.
    """
    try:
        return _parse_wsdl(document, base_url, fetch)
    except WsdlError:
        raise
    except RecursionError:
        raise UnsupportedWsdl('document nesting too deep') from None
    except (AttributeError, TypeError, ValueError, KeyError, IndexError) as exc:
        raise UnsupportedWsdl('cannot interpret document: %s' % exc) from None


def _parse_wsdl(document, base_url, fetch) -> WsdlModel:
    doc = parse_document(document)
    root = doc.root
    if split_tag(root.tag).namespace == WSDL2_NS:
        raise UnsupportedWsdl('WSDL 2.0 is not supported')
    if root.tag != _w('definitions'):
        raise UnsupportedWsdl('root element %s is not wsdl:definitions' % root.tag)
    schemas = _SchemaCollector(fetch)
    parts = _WsdlParts()
    if base_url:
        schemas.loading.append(base_url)
    _collect_wsdl(doc, base_url, parts, schemas, fetch)
    if base_url:
        schemas.loading.pop()
        schemas.loaded.add(base_url)

    chosen = None
    for service_name, ports in parts.services:
        for binding_name, location in ports:
            if binding_name in parts.bindings and location:
                chosen = (service_name, binding_name, location)
                break
        if chosen:
            break
    if chosen is None:
        raise UnsupportedWsdl('no SOAP 1.1 port found')
    service_name, binding_name, location = chosen
    endpoint = urljoin(base_url, location) if base_url else location
    parsed = urlparse(endpoint)
    if parsed.scheme not in ('http', 'https') or not parsed.netloc:
        raise UnsupportedWsdl('endpoint %r is not an absolute HTTP URL' % endpoint)

    binding = parts.bindings[binding_name]
    if binding['port_type'] not in parts.port_types:
        raise UnresolvedReference('binding refers to unknown portType %s' % (binding['port_type'],))

    def message(name):
        if name not in parts.messages:
            raise UnresolvedReference('unknown message %s' % (name,))
        return parts.messages[name]

    operations = []
    seen = set()
    for op_name, in_msg, out_msg in parts.port_types[binding['port_type']]:
        info = binding['ops'].get(op_name)
        if info is None:
            continue
        if op_name in seen:
            log.warning('skipping overloaded operation %s', op_name)
            continue
        if in_msg is None or out_msg is None:
            log.warning('skipping one-way operation %s', op_name)
            continue
        if info['use'] != 'literal':
            log.warning('skipping operation %s: use=%s is not supported', op_name, info['use'])
            continue
        style = info['style'] or binding['style']
        in_parts, out_parts = message(in_msg), message(out_msg)
        if style == 'rpc':
            ns = info['namespace'] or binding['tns']
            input_element = _rpc_wrapper(schemas, ns, op_name, in_parts)
            output_element = _rpc_wrapper(schemas, ns, op_name + 'Response', out_parts)
            kind = RPC_LITERAL
        else:
            if len(in_parts) != 1 or len(out_parts) != 1 or \
                    in_parts[0][1] is None or out_parts[0][1] is None:
                log.warning('skipping operation %s: document style needs one element part',
                            op_name)
                continue
            input_element, output_element = in_parts[0][1], out_parts[0][1]
            kind = DOCUMENT_LITERAL
        seen.add(op_name)
        operations.append(OperationDef(op_name, info['action'], input_element,
                                       output_element, kind))
    if not operations:
        raise UnsupportedWsdl('no usable SOAP operations in binding %s' % (binding_name,))

    schema = schemas.freeze()
    for op in operations:
        for name in (op.input_element, op.output_element):
            if name not in schema.elements:
                raise UnresolvedReference('operation %s refers to unknown element %s'
                                          % (op.name, name))
    return WsdlModel(service_name, endpoint, tuple(operations), schema)
