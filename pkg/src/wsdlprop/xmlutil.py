"""Namespace-aware XML loading on top of the stdlib expat bindings.

ElementTree drops prefix declarations, but XSD stores QNames inside
attribute values (``type="tns:ShipInfo"``), so those have to be resolved
against the declarations in scope at the element that carries them.
"""
import re
import xml.etree.ElementTree as ET
from typing import NamedTuple, Optional, Union

from .errors import MalformedXml

XSD_NS = 'http://www.w3.org/2001/XMLSchema'
WSDL_NS = 'http://schemas.xmlsoap.org/wsdl/'
WSDL2_NS = 'http://www.w3.org/ns/wsdl'
SOAP_BINDING_NS = 'http://schemas.xmlsoap.org/wsdl/soap/'
SOAP_ENV_NS = 'http://schemas.xmlsoap.org/soap/envelope/'

_DECL_RE = re.compile(rb'^\s*<\?xml[^>]*?encoding\s*=\s*["\']([A-Za-z0-9._-]+)["\']')
_ACCEPTED_ENCODINGS = {'utf-8', 'utf8', 'utf-16', 'utf16', 'utf-16le', 'utf-16be'}


class QName(NamedTuple):
    namespace: str
    local: str

    def __str__(self):
        return '{%s}%s' % self if self.namespace else self.local


def split_tag(tag: str) -> QName:
    if tag.startswith('{'):
        ns, _, local = tag[1:].partition('}')
        return QName(ns, local)
    return QName('', tag)


def local_name(tag) -> str:
    if not isinstance(tag, str):
        return ''
    return tag.rpartition('}')[2]


class XmlDocument:
    """A parsed tree plus the prefix bindings in scope at every element."""

    def __init__(self, root: ET.Element, nsmaps: dict):
        self.root = root
        self._nsmaps = nsmaps

    def nsmap(self, elem: ET.Element) -> dict:
        return self._nsmaps.get(elem, {})

    def resolve(self, elem: ET.Element, value: str) -> QName:
        """Resolve a ``prefix:local`` attribute value in the scope of *elem*."""
        value = value.strip()
        prefix, sep, local = value.rpartition(':')
        nsmap = self.nsmap(elem)
        if not sep:
            return QName(nsmap.get('', ''), value)
        if prefix not in nsmap:
            raise KeyError(prefix)
        return QName(nsmap[prefix], local)


def _to_bytes(document: Union[str, bytes]) -> bytes:
    if isinstance(document, bytes):
        data = document
    elif isinstance(document, str):
        data = document.encode('utf-8', 'surrogatepass')
    else:
        raise MalformedXml('expected text or bytes, got %s' % type(document).__name__)
    if data.startswith((b'\xff\xfe', b'\xfe\xff')):
        return data
    m = _DECL_RE.match(data)
    if m:
        declared = m.group(1).decode('ascii').lower()
        if declared not in _ACCEPTED_ENCODINGS:
            raise MalformedXml('unsupported document encoding %r' % declared)
        if isinstance(document, str) and declared.startswith('utf-16'):
            # text input has already been decoded; the declaration is stale
            data = data[:m.start(1)] + b'utf-8' + data[m.end(1):]
    return data


def parse_document(document: Union[str, bytes]) -> XmlDocument:
    data = _to_bytes(document)
    if (b'<!ENTITY' in data or '<!ENTITY'.encode('utf-16-le') in data
            or '<!ENTITY'.encode('utf-16-be') in data):
        raise MalformedXml('entity declarations are not allowed')
    parser = ET.XMLPullParser(events=('start-ns', 'start', 'end'))
    nsmaps = {}
    stack = [{'xml': 'http://www.w3.org/XML/1998/namespace'}]
    pending = {}
    root: Optional[ET.Element] = None
    try:
        parser.feed(data)
        parser.close()
        for event, payload in parser.read_events():
            if event == 'start-ns':
                prefix, uri = payload
                pending[prefix] = uri
            elif event == 'start':
                scope = dict(stack[-1])
                scope.update(pending)
                pending = {}
                stack.append(scope)
                nsmaps[payload] = scope
                if root is None:
                    root = payload
            else:
                stack.pop()
    except MalformedXml:
        raise
    except (ET.ParseError, UnicodeError, ValueError, LookupError) as exc:
        raise MalformedXml(str(exc)) from None
    if root is None:
        raise MalformedXml('document has no root element')
    return XmlDocument(root, nsmaps)


def parse_element(document: Union[str, bytes]) -> ET.Element:
    return parse_document(document).root
