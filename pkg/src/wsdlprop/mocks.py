"""In-process SOAP services for offline testing.

Three services are bundled: a cooking-unit converter, an order service
and a string ``delete`` service that crashes when its second argument is
empty.  Each can be dispatched to directly through
:class:`~wsdlprop.transport.FakeEndpoint` or served over local HTTP.
"""
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Dict, Optional, Tuple, Union
from urllib.parse import urlsplit

from .codec import (DecodeError, Fault, decode_request, encode_element, envelope,
                    fault_envelope, relax_strings)
from .errors import MalformedXml
from .generate import BoolV, FloatV, IntV, TupleV, Value, chars, conforms, text_of
from .ir import lower_element
from .schema import parse_wsdl
from .transport import CONTENT_TYPE, FakeEndpoint, HttpReply
from .xmlutil import SOAP_ENV_NS, parse_element, split_tag

log = logging.getLogger(__name__)

Handler = Callable[[str, Value], Union[Value, Fault]]


class MockService:
    """A WSDL document plus a handler ``(operation name, input value) -> value | Fault``.

    Requests are decoded against the lowered input element and checked for
    conformance before the handler sees them; invalid input gets a Client
    fault.  Handler exceptions become Server faults on HTTP 500.
    """

    def __init__(self, wsdl_document: str, handler: Handler):
        self.wsdl_document = wsdl_document
        self.handler = handler
        self.model = parse_wsdl(wsdl_document)
        self._ops = {}
        for op in self.model.operations:
            self._ops[op.input_element] = (
                op,
                lower_element(self.model.schema, op.input_element, 1),
                lower_element(self.model.schema, op.output_element, 1),
            )

    @property
    def endpoint_url(self) -> str:
        return self.model.endpoint_url

    @property
    def wsdl_url(self) -> str:
        return self.model.endpoint_url + '?WSDL'

    def _find(self, soap_action: str, document: str):
        root = parse_element(document)
        body = root.find('{%s}Body' % SOAP_ENV_NS)
        first = next((c for c in body if isinstance(c.tag, str)), None) if body is not None else None
        if first is not None and split_tag(first.tag) in self._ops:
            return self._ops[split_tag(first.tag)]
        for entry in self._ops.values():
            if soap_action and entry[0].soap_action == soap_action:
                return entry
        return None

    def handle(self, soap_action: str, document: str) -> HttpReply:
        try:
            entry = self._find(soap_action, document)
        except MalformedXml as exc:
            return HttpReply(500, fault_envelope('soap:Client', 'malformed request: %s' % exc))
        if entry is None:
            return HttpReply(500, fault_envelope('soap:Client', 'unknown operation'))
        op, named_in, named_out = entry
        try:
            value = decode_request(document, named_in)
        except (DecodeError, MalformedXml) as exc:
            return HttpReply(500, fault_envelope('soap:Client', str(exc)))
        if not conforms(relax_strings(named_in.ir), value):
            return HttpReply(500, fault_envelope('soap:Client', 'request violates the schema'))
        try:
            reply = self.handler(op.name, value)
        except Exception as exc:
            return HttpReply(500, fault_envelope('soap:Server', '%s: %s' % (type(exc).__name__, exc)))
        if isinstance(reply, Fault):
            return HttpReply(500, fault_envelope(reply.fault_code, reply.fault_string, reply.detail))
        return HttpReply(200, envelope(encode_element(named_out, reply)))


_WSDL = '''<?xml version="1.0" encoding="utf-8"?>
<wsdl:definitions xmlns:wsdl="http://schemas.xmlsoap.org/wsdl/"
    xmlns:soap="http://schemas.xmlsoap.org/wsdl/soap/"
    xmlns:s="http://www.w3.org/2001/XMLSchema"
    xmlns:tns="{tns}" targetNamespace="{tns}">
  <wsdl:types>
    <s:schema targetNamespace="{tns}" elementFormDefault="{form}">
{schema}
    </s:schema>
  </wsdl:types>
{messages}
  <wsdl:portType name="{service}Soap">
{port_ops}
  </wsdl:portType>
  <wsdl:binding name="{service}Soap" type="tns:{service}Soap">
    <soap:binding transport="http://schemas.xmlsoap.org/soap/http" style="document"/>
{binding_ops}
  </wsdl:binding>
  <wsdl:service name="{service}">
    <wsdl:port name="{service}Soap" binding="tns:{service}Soap">
      <soap:address location="{location}"/>
    </wsdl:port>
  </wsdl:service>
</wsdl:definitions>
'''


def document_wsdl(service: str, tns: str, location: str, schema: str,
                  operations, qualified: bool = False) -> str:
    """Render a document/literal WSDL.  *operations* is ``[(name, in_elem, out_elem, action)]``."""
    messages, port_ops, binding_ops = [], [], []
    for name, in_elem, out_elem, action in operations:
        messages.append(
            '  <wsdl:message name="{0}SoapIn"><wsdl:part name="parameters" element="tns:{1}"/>'
            '</wsdl:message>\n'
            '  <wsdl:message name="{0}SoapOut"><wsdl:part name="parameters" element="tns:{2}"/>'
            '</wsdl:message>'.format(name, in_elem, out_elem))
        port_ops.append(
            '    <wsdl:operation name="{0}"><wsdl:input message="tns:{0}SoapIn"/>'
            '<wsdl:output message="tns:{0}SoapOut"/></wsdl:operation>'.format(name))
        binding_ops.append(
            '    <wsdl:operation name="{0}"><soap:operation soapAction="{1}" style="document"/>'
            '<wsdl:input><soap:body use="literal"/></wsdl:input>'
            '<wsdl:output><soap:body use="literal"/></wsdl:output></wsdl:operation>'
            .format(name, action))
    return _WSDL.format(service=service, tns=tns, location=location, schema=schema,
                        form='qualified' if qualified else 'unqualified',
                        messages='\n'.join(messages), port_ops='\n'.join(port_ops),
                        binding_ops='\n'.join(binding_ops))


# -- ConvertCooking --------------------------------------------------------

# millilitres per unit; only drop, dash and TenCan come from the original service
COOKING_UNITS = {
    'drop': 0.05,
    'dash': 0.62,
    'pinch': 0.31,
    'teaspoon': 4.93,
    'tablespoon': 14.79,
    'fluidOunce': 29.57,
    'cup': 236.59,
    'pint': 473.18,
    'quart': 946.35,
    'TenCan': 3000.0,
}

CONVERT_COOKING_PATH = '/ConvertCooking.asmx'

_COOKING_SCHEMA = '''      <s:element name="ChangeCookingUnit">
        <s:complexType>
          <s:sequence>
            <s:element minOccurs="1" maxOccurs="1" name="CookingValue" type="s:double" />
            <s:element minOccurs="1" maxOccurs="1" name="fromCookingUnit" type="tns:Cookings" />
            <s:element minOccurs="1" maxOccurs="1" name="toCookingUnit" type="tns:Cookings" />
          </s:sequence>
        </s:complexType>
      </s:element>
      <s:simpleType name="Cookings">
        <s:restriction base="s:string">
%s
        </s:restriction>
      </s:simpleType>
      <s:element name="ChangeCookingUnitResponse">
        <s:complexType>
          <s:sequence>
            <s:element minOccurs="1" maxOccurs="1" name="ChangeCookingUnitResult" type="s:double" />
          </s:sequence>
        </s:complexType>
      </s:element>
      <s:element name="double" type="s:double" />''' % '\n'.join(
    '          <s:enumeration value="%s" />' % unit for unit in COOKING_UNITS)


def convert_cooking(value: float, from_unit: str, to_unit: str) -> float:
    if from_unit == to_unit:
        return value
    return value * COOKING_UNITS[from_unit] / COOKING_UNITS[to_unit]


def _cooking_handler(op_name: str, value: TupleV):
    result = convert_cooking(value['CookingValue'].value, value['fromCookingUnit'].value,
                             value['toCookingUnit'].value)
    return TupleV((('ChangeCookingUnitResult', FloatV(float(result))),))


def convert_cooking_service(location: str = 'http://convertcooking.mock'
                            + CONVERT_COOKING_PATH) -> MockService:
    wsdl = document_wsdl(
        'ConvertCooking', 'http://www.webserviceX.NET/', location, _COOKING_SCHEMA,
        [('ChangeCookingUnit', 'ChangeCookingUnit', 'ChangeCookingUnitResponse',
          'http://www.webserviceX.NET/ChangeCookingUnit')],
        qualified=True)
    return MockService(wsdl, _cooking_handler)


# -- placeOrder ------------------------------------------------------------

PLACE_ORDER_PATH = '/OrderService/services/Order'

_ORDER_SCHEMA = '''      <s:complexType name="ProductType">
        <s:sequence>
          <s:element maxOccurs="1" minOccurs="1" name="name" type="s:string"/>
          <s:element maxOccurs="1" minOccurs="1" name="price" type="s:positiveInteger"/>
          <s:element maxOccurs="1" minOccurs="1" name="shipInfo" type="tns:ShipInfo"/>
        </s:sequence>
      </s:complexType>
      <s:simpleType name="PaymentType">
        <s:restriction base="s:string">
          <s:enumeration value="visa"/>
          <s:enumeration value="paypal"/>
          <s:enumeration value="deposit"/>
        </s:restriction>
      </s:simpleType>
      <s:complexType name="ShipInfo">
        <s:sequence>
          <s:element maxOccurs="1" minOccurs="1" name="paymentInfo" type="tns:PaymentType"/>
          <s:element maxOccurs="1" minOccurs="1" name="address" type="s:string"/>
        </s:sequence>
      </s:complexType>
      <s:element name="Order">
        <s:complexType>
          <s:sequence>
            <s:element maxOccurs="unbounded" minOccurs="1" name="products" type="tns:ProductType"/>
          </s:sequence>
        </s:complexType>
      </s:element>
      <s:element name="Product" type="tns:ProductType"/>
      <s:element name="OrderResponse">
        <s:complexType>
          <s:sequence>
            <s:element name="accepted" type="s:boolean"/>
            <s:element name="itemCount" type="s:int"/>
            <s:element name="total" type="s:long"/>
          </s:sequence>
        </s:complexType>
      </s:element>'''


def _order_handler(op_name: str, value: TupleV):
    products = value['products'].items
    total = sum(p['price'].value for p in products)
    return TupleV((('accepted', BoolV(True)), ('itemCount', IntV(len(products))),
                   ('total', IntV(min(total, (1 << 63) - 1)))))


def place_order_service(location: str = 'http://placeorder.mock'
                        + PLACE_ORDER_PATH) -> MockService:
    wsdl = document_wsdl('OrderService', 'http://bar', location, _ORDER_SCHEMA,
                         [('placeOrder', 'Order', 'OrderResponse', '')])
    return MockService(wsdl, _order_handler)


# -- delete ----------------------------------------------------------------

DELETE_PATH = '/DeleteProject/services/Delete'

_DELETE_SCHEMA = '''      <s:element name="delete">
        <s:complexType>
          <s:sequence>
            <s:element name="in" type="s:string"/>
            <s:element name="c" type="s:string"/>
          </s:sequence>
        </s:complexType>
      </s:element>
      <s:element name="deleteResponse">
        <s:complexType>
          <s:sequence>
            <s:element name="deleteReturn" type="s:string"/>
          </s:sequence>
        </s:complexType>
      </s:element>'''


def delete(s: str, c: str) -> str:
    """Remove the first occurrence of ``c[0]`` from *s*; IndexError when *c* is empty."""
    target = c[0]
    acc = []
    for i, ch in enumerate(s):
        if ch == target:
            return ''.join(acc) + s[i + 1:]
        acc.append(ch)
    return ''.join(acc)


def _delete_handler(op_name: str, value: TupleV):
    try:
        result = delete(text_of(value['in']), text_of(value['c']))
    except IndexError:
        return Fault('soap:Server', 'java.lang.StringIndexOutOfBoundsException: '
                     'String index out of range: 0')
    return TupleV((('deleteReturn', chars(result)),))


def delete_service(location: str = 'http://delete.mock' + DELETE_PATH) -> MockService:
    wsdl = document_wsdl('Delete', 'http://delete', location, _DELETE_SCHEMA,
                         [('delete', 'delete', 'deleteResponse', '')])
    return MockService(wsdl, _delete_handler)


MOCKS: Dict[str, Tuple[Callable[..., MockService], str]] = {
    'convertcooking': (convert_cooking_service, CONVERT_COOKING_PATH),
    'placeorder': (place_order_service, PLACE_ORDER_PATH),
    'delete': (delete_service, DELETE_PATH),
}


def fake_endpoint(*names: str) -> Tuple[FakeEndpoint, Dict[str, str]]:
    """A FakeEndpoint with the named bundled mocks (all when none given) and their WSDL URLs."""
    endpoint = FakeEndpoint()
    urls = {}
    for name in names or tuple(MOCKS):
        service = MOCKS[name][0]()
        endpoint.mount(service.endpoint_url, service)
        urls[name] = service.wsdl_url
    return endpoint, urls


# -- HTTP listener -----------------------------------------------------------

class _MockRequestHandler(BaseHTTPRequestHandler):
    service: MockService = None
    protocol_version = 'HTTP/1.1'

    def _reply(self, status: int, body: str):
        data = body.encode('utf-8')
        self.send_response(status)
        self.send_header('Content-Type', CONTENT_TYPE)
        self.send_header('Content-Length', str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        if urlsplit(self.path).query.lower() == 'wsdl':
            self._reply(200, self.service.wsdl_document)
        else:
            self._reply(404, 'not found')

    def do_POST(self):
        length = int(self.headers.get('Content-Length') or 0)
        body = self.rfile.read(length).decode('utf-8', 'replace')
        action = (self.headers.get('SOAPAction') or '').strip().strip('"')
        reply = self.service.handle(action, body)
        self._reply(reply.status, reply.body)

    def log_message(self, format, *args):
        log.debug('%s - %s', self.address_string(), format % args)


class MockServer:
    """A bundled mock behind a threaded local HTTP listener."""

    def __init__(self, name: str, port: int = 0, host: str = '127.0.0.1'):
        factory, path = MOCKS[name]
        self.httpd = ThreadingHTTPServer((host, port), _MockRequestHandler)
        self.httpd.daemon_threads = True
        self.port = self.httpd.server_address[1]
        self.service = factory('http://%s:%d%s' % (host, self.port, path))
        self.httpd.RequestHandlerClass = type('Handler', (_MockRequestHandler,),
                                              {'service': self.service})
        self._thread: Optional[threading.Thread] = None

    @property
    def wsdl_url(self) -> str:
        return self.service.wsdl_url

    def start(self) -> 'MockServer':
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self):
        self.httpd.serve_forever()

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
