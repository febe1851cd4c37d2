import pytest

from wsdlprop.errors import (ImportCycle, MalformedXml, RecursiveType, UnresolvedReference,
                             UnsupportedWsdl)
from wsdlprop.mocks import document_wsdl
from wsdlprop.schema import parse_wsdl
from wsdlprop.xmlutil import XSD_NS, QName, parse_document, split_tag


def wsdl(schema, operations=(('op', 'req', 'resp', 'urn:t#op'),), qualified=False):
    return document_wsdl('Svc', 'urn:t', 'http://svc.test/endpoint', schema, list(operations),
                         qualified)


SIMPLE = '''
      <s:element name="req"><s:complexType><s:sequence>
        <s:element name="a" type="s:int"/>
      </s:sequence></s:complexType></s:element>
      <s:element name="resp"><s:complexType><s:sequence>
        <s:element name="b" type="s:string"/>
      </s:sequence></s:complexType></s:element>'''


class TestXml:
    def test_prefixes_resolve_per_element_scope(self):
        doc = parse_document('<a xmlns:p="urn:one"><b xmlns:p="urn:two" t="p:x"/><c t="p:y"/></a>')
        b, c = list(doc.root)
        assert doc.resolve(b, b.get('t')) == QName('urn:two', 'x')
        assert doc.resolve(c, c.get('t')) == QName('urn:one', 'y')

    def test_unprefixed_value_uses_default_namespace(self):
        doc = parse_document('<a xmlns="urn:d" t="x"/>')
        assert doc.resolve(doc.root, 'x') == QName('urn:d', 'x')

    def test_unknown_prefix(self):
        doc = parse_document('<a t="q:x"/>')
        with pytest.raises(KeyError):
            doc.resolve(doc.root, 'q:x')

    def test_split_tag(self):
        assert split_tag('{urn:x}local') == QName('urn:x', 'local')
        assert split_tag('plain') == QName('', 'plain')

    @pytest.mark.parametrize('bad', [
        b'', b'<a>', b'<a></b>', b'\x00\x01', '<?xml version="1.0" encoding="latin-1"?><a/>',
        '<!DOCTYPE a [<!ENTITY e "boom">]><a>&e;</a>',
        '<!DOCTYPE a [<!ENTITY e "boom">]><a>&e;</a>'.encode('utf-16'),
    ])
    def test_malformed(self, bad):
        with pytest.raises(MalformedXml):
            parse_document(bad)

    def test_utf16_and_bom(self):
        text = '<?xml version="1.0" encoding="UTF-16"?><a>é</a>'
        assert parse_document(text.encode('utf-16')).root.text == 'é'
        assert parse_document(text).root.text == 'é'
        assert parse_document(b'\xef\xbb\xbf<a>x</a>').root.text == 'x'


class TestWsdl:
    def test_document_literal_operation(self):
        model = parse_wsdl(wsdl(SIMPLE))
        assert model.service_name == 'Svc'
        assert model.endpoint_url == 'http://svc.test/endpoint'
        op = model.operation('op')
        assert op.input_element == QName('urn:t', 'req')
        assert op.output_element == QName('urn:t', 'resp')
        assert op.soap_action == 'urn:t#op'
        assert op.style == 'document-literal'

    def test_element_form_default(self):
        unq = parse_wsdl(wsdl(SIMPLE)).schema.complex_types
        q = parse_wsdl(wsdl(SIMPLE, qualified=True)).schema.complex_types
        assert not next(iter(unq.values())).children[0].qualified
        assert next(iter(q.values())).children[0].qualified

    def test_occurs_and_unbounded(self):
        schema = SIMPLE.replace('name="a" type="s:int"',
                                'name="a" type="s:int" minOccurs="0" maxOccurs="unbounded"')
        model = parse_wsdl(wsdl(schema))
        decl = model.schema.complex_types[QName('urn:t', 'req#anon')].children[0]
        assert (decl.min_occurs, decl.max_occurs) == (0, None)

    def test_min_greater_than_max(self):
        schema = SIMPLE.replace('name="a" type="s:int"',
                                'name="a" type="s:int" minOccurs="3" maxOccurs="2"')
        with pytest.raises(UnsupportedWsdl):
            parse_wsdl(wsdl(schema))

    def test_facets_parsed(self):
        schema = SIMPLE + '''
      <s:simpleType name="Pct"><s:restriction base="s:decimal">
        <s:minInclusive value="0"/><s:maxExclusive value="100.5"/>
      </s:restriction></s:simpleType>'''
        st = parse_wsdl(wsdl(schema)).schema.simple_types[QName('urn:t', 'Pct')]
        assert st.base == QName(XSD_NS, 'decimal')
        assert str(st.facets.min_inclusive) == '0'
        assert str(st.facets.max_exclusive) == '100.5'

    def test_unresolved_type(self):
        with pytest.raises(UnresolvedReference):
            parse_wsdl(wsdl(SIMPLE.replace('type="s:string"', 'type="tns:Missing"')))

    def test_recursive_type(self):
        schema = SIMPLE + '''
      <s:complexType name="Node"><s:sequence>
        <s:element name="next" type="tns:Node" minOccurs="0"/>
      </s:sequence></s:complexType>'''
        with pytest.raises(RecursiveType):
            parse_wsdl(wsdl(schema))

    def test_extension_merges_base_children(self):
        schema = SIMPLE + '''
      <s:complexType name="Base"><s:sequence><s:element name="x" type="s:int"/></s:sequence>
      </s:complexType>
      <s:complexType name="Derived"><s:complexContent><s:extension base="tns:Base">
        <s:sequence><s:element name="y" type="s:int"/></s:sequence>
      </s:extension></s:complexContent></s:complexType>'''
        derived = parse_wsdl(wsdl(schema)).schema.complex_types[QName('urn:t', 'Derived')]
        assert [c.name for c in derived.children] == ['x', 'y']

    def test_wsdl2_rejected(self):
        with pytest.raises(UnsupportedWsdl):
            parse_wsdl('<description xmlns="http://www.w3.org/ns/wsdl"/>')

    def test_not_wsdl_rejected(self):
        with pytest.raises(UnsupportedWsdl):
            parse_wsdl('<html/>')

    def test_malformed_is_wsdl_error(self):
        with pytest.raises(MalformedXml):
            parse_wsdl('<definitions')

    def test_rpc_wrapper(self, fixture_text):
        model = parse_wsdl(fixture_text('rpc.wsdl'))
        add = model.operation('add')
        assert add.style == 'rpc-literal'
        assert add.input_element == QName('urn:arith', 'add')
        assert add.output_element == QName('urn:arith', 'addResponse')
        wrapper = model.schema.elements[add.input_element]
        children = model.schema.complex_types[wrapper.type_ref].children
        assert [c.name for c in children] == ['a', 'b']
        assert not any(c.qualified for c in children)

    def test_import_fetched_once_and_cycle(self):
        imported = ('<s:schema xmlns:s="http://www.w3.org/2001/XMLSchema" '
                    'targetNamespace="urn:t"><s:element name="extra" type="s:int"/>'
                    '<s:include schemaLocation="%s"/></s:schema>')
        calls = []

        def fetch(url):
            calls.append(url)
            return imported % 'other.xsd' if url.endswith('types.xsd') else imported % 'types.xsd'

        schema = SIMPLE + '<s:include schemaLocation="types.xsd"/>'
        with pytest.raises(ImportCycle):
            parse_wsdl(wsdl(schema), base_url='http://svc.test/x.wsdl', fetch=fetch)

        calls.clear()

        def fetch_once(url):
            calls.append(url)
            return ('<s:schema xmlns:s="http://www.w3.org/2001/XMLSchema" '
                    'targetNamespace="urn:t"><s:element name="extra" type="s:int"/></s:schema>')

        model = parse_wsdl(wsdl(schema + '<s:include schemaLocation="types.xsd"/>'),
                           base_url='http://svc.test/x.wsdl', fetch=fetch_once)
        assert QName('urn:t', 'extra') in model.schema.elements
        assert calls == ['http://svc.test/types.xsd']

    def test_relative_endpoint_resolved_against_base(self):
        text = wsdl(SIMPLE).replace('http://svc.test/endpoint', '/ep')
        assert parse_wsdl(text, base_url='http://h.test/a?WSDL').endpoint_url == 'http://h.test/ep'
