import pytest

from wsdlprop.codec import (DecodeError, Fault, Malformed, Ok, decode_request, decode_response,
                            decode_value, encode_element, encode_request, envelope,
                            fault_envelope, fits, relax_strings, validate_response_type)
from wsdlprop.errors import ShapeMismatch
from wsdlprop.generate import (BoolV, ChoiceV, FloatV, IntV, ListV, TextV, TupleV, chars,
                               conforms)
from wsdlprop.ir import (BOOLEAN, FLOAT, INTEGER, ChoiceOf, Enumeration, ListOf, NamedIR, Scalar,
                         TupleOf, builtin_ir, lower_element)
from wsdlprop.mocks import MOCKS
from wsdlprop.schema import parse_wsdl
from wsdlprop.xmlutil import XSD_NS, QName, parse_element

STRING = builtin_ir(QName(XSD_NS, 'string'))


def delete_parts():
    model = MOCKS['delete'][0]().model
    op = model.operations[0]
    return model, op, lower_element(model.schema, op.input_element, 1)


def test_request_envelope_layout():
    model, op, named = delete_parts()
    text = encode_request(op, model.schema, named, TupleV((('in', chars('a<&>"')),
                                                           ('c', chars('')))))
    assert text.startswith('<?xml version="1.0" encoding="utf-8"?>\n<soap:Envelope')
    assert '<ns0:delete xmlns:ns0="http://delete"><in>a&lt;&amp;&gt;"</in><c></c></ns0:delete>' \
        in text
    assert decode_request(text, named) == TupleV((('in', chars('a<&>"')), ('c', chars(''))))


def test_carriage_return_survives():
    named = NamedIR('s', namespace='urn:x', ir=STRING)
    v = chars('a\r\nb\rc\t')
    assert decode_value(named, parse_element(encode_element(named, v))) == v


def test_repeated_and_optional_elements_unroll():
    ir = TupleOf((NamedIR('x', namespace='urn:x', ir=ListOf(0, None, Scalar(INTEGER))),
                  NamedIR('y', namespace='urn:x', ir=ListOf(0, 1, STRING), qualified=False),
                  NamedIR('z', namespace='urn:x', ir=Scalar(BOOLEAN))))
    named = NamedIR('root', namespace='urn:x', ir=ir)
    v = TupleV((('x', ListV((IntV(1), IntV(-2)))), ('y', ListV(())), ('z', BoolV(True))))
    xml = encode_element(named, v)
    assert xml == ('<ns0:root xmlns:ns0="urn:x"><ns0:x>1</ns0:x><ns0:x>-2</ns0:x>'
                   '<ns0:z>true</ns0:z></ns0:root>')
    assert decode_value(named, parse_element(xml)) == v


def test_choice_and_enum_round_trip():
    ir = ChoiceOf((NamedIR('n', ir=Scalar(FLOAT)), NamedIR('e', ir=Enumeration(('Äpfel', 'b')))))
    named = NamedIR('r', ir=ir)
    for v in (ChoiceV(0, FloatV(-1.5e-300)), ChoiceV(1, TextV('Äpfel'))):
        assert decode_value(named, parse_element(encode_element(named, v))) == v


def test_shape_mismatch():
    _, _, named = delete_parts()
    with pytest.raises(ShapeMismatch):
        encode_element(named, TupleV((('in', IntV(3)), ('c', chars('')))))
    assert not fits(Scalar(FLOAT), FloatV(float('nan')))
    assert fits(STRING, ListV((IntV(0x1F600),)))
    assert not fits(STRING, ListV((IntV(0),)))


def test_decode_response_kinds():
    ok = decode_response(envelope('<r xmlns="urn:x">1</r>'))
    assert isinstance(ok, Ok) and ok.body_element.tag == '{urn:x}r'
    assert decode_response(envelope('')) == Ok(None)
    fault = decode_response(fault_envelope('soap:Server', 'boom & bust', 'trace'))
    assert fault == Fault('soap:Server', 'boom & bust', 'trace')
    assert isinstance(decode_response('<html>502 Bad Gateway</html>'), Malformed)
    assert isinstance(decode_response(b'\xff\xfe\x00garbage'), Malformed)
    assert isinstance(decode_response(''), Malformed)
    # a Fault outside the SOAP 1.1 namespace is ordinary payload
    other = decode_response(envelope('<Fault xmlns="urn:not-soap"/>'))
    assert isinstance(other, Ok)


def test_decode_errors():
    named = NamedIR('t', ir=TupleOf((NamedIR('a', ir=Scalar(INTEGER)),)))
    for xml in ('<t><a>x</a></t>', '<t/>', '<t><a>1</a><b/></t>', '<u><a>1</a></u>',
                '<t><a><deep/></a></t>'):
        with pytest.raises(DecodeError):
            decode_value(named, parse_element(xml))


def test_relax_strings_accepts_any_unicode():
    ir = TupleOf((NamedIR('s', ir=STRING),))
    v = TupleV((('s', chars('日本')),))
    assert not conforms(ir, v)
    assert conforms(relax_strings(ir), v)


def test_validate_response_type():
    model = MOCKS['delete'][0]().model
    op = model.operations[0]
    good = decode_response(envelope('<d:deleteResponse xmlns:d="http://delete">'
                                    '<deleteReturn>ok ünïcode</deleteReturn></d:deleteResponse>'))
    assert validate_response_type(op, model.schema, good)
    wrong_name = decode_response(envelope('<d:other xmlns:d="http://delete"/>'))
    assert not validate_response_type(op, model.schema, wrong_name)
    missing = decode_response(envelope('<d:deleteResponse xmlns:d="http://delete"/>'))
    assert not validate_response_type(op, model.schema, missing)
    assert not validate_response_type(op, model.schema, Fault('c', 's', None))


def test_rpc_request_children_unqualified(fixture_text):
    model = parse_wsdl(fixture_text('rpc.wsdl'))
    op = model.operation('add')
    named = lower_element(model.schema, op.input_element, 1)
    xml = encode_request(op, model.schema, named, TupleV((('a', IntV(-3)), ('b', IntV(7)))))
    assert '<ns0:add xmlns:ns0="urn:arith"><a>-3</a><b>7</b></ns0:add>' in xml
