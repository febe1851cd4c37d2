import math

import pytest

from wsdlprop.errors import (ContradictoryFacets, ContradictoryRange, UnsupportedBuiltin,
                             UnsupportedConstruct, UnsupportedFacet)
from wsdlprop.generate import (BoolV, ChoiceV, FloatV, GenContext, IntV, ListV, TextV, TupleV,
                               chars, conforms, format_value, generate, minimal, shrink,
                               shrink_candidates, size_for_test, size_key, text_of, to_json)
from wsdlprop.ir import (AS_TEXT, BOOLEAN, FLOAT, INTEGER, ChoiceOf, Enumeration, ListOf,
                         NamedIR, Scalar, TupleOf, builtin_ir, leaves, lower_element, path_id, walk)
from wsdlprop.schema import parse_wsdl
from wsdlprop.xmlutil import XSD_NS, QName

from test_xml_schema import SIMPLE, wsdl


def lower_simple(restriction):
    schema = SIMPLE.replace('type="s:int"', 'type="tns:T"') + \
        '<s:simpleType name="T">%s</s:simpleType>' % restriction
    model = parse_wsdl(wsdl(schema))
    return lower_element(model.schema, QName('urn:t', 'req'), 1).ir.fields[0].ir


class TestLowering:
    def test_unsupported_builtin(self):
        for name in ('date', 'dateTime', 'base64Binary', 'anyType', 'QName'):
            with pytest.raises(UnsupportedBuiltin):
                builtin_ir(QName(XSD_NS, name))

    def test_integer_facets_intersect(self):
        ir = lower_simple('<s:restriction base="s:byte"><s:minExclusive value="-5"/>'
                          '<s:maxInclusive value="1000"/></s:restriction>')
        assert ir == Scalar(INTEGER, -4, 127, AS_TEXT)

    def test_fractional_integer_bounds_round_inward(self):
        ir = lower_simple('<s:restriction base="s:integer"><s:minInclusive value="1.5"/>'
                          '<s:maxExclusive value="4"/></s:restriction>')
        assert (ir.min, ir.max) == (2, 3)

    def test_float_exclusive_bounds_stay_open(self):
        ir = lower_simple('<s:restriction base="s:double"><s:minExclusive value="0"/>'
                          '<s:maxExclusive value="1"/></s:restriction>')
        assert ir == Scalar(FLOAT, 0.0, 1.0, AS_TEXT, True, True)

    def test_contradictory(self):
        with pytest.raises(ContradictoryFacets):
            lower_simple('<s:restriction base="s:int"><s:minInclusive value="5"/>'
                         '<s:maxExclusive value="5"/></s:restriction>')
        with pytest.raises(ContradictoryFacets):
            lower_simple('<s:restriction base="s:string"><s:minLength value="5"/>'
                         '<s:maxLength value="2"/></s:restriction>')

    def test_pattern_unsupported(self):
        with pytest.raises(UnsupportedFacet):
            lower_simple('<s:restriction base="s:string"><s:pattern value="[a-z]+"/>'
                         '</s:restriction>')

    def test_list_and_union_unsupported(self):
        with pytest.raises(UnsupportedConstruct):
            lower_simple('<s:list itemType="s:int"/>')

    def test_string_length_facets(self):
        ir = lower_simple('<s:restriction base="s:string"><s:length value="3"/></s:restriction>')
        assert (ir.min_len, ir.max_len) == (3, 3) and ir.is_string

    def test_enumeration_over_int_base(self):
        ir = lower_simple('<s:restriction base="s:int"><s:enumeration value="1"/>'
                          '<s:enumeration value="7"/></s:restriction>')
        assert ir == Enumeration(('1', '7'))

    def test_choice_and_paths(self, fixture_text):
        model = parse_wsdl(fixture_text('shapes.wsdl'))
        draw = lower_element(model.schema, QName('urn:shapes', 'draw'), 1)
        shape = draw.ir.fields[0]
        assert isinstance(shape.ir, ListOf) and isinstance(shape.ir.inner, ChoiceOf)
        circle = shape.ir.inner.alternatives[0]
        assert path_id(circle) == 'draw_1_shape_Shape_circle'
        names = [path_id(n) for n in walk(draw)]
        assert 'draw_1_shape_Shape_marker_Point3_z' in names
        assert len(list(leaves(draw.ir))) == 13


class TestGenerate:
    def test_size_schedule(self):
        assert [size_for_test(i) for i in (1, 2, 41, 42, 43, 100)] == [1, 2, 41, 42, 42, 42]

    def test_deterministic(self):
        ir = TupleOf((NamedIR('a', ir=ListOf(0, None, Scalar(INTEGER))),
                      NamedIR('b', ir=Scalar(FLOAT, -1.0, 1.0))))
        assert generate(ir, GenContext(9, 30)) == generate(ir, GenContext(9, 30))

    def test_unbounded_integers_scale_with_size(self):
        ir = Scalar(INTEGER)
        values = {generate(ir, GenContext(s, 1)).value for s in range(500)}
        assert values <= set(range(-8, 9))

    def test_window_anchored_at_far_bound(self):
        ir = Scalar(INTEGER, 10 ** 6, None)
        for s in range(100):
            assert 10 ** 6 <= generate(ir, GenContext(s, 3)).value <= 10 ** 6 + 24

    def test_list_length_at_size_one(self):
        ir = ListOf(0, None, Scalar(INTEGER))
        lengths = [len(generate(ir, GenContext(s, 1)).items) for s in range(4000)]
        assert set(lengths) == {0, 1}
        assert abs(lengths.count(0) / 4000 - 0.5) < 0.05

    def test_open_float_never_hits_bound(self):
        ir = Scalar(FLOAT, 0.0, 1.0, min_open=True, max_open=True)
        for s in range(2000):
            x = generate(ir, GenContext(s, 5)).value
            assert 0.0 < x < 1.0

    def test_contradictory_float_range(self):
        tiny = math.nextafter(0.0, 1.0)
        with pytest.raises(ContradictoryRange):
            for s in range(50):
                generate(Scalar(FLOAT, 0.0, tiny, min_open=True, max_open=True),
                         GenContext(s, 1))

    def test_string_values_are_printable(self):
        ir = builtin_ir(QName(XSD_NS, 'string'))
        for s in range(200):
            assert all(32 <= c.value <= 127 for c in generate(ir, GenContext(s, 42)).items)

    def test_conforms_rejects(self):
        assert not conforms(Scalar(INTEGER, 0, 5), IntV(6))
        assert not conforms(Scalar(INTEGER), IntV(True))
        assert not conforms(Scalar(FLOAT, 0.0, 1.0, min_open=True), FloatV(0.0))
        assert not conforms(Enumeration(('a',)), TextV('b'))
        assert not conforms(ListOf(1, 2, Scalar(INTEGER)), ListV(()))
        assert not conforms(TupleOf((NamedIR('a', ir=Scalar(INTEGER)),)),
                            TupleV((('b', IntV(1)),)))
        assert not conforms(ChoiceOf((NamedIR('a', ir=Scalar(INTEGER)),)), ChoiceV(1, IntV(0)))


class TestShrink:
    def test_integer_halving_sequence(self):
        cands = [c.value for c in shrink_candidates(Scalar(INTEGER), IntV(37))]
        assert cands[:4] == [0, 19, 28, 33]
        assert cands[-1] == 36

    def test_negative_prefers_positive_mirror(self):
        assert shrink_candidates(Scalar(INTEGER), IntV(-5))[1] == IntV(5)
        assert size_key(Scalar(INTEGER), IntV(5)) < size_key(Scalar(INTEGER), IntV(-5))

    def test_target_respects_bounds(self):
        assert minimal(Scalar(INTEGER, 3, 9)) == IntV(3)
        assert minimal(Scalar(INTEGER, -9, -3)) == IntV(-3)
        assert minimal(Scalar(FLOAT, 0.0, 1.0, min_open=True)).value > 0.0

    def test_minimal_has_no_candidates(self):
        ir = TupleOf((NamedIR('xs', ir=ListOf(2, None, Scalar(INTEGER, 1, None))),
                      NamedIR('e', ir=Enumeration(('p', 'q'))),
                      NamedIR('c', ir=ChoiceOf((NamedIR('l', ir=Scalar(BOOLEAN)),
                                                NamedIR('r', ir=Scalar(INTEGER))))),))
        assert shrink_candidates(ir, minimal(ir)) == []

    def test_shrink_finds_threshold(self):
        ir = ListOf(0, None, Scalar(INTEGER))
        start = ListV(tuple(IntV(v) for v in (3, 90, -4, 17)))
        shrunk, steps = shrink(ir, start, lambda v: any(i.value >= 10 for i in v.items))
        assert shrunk == ListV((IntV(10),))
        assert steps > 0

    def test_shrink_respects_step_cap(self):
        ir = Scalar(INTEGER)
        _, steps = shrink(ir, IntV(10 ** 9), lambda v: v.value > 0, max_steps=3)
        assert steps == 3


class TestPresentation:
    def test_format_like_erlang_terms(self):
        v = TupleV((('in', chars('.')), ('c', chars(''))))
        assert format_value(v) == '[[46],[]]'
        assert format_value(ChoiceV(1, BoolV(True))) == 'true'
        assert format_value(TextV('a"b')) == '"a\\"b"'

    def test_json(self):
        v = TupleV((('n', IntV(3)), ('s', chars('hi')), ('e', TextV('x'))))
        assert to_json(v) == {'n': 3, 's': [104, 105], 'e': 'x'}
        assert text_of(chars('héllo')) == 'héllo'

