import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from wsdlprop.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, EXIT_WSDL, main, resolve_source
from wsdlprop.codec import Fault
from wsdlprop.generate import TupleV, chars, iter_shrink_candidates, text_of
from wsdlprop.ir import lower_element
from wsdlprop.mocks import MockService, delete_service, fake_endpoint
from wsdlprop.runner import (Aborted, Failed, Passed, RunConfig, _Property, derive_seed,
                             report_json, response_check, run_property)
from wsdlprop.transport import FakeEndpoint

from conftest import FIXTURES


def run(url, ep, **kw):
    out = io.StringIO()
    reports = response_check(url, ep, RunConfig(**kw), out=out)
    return reports, out.getvalue()


def test_derive_seed_spreads_and_repeats():
    seeds = [derive_seed(7, i) for i in range(1, 1001)]
    assert len(set(seeds)) == 1000
    assert seeds == [derive_seed(7, i) for i in range(1, 1001)]
    assert all(0 <= s < 2 ** 64 for s in seeds)
    assert derive_seed(2 ** 64 - 1, 3) != derive_seed(0, 3)


@pytest.mark.parametrize('kw', [dict(num_tests=0), dict(max_size=0), dict(seed=-1),
                                dict(seed=2 ** 64)])
def test_run_config_rejects(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw)


def test_entropy_seed_is_resolved_once():
    cfg = RunConfig().resolved()
    assert cfg.seed is not None and cfg.resolved() is cfg


def test_same_seed_same_transcript():
    ep, urls = fake_endpoint('delete')
    a = run(urls['delete'], ep, seed=99)
    b = run(urls['delete'], ep, seed=99)
    assert a == b
    assert a[1].startswith('Seed: 99\nTesting property: prop_delete_responds\n')


def test_passing_service_and_request_count():
    ep, urls = fake_endpoint('convertcooking')
    reports, text = run(urls['convertcooking'], ep, seed=5, num_tests=30)
    assert reports == [('ChangeCookingUnit', Passed(30))]
    assert text.endswith('.' * 30 + '\nOK: Passed 30 test(s).\n')
    assert len(ep.requests) == 30


def test_check_output_type_flags_bad_replies():
    def liar(op_name, value):
        return TupleV((('deleteReturn', chars('fine')),))

    service = delete_service()
    service.handler = liar
    ep = FakeEndpoint({service.endpoint_url: service})
    assert run(service.wsdl_url, ep, seed=1, check_output_type=True)[0][0][1] == Passed(100)

    class Truncating(MockService):
        def handle(self, soap_action, document):
            reply = super().handle(soap_action, document)
            return type(reply)(reply.status, reply.body.replace('deleteReturn', 'junk'))

    bad = Truncating(service.wsdl_document, liar)
    ep = FakeEndpoint({bad.endpoint_url: bad})
    loose, _ = run(bad.wsdl_url, ep, seed=1)
    assert loose[0][1] == Passed(100)
    strict, _ = run(bad.wsdl_url, ep, seed=1, check_output_type=True)
    assert isinstance(strict[0][1], Failed)
    assert 'declared output type' in strict[0][1].reason


def test_mixed_service_aborts_one_operation():
    url, ep = resolve_source(str(FIXTURES / 'mixed.wsdl'), 1.0)
    reports, text = run(url, ep, seed=3, num_tests=5)
    names = dict(reports)
    assert isinstance(names['nextHoliday'], Aborted)
    assert 'UnsupportedBuiltin' in names['nextHoliday'].reason
    # the second operation is attempted; its endpoint does not exist
    assert isinstance(names['daysInYear'], Failed)
    assert 'transport error' in names['daysInYear'].reason


def test_operation_filter():
    ep, urls = fake_endpoint('delete')
    reports, _ = run(urls['delete'], ep, seed=1, operation_filter='nope')
    assert reports == []


def test_report_json_fields():
    ep, urls = fake_endpoint('delete')
    reports, _ = run(urls['delete'], ep, seed=1)
    (entry,) = report_json(reports, 1)
    assert entry['status'] == 'failed' and entry['seed'] == 1
    assert entry['shrunk'] == {'in': [], 'c': []}
    assert entry['shrunk_text'] == '[[],[]]'
    assert report_json([('x', Aborted('why'))], 2) == [
        {'operation': 'x', 'seed': 2, 'status': 'aborted', 'reason': 'why'}]
    json.dumps(report_json(reports, 1))


def _fussy(op_name, value):
    """Rejects any input holding a character above 'm' together with a non-empty c."""
    if any(ch > 'm' for ch in text_of(value['in'])) and text_of(value['c']):
        return Fault('soap:Server', 'fussy')
    return TupleV((('deleteReturn', chars('')),))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 64 - 1))
def test_shrunk_counterexample_is_locally_minimal(seed):
    """No single shrink step from the reported value still fails."""
    service = delete_service()
    service.handler = _fussy
    ep = FakeEndpoint({service.endpoint_url: service})
    model = service.model
    op = model.operations[0]
    named = lower_element(model.schema, op.input_element, 1)
    report = run_property(model, op, named, ep, RunConfig(seed=seed), out=io.StringIO())
    if not isinstance(report, Failed):
        return
    prop = _Property(model, op, named, ep, False)
    assert prop.verdict(report.shrunk) is not None
    for candidate in iter_shrink_candidates(named.ir, report.shrunk):
        assert prop.verdict(candidate) is None
    # one character in each field, the character being exactly 'n'
    assert text_of(report.shrunk['in']) == 'n' and len(text_of(report.shrunk['c'])) == 1


# -- command line -------------------------------------------------------------------

def test_cli_exit_codes(tmp_path, capsys):
    assert main(['check', 'mock://convertcooking', '--seed', '4', '--tests', '10']) == EXIT_OK
    assert main(['check', 'mock://delete', '--seed', '4']) == EXIT_FAILED
    assert main(['check', 'mock://delete', '--tests', '0']) == EXIT_USAGE
    assert main(['check', 'mock://delete', '--op', 'nope', '--seed', '1']) == EXIT_USAGE
    assert main(['frobnicate']) == EXIT_USAGE
    assert main(['check', str(tmp_path / 'missing.wsdl')]) == EXIT_WSDL
    assert main(['check', 'mock://nosuch']) in (EXIT_USAGE, EXIT_WSDL)
    bad = tmp_path / 'bad.genspec'
    bad.write_text('gen delete_1_c = int(3, 1)\n')
    assert main(['check', 'mock://delete', '--genspec', str(bad)]) == EXIT_USAGE
    assert main(['check', 'mock://delete', '--genspec', str(tmp_path / 'x')]) == EXIT_USAGE
    capsys.readouterr()


def test_cli_json_goes_to_stdout(capsys):
    assert main(['check', 'mock://delete', '--seed', '8', '--json']) == EXIT_FAILED
    captured = capsys.readouterr()
    (entry,) = json.loads(captured.out)
    assert entry['operation'] == 'delete'
    assert 'Seed: 8' in captured.err


def test_generated_file_reproduces_plain_check(tmp_path, capsys):
    target = tmp_path / 'gen.genspec'
    emitted = tmp_path / 'emitted.genspec'
    assert main(['generate', 'mock://placeorder', '-o', str(target)]) == EXIT_OK
    capsys.readouterr()
    plain = main(['check', 'mock://placeorder', '--seed', '31', '--emit-genspec', str(emitted)])
    plain_out = capsys.readouterr().out
    assert target.read_text() == emitted.read_text()
    again = main(['check', 'mock://placeorder', '--seed', '31', '--genspec', str(target)])
    assert again == plain
    assert capsys.readouterr().out == plain_out


def test_cli_reads_local_utf16_file(tmp_path, capsys):
    source = (FIXTURES / 'rpc.wsdl').read_text(encoding='utf-8')
    source = source.replace('encoding="utf-8"', 'encoding="utf-16"')
    path = tmp_path / 'rpc16.wsdl'
    path.write_bytes(source.encode('utf-16'))
    out = tmp_path / 'rpc.genspec'
    assert main(['generate', str(path), '-o', str(out)]) == EXIT_OK
    assert 'operation add' in out.read_text()
    capsys.readouterr()
