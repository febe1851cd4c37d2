"""Command line entry point: ``wsdlprop generate|check|serve-mock``.

Exit codes: 0 when every selected operation passed, 1 when a property
failed (or a run was aborted), 2 for usage and generator-spec errors,
3 when the WSDL could not be fetched or understood.
"""
import argparse
import json
import sys
from typing import List, Optional, Tuple
from urllib.parse import urlsplit

from . import genspec
from .errors import (ConnectionFailed, GenSpecError, LoweringError, TransportError,
                     UnresolvedReference, WsdlError)
from .ir import lower_element
from .mocks import MOCKS, MockServer, fake_endpoint
from .runner import Passed, RunConfig, report_json, response_check
from .schema import parse_wsdl
from .transport import Endpoint, HttpEndpoint, HttpReply

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_WSDL = 0, 1, 2, 3


class _LocalFiles(Endpoint):
    """Reads WSDL and schema files from disk, but still posts over HTTP."""

    def __init__(self, http: HttpEndpoint):
        self.http = http

    def fetch(self, url: str) -> str:
        if urlsplit(url).scheme in ('http', 'https'):
            return self.http.fetch(url)
        try:
            with open(url, 'rb') as fh:
                raw = fh.read()
        except OSError as exc:
            raise ConnectionFailed('cannot read %s: %s' % (url, exc.strerror)) from None
        return raw.decode('utf-8') if not raw.startswith((b'\xff\xfe', b'\xfe\xff')) \
            else raw.decode('utf-16')

    def post_soap(self, url: str, soap_action: str, envelope: str) -> HttpReply:
        return self.http.post_soap(url, soap_action, envelope)


def resolve_source(source: str, timeout: float) -> Tuple[str, Endpoint]:
    """Map a command-line WSDL argument to ``(url, endpoint)``.

    ``mock://<name>`` dispatches in-process to a bundled mock, http(s)
    URLs go over the network, anything else is a local file.
    """
    parts = urlsplit(source)
    if parts.scheme == 'mock':
        name = parts.netloc or parts.path.strip('/')
        if name not in MOCKS:
            raise ValueError('unknown mock %r (choose from %s)' % (name, ', '.join(MOCKS)))
        ep, urls = fake_endpoint(name)
        return urls[name], ep
    http = HttpEndpoint(timeout=timeout)
    if parts.scheme in ('http', 'https'):
        return source, http
    return source, _LocalFiles(http)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wsdlprop',
        description='Property-based testing of SOAP services from their WSDL.')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', help='write the derived generator spec file')
    gen.add_argument('wsdl', help='WSDL URL, file path, or mock://<name>')
    gen.add_argument('-o', '--out', default=genspec.DEFAULT_FILENAME)
    gen.add_argument('--timeout', type=float, default=30.0)

    check = sub.add_parser('check', help='test that every operation responds without faults')
    check.add_argument('wsdl', help='WSDL URL, file path, or mock://<name>')
    check.add_argument('--genspec', help='generator overrides to merge over the derived spec')
    check.add_argument('--op', help='only test this operation')
    check.add_argument('--tests', type=int, default=100)
    check.add_argument('--seed', type=int)
    check.add_argument('--max-size', type=int, default=42)
    check.add_argument('--check-output-type', action='store_true',
                       help='also require responses to match the declared output type')
    check.add_argument('--json', action='store_true',
                       help='JSON report on stdout; progress moves to stderr')
    check.add_argument('--emit-genspec', metavar='PATH',
                       help='also write the derived generator spec here')
    check.add_argument('--timeout', type=float, default=30.0)

    serve = sub.add_parser('serve-mock', help='serve a bundled mock over local HTTP')
    serve.add_argument('service', choices=sorted(MOCKS))
    serve.add_argument('--port', type=int, default=8080)
    serve.add_argument('--host', default='127.0.0.1')
    return parser


def _fail(code: int, message: str) -> int:
    print('wsdlprop: %s' % message, file=sys.stderr)
    return code


def _generate(args) -> int:
    url, ep = resolve_source(args.wsdl, args.timeout)
    model = parse_wsdl(ep.fetch(url), base_url=url, fetch=ep.fetch)
    lowered = {}
    for op in model.operations:
        try:
            lowered[op.name] = (lower_element(model.schema, op.input_element, 1),
                                lower_element(model.schema, op.output_element, 1))
        except (LoweringError, UnresolvedReference) as exc:
            print('wsdlprop: skipping %s: %s' % (op.name, exc), file=sys.stderr)
    with open(args.out, 'w', encoding='utf-8') as fh:
        fh.write(genspec.emit(model, lowered))
    print('wrote generators for %d operation(s) to %s' % (len(lowered), args.out))
    return EXIT_OK


def _check(args) -> int:
    try:
        cfg = RunConfig(num_tests=args.tests, seed=args.seed, max_size=args.max_size,
                        check_output_type=args.check_output_type,
                        operation_filter=args.op).resolved()
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    overrides = None
    if args.genspec:
        try:
            with open(args.genspec, encoding='utf-8') as fh:
                overrides = genspec.parse(fh.read(), partial=True)
        except OSError as exc:
            return _fail(EXIT_USAGE, 'cannot read %s: %s' % (args.genspec, exc.strerror))
    url, ep = resolve_source(args.wsdl, args.timeout)
    out = sys.stderr if args.json else sys.stdout
    reports = response_check(url, ep, cfg, overrides=overrides, emit_to=args.emit_genspec,
                             out=out)
    if not reports:
        return _fail(EXIT_USAGE, 'no operation named %r' % args.op if args.op
                     else 'the service declares no testable operations')
    if args.json:
        json.dump(report_json(reports, cfg.seed), sys.stdout, indent=2)
        sys.stdout.write('\n')
    return EXIT_OK if all(isinstance(r, Passed) for _, r in reports) else EXIT_FAILED


def _serve(args) -> int:
    server = MockServer(args.service, args.port, args.host)
    print('serving %s, WSDL at %s' % (args.service, server.wsdl_url), flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.httpd.server_close()
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == 'generate':
            return _generate(args)
        if args.command == 'check':
            return _check(args)
        return _serve(args)
    except GenSpecError as exc:
        return _fail(EXIT_USAGE, 'generator spec: %s' % exc)
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (WsdlError, TransportError) as exc:
        return _fail(EXIT_WSDL, '%s: %s' % (type(exc).__name__, exc))
    except OSError as exc:
        return _fail(EXIT_WSDL, str(exc))


if __name__ == '__main__':
    sys.exit(main())
