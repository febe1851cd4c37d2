"""HTTP transport for SOAP calls and WSDL retrieval, plus an in-process fake."""
import re
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Dict, Optional
from urllib.parse import urlsplit

from .errors import ConnectionFailed, HttpError, Timeout

DEFAULT_TIMEOUT = 30.0
MAX_REDIRECTS = 5
CONTENT_TYPE = 'text/xml; charset=utf-8'

_CHARSET_RE = re.compile(r'charset\s*=\s*"?([\w.:-]+)', re.I)
_DECL_RE = re.compile(rb'^\s*<\?xml[^>]*?encoding\s*=\s*["\']([A-Za-z0-9._-]+)["\']')


@dataclass(frozen=True)
class HttpReply:
    status: int
    body: str

    def __post_init__(self):
        if not 100 <= self.status <= 599:
            raise ValueError('bad HTTP status %r' % self.status)


def _decode(raw: bytes, content_type: Optional[str]) -> str:
    charset = None
    if content_type:
        m = _CHARSET_RE.search(content_type)
        if m:
            charset = m.group(1)
    if charset is None:
        if raw.startswith((b'\xff\xfe', b'\xfe\xff')):
            charset = 'utf-16'
        else:
            m = _DECL_RE.match(raw)
            charset = m.group(1).decode('ascii') if m else 'utf-8'
    try:
        return raw.decode(charset, 'replace')
    except LookupError:
        return raw.decode('utf-8', 'replace')


class Endpoint:
    """Where WSDL documents come from and SOAP envelopes go to."""

    def fetch(self, url: str) -> str:
        raise NotImplementedError

    def post_soap(self, url: str, soap_action: str, envelope: str) -> HttpReply:
        raise NotImplementedError


def soap_headers(soap_action: str) -> Dict[str, str]:
    return {'Content-Type': CONTENT_TYPE, 'SOAPAction': '"%s"' % soap_action}


class _LimitedRedirects(urllib.request.HTTPRedirectHandler):
    max_redirections = MAX_REDIRECTS


class _NoRedirects(urllib.request.HTTPRedirectHandler):
    def redirect_request(self, req, fp, code, msg, headers, newurl):
        return None


class HttpEndpoint(Endpoint):
    """Real HTTP/1.1 over urllib.  No retries, ever."""

    def __init__(self, timeout: float = DEFAULT_TIMEOUT):
        self.timeout = timeout
        self._fetcher = urllib.request.build_opener(_LimitedRedirects)
        self._poster = urllib.request.build_opener(_NoRedirects)

    def _open(self, opener, request):
        try:
            response = opener.open(request, timeout=self.timeout)
        except urllib.error.HTTPError as err:
            return err.code, err.read(), err.headers.get('Content-Type')
        except urllib.error.URLError as err:
            if isinstance(err.reason, socket.timeout):
                raise Timeout('timed out after %ss: %s' % (self.timeout, request.full_url)) from None
            raise ConnectionFailed('%s: %s' % (request.full_url, err.reason)) from None
        except socket.timeout:
            raise Timeout('timed out after %ss: %s' % (self.timeout, request.full_url)) from None
        except (OSError, ValueError) as err:
            raise ConnectionFailed('%s: %s' % (request.full_url, err)) from None
        with response:
            try:
                raw = response.read()
            except socket.timeout:
                raise Timeout('timed out reading %s' % request.full_url) from None
            return response.status, raw, response.headers.get('Content-Type')

    def fetch(self, url: str) -> str:
        status, raw, ctype = self._open(self._fetcher, urllib.request.Request(url))
        if not 200 <= status < 300:
            raise HttpError(status, url)
        return _decode(raw, ctype)

    def post_soap(self, url: str, soap_action: str, envelope: str) -> HttpReply:
        request = urllib.request.Request(url, data=envelope.encode('utf-8'),
                                         headers=soap_headers(soap_action), method='POST')
        status, raw, ctype = self._open(self._poster, request)
        return HttpReply(status, _decode(raw, ctype))


def _service_key(url: str):
    parts = urlsplit(url)
    return parts.netloc.lower(), parts.path


class FakeEndpoint(Endpoint):
    """Dispatches in-process to mock services, keyed by host and path.

    A service is anything with ``wsdl_document`` and
    ``handle(soap_action, envelope) -> HttpReply``.
    """

    def __init__(self, services: Optional[dict] = None):
        self._services = {}
        self.requests = []
        for url, service in (services or {}).items():
            self.mount(url, service)

    def mount(self, url: str, service) -> None:
        self._services[_service_key(url)] = service

    def _lookup(self, url: str):
        service = self._services.get(_service_key(url))
        if service is None:
            raise ConnectionFailed('no service at %s' % url)
        return service

    def fetch(self, url: str) -> str:
        service = self._lookup(url)
        if urlsplit(url).query.lower() != 'wsdl':
            raise HttpError(404, url)
        return service.wsdl_document

    def post_soap(self, url: str, soap_action: str, envelope: str) -> HttpReply:
        self.requests.append((url, soap_headers(soap_action), envelope))
        return self._lookup(url).handle(soap_action, envelope)
