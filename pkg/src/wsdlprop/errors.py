"""Exception hierarchy shared by all wsdlprop modules."""


class WsdlPropError(Exception):
    """Base class for every error raised by wsdlprop."""


# schema model

class WsdlError(WsdlPropError):
    pass


class MalformedXml(WsdlError):
    pass


class UnsupportedWsdl(WsdlError):
    pass


class UnresolvedReference(WsdlError):
    pass


class RecursiveType(UnresolvedReference):
    """A complex type can reach itself through its children."""


class ImportCycle(WsdlError):
    pass


# lowering

class LoweringError(WsdlPropError):
    pass


class UnsupportedBuiltin(LoweringError):
    pass


class UnsupportedFacet(LoweringError):
    pass


class UnsupportedConstruct(LoweringError):
    pass


class ContradictoryFacets(LoweringError):
    pass


# generator spec files

class GenSpecError(WsdlPropError):
    pass


class GenSpecSyntaxError(GenSpecError):
    def __init__(self, message, line):
        super().__init__('line %d: %s' % (line, message))
        self.line = line


class UnknownName(GenSpecError):
    pass


class CycleError(GenSpecError):
    pass


# generation / encoding

class ContradictoryRange(WsdlPropError):
    pass


class ShapeMismatch(WsdlPropError):
    pass


# transport

class TransportError(WsdlPropError):
    pass


class Timeout(TransportError):
    pass


class ConnectionFailed(TransportError):
    pass


class HttpError(TransportError):
    def __init__(self, status, message=''):
        super().__init__('HTTP %d %s' % (status, message))
        self.status = status
