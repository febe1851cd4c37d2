"""Property-based testing of SOAP web services driven by their WSDL.

The pipeline: parse a WSDL into a :class:`WsdlModel`, lower message
elements into a small type IR, derive an editable generator spec, then
generate requests, post them and shrink any failure.
"""
from .codec import (Fault, Malformed, Ok, decode_response, decode_value, encode_request,
                    validate_response_type)
from .errors import *  # noqa: F401,F403
from .generate import (BoolV, ChoiceV, FloatV, GenContext, IntV, ListV, TextV, TupleV,
                       conforms, format_value, generate, shrink, shrink_candidates)
from .genspec import GenSpec, TransformHooks, emit, merge_overrides, parse as parse_genspec, to_ir
from .ir import (ChoiceOf, Enumeration, ListOf, NamedIR, Scalar, TupleOf, builtin_ir,
                 lower_element, lower_type, path_id)
from .runner import Aborted, Failed, Passed, RunConfig, response_check, run_property
from .schema import WsdlModel, parse_wsdl
from .transport import FakeEndpoint, HttpEndpoint

__version__ = '0.1.0'
