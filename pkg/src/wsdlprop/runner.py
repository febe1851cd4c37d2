"""The auto-derived ``responds`` property and the loop that drives it.

For every operation the property is: a generated, schema-conforming
request yields a SOAP reply that is neither a Fault nor garbage.  Tests
run sequentially with growing size; the first failure is shrunk greedily
by replaying the full SOAP call for each candidate.

Seeds
-----
Test ``i`` (1-based) draws from ``derive_seed(run_seed, i)``, the SplitMix64
output function applied to ``run_seed + i * 0x9E3779B97F4A7C15`` modulo
2**64.  Any single test can therefore be replayed from the run seed and
its index alone.
"""
import os
import sys
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, TextIO, Tuple, Union

from .codec import Fault, Malformed, decode_response, encode_request, fits, validate_response_type
from .errors import (ContradictoryRange, LoweringError, ShapeMismatch, TransportError,
                     UnresolvedReference)
from .generate import GenContext, Value, format_value, generate, shrink, size_for_test, to_json
from .genspec import TransformHooks, attach_names, build, emit, merge_overrides, to_ir
from .ir import NamedIR, lower_element
from .schema import OperationDef, WsdlModel, parse_wsdl
from .transport import Endpoint

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(run_seed: int, index: int) -> int:
    z = (run_seed + index * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RunConfig:
    num_tests: int = 100
    seed: Optional[int] = None
    max_size: int = 42
    check_output_type: bool = False
    operation_filter: Optional[str] = None

    def __post_init__(self):
        if self.num_tests < 1:
            raise ValueError('num_tests must be at least 1')
        if self.max_size < 1:
            raise ValueError('max_size must be at least 1')
        if self.seed is not None and not 0 <= self.seed <= _MASK:
            raise ValueError('seed must fit in 64 bits')

    def resolved(self) -> 'RunConfig':
        """This config with a concrete seed, drawn from OS entropy if unset."""
        if self.seed is not None:
            return self
        return replace(self, seed=int.from_bytes(os.urandom(8), 'big'))


@dataclass(frozen=True)
class Passed:
    count: int


@dataclass(frozen=True)
class Failed:
    failing_test_index: int
    counterexample: Value
    shrunk: Value
    shrink_steps: int
    reason: str = ''


@dataclass(frozen=True)
class Aborted:
    reason: str


TestReport = Union[Passed, Failed, Aborted]


class _Property:
    """One operation's ``responds`` property bound to an endpoint."""

    def __init__(self, model: WsdlModel, op: OperationDef, ir: NamedIR, ep: Endpoint,
                 check_output: bool):
        self.model, self.op, self.ir, self.ep = model, op, ir, ep
        self.output = None
        if check_output:
            self.output = lower_element(model.schema, op.output_element, 1)
        self.calls = 0

    def verdict(self, v: Value) -> Optional[str]:
        """None when the call passes, otherwise why it failed."""
        if not fits(self.ir.ir, v):
            raise ShapeMismatch('generated value does not fit the input of %s' % self.op.name)
        body = encode_request(self.op, self.model.schema, self.ir, v)
        self.calls += 1
        try:
            reply = self.ep.post_soap(self.model.endpoint_url, self.op.soap_action, body)
        except TransportError as exc:
            return 'transport error: %s' % exc
        response = decode_response(reply.body)
        if isinstance(response, Fault):
            return 'SOAP fault %s: %s' % (response.fault_code, response.fault_string)
        if isinstance(response, Malformed):
            return 'malformed response (HTTP %d): %s' % (reply.status, response.reason)
        if self.output is not None and not validate_response_type(
                self.op, self.model.schema, response, self.output):
            return 'response does not match the declared output type'
        return None


def run_property(model: WsdlModel, op: OperationDef, ir: NamedIR, ep: Endpoint,
                 cfg: RunConfig, gen_ir: Optional[NamedIR] = None,
                 hooks: Optional[TransformHooks] = None,
                 out: Optional[TextIO] = None) -> TestReport:
    """Run ``num_tests`` calls of *op*; shrink and report the first failure.

    *ir* is the lowered input element and decides how values are encoded.
    *gen_ir* (defaults to *ir*) decides how they are generated and shrunk,
    which is where generator overrides come in.  A value that *ir* cannot
    encode aborts the run instead of counting as a failure.
    """
    out = out if out is not None else sys.stdout
    cfg = cfg.resolved()
    gen = gen_ir if gen_ir is not None else ir
    prop = _Property(model, op, ir, ep, cfg.check_output_type)
    transform = (lambda v: hooks.apply(gen, v)) if hooks else None
    try:
        for i in range(1, cfg.num_tests + 1):
            ctx = GenContext(derive_seed(cfg.seed, i), size_for_test(i, cfg.max_size))
            value = generate(gen, ctx, hooks)
            reason = prop.verdict(value)
            if reason is None:
                out.write('.')
                out.flush()
                continue
            out.write('!\nFailed: After %d test(s).\n%s\n\n' % (i, format_value(value)))
            shrunk, steps = shrink(gen.ir, value, lambda c: prop.verdict(c) is not None,
                                   transform=transform)
            out.write('Shrinking %s(%d time(s))\n%s\n' % ('.' * steps, steps, format_value(shrunk)))
            return Failed(i, value, shrunk, steps, prop.verdict(shrunk) or reason)
    except (ShapeMismatch, ContradictoryRange) as exc:
        out.write('\nAborted: %s\n' % exc)
        return Aborted(str(exc))
    out.write('\nOK: Passed %d test(s).\n' % cfg.num_tests)
    return Passed(cfg.num_tests)


def response_check(wsdl_url: str, ep: Endpoint, cfg: RunConfig, overrides=None,
                   hooks: Optional[TransformHooks] = None, emit_to: Optional[str] = None,
                   out: Optional[TextIO] = None) -> List[Tuple[str, TestReport]]:
    """Fetch a WSDL, derive generators and test every operation's ``responds`` property.

    *overrides* is a partially parsed GenSpec merged over the derived one;
    merge errors propagate since they are the caller's mistake.  When
    *emit_to* is given the derived (not merged) spec is written there.
    Reports come back in declaration order.  Operations that cannot be
    lowered are reported as Aborted.
    """
    out = out if out is not None else sys.stdout
    cfg = cfg.resolved()
    model = parse_wsdl(ep.fetch(wsdl_url), base_url=wsdl_url, fetch=ep.fetch)
    lowered, aborted = {}, {}
    for op in model.operations:
        try:
            lowered[op.name] = (lower_element(model.schema, op.input_element, 1),
                                lower_element(model.schema, op.output_element, 1))
        except (LoweringError, UnresolvedReference) as exc:
            aborted[op.name] = '%s: %s' % (type(exc).__name__, exc)
    if emit_to is not None:
        with open(emit_to, 'w', encoding='utf-8') as fh:
            fh.write(emit(model, lowered))
    spec = build(lowered)
    if overrides is not None:
        spec = merge_overrides(spec, overrides)

    out.write('Seed: %d\n' % cfg.seed)
    reports = []
    for op in model.operations:
        if cfg.operation_filter is not None and op.name != cfg.operation_filter:
            continue
        out.write('Testing property: prop_%s_responds\n' % op.name)
        if op.name in aborted:
            out.write('Aborted: %s\n' % aborted[op.name])
            reports.append((op.name, Aborted(aborted[op.name])))
            continue
        named_in = lowered[op.name][0]
        gen_ir = attach_names(named_in, to_ir(spec, spec.operation(op.name).input_gen))
        reports.append((op.name, run_property(model, op, named_in, ep, cfg, gen_ir, hooks, out)))
    return reports


def report_json(reports: Sequence[Tuple[str, TestReport]], seed: int) -> list:
    """Plain data for the machine-readable report, one object per operation."""
    result = []
    for name, report in reports:
        entry = {'operation': name, 'seed': seed}
        if isinstance(report, Passed):
            entry.update(status='passed', tests=report.count)
        elif isinstance(report, Failed):
            entry.update(status='failed', failing_test_index=report.failing_test_index,
                         reason=report.reason,
                         counterexample=to_json(report.counterexample),
                         counterexample_text=format_value(report.counterexample),
                         shrunk=to_json(report.shrunk),
                         shrunk_text=format_value(report.shrunk),
                         shrink_steps=report.shrink_steps)
        else:
            entry.update(status='aborted', reason=report.reason)
        result.append(entry)
    return result
