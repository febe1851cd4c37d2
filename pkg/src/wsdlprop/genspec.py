"""Human-editable generator spec files.

A spec file holds one named generator per IR node plus one ``operation``
line per service operation::

    # comments run to the end of the line
    gen Order_1_products_ProductType_price = text_of(int(1, inf))
    gen Order_1 = tuple(products: ref(Order_1_products))
    operation placeOrder input=Order_1 output=OrderResponse_1

Expressions::

    int(LO, HI)            float(LO, HI[, open_min][, open_max])
    bool                   enum("a", "b", ...)
    list(MIN, MAX, EXPR)   tuple(name: EXPR, ...)   choice(name: EXPR, ...)
    text_of(EXPR)          ref(NAME)

``inf`` (or ``-inf``) stands for an absent bound.  ``text_of`` marks a
value sent as its decimal text; around a list of integers it marks a
character string.  A statement may span lines while parentheses are open.
"""
import heapq
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

from .errors import CycleError, GenSpecSyntaxError, UnknownName
from .generate import ChoiceV, ListV, TupleV
from .ir import (AS_TEXT, BOOLEAN, CHAR, FLOAT, INTEGER, NATIVE, ChoiceOf, Enumeration,
                 ListOf, NamedIR, Scalar, TupleOf, TypeIR, path_id)

DEFAULT_FILENAME = 'proper_ws_autogen.genspec'

Number = Union[int, float]


@dataclass(frozen=True)
class IntG:
    lo: Optional[int]
    hi: Optional[int]


@dataclass(frozen=True)
class FloatG:
    lo: Optional[float]
    hi: Optional[float]
    open_min: bool = False
    open_max: bool = False


@dataclass(frozen=True)
class BoolG:
    pass


@dataclass(frozen=True)
class EnumG:
    values: Tuple[str, ...]


@dataclass(frozen=True)
class ListG:
    min: int
    max: Optional[int]
    inner: 'GenExpr'


@dataclass(frozen=True)
class TupleG:
    fields: Tuple[Tuple[str, 'GenExpr'], ...]


@dataclass(frozen=True)
class ChoiceG:
    alternatives: Tuple[Tuple[str, 'GenExpr'], ...]


@dataclass(frozen=True)
class TextOf:
    inner: 'GenExpr'


@dataclass(frozen=True)
class Ref:
    name: str


GenExpr = Union[IntG, FloatG, BoolG, EnumG, ListG, TupleG, ChoiceG, TextOf, Ref]


@dataclass(frozen=True)
class OperationStanza:
    op_name: str
    input_gen: str
    output_type: str


@dataclass(frozen=True)
class GenSpec:
    definitions: Dict[str, GenExpr]
    operations: Tuple[OperationStanza, ...] = ()
    lines: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def operation(self, op_name: str) -> OperationStanza:
        for stanza in self.operations:
            if stanza.op_name == op_name:
                return stanza
        raise UnknownName('no operation %r in generator spec' % op_name)


# -- rendering -----------------------------------------------------------

def _bound(x, low=False) -> str:
    if x is None:
        return '-inf' if low else 'inf'
    return repr(x) if isinstance(x, float) else str(x)


def render_expr(e: GenExpr) -> str:
    if isinstance(e, IntG):
        return 'int(%s, %s)' % (_bound(e.lo, True), _bound(e.hi))
    if isinstance(e, FloatG):
        flags = [f for f, on in (('open_min', e.open_min), ('open_max', e.open_max)) if on]
        return 'float(%s)' % ', '.join([_bound(e.lo, True), _bound(e.hi)] + flags)
    if isinstance(e, BoolG):
        return 'bool'
    if isinstance(e, EnumG):
        return 'enum(%s)' % ', '.join(json.dumps(v, ensure_ascii=False) for v in e.values)
    if isinstance(e, ListG):
        return 'list(%d, %s, %s)' % (e.min, _bound(e.max), render_expr(e.inner))
    if isinstance(e, TupleG):
        return 'tuple(%s)' % ', '.join('%s: %s' % (n, render_expr(x)) for n, x in e.fields)
    if isinstance(e, ChoiceG):
        return 'choice(%s)' % ', '.join('%s: %s' % (n, render_expr(x))
                                        for n, x in e.alternatives)
    if isinstance(e, TextOf):
        return 'text_of(%s)' % render_expr(e.inner)
    return 'ref(%s)' % e.name


def render(spec: GenSpec, header: str = '') -> str:
    out = []
    for line in header.splitlines():
        out.append(('# ' + line).rstrip())
    for name, expr in spec.definitions.items():
        out.append('gen %s = %s' % (name, render_expr(expr)))
    for op in spec.operations:
        out.append('operation %s input=%s output=%s' % (op.op_name, op.input_gen, op.output_type))
    return '\n'.join(out) + '\n'


# -- emission from lowered IR -----------------------------------------------

def _is_leafish(ir: TypeIR) -> bool:
    return isinstance(ir, (Scalar, Enumeration)) or (isinstance(ir, ListOf) and ir.is_string)


class _Emitter:
    def __init__(self):
        self.definitions: Dict[str, GenExpr] = {}

    def define(self, name: str, expr: GenExpr) -> str:
        candidate, n = name, 1
        while candidate in self.definitions and self.definitions[candidate] != expr:
            n += 1
            candidate = '%s_%d' % (name, n)
        self.definitions[candidate] = expr
        return candidate

    def leaf(self, ir: TypeIR) -> GenExpr:
        if isinstance(ir, Enumeration):
            return EnumG(ir.values)
        if isinstance(ir, ListOf):
            inner = ir.inner
            return TextOf(ListG(ir.min_len, ir.max_len, IntG(inner.min, inner.max)))
        if ir.kind == BOOLEAN:
            expr = BoolG()
        elif ir.kind == INTEGER:
            expr = IntG(ir.min, ir.max)
        else:
            expr = FloatG(ir.min, ir.max, ir.min_open, ir.max_open)
        return TextOf(expr) if ir.wire == AS_TEXT else expr

    def expr(self, ir: TypeIR, name: str) -> GenExpr:
        """Expression for *ir*; composite parts get their own definitions."""
        if _is_leafish(ir):
            return self.leaf(ir)
        if isinstance(ir, ListOf):
            return ListG(ir.min_len, ir.max_len, self.expr(ir.inner, name + '_item'))
        children = ir.fields if isinstance(ir, TupleOf) else ir.alternatives
        parts = tuple((child.local_name, Ref(self.node(child))) for child in children)
        return TupleG(parts) if isinstance(ir, TupleOf) else ChoiceG(parts)

    def node(self, n: NamedIR) -> str:
        base = path_id(n)
        ir = n.ir
        suffix = '_' + n.type_name if n.type_name else ''
        if isinstance(ir, ListOf) and not ir.is_string and not _is_leafish(ir.inner) \
                and not isinstance(ir.inner, ListOf):
            inner_name = base + (suffix or '_item')
            inner = Ref(self.define(inner_name, self.expr(ir.inner, inner_name)))
            return self.define(base, ListG(ir.min_len, ir.max_len, inner))
        return self.define(base + suffix, self.expr(ir, base + suffix))


def build(lowered: Dict[str, Tuple[NamedIR, NamedIR]]) -> GenSpec:
    """GenSpec for ``{operation name: (input tree, output tree)}``."""
    emitter = _Emitter()
    operations = []
    for op_name, (inp, out) in lowered.items():
        operations.append(OperationStanza(op_name, emitter.node(inp), emitter.node(out)))
    return GenSpec(dict(emitter.definitions), tuple(operations))


def emit(model, lowered: Dict[str, Tuple[NamedIR, NamedIR]]) -> str:
    header = 'generators for service %s\nendpoint %s' % (model.service_name, model.endpoint_url)
    return render(build(lowered), header)


# -- parsing -------------------------------------------------------------

_TOKEN_RE = re.compile(r'''
    (?P<ws>[ \t\r\f]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>-?(?:inf\b|\d+(?:\.\d*)?(?:[eE][+-]?\d+)?))
  | (?P<name>[^\W\d][\w.\-]*)
  | (?P<punct>[(),:=])
''', re.VERBOSE)


@dataclass
class _Token:
    kind: str
    text: str
    line: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    line, pos, depth = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise GenSpecSyntaxError('unexpected character %r' % text[pos], line)
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        if kind == 'newline':
            if depth == 0 and tokens and tokens[-1].kind != 'end':
                tokens.append(_Token('end', '', line))
            line += 1
            continue
        if kind in ('ws', 'comment'):
            continue
        if value == '(':
            depth += 1
        elif value == ')':
            depth = max(depth - 1, 0)
        tokens.append(_Token(kind, value, line))
    if tokens and tokens[-1].kind != 'end':
        tokens.append(_Token('end', '', tokens[-1].line))
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        if self.i >= len(self.tokens):
            return _Token('end', '', self.tokens[-1].line if self.tokens else 1)
        return self.tokens[self.i]

    def next(self) -> _Token:
        if self.i >= len(self.tokens):
            line = self.tokens[-1].line if self.tokens else 1
            raise GenSpecSyntaxError('unexpected end of file', line)
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind == 'string':
            raise GenSpecSyntaxError('expected %r, found %r' % (text, tok.text or 'end of statement'),
                                     tok.line)
        return tok

    def name(self) -> str:
        tok = self.next()
        if tok.kind != 'name':
            raise GenSpecSyntaxError('expected a name, found %r' % (tok.text or 'end of statement'),
                                     tok.line)
        return tok.text

    def number(self, integer: bool, allow_inf: bool = True):
        tok = self.next()
        if tok.kind != 'number':
            raise GenSpecSyntaxError('expected a number, found %r' % (tok.text or 'end'), tok.line)
        if tok.text.lstrip('-') == 'inf':
            if not allow_inf:
                raise GenSpecSyntaxError('a finite number is required here', tok.line)
            return None
        if integer:
            if not re.fullmatch(r'-?\d+', tok.text):
                raise GenSpecSyntaxError('expected an integer, found %r' % tok.text, tok.line)
            return int(tok.text)
        return float(tok.text)

    def statements(self):
        while self.i < len(self.tokens):
            tok = self.peek()
            if tok.kind == 'end':
                self.i += 1
                continue
            keyword = self.name()
            if keyword == 'gen':
                name = self.name()
                self.expect('=')
                expr = self.expr()
                yield 'gen', tok.line, (name, expr)
            elif keyword == 'operation':
                op_name = self.name()
                fields = {}
                for _ in range(2):
                    key = self.name()
                    self.expect('=')
                    fields[key] = self.name()
                if set(fields) != {'input', 'output'}:
                    raise GenSpecSyntaxError('operation needs input= and output=', tok.line)
                yield 'operation', tok.line, OperationStanza(op_name, fields['input'],
                                                             fields['output'])
            else:
                raise GenSpecSyntaxError('unknown statement %r' % keyword, tok.line)
            end = self.next()
            if end.kind != 'end':
                raise GenSpecSyntaxError('unexpected %r after statement' % end.text, end.line)

    def labelled(self):
        items = []
        self.expect('(')
        while True:
            label = self.name()
            self.expect(':')
            items.append((label, self.expr()))
            if self.next().text == ')':
                return tuple(items)
            self.i -= 1
            self.expect(',')

    def expr(self) -> GenExpr:
        tok = self.next()
        if tok.kind != 'name':
            raise GenSpecSyntaxError('expected an expression, found %r' % (tok.text or 'end'),
                                     tok.line)
        head = tok.text
        if head == 'bool':
            return BoolG()
        if head == 'int':
            self.expect('(')
            lo = self.number(True)
            self.expect(',')
            hi = self.number(True)
            self.expect(')')
            if lo is not None and hi is not None and lo > hi:
                raise GenSpecSyntaxError('empty range int(%d, %d)' % (lo, hi), tok.line)
            return IntG(lo, hi)
        if head == 'float':
            self.expect('(')
            lo = self.number(False)
            self.expect(',')
            hi = self.number(False)
            flags = set()
            while self.peek().text == ',':
                self.next()
                flag = self.name()
                if flag not in ('open_min', 'open_max'):
                    raise GenSpecSyntaxError('unknown float flag %r' % flag, tok.line)
                flags.add(flag)
            self.expect(')')
            if lo is not None and hi is not None and lo > hi:
                raise GenSpecSyntaxError('empty float range', tok.line)
            return FloatG(lo, hi, 'open_min' in flags, 'open_max' in flags)
        if head == 'enum':
            self.expect('(')
            values = []
            while True:
                s = self.next()
                if s.kind != 'string':
                    raise GenSpecSyntaxError('enum takes string literals', s.line)
                values.append(json.loads(s.text))
                if self.next().text == ')':
                    break
                self.i -= 1
                self.expect(',')
            if len(set(values)) != len(values):
                raise GenSpecSyntaxError('duplicate enum values', tok.line)
            return EnumG(tuple(values))
        if head == 'list':
            self.expect('(')
            lo = self.number(True, allow_inf=False)
            self.expect(',')
            hi = self.number(True)
            self.expect(',')
            inner = self.expr()
            self.expect(')')
            if lo < 0 or (hi is not None and lo > hi):
                raise GenSpecSyntaxError('bad list bounds', tok.line)
            return ListG(lo, hi, inner)
        if head == 'tuple':
            if self.peek().text == '(' and self.i + 1 < len(self.tokens) \
                    and self.tokens[self.i + 1].text == ')':
                self.i += 2
                return TupleG(())
            return TupleG(self.labelled())
        if head == 'choice':
            return ChoiceG(self.labelled())
        if head == 'text_of':
            self.expect('(')
            inner = self.expr()
            self.expect(')')
            if not isinstance(inner, (IntG, FloatG, BoolG, EnumG, Ref)) and not (
                    isinstance(inner, ListG) and isinstance(inner.inner, IntG)):
                raise GenSpecSyntaxError('text_of needs a scalar or a list of integers', tok.line)
            return TextOf(inner)
        if head == 'ref':
            self.expect('(')
            name = self.name()
            self.expect(')')
            return Ref(name)
        raise GenSpecSyntaxError('unknown generator %r' % head, tok.line)


def _refs(e: GenExpr):
    if isinstance(e, Ref):
        yield e.name
    elif isinstance(e, (ListG, TextOf)):
        yield from _refs(e.inner)
    elif isinstance(e, TupleG):
        for _, x in e.fields:
            yield from _refs(x)
    elif isinstance(e, ChoiceG):
        for _, x in e.alternatives:
            yield from _refs(x)


def _validate(definitions: Dict[str, GenExpr], operations, lines) -> Dict[str, GenExpr]:
    """Check names and cycles; return definitions with dependencies first."""
    for name, expr in definitions.items():
        for ref in _refs(expr):
            if ref not in definitions:
                raise UnknownName('line %s: %s refers to undefined generator %r'
                                  % (lines.get(name, '?'), name, ref))
    for op in operations:
        for ref in (op.input_gen, op.output_type):
            if ref not in definitions:
                raise UnknownName('operation %s refers to undefined generator %r'
                                  % (op.op_name, ref))
    order = {name: i for i, name in enumerate(definitions)}
    deps = {name: set(_refs(expr)) for name, expr in definitions.items()}
    users: Dict[str, List[str]] = {name: [] for name in definitions}
    for name, ds in deps.items():
        for d in ds:
            users[d].append(name)
    pending = {name: len(ds) for name, ds in deps.items()}
    ready = [(order[n], n) for n, c in pending.items() if c == 0]
    heapq.heapify(ready)
    result = {}
    while ready:
        _, name = heapq.heappop(ready)
        result[name] = definitions[name]
        for user in users[name]:
            pending[user] -= 1
            if pending[user] == 0:
                heapq.heappush(ready, (order[user], user))
    if len(result) != len(definitions):
        stuck = sorted((n for n in definitions if n not in result), key=order.get)
        raise CycleError('generators refer to each other in a cycle: %s' % ', '.join(stuck))
    return result


def parse(text: str, partial: bool = False) -> GenSpec:
    """Parse a spec file.

    With *partial*, references are left unchecked so the text can serve as
    a set of overrides for :func:`merge_overrides`.
    """
    definitions: Dict[str, GenExpr] = {}
    lines: Dict[str, int] = {}
    operations: List[OperationStanza] = []
    for kind, line, payload in _Parser(_tokenize(text)).statements():
        if kind == 'gen':
            name, expr = payload
            if name in definitions:
                raise GenSpecSyntaxError('generator %r defined twice' % name, line)
            definitions[name] = expr
            lines[name] = line
        else:
            if any(op.op_name == payload.op_name for op in operations):
                raise GenSpecSyntaxError('operation %r listed twice' % payload.op_name, line)
            operations.append(payload)
    if not partial:
        definitions = _validate(definitions, operations, lines)
    return GenSpec(definitions, tuple(operations), lines)


def merge_overrides(base: GenSpec, overrides: GenSpec) -> GenSpec:
    definitions = dict(base.definitions)
    lines = dict(base.lines)
    for name, expr in overrides.definitions.items():
        if name not in definitions:
            raise UnknownName('override of unknown generator %r' % name)
        definitions[name] = expr
        if name in overrides.lines:
            lines[name] = overrides.lines[name]
    operations = list(base.operations)
    for stanza in overrides.operations:
        for i, op in enumerate(operations):
            if op.op_name == stanza.op_name:
                operations[i] = stanza
                break
        else:
            raise UnknownName('override of unknown operation %r' % stanza.op_name)
    definitions = _validate(definitions, operations, lines)
    return GenSpec(definitions, tuple(operations), lines)


# -- back to IR ------------------------------------------------------------

def _expr_ir(spec: GenSpec, e: GenExpr, text: bool = False) -> TypeIR:
    wire = AS_TEXT if text else NATIVE
    if isinstance(e, Ref):
        if e.name not in spec.definitions:
            raise UnknownName('undefined generator %r' % e.name)
        return _expr_ir(spec, spec.definitions[e.name], text)
    if isinstance(e, TextOf):
        return _expr_ir(spec, e.inner, True)
    if isinstance(e, IntG):
        return Scalar(INTEGER, e.lo, e.hi, wire)
    if isinstance(e, FloatG):
        return Scalar(FLOAT, e.lo, e.hi, wire, e.open_min, e.open_max)
    if isinstance(e, BoolG):
        return Scalar(BOOLEAN, wire=wire)
    if isinstance(e, EnumG):
        return Enumeration(e.values)
    if isinstance(e, ListG):
        if text and isinstance(e.inner, IntG):
            return ListOf(e.min, e.max, Scalar(INTEGER, e.inner.lo, e.inner.hi, CHAR))
        return ListOf(e.min, e.max, _expr_ir(spec, e.inner))
    if isinstance(e, TupleG):
        return TupleOf(tuple(NamedIR(n, ir=_expr_ir(spec, x)) for n, x in e.fields))
    return ChoiceOf(tuple(NamedIR(n, ir=_expr_ir(spec, x)) for n, x in e.alternatives))


def to_ir(spec: GenSpec, name: str) -> TypeIR:
    if name not in spec.definitions:
        raise UnknownName('undefined generator %r' % name)
    return _expr_ir(spec, spec.definitions[name])


def attach_names(template: NamedIR, ir: TypeIR) -> NamedIR:
    """Give *ir* the naming metadata of *template* wherever element names line up."""

    def graft(tmpl: Optional[TypeIR], node: TypeIR) -> TypeIR:
        if isinstance(node, ListOf):
            inner_t = tmpl.inner if isinstance(tmpl, ListOf) else tmpl
            return ListOf(node.min_len, node.max_len, graft(inner_t, node.inner))
        if isinstance(node, (TupleOf, ChoiceOf)):
            if isinstance(tmpl, ListOf):
                tmpl = tmpl.inner
            known = {}
            if isinstance(tmpl, (TupleOf, ChoiceOf)):
                known = {c.local_name: c for c in
                         (tmpl.fields if isinstance(tmpl, TupleOf) else tmpl.alternatives)}
            children = node.fields if isinstance(node, TupleOf) else node.alternatives
            grafted = tuple(attach_names(known[c.local_name], c.ir) if c.local_name in known
                            else c for c in children)
            return TupleOf(grafted) if isinstance(node, TupleOf) else ChoiceOf(grafted)
        return node

    return NamedIR(template.local_name, template.ancestor_path, template.namespace,
                   graft(template.ir, ir), template.type_name, template.position,
                   template.qualified)


# -- transform hooks ---------------------------------------------------------

class TransformHooks:
    """Post-generation functions keyed by path id.

    A hook receives the generated value of its node and returns a
    replacement; hooks run bottom-up after generation and after every
    shrink step.
    """

    def __init__(self, hooks: Optional[Dict[str, Callable]] = None):
        self._hooks: Dict[str, Callable] = dict(hooks or {})

    def register(self, node_path_id: str, fn: Callable) -> None:
        self._hooks[node_path_id] = fn

    def __bool__(self):
        return bool(self._hooks)

    def apply(self, named: NamedIR, value):
        if not self._hooks:
            return value
        return self._apply(named, value)

    def _apply(self, named: NamedIR, value):
        def inner(ir, v):
            if isinstance(ir, ListOf) and isinstance(v, ListV):
                return ListV(tuple(inner(ir.inner, item) for item in v.items))
            if isinstance(ir, TupleOf) and isinstance(v, TupleV):
                return TupleV(tuple((name, self._apply(f, item))
                                    for f, (name, item) in zip(ir.fields, v.fields)))
            if isinstance(ir, ChoiceOf) and isinstance(v, ChoiceV):
                return ChoiceV(v.index, self._apply(ir.alternatives[v.index], v.value))
            return v

        value = inner(named.ir, value)
        fn = self._hooks.get(path_id(named))
        return fn(value) if fn is not None else value
