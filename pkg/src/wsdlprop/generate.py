"""Random values for TypeIR trees, the conformance check, and shrinking."""
import math
import random
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

from .errors import ContradictoryRange
from .ir import (BOOLEAN, FLOAT, INTEGER, ChoiceOf, Enumeration, ListOf, NamedIR,
                 Scalar, TupleOf, TypeIR)

SCALE = 8
MAX_SIZE = 42
_OPEN_RETRIES = 100


@dataclass(frozen=True)
class IntV:
    value: int


@dataclass(frozen=True)
class FloatV:
    value: float


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class TextV:
    """An enumeration member, kept verbatim."""
    value: str


@dataclass(frozen=True)
class ListV:
    items: Tuple['Value', ...] = ()


@dataclass(frozen=True)
class TupleV:
    fields: Tuple[Tuple[str, 'Value'], ...] = ()

    def __getitem__(self, name):
        for key, value in self.fields:
            if key == name:
                return value
        raise KeyError(name)


@dataclass(frozen=True)
class ChoiceV:
    index: int
    value: 'Value'


Value = Union[IntV, FloatV, BoolV, TextV, ListV, TupleV, ChoiceV]


@dataclass(frozen=True)
class GenContext:
    seed: int
    size: int = 1

    def __post_init__(self):
        if self.size < 1:
            raise ValueError('size must be >= 1')


def size_for_test(i: int, max_size: int = MAX_SIZE) -> int:
    return min(i, max_size)


def text_of(v: ListV) -> str:
    return ''.join(chr(item.value) for item in v.items)


def chars(s: str) -> ListV:
    return ListV(tuple(IntV(ord(c)) for c in s))


# -- generation ----------------------------------------------------------

def _int_window(lo, hi, size):
    """Range an integer scalar is drawn from at *size*."""
    if lo is not None and hi is not None:
        return lo, hi
    reach = size * SCALE
    a = -reach if lo is None else max(lo, -reach)
    b = reach if hi is None else min(hi, reach)
    if a <= b:
        return a, b
    if lo is not None:
        return lo, lo + reach
    return hi - reach, hi


def _float_window(ir: Scalar, size):
    reach = float(size * SCALE)
    lo = -reach if ir.min is None else max(float(ir.min), -reach)
    hi = reach if ir.max is None else min(float(ir.max), reach)
    if lo <= hi:
        return lo, hi
    if ir.min is not None:
        return float(ir.min), float(ir.min) + reach
    return float(ir.max) - reach, float(ir.max)


def _in_float_range(ir: Scalar, x: float) -> bool:
    if not math.isfinite(x):
        return False
    if ir.min is not None and (x < ir.min or (ir.min_open and x == ir.min)):
        return False
    if ir.max is not None and (x > ir.max or (ir.max_open and x == ir.max)):
        return False
    return True


def _gen_float(ir: Scalar, rng: random.Random, size: int) -> float:
    lo, hi = _float_window(ir, size)
    specials = [p for p in (0.0, ir.min, ir.max) if p is not None]
    specials = [float(p) for p in specials if _in_float_range(ir, float(p))]
    if specials and rng.random() < 0.25:
        return rng.choice(specials)
    for _ in range(_OPEN_RETRIES):
        x = rng.uniform(lo, hi)
        if _in_float_range(ir, x):
            return x
    raise ContradictoryRange('cannot draw a float inside %r' % (ir,))


def _gen(ir: TypeIR, rng: random.Random, size: int) -> Value:
    if isinstance(ir, Scalar):
        if ir.kind == BOOLEAN:
            return BoolV(rng.random() < 0.5)
        if ir.kind == INTEGER:
            if ir.min is not None and ir.max is not None and ir.min > ir.max:
                raise ContradictoryRange('empty integer range')
            lo, hi = _int_window(ir.min, ir.max, size)
            return IntV(rng.randint(lo, hi))
        return FloatV(_gen_float(ir, rng, size))
    if isinstance(ir, Enumeration):
        return TextV(ir.values[rng.randrange(len(ir.values))])
    if isinstance(ir, ListOf):
        top = ir.min_len + size
        if ir.max_len is not None:
            top = min(top, ir.max_len)
        n = rng.randint(ir.min_len, top)
        return ListV(tuple(_gen(ir.inner, rng, size) for _ in range(n)))
    if isinstance(ir, TupleOf):
        return TupleV(tuple((f.local_name, _gen(f.ir, rng, size)) for f in ir.fields))
    if isinstance(ir, ChoiceOf):
        index = rng.randrange(len(ir.alternatives))
        return ChoiceV(index, _gen(ir.alternatives[index].ir, rng, size))
    raise TypeError('not a TypeIR: %r' % (ir,))


def generate(ir: Union[TypeIR, NamedIR], ctx: GenContext, hooks=None) -> Value:
    """Draw one value.  Deterministic in (ir, ctx.seed, ctx.size).

    When *ir* is a NamedIR, *hooks* (a :class:`wsdlprop.genspec.TransformHooks`)
    are applied to the finished value.
    """
    named = ir if isinstance(ir, NamedIR) else None
    value = _gen(named.ir if named else ir, random.Random(ctx.seed), ctx.size)
    if hooks is not None and named is not None:
        value = hooks.apply(named, value)
    return value


# -- conformance ---------------------------------------------------------

def conforms(ir: TypeIR, v: Value) -> bool:
    if isinstance(ir, Scalar):
        if ir.kind == BOOLEAN:
            return isinstance(v, BoolV) and isinstance(v.value, bool)
        if ir.kind == INTEGER:
            if not isinstance(v, IntV) or type(v.value) is not int:
                return False
            return ((ir.min is None or v.value >= ir.min)
                    and (ir.max is None or v.value <= ir.max))
        return (isinstance(v, FloatV) and isinstance(v.value, float)
                and _in_float_range(ir, v.value))
    if isinstance(ir, Enumeration):
        return isinstance(v, TextV) and v.value in ir.values
    if isinstance(ir, ListOf):
        if not isinstance(v, ListV):
            return False
        n = len(v.items)
        if n < ir.min_len or (ir.max_len is not None and n > ir.max_len):
            return False
        return all(conforms(ir.inner, item) for item in v.items)
    if isinstance(ir, TupleOf):
        if not isinstance(v, TupleV) or len(v.fields) != len(ir.fields):
            return False
        return all(name == f.local_name and conforms(f.ir, item)
                   for f, (name, item) in zip(ir.fields, v.fields))
    if isinstance(ir, ChoiceOf):
        return (isinstance(v, ChoiceV) and 0 <= v.index < len(ir.alternatives)
                and conforms(ir.alternatives[v.index].ir, v.value))
    return False


# -- shrinking -----------------------------------------------------------

def _target(ir: Scalar):
    """The in-range point nearest zero."""
    zero = 0 if ir.kind == INTEGER else 0.0
    if ir.min is not None and (ir.min > zero or (ir.min == zero and ir.min_open)):
        if ir.kind == FLOAT and ir.min_open:
            return math.nextafter(float(ir.min), math.inf)
        return ir.min
    if ir.max is not None and (ir.max < zero or (ir.max == zero and ir.max_open)):
        if ir.kind == FLOAT and ir.max_open:
            return math.nextafter(float(ir.max), -math.inf)
        return ir.max
    return zero


def size_key(ir: TypeIR, v: Value):
    """Well-founded measure that every shrink step strictly decreases."""
    if isinstance(ir, Scalar):
        if ir.kind == BOOLEAN:
            return int(v.value)
        t = _target(ir)
        return (abs(v.value - t), 1 if v.value < t else 0)
    if isinstance(ir, Enumeration):
        return ir.values.index(v.value)
    if isinstance(ir, ListOf):
        return (len(v.items), tuple(size_key(ir.inner, item) for item in v.items))
    if isinstance(ir, TupleOf):
        return tuple(size_key(f.ir, item) for f, (_, item) in zip(ir.fields, v.fields))
    return (v.index, size_key(ir.alternatives[v.index].ir, v.value))


def minimal(ir: TypeIR) -> Value:
    """The smallest value of *ir* under :func:`size_key`."""
    if isinstance(ir, Scalar):
        if ir.kind == BOOLEAN:
            return BoolV(False)
        t = _target(ir)
        return IntV(t) if ir.kind == INTEGER else FloatV(float(t))
    if isinstance(ir, Enumeration):
        return TextV(ir.values[0])
    if isinstance(ir, ListOf):
        return ListV(tuple(minimal(ir.inner) for _ in range(ir.min_len)))
    if isinstance(ir, TupleOf):
        return TupleV(tuple((f.local_name, minimal(f.ir)) for f in ir.fields))
    return ChoiceV(0, minimal(ir.alternatives[0].ir))


def _int_candidates(ir: Scalar, x: int) -> List[int]:
    t = _target(ir)
    out = [t]
    if x < 0 < -x and (ir.max is None or -x <= ir.max):
        out.append(-x)
    d = x - t
    step = d // 2 if d > 0 else -((-d) // 2)
    while step != 0:
        out.append(x - step)
        step = step // 2 if step > 0 else -((-step) // 2)
    if d != 0:
        out.append(x - (1 if d > 0 else -1))
    return out


def _float_candidates(ir: Scalar, x: float) -> List[float]:
    t = float(_target(ir))
    out = [t]
    if x < 0 and _in_float_range(ir, -x):
        out.append(-x)
    for y in (float(math.trunc(x)), float(round(x, 3)), t + (x - t) / 2):
        out.append(y)
    return out


def iter_shrink_candidates(ir: TypeIR, v: Value) -> Iterator[Value]:
    """Lazily yield simpler variants of *v*, most aggressive first.

    Only scalar candidates are checked here.  Structural edits (dropping
    list items, swapping in a simpler child) are correct by construction,
    so nested values are never re-validated from the top; that keeps the
    cost per candidate proportional to the edit rather than the value.
    """
    if isinstance(ir, Scalar):
        if ir.kind == BOOLEAN:
            if v.value:
                yield BoolV(False)
            return
        key = size_key(ir, v)
        seen = set()
        if ir.kind == INTEGER:
            raw = (IntV(c) for c in _int_candidates(ir, v.value))
        else:
            raw = (FloatV(c) for c in _float_candidates(ir, v.value) if math.isfinite(c))
        for c in raw:
            if c not in seen:
                seen.add(c)
                if conforms(ir, c) and size_key(ir, c) < key:
                    yield c
    elif isinstance(ir, Enumeration):
        for value in ir.values[:ir.values.index(v.value)]:
            yield TextV(value)
    elif isinstance(ir, ListOf):
        items = v.items
        n = len(items)
        if n > ir.min_len:
            seen = {items[:ir.min_len]}
            yield ListV(items[:ir.min_len])
            chunk = n // 2
            while chunk >= 1:
                if n - chunk >= ir.min_len:
                    for start in range(0, n - chunk + 1, chunk):
                        shorter = items[:start] + items[start + chunk:]
                        if shorter not in seen:
                            seen.add(shorter)
                            yield ListV(shorter)
                chunk //= 2
        for i, item in enumerate(items):
            for c in iter_shrink_candidates(ir.inner, item):
                yield ListV(items[:i] + (c,) + items[i + 1:])
    elif isinstance(ir, TupleOf):
        fields = v.fields
        for i, f in enumerate(ir.fields):
            for c in iter_shrink_candidates(f.ir, fields[i][1]):
                yield TupleV(fields[:i] + ((f.local_name, c),) + fields[i + 1:])
    elif isinstance(ir, ChoiceOf):
        for j in range(v.index):
            yield ChoiceV(j, minimal(ir.alternatives[j].ir))
        for c in iter_shrink_candidates(ir.alternatives[v.index].ir, v.value):
            yield ChoiceV(v.index, c)


def shrink_candidates(ir: TypeIR, v: Value) -> List[Value]:
    """All one-step shrinks of *v*.

    Every candidate conforms to *ir* and has a strictly smaller
    :func:`size_key`; the list is empty exactly when *v* is minimal.
    """
    return list(iter_shrink_candidates(ir, v))


def shrink(ir: TypeIR, v: Value, fails, max_steps: int = 10_000,
           transform=None) -> Tuple[Value, int]:
    """Greedy descent: keep the first candidate that still *fails*.

    Returns the final value and the number of successful steps.
    """
    steps = 0
    while steps < max_steps:
        for c in iter_shrink_candidates(ir, v):
            if transform is not None:
                c = transform(c)
                if c == v:
                    continue
            if fails(c):
                v = c
                steps += 1
                break
        else:
            break
    return v, steps


# -- presentation --------------------------------------------------------

def format_value(v: Value) -> str:
    """Erlang-term style rendering, e.g. ``[[46],[]]``."""
    if isinstance(v, IntV):
        return str(v.value)
    if isinstance(v, FloatV):
        return repr(v.value)
    if isinstance(v, BoolV):
        return 'true' if v.value else 'false'
    if isinstance(v, TextV):
        return '"%s"' % v.value.replace('\\', '\\\\').replace('"', '\\"')
    if isinstance(v, ListV):
        return '[%s]' % ','.join(format_value(item) for item in v.items)
    if isinstance(v, TupleV):
        return '[%s]' % ','.join(format_value(item) for _, item in v.fields)
    return format_value(v.value)


def to_json(v: Value):
    if isinstance(v, (IntV, FloatV, BoolV, TextV)):
        return v.value
    if isinstance(v, ListV):
        return [to_json(item) for item in v.items]
    if isinstance(v, TupleV):
        return {name: to_json(item) for name, item in v.fields}
    return {'choice': v.index, 'value': to_json(v.value)}
