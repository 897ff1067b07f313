"""Exact clopen-set algebra for the supported zero-dimensional systems.

Five space families are supported.  Every clopen set is stored in a unique
canonical form, so equality is structural comparison and all Boolean
operations are exact:

* ``finite_cycle``: X = {0,...,M-1} with the +1 cycle; sets are subsets.
* ``odometer``: the base-b adding machine on infinite digit strings
  (least significant digit first); sets are prefix-free antichains of
  cylinder words with every complete sibling family merged into its parent.
* ``compactified_shift``: Z with one point at infinity and the +1 shift;
  sets are (finite set F, cofinite flag); the cofinite form contains inf.
* ``two_point_shift``: Z with fixed points -inf and +inf; sets are
  (finite difference set F, tail flags).  An integer n is in the set when
  membership differs from the tail default of its side exactly for n in F
  (default is tail_minus for n < 0 and tail_plus for n >= 0); -inf is in
  the set iff tail_minus, +inf iff tail_plus.
* ``quotient_product``: (Y x Z~)/(Y x {inf}) for a fiber system Y, where
  Z~ is the one-point compactification of Z and the map acts fiberwise;
  sets are (tail flag, finite map index -> fiber set), storing only slices
  that differ from the tail default (full fiber if tail, empty otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidPoint, MixedSystems

FINITE_CYCLE = "finite_cycle"
ODOMETER = "odometer"
COMPACTIFIED_SHIFT = "compactified_shift"
TWO_POINT_SHIFT = "two_point_shift"
QUOTIENT_PRODUCT = "quotient_product"

FAMILIES = (
    FINITE_CYCLE,
    ODOMETER,
    COMPACTIFIED_SHIFT,
    TWO_POINT_SHIFT,
    QUOTIENT_PRODUCT,
)

INF = "inf"
MINUS_INF = "-inf"
PLUS_INF = "+inf"


@dataclass(frozen=True)
class SystemSpec:
    """Description of the space X and homeomorphism h."""

    family: str
    period: int = 0
    base: int = 0
    fiber: Optional["SystemSpec"] = None

    def __post_init__(self):
        if self.family == FINITE_CYCLE:
            if self.period < 1:
                raise ValueError("period must be >= 1")
        elif self.family == ODOMETER:
            if self.base < 2:
                raise ValueError("base must be >= 2")
        elif self.family in (COMPACTIFIED_SHIFT, TWO_POINT_SHIFT):
            pass
        elif self.family == QUOTIENT_PRODUCT:
            if self.fiber is None or self.fiber.family not in (
                ODOMETER,
                FINITE_CYCLE,
                COMPACTIFIED_SHIFT,
            ):
                raise ValueError(
                    "quotient_product fiber must be odometer, finite_cycle "
                    "or compactified_shift"
                )
        else:
            raise ValueError("unknown family %r" % (self.family,))

    def to_dict(self):
        if self.family == FINITE_CYCLE:
            params = {"period": self.period}
        elif self.family == ODOMETER:
            params = {"base": self.base}
        elif self.family == QUOTIENT_PRODUCT:
            params = {"fiber": self.fiber.to_dict()}
        else:
            params = {}
        return {"family": self.family, "params": params}

    @staticmethod
    def from_dict(d):
        family = d["family"]
        params = d.get("params", {})
        if family == FINITE_CYCLE:
            return finite_cycle(params["period"])
        if family == ODOMETER:
            return odometer(params.get("base", 2))
        if family == COMPACTIFIED_SHIFT:
            return compactified_shift()
        if family == TWO_POINT_SHIFT:
            return two_point_shift()
        if family == QUOTIENT_PRODUCT:
            return quotient_product(SystemSpec.from_dict(params["fiber"]))
        raise ValueError("unknown family %r" % (family,))


def finite_cycle(period):
    return SystemSpec(FINITE_CYCLE, period=period)


def odometer(base=2):
    return SystemSpec(ODOMETER, base=base)


def compactified_shift():
    return SystemSpec(COMPACTIFIED_SHIFT)


def two_point_shift():
    return SystemSpec(TWO_POINT_SHIFT)


def quotient_product(fiber):
    return SystemSpec(QUOTIENT_PRODUCT, fiber=fiber)


# ---------------------------------------------------------------------------
# odometer word helpers
# ---------------------------------------------------------------------------


def _odo_canonical(base, words):
    """Canonicalize a set of cylinder words: drop covered words, merge
    complete sibling families into their parent."""
    words = set(words)
    words = {
        w for w in words if not any(w[:i] in words for i in range(len(w)))
    }
    changed = True
    while changed:
        changed = False
        for w in list(words):
            if not w:
                continue
            parent = w[:-1]
            sibs = {parent + (d,) for d in range(base)}
            if sibs <= words:
                words -= sibs
                words.add(parent)
                changed = True
                break
    return frozenset(words)


def _odo_expand(base, words, level):
    """All level-`level` words covered by the given cylinders."""
    out = set()
    for w in words:
        if len(w) >= level:
            out.add(w)
        else:
            stack = [w]
            while stack:
                v = stack.pop()
                if len(v) == level:
                    out.add(v)
                else:
                    for d in range(base):
                        stack.append(v + (d,))
    return out


def _odo_level(words):
    return max((len(w) for w in words), default=0)


def _word_value(base, w):
    return sum(d * base**i for i, d in enumerate(w))


def _value_word(base, val, length):
    return tuple((val // base**i) % base for i in range(length))


def _word_shift(base, w, n):
    if not w:
        return w
    return _value_word(base, (_word_value(base, w) + n) % base ** len(w), len(w))


# ---------------------------------------------------------------------------
# ClopenSet
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClopenSet:
    """A compact open subset of X in family-specific canonical form."""

    spec: SystemSpec
    data: object = field(hash=True)

    def is_empty(self):
        return is_empty(self)

    def __contains__(self, point):
        return contains_point(self, point)


def _mk(spec, data):
    return ClopenSet(spec, data)


def empty_set(spec):
    f = spec.family
    if f == FINITE_CYCLE:
        return _mk(spec, frozenset())
    if f == ODOMETER:
        return _mk(spec, frozenset())
    if f == COMPACTIFIED_SHIFT:
        return _mk(spec, (frozenset(), False))
    if f == TWO_POINT_SHIFT:
        return _mk(spec, (frozenset(), False, False))
    return _mk(spec, (False, ()))


def whole_space(spec):
    f = spec.family
    if f == FINITE_CYCLE:
        return _mk(spec, frozenset(range(spec.period)))
    if f == ODOMETER:
        return _mk(spec, frozenset({()}))
    if f == COMPACTIFIED_SHIFT:
        return _mk(spec, (frozenset(), True))
    if f == TWO_POINT_SHIFT:
        return _mk(spec, (frozenset(), True, True))
    return _mk(spec, (True, ()))


def finite_cycle_set(spec, points):
    pts = frozenset(int(p) % spec.period for p in points)
    return _mk(spec, pts)


def cylinder(spec, word):
    """The odometer cylinder of all strings starting with `word`."""
    word = tuple(int(d) for d in word)
    if any(d < 0 or d >= spec.base for d in word):
        raise ValueError("digit out of range")
    return _mk(spec, frozenset({word}))


def odometer_set(spec, words):
    return _mk(spec, _odo_canonical(spec.base, [tuple(w) for w in words]))


def shift_set(spec, points, cofinite=False):
    return _mk(spec, (frozenset(int(p) for p in points), bool(cofinite)))


def two_point_set(spec, diff, tail_minus=False, tail_plus=False):
    """Build from the canonical difference-set form."""
    return _mk(spec, (frozenset(int(p) for p in diff), bool(tail_minus), bool(tail_plus)))


def two_point_from_members(spec, members, tail_minus=False, tail_plus=False):
    """Build from an explicit finite part plus optional tails.

    `members` lists integers in the set besides the tails; with
    tail_minus the set also contains -inf and every integer below
    min(members + {0}) - 1, similarly for tail_plus above the maximum.
    """
    members = set(int(p) for p in members)
    lo = min(members, default=0) - 1
    hi = max(members, default=0) + 1
    diff = set()
    for n in list(range(lo, hi + 1)) + sorted(members):
        default = tail_minus if n < 0 else tail_plus
        inside = (n in members) or (tail_minus and n < lo) or (tail_plus and n > hi)
        if n < lo or n > hi:
            inside = default
        if inside != default:
            diff.add(n)
    # integers strictly below lo belong iff tail_minus (default), above hi
    # iff tail_plus (default), so diff is complete.
    return two_point_set(spec, diff, tail_minus, tail_plus)


def quotient_set(spec, slices, tail=False):
    """Build from a map index -> fiber ClopenSet plus the tail flag."""
    fiber = spec.fiber
    default = whole_space(fiber) if tail else empty_set(fiber)
    items = []
    for k, s in slices.items() if isinstance(slices, dict) else slices:
        if s.spec != fiber:
            raise MixedSystems("slice over wrong fiber spec")
        if s != default:
            items.append((int(k), s))
    items.sort(key=lambda kv: kv[0])
    return _mk(spec, (bool(tail), tuple(items)))


def _q_tail(a):
    return a.data[0]


def _q_slices(a):
    return dict(a.data[1])


def _q_slice(a, k):
    sl = dict(a.data[1])
    if k in sl:
        return sl[k]
    return whole_space(a.spec.fiber) if a.data[0] else empty_set(a.spec.fiber)


def quotient_slice(a, k):
    """The fiber clopen set of `a` over integer index k."""
    return _q_slice(a, k)


def quotient_tail_flag(a):
    return _q_tail(a)


def quotient_window(a):
    return sorted(k for k, _ in a.data[1])


# ---------------------------------------------------------------------------
# Boolean algebra
# ---------------------------------------------------------------------------


def _check_same(a, b):
    if a.spec != b.spec:
        raise MixedSystems("operands over different system specs")


def union(a, b):
    _check_same(a, b)
    f = a.spec.family
    if f in (FINITE_CYCLE,):
        return _mk(a.spec, a.data | b.data)
    if f == ODOMETER:
        return _mk(a.spec, _odo_canonical(a.spec.base, a.data | b.data))
    if f == COMPACTIFIED_SHIFT:
        (fa, ca), (fb, cb) = a.data, b.data
        if not ca and not cb:
            return _mk(a.spec, (fa | fb, False))
        if ca and cb:
            return _mk(a.spec, (fa & fb, True))
        if ca:
            return _mk(a.spec, (fa - fb, True))
        return _mk(a.spec, (fb - fa, True))
    if f == TWO_POINT_SHIFT:
        return _tp_combine(a, b, lambda x, y: x or y)
    if f == QUOTIENT_PRODUCT:
        return _q_combine(a, b, union, lambda x, y: x or y)
    raise AssertionError


def intersect(a, b):
    _check_same(a, b)
    f = a.spec.family
    if f == FINITE_CYCLE:
        return _mk(a.spec, a.data & b.data)
    if f == ODOMETER:
        out = set()
        for w1 in a.data:
            for w2 in b.data:
                if w1[: len(w2)] == w2 or w2[: len(w1)] == w1:
                    out.add(w1 if len(w1) >= len(w2) else w2)
        return _mk(a.spec, _odo_canonical(a.spec.base, out))
    if f == COMPACTIFIED_SHIFT:
        (fa, ca), (fb, cb) = a.data, b.data
        if not ca and not cb:
            return _mk(a.spec, (fa & fb, False))
        if ca and cb:
            return _mk(a.spec, (fa | fb, True))
        if ca:
            return _mk(a.spec, (fb - fa, False))
        return _mk(a.spec, (fa - fb, False))
    if f == TWO_POINT_SHIFT:
        return _tp_combine(a, b, lambda x, y: x and y)
    if f == QUOTIENT_PRODUCT:
        return _q_combine(a, b, intersect, lambda x, y: x and y)
    raise AssertionError


def complement(a):
    f = a.spec.family
    if f == FINITE_CYCLE:
        return _mk(a.spec, frozenset(range(a.spec.period)) - a.data)
    if f == ODOMETER:
        base = a.spec.base
        level = _odo_level(a.data)
        covered = _odo_expand(base, a.data, level)
        every = _odo_expand(base, {()}, level)
        return _mk(a.spec, _odo_canonical(base, every - covered))
    if f == COMPACTIFIED_SHIFT:
        fs, c = a.data
        return _mk(a.spec, (fs, not c))
    if f == TWO_POINT_SHIFT:
        fs, tm, tp = a.data
        return _mk(a.spec, (fs, not tm, not tp))
    if f == QUOTIENT_PRODUCT:
        tail = not _q_tail(a)
        slices = {k: complement(s) for k, s in a.data[1]}
        return quotient_set(a.spec, slices, tail)
    raise AssertionError


def difference(a, b):
    return intersect(a, complement(b))


def _tp_combine(a, b, op):
    (da, tma, tpa), (db, tmb, tpb) = a.data, b.data
    tm = op(tma, tmb)
    tp = op(tpa, tpb)
    diff = set()
    for n in da | db:
        ma = (n in da) != (tma if n < 0 else tpa)
        mb = (n in db) != (tmb if n < 0 else tpb)
        if op(ma, mb) != (tm if n < 0 else tp):
            diff.add(n)
    return _mk(a.spec, (frozenset(diff), tm, tp))


def _q_combine(a, b, setop, flagop):
    tail = flagop(_q_tail(a), _q_tail(b))
    keys = {k for k, _ in a.data[1]} | {k for k, _ in b.data[1]}
    slices = {k: setop(_q_slice(a, k), _q_slice(b, k)) for k in keys}
    return quotient_set(a.spec, slices, tail)


def is_empty(a):
    f = a.spec.family
    if f in (FINITE_CYCLE, ODOMETER):
        return not a.data
    if f == COMPACTIFIED_SHIFT:
        return not a.data[0] and not a.data[1]
    if f == TWO_POINT_SHIFT:
        return not a.data[0] and not a.data[1] and not a.data[2]
    return not a.data[0] and not a.data[1]


def equals(a, b):
    _check_same(a, b)
    return a == b


def is_subset(a, b):
    _check_same(a, b)
    return is_empty(difference(a, b))


# ---------------------------------------------------------------------------
# the dynamics on sets and points
# ---------------------------------------------------------------------------


def apply_h(a, n):
    """The exact image h^n(a)."""
    n = int(n)
    if n == 0:
        return a
    f = a.spec.family
    if f == FINITE_CYCLE:
        m = a.spec.period
        return _mk(a.spec, frozenset((p + n) % m for p in a.data))
    if f == ODOMETER:
        base = a.spec.base
        return _mk(
            a.spec,
            _odo_canonical(base, {_word_shift(base, w, n) for w in a.data}),
        )
    if f == COMPACTIFIED_SHIFT:
        fs, c = a.data
        return _mk(a.spec, (frozenset(p + n for p in fs), c))
    if f == TWO_POINT_SHIFT:
        fs, tm, tp = a.data
        lo, hi = (n, 0) if n < 0 else (0, n)
        diff = set()
        for x in {p + n for p in fs} | set(range(lo, hi)):
            inside = ((x - n) in fs) != (tm if x - n < 0 else tp)
            if inside != (tm if x < 0 else tp):
                diff.add(x)
        return _mk(a.spec, (frozenset(diff), tm, tp))
    if f == QUOTIENT_PRODUCT:
        slices = {k: apply_h(s, n) for k, s in a.data[1]}
        return quotient_set(a.spec, slices, _q_tail(a))
    raise AssertionError


def point_apply_h(spec, p, n):
    """The image h^n(p) of a point description."""
    n = int(n)
    f = spec.family
    if f == FINITE_CYCLE:
        return (int(p) + n) % spec.period
    if f == ODOMETER:
        return _odo_point_shift(spec.base, p, n)
    if f == COMPACTIFIED_SHIFT:
        if p == INF:
            return p
        return int(p) + n
    if f == TWO_POINT_SHIFT:
        if p in (MINUS_INF, PLUS_INF):
            return p
        return int(p) + n
    if f == QUOTIENT_PRODUCT:
        if p == INF:
            return p
        k, fp = p
        return (k, point_apply_h(spec.fiber, fp, n))
    raise AssertionError


def _add_carry_seq(base, digits, carry):
    out = []
    for d in digits:
        t = d + carry
        out.append(t % base)
        carry = t // base
    return out, carry


def _odo_point_shift(base, p, n):
    head, repeat = list(p[0]), tuple(p[1])
    if not repeat:
        raise InvalidPoint("odometer point needs a nonempty repeating part")
    # extend the explicit head so the carry settles to -1, 0 or 1
    need = 2
    m = abs(n)
    while m:
        need += 1
        m //= base
    while len(head) < len(p[0]) + need * len(repeat):
        head.extend(repeat)
    head, carry = _add_carry_seq(base, head, n)
    if carry == 0:
        return (tuple(head), repeat)
    out, c1 = _add_carry_seq(base, repeat, carry)
    if c1 == 0:
        # carry dies within one period; afterwards the string is unchanged
        return (tuple(head) + tuple(out), repeat)
    # the carry survives a full period, so it survives every period and the
    # mapped period repeats forever
    return (tuple(head), tuple(out))


def _odo_point_digit(base, p, i):
    head, repeat = p
    if i < len(head):
        return head[i]
    return repeat[(i - len(head)) % len(repeat)]


def contains_point(a, p):
    """Exact membership of a point description."""
    f = a.spec.family
    if f == FINITE_CYCLE:
        q = int(p)
        if not 0 <= q < a.spec.period:
            raise InvalidPoint("point outside the cycle")
        return q in a.data
    if f == ODOMETER:
        if (
            not isinstance(p, tuple)
            or len(p) != 2
            or not p[1]
            or any(not 0 <= d < a.spec.base for d in tuple(p[0]) + tuple(p[1]))
        ):
            raise InvalidPoint("bad odometer point description")
        for w in a.data:
            if all(_odo_point_digit(a.spec.base, p, i) == d for i, d in enumerate(w)):
                return True
        return False
    if f == COMPACTIFIED_SHIFT:
        fs, c = a.data
        if p == INF:
            return c
        return (int(p) in fs) != c
    if f == TWO_POINT_SHIFT:
        fs, tm, tp = a.data
        if p == MINUS_INF:
            return tm
        if p == PLUS_INF:
            return tp
        q = int(p)
        return (q in fs) != (tm if q < 0 else tp)
    if f == QUOTIENT_PRODUCT:
        if p == INF:
            return _q_tail(a)
        if not isinstance(p, tuple) or len(p) != 2:
            raise InvalidPoint("bad quotient point description")
        k, fp = p
        return contains_point(_q_slice(a, int(k)), fp)
    raise AssertionError


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------


def is_partition(sets):
    """True iff the sets are nonempty, pairwise disjoint and cover X."""
    if not sets:
        return False
    spec = sets[0].spec
    total = empty_set(spec)
    for i, a in enumerate(sets):
        if a.spec != spec:
            raise MixedSystems("partition over mixed specs")
        if is_empty(a):
            return False
        if not is_empty(intersect(total, a)):
            return False
        total = union(total, a)
    return total == whole_space(spec)


def common_refinement(P, Q):
    """All nonempty pairwise intersections, ordered by (P index, Q index)."""
    out = []
    for a in P:
        for b in Q:
            c = intersect(a, b)
            if not is_empty(c):
                out.append(c)
    return tuple(out)


def refine_by(P, pieces):
    """Refine partition P by a list of clopen sets (not necessarily a
    partition): split every element along each piece."""
    current = tuple(P)
    for piece in pieces:
        out = []
        for a in current:
            inner = intersect(a, piece)
            outer = difference(a, piece)
            for c in (inner, outer):
                if not is_empty(c):
                    out.append(c)
        current = tuple(out)
    return current


def generating_partition(spec, n):
    """The n-th member of the canonical generating sequence of partitions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = spec.family
    if f == FINITE_CYCLE:
        return tuple(
            finite_cycle_set(spec, [i]) for i in range(spec.period)
        )
    if f == ODOMETER:
        base = spec.base
        return tuple(
            _mk(spec, frozenset({_value_word(base, v, n)}))
            for v in range(base**n)
        )
    if f == COMPACTIFIED_SHIFT:
        cells = [shift_set(spec, [i]) for i in range(-n, n)]
        cells.append(shift_set(spec, range(-n, n), cofinite=True))
        return tuple(cells)
    if f == TWO_POINT_SHIFT:
        cells = [two_point_set(spec, [i]) for i in range(-n, n)]
        cells.append(two_point_set(spec, range(-n, 0), tail_minus=True))
        cells.append(two_point_set(spec, range(0, n), tail_plus=True))
        return tuple(cells)
    if f == QUOTIENT_PRODUCT:
        fiber_cells = generating_partition(spec.fiber, n)
        cells = []
        for k in range(-n, n):
            for c in fiber_cells:
                cells.append(quotient_set(spec, {k: c}))
        tail = quotient_set(
            spec,
            {k: empty_set(spec.fiber) for k in range(-n, n)},
            tail=True,
        )
        cells.append(tail)
        return tuple(cells)
    raise AssertionError


# ---------------------------------------------------------------------------
# deterministic ordering, sampling, serialization
# ---------------------------------------------------------------------------


def sort_key(a):
    """A deterministic total order on canonical clopen sets."""
    f = a.spec.family
    if f == FINITE_CYCLE:
        return (len(a.data), tuple(sorted(a.data)))
    if f == ODOMETER:
        return (len(a.data), tuple(sorted(a.data)))
    if f == COMPACTIFIED_SHIFT:
        fs, c = a.data
        return (c, len(fs), tuple(sorted(fs)))
    if f == TWO_POINT_SHIFT:
        fs, tm, tp = a.data
        return (tm, tp, len(fs), tuple(sorted(fs)))
    tail, slices = a.data
    return (tail, tuple((k, sort_key(s)) for k, s in slices))


def sample_points(a, count=8):
    """Deterministic sample of distinct points of a nonempty set."""
    f = a.spec.family
    out = []
    if f == FINITE_CYCLE:
        out = sorted(a.data)
    elif f == ODOMETER:
        base = a.spec.base
        for w in sorted(a.data):
            for i in range(max(1, count // max(1, len(a.data)))):
                head = w + _value_word(base, i, 4)
                out.append((head, (0,)))
                out.append((head, (base - 1,)))
    elif f == COMPACTIFIED_SHIFT:
        fs, c = a.data
        out = sorted(fs) if not c else []
        if c:
            out.append(INF)
            lo = min(fs, default=0) - 1
            hi = max(fs, default=0) + 1
            for i in range(count):
                if (lo - i) not in fs:
                    out.append(lo - i)
                if (hi + i) not in fs:
                    out.append(hi + i)
    elif f == TWO_POINT_SHIFT:
        fs, tm, tp = a.data
        lo = min(fs, default=0) - 1
        hi = max(fs, default=0) + 1
        for n in range(lo - count, hi + count + 1):
            if contains_point(a, n):
                out.append(n)
        if tm:
            out.append(MINUS_INF)
        if tp:
            out.append(PLUS_INF)
    else:
        tail, slices = a.data
        for k, s in slices:
            if not is_empty(s):
                out.extend((k, fp) for fp in sample_points(s, max(2, count // 4)))
        if tail:
            out.append(INF)
            ks = [k for k, _ in slices]
            edge = max((abs(k) for k in ks), default=0) + 1
            for k in (edge, -edge):
                out.extend(
                    (k, fp)
                    for fp in sample_points(whole_space(a.spec.fiber), 2)
                )
    seen = []
    for p in out:
        if p not in seen:
            seen.append(p)
        if len(seen) >= count:
            break
    return seen


def to_dict(a):
    f = a.spec.family
    if f == FINITE_CYCLE:
        return {"points": sorted(a.data)}
    if f == ODOMETER:
        return {"words": [list(w) for w in sorted(a.data)]}
    if f == COMPACTIFIED_SHIFT:
        fs, c = a.data
        return {"F": sorted(fs), "cofinite": c}
    if f == TWO_POINT_SHIFT:
        fs, tm, tp = a.data
        return {"F": sorted(fs), "tail_minus": tm, "tail_plus": tp}
    tail, slices = a.data
    return {
        "tail": tail,
        "slices": [{"k": k, "set": to_dict(s)} for k, s in slices],
    }


def from_dict(spec, d):
    f = spec.family
    if f == FINITE_CYCLE:
        return finite_cycle_set(spec, d["points"])
    if f == ODOMETER:
        return odometer_set(spec, d["words"])
    if f == COMPACTIFIED_SHIFT:
        return shift_set(spec, d["F"], d.get("cofinite", False))
    if f == TWO_POINT_SHIFT:
        return two_point_set(
            spec, d["F"], d.get("tail_minus", False), d.get("tail_plus", False)
        )
    slices = {
        int(item["k"]): from_dict(spec.fiber, item["set"])
        for item in d.get("slices", [])
    }
    return quotient_set(spec, slices, d.get("tail", False))
