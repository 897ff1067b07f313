"""First-return decompositions and tower systems over clopen bases.

A return system is a finite family of disjoint clopen bases, each carrying
the towers of its first-return decomposition: for base X_t the classes
(Y_{t,k}, J_{t,k}) where every point of Y_{t,k} first comes back to X_t
after exactly J_{t,k} steps.  The tower levels h^j(Y_{t,k}) for
0 <= j < J_{t,k} must tile the whole space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import space
from .errors import (
    BaseMismatch,
    ConstructionFailed,
    InvalidSystem,
    MaxStepsExceeded,
    NotSubordinate,
    SaturationFailure,
)
from .space import (
    COMPACTIFIED_SHIFT,
    FINITE_CYCLE,
    INF,
    ODOMETER,
    QUOTIENT_PRODUCT,
    TWO_POINT_SHIFT,
    ClopenSet,
    SystemSpec,
    apply_h,
    common_refinement,
    complement,
    contains_point,
    difference,
    empty_set,
    generating_partition,
    intersect,
    is_empty,
    is_partition,
    is_subset,
    quotient_set,
    quotient_slice,
    refine_by,
    shift_set,
    sort_key,
    union,
    whole_space,
)


@dataclass(frozen=True)
class Tower:
    """One return class: base slice Y and its constant return time J."""

    Y: ClopenSet
    J: int


@dataclass(frozen=True)
class ReturnDecomposition:
    base: ClopenSet
    classes: tuple


@dataclass(frozen=True)
class ReturnSystem:
    spec: SystemSpec
    bases: tuple
    towers: tuple  # towers[t] is a tuple of Tower, sorted by (J, set order)

    @property
    def T(self):
        return len(self.bases)

    def base_union(self):
        out = empty_set(self.spec)
        for b in self.bases:
            out = union(out, b)
        return out


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple  # of (condition, passed, witness ClopenSet or None)

    @property
    def ok(self):
        return all(p for _, p, _ in self.entries)

    def to_dict(self):
        return {
            "entries": [
                {
                    "condition": c,
                    "pass": p,
                    "witness": None if w is None else space.to_dict(w),
                }
                for c, p, w in self.entries
            ],
            "ok": self.ok,
        }


@dataclass(frozen=True)
class FiberwiseReport:
    verdict: bool
    depth: int
    z_witnesses: tuple
    failure_witness: Optional[tuple] = None  # (ClopenSet, reason)


def _set_scale(a):
    f = a.spec.family
    if f == FINITE_CYCLE:
        return a.spec.period
    if f == ODOMETER:
        return a.spec.base ** max((len(w) for w in a.data), default=0)
    if f == COMPACTIFIED_SHIFT:
        return max((abs(p) for p in a.data[0]), default=0) + 1
    if f == TWO_POINT_SHIFT:
        return max((abs(p) for p in a.data[0]), default=0) + 1
    inner = max((_set_scale(s) for _, s in a.data[1]), default=1)
    win = max((abs(k) for k, _ in a.data[1]), default=0) + 1
    return max(inner, win)


def default_max_steps(sets):
    """10 times the largest window or level scale in the inputs, plus 64."""
    scale = max((_set_scale(a) for a in sets), default=1)
    return 10 * scale + 64


def first_return_decomposition(U, max_steps=None):
    """Split U by the first-return time of h: class (Y_j, j) holds the
    points of U whose orbit re-enters U first at step j."""
    if is_empty(U):
        raise ValueError("base must be nonempty")
    if max_steps is None:
        max_steps = default_max_steps([U])
    classes = []
    A = U
    for j in range(1, max_steps + 1):
        Yj = intersect(A, apply_h(U, -j))
        if not is_empty(Yj):
            classes.append(Tower(Yj, j))
            A = difference(A, Yj)
        if is_empty(A):
            break
    if not is_empty(A):
        raise MaxStepsExceeded(
            "no return within %d steps" % max_steps, remainder=A
        )
    return ReturnDecomposition(U, tuple(classes))


def _sorted_towers(classes):
    return tuple(sorted(classes, key=lambda c: (c.J, sort_key(c.Y))))


def _is_partition_of(sets, target):
    total = empty_set(target.spec)
    for a in sets:
        if is_empty(a):
            return False
        if not is_empty(intersect(total, a)):
            return False
        total = union(total, a)
    return total == target


def tower_levels(S, upper=False):
    """All tower levels h^j(Y_{t,k}); j runs 0..J-1, or 1..J when upper."""
    out = []
    lo = 1 if upper else 0
    for towers in S.towers:
        for c in towers:
            for j in range(lo, c.J + lo):
                out.append(apply_h(c.Y, j))
    return tuple(out)


def build_from_bases(bases, P, max_steps=None):
    """Return system with the given bases; towers by first return."""
    if not bases:
        raise ValueError("need at least one base")
    spec = bases[0].spec
    if max_steps is None:
        max_steps = default_max_steps(list(bases) + list(P))
    for i, a in enumerate(bases):
        for b in bases[i + 1 :]:
            if not is_empty(intersect(a, b)):
                raise ValueError("bases must be pairwise disjoint")
        if not any(is_subset(a, U) for U in P):
            raise NotSubordinate("a base straddles the partition")
    towers = tuple(
        _sorted_towers(first_return_decomposition(a, max_steps).classes)
        for a in bases
    )
    S = ReturnSystem(spec, tuple(bases), towers)
    levels = tower_levels(S)
    if not _is_partition_of(levels, whole_space(spec)):
        covered = empty_set(spec)
        witness = None
        for a in levels:
            ov = intersect(covered, a)
            if not is_empty(ov):
                witness = ov
                break
            covered = union(covered, a)
        if witness is None:
            witness = complement(covered)
        raise SaturationFailure(
            "tower levels do not partition the space", witness=witness
        )
    return S


def validate_system(S, P):
    """Check the defining conditions of a return system; per-condition
    pass/fail entries with a witness set for each failure."""
    entries = []

    entries.append(("a", S.T >= 1, None))

    ok_b, wit_b = True, None
    for X_t in S.bases:
        if is_empty(X_t) or not any(is_subset(X_t, U) for U in P):
            ok_b, wit_b = False, X_t
            break
    entries.append(("b", ok_b, wit_b))

    ok_c, wit_c = True, None
    for t, towers in enumerate(S.towers):
        if len(towers) < 1:
            ok_c, wit_c = False, S.bases[t]
            break
    entries.append(("c", ok_c, wit_c))

    ok_d, wit_d = True, None
    for t, towers in enumerate(S.towers):
        if not _is_partition_of([c.Y for c in towers], S.bases[t]):
            ok_d, wit_d = False, S.bases[t]
            break
    entries.append(("d", ok_d, wit_d))

    ok_e, wit_e = True, None
    for t, towers in enumerate(S.towers):
        X_t = S.bases[t]
        for c in towers:
            if c.J < 1 or not is_subset(apply_h(c.Y, c.J), X_t):
                ok_e, wit_e = False, apply_h(c.Y, c.J)
                break
            for j in range(1, c.J):
                if not is_empty(intersect(apply_h(c.Y, j), X_t)):
                    ok_e, wit_e = False, intersect(apply_h(c.Y, j), X_t)
                    break
            if not ok_e:
                break
        if ok_e and not _is_partition_of(
            [apply_h(c.Y, c.J) for c in towers], X_t
        ):
            ok_e, wit_e = False, X_t
        if not ok_e:
            break
    entries.append(("e", ok_e, wit_e))

    levels = tower_levels(S)
    ok_f = _is_partition_of(levels, whole_space(S.spec))
    wit_f = None
    if not ok_f:
        covered = empty_set(S.spec)
        for a in levels:
            ov = intersect(covered, a)
            if not is_empty(ov):
                wit_f = ov
                break
            covered = union(covered, a)
        if wit_f is None:
            wit_f = complement(covered)
    entries.append(("f", ok_f, wit_f))

    return ValidationReport(tuple(entries))


def tower_partitions(S):
    """(P1, P2): the level partitions with j in 0..J-1 and 1..J."""
    P1 = tower_levels(S, upper=False)
    P2 = tower_levels(S, upper=True)
    if not is_partition(list(P1)):
        raise InvalidSystem("tower levels do not partition the space")
    return P1, P2


def refine_system(S, P_target, include_upper=True):
    """Split every tower slice Y so that all its levels h^j(Y), j = 0..J,
    land inside single elements of P_target.  Bases and return times are
    unchanged.  With include_upper false, only the levels j = 0..J-1 are
    constrained."""
    new_towers = []
    for towers in S.towers:
        classes = []
        for c in towers:
            top = c.J + 1 if include_upper else c.J
            pieces = refine_by(
                [c.Y],
                [apply_h(U, -j) for j in range(top) for U in P_target],
            )
            for Y in pieces:
                classes.append(Tower(Y, c.J))
        new_towers.append(_sorted_towers(classes))
    return ReturnSystem(S.spec, S.bases, tuple(new_towers))


def is_finer(P1, P2):
    """True iff every element of P1 is contained in some element of P2."""
    return all(any(is_subset(a, b) for b in P2) for a in P1)


def finer_system_criterion(S, S2):
    """True iff every tower slice of S2 is contained in a tower slice of S.
    Requires the two systems to have the same union of bases."""
    if S.base_union() != S2.base_union():
        raise BaseMismatch("systems have different base unions")
    slices = [c.Y for towers in S.towers for c in towers]
    for towers in S2.towers:
        for c in towers:
            if not any(is_subset(c.Y, Y) for Y in slices):
                return False
    return True


def min_return_stats(S):
    """(min J over all towers, min J over the non-leading towers or None)."""
    all_j = [c.J for towers in S.towers for c in towers]
    rest = [c.J for towers in S.towers for c in towers[1:]]
    return (min(all_j), min(rest) if rest else None)


# ---------------------------------------------------------------------------
# canonical bases per family
# ---------------------------------------------------------------------------


def _canonical_bases(spec, n):
    """Level-n bases meeting the known minimal set of every fiber."""
    f = spec.family
    if f == FINITE_CYCLE:
        return [space.finite_cycle_set(spec, [0])]
    if f == ODOMETER:
        return [space.cylinder(spec, (0,) * n)]
    if f == COMPACTIFIED_SHIFT:
        return [shift_set(spec, range(-n, n), cofinite=True)]
    if f == TWO_POINT_SHIFT:
        return [space.two_point_set(spec, range(-n, 0), tail_minus=True)]
    if f == QUOTIENT_PRODUCT:
        bases = [
            quotient_set(
                spec, {k: empty_set(spec.fiber) for k in range(-n, n)}, tail=True
            )
        ]
        for k in range(-n, n):
            for fb in _canonical_bases(spec.fiber, n):
                bases.append(quotient_set(spec, {k: fb}))
        return bases
    raise AssertionError


def _base_witness(spec, base):
    """One concrete point of a canonical base."""
    f = spec.family
    if f == FINITE_CYCLE:
        return 0
    if f == ODOMETER:
        return ((), (0,))
    if f == COMPACTIFIED_SHIFT:
        return INF
    if f == TWO_POINT_SHIFT:
        return space.MINUS_INF
    if space.quotient_tail_flag(base):
        return INF
    k = space.quotient_window(base)[0]
    return (k, _base_witness(spec.fiber, quotient_slice(base, k)))


def check_fiberwise(spec, depth, max_steps=None):
    """Try to build a return system subordinate to each generating
    partition up to the requested depth, from the canonical bases."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    last_bases = None
    for n in range(1, depth + 1):
        bases = _canonical_bases(spec, n)
        P = generating_partition(spec, n)
        try:
            build_from_bases(bases, P, max_steps)
        except MaxStepsExceeded as e:
            return FiberwiseReport(
                False,
                n,
                (),
                (e.remainder, "orbit does not return to its base"),
            )
        except (SaturationFailure, NotSubordinate) as e:
            wit = getattr(e, "witness", None)
            return FiberwiseReport(False, n, (), (wit, str(e)))
        last_bases = bases
    witnesses = tuple(_base_witness(spec, b) for b in last_bases)
    return FiberwiseReport(True, depth, witnesses, None)


def nested_systems(spec, depth, max_steps=None):
    """The systems over the canonical bases at levels 1..depth; bases
    shrink level to level and levels refine the generating partitions."""
    report = check_fiberwise(spec, depth, max_steps)
    if not report.verdict:
        raise InvalidSystem(
            "spec fails the fiberwise check at depth %d" % report.depth
        )
    out = []
    prev = None
    for n in range(1, depth + 1):
        bases = _canonical_bases(spec, n)
        P = generating_partition(spec, n)
        S = build_from_bases(bases, P, max_steps)
        P1, _ = tower_partitions(S)
        assert is_finer(P1, P)
        if prev is not None:
            for b in bases:
                assert any(is_subset(b, c) for c in prev.bases)
        out.append(S)
        prev = S
    return out


# ---------------------------------------------------------------------------
# adapted system pairs
# ---------------------------------------------------------------------------


def _adapted_bases(spec, P, N):
    f = spec.family
    if f == FINITE_CYCLE:
        return [space.finite_cycle_set(spec, [0])]
    if f == ODOMETER:
        L = max(
            (len(w) for cell in P for w in cell.data),
            default=1,
        )
        L = max(L, 1)
        while spec.base**L <= N:
            L += 1
        return [space.cylinder(spec, (0,) * L)]
    if f == COMPACTIFIED_SHIFT:
        U = next(c for c in P if contains_point(c, INF))
        F = sorted(U.data[0])
        if F:
            b = F[-1] + 1
            a = min(F[0] - N, b - (N + 2))
        else:
            b = 1
            a = b - (N + 2)
        return [shift_set(spec, range(a + 1, b), cofinite=True)]
    if f == QUOTIENT_PRODUCT:
        window = sorted({k for c in P for k in space.quotient_window(c)})
        bases = [
            quotient_set(
                spec, {k: empty_set(spec.fiber) for k in window}, tail=True
            )
        ]
        for k in window:
            Pk = [
                s
                for s in (quotient_slice(c, k) for c in P)
                if not is_empty(s)
            ]
            for fb in _adapted_bases(spec.fiber, Pk, N):
                bases.append(quotient_set(spec, {k: fb}))
        return bases
    raise InvalidSystem("family has no adapted construction")


def _minimal_witness_ok(spec, X_t, Y):
    """Does Y meet the known minimal set of every fiber that X_t meets?"""
    f = spec.family
    if f in (FINITE_CYCLE, ODOMETER):
        return not is_empty(Y)
    if f == COMPACTIFIED_SHIFT:
        if contains_point(X_t, INF):
            return contains_point(Y, INF)
        return not is_empty(Y)
    if f == QUOTIENT_PRODUCT:
        if contains_point(X_t, INF) and not contains_point(Y, INF):
            return False
        keys = set(space.quotient_window(X_t)) | set(space.quotient_window(Y))
        if space.quotient_tail_flag(X_t):
            keys.add(max((abs(k) for k in keys), default=0) + 1)
        for k in keys:
            if is_empty(quotient_slice(X_t, k)):
                continue
            if not _minimal_witness_ok(
                spec.fiber, quotient_slice(X_t, k), quotient_slice(Y, k)
            ):
                return False
        return True
    return False


def adapted_system_pair(spec, P, N, max_steps=None):
    """A pair (S, S2) of return systems subordinate to P, suitable for
    length-N approximation: the levels of both refine P, the first N
    iterates of X_t minus its fixed core stay pairwise disjoint, and S2
    is based on the images h^{J_{t,1}}(Y_{t,1}) with levels refining both
    level partitions of S."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not is_partition(list(P)):
        raise ValueError("P must be a partition")
    bases = _adapted_bases(spec, P, N)
    if max_steps is None:
        max_steps = default_max_steps(list(bases) + list(P)) + 20 * N
    S = refine_system(build_from_bases(bases, P, max_steps), P)

    bases2 = [apply_h(towers[0].Y, towers[0].J) for towers in S.towers]
    P1, P2 = tower_partitions(S)
    S2 = refine_system(
        build_from_bases(bases2, P, max_steps),
        common_refinement(P1, P2),
        include_upper=False,
    )

    for t, towers in enumerate(S.towers):
        if not _minimal_witness_ok(spec, S.bases[t], towers[0].Y):
            raise ConstructionFailed(
                "leading slice misses a fiber minimal set", postcondition="a"
            )
    for X_t in S.bases:
        for n in range(N):
            img = apply_h(X_t, n)
            if not any(is_subset(img, U) for U in P):
                raise ConstructionFailed(
                    "iterate of a base straddles the partition",
                    postcondition="b",
                )
    if not (is_finer(P1, P) and is_finer(P2, P)):
        raise ConstructionFailed(
            "level partitions do not refine the input", postcondition="c"
        )
    hats = [hat_base(S, t) for t in range(S.T)]
    iters = [
        apply_h(X, i) for X in hats for i in range(N + 1) if not is_empty(X)
    ]
    for i, A in enumerate(iters):
        for B in iters[i + 1 :]:
            if not is_empty(intersect(A, B)):
                raise ConstructionFailed(
                    "iterates of the reduced bases overlap", postcondition="d"
                )
    P1b, _ = tower_partitions(S2)
    if not (is_finer(P1b, P1) and is_finer(P1b, P2)):
        raise ConstructionFailed(
            "second system does not refine the first", postcondition="e"
        )
    return S, S2


def hat_base(S, t):
    """X_t minus the fixed core Y_{t,1} intersect h^{J_{t,1}}(Y_{t,1})."""
    lead = S.towers[t][0]
    return difference(
        S.bases[t], intersect(lead.Y, apply_h(lead.Y, lead.J))
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def system_to_dict(S):
    return {
        "bases": [space.to_dict(b) for b in S.bases],
        "towers": [
            [{"Y": space.to_dict(c.Y), "J": c.J} for c in towers]
            for towers in S.towers
        ],
    }


def system_from_dict(spec, d):
    bases = tuple(space.from_dict(spec, b) for b in d["bases"])
    towers = tuple(
        _sorted_towers(
            Tower(space.from_dict(spec, c["Y"]), int(c["J"])) for c in ts
        )
        for ts in d["towers"]
    )
    return ReturnSystem(spec, bases, towers)
