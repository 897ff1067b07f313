"""Shared randomized generators for the test suite.

All generators take an explicit random.Random so every test run is
deterministic.
"""

from __future__ import annotations

import random

from zdsys import space, towers


def all_specs():
    return [
        space.finite_cycle(6),
        space.odometer(2),
        space.compactified_shift(),
        space.two_point_shift(),
        space.quotient_product(space.odometer(2)),
    ]


def system_specs():
    """Families on which valid return systems exist."""
    return [
        space.finite_cycle(6),
        space.odometer(2),
        space.compactified_shift(),
        space.quotient_product(space.odometer(2)),
        space.quotient_product(space.compactified_shift()),
        space.quotient_product(space.finite_cycle(3)),
    ]


def random_set(spec, rng, depth=3):
    f = spec.family
    if f == space.FINITE_CYCLE:
        pts = [i for i in range(spec.period) if rng.random() < 0.5]
        return space.finite_cycle_set(spec, pts)
    if f == space.ODOMETER:
        cells = space.generating_partition(spec, depth)
        chosen = [c for c in cells if rng.random() < 0.5]
        out = space.empty_set(spec)
        for c in chosen:
            out = space.union(out, c)
        return out
    if f == space.COMPACTIFIED_SHIFT:
        F = [n for n in range(-6, 7) if rng.random() < 0.3]
        return space.shift_set(spec, F, cofinite=rng.random() < 0.5)
    if f == space.TWO_POINT_SHIFT:
        F = [n for n in range(-6, 7) if rng.random() < 0.3]
        return space.two_point_set(
            spec, F, rng.random() < 0.5, rng.random() < 0.5
        )
    slices = {}
    for k in range(-2, 3):
        if rng.random() < 0.6:
            slices[k] = random_set(spec.fiber, rng, depth=2)
    return space.quotient_set(spec, slices, tail=rng.random() < 0.5)


def random_point(spec, rng):
    a = random_set(spec, rng)
    pts = space.sample_points(a, 4) or space.sample_points(
        space.whole_space(spec), 4
    )
    return rng.choice(pts)


def random_partition(spec, rng, depth=2, max_parts=4):
    """A random coarsening of a generating partition."""
    cells = list(space.generating_partition(spec, depth))
    rng.shuffle(cells)
    parts = rng.randint(1, min(max_parts, len(cells)))
    groups = [[] for _ in range(parts)]
    for i, c in enumerate(cells):
        groups[i % parts].append(c)
    out = []
    for g in groups:
        u = g[0]
        for c in g[1:]:
            u = space.union(u, c)
        out.append(u)
    return out


def valid_system(spec, rng=None, max_steps=None):
    """A concrete valid return system for the family, with at least two
    towers where the family allows it."""
    f = spec.family
    if f == space.FINITE_CYCLE:
        base = space.finite_cycle_set(spec, [0, 1])
        P = [space.whole_space(spec)]
    elif f == space.ODOMETER:
        base = space.cylinder(spec, (0, 0))
        P = [space.whole_space(spec)]
    elif f == space.COMPACTIFIED_SHIFT:
        base = space.shift_set(spec, range(1, 7), cofinite=True)
        P = [base, space.complement(base)]
    elif f == space.QUOTIENT_PRODUCT:
        n = 2
        base_sets = towers._canonical_bases(spec, n)
        P = list(space.generating_partition(spec, n))
        return towers.build_from_bases(base_sets, P, max_steps)
    else:
        raise ValueError("no valid system for this family")
    return towers.build_from_bases([base], P, max_steps)


def _proper_piece(Y, spec):
    """A proper nonempty clopen subset of Y, if one exists."""
    for n in (1, 2, 3):
        for cell in space.generating_partition(spec, n):
            piece = space.intersect(Y, cell)
            if not space.is_empty(piece) and piece != Y:
                return piece
    return None


def mutants(S):
    """Single-field corruptions of a valid system, each of which breaks
    one of the defining conditions.  Yields (description, mutant)."""
    spec = S.spec

    def rebuild(t, new_classes):
        ts = list(S.towers)
        ts[t] = tuple(new_classes)
        return towers.ReturnSystem(spec, S.bases, tuple(ts))

    for t, tws in enumerate(S.towers):
        for k, c in enumerate(tws):
            others = [d for i, d in enumerate(tws) if i != k]

            yield (
                "J+1 at (%d,%d)" % (t, k),
                rebuild(t, others + [towers.Tower(c.Y, c.J + 1)]),
            )
            if c.J >= 2:
                yield (
                    "J-1 at (%d,%d)" % (t, k),
                    rebuild(t, others + [towers.Tower(c.Y, c.J - 1)]),
                )
            piece = _proper_piece(c.Y, spec)
            if piece is not None:
                yield (
                    "shrink Y at (%d,%d)" % (t, k),
                    rebuild(t, others + [towers.Tower(piece, c.J)]),
                )
            hY = space.apply_h(c.Y, 1)
            if hY != c.Y:
                yield (
                    "translate Y at (%d,%d)" % (t, k),
                    rebuild(t, others + [towers.Tower(hY, c.J)]),
                )
            yield (
                "duplicate tower (%d,%d)" % (t, k),
                rebuild(t, list(tws) + [towers.Tower(c.Y, c.J)]),
            )
            yield ("drop tower (%d,%d)" % (t, k), rebuild(t, others))
            for k2 in range(k + 1, len(tws)):
                d = tws[k2]
                rest = [e for i, e in enumerate(tws) if i not in (k, k2)]
                yield (
                    "merge Y (%d,%d)+(%d,%d)" % (t, k, t, k2),
                    rebuild(
                        t,
                        rest
                        + [towers.Tower(space.union(c.Y, d.Y), c.J), d],
                    ),
                )
                if d.J != c.J:
                    yield (
                        "swap J (%d,%d)/(%d,%d)" % (t, k, t, k2),
                        rebuild(
                            t,
                            rest
                            + [towers.Tower(c.Y, d.J), towers.Tower(d.Y, c.J)],
                        ),
                    )
        piece = _proper_piece(S.bases[t], spec)
        if piece is not None:
            bases = list(S.bases)
            bases[t] = space.difference(S.bases[t], piece)
            yield (
                "shrink base %d" % t,
                towers.ReturnSystem(spec, tuple(bases), S.towers),
            )


def subordinating_partition(S):
    """A partition that S is subordinate to: bases plus the rest split
    into the tower levels not inside any base."""
    rest = space.complement(S.base_union())
    out = list(S.bases)
    if not space.is_empty(rest):
        out.append(rest)
    return out
