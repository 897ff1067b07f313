"""Return systems: decompositions, validation, refinement, adapted pairs."""

import random

import pytest

import genutil
import oracles
from zdsys import space, towers
from zdsys.errors import (
    BaseMismatch,
    ConstructionFailed,
    MaxStepsExceeded,
    NotSubordinate,
    SaturationFailure,
)

SHIFT = space.compactified_shift()
ODO = space.odometer(2)


def shift_window_system(a=0, b=7):
    """Base {inf} u (-inf, a] u [b, inf) with the matching two-block
    partition."""
    base = space.shift_set(SHIFT, range(a + 1, b), cofinite=True)
    P = [base, space.complement(base)]
    return towers.build_from_bases([base], P), base, P


def test_shift_decomposition_example():
    S, base, P = shift_window_system(0, 7)
    assert S.T == 1
    assert [c.J for c in S.towers[0]] == [1, 7]
    assert S.towers[0][1].Y == space.shift_set(SHIFT, [0])
    assert S.towers[0][0].Y == space.shift_set(SHIFT, range(0, 7),
                                               cofinite=True)


def test_odometer_decomposition_single_class():
    for L in (1, 2, 3):
        U = space.cylinder(ODO, (0,) * L)
        dec = towers.first_return_decomposition(U)
        assert len(dec.classes) == 1
        assert dec.classes[0].J == 2**L
        assert dec.classes[0].Y == U


def test_cycle_decomposition():
    spec = space.finite_cycle(5)
    dec = towers.first_return_decomposition(
        space.finite_cycle_set(spec, [0])
    )
    assert [(c.J,) for c in dec.classes] == [(5,)]


def test_decomposition_classes_partition_base():
    rng = random.Random(3)
    for spec in genutil.system_specs():
        S = genutil.valid_system(spec)
        for t, tws in enumerate(S.towers):
            union = space.empty_set(spec)
            for c in tws:
                assert space.is_empty(space.intersect(union, c.Y))
                union = space.union(union, c.Y)
            assert union == S.bases[t]


def test_return_time_matches_orbit_simulation():
    """Re-derive the return time pointwise on sampled points."""
    checked = 0
    systems = [genutil.valid_system(spec) for spec in genutil.system_specs()]
    systems.append(shift_window_system(-3, 4)[0])
    systems.append(
        towers.build_from_bases(
            [space.cylinder(ODO, (0, 0, 0))], [space.whole_space(ODO)]
        )
    )
    cyc12 = space.finite_cycle(12)
    systems.append(
        towers.build_from_bases(
            [space.finite_cycle_set(cyc12, [0, 1, 5])],
            [space.whole_space(cyc12)],
        )
    )
    for S in systems:
        spec = S.spec
        for t, tws in enumerate(S.towers):
            base = S.bases[t]
            for c in tws:
                for p in space.sample_points(c.Y, 12):
                    n = oracles.first_return_time(
                        lambda q: space.point_apply_h(spec, q, 1),
                        lambda q: space.contains_point(base, q),
                        p,
                        c.J + 5,
                    )
                    assert n == c.J
                    checked += 1
    assert checked >= 100


def test_two_point_base_never_returns():
    spec = space.two_point_shift()
    base = space.two_point_set(spec, [0], tail_minus=True)
    with pytest.raises(MaxStepsExceeded) as e:
        towers.build_from_bases(
            [base], [space.whole_space(spec)], max_steps=60
        )
    assert e.value.remainder is not None
    assert not space.is_empty(e.value.remainder)


def test_build_rejects_straddling_base():
    base = space.shift_set(SHIFT, range(1, 7), cofinite=True)
    P = space.generating_partition(SHIFT, 2)
    with pytest.raises(NotSubordinate):
        towers.build_from_bases([base], list(P))


def test_build_detects_saturation_failure():
    # two bases in the same orbit of a finite cycle overlap in levels
    spec = space.finite_cycle(4)
    with pytest.raises(SaturationFailure):
        towers.build_from_bases(
            [
                space.finite_cycle_set(spec, [0]),
                space.finite_cycle_set(spec, [2]),
            ],
            [space.whole_space(spec)],
        )


def test_validate_passes_on_examples():
    for spec in genutil.system_specs():
        S = genutil.valid_system(spec)
        P = genutil.subordinating_partition(S)
        rep = towers.validate_system(S, P)
        assert rep.ok, (spec.family, rep.entries)


def test_validate_flags_wrong_return_time():
    S, base, P = shift_window_system(0, 7)
    bad = towers.ReturnSystem(
        SHIFT,
        S.bases,
        ((S.towers[0][0], towers.Tower(S.towers[0][1].Y, 6)),),
    )
    rep = towers.validate_system(bad, P)
    entries = dict((c, (p, w)) for c, p, w in rep.entries)
    assert not entries["e"][0]
    assert entries["e"][1] is not None


def test_tower_partitions_example():
    S, base, P = shift_window_system(0, 7)
    P1, P2 = towers.tower_partitions(S)
    assert len(P1) == 8 and len(P2) == 8
    assert space.is_partition(list(P1))
    assert space.is_partition(list(P2))
    singles = [space.shift_set(SHIFT, [i]) for i in range(7)]
    for s in singles:
        assert s in P1


def test_refine_system_example():
    S, base, P = shift_window_system(0, 7)
    target = [
        space.shift_set(SHIFT, [7]),
        space.complement(space.shift_set(SHIFT, [7])),
    ]
    S2 = towers.refine_system(S, target)
    assert S2.bases == S.bases
    assert sorted(c.J for c in S2.towers[0]) == [1, 1, 7]
    slices = [c.Y for c in S2.towers[0] if c.J == 1]
    assert space.shift_set(SHIFT, [7]) in slices
    P1, P2 = towers.tower_partitions(S2)
    assert towers.is_finer(P1, target)
    assert towers.is_finer(P2, target)


def test_refine_no_op_when_already_finer():
    U = space.cylinder(ODO, (0, 0))
    S = towers.build_from_bases([U], [space.whole_space(ODO)])
    P1, _ = towers.tower_partitions(S)
    S2 = towers.refine_system(S, P1)
    assert S2 == S


def test_refine_odometer_cylinder_split():
    U = space.cylinder(ODO, (0, 0))
    S = towers.build_from_bases([U], [space.whole_space(ODO)])
    target = space.generating_partition(ODO, 3)
    S2 = towers.refine_system(S, list(target))
    assert [c.J for c in S2.towers[0]] == [4, 4]
    assert {c.Y for c in S2.towers[0]} == {
        space.cylinder(ODO, (0, 0, 0)),
        space.cylinder(ODO, (0, 0, 1)),
    }


@pytest.mark.parametrize("spec", genutil.system_specs())
def test_refinement_postconditions_randomized(spec):
    rng = random.Random(17)
    S = genutil.valid_system(spec)
    P = genutil.subordinating_partition(S)
    P1, P2 = towers.tower_partitions(S)
    for _ in range(50):
        target = genutil.random_partition(spec, rng)
        S2 = towers.refine_system(S, target)
        # same bases, valid, slices refine the original slices
        assert S2.bases == S.bases
        assert towers.validate_system(S2, P).ok
        assert towers.finer_system_criterion(S, S2)
        Q1, Q2 = towers.tower_partitions(S2)
        assert towers.is_finer(Q1, target)
        assert towers.is_finer(Q2, target)
        # level refinement holds on both sides at once
        assert towers.is_finer(Q1, P1) == towers.is_finer(Q2, P2)
        assert towers.is_finer(Q1, P1)


def test_finer_system_criterion_base_mismatch():
    S1 = genutil.valid_system(space.finite_cycle(6))
    spec = space.finite_cycle(6)
    S2 = towers.build_from_bases(
        [space.finite_cycle_set(spec, [0])], [space.whole_space(spec)]
    )
    with pytest.raises(BaseMismatch):
        towers.finer_system_criterion(S1, S2)


def test_is_finer_trivial_cases():
    spec = space.finite_cycle(3)
    singles = list(space.generating_partition(spec, 1))
    assert towers.is_finer(singles, [space.whole_space(spec)])
    assert not towers.is_finer([space.whole_space(spec)], singles)


def test_check_fiberwise_verdicts():
    assert towers.check_fiberwise(SHIFT, 3).verdict
    assert towers.check_fiberwise(ODO, 3).verdict
    assert towers.check_fiberwise(space.finite_cycle(5), 3).verdict
    assert towers.check_fiberwise(
        space.quotient_product(ODO), 2
    ).verdict
    rep = towers.check_fiberwise(space.two_point_shift(), 2, max_steps=80)
    assert not rep.verdict
    assert rep.failure_witness is not None


def test_check_fiberwise_witnesses():
    rep = towers.check_fiberwise(SHIFT, 2)
    assert rep.z_witnesses == (space.INF,)
    rep = towers.check_fiberwise(space.quotient_product(ODO), 2)
    assert space.INF in rep.z_witnesses
    assert any(isinstance(w, tuple) for w in rep.z_witnesses)


def test_nested_systems():
    out = towers.nested_systems(ODO, 3)
    assert [S.towers[0][0].J for S in out] == [2, 4, 8]
    for n, S in enumerate(out, start=1):
        P1, _ = towers.tower_partitions(S)
        assert towers.is_finer(
            P1, list(space.generating_partition(ODO, n))
        )
    for prev, nxt in zip(out, out[1:]):
        for b in nxt.bases:
            assert any(space.is_subset(b, c) for c in prev.bases)

    cyc = towers.nested_systems(space.finite_cycle(4), 2)
    assert [S.towers[0][0].J for S in cyc] == [4, 4]

    sh = towers.nested_systems(SHIFT, 2)
    assert all(S.T == 1 for S in sh)


def test_adapted_pair_shift_example():
    U = space.shift_set(SHIFT, range(1, 8), cofinite=True)
    P = [U] + [space.shift_set(SHIFT, [i]) for i in range(1, 8)]
    S, S2 = towers.adapted_system_pair(SHIFT, P, 3)
    js = [c.J for c in S.towers[0]]
    assert js[0] == 1 and js[1] > 3
    js2 = [c.J for c in S2.towers[0]]
    assert js2 == [1, js[1] + 1]
    # X-hat iterates disjoint, and the bases of S2 are the tower images
    for t, tws in enumerate(S.towers):
        lead = tws[0]
        assert S2.bases[t] == space.apply_h(lead.Y, lead.J)


def test_adapted_pair_odometer_equal_systems():
    P = list(space.generating_partition(ODO, 2))
    S, S2 = towers.adapted_system_pair(ODO, P, 3)
    assert S == S2
    assert [c.J for c in S.towers[0]] == [4]
    assert space.is_empty(towers.hat_base(S, 0))


def test_adapted_pair_min_return_grows_with_N():
    # aperiodic family: every return time at least N
    for N in (2, 5, 9):
        P = list(space.generating_partition(ODO, 1))
        S, _ = towers.adapted_system_pair(ODO, P, N)
        assert towers.min_return_stats(S)[0] >= N


def test_cycle_always_has_short_return():
    # periodic family: some return time at most the period
    spec = space.finite_cycle(5)
    S = genutil.valid_system(spec)
    assert towers.min_return_stats(S)[0] <= 5


def test_min_return_stats():
    S, base, P = shift_window_system(0, 7)
    assert towers.min_return_stats(S) == (1, 7)
    U = space.cylinder(ODO, (0, 0, 0))
    S = towers.build_from_bases([U], [space.whole_space(ODO)])
    assert towers.min_return_stats(S) == (8, None)


def test_adapted_pair_quotient():
    fiber = ODO
    spec = space.quotient_product(fiber)
    fcells = space.generating_partition(fiber, 1)
    P = []
    for k in range(0, 4):
        for c in fcells:
            P.append(space.quotient_set(spec, {k: c}))
    P.append(
        space.quotient_set(
            spec,
            {k: space.empty_set(fiber) for k in range(0, 4)},
            tail=True,
        )
    )
    S, S2 = towers.adapted_system_pair(spec, P, 2)
    assert S.T == 5
    js = sorted(tws[0].J for tws in S.towers)
    assert js == [1, 4, 4, 4, 4]


def test_adapted_pair_postconditions_asserted():
    U = space.shift_set(SHIFT, range(1, 8), cofinite=True)
    P = [U] + [space.shift_set(SHIFT, [i]) for i in range(1, 8)]
    for N in (1, 2, 4, 8):
        S, S2 = towers.adapted_system_pair(SHIFT, P, N)
        P1, P2 = towers.tower_partitions(S)
        assert towers.is_finer(P1, P) and towers.is_finer(P2, P)
        hats = [towers.hat_base(S, t) for t in range(S.T)]
        pieces = [
            space.apply_h(X, i)
            for X in hats
            for i in range(N + 1)
            if not space.is_empty(X)
        ]
        for i, A in enumerate(pieces):
            for B in pieces[i + 1 :]:
                assert space.is_empty(space.intersect(A, B))


def test_orbit_saturation_covers_samples():
    # forward orbit of each base sweeps every sampled point
    for spec in genutil.system_specs():
        S = genutil.valid_system(spec)
        whole = space.whole_space(spec)
        bound = 2 * max(c.J for tws in S.towers for c in tws) + 2
        for p in space.sample_points(whole, 10):
            hit = False
            for t in range(S.T):
                base = S.bases[t]
                if any(
                    space.contains_point(
                        base, space.point_apply_h(spec, p, -j)
                    )
                    for j in range(0, bound)
                ):
                    hit = True
                    break
            assert hit


def test_top_images_tile_base():
    # the images h^J(Y) of the slices partition the base again
    for spec in genutil.system_specs():
        S = genutil.valid_system(spec)
        for t, tws in enumerate(S.towers):
            tops = [space.apply_h(c.Y, c.J) for c in tws]
            union = space.empty_set(spec)
            for a in tops:
                assert space.is_empty(space.intersect(union, a))
                union = space.union(union, a)
            assert union == S.bases[t]


def test_system_serialization_round_trip():
    for spec in genutil.system_specs():
        S = genutil.valid_system(spec)
        d = towers.system_to_dict(S)
        assert towers.system_from_dict(spec, d) == S


def test_mutants_all_caught_smoke():
    S = genutil.valid_system(SHIFT)
    P = genutil.subordinating_partition(S)
    count = 0
    for desc, M in genutil.mutants(S):
        assert not towers.validate_system(M, P).ok, desc
        count += 1
    assert count >= 10
