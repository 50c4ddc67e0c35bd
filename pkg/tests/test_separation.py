import pytest

from defdom.graph import Graph, SplitMix64, VertexSet
from defdom.separation import (
    CutBuffer,
    buffer_update,
    build_dual_ray,
    cut_from_violator,
    dominates,
    find_violator_mask,
    iter_connected_subsets,
    separate_multi,
    violation,
)
from defdom.verify import Attack, DefenderSet, is_k_defensive


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


class TestCut:
    def test_fields(self):
        g = path(4)
        cut = cut_from_violator(g, VertexSet.of([0, 2]))
        assert cut.coverage == VertexSet.of([0, 1, 2, 3])
        assert cut.rhs == 2

    def test_empty_violator_rejected(self):
        with pytest.raises(ValueError):
            cut_from_violator(path(3), VertexSet())

    def test_violation_sign(self):
        g = path(3)
        cut = cut_from_violator(g, VertexSet.of([0, 2]))
        assert violation(cut, DefenderSet.of([1])) == 1
        assert violation(cut, DefenderSet.of([0, 2])) == 0
        assert cut.satisfied_by(DefenderSet.of([0, 2]))
        assert not cut.satisfied_by(DefenderSet.of([1]))


class TestDualRay:
    def test_ray_certifies_violation(self):
        g = path(3)
        attack = Attack.of([0, 2])
        ray = build_dual_ray(g, attack, VertexSet.of([0, 2]))
        assert ray.is_feasible_direction(g)
        # ray objective at xhat equals the cut violation
        assert ray.objective_at(DefenderSet.of([1])) == 1
        assert ray.objective_at(DefenderSet.of([0, 2])) == 0

    def test_violator_must_be_inside_attack(self):
        g = path(4)
        with pytest.raises(ValueError):
            build_dual_ray(g, Attack.of([0]), VertexSet.of([0, 3]))

    def test_random_rays_are_feasible_directions(self):
        rng = SplitMix64(17)
        for _ in range(20):
            g = random_graph(rng, 6 + rng.randrange(4), 0.4)
            xhat = DefenderSet.of([v for v in range(g.n) if rng.random() < 0.3])
            m = find_violator_mask(g, xhat.members.mask, 3)
            if m is None:
                continue
            s = VertexSet(m)
            ray = build_dual_ray(g, Attack(s), s)
            assert ray.is_feasible_direction(g)
            assert ray.objective_at(xhat) >= 1


class TestDominance:
    def test_superset_with_shared_coverage_dominates(self):
        # star: N[{leaf}] vs N[{leaf, leaf}] both hit the center
        g = Graph(4, [(0, 1), (0, 2), (0, 3)])
        small = cut_from_violator(g, VertexSet.of([1]))
        big = cut_from_violator(g, VertexSet.of([1, 2]))
        assert dominates(big, small)
        assert not dominates(small, big)

    def test_disjoint_growth_does_not_dominate(self):
        g = Graph(6, [(0, 1), (2, 3), (4, 5)])
        a = cut_from_violator(g, VertexSet.of([0]))
        b = cut_from_violator(g, VertexSet.of([0, 2]))
        # one extra violator vertex but two extra coverage vertices
        assert not dominates(b, a)

    def test_requires_strict_subset(self):
        g = path(4)
        a = cut_from_violator(g, VertexSet.of([0]))
        b = cut_from_violator(g, VertexSet.of([1]))
        assert not dominates(a, a)
        assert not dominates(a, b)

    def test_dominance_implies_logical_implication(self):
        rng = SplitMix64(23)
        checked = 0
        for _ in range(8):
            g = random_graph(rng, 6, 0.5)
            subsets = [VertexSet(m) for m, _, _ in iter_connected_subsets(g, 3)]
            cuts = [cut_from_violator(g, s) for s in subsets]
            for a in cuts:
                for b in cuts:
                    if dominates(a, b):
                        checked += 1
                        for x in range(1 << g.n):
                            if a.satisfied_by(x):
                                assert b.satisfied_by(x)
        assert checked > 0


class TestCutBuffer:
    def g(self):
        return Graph(4, [(0, 1), (0, 2), (0, 3)])  # star

    def test_insert_and_reject_non_violator(self):
        g = self.g()
        buf = CutBuffer(capacity=5)
        buffer_update(buf, g, VertexSet.of([1, 2]), DefenderSet.of([]))
        assert len(buf) == 1
        with pytest.raises(ValueError):
            buffer_update(buf, g, VertexSet.of([1]), DefenderSet.of([0, 1]))

    def test_dominated_candidate_is_rejected(self):
        g = self.g()
        buf = CutBuffer(capacity=5)
        buffer_update(buf, g, VertexSet.of([1, 2]), DefenderSet.of([]))
        buffer_update(buf, g, VertexSet.of([1]), DefenderSet.of([]))
        assert [c.violator for c in buf.cuts()] == [VertexSet.of([1, 2])]

    def test_dominated_entries_are_dropped(self):
        g = self.g()
        buf = CutBuffer(capacity=5)
        buffer_update(buf, g, VertexSet.of([1]), DefenderSet.of([]))
        buffer_update(buf, g, VertexSet.of([1, 2]), DefenderSet.of([]))
        assert [c.violator for c in buf.cuts()] == [VertexSet.of([1, 2])]

    def test_duplicate_is_noop(self):
        g = self.g()
        buf = CutBuffer(capacity=5)
        buffer_update(buf, g, VertexSet.of([1, 2]), DefenderSet.of([]))
        buffer_update(buf, g, VertexSet.of([1, 2]), DefenderSet.of([]))
        assert len(buf) == 1

    def test_full_buffer_evicts_only_for_strictly_larger_violation(self):
        g = Graph(6, [(0, 1), (2, 3), (4, 5)])  # disjoint edges, no dominance
        buf = CutBuffer(capacity=2)
        buffer_update(buf, g, VertexSet.of([0]), DefenderSet.of([]))  # viol 1
        buffer_update(buf, g, VertexSet.of([2]), DefenderSet.of([]))  # viol 1
        # equal violation: no replacement
        buffer_update(buf, g, VertexSet.of([4]), DefenderSet.of([]))
        assert {c.violator for c in buf.cuts()} == {VertexSet.of([0]), VertexSet.of([2])}
        # strictly larger violation: evicts one minimum entry
        buffer_update(buf, g, VertexSet.of([4, 5]), DefenderSet.of([]))
        assert VertexSet.of([4, 5]) in {c.violator for c in buf.cuts()}
        assert len(buf) == 2

    def test_capacity_validation(self):
        with pytest.raises(ValueError):
            CutBuffer(0)


class TestDFS:
    def test_subsets_enumerated_exactly_once(self):
        rng = SplitMix64(31)
        for _ in range(10):
            g = random_graph(rng, 7, 0.3)
            seen = [m for m, _, _ in iter_connected_subsets(g, 3)]
            assert len(seen) == len(set(seen))

    def test_p3_separation_finds_all_three_pairs(self):
        g = path(3)
        buf = separate_multi(g, DefenderSet.of([1]), 2)
        violators = {c.violator for c in buf.cuts()}
        assert VertexSet.of([0, 2]) in violators
        assert violators <= {VertexSet.of([0, 1]), VertexSet.of([0, 2]), VertexSet.of([1, 2])}

    def test_single_cut_mode_stops_at_first_violator(self):
        g = path(3)
        buf = separate_multi(g, DefenderSet.of([]), 2, budget=1, capacity=1)
        assert len(buf) == 1
        assert buf.cuts()[0].violator == VertexSet.of([0])

    def test_empty_buffer_iff_feasible(self):
        rng = SplitMix64(37)
        for _ in range(30):
            g = random_graph(rng, 4 + rng.randrange(5), 0.4)
            k = 1 + rng.randrange(2)
            d = DefenderSet.of([v for v in range(g.n) if rng.random() < 0.5])
            buf = separate_multi(g, d, k)
            assert (len(buf) == 0) == is_k_defensive(g, d, k)

    def test_budget_caps_search_but_keeps_a_cut(self):
        rng = SplitMix64(41)
        g = random_graph(rng, 12, 0.3)
        buf = separate_multi(g, DefenderSet.of([]), 3, budget=5, capacity=50)
        assert 1 <= len(buf) <= 50

    def test_parameter_validation(self):
        g = path(3)
        with pytest.raises(ValueError):
            separate_multi(g, DefenderSet.of([]), 2, budget=0)
        with pytest.raises(ValueError):
            separate_multi(g, DefenderSet.of([]), 0)
