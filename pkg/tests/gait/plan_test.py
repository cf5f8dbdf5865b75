import numpy as np
import pytest

from dataclasses import replace

from strider.gait import StepSpec
from strider.gait import FootstepPlan
from strider.gait import HorizonOverrun
from strider.gait import LEFT, RIGHT
from strider.gait import advance
from strider.gait import build_mapping


TABLE_LENGTHS = [0.15, 0.15, 0.15, 0.15, 0.15, 0.3, 0.25, 0.15, 0.05, 0.15]
TABLE_WIDTHS = [0.145, 0.145, 0.145, 0.145, 0.2, 0.14, 0.14, 0.2, 0.145, 0.145]
TABLE_HEIGHTS = [0.0, 0.1, 0.1, 0.1, 0.0, 0.0, -0.1, -0.1, 0.0, 0.0]


def stairs_plan():
    specs = [StepSpec(length, width, height, 0.8)
             for length, width, height in zip(TABLE_LENGTHS, TABLE_WIDTHS, TABLE_HEIGHTS)]

    return FootstepPlan.create(specs, origin=[0.0, 0.0725, 0.0], side=LEFT)


class TestStepSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            StepSpec(0.1, 0.145, 0.0, 0.0)

        with pytest.raises(ValueError):
            StepSpec(0.1, -0.1, 0.0, 0.8)


class TestFootstepPlan:
    def setup_class(self):
        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145, 0.0, 0.8)], origin=[0.0, 0.0725, 0.0], side=LEFT)

    def test_references(self):
        assert np.allclose(self.plan.reference(0), [0.0, 0.0725, 0.0])
        assert np.allclose(self.plan.reference(1), [0.15, -0.0725, 0.0])
        assert np.allclose(self.plan.reference(2), [0.3, 0.0725, 0.0])
        assert np.allclose(self.plan.reference(5), [0.75, -0.0725, 0.0])

    def test_sides_alternate(self):
        assert self.plan.side == LEFT
        assert [self.plan.side_of(c) for c in range(4)] == [LEFT, RIGHT, LEFT, RIGHT]

    def test_last_spec_repeats(self):
        plan = stairs_plan()

        assert plan.spec(10).length == 0.15
        assert plan.spec(25).length == 0.15
        assert plan.spec(6).length == 0.3

    def test_durations(self):
        plan = FootstepPlan.create([StepSpec(0.1, 0.145, 0.0, 0.6), StepSpec(0.1, 0.145, 0.0, 0.9)])

        assert plan.duration(0) == 0.6
        assert plan.duration(1) == 0.9
        assert plan.duration(7) == 0.9
        assert abs(plan.cycle_start(2) - 1.5) < 1e-12

    def test_initial_support(self):
        assert np.all(self.plan.support == self.plan.origin)

    def test_invalid(self):
        with pytest.raises(ValueError):
            FootstepPlan.create([])

        with pytest.raises(ValueError):
            FootstepPlan.create([StepSpec(0.1, 0.1)], side='middle')


class TestAdvance:
    def setup_class(self):
        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145, 0.0, 0.8)], origin=[0.0, 0.0725, 0.0], side=LEFT)

    def test_mid_cycle(self):
        plan = advance(self.plan, 0.005, [1.0, 1.0, 1.0])

        assert plan.cycle == 0
        assert abs(plan.elapsed - 0.005) < 1e-15
        assert np.all(plan.support == self.plan.support)

    def test_rollover(self):
        plan = replace(self.plan, elapsed=0.795)

        realized = [0.16, -0.07, 0.0]
        plan = advance(plan, 0.005, realized)

        assert plan.cycle == 1
        assert plan.side == RIGHT
        assert plan.elapsed < 1e-12
        assert np.allclose(plan.support, realized)

    def test_stairs_heights(self):
        plan = stairs_plan()

        heights = []

        for cycle in range(10):
            for _ in range(8):
                plan = advance(plan, 0.1, plan.reference(plan.cycle + 1))

            heights.append(plan.support[2])

        assert plan.cycle == 10
        assert np.allclose(heights, [0.0, 0.1, 0.2, 0.3, 0.3, 0.3, 0.2, 0.1, 0.1, 0.1])


class TestBuildMapping:
    def setup_class(self):
        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145, 0.0, 0.8)], origin=[0.0, 0.0725, 0.0], side=LEFT)

    def test_horizon_within_cycle(self):
        mapping = build_mapping(self.plan, 0.005, 31, 2)

        assert np.all(mapping.current == 1.0)
        assert np.all(mapping.future == 0.0)

    def test_near_rollover(self):
        mapping = build_mapping(replace(self.plan, elapsed=0.75), 0.005, 31, 2)

        assert np.all(mapping.current[:10] == 1.0)
        assert np.all(mapping.current[10:] == 0.0)
        assert np.all(mapping.future[10:, 0] == 1.0)
        assert np.all(mapping.future[:, 1] == 0.0)

    def test_two_future_steps(self):
        mapping = build_mapping(replace(self.plan, elapsed=0.75), 0.05, 31, 2)

        index = mapping.step_index()

        assert index[0] == -1
        assert np.all(index[1:17] == 0)
        assert np.all(index[17:] == 1)
        assert np.all(mapping.cycles[17:] == 2)

    def test_overrun(self):
        with pytest.raises(HorizonOverrun):
            build_mapping(replace(self.plan, elapsed=0.75), 0.05, 31, 1)

    def test_partition_over_cycle(self):
        for elapsed in np.arange(0.0, 0.8, 0.001):
            mapping = build_mapping(replace(self.plan, elapsed=elapsed), 0.05, 31, 2)

            selection = np.hstack([mapping.current[:, None], mapping.future])

            assert np.all(selection.sum(axis=1) == 1.0)
            assert np.all(np.diff(mapping.step_index()) >= 0)

    def test_support_sequence(self):
        rng = np.random.RandomState(2)
        plan = replace(self.plan, elapsed=0.33)

        mapping = build_mapping(plan, 0.05, 31, 2)

        support = rng.randn()
        steps = rng.randn(2)

        sequence = mapping.support_sequence(support, steps)

        breaks = np.flatnonzero(np.diff(sequence) != 0) + 1

        # remaining 0.47 s: samples at 0.05 ... 0.45 are current, 0.50 ... 1.25 step 1, 1.30 ... step 2
        assert list(breaks) == [9, 25]
        assert np.all(sequence[:9] == support)
        assert np.all(sequence[9:25] == steps[0])
        assert np.all(sequence[25:] == steps[1])
