import numpy as np

from dataclasses import replace

from strider.gait import FootstepPlan
from strider.gait import ReferenceOverrides
from strider.gait import StepSpec
from strider.gait import build_mapping
from strider.gait import build_references
from strider.models import ModelParams
from strider.models import PendulumState
from strider.models import build_prediction
from strider.models import step_state
from strider.models import zmp
from strider.nmpc import Bounds
from strider.nmpc import DecisionLayout
from strider.nmpc import assemble_linear_constraints
from strider.nmpc import assemble_tick_zmp_constraints
from strider.nmpc import assemble_zmp_constraints
from strider.nmpc import nominal_warm_start
from strider.nmpc import pinned_channels
from strider.nmpc import step_rate_anchor
from strider.nmpc import strategy
from strider.ops import solve_qp


def sample_states(state, jerks, prediction):
    """
    Predicted 5x3 states at every horizon sample.
    """
    states = []

    predictions = [prediction.predict(state.data[k], jerks[k]) for k in range(5)]

    for j in range(prediction.horizon):
        states.append(PendulumState(np.array([[p[0][j], p[1][j], p[2][j]] for p in predictions])))

    return states


class TestAssembleZmpConstraints:
    def setup_class(self):
        self.params = ModelParams()
        self.bounds = Bounds()
        self.prediction = build_prediction(0.05, 31)
        self.layout = DecisionLayout(31, 2)

        # climbing steps so that the support height changes along the horizon
        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145, 0.1, 0.8)], origin=[0.0, 0.0725, 0.0])
        self.mapping = build_mapping(self.plan, 0.05, 31, 2)

    def support_height(self, j):
        cycle = self.mapping.cycles[j]

        if cycle == self.plan.cycle:
            return self.plan.support[2]

        return self.plan.reference(cycle)[2]

    def test_count(self):
        state = PendulumState.at_rest([0.0, 0.0725, 0.467])

        constraints = assemble_zmp_constraints(state, self.mapping, self.plan, self.bounds, self.prediction,
                                               self.params)

        assert len(constraints) == 124
        assert all(constraint.size == 161 for constraint in constraints)

    def test_matches_direct_zmp(self):
        rng = np.random.RandomState(11)

        mass, gravity = self.params.mass, self.params.gravity
        x_min, x_max = self.bounds.zmp_x
        y_min, y_max = self.bounds.zmp_y

        for trial in range(10):
            data = 0.1 * rng.randn(5, 3)
            data[2, 0] += 0.467
            state = PendulumState(data)

            constraints = assemble_zmp_constraints(state, self.mapping, self.plan, self.bounds, self.prediction,
                                                   self.params)

            for sample in range(10):
                X = rng.randn(self.layout.size)
                jerks = self.layout.jerks(X)
                steps = self.layout.steps(X)

                support_x = self.mapping.support_sequence(self.plan.support[0], steps[0])
                support_y = self.mapping.support_sequence(self.plan.support[1], steps[1])

                for j, predicted in enumerate(sample_states(state, jerks, self.prediction)):
                    d_z = self.support_height(j)
                    p = zmp(predicted, d_z, self.params)
                    load = mass * (gravity + predicted.acceleration[2])

                    expected = [
                        load * (p[0] - support_x[j] - x_max),
                        load * (x_min - p[0] + support_x[j]),
                        load * (p[1] - support_y[j] - y_max),
                        load * (y_min - p[1] + support_y[j]),
                    ]

                    for k in range(4):
                        value = constraints[4 * j + k].evaluate(X)

                        assert abs(value - expected[k]) <= 1e-9 * max(1.0, abs(expected[k]))

    def test_frozen_vertical(self):
        rng = np.random.RandomState(12)

        plan = FootstepPlan.create([StepSpec(0.15, 0.145)], origin=[0.0, 0.0725, 0.0])
        mapping = build_mapping(plan, 0.05, 31, 2)

        state = PendulumState(np.array([
            [0.01, 0.1, 0.2],
            [0.07, -0.05, 0.1],
            [0.467, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ]))

        constraints = assemble_zmp_constraints(state, mapping, plan, self.bounds, self.prediction, self.params)

        mass, gravity, height = self.params.mass, self.params.gravity, 0.467

        for sample in range(10):
            jerks = np.zeros((5, 31))
            jerks[0:2] = rng.randn(2, 31)
            steps = np.zeros((3, 2))
            steps[0:2] = rng.randn(2, 2)

            X = self.layout.compose(jerks, steps)

            c_x, _, a_x = self.prediction.predict(state.data[0], jerks[0])
            support_x = mapping.support_sequence(plan.support[0], steps[0])

            for j in range(31):
                expected = mass * gravity * (c_x[j] - support_x[j] - self.bounds.zmp_x[1]) - mass * height * a_x[j]
                value = constraints[4 * j].evaluate(X)

                assert abs(value - expected) <= 1e-10 * max(1.0, abs(expected))

    def test_standing_interior(self):
        plan = FootstepPlan.create([StepSpec(0.0, 0.145, 0.0, 2.0)], origin=[0.0, 0.0725, 0.0])
        mapping = build_mapping(plan, 0.05, 31, 2)

        state = PendulumState.at_rest([0.0, 0.0725, 0.467])

        constraints = assemble_zmp_constraints(state, mapping, plan, self.bounds, self.prediction, self.params)

        X = np.zeros(self.layout.size)

        assert all(constraint.evaluate(X) < 0.0 for constraint in constraints)


class TestAssembleLinearConstraints:
    def setup_class(self):
        self.params = ModelParams()
        self.bounds = Bounds()
        self.prediction = build_prediction(0.05, 31)
        self.layout = DecisionLayout(31, 2)

        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145)], origin=[0.0, 0.0725, 0.0])
        self.mapping = build_mapping(self.plan, 0.05, 31, 2)
        self.references = build_references(self.plan, self.mapping, 0.467)

        self.state = PendulumState.at_rest([0.0, 0.0725, 0.467])

    def rows(self, toggles, previous_next_step=None):
        return assemble_linear_constraints(self.state, self.plan, self.mapping, self.bounds, self.prediction, toggles,
                                           self.params, self.references, previous_next_step=previous_next_step)

    def test_all_strategies_enabled(self):
        rows = self.rows(strategy(3))

        assert rows.count('step_reference') == 0
        assert rows.count('angle_reference') == 0
        assert rows.count('height_reference') == 0
        assert rows.count('step_height') == 2
        assert rows.A_eq.shape == (2, 161)

    def test_strategy_one(self):
        rows = self.rows(strategy(1))

        assert rows.count('angle_reference') == 62
        assert rows.count('height_reference') == 31
        assert rows.count('step_reference') == 0

    def test_strategy_four(self):
        assert self.rows(strategy(4)).count('step_reference') == 4

    def test_next_sample_scope(self):
        rows = self.rows(strategy(1, equality_scope='next'))

        assert rows.count('angle_reference') == 2
        assert rows.count('height_reference') == 1

    def test_family_counts(self):
        rows = self.rows(strategy(3))

        assert rows.count('step_range') == 8
        assert rows.count('step_rate') == 4
        assert rows.count('height_band') == 62
        assert rows.count('vertical_acceleration') == 31
        assert rows.count('angle') == 124
        assert rows.count('torque') == 124
        assert rows.A_in.shape == (len(rows.labels_in), 161)

    def test_torque_against_recursion(self):
        rng = np.random.RandomState(21)

        rows = self.rows(strategy(3))
        torque = [i for i, label in enumerate(rows.labels_in) if label == 'torque']

        X = rng.randn(self.layout.size)
        jerks = self.layout.jerks(X)

        triple = np.array(self.state.data[4])

        for j in range(31):
            triple = step_state(triple, jerks[4, j], 0.05)

            # rows per sample: roll upper, roll lower, pitch upper, pitch lower
            pitch_upper = torque[4 * j + 2]

            value = rows.A_in[pitch_upper] @ X - rows.b_in[pitch_upper]

            assert abs(value - (self.params.inertia_y * triple[2] - 80.0)) < 1e-9

    def test_nominal_steps_feasible(self):
        rows = self.rows(strategy(3))

        X = nominal_warm_start(self.layout, self.references)

        step_rows = [i for i, label in enumerate(rows.labels_in) if label in ('step_range', 'step_rate')]

        assert np.all(rows.A_in[step_rows] @ X <= rows.b_in[step_rows] + 1e-12)
        assert np.allclose(rows.A_eq @ X, rows.b_eq)

    def test_crossing_step_rejected(self):
        rows = self.rows(strategy(3))

        X = nominal_warm_start(self.layout, self.references)
        # first step lands on the left of the left support foot
        X[self.layout.step('d_y').start] = 0.2

        step_rows = [i for i, label in enumerate(rows.labels_in) if label == 'step_range']

        assert np.any(rows.A_in[step_rows] @ X > rows.b_in[step_rows])

    def test_step_rate(self):
        X = nominal_warm_start(self.layout, self.references)
        X[self.layout.step('d_x').start] += 0.01

        rows = self.rows(strategy(3))
        index = [i for i, label in enumerate(rows.labels_in) if label == 'step_rate']

        # 0.01 m within 3 m/s over 5 ms
        assert np.all(rows.A_in[index] @ X <= rows.b_in[index] + 1e-12)

        rows = self.rows(strategy(3), previous_next_step=self.references.steps[:, 0] - [0.01, 0.0, 0.0])
        index = [i for i, label in enumerate(rows.labels_in) if label == 'step_rate']

        assert np.any(rows.A_in[index] @ X > rows.b_in[index])

    def test_height_band_ignores_height_reference(self):
        overrides = ReferenceOverrides(height=[[0.0, 0.417], [10.0, 0.417]])
        lowered = build_references(self.plan, self.mapping, 0.467, overrides)

        assert np.allclose(lowered.com_z, 0.417)

        nominal = self.rows(strategy(3))
        rows = assemble_linear_constraints(self.state, self.plan, self.mapping, self.bounds, self.prediction,
                                           strategy(3), self.params, lowered)

        band = [i for i, label in enumerate(rows.labels_in) if label == 'height_band']

        assert np.array_equal(rows.A_in[band], nominal.A_in[band])
        assert np.array_equal(rows.b_in[band], nominal.b_in[band])

        # the state at rest sits 0.467 m above the foot: c_z - d_z - h_ref = 0, inside the band
        X = np.zeros(self.layout.size)

        assert np.all(rows.A_in[band] @ X <= rows.b_in[band])
        assert abs(np.min(rows.b_in[band[0::2]]) - 0.1) < 1e-12


class TestStepRateAnchor:
    def setup_class(self):
        self.params = ModelParams()
        self.bounds = Bounds()
        self.prediction = build_prediction(0.05, 31)
        self.layout = DecisionLayout(31, 2)

        self.plan = FootstepPlan.create([StepSpec(0.0, 0.145)], origin=[0.0, 0.0725, 0.0])

        # support foot far ahead of and beside its reference, as after a large step adjustment
        self.moved = replace(self.plan, support=np.array([0.35, 0.3, 0.0]))

        self.state = PendulumState.at_rest([0.35, 0.3, 0.467])

    def test_reference_inside_range(self):
        mapping = build_mapping(self.plan, 0.05, 31, 2)
        references = build_references(self.plan, mapping, 0.467)

        anchor = step_rate_anchor(self.plan, self.bounds, references)

        assert np.allclose(anchor, references.steps[:, 0], atol=1e-15)

    def test_clipped_into_range(self):
        mapping = build_mapping(self.moved, 0.05, 31, 2)
        references = build_references(self.moved, mapping, 0.467)

        anchor = step_rate_anchor(self.moved, self.bounds, references)

        # 0.35 - 0.1 forward, 0.2 to the right of the left support foot
        assert abs(anchor[0] - 0.25) < 1e-12
        assert abs(anchor[1] - 0.1) < 1e-12
        assert anchor[2] == references.steps[2, 0]

        anchor = step_rate_anchor(self.moved, self.bounds, references, previous_next_step=[0.3, 0.15, 0.0])

        assert np.allclose(anchor, [0.3, 0.15, 0.0], atol=1e-15)

    def test_step_rows_feasible_after_large_adjustment(self):
        mapping = build_mapping(self.moved, 0.05, 31, 2)
        references = build_references(self.moved, mapping, 0.467)

        rows = assemble_linear_constraints(self.state, self.moved, mapping, self.bounds, self.prediction,
                                           strategy(3), self.params, references)

        index = [i for i, label in enumerate(rows.labels_in) if label in ('step_range', 'step_rate')]

        solution = solve_qp(np.eye(self.layout.size), np.zeros(self.layout.size), rows.A_in[index],
                            rows.b_in[index])

        assert np.all(rows.A_in[index] @ solution.x <= rows.b_in[index] + 1e-9)


class TestAssembleTickZmpConstraints:
    def setup_class(self):
        self.params = ModelParams()
        self.bounds = Bounds()
        self.layout = DecisionLayout(31, 2)

        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145, 0.1, 0.8)], origin=[0.0, 0.0725, 0.02])

    def test_count(self):
        state = PendulumState.at_rest([0.0, 0.0725, 0.487])

        constraints = assemble_tick_zmp_constraints(state, self.plan, self.layout, self.bounds, self.params, 0.005)

        assert len(constraints) == 4
        assert all(constraint.size == 161 for constraint in constraints)

    def test_matches_integrated_zmp(self):
        rng = np.random.RandomState(13)

        mass, gravity = self.params.mass, self.params.gravity
        x_min, x_max = self.bounds.zmp_x
        y_min, y_max = self.bounds.zmp_y
        support = self.plan.support

        for trial in range(10):
            data = 0.1 * rng.randn(5, 3)
            data[2, 0] += 0.487
            state = PendulumState(data)

            constraints = assemble_tick_zmp_constraints(state, self.plan, self.layout, self.bounds, self.params,
                                                        0.005)

            X = rng.randn(self.layout.size)

            ticked = state.integrate(self.layout.jerks(X)[:, 0], 0.005)

            p = zmp(ticked, support[2], self.params)
            load = mass * (gravity + ticked.acceleration[2])

            expected = [
                load * (p[0] - support[0] - x_max),
                load * (x_min - p[0] + support[0]),
                load * (p[1] - support[1] - y_max),
                load * (y_min - p[1] + support[1]),
            ]

            for k in range(4):
                value = constraints[k].evaluate(X)

                assert abs(value - expected[k]) <= 1e-9 * max(1.0, abs(expected[k]))

    def test_only_first_jerks_enter(self):
        state = PendulumState.at_rest([0.0, 0.0725, 0.487])

        constraints = assemble_tick_zmp_constraints(state, self.plan, self.layout, self.bounds, self.params, 0.005)

        first = [self.layout.motion(channel).start for channel in ('c_x', 'c_y', 'c_z', 'theta_r', 'theta_p')]

        for constraint in constraints:
            gradient = constraint.gradient(np.random.RandomState(5).randn(self.layout.size))

            assert np.all(np.delete(gradient, first) == 0.0)


class TestPinnedChannels:
    def test_strategies(self):
        assert pinned_channels(strategy(3)) == ('d_z',)
        assert pinned_channels(strategy(1)) == ('d_z', 'theta_r', 'theta_p', 'c_z')
        assert pinned_channels(strategy(4)) == ('d_z', 'd_x', 'd_y')
        assert pinned_channels(strategy(1, equality_scope='next')) == ('d_z',)
