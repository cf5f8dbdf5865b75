import numpy as np

from strider.gait import FootstepPlan
from strider.gait import ReferenceBundle
from strider.gait import StepSpec
from strider.gait import build_mapping
from strider.models import PendulumState
from strider.models import build_prediction
from strider.nmpc import DecisionLayout
from strider.nmpc import Weights
from strider.nmpc import assemble_objective
from strider.nmpc import objective_offset
from strider.nmpc import tracking_cost


def random_references(rng, horizon, future_steps):
    return ReferenceBundle(
        com_x=rng.randn(horizon),
        com_y=rng.randn(horizon),
        com_z=0.467 + 0.1 * rng.randn(horizon),
        roll=0.1 * rng.randn(horizon),
        pitch=0.1 * rng.randn(horizon),
        step_x=rng.randn(future_steps),
        step_y=rng.randn(future_steps),
        step_z=0.1 * rng.randn(future_steps),
        support_z=np.zeros(horizon),
    )


class TestAssembleObjective:
    def setup_class(self):
        self.plan = FootstepPlan.create([StepSpec(0.15, 0.145)], origin=[0.0, 0.0725, 0.0])
        self.mapping = build_mapping(self.plan, 0.05, 31, 2)
        self.prediction = build_prediction(0.05, 31)
        self.layout = DecisionLayout(31, 2)

    def test_matches_direct_cost(self):
        rng = np.random.RandomState(7)

        for trial in range(10):
            state = PendulumState(rng.randn(5, 3))
            references = random_references(rng, 31, 2)
            weights = Weights(
                alpha=rng.uniform(0.0, 2.0, 5),
                beta=rng.uniform(1.0, 100.0, 5),
                gamma=rng.uniform(1e-4, 1e-2, 5),
                delta=rng.uniform(10.0, 1000.0, 3),
            )

            G, g = assemble_objective(state, references, self.mapping, weights, self.prediction)
            offset = objective_offset(state, references, weights, self.prediction)

            for sample in range(10):
                X = rng.randn(self.layout.size)

                expanded = X @ G @ X + g @ X + offset
                direct = tracking_cost(X, state, references, weights, self.prediction)

                assert abs(expanded - direct) <= 1e-10 * abs(direct)

    def test_block_structure(self):
        state = PendulumState.at_rest([0.0, 0.0725, 0.467])
        references = random_references(np.random.RandomState(3), 31, 2)

        G, _ = assemble_objective(state, references, self.mapping, Weights(), self.prediction)

        assert np.allclose(G, G.T)
        assert np.all(G[self.layout.motion('c_x'), self.layout.motion('c_y')] == 0.0)
        assert np.all(G[self.layout.step('d_x'), self.layout.step('d_x')] == 500.0 * np.eye(2))
        assert np.all(np.linalg.eigvalsh(G) > 0)

    def test_jerk_only(self):
        state = PendulumState(np.random.RandomState(4).randn(5, 3))
        references = random_references(np.random.RandomState(5), 31, 2)

        weights = Weights(alpha=[0.0] * 5, beta=[0.0] * 5, gamma=[2.0] * 5, delta=[0.0] * 3)

        G, g = assemble_objective(state, references, self.mapping, weights, self.prediction)

        jerk_block = slice(0, 5 * 31)

        assert np.allclose(G[jerk_block, jerk_block], np.eye(5 * 31))
        assert np.all(g == 0.0)

    def test_reference_on_free_evolution(self):
        state = PendulumState(np.random.RandomState(6).randn(5, 3))

        free = [self.prediction.pps @ state.data[k] for k in range(5)]

        references = ReferenceBundle(
            com_x=free[0], com_y=free[1], com_z=free[2], roll=free[3], pitch=free[4],
            step_x=np.zeros(2), step_y=np.zeros(2), step_z=np.zeros(2), support_z=np.zeros(31),
        )

        weights = Weights(alpha=[0.0] * 5, beta=[1.0] * 5, gamma=[0.0] * 5, delta=[0.0] * 3)

        _, g = assemble_objective(state, references, self.mapping, weights, self.prediction)

        assert np.allclose(g, 0.0, atol=1e-12)
