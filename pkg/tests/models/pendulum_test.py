import numpy as np
import pytest

from strider.models import ModelParams
from strider.models import PendulumState
from strider.models import DegenerateDynamics
from strider.models import zmp
from strider.models import step_state
from strider.models import build_prediction


def make_state(com, acc=(0.0, 0.0, 0.0), angular_acc=(0.0, 0.0)):
    data = np.zeros((5, 3))
    data[0:3, 0] = com
    data[0:3, 2] = acc
    data[3:5, 2] = angular_acc

    return PendulumState(data)


class TestModelParams:
    def test_defaults(self):
        params = ModelParams()

        assert params.mass == 31.0
        assert params.gravity == 9.81
        assert params.inertia_x == 1.0
        assert params.inertia_y == 1.0
        assert params.height_ref == 0.467

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(mass=0.0)

        with pytest.raises(ValueError):
            ModelParams(inertia_y=-1.0)


class TestPendulumState:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            PendulumState(np.zeros((3, 3)))

        data = np.zeros((5, 3))
        data[2, 1] = np.nan

        with pytest.raises(ValueError):
            PendulumState(data)

    def test_at_rest(self):
        state = PendulumState.at_rest([0.0, 0.0725, 0.467])

        assert np.all(state.position == np.array([0.0, 0.0725, 0.467]))
        assert np.all(state.velocity == 0)
        assert np.all(state.angles == 0)
        assert np.all(state.channel('c_z') == np.array([0.467, 0.0, 0.0]))

    def test_immutable(self):
        state = PendulumState.at_rest([0.0, 0.0, 0.467])

        with pytest.raises(ValueError):
            state.data[0, 0] = 1.0

    def test_integrate(self):
        state = PendulumState.at_rest([0.0, 0.0, 0.467])

        next_state = state.integrate([1.0, 0.0, 0.0, 0.0, 0.0], 0.005)

        assert np.allclose(next_state.channel('c_x'), [0.005 ** 3 / 6.0, 0.005 ** 2 / 2.0, 0.005])
        assert np.allclose(next_state.channel('c_z'), [0.467, 0.0, 0.0])


class TestZmp:
    def setup_class(self):
        self.params = ModelParams()

    def test_static(self):
        p = zmp(make_state([0.1, 0.0, 0.467]), 0.0, self.params)

        assert np.allclose(p, [0.1, 0.0, 0.0])

    def test_lipm_reduction(self):
        p = zmp(make_state([0.0, 0.0, 0.467], acc=(1.0, 0.0, 0.0)), 0.0, self.params)

        assert abs(p[0] - (-0.467 / 9.81)) < 1e-15

    def test_full_nonlinear(self):
        state = make_state([0.05, 0.0, 0.5], acc=(0.5, 0.0, 1.0), angular_acc=(0.0, 2.0))

        p = zmp(state, 0.1, self.params)

        # 0.05 - 0.4 * 0.5 / 10.81 - 2 / (31 * 10.81)
        expected = 0.05 - 0.2 / 10.81 - 2.0 / 335.11

        assert abs(p[0] - expected) < 1e-14
        assert abs(p[0] - 0.0255304228) < 1e-9
        assert p[1] == 0.0
        assert p[2] == 0.1

    def test_momentum_signs(self):
        pitch = zmp(make_state([0.0, 0.0, 0.5], angular_acc=(0.0, 1.0)), 0.0, self.params)
        roll = zmp(make_state([0.0, 0.0, 0.5], angular_acc=(1.0, 0.0)), 0.0, self.params)

        assert pitch[0] < 0
        assert roll[1] > 0

    def test_random_lipm_and_height_shift(self):
        rng = np.random.RandomState(3)

        for _ in range(50):
            com = rng.uniform(-0.2, 0.2, 3) + np.array([0.0, 0.0, 0.5])
            acc = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0])
            d_z = rng.uniform(-0.1, 0.3)

            p = zmp(make_state(com, acc=acc), d_z, self.params)

            assert np.allclose(p[0:2], com[0:2] - (com[2] - d_z) * acc[0:2] / 9.81, atol=1e-15)

            shift = rng.uniform(-1.0, 1.0)
            full = make_state(com, acc=(acc[0], acc[1], rng.uniform(-1, 1)), angular_acc=rng.uniform(-3, 3, 2))
            shifted_data = np.array(full.data)
            shifted_data[2, 0] += shift

            assert np.allclose(
                zmp(full, d_z, self.params)[0:2],
                zmp(PendulumState(shifted_data), d_z + shift, self.params)[0:2],
                atol=1e-12
            )

    def test_free_fall(self):
        with pytest.raises(DegenerateDynamics):
            zmp(make_state([0.0, 0.0, 0.5], acc=(0.0, 0.0, -9.81)), 0.0, self.params)


class TestStepState:
    def test_unit_jerk(self):
        assert np.allclose(step_state([0.0, 0.0, 0.0], 1.0, 0.005), [0.005 ** 3 / 6.0, 1.25e-5, 0.005], atol=1e-20)

    def test_fixed_point(self):
        assert np.all(step_state([1.0, 0.0, 0.0], 0.0, 0.37) == np.array([1.0, 0.0, 0.0]))

    def test_uniform_velocity(self):
        assert np.allclose(step_state([0.0, 1.0, 0.0], 0.0, 0.1), [0.1, 1.0, 0.0])

    def test_stacked(self):
        states = np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

        result = step_state(states, np.array([1.0, 0.0]), 0.1)

        assert result.shape == (2, 3)
        assert np.allclose(result[1], [0.1, 1.0, 0.0])

    def test_invalid_dt(self):
        with pytest.raises(ValueError):
            step_state([0.0, 0.0, 0.0], 1.0, 0.0)


class TestBuildPrediction:
    def test_single_sample(self):
        prediction = build_prediction(0.1, 1)

        assert np.allclose(prediction.ppu, [[0.1 ** 3 / 6.0]])
        assert np.allclose(prediction.pvu, [[0.1 ** 2 / 2.0]])
        assert np.allclose(prediction.pau, [[0.1]])

    def test_structure(self):
        dt = 0.05
        prediction = build_prediction(dt, 31)

        for i in range(31):
            t = (i + 1) * dt
            assert np.allclose(prediction.pps[i], [1.0, t, t ** 2 / 2.0])
            assert np.allclose(prediction.pvs[i], [0.0, 1.0, t])
            assert np.allclose(prediction.pas[i], [0.0, 0.0, 1.0])

        for matrix, diagonal in [(prediction.ppu, dt ** 3 / 6.0), (prediction.pvu, dt ** 2 / 2.0),
                                 (prediction.pau, dt)]:
            assert np.allclose(np.triu(matrix, 1), 0.0)
            assert np.allclose(np.diag(matrix), diagonal)

    def test_loop_oracle(self):
        prediction = build_prediction(0.1, 3)

        positions, _, _ = prediction.predict([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])

        triple = np.zeros(3)
        for i in range(3):
            triple = step_state(triple, 1.0, 0.1)
            assert abs(positions[i] - triple[0]) < 1e-14

    def test_random_recursion_equivalence(self):
        rng = np.random.RandomState(0)
        prediction = build_prediction(0.05, 31)

        for _ in range(200):
            triple = rng.uniform(-1.0, 1.0, 3)
            jerks = rng.uniform(-10.0, 10.0, 31)

            positions, velocities, accelerations = prediction.predict(triple, jerks)

            current = triple
            for i in range(31):
                current = step_state(current, jerks[i], 0.05)

                assert abs(positions[i] - current[0]) < 1e-12
                assert abs(velocities[i] - current[1]) < 1e-12
                assert abs(accelerations[i] - current[2]) < 1e-12

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_prediction(0.05, 0)
