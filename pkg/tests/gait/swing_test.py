import numpy as np

from strider.gait import quintic
from strider.gait import swing_foot_trajectory


class TestSwingFootTrajectory:
    def setup_class(self):
        self.start = np.array([0.0, 0.0725, 0.0])
        self.end = np.array([0.3, 0.0725, 0.1])

    def test_boundaries(self):
        assert np.allclose(swing_foot_trajectory(self.start, self.end, 0.8, 0.05, 0.0), self.start)
        assert np.allclose(swing_foot_trajectory(self.start, self.end, 0.8, 0.05, 0.8), self.end)

    def test_flat_apex(self):
        position = swing_foot_trajectory([0.0, 0.0, 0.0], [0.3, 0.0, 0.0], 0.8, 0.05, 0.4)

        assert abs(position[2] - 0.05) < 1e-12
        assert abs(position[0] - 0.15) < 1e-12

    def test_apex_above_higher_foot(self):
        position = swing_foot_trajectory(self.start, self.end, 0.8, 0.05, 0.4)

        assert abs(position[2] - 0.15) < 1e-12

        heights = [swing_foot_trajectory(self.start, self.end, 0.8, 0.05, t)[2] for t in np.linspace(0, 0.8, 81)]

        assert max(heights) <= 0.15 + 1e-12

    def test_rest_to_rest(self):
        step = 1e-5

        assert abs(quintic(step) - quintic(0.0)) / step < 1e-8
        assert abs(quintic(1.0) - quintic(1.0 - step)) / step < 1e-8
        assert abs(quintic(0.5) - 0.5) < 1e-15
