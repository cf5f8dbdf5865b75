import pytest

from strider.nmpc import Weights
from strider.nmpc import Bounds
from strider.nmpc import StrategyToggles
from strider.nmpc import strategy


class TestWeights:
    def test_defaults(self):
        weights = Weights()

        assert weights.beta == (50.0, 50.0, 200.0, 200.0, 200.0)
        assert weights.delta == (1000.0, 1000.0, 1000.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Weights(alpha=(1.0, 1.0, 1.0))

        with pytest.raises(ValueError):
            Weights(delta=(-1.0, 1.0, 1.0))

        with pytest.raises(ValueError):
            Weights(beta=(0.0, 1.0, 1.0, 1.0, 1.0), gamma=(0.0, 1.0, 1.0, 1.0, 1.0))

    def test_scaled(self):
        weights = Weights().scaled(10.0)

        assert weights.gamma == (1e-2, 1e-2, 1e-2, 1e-2, 1e-2)
        assert weights.delta == (1e4, 1e4, 1e4)

        with pytest.raises(ValueError):
            Weights().scaled(0.0)

    def test_as_dict(self):
        assert Weights(**Weights().as_dict()) == Weights()


class TestBounds:
    def test_defaults(self):
        bounds = Bounds()

        assert bounds.zmp_x == (-0.03, 0.07)
        assert bounds.step_y == (0.11, 0.2)
        assert bounds.torque_pitch == (-80.0, 80.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Bounds(height=(0.1, -0.15))

    def test_as_dict(self):
        assert Bounds(**Bounds().as_dict()) == Bounds()


class TestStrategy:
    def test_combinations(self):
        assert strategy(1) == StrategyToggles(True, False, False)
        assert strategy(2) == StrategyToggles(True, True, False)
        assert strategy(3) == StrategyToggles(True, True, True)
        assert strategy(4) == StrategyToggles(False, True, True)

    def test_number(self):
        for number in range(1, 5):
            assert strategy(number).number == number

        assert StrategyToggles(False, False, False).number is None

    def test_invalid(self):
        with pytest.raises(ValueError):
            strategy(5)

        with pytest.raises(ValueError):
            strategy(1, equality_scope='sample')
