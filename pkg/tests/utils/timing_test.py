from strider.datasets import ScenarioFile
from strider.gait import StepSpec
from strider.utils.workflows import SimConfig
from strider.utils.workflows import timing_study
from strider.utils.workflows import timing_table


class TestTimingStudy:
    def setup_class(self):
        scenario = ScenarioFile(
            name='short-timing',
            steps=[StepSpec(0.1, 0.145, 0.0, 0.8)],
            origin=(0.0, 0.0725, 0.0),
            sim=SimConfig(dt_ctrl=0.1, dt_mpc=0.1, horizon=10, future_steps=2, total_time=0.4),
        )

        self.rows = timing_study(scenario, iterations=(1, 2))

    def test_rows(self):
        assert [row['max_iterations'] for row in self.rows] == [1, 2]

        for row in self.rows:
            assert row['ticks'] == 4
            assert row['min_termination'] >= 0.0
            assert 0 <= row['exact_ticks'] <= row['ticks']
            assert row['mean_solve_time_s'] > 0.0
            assert row['outcome'] == 'Completed'

    def test_table(self):
        table = timing_table(self.rows)

        assert len(table.rows) == 2
        assert table.field_names[0] == 'N_s'
        assert 'exact ticks' in table.field_names
