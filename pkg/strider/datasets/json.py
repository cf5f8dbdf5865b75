import os
import re
import json
import numpy as np

from dataclasses import asdict, dataclass, field

from strider.gait import LEFT, ReferenceOverrides, StepSpec
from strider.models import ModelParams
from strider.nmpc import Bounds, StrategyToggles, Weights, strategy
from strider.ops import SqpSettings
from strider.utils.workflows.episode import Disturbance, SimConfig


# file key -> attribute, file keys carry the unit
MODEL_KEYS = {
    'mass_kg': 'mass',
    'gravity_m_s2': 'gravity',
    'inertia_x_kg_m2': 'inertia_x',
    'inertia_y_kg_m2': 'inertia_y',
    'height_ref_m': 'height_ref',
}

WEIGHT_KEYS = {
    'alpha': 'alpha',
    'beta': 'beta',
    'gamma': 'gamma',
    'delta': 'delta',
}

BOUND_KEYS = {
    'zmp_x_m': 'zmp_x',
    'zmp_y_m': 'zmp_y',
    'step_x_m': 'step_x',
    'step_y_m': 'step_y',
    'step_rate_x_m_s': 'step_rate_x',
    'step_rate_y_m_s': 'step_rate_y',
    'height_m': 'height',
    'roll_rad': 'roll',
    'pitch_rad': 'pitch',
    'torque_roll_n_m': 'torque_roll',
    'torque_pitch_n_m': 'torque_pitch',
}

TOGGLE_KEYS = {
    'allow_step_adjust': 'allow_step_adjust',
    'allow_body_rotation': 'allow_body_rotation',
    'allow_height_variation': 'allow_height_variation',
    'equality_scope': 'equality_scope',
}

STEP_KEYS = {
    'step_length_m': 'length',
    'step_width_m': 'width',
    'step_height_m': 'height',
    'duration_s': 'duration',
}

DISTURBANCE_KEYS = {
    'start_s': 'start',
    'duration_s': 'duration',
    'force_x_n': 'force_x',
    'force_y_n': 'force_y',
}

OVERRIDE_KEYS = {
    'height_m': 'height',
    'pitch_rad': 'pitch',
    'roll_rad': 'roll',
}

SIM_KEYS = {
    'dt_ctrl_s': 'dt_ctrl',
    'dt_mpc_s': 'dt_mpc',
    'horizon_samples': 'horizon',
    'future_steps': 'future_steps',
    'total_time_s': 'total_time',
    'zmp_margin_m': 'zmp_margin',
    'divergence_bound_m': 'divergence_bound',
    'violation_ticks': 'violation_ticks',
    'swing_apex_m': 'swing_apex',
    'step_rate_memory': 'step_rate_memory',
}

SQP_KEYS = {
    'epsilon': 'epsilon',
    'max_iterations': 'max_iterations',
    'qp_max_iterations': 'qp_max_iterations',
    'backend': 'backend',
    'relax_on_infeasible': 'relax_on_infeasible',
    'relaxation_weight': 'relaxation_weight',
}

TOP_KEYS = (
    'name', 'description', 'strategy', 'toggles', 'equality_scope', 'origin_m', 'origin_side', 'initial_com_m',
    'model', 'weights', 'bounds', 'steps', 'disturbances', 'overrides', 'sim', 'sqp',
)


class ScenarioInvalid(ValueError):
    """
    Raised when a scenario file cannot be parsed or holds unknown keys or invalid values. lineno is the line of
    the offending key when it can be located in the file text.
    """
    def __init__(self, message, lineno=None, source=None):
        self.message = message
        self.lineno = lineno
        self.source = source

        location = ''

        if source is not None:
            location += '{}'.format(source)

        if lineno is not None:
            location += '{}line {}'.format(':' if location else '', lineno)

        super(ScenarioInvalid, self).__init__('{}: {}'.format(location, message) if location else message)


def scenario_sqp(**kwargs):
    """
    SQP settings of closed-loop runs, which relax the quadratic rows of an infeasible linearization unless told
    otherwise.
    """
    kwargs.setdefault('relax_on_infeasible', True)

    return SqpSettings(**kwargs)


def _lineno(text, key):
    if text is None:
        return None

    match = re.search(r'"{}"\s*:'.format(re.escape(key)), text)

    if match is None:
        return None

    return text.count('\n', 0, match.start()) + 1


def _section(data, name, keys, factory, text, source):
    """
    Translates the file keys of one section into the constructor arguments of a value type.
    """
    if not isinstance(data, dict):
        raise ScenarioInvalid('Section {} must be an object'.format(name), _lineno(text, name), source)

    for key in data:
        if key not in keys:
            raise ScenarioInvalid('Unknown key {} in {}'.format(key, name), _lineno(text, key), source)

    try:
        return factory(**{keys[key]: value for key, value in data.items()})
    except (ValueError, TypeError) as error:
        raise ScenarioInvalid('Invalid {}: {}'.format(name, error), _lineno(text, name), source)


def _unmap(keys, values):
    return {key: values[attribute] for key, attribute in keys.items()}


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    """
    A closed-loop walking scenario: model, cost weights, bounds, enabled strategies, footstep sequence, pushes,
    reference overrides, simulation and SQP settings. Scenarios are stored as JSON whose keys carry their units;
    every section is optional except the footstep sequence and missing values take their defaults.

    Example of a minimal scenario file:

    .. code-block:: json

        {
            "name": "walk",
            "strategy": 3,
            "steps": [{"step_length_m": 0.15, "step_width_m": 0.145}],
            "disturbances": [{"start_s": 2.0, "duration_s": 0.1, "force_x_n": 100.0}]
        }

    """
    name: str
    steps: tuple
    description: str = ''
    model: ModelParams = field(default_factory=ModelParams)
    weights: Weights = field(default_factory=Weights)
    bounds: Bounds = field(default_factory=Bounds)
    toggles: StrategyToggles = field(default_factory=lambda: strategy(3))
    origin: np.ndarray = None
    origin_side: str = LEFT
    initial_com: np.ndarray = None
    disturbances: tuple = ()
    overrides: ReferenceOverrides = field(default_factory=ReferenceOverrides)
    sim: SimConfig = field(default_factory=SimConfig)
    sqp: SqpSettings = field(default_factory=scenario_sqp)

    def __post_init__(self):
        if len(self.steps) == 0:
            raise ValueError('A scenario needs at least one step')

        origin = np.zeros(3) if self.origin is None else np.array(self.origin, dtype=float)

        if origin.shape != (3,):
            raise ValueError('The origin must be a 3D point, got shape {}'.format(origin.shape))

        if self.initial_com is None:
            initial_com = origin + np.array([0.0, 0.0, self.model.height_ref])
        else:
            initial_com = np.array(self.initial_com, dtype=float)

        if initial_com.shape != (3,):
            raise ValueError('The initial CoM must be a 3D point, got shape {}'.format(initial_com.shape))

        object.__setattr__(self, 'steps', tuple(self.steps))
        object.__setattr__(self, 'disturbances', tuple(self.disturbances))
        object.__setattr__(self, 'origin', origin)
        object.__setattr__(self, 'initial_com', initial_com)

    @classmethod
    def from_dict(cls, data, text=None, source=None):
        """
        Builds a scenario from a parsed JSON object.

        :param data: parsed scenario
        :type data: dict
        :param text: text of the file, used to report line numbers
        :type text: str
        :param source: name of the file, used in error messages
        :type source: str
        :return: ScenarioFile
        """
        if not isinstance(data, dict):
            raise ScenarioInvalid('A scenario must be a JSON object', 1, source)

        for key in data:
            if key not in TOP_KEYS:
                raise ScenarioInvalid('Unknown key {}'.format(key), _lineno(text, key), source)

        if 'steps' not in data:
            raise ScenarioInvalid('A scenario needs a steps list', None, source)

        if 'strategy' in data and 'toggles' in data:
            raise ScenarioInvalid('Give either a strategy number or toggles, not both', _lineno(text, 'toggles'),
                                  source)

        model = _section(data.get('model', {}), 'model', MODEL_KEYS, ModelParams, text, source)

        if 'toggles' in data:
            toggles = _section(data['toggles'], 'toggles', TOGGLE_KEYS, StrategyToggles, text, source)
        else:
            toggles = _section({'number': data.get('strategy', 3),
                                'equality_scope': data.get('equality_scope', 'horizon')},
                               'strategy', {'number': 'number', 'equality_scope': 'equality_scope'}, strategy,
                               text, source)

        steps = data['steps']

        if not isinstance(steps, list) or len(steps) == 0:
            raise ScenarioInvalid('steps must be a non-empty list', _lineno(text, 'steps'), source)

        disturbances = data.get('disturbances', [])

        if not isinstance(disturbances, list):
            raise ScenarioInvalid('disturbances must be a list', _lineno(text, 'disturbances'), source)

        try:
            return cls(
                name=str(data.get('name', 'scenario')),
                description=str(data.get('description', '')),
                model=model,
                weights=_section(data.get('weights', {}), 'weights', WEIGHT_KEYS, Weights, text, source),
                bounds=_section(data.get('bounds', {}), 'bounds', BOUND_KEYS, Bounds, text, source),
                toggles=toggles,
                steps=[_section(step, 'steps', STEP_KEYS, StepSpec, text, source) for step in steps],
                origin=data.get('origin_m'),
                origin_side=data.get('origin_side', LEFT),
                initial_com=data.get('initial_com_m'),
                disturbances=[
                    _section(disturbance, 'disturbances', DISTURBANCE_KEYS, Disturbance, text, source)
                    for disturbance in disturbances
                ],
                overrides=_section(data.get('overrides', {}), 'overrides', OVERRIDE_KEYS, ReferenceOverrides,
                                   text, source),
                sim=_section(data.get('sim', {}), 'sim', SIM_KEYS, SimConfig, text, source),
                sqp=_section(data.get('sqp', {}), 'sqp', SQP_KEYS, scenario_sqp, text, source),
            )
        except ScenarioInvalid:
            raise
        except (ValueError, TypeError) as error:
            raise ScenarioInvalid(str(error), None, source)

    def as_dict(self):
        data = {
            'name': self.name,
            'description': self.description,
        }

        if self.toggles.number is not None:
            data['strategy'] = self.toggles.number
            data['equality_scope'] = self.toggles.equality_scope
        else:
            data['toggles'] = _unmap(TOGGLE_KEYS, self.toggles.as_dict())

        data.update({
            'origin_m': self.origin.tolist(),
            'origin_side': self.origin_side,
            'initial_com_m': self.initial_com.tolist(),
            'model': _unmap(MODEL_KEYS, asdict(self.model)),
            'weights': _unmap(WEIGHT_KEYS, self.weights.as_dict()),
            'bounds': _unmap(BOUND_KEYS, self.bounds.as_dict()),
            'steps': [_unmap(STEP_KEYS, asdict(step)) for step in self.steps],
            'disturbances': [_unmap(DISTURBANCE_KEYS, disturbance.as_dict()) for disturbance in self.disturbances],
            'overrides': {
                key: value for key, value in _unmap(OVERRIDE_KEYS, self.overrides.as_dict()).items()
                if value is not None
            },
            'sim': _unmap(SIM_KEYS, self.sim.as_dict()),
            'sqp': _unmap(SQP_KEYS, asdict(self.sqp)),
        })

        return data


def read_scenario(path):
    """
    Reads and validates a scenario file.

    .. code-block:: python

        from strider.datasets import read_scenario

        scenario = read_scenario('/path/to/stairs-3d.json')

    :param path: path of the JSON scenario
    :type path: str
    :return: ScenarioFile
    """
    if not os.path.exists(path):
        raise FileNotFoundError('The scenario file {} cannot be read'.format(path))

    with open(path) as f:
        text = f.read()

    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ScenarioInvalid('Malformed JSON: {}'.format(error.msg), error.lineno, path)

    return ScenarioFile.from_dict(data, text, path)


def write_scenario(scenario, path):
    with open(path, 'w') as f:
        json.dump(scenario.as_dict(), f, indent=4)

    return path
