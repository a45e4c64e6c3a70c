'''
Sweep configuration files.

A configuration is a JSON object mirroring SweepSpec; every key is optional.
schema/sweep.schema.json documents the format for other tools.

    {
        "name": "fig-eta",
        "scenario": {"kind": "1sdi", "bob_outcomes": 3},
        "method": "bff",
        "axis": "eta",
        "start": 0.5, "stop": 1.0, "step": 0.01,
        "noise": {"visibility": 0.99, "p_dark": 1e-6},
        "free": ["theta"],
        "optimizer": {"restarts": 3, "seed": 7}
    }
'''

from . import bff, util, valid
from .exceptions import ParseError
from .runner import AXES, METHODS, Noise, SweepSpec
import json
import logging
import math

log = logging.getLogger(__name__)

pair = valid.list_n_or_more(valid.int_range(1, 3), 2)

scenario_expected = {
    'biases': [valid.int_range(1, 2)],
    'bob_inputs': valid.int_range(1, 3),
    'bob_outcomes': valid.int_range(2, 3),
    'correlators': [pair],
    'key_bob_input': valid.int_range(1, 3),
    'key_input': valid.int_range(1, 2),
    'kind': valid.choice(valid.string, ('1sdi', 'di')),
    'level': valid.string,
    'mode': valid.choice(valid.string, ('full', 'correlators')),
}

noise_expected = {
    'eta_a': valid.probability,
    'eta_b': valid.probability,
    'p_dark': valid.probability,
    'visibility': valid.probability,
}

optimizer_expected = {
    'max_sweeps': valid.int_range(1, None),
    'restarts': valid.int_range(1, None),
    'seed': valid.int_range(0, None),
    'tolerance': valid.float_range(0.0, None),
    'xtol': valid.float_range(0.0, None),
}

sweep_expected = {
    'alice_angles': valid.or_none(valid.list_n_or_more(valid.angle, 2)),
    'attenuation': valid.nonnegative,
    'axis': valid.choice(valid.string, AXES),
    'bob_angles': valid.or_none(valid.list_n_or_more(valid.angle, 1)),
    'eta_fix': valid.probability,
    'floor': valid.nonnegative,
    'free': [valid.choice(valid.string,
        ('theta', 'q', 'alice_angles', 'bob_angles'))],
    'merge_target': valid.int_range(1, 2),
    'method': valid.choice(valid.string, METHODS),
    'name': valid.string,
    'noise': noise_expected,
    'optimizer': optimizer_expected,
    'q': valid.float_range(0.0, 0.5),
    'quad_m': valid.int_range(1, 64),
    'scenario': scenario_expected,
    'start': valid.nonnegative,
    'step': valid.float_range(0.0, None),
    'stop': valid.nonnegative,
    'theta': valid.float_range(0.0, math.pi / 2),
    'tolerance': valid.float_range(0.0, None),
    'visibilities': [valid.probability],
    'workers': valid.int_range(1, 256),
}

def clean(data):
    '''clean({...}) -> cleaned configuration dict

    Raises ValueIssue describing every bad field at once.
    '''
    return valid.Expecter(ignore_missing_keys=True).expect(sweep_expected, data)

def build(data):
    '''build({...}) -> SweepSpec'''
    data = clean(data)
    scenario = bff.Scenario(**data.pop('scenario', {}))
    if 'noise' in data:
        data['noise'] = Noise(**data['noise'])
    # null angles fall back to the scenario's defaults
    for key in ('alice_angles', 'bob_angles', 'free', 'visibilities'):
        if data.get(key) is not None:
            data[key] = tuple(data[key])
    spec = SweepSpec(scenario, **util.valid(data, SweepSpec.defaults))
    log.debug('loaded sweep %r: %s over %s', spec.name, spec.method, spec.axis)
    return spec

def read(path):
    '''read('sweep.json') -> raw configuration dict'''
    with open(path) as fileobj:
        try:
            data = json.load(fileobj)
        except ValueError as exc:
            raise ParseError('%s: %s' % (path, getattr(exc, 'msg', exc)),
                getattr(exc, 'lineno', None))
    if not isinstance(data, dict):
        raise ParseError('%s: expected a JSON object' % path)
    return data

def load(path):
    '''load('sweep.json') -> SweepSpec'''
    return build(read(path))
