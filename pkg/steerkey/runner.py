'''
Key-rate evaluation, optimization, sweeps and threshold searches.

A point is evaluated by simulating the reference experiment, computing
H(A|B) from Bob's key-round outcomes (no-click kept as its own outcome) and
bounding H(A|E) from the parameter-estimation statistics with one of the
methods:

    analytic-simple   1 - phi(<A2 B2>)
    analytic-bias     phi(<A1>) - phi(sqrt(<A1>^2 + <A2 B2>^2))
    bff               the quadrature of moment relaxations

The rate is the Devetak-Winter rate H(A|E) - H(A|B).  Distance sweeps scale it
by Alice's retention probability, the chance a round survives her
single-click post-selection.
'''

from . import bff, entropy, model, quadrature, sdp, util
from .exceptions import (
    ContractError,
    DomainError,
    SteerkeyError,
)
from .optimize import Optimizer
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import logging
import math

log = logging.getLogger(__name__)

METHODS = ('analytic-simple', 'analytic-bias', 'bff')
AXES = ('eta', 'distance', 'visibility', 'grid')

OK = 'ok'
UNRELIABLE = 'unreliable'

REPORT_COLUMNS = (
    'axis',
    'value',
    'theta',
    'q',
    'h_ae',
    'h_ab',
    'retention',
    'rate',
    'method',
    'status',
)

class KeyRateReport(namedtuple('KeyRateReport',
        REPORT_COLUMNS + ('params', 'diagnostics'))):
    '''
    KeyRateReport(axis, value, theta, q, h_ae, h_ab, retention, rate, method,
        status, params, diagnostics)

    status is 'ok' or 'unreliable' (the entropy bound could not be
    certified; h_ae and rate are then NaN and diagnostics says why).
    '''
    __slots__ = ()

    @property
    def positive(self):
        return self.status == OK and self.rate > 0

class Noise(namedtuple('Noise',
        ['eta_a', 'eta_b', 'visibility', 'p_dark'])):
    '''
    Noise(eta_a=1, eta_b=1, visibility=1, p_dark=0)
    '''
    __slots__ = ()

    def __new__(cls, eta_a=1.0, eta_b=1.0, visibility=1.0, p_dark=0.0):
        for name, value in (('eta_a', eta_a), ('eta_b', eta_b),
                ('visibility', visibility), ('p_dark', p_dark)):
            util.check_probability(value, name)
        return super(Noise, cls).__new__(cls, eta_a, eta_b, visibility, p_dark)

class SweepSpec(object):
    '''
    SweepSpec(scenario, method='bff', axis='eta', start=0.5, stop=1.0, ...)

    Everything a sweep or a threshold search needs.  free lists the
    parameters the optimizer may move: theta, q, bob_angles, alice_angles.
    '''
    defaults = {
        'alice_angles': None,
        'attenuation': 0.2,
        'axis': 'eta',
        'bob_angles': None,
        'eta_fix': 1.0,
        'floor': 1e-9,
        'free': (),
        'merge_target': 1,
        'method': 'bff',
        'name': 'sweep',
        'noise': None,
        'optimizer': None,
        'q': 0.0,
        'quad_m': 8,
        'start': 0.5,
        'step': 0.05,
        'stop': 1.0,
        'theta': math.pi / 4,
        'tolerance': 1e-8,
        'visibilities': (),
        'workers': 1,
    }

    def __init__(self, scenario=None, **opts):
        opts = util.valid(util.defaults(opts, self.defaults), self.defaults)
        self.scenario = scenario or bff.Scenario()
        for key, value in opts.items():
            setattr(self, key, value)

        if self.method not in METHODS:
            raise ContractError('Unknown method %r, expected one of %s'
                % (self.method, ', '.join(METHODS)))
        if self.axis not in AXES:
            raise ContractError('Unknown axis %r, expected one of %s'
                % (self.axis, ', '.join(AXES)))
        if self.method != 'bff' and self.scenario.kind != '1sdi':
            raise ContractError('Analytic bounds exist only for the one-sided '
                'scenario')
        for name in self.free:
            if name not in ('theta', 'q', 'alice_angles', 'bob_angles'):
                raise ContractError('Cannot optimize over %r' % name)
        if self.method != 'bff' and ('q' in self.free or self.q > 0):
            raise ContractError('Noisy preprocessing needs the bff method')

        self.noise = self.noise or Noise()
        self.optimizer = dict(self.optimizer or {})
        if self.alice_angles is None:
            self.alice_angles = (0.0, math.pi / 2)
        if self.bob_angles is None:
            self.bob_angles = (0.0, math.pi / 2) if self.scenario.kind == '1sdi' \
                else (math.pi / 4, -math.pi / 4, 0.0)
        if len(self.bob_angles) != self.scenario.bob_inputs:
            raise ContractError('Need %s Bob angles, saw %s'
                % (self.scenario.bob_inputs, len(self.bob_angles)))
        self.free = tuple(self.free)

    def params(self):
        '''params() -> the starting parameter point'''
        return {
            'theta': float(self.theta),
            'q': float(self.q),
            'alice_angles': tuple(self.alice_angles),
            'bob_angles': tuple(self.bob_angles),
        }

    def values(self):
        '''values() -> the axis values from start to stop (inclusive)'''
        if self.step <= 0:
            raise DomainError('step must be positive: %r' % self.step)
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [self.start + k * self.step for k in range(count + 1)]

    def noise_at(self, value):
        '''noise_at(axis value) -> Noise'''
        noise = self.noise
        if self.axis in ('eta', 'grid'):
            return noise._replace(eta_b=value)
        if self.axis == 'visibility':
            return noise._replace(visibility=value)
        return noise._replace(
            eta_a=model.fiber_efficiency(self.eta_fix, self.attenuation, value),
            eta_b=self.eta_fix,
        )

    def rule(self):
        return quadrature.gauss_radau(self.quad_m)

    def solver(self):
        return sdp.Solver(tolerance=self.tolerance)

def experiment(spec, noise, params):
    '''experiment(spec, noise, params) -> (full table, retention)

    Bob's table keeps the no-click outcome; Alice is fair-sampled.
    '''
    state = model.make_state(params['theta'], noise.visibility)
    alice = model.projective_measurements('A', params['alice_angles'])
    if noise.eta_a < 1.0 or noise.p_dark > 0.0:
        alice = model.darkcount_alice_povm(alice, noise.eta_a, noise.p_dark)
    bob = model.darkcount_bob_povm(
        model.projective_measurements('B', params['bob_angles']),
        noise.eta_b,
        noise.p_dark,
    )
    retention = model.retention_probability(noise.eta_a, noise.p_dark)
    return model.behavior(state, alice, bob), retention

def estimation_table(spec, table):
    '''estimation_table(spec, full table) -> parameter-estimation statistics'''
    if spec.scenario.bob_outcomes == 2:
        return table.merge_empty(spec.merge_target)
    return table

def node_instance(spec, value, node=1, params=None):
    '''node_instance(spec, axis value, node) -> bff.NodeInstance

    The SDP a bff evaluation of this point solves at quadrature node `node`.
    '''
    rule = spec.rule()
    if not 1 <= node < rule.m:
        raise ContractError('Node must lie in 1..%s: %r' % (rule.m - 1, node))
    params = dict(spec.params(), **(params or {}))
    table, _ = experiment(spec, spec.noise_at(value), params)
    return bff.NodeInstance(spec.scenario, estimation_table(spec, table),
        rule.nodes[node - 1], params['q'], node)

def evaluate_point(spec, noise, params=None, axis_value=None, rule=None,
        solver=None):
    '''evaluate_point(spec, noise, params) -> KeyRateReport'''
    params = dict(spec.params(), **(params or {}))
    scenario = spec.scenario
    method = spec.method
    q = params['q']
    if method != 'bff' and q > 0:
        raise ContractError('Noisy preprocessing needs the bff method')

    table, retention = experiment(spec, noise, params)
    h_ab = entropy.cond_entropy_key(
        table, q, x=scenario.key_input, y=scenario.key_bob_input
    )
    estimation = estimation_table(spec, table)

    status = OK
    diagnostics = ''
    try:
        if method == 'analytic-simple':
            h_ae = entropy.bound_simple(model.correlator(estimation, 2, 2))
        elif method == 'analytic-bias':
            h_ae = entropy.bound_bias(
                model.marginal_bias(estimation, 1),
                model.correlator(estimation, 2, 2),
            )
        else:
            result = bff.entropy_bound(
                scenario, estimation, rule or spec.rule(), q,
                solver or spec.solver()
            )
            h_ae = result.value
    except (SteerkeyError, ArithmeticError, LookupError, TypeError,
            ValueError) as exc:
        if method != 'bff':
            raise
        log.warning('Unreliable point %s=%r: %s', spec.axis, axis_value, exc)
        status = UNRELIABLE
        diagnostics = '%s: %s' % (type(exc).__name__, exc)
        h_ae = float('nan')

    rate = entropy.dw_rate(h_ae, h_ab)
    if spec.axis == 'distance':
        rate *= retention
    return KeyRateReport(
        axis=spec.axis,
        value=axis_value,
        theta=params['theta'],
        q=q,
        h_ae=h_ae,
        h_ab=h_ab,
        retention=retention,
        rate=rate,
        method=method,
        status=status,
        params=params,
        diagnostics=diagnostics,
    )

def _flatten(params, free):
    flat = {}
    for name in free:
        value = params[name]
        if isinstance(value, (tuple, list)):
            for k, item in enumerate(value):
                flat['%s.%s' % (name, k)] = float(item)
        else:
            flat[name] = float(value)
    return flat

def _unflatten(params, flat):
    params = dict(params)
    for key, value in flat.items():
        if '.' in key:
            name, k = key.split('.')
            items = list(params[name])
            items[int(k)] = value
            params[name] = tuple(items)
        else:
            params[key] = value
    return params

def bounds(free, params):
    '''bounds(free, params) -> optimizer box for the flattened parameters'''
    box = {}
    for key in _flatten(params, free):
        if key == 'theta':
            box[key] = (0.0, math.pi / 4)
        elif key == 'q':
            box[key] = (0.0, 0.5)
        else:
            box[key] = (-math.pi, math.pi)
    return box

def optimize_point(spec, noise, params=None, axis_value=None, rule=None,
        solver=None):
    '''optimize_point(spec, noise) -> KeyRateReport at the best parameters

    Unreliable evaluations count as -inf.  Without free parameters this is
    evaluate_point().
    '''
    start = dict(spec.params(), **(params or {}))
    if not spec.free:
        return evaluate_point(spec, noise, start, axis_value, rule, solver)

    rule = rule or (spec.rule() if spec.method == 'bff' else None)
    solver = solver or (spec.solver() if spec.method == 'bff' else None)

    def rate(flat):
        report = evaluate_point(spec, noise, _unflatten(start, flat),
            axis_value, rule, solver)
        return report.rate if report.status == OK else -math.inf

    optimizer = Optimizer(**spec.optimizer)
    best = optimizer.maximize(
        rate, _flatten(start, spec.free), bounds(spec.free, start)
    )
    report = evaluate_point(spec, noise, _unflatten(start, best.params),
        axis_value, rule, solver)
    log.info('%s=%r: optimized rate %.6g after %s evaluations (seeds %s)',
        spec.axis, axis_value, report.rate, best.evaluations, best.seeds)
    return report._replace(diagnostics=(report.diagnostics or
        'seeds=%s' % (list(best.seeds), )))

def sweep(spec):
    '''sweep(spec) -> [KeyRateReport] in axis order

    Points run on a bounded thread pool.  Distance sweeps optimize the l = 0
    point first and start every other point from its parameters.
    '''
    if spec.axis == 'grid':
        raise ContractError('Efficiency-visibility grids are scanned by '
            'boundary()')
    values = spec.values()
    start = spec.params()

    if spec.axis == 'distance' and spec.free:
        anchor = optimize_point(spec, spec.noise_at(0.0), start, 0.0)
        if anchor.status == OK:
            start = anchor.params

    def run(value):
        try:
            return optimize_point(spec, spec.noise_at(value), start, value)
        except SteerkeyError as exc:
            log.exception('Point %s=%r failed', spec.axis, value)
            nan = float('nan')
            return KeyRateReport(spec.axis, value, start['theta'], start['q'],
                nan, nan, nan, nan, spec.method, UNRELIABLE, start, str(exc))

    workers = max(1, int(spec.workers))
    if workers == 1:
        reports = [run(value) for value in values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, values))

    for report in reports:
        log.info('%s=%.6g rate=%.6g (%s)', report.axis, report.value,
            report.rate, report.status)
    return reports

Threshold = namedtuple('Threshold', ['value', 'low', 'high', 'steps'])

def threshold(spec, low=None, high=None, precision=None):
    '''threshold(spec) -> Threshold

    Bisection for the axis value where the certified rate stops exceeding
    spec.floor.  For eta and visibility the rate grows with the value
    (positive at high); for distance it falls (positive at low).  precision
    defaults to 1e-3 for efficiencies and 1 km for distances.
    '''
    decreasing = spec.axis == 'distance'
    if precision is None:
        precision = 1.0 if decreasing else 1e-3
    if low is None:
        low = 0.0 if decreasing else spec.start
    if high is None:
        high = spec.stop

    def positive(value):
        report = optimize_point(spec, spec.noise_at(value), None, value)
        result = report.status == OK and report.rate > spec.floor
        log.info('threshold probe %s=%.6f rate=%.6g', spec.axis, value,
            report.rate)
        return result

    good, bad = (low, high) if decreasing else (high, low)
    if not positive(good):
        raise DomainError('Rate is not positive at %s=%r' % (spec.axis, good))
    if positive(bad):
        return Threshold(bad, min(good, bad), max(good, bad), 0)

    steps = 0
    while abs(good - bad) > precision:
        middle = (good + bad) / 2
        if positive(middle):
            good = middle
        else:
            bad = middle
        steps += 1

    value = (good + bad) / 2
    log.info('%s threshold %.6f after %s steps', spec.axis, value, steps)
    return Threshold(value, min(good, bad), max(good, bad), steps)

def boundary(spec, visibilities, low=None, high=1.0, precision=None):
    '''boundary(spec, [v, ...]) -> [(v, Threshold)]

    Efficiency threshold for each visibility: the boundary of the region
    where the rate is positive.
    '''
    results = []
    for visibility in visibilities:
        local = SweepSpec(spec.scenario, **dict(
            _options(spec),
            axis='eta',
            noise=spec.noise._replace(visibility=visibility),
        ))
        try:
            found = threshold(local, low, high, precision)
        except DomainError as exc:
            log.info('visibility %.4f: %s', visibility, exc)
            found = None
        results.append((visibility, found))
    return results

def _options(spec):
    return {key: getattr(spec, key) for key in SweepSpec.defaults}
