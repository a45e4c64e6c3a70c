'''
Derivative-free maximization of key rates over a few bounded parameters.
'''

from . import util
from .exceptions import ContractError
from collections import namedtuple
import logging
import math
import numpy as np

log = logging.getLogger(__name__)

INVERSE_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

Maximum = namedtuple('Maximum', ['params', 'value', 'evaluations', 'seeds'])

def golden_section(func, low, high, xtol=1e-8, max_iter=200):
    '''golden_section(f, low, high) -> (x, f(x))

    Maximizes a unimodal function on [low, high].  The endpoints are
    compared as well, so monotone functions are handled.
    '''
    if high < low:
        raise ContractError('Empty interval [%r, %r]' % (low, high))
    a, b = low, high
    c = b - INVERSE_GOLDEN * (b - a)
    d = a + INVERSE_GOLDEN * (b - a)
    fc = func(c)
    fd = func(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVERSE_GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVERSE_GOLDEN * (b - a)
            fd = func(d)

    candidates = [(fc, c), (fd, d), (func(low), low), (func(high), high)]
    value, x = max(candidates, key=lambda item: item[0])
    return x, value

class Optimizer(object):
    '''
    Optimizer(restarts=3, tolerance=1e-6, seed=0)

    Coordinate ascent with golden-section line searches over the free
    parameters, restarted from seeded random points.  The first start is
    always the given point, so the result is never worse than it.
    '''
    defaults = {
        'max_sweeps': 20,
        'restarts': 3,
        'seed': 0,
        'tolerance': 1e-6,
        'xtol': 1e-10,
    }

    def __init__(self, **opts):
        self.opts = util.valid(util.defaults(opts, self.defaults), self.defaults)

    def maximize(self, func, start, bounds):
        '''maximize(f, {'theta': 0.7}, {'theta': (0, pi/4)}) -> Maximum

        func takes a params dict.  Only parameters listed in bounds move.
        '''
        rng = np.random.default_rng(self.opts['seed'])
        evaluations = [0]

        def evaluate(params):
            evaluations[0] += 1
            return func(params)

        best = dict(start)
        best_value = evaluate(best)
        seeds = []

        for restart in range(max(1, self.opts['restarts'])):
            if restart == 0:
                point = dict(start)
            else:
                seed = int(rng.integers(0, 2 ** 31 - 1))
                seeds.append(seed)
                local = np.random.default_rng(seed)
                point = dict(start)
                for name, (low, high) in sorted(bounds.items()):
                    point[name] = float(local.uniform(low, high))

            point, value = self.ascend(evaluate, point, bounds)
            log.debug('restart %s: %r -> %.10g', restart, point, value)
            if value > best_value:
                best, best_value = point, value

        return Maximum(best, best_value, evaluations[0], tuple(seeds))

    def ascend(self, evaluate, point, bounds):
        value = evaluate(point)
        for sweep in range(self.opts['max_sweeps']):
            previous = value
            for name, (low, high) in sorted(bounds.items()):
                def line(x, name=name):
                    trial = dict(point)
                    trial[name] = x
                    return evaluate(trial)
                x, candidate = golden_section(line, low, high,
                    xtol=self.opts['xtol'])
                if candidate > value:
                    point = dict(point)
                    point[name] = x
                    value = candidate
            if value - previous < self.opts['tolerance']:
                break
        return point, value
