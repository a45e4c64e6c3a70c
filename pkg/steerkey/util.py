from .exceptions import ContractError, DomainError, InvalidOptions
import numpy as np

# entries this far below zero are rounding noise from the trace evaluation
NEGATIVE_TOLERANCE = 1e-12

def check_probability(value, name='probability'):
    '''check_probability(0.3) -> 0.3

    Raise DomainError unless value lies in [0, 1].
    '''
    if not (0.0 <= value <= 1.0):
        raise DomainError('%s must lie in [0, 1]: %r' % (name, value))
    return value

def clamp_probabilities(values, tolerance=NEGATIVE_TOLERANCE):
    '''clamp_probabilities(array) -> array clipped to [0, 1]

    Entries more negative than -tolerance (or larger than 1 + tolerance)
    indicate a broken model and raise ContractError.
    '''
    values = np.asarray(values, dtype=float)
    if values.size and (
        values.min() < -tolerance or values.max() > 1.0 + tolerance
    ):
        raise ContractError(
            'Probabilities outside [0, 1] beyond tolerance %g: min=%r max=%r'
            % (tolerance, values.min(), values.max())
        )
    return np.clip(values, 0.0, 1.0)

def defaults(opts, *defaults):
    '''defaults({'tol': 1e-6}, {'tol': 1e-8, 'max_iter': 200})
        -> {'tol': 1e-6, 'max_iter': 200}

    Set defaults in a dictionary.
    '''
    for default in defaults:
        for key, value in default.items():
            if key not in opts:
                opts[key] = value
    return opts

def frozen(array):
    '''frozen(array) -> read-only float array'''
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array

def valid(opts, allowed):
    '''valid({'key': 'value'}, 'opt') -> raise InvalidOptions

    Validate that a dictionary has only valid options/keys.
    '''
    allowed = set(allowed)
    used = set(opts.keys())
    invalid = used - allowed
    if invalid:
        raise InvalidOptions(', '.join(sorted(list(invalid))))
    return opts
