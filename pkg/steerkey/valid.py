'''
valid - helper routines for validating/cleaning data from untrusted inputs

Sweep configurations and behavior tables arrive as JSON written by hand or by
other programs.  This module makes it easy to declare the structure those
documents must have and to clean them against it.

A validator is any function that raises ValueError with a useful message when
its value is not acceptable, and otherwise returns the cleaned value:

    def validator(value, expect):
        ... raise ValueError on bad input
        ... expect(expected, newvalue) to recurse into a sub-structure
        return value

Used together with an Expecter:

    from steerkey import valid

    clean = valid.Expecter().expect(
        {
            'eta': valid.probability,
            'workers': valid.int_range(1, 64),
        },
        data
    )

Every offending value is reported in the raised ValueIssue, not only the
first one.
'''

from . import util
from .exceptions import ExpectedIssue, SteerkeyError, ValueIssue
import builtins
import math

class ExpecterHelper(object):
    '''
    Lets a validator call expect() recursively with the options of the
    running expectation.

        expect = ExpecterHelper(self, opts)
        expect(expected, data)
    '''
    def __init__(self, expecter, opts):
        self.expecter = expecter
        self.opts = opts

    def __call__(self, expected, data):
        return self.expecter.expect(expected, data, **self.opts)

    def __getattr__(self, name):
        return getattr(self.expecter, name)

class Expecter(object):
    '''
    The expect() runtime.

    Anything callable in the expected structure is a validator.  Dictionaries
    are matched key by key (strict about extra and missing keys unless told
    otherwise) and lists either pair validators positionally or, with a single
    validator, apply it to every member:

        expecter = valid.Expecter()
        expecter.expect({'m': valid.int}, {'m': 8})        # {'m': 8}
        expecter.expect([valid.float], [0.1, 1])           # [0.1, 1.0]
        expecter.expect([valid.int, valid.string], [1, 'a'])

    Use `list_n_or_more` to require a minimum length.

    Optional keys are handled with `ignore_missing_keys=True`, usually
    together with util.defaults() on the cleaned result.
    '''
    ExpectedIssue = ExpectedIssue
    ExpecterHelper = ExpecterHelper
    ValueIssue = ValueIssue

    defaults = {
        'ignore_extra_keys': False,
        'ignore_missing_keys': False,
    }

    def __init__(self, **opts):
        self.opts = self.options(opts, self.defaults)

    def expect(self, expected, data, **opts):
        '''expect({'m': valid.int}, {'m': '8'}) -> {'m': 8}

        Clean and validate a given data structure using an expected structure.
        '''
        opts = self.options(opts, self.opts)

        if callable(expected):
            try:
                return expected(data, self.ExpecterHelper(self, opts))
            except ValueError as exc:
                raise self.ValueIssue([self.format_exc(exc)])

        if isinstance(expected, (list, tuple)) \
                and isinstance(data, (list, tuple)):
            pass
        elif expected.__class__ is not data.__class__:
            raise self.ValueIssue([
                'Unexpected type, expected %s: %s'
                % (expected.__class__.__name__, data.__class__.__name__)
            ])

        method = getattr(self, 'expect_' + expected.__class__.__name__, None)
        if not method:
            raise self.ExpectedIssue(
                'Your expected data structure is unhandled for type: %s'
                % expected.__class__
            )

        return method(expected, data, opts=opts)

    def expect_dict(self, expected, data, opts):
        clean = {}
        errors = {}
        data_keys = set(data.keys())
        expected_keys = set(expected.keys())

        extra = data_keys - expected_keys
        missing = expected_keys - data_keys
        if extra and not opts['ignore_extra_keys']:
            errors.setdefault('__nonkeyerrors__', []) \
                .append('Extra keys: %s' % ', '.join(sorted(extra)))
        if missing and not opts['ignore_missing_keys']:
            errors.setdefault('__nonkeyerrors__', []) \
                .append('Missing keys: %s' % ', '.join(sorted(missing)))

        for key in sorted(expected_keys & data_keys):
            try:
                clean[key] = self.expect(expected[key], data[key], **opts)
            except self.ValueIssue as exc:
                errors[key] = exc.errors

        if errors:
            raise self.ValueIssue(errors)

        return clean

    def expect_list(self, expected, data, opts):
        clean = []
        errors = {}

        if len(expected) == 0:
            return list(data)

        elif len(expected) == 1:
            for i, value in enumerate(data):
                try:
                    clean.append(self.expect(expected[0], value, **opts))
                except self.ValueIssue as exc:
                    errors[i] = exc.errors

        elif len(expected) == len(data):
            for i, (cleaner, value) in enumerate(zip(expected, data)):
                try:
                    clean.append(self.expect(cleaner, value, **opts))
                except self.ValueIssue as exc:
                    errors[i] = exc.errors

        else:
            errors['__nonindexerrors__'] = [
                'Expected list of length %s, saw %s'
                % (len(expected), len(data))
            ]

        if errors:
            raise self.ValueIssue(errors)

        return clean

    def expect_tuple(self, expected, data, opts):
        return tuple(self.expect_list(expected, data, opts))

    def format_exc(self, exc):
        return str(exc)

    def options(self, opts, defaults):
        '''
        Validate and set default options.
        '''
        return util.valid(
            util.defaults(self.shortcuts(opts), defaults),
            self.defaults.keys()
        )

    def shortcuts(self, opts):
        '''
        Handle option shortcuts like `strict_dict`.
        '''
        if 'strict_dict' in opts:
            strict_dict = opts.pop('strict_dict')
            opts['ignore_extra_keys'] = not strict_dict
            opts['ignore_missing_keys'] = not strict_dict
        return opts

#
# validator helpers
#

def no_none(validator):
    '''no_none(validator) -> validator_no_none'''
    def no_none_validator(value, expect):
        if value is None:
            raise ValueError(
                '%s does not accept None' % no_none_validator.__name__
            )
        return validator(value, expect)
    return wraps(no_none_validator, validator, '_no_none')

def or_none(validator):
    '''or_none(validator) -> validator_or_none'''
    def or_none_validator(value, expect):
        return None if value is None else validator(value, expect)
    return wraps(or_none_validator, validator, '_or_none')

def wraps(wrapper, wrapped, suffix='', prefix=''):
    '''wraps(wrapper, validator)

    Name a wrapping validator after the validator it wraps.
    '''
    wrapper.__name__ = prefix + wrapped.__name__ + suffix
    return wrapper

#
# validator factories
#

def choice(validator, choices):
    '''choice(valid.string, ['bff', 'analytic-simple']) -> string_choices'''
    def choice_validator(value, expect):
        value = validator(value, expect)
        if value is not None and value not in choices:
            raise ValueError('The value is not a valid choice: %s' % value)
        return value

    return wraps(choice_validator, validator, '_choices')

def list_n_or_more(validator, n):
    '''list_n_or_more(valid.float, 1) -> list_1_or_more_float'''
    if n < 0:
        raise SteerkeyError(
            'list_n_or_more only accepts values >= 0, not %s' % n
        )

    def list_n_or_more_validator(data, expect):
        clean = None
        errors = {}
        try:
            clean = expect([validator], data)
        except expect.ValueIssue as exc:
            errors = exc.errors

        if clean is not None and len(clean) < n:
            errors.setdefault('__nonindexerrors__', []).append(
                'Expected list with %s or more elements, saw %s'
                % (n, len(data))
            )

        if errors:
            raise expect.ValueIssue(errors)

        return clean

    return wraps(list_n_or_more_validator, validator,
        prefix='list_%s_or_more_' % n
    )

def range(validator, low, high):
    '''range(valid.int, 1, 64) -> int_range_1_to_64

    Use None for an unbounded side.
    '''
    def range_validator(value, expect):
        value = validator(value, expect)
        if value is None:
            return value
        if (low is not None and value < low) \
                or (high is not None and value > high):
            raise ValueError(
                'The value is not within the range %s <= %s <= %s'
                % (low, value, high)
            )
        return value

    return wraps(range_validator, validator, '_range_%s_to_%s' % (low, high))

float_range = lambda low, high: range(float, low, high)
int_range = lambda low, high: range(int, low, high)

#
# primitive validators
#

def float_or_none(value, expect):
    if value is None:
        return None
    if isinstance(value, builtins.bool):
        raise ValueError('Expected number, saw: bool')
    try:
        value = builtins.float(value)
    except (TypeError, ValueError):
        raise ValueError('Expected number, saw: %r' % (value, ))
    if not math.isfinite(value):
        raise ValueError('Expected finite number, saw: %r' % value)
    return value
float = no_none(float_or_none)

def int_or_none(value, expect):
    if value is None:
        return None
    if isinstance(value, builtins.bool):
        raise ValueError('Expected integer, saw: bool')
    if isinstance(value, builtins.float) and not value.is_integer():
        raise ValueError('Expected integer, saw: %r' % value)
    try:
        return builtins.int(value)
    except (TypeError, ValueError):
        raise ValueError('Expected integer, saw: %r' % (value, ))
int = no_none(int_or_none)

def string_or_none(value, expect):
    if value is not None and not isinstance(value, str):
        raise ValueError('Expected string, saw: %s' % type(value).__name__)
    return value
string = no_none(string_or_none)

#
# domain validators
#

probability = float_range(0.0, 1.0)
angle = float_range(-2 * math.pi, 2 * math.pi)
nonnegative = float_range(0.0, None)
