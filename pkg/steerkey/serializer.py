'''
JSON and CSV output for the objects the toolkit produces, and loading of the
JSON documents it reads back (behavior tables).

    serializer = Serializer()
    serializer.to_json(table)          # {"nX": 2, "nY": 2, ...}
    serializer.to_csv(reports)         # axis,value,theta,...
'''

from . import valid
from .bff import MomentBasis, NodeInstance
from .exceptions import SteerkeyError
from .model import BehaviorTable
from .quadrature import QuadratureRule, alpha_bound
from .runner import REPORT_COLUMNS, KeyRateReport
from .sdp import SdpSolution
from .sdpa import solution_data
from functools import partial
import csv
import io
import json
import math
import numpy as np

class Serializable(object):
    '''
    Serializable(klass)

    Converts instances of klass into plain data.  Subclass and implement
    convert().
    '''
    klass = None

    def __init__(self, klass=None):
        if klass is not None:
            self.klass = klass

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, self.klass.__name__)

    def convert(self, obj, serializer, **opts):
        raise NotImplementedError

class SerializableBehavior(Serializable):
    klass = BehaviorTable

    def convert(self, obj, serializer, **opts):
        return {
            'nX': obj.nX,
            'nY': obj.nY,
            'outA': list(obj.outA),
            'outB': list(obj.outB),
            'p': obj.nested(),
        }

class SerializableRule(Serializable):
    klass = QuadratureRule

    def convert(self, obj, serializer, **opts):
        return [
            {'i': i + 1, 't': t, 'w': w, 'alpha': alpha_bound(t)}
            for i, (t, w) in enumerate(zip(obj.nodes, obj.weights))
        ]

class SerializableReport(Serializable):
    klass = KeyRateReport

    def convert(self, obj, serializer, **opts):
        return serializer.convert(obj._asdict(), **opts)

class SerializableBasis(Serializable):
    klass = MomentBasis

    def convert(self, obj, serializer, **opts):
        return {
            'level': obj.level,
            'words': [str(word) for word in obj],
        }

class SerializableNodeInstance(Serializable):
    klass = NodeInstance

    def convert(self, obj, serializer, **opts):
        return serializer.convert(obj.provenance(), **opts)

class SerializableSolution(Serializable):
    klass = SdpSolution

    def convert(self, obj, serializer, **opts):
        return serializer.convert(solution_data(obj), **opts)

class Serializer(object):
    '''
    Create a serializer to register serializable's against.  Understands how to
    serialize objects to a data representation.
    '''
    class SerializableExists(SteerkeyError): pass
    class Unsupported(SteerkeyError): pass

    formats = ('csv', 'json')
    extensions = {
        '.csv': 'csv',
        '.json': 'json',
    }

    dict_like_iterables = (
        dict,
    )
    list_like_iterables = (
        list,
        tuple,
    )
    primitive_classes = (
        int,
        float,
        str,
    )
    primitive_values = (
        None,
        True,
        False,
    )

    behavior_expected = {
        'nX': valid.int_range(1, None),
        'nY': valid.int_range(1, None),
        'outA': valid.list_n_or_more(valid.int_range(1, None), 1),
        'outB': valid.list_n_or_more(valid.int_range(1, None), 1),
        'p': valid.list_n_or_more(
            valid.list_n_or_more(
                valid.list_n_or_more(valid.list_n_or_more(valid.float, 1), 1),
                1
            ),
            1
        ),
    }

    def __init__(self, default_format='json'):
        if default_format not in self.formats:
            raise self.Unsupported(default_format)
        self.default_format = default_format

        self.complex = (
            (np.ndarray, self.convert_array),
            (np.bool_, bool),
            (np.integer, int),
            (np.floating, self.convert_float),
        )

        self.registered = {}
        for serializable in (
            SerializableBasis(),
            SerializableBehavior(),
            SerializableNodeInstance(),
            SerializableReport(),
            SerializableRule(),
            SerializableSolution(),
        ):
            self.register(serializable)

    def convert(self, obj, **opts):
        '''convert(obj) -> serializable

        Convert an arbitrary object into something serializable.

        Raises TypeError if unable to convert.
        '''
        if obj is None or obj is True or obj is False:
            return obj

        elif isinstance(obj, float):
            return self.convert_float(obj)

        elif isinstance(obj, self.primitive_classes):
            return obj

        for klass in type(obj).__mro__:
            if klass in self.registered:
                return self.registered[klass].convert(obj, self, **opts)

        if isinstance(obj, self.list_like_iterables):
            return [
                self.convert(subobj, **opts)
                for subobj in obj
            ]

        elif isinstance(obj, self.dict_like_iterables):
            return {
                self.convert_key(key): self.convert(val, **opts)
                for key, val in obj.items()
            }

        for klass, method in self.complex:
            if isinstance(obj, klass):
                return method(obj)

        return self.convert_unknown(obj)

    def convert_array(self, obj):
        return self.convert(obj.tolist())

    def convert_float(self, obj):
        obj = float(obj)
        # json has no NaN
        if math.isnan(obj) or math.isinf(obj):
            return None
        return obj

    def convert_key(self, key):
        if isinstance(key, tuple):
            return ','.join(str(part) for part in key)
        return str(key) if not isinstance(key, str) else key

    def convert_unknown(self, obj):
        raise TypeError(repr(obj) + ' is not serializable')

    def get_format(self, path):
        '''get_format('rates.csv') -> 'csv'

        Find a format from a file name; unknown extensions get the default.
        '''
        for extension, format in self.extensions.items():
            if str(path).endswith(extension):
                return format
        return self.default_format

    def register(self, serializable):
        '''register(SerializableMyObject(MyObject))

        Register a Serializable to use with a custom object.
        '''
        if serializable.klass in self.registered:
            raise self.SerializableExists('%s = %s' % (
                repr(serializable.klass),
                repr(self.registered[serializable.klass])
            ))
        self.registered[serializable.klass] = serializable

    def serialize(self, obj, format=None, **opts):
        '''serialize(obj, 'csv') -> text'''
        format = format or self.default_format
        if format not in self.formats:
            raise self.Unsupported(format)
        return getattr(self, 'to_%s' % format)(obj, **opts)

    def from_json(self, body, **opts):
        return json.loads(body)

    def load_behavior(self, data):
        '''load_behavior({"nX": 2, ...}) -> BehaviorTable

        Raises ValueIssue listing every malformed field.
        '''
        if isinstance(data, (str, bytes)):
            data = self.from_json(data)
        clean = valid.Expecter().expect(self.behavior_expected, data)
        return BehaviorTable(
            clean['nX'], clean['nY'], clean['outA'], clean['outB'], clean['p']
        )

    def to_csv(self, rows, columns=REPORT_COLUMNS, **opts):
        '''to_csv([report, ...]) -> text

        Rows are namedtuples or dicts; missing values are written empty.
        '''
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            data = self.convert(row, **opts)
            writer.writerow([
                '' if data.get(column) is None else data[column]
                for column in columns
            ])
        return out.getvalue()

    def to_json(self, obj, **opts):
        dopts = {}

        if 'indent' in opts:
            try:
                dopts['indent'] = int(opts.pop('indent'))
            except ValueError:
                pass

        convert = self.convert
        if opts:
            convert = partial(convert, **opts)

        return json.dumps(convert(obj), **dopts)
