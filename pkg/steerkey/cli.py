'''
steerkey command line.

    steerkey sweep --config sweep.json --out results/
    steerkey threshold --method analytic-simple
    steerkey quadrature --m 15 [--out rule.json] [--format csv|json]
    steerkey sdp export sweep.json --value 0.8 --node 1 --out node.dat-s
    steerkey sdp solve node.dat-s [--solution external.json]
'''

from . import config, quadrature, runner, sdp, sdpa
from .exceptions import SteerkeyError
from .serializer import Serializer
import argparse
import logging
import os
import sys

log = logging.getLogger(__name__)

def load_spec(args, **overrides):
    '''load_spec(args) -> SweepSpec from --config plus command line overrides'''
    data = config.read(args.config) if args.config else {}
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return config.build(data)

def write(path, text):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as fileobj:
        fileobj.write(text)
    log.info('wrote %s', path)

def cmd_sweep(args):
    spec = load_spec(args)
    serializer = Serializer()
    if spec.axis == 'grid':
        rows = [
            {
                'visibility': visibility,
                'eta': found.value if found else None,
                'low': found.low if found else None,
                'high': found.high if found else None,
            }
            for visibility, found in runner.boundary(
                spec, spec.visibilities, spec.start, spec.stop)
        ]
        text = serializer.serialize(rows, 'csv',
            columns=('visibility', 'eta', 'low', 'high'))
    else:
        reports = runner.sweep(spec)
        rows = reports
        text = serializer.serialize(reports, 'csv')

    if args.out:
        write(os.path.join(args.out, '%s.csv' % spec.name), text)
        write(os.path.join(args.out, '%s.json' % spec.name),
            serializer.serialize(rows, 'json', indent=2))
    else:
        sys.stdout.write(text)
    return 0

def cmd_threshold(args):
    spec = load_spec(args,
        method=args.method,
        axis=args.axis,
        quad_m=args.m,
        free=args.free,
    )
    found = runner.threshold(spec, args.low, args.high, args.precision)
    sys.stdout.write('%s,%.6f,%.6f,%.6f\n'
        % (spec.axis, found.value, found.low, found.high))
    return 0

RULE_COLUMNS = ('i', 't', 'w', 'alpha')

def cmd_quadrature(args):
    serializer = Serializer('csv')
    rows = serializer.convert(quadrature.gauss_radau(args.m))
    format = args.format or serializer.get_format(args.out or '')
    opts = {'columns': RULE_COLUMNS} if format == 'csv' else {'indent': 2}
    text = serializer.serialize(rows, format, **opts)
    if args.out:
        write(args.out, text)
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')
    return 0

def cmd_sdp_export(args):
    spec = load_spec(args)
    instance = runner.node_instance(spec, args.value, args.node)
    sdpa.export_sdpa(instance.problem, args.out)
    log.info('exported node %s (t=%.6f) to %s', args.node, instance.t,
        args.out)
    if args.provenance:
        write(args.provenance, Serializer().to_json(instance, indent=2))
    return 0

def cmd_sdp_solve(args):
    problem = sdpa.import_sdpa(args.file)
    if args.solution:
        solution = sdpa.import_solution(args.solution, problem, args.tolerance)
    else:
        solution = sdp.solve(problem, tolerance=args.tolerance)
    data = sdpa.solution_data(solution)
    if solution.status == sdp.OPTIMAL:
        data['certified'] = sdp.certified_lower_bound(solution)
    sys.stdout.write(Serializer().to_json(data, indent=2) + '\n')
    return 0 if solution.status == sdp.OPTIMAL else 1

def parser():
    main = argparse.ArgumentParser(prog='steerkey',
        description='Key rates of one-sided device-independent QKD.')
    main.add_argument('-v', '--verbose', action='store_true',
        help='debug logging')
    main.add_argument('-q', '--quiet', action='store_true',
        help='warnings and errors only')
    commands = main.add_subparsers(dest='command')
    commands.required = True

    sweep = commands.add_parser('sweep', help='run a parameter sweep')
    sweep.add_argument('--config', required=True)
    sweep.add_argument('--out', help='directory for <name>.csv and <name>.json')
    sweep.set_defaults(func=cmd_sweep)

    threshold = commands.add_parser('threshold',
        help='bisect for the efficiency or distance where the rate vanishes')
    threshold.add_argument('--config')
    threshold.add_argument('--method', choices=runner.METHODS)
    threshold.add_argument('--axis', choices=('eta', 'distance'))
    threshold.add_argument('--m', type=int, help='quadrature nodes')
    threshold.add_argument('--free', nargs='*',
        choices=('theta', 'q', 'alice_angles', 'bob_angles'))
    threshold.add_argument('--low', type=float)
    threshold.add_argument('--high', type=float)
    threshold.add_argument('--precision', type=float)
    threshold.set_defaults(func=cmd_threshold)

    rule = commands.add_parser('quadrature',
        help='print or write the Gauss-Radau nodes as CSV or JSON')
    rule.add_argument('--m', type=int, default=8)
    rule.add_argument('--out', help='file to write; .json or .csv picks the format')
    rule.add_argument('--format', help='csv or json')
    rule.set_defaults(func=cmd_quadrature)

    sdp_parser = commands.add_parser('sdp', help='SDPA interop')
    sdp_commands = sdp_parser.add_subparsers(dest='sdp_command')
    sdp_commands.required = True

    export = sdp_commands.add_parser('export',
        help='write the SDP of one quadrature node')
    export.add_argument('config')
    export.add_argument('--value', type=float, required=True,
        help='axis value of the point')
    export.add_argument('--node', type=int, default=1)
    export.add_argument('--out', required=True)
    export.add_argument('--provenance', help='JSON dump of basis and constraints')
    export.set_defaults(func=cmd_sdp_export)

    solve = sdp_commands.add_parser('solve',
        help='solve an SDPA file or verify an external solution for it')
    solve.add_argument('file')
    solve.add_argument('--solution', help='JSON solution to verify')
    solve.add_argument('--tolerance', type=float, default=1e-8)
    solve.set_defaults(func=cmd_sdp_solve)

    return main

def main(argv=None):
    args = parser().parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )

    try:
        return args.func(args)
    except SteerkeyError as exc:
        log.error('%s', exc)
        return 2

if __name__ == '__main__':
    sys.exit(main())
