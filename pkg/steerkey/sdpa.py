'''
SDPA sparse-format interop and solution files.

A problem is written in the standard form the embedded solver uses, which is
SDPA's dual form

    maximize F0 . Y  subject to  Fi . Y = ci,  Y psd

with F0 = -C for minimization and F0 = C for maximization.  Inequalities are
written with their diagonal slack block.

The file opens with comment lines, all starting with "* steerkey", before
the mDIM line.  SDPA readers skip leading lines that start with '*' or '"',
so the body is plain SDPA; the comments carry what the format has no room
for:

    * steerkey sense minimize|maximize
    * steerkey senses = <= ...        one per constraint
    * steerkey slack N                 1-based index of the slack block
    * steerkey trace-bound T
    * steerkey offset c                constant added to the objective
    * steerkey name node-1

read_sdpa() uses them to rebuild the problem exactly; plain SDPA files from
elsewhere are read as the maximization above.
'''

from . import sdp
from .exceptions import ContractError, ParseError
import json
import logging
import numpy as np

log = logging.getLogger(__name__)

COMMENT = '* steerkey'

def _format(value):
    return format(float(value), '.17g')

def write_sdpa(problem, fileobj):
    '''write_sdpa(problem, fileobj)

    Write the problem in SDPA sparse format.
    '''
    form = problem.standard_form()
    senses = [con.sense for con in problem.constraints]

    fileobj.write('%s sense %s\n' % (COMMENT, problem.sense))
    if senses:
        fileobj.write('%s senses %s\n' % (COMMENT, ' '.join(senses)))
    if form.slack_block is not None:
        fileobj.write('%s slack %d\n' % (COMMENT, form.slack_block + 1))
    if problem.trace_bound is not None:
        fileobj.write('%s trace-bound %s\n'
            % (COMMENT, _format(problem.trace_bound)))
    if problem.offset:
        fileobj.write('%s offset %s\n' % (COMMENT, _format(problem.offset)))
    if problem.name:
        fileobj.write('%s name %s\n' % (COMMENT, problem.name))

    fileobj.write('%d\n' % form.m)
    fileobj.write('%d\n' % len(form.blocks))
    fileobj.write(' '.join(
        str(size if kind == 'dense' else -size) for kind, size in form.blocks
    ) + '\n')
    fileobj.write(' '.join(_format(value) for value in form.b) + '\n')

    # F0 = -C_std: the standard form already negated maximization objectives
    for b, (kind, size) in enumerate(form.blocks):
        C = form.C[b]
        for i in range(size):
            for j in range(i, size):
                value = C[i] if kind == 'diag' else C[i, j]
                if kind == 'diag' and i != j:
                    continue
                if value != 0.0:
                    fileobj.write('0 %d %d %d %s\n'
                        % (b + 1, i + 1, j + 1, _format(-value)))

    for k, con in enumerate(problem.constraints):
        for (b, i, j), value in sorted(con.entries.items()):
            fileobj.write('%d %d %d %d %s\n'
                % (k + 1, b + 1, i + 1, j + 1, _format(value)))
        if k in form.slack_of:
            value = 1.0 if con.sense == '<=' else -1.0
            slot = form.slack_of[k] + 1
            fileobj.write('%d %d %d %d %s\n'
                % (k + 1, form.slack_block + 1, slot, slot, _format(value)))

def export_sdpa(problem, path):
    '''export_sdpa(problem, 'node.dat-s')'''
    with open(path, 'w') as fileobj:
        write_sdpa(problem, fileobj)

def _numbers(text, lineno, cast=float, header=False):
    if header:
        # "2 =mDIM" style annotations end the useful part of header lines
        text = text.split('=')[0]
    cleaned = text.replace(',', ' ').replace('{', ' ').replace('}', ' ') \
        .replace('(', ' ').replace(')', ' ')
    try:
        return [cast(token) for token in cleaned.split()]
    except ValueError:
        raise ParseError('Expected numbers, saw %r' % text.strip(), lineno)

def read_sdpa(fileobj):
    '''read_sdpa(fileobj) -> SdpProblem'''
    meta = {}
    lines = []
    for lineno, line in enumerate(fileobj, 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(COMMENT):
            parts = stripped[len(COMMENT):].split(None, 1)
            if parts:
                meta[parts[0]] = parts[1] if len(parts) > 1 else ''
            continue
        if stripped[0] in '*"':
            continue
        lines.append((lineno, stripped))

    if len(lines) < 4:
        raise ParseError('Truncated SDPA file', lines[-1][0] if lines else 1)

    lineno, text = lines[0]
    m = _numbers(text, lineno, int, header=True)[:1]
    lineno, text = lines[1]
    n_blocks = _numbers(text, lineno, int, header=True)[:1]
    if not m or not n_blocks:
        raise ParseError('Expected mDIM and nBLOCK', lineno)
    m = m[0]
    n_blocks = n_blocks[0]

    lineno, text = lines[2]
    structure = _numbers(text, lineno, int, header=True)
    if len(structure) < n_blocks:
        raise ParseError(
            'Expected %s block sizes, saw %s' % (n_blocks, len(structure)),
            lineno
        )
    structure = structure[:n_blocks]
    if 0 in structure:
        raise ParseError('Block size 0', lineno)

    lineno, text = lines[3]
    c = _numbers(text, lineno)
    if len(c) < m:
        raise ParseError('Expected %s entries in c, saw %s' % (m, len(c)),
            lineno)
    c = c[:m]

    F = [dict() for _ in range(m + 1)]
    for lineno, text in lines[4:]:
        values = _numbers(text, lineno)
        if len(values) != 5:
            raise ParseError('Expected "matno block i j value"', lineno)
        matno, block, i, j = (int(v) for v in values[:4])
        if not (0 <= matno <= m):
            raise ParseError('Matrix number %s out of range' % matno, lineno)
        if not (1 <= block <= n_blocks):
            raise ParseError('Block %s out of range' % block, lineno)
        size = abs(structure[block - 1])
        if not (1 <= i <= size and 1 <= j <= size):
            raise ParseError('Entry (%s, %s) outside block %s' % (i, j, block),
                lineno)
        if structure[block - 1] < 0 and i != j:
            raise ParseError('Off-diagonal entry in diagonal block %s' % block,
                lineno)
        key = (block - 1, min(i, j) - 1, max(i, j) - 1)
        F[matno][key] = F[matno].get(key, 0.0) + values[4]

    sense = meta.get('sense', 'maximize')
    senses = meta.get('senses', '').split() or ['='] * m
    if len(senses) != m:
        raise ParseError('Expected %s constraint senses, saw %s'
            % (m, len(senses)))
    slack = int(meta['slack']) - 1 if 'slack' in meta else None
    trace_bound = float(meta['trace-bound']) if 'trace-bound' in meta else None
    offset = float(meta.get('offset', 0.0))

    kept = [b for b in range(n_blocks) if b != slack]
    renumber = {b: index for index, b in enumerate(kept)}

    try:
        problem = sdp.SdpProblem(
            [structure[b] for b in kept],
            sense=sense,
            name=meta.get('name'),
            trace_bound=trace_bound,
            offset=offset,
        )
    except ContractError as exc:
        raise ParseError(str(exc))

    # F0 = C for maximization, -C for minimization
    sign = 1.0 if sense == 'maximize' else -1.0
    problem.set_objective({
        (renumber[b], i, j): sign * value
        for (b, i, j), value in F[0].items()
        if b in renumber
    })
    for k in range(m):
        problem.add_constraint(
            {
                (renumber[b], i, j): value
                for (b, i, j), value in F[k + 1].items()
                if b in renumber
            },
            senses[k],
            c[k],
        )
    return problem

def import_sdpa(path):
    '''import_sdpa('node.dat-s') -> SdpProblem'''
    with open(path) as fileobj:
        return read_sdpa(fileobj)

def solution_data(solution):
    '''solution_data(solution) -> {'primal', 'dual', 'y', 'status', 'X'}'''
    return {
        'primal': solution.primal_value,
        'dual': solution.dual_value,
        'y': [float(v) for v in solution.y],
        'status': solution.status,
        'X': [np.asarray(block).tolist() for block in solution.X],
    }

def export_solution(solution, path):
    with open(path, 'w') as fileobj:
        json.dump(solution_data(solution), fileobj, indent=2)

def load_solution(data, problem, tolerance=1e-8):
    '''load_solution({'primal': ..., 'y': [...], ...}, problem) -> SdpSolution

    Reads a solution produced elsewhere.  The solution is checked with
    certified_lower_bound() before it is returned, exactly like one from the
    embedded solver.
    '''
    try:
        y = np.array(data['y'], dtype=float)
        status = data['status']
        primal = float(data['primal'])
        dual = float(data['dual'])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError('Malformed solution: %s' % exc)

    if len(y) != len(problem.constraints):
        raise ParseError('Solution has %s dual values, problem has %s '
            'constraints' % (len(y), len(problem.constraints)))
    if status not in (sdp.OPTIMAL, sdp.INFEASIBLE, sdp.NUMERICAL_LIMIT):
        raise ParseError('Unknown status %r' % status)

    X = [np.array(block, dtype=float) for block in data.get('X') or []]
    solution = sdp.SdpSolution(
        status=status,
        primal_value=primal,
        dual_value=dual,
        X=X,
        y=y,
        S=None,
        iterations=None,
        gap=None,
        primal_residual=None,
        dual_residual=None,
        tolerance=tolerance,
        certificate=None,
        problem=problem,
    )
    sdp.certified_lower_bound(solution)
    return solution

def import_solution(path, problem, tolerance=1e-8):
    '''import_solution('solution.json', problem) -> verified SdpSolution'''
    with open(path) as fileobj:
        try:
            data = json.load(fileobj)
        except ValueError as exc:
            raise ParseError(str(exc), getattr(exc, 'lineno', None))
    return load_solution(data, problem, tolerance)
