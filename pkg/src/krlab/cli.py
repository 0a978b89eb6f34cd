"""
Command line interface.

Subcommands: ``density``, ``ratio-scan``, ``decay``, ``closedform``, ``mc``
and ``selftest``. Tables go to ``--output`` (stdout by default) as CSV or
JSON. Exit codes: 0 ok, 1 self-test failure, 2 domain error.
"""

import argparse
import csv
import json
import math
import os
import re
import sys

import numpy

from . import closedform
from .ensemble import EnsembleSpec, Field, Mode
from .errors import DegenerateCovariance, KrlabError
from .kacrice import decay_rate_fit, density, density_ratio
from .montecarlo import build_histogram, compare_histogram

_FLOAT = r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'
_COMPLEX = re.compile(r'^([+\-−]?%s)([+\-−])(%s)i$'
                      % (_FLOAT, _FLOAT))

DENSITY_HEADER = ['re', 'im', 'N', 'mode', 'ensemble', 'density']
RATIO_HEADER = ['y', 'N', 'ratio']
DECAY_HEADER = ['N', 'diff', 'log_abs_diff']
MC_HEADER = ['re_lo', 're_hi', 'im_lo', 'im_hi', 'count', 'expected',
             'z_score']


class UsageError(KrlabError, ValueError):
    pass


# Let values such as "-1:1:5,-2:2:5" or "-0.5+1i" follow an option without
# the "--opt=value" spelling; argparse otherwise reads them as flags.
_NEGATIVE_VALUE = re.compile(r'^-[\d.]')


def parse_complex(text):
    """Parse ``a+bi`` / ``a-bi`` (no whitespace)."""
    match = _COMPLEX.match(text)
    if not match:
        raise UsageError('bad complex literal %r (expected a+bi)' % text)
    re_part, sep, im_part = match.groups()
    re_val = float(re_part.replace('−', '-'))
    im_val = float(im_part)
    return complex(re_val, -im_val if sep in '-−' else im_val)


def parse_point(text, m):
    parts = text.split(';')
    if len(parts) != m:
        raise UsageError('expected %d semicolon-separated coordinates, '
                         'got %r' % (m, text))
    return numpy.array([parse_complex(p) for p in parts])


def parse_range(text):
    """``lo:hi:steps`` -> (lo, hi, steps)."""
    try:
        lo, hi, steps = text.split(':')
        return float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError('bad range %r (expected lo:hi:steps)' % text)


def parse_grid(text):
    """``re0:re1:steps,im0:im1:steps``."""
    try:
        re_spec, im_spec = text.split(',')
    except ValueError:
        raise UsageError('bad grid %r' % text)
    return parse_range(re_spec), parse_range(im_spec)


def parse_n_list(text):
    """``10,25,100`` or an inclusive range ``10:60``."""
    if ':' in text:
        parts = [int(p) for p in text.split(':')]
        step = parts[2] if len(parts) == 3 else 1
        return tuple(range(parts[0], parts[1] + 1, step))
    return tuple(int(p) for p in text.split(','))


def fmt(x):
    return '%.17g' % x


def _emit(rows, header, args, stream):
    if args.format == 'json':
        json.dump([dict(zip(header, r)) for r in rows], stream, indent=1)
        stream.write('\n')
        return
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, float) else v
                         for v in row])


def _open_output(args):
    if args.output in (None, '-'):
        return sys.stdout, False
    return open(args.output, 'w', newline=''), True


def _seed(args):
    if args.seed is not None:
        return args.seed
    return int(os.environ.get('KRLAB_SEED', '0'))


def _point_columns(m):
    if m == 1:
        return ['re', 'im']
    cols = ['re', 'im']
    for q in range(2, m + 1):
        cols += ['re%d' % q, 'im%d' % q]
    return cols


def _density_points(args):
    points = []
    if args.z:
        for text in args.z:
            points.append(parse_point(text, args.m))
    if args.grid:
        if args.m != 1:
            raise UsageError('--grid is supported for m = 1 only')
        (r0, r1, rn), (i0, i1, inum) = parse_grid(args.grid)
        for x in numpy.linspace(r0, r1, rn):
            for y in numpy.linspace(i0, i1, inum):
                points.append(numpy.array([complex(x, y)]))
    if not points:
        raise UsageError('give --z and/or --grid')
    return points


def cmd_density(args, stream):
    header = _point_columns(args.m) + DENSITY_HEADER[2:]
    rows = []
    for z in _density_points(args):
        for N in parse_n_list(args.N):
            spec = EnsembleSpec(args.m, N, args.ensemble, args.mode)
            try:
                value = density(spec, z).density
            except DegenerateCovariance:
                raise DegenerateCovariance(
                    'degenerate covariance (real locus) at z = %s'
                    % ';'.join(str(c) for c in z), point=z)
            coords = []
            for c in z:
                coords += [float(c.real), float(c.imag)]
            rows.append(coords + [N, spec.mode.value, spec.field.value,
                                  float(value)])
    _emit(rows, header, args, stream)
    return rows


def cmd_ratio_scan(args, stream):
    y0, y1, steps = parse_range(args.y)
    if not (0 < y0 <= y1):
        raise UsageError('y range must lie in (0, inf)')
    rows = []
    for N in parse_n_list(args.N):
        for y in numpy.linspace(y0, y1, steps):
            z = numpy.zeros(args.m, dtype=complex)
            z[0] = 1j * y
            rows.append([float(y), N, float(density_ratio(args.m, N,
                                                           args.mode, z))])
    rows.sort(key=lambda r: (r[1], r[0]))
    _emit(rows, RATIO_HEADER, args, stream)
    return rows


def cmd_decay(args, stream):
    z = parse_point(args.z, args.m)
    fit = decay_rate_fit(args.m, args.mode, z, parse_n_list(args.N))
    rows = []
    for N, d in zip(fit.N, fit.diff):
        rows.append([int(N), float(d),
                     float(math.log(d)) if d > 0 else float('-inf')])
    report = {
        'm': args.m, 'mode': Mode(args.mode).value,
        'z': [[c.real, c.imag] for c in z],
        'fitted_rate': fit.fitted_rate,
        'lambda_z': fit.theoretical_rate,
        'relative_gap': fit.relative_gap,
        'n_points': fit.n_points,
        'residual': fit.residual,
    }
    if args.format == 'json':
        report['rows'] = [dict(zip(DECAY_HEADER, r)) for r in rows]
        json.dump(report, stream, indent=1)
        stream.write('\n')
    else:
        _emit(rows, DECAY_HEADER, args, stream)
        print(json.dumps(report), file=sys.stderr)
    return report


_CLOSED_FORMS = {
    'su2-crit': lambda N, m, z: closedform.su2_crit_density(N, z[0]),
    'so2-crit': lambda N, m, z: closedform.so2_crit_density(N, z[0]),
    'so2-error': lambda N, m, z: closedform.so2_crit_error(N, z[0]),
    'su-zeros': lambda N, m, z: closedform.su_zero_density(m, N, z),
    'scaled-cx': lambda N, m, z: closedform.scaled_crit_cx(z[0]),
    'scaled-real': lambda N, m, z: closedform.scaled_crit_density(
        'real', z[0]).value,
    'near-real-slope': lambda N, m, z: closedform.near_real_slope(
        z[0].real),
}


def cmd_closedform(args, stream):
    header = _point_columns(args.m) + ['N', 'kind', 'value']
    rows = []
    for z in _density_points(args):
        for N in parse_n_list(args.N):
            value = float(_CLOSED_FORMS[args.kind](N, args.m, z))
            coords = []
            for c in z:
                coords += [float(c.real), float(c.imag)]
            rows.append(coords + [N, args.kind, value])
    _emit(rows, header, args, stream)
    return rows


def cmd_mc(args, stream):
    (r0, r1, rn), (i0, i1, inum) = parse_grid(args.window)
    spec = EnsembleSpec(1, int(args.N), args.ensemble, args.mode)
    band = args.real_band
    if band is None and spec.field is Field.REAL:
        band = 0.1
    hist = build_histogram(spec, args.samples, _seed(args),
                           numpy.linspace(r0, r1, rn + 1),
                           numpy.linspace(i0, i1, inum + 1),
                           real_band=band, workers=args.workers)
    z, summary = compare_histogram(hist)
    summary.update({'N': spec.N, 'ensemble': spec.field.value,
                    'mode': spec.mode.value, 'seed': _seed(args),
                    'real_band': band})
    rows = []
    for i in range(len(hist.re_edges) - 1):
        for j in range(len(hist.im_edges) - 1):
            cell = [float(hist.re_edges[i]), float(hist.re_edges[i + 1]),
                    float(hist.im_edges[j]), float(hist.im_edges[j + 1]),
                    int(hist.counts[i, j])]
            if hist.excluded[i, j]:
                cell += ['excluded', 'excluded']
            else:
                cell += [float(hist.expected_counts[i, j]), float(z[i, j])]
            rows.append(cell)
    if args.format == 'json':
        json.dump({'summary': summary,
                   'cells': [dict(zip(MC_HEADER, r)) for r in rows]},
                  stream, indent=1)
        stream.write('\n')
    else:
        _emit(rows, MC_HEADER, args, stream)
        target = sys.stdout if stream is not sys.stdout else sys.stderr
        print(json.dumps(summary), file=target)
    return summary


def cmd_selftest(args, stream):
    from . import selftest
    ok = selftest.run(seed=_seed(args),
                      out=lambda line: print(line, file=stream))
    return ok


def build_parser():
    parser = argparse.ArgumentParser(
        prog='krlab',
        description='Densities of complex zeros and critical points of '
                    'Kostlan random polynomials.')
    sub = parser.add_subparsers(dest='command', required=True)
    parser._negative_number_matcher = _NEGATIVE_VALUE

    def common(p, n_default='10'):
        p._negative_number_matcher = _NEGATIVE_VALUE
        p.add_argument('--m', type=int, default=1)
        p.add_argument('--N', default=n_default,
                       help='degree, list "10,25" or range "10:60"')
        p.add_argument('--mode', choices=['crit', 'zeros'], default='crit')
        p.add_argument('--seed', type=int, default=None)
        p.add_argument('--output', default=None)
        p.add_argument('--format', choices=['csv', 'json'], default='csv')

    p = sub.add_parser('density', help='Kac-Rice density at points')
    common(p)
    p.add_argument('--ensemble', choices=['real', 'complex'],
                   default='complex')
    p.add_argument('--z', action='append',
                   help='point "a+bi" (m=1) or "a+bi;c+di" (m>1)')
    p.add_argument('--grid', help='re0:re1:steps,im0:im1:steps')

    p = sub.add_parser('ratio-scan', help='real/complex ratio along iy')
    common(p, n_default='10,25,100')
    p.add_argument('--y', default='0.01:1:100', help='y0:y1:steps')

    p = sub.add_parser('decay', help='fit the exponential convergence rate')
    common(p, n_default='10:60')
    p.add_argument('--z', required=True)

    p = sub.add_parser('closedform', help='evaluate explicit formulas')
    common(p)
    p.add_argument('--kind', choices=sorted(_CLOSED_FORMS), required=True)
    p.add_argument('--z', action='append')
    p.add_argument('--grid')

    p = sub.add_parser('mc', help='Monte Carlo histogram vs density')
    common(p, n_default='25')
    p.add_argument('--ensemble', choices=['real', 'complex'],
                   default='complex')
    p.add_argument('--samples', type=int, default=10000)
    p.add_argument('--window', default='-2:2:10,-2:2:10',
                   help='re0:re1:bins,im0:im1:bins')
    p.add_argument('--real-band', type=float, default=None,
                   help='exclude cells meeting |Im z| <= band '
                        '(default 0.1 for the real ensemble)')
    p.add_argument('--workers', type=int, default=1)

    p = sub.add_parser('selftest', help='run invariant suites')
    p._negative_number_matcher = _NEGATIVE_VALUE
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--output', default=None)
    return parser


COMMANDS = {
    'density': cmd_density,
    'ratio-scan': cmd_ratio_scan,
    'decay': cmd_decay,
    'closedform': cmd_closedform,
    'mc': cmd_mc,
    'selftest': cmd_selftest,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    stream, close = _open_output(args)
    try:
        result = COMMANDS[args.command](args, stream)
    except (KrlabError, ValueError) as exc:
        print('krlab: error: %s' % exc, file=sys.stderr)
        return 2
    finally:
        if close:
            stream.close()
    if args.command == 'selftest':
        return 0 if result else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
