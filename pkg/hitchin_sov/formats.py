import csv
import json

from hitchin_sov.errors import ConfigError


def complex_pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]

def complex_pairs(values):
    return [complex_pair(z) for z in values]

def parse_complex(value, what='value'):
    """Accepts [re, im] pairs and plain real numbers."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError('%s: expected a [re, im] pair, got %r' % (what, value))
        re_, im_ = value
    else:
        re_, im_ = value, 0.0
    try:
        return complex(float(re_), float(im_))
    except (TypeError, ValueError):
        raise ConfigError('%s: not a number: %r' % (what, value))

def parse_complex_list(values, what='values'):
    if not isinstance(values, (list, tuple)):
        raise ConfigError('%s: expected a list' % what)
    return [parse_complex(v, '%s[%d]' % (what, i)) for i, v in enumerate(values)]

def parse_basepoint(text):
    """'re,im' as given on the command line."""
    try:
        parts = [float(p) for p in text.split(',')]
    except ValueError:
        raise ConfigError('basepoint must be "re,im", got %r' % text)
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise ConfigError('basepoint must be "re,im", got %r' % text)
    return complex(parts[0], parts[1])


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + '\n'

def loads(text, source='<config>'):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError('%s: malformed JSON at line %d column %d: %s'
                          % (source, e.lineno, e.colno, e.msg))


def trace_header(width):
    header = ['path', 't', 'x_re', 'x_im', 'y_re', 'y_im', 'lambda_re', 'lambda_im']
    for j in range(1, width + 1):
        header += ['integrand_%d_re' % j, 'integrand_%d_im' % j]
    return header

def write_trace_csv(rows, width, fileobj):
    """rows hold (path index, t, x, y, lambda, integrand values)."""
    writer = csv.writer(fileobj, lineterminator='\n')
    writer.writerow(trace_header(width))
    for index, t, x, y, lam, values in rows:
        line = [str(index), '%.17g' % t]
        for z in [x, y, lam] + list(values):
            z = complex(z)
            line += ['%.17g' % z.real, '%.17g' % z.imag]
        writer.writerow(line)
