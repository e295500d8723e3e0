"""
Placement files.

JSON (canonical)::

    {"version": "1", "n": 5, "d": 2, "queens": [[0, 0], [1, 2], [2, 4], [3, 1], [4, 3]]}

Plain text, one queen per line, x_1 first::

    # torus-queens placement v1
    n 5
    d 2
    0 0
    1 2

Writing is deterministic, so write -> read -> write reproduces the file byte for byte.
"""
import json
import os

from .core import PreconditionError
from .log import atomic_write
from .lines import Placement

FORMAT_VERSION = '1'
TEXT_HEADER = '# torus-queens placement v{}'.format(FORMAT_VERSION)


class PlacementFormatError(PreconditionError):
    """A placement file could not be parsed."""


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def dumps(pl, fmt='json'):
    if fmt == 'json':
        doc = {
            'version': FORMAT_VERSION,
            'n': pl.n,
            'd': pl.d,
            'queens': [list(q) for q in pl.queens],
        }
        return json.dumps(doc) + '\n'
    if fmt == 'text':
        lines = [TEXT_HEADER, 'n {}'.format(pl.n), 'd {}'.format(pl.d)]
        lines += [' '.join(str(c) for c in q) for q in pl.queens]
        return '\n'.join(lines) + '\n'
    raise PreconditionError('unknown placement format {}'.format(fmt))


def _loads_json(text):
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise PlacementFormatError('placement file is not valid JSON: {}'.format(e))
    if not isinstance(doc, dict):
        raise PlacementFormatError('placement document must be a JSON object')

    missing = [k for k in ('version', 'n', 'd', 'queens') if k not in doc]
    if missing:
        raise PlacementFormatError('placement document is missing {}'.format(', '.join(missing)))
    if doc['version'] != FORMAT_VERSION:
        raise PlacementFormatError('unsupported placement version {!r}'.format(doc['version']))
    if not (_is_int(doc['n']) and _is_int(doc['d'])):
        raise PlacementFormatError('n and d must be integers')
    queens = doc['queens']
    if not isinstance(queens, list) or not all(isinstance(q, list) and all(_is_int(c) for c in q) for q in queens):
        raise PlacementFormatError('queens must be a list of integer coordinate lists')
    return doc['n'], doc['d'], queens


def _loads_text(text):
    rows = [line.strip() for line in text.splitlines()]
    rows = [r for r in rows if r and not r.startswith('#')]
    try:
        key_n, n = rows[0].split()
        key_d, d = rows[1].split()
        if (key_n, key_d) != ('n', 'd'):
            raise ValueError('header must name n and d')
        queens = [[int(c) for c in r.split()] for r in rows[2:]]
        return int(n), int(d), queens
    except (IndexError, ValueError) as e:
        raise PlacementFormatError('malformed text placement: {}'.format(e))


def loads(text, fmt=None):
    """
    :param text:
    :param fmt: 'json', 'text' or None to detect from the first character
    :return: Placement
    """
    if fmt is None:
        fmt = 'json' if text.lstrip().startswith('{') else 'text'
    if fmt == 'json':
        n, d, queens = _loads_json(text)
    elif fmt == 'text':
        n, d, queens = _loads_text(text)
    else:
        raise PreconditionError('unknown placement format {}'.format(fmt))

    try:
        return Placement(n, d, tuple(tuple(q) for q in queens))
    except PreconditionError as e:
        raise PlacementFormatError(str(e))


def format_for_path(path):
    return 'text' if str(path).endswith('.txt') else 'json'


def read_placement(path, fmt=None):
    try:
        with open(path, 'r') as file:
            text = file.read()
    except OSError as e:
        raise PlacementFormatError('cannot read {}: {}'.format(path, e))
    return loads(text, fmt)


def write_placement(pl, path, fmt=None):
    fmt = fmt or format_for_path(path)
    dirname = os.path.dirname(str(path))
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with atomic_write(path) as tmp_path:
        with open(tmp_path, 'w') as file:
            file.write(dumps(pl, fmt))
