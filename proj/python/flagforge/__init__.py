"""Python front end to the flagforge C++ core.

Matrices are lists of rows of ``int``, ``str`` or ``fractions.Fraction`` entries;
results come back with ``Fraction`` entries.
"""

import json
from fractions import Fraction

from . import _flagforge
from ._flagforge import DomainError

__all__ = [
    "DomainError",
    "derived",
    "emit",
    "jordan_chevalley",
    "levi_component",
    "lie_closure",
    "linear_nilradical",
    "minimal_polynomial",
    "run_session",
    "solvable_radical",
    "splittable_closure",
]


def _out(rows):
    return [[Fraction(x) for x in r] for r in rows]


def _in(rows):
    return [[str(Fraction(x)) for x in r] for r in rows]


def run_session(session, seed=1, parallel=False):
    """Run a session (dict or JSON text). Returns ``(exit_code, report)``."""
    text = session if isinstance(session, str) else json.dumps(session)
    code, report = _flagforge.run_session(text, seed, parallel)
    return code, json.loads(report)


def emit(session):
    text = session if isinstance(session, str) else json.dumps(session)
    return json.loads(_flagforge.emit(text))


def jordan_chevalley(matrix):
    ss, nil = _flagforge.jordan_chevalley(_in(matrix))
    return _out(ss), _out(nil)


def minimal_polynomial(matrix):
    return [Fraction(c) for c in _flagforge.minimal_polynomial(_in(matrix))]


def _algebra_op(name):
    op = getattr(_flagforge, name)

    def run(n, generators):
        return [_out(b) for b in op(n, [_in(g) for g in generators])]

    run.__name__ = name
    run.__doc__ = op.__doc__
    return run


lie_closure = _algebra_op("lie_closure")
solvable_radical = _algebra_op("solvable_radical")
linear_nilradical = _algebra_op("linear_nilradical")
levi_component = _algebra_op("levi_component")
derived = _algebra_op("derived")
splittable_closure = _algebra_op("splittable_closure")
