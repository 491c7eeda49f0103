"""Exact convex-operational state spaces, composites, and protocols.

Thin wrappers over the native module: every operation returns the same
self-contained JSON report the command-line tool emits, parsed into a dict.
Space arguments are builtin names ("square", "classical3", "polygon5"),
file paths, or artifact dicts.
"""

import json as _json

from ._core import __version__  # noqa: F401
from . import _core

__all__ = [
    "space",
    "tensor",
    "distinguish",
    "broadcast",
    "nondisturb",
    "bitcommit",
    "teleport",
    "verify",
]


def _arg(space):
    if isinstance(space, dict):
        return _json.dumps(space)
    return str(space)


def _verts(vertices):
    return ["v%d" % int(v) for v in vertices]


def space(kind, param, *, scalar="auto", eps=1e-9):
    """Build a state space: kind "classical" or "polygon" with an integer
    parameter, or "custom-json" with a path or artifact dict."""
    return _json.loads(_core.space(kind, _arg(param), scalar, eps))


def tensor(a, b, kind="max", *, scalar="auto", eps=1e-9):
    """Form the minimal ("min") or maximal ("max") tensor product of two spaces."""
    return _json.loads(_core.tensor(_arg(a), _arg(b), kind, scalar, eps))


def distinguish(space, vertices, *, scalar="auto", eps=1e-9):
    """Decide joint single-shot distinguishability of the listed vertices,
    with an observable on success or an infeasibility certificate on failure."""
    return _json.loads(_core.distinguish(_arg(space), _verts(vertices), scalar, eps))


def broadcast(space, vertices, *, budget=0, scalar="auto", eps=1e-9):
    """Decide broadcastability of the listed vertices; budget 0 keeps the
    default simplex-search depth."""
    return _json.loads(_core.broadcast(_arg(space), _verts(vertices), budget, scalar, eps))


def nondisturb(space, map=None, *, scalar="auto", eps=1e-9):
    """Report the irreducible summands and nondisturbing basis of a space.
    With a map artifact ({"kind": "map", "matrix": ...}), classify it two
    independent ways and check the classifiers agree."""
    return _json.loads(
        _core.nondisturb(_arg(space), "" if map is None else _arg(map), scalar, eps)
    )


def bitcommit(space, n=None, *, runs=0, hiding_upto=4, seed=0, scalar="auto", eps=1e-9):
    """Build a commitment scheme from a double decomposition and return
    (report, csv). n is a round count or a (lo, hi) range for the binding
    series; runs > 0 adds seeded honest-protocol sampling."""
    if n is None:
        spec = ""
    elif isinstance(n, (tuple, list)):
        spec = "%d..%d" % (int(n[0]), int(n[1]))
    else:
        spec = str(int(n))
    report, csv = _core.bitcommit(_arg(space), spec, runs, hiding_upto, seed, scalar, eps)
    return _json.loads(report), csv


def teleport(space, *, group=None, conclusive=False, necessity=False, budget=0,
             scalar="auto", eps=1e-9):
    """Exactly one mode: group= builds a deterministic scheme from a named
    symmetry group (Z<n> or S<n>), conclusive=True builds the single-outcome
    scheme from weak self-duality, necessity=True searches for any conclusive
    protocol and reports consistency with weak self-duality."""
    modes = int(group is not None) + int(bool(conclusive)) + int(bool(necessity))
    if modes != 1:
        raise ValueError("teleport needs exactly one of group=, conclusive=True, necessity=True")
    if group is not None:
        return _json.loads(
            _core.teleport_deterministic(_arg(space), group, budget, scalar, eps)
        )
    if conclusive:
        return _json.loads(_core.teleport_conclusive(_arg(space), scalar, eps))
    return _json.loads(_core.teleport_necessity(_arg(space), budget, scalar, eps))


def verify(artifact, *, eps=1e-9):
    """Independently re-check every certificate in an artifact (dict or JSON
    text). Returns (ok, log); on failure the log names the first failing check."""
    text = artifact if isinstance(artifact, str) else _json.dumps(artifact)
    rc, log = _core.verify(text, eps)
    return rc == 0, log
