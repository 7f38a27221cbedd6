"""Python bindings for the livemodel engine.

Instances may be passed as instance text, JSON text, or a dict in the JSON wire shape.
Results come back as plain dicts and lists. Engine errors raise LivemodelError with
args (code, message).
"""

import json as _json

from . import _livemodel
from ._livemodel import LivemodelError, Workbench

__all__ = [
    "LivemodelError",
    "Workbench",
    "categorize",
    "check",
    "closest",
    "compile",
    "enumerate",
    "suggest",
]


def _instance(inst):
    return inst if isinstance(inst, str) else _json.dumps(inst)


def compile(text):
    return _livemodel.compile(text)


def check(model, instance, pred=None):
    return _livemodel.check(model, _instance(instance), pred)


def enumerate(model, pred=None, scope=None, limit=10):
    return _livemodel.enumerate(model, pred, scope, limit)


def categorize(old_model, new_model, pred=None, scope=None, limit=10):
    return _livemodel.categorize(old_model, new_model, pred, scope, limit)


def closest(model, instance, expected="valid", pred=None, scope=None):
    return _livemodel.closest(model, _instance(instance), expected, pred, scope)


def suggest(model, prefix, instance=None):
    return _livemodel.suggest(model, prefix, None if instance is None else _instance(instance))
