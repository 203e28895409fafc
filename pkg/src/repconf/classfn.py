"""Finitely supported exact-rational functions on iso-class keys.

Keys are opaque hashables (the quiver layer uses its IsoClassKey).  Values
are Fractions; zeros are pruned on construction so equality of supports is
equality of functions.  An optional grading records a dimension vector per
key; binary operations insist the gradings agree where they overlap.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError

__all__ = ["IsoClassFunction"]


class IsoClassFunction:
    __slots__ = ("support", "grading")

    def __init__(self, support=(), grading=None):
        items = support.items() if hasattr(support, "items") else support
        clean = {}
        for k, v in items:
            v = Fraction(v)
            if v:
                clean[k] = v
        self.support = clean
        grade = {}
        if grading:
            for k, d in (grading.items() if hasattr(grading, "items")
                         else grading):
                grade[k] = tuple(d)
        self.grading = grade

    def __call__(self, key):
        return self.support.get(key, Fraction(0))

    def __iter__(self):
        return iter(sorted(self.support, key=repr))

    def items(self):
        return [(k, self.support[k]) for k in self]

    def is_zero(self):
        return not self.support

    def __eq__(self, other):
        if not isinstance(other, IsoClassFunction):
            return NotImplemented
        return self.support == other.support

    def __hash__(self):
        return hash(frozenset(self.support.items()))

    def __repr__(self):
        body = ", ".join("%r: %s" % (k, v) for k, v in self.items())
        return "IsoClassFunction({%s})" % body

    def _merged_grading(self, other):
        grade = dict(self.grading)
        for k, d in other.grading.items():
            if k in grade and grade[k] != d:
                raise InputError("conflicting gradings for key %r" % (k,))
            grade[k] = d
        return grade

    def __add__(self, other):
        out = dict(self.support)
        for k, v in other.support.items():
            out[k] = out.get(k, Fraction(0)) + v
        return IsoClassFunction(out, self._merged_grading(other))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return IsoClassFunction({k: c * v for k, v in self.support.items()},
                                self.grading)

    def restrict(self, keys):
        keys = set(keys)
        return IsoClassFunction(
            {k: v for k, v in self.support.items() if k in keys},
            {k: d for k, d in self.grading.items() if k in keys})
