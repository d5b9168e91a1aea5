"""Time-dependent decoherence rates and the preset grammar used by the CLI.

A preset is either a bare number (constant rate) or ``name(p1, p2, ...)``:

=================  ===========================
``const(c)``       ``c``
``exp-decay(a)``   ``exp(-a t)``
``tanh(a)``        ``tanh(a t)``
``neg-tanh(a)``    ``-tanh(a t)``
=================  ===========================

Every preset except ``const`` takes an optional trailing amplitude, so
``neg-tanh(1, 2)`` is ``-2 tanh(t)``.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad


class PresetError(ValueError):
    pass


@dataclass(frozen=True)
class Preset:
    name: str
    params: tuple

    def __call__(self, t):
        return _PRESETS[self.name][0](t, *self.params)

    def integral(self, t0, t1):
        exact = _PRESETS[self.name][1]
        if exact is not None:
            return exact(t1, *self.params) - exact(t0, *self.params)
        return quad(self, t0, t1, epsabs=1e-14, epsrel=1e-13)[0]

    def __str__(self):
        return f"{self.name}({','.join(repr(p) for p in self.params)})"


def _exp_decay_prim(t, a, c=1.0):
    return -c * t if a == 0 else -c * math.exp(-a * t) / a


def _tanh_prim(t, a, c=1.0):
    # log cosh, written to stay finite for large |a t|
    x = abs(a * t)
    return c * t if a == 0 else c * (x + math.log1p(math.exp(-2 * x)) - math.log(2)) / a


_PRESETS = {
    "const": (lambda t, c=1.0: c, lambda t, c=1.0: c * t),
    "exp-decay": (lambda t, a, c=1.0: c * math.exp(-a * t), _exp_decay_prim),
    "tanh": (lambda t, a, c=1.0: c * math.tanh(a * t), _tanh_prim),
    "neg-tanh": (lambda t, a, c=1.0: -c * math.tanh(a * t),
                 lambda t, a, c=1.0: -_tanh_prim(t, a, c)),
}
_ARITY = {"const": (0, 1), "exp-decay": (1, 2), "tanh": (1, 2), "neg-tanh": (1, 2)}

_PRESET_RE = re.compile(r"^\s*([a-z][a-z-]*)\s*(?:\(([^()]*)\))?\s*$")


def parse_preset(text):
    text = str(text).strip()
    try:
        return Preset("const", (float(text),))
    except ValueError:
        pass
    m = _PRESET_RE.match(text)
    if not m:
        raise PresetError(f"cannot parse rate preset {text!r}")
    name, args = m.group(1), m.group(2)
    if name not in _PRESETS:
        raise PresetError(f"unknown rate preset {name!r}; "
                          f"expected one of {sorted(_PRESETS)}")
    try:
        params = tuple(float(a) for a in args.split(",")) if args and args.strip() else ()
    except ValueError:
        raise PresetError(f"non-numeric parameter in {text!r}") from None
    lo, hi = _ARITY[name]
    if not lo <= len(params) <= hi:
        raise PresetError(f"{name} takes {lo}..{hi} parameters, got {len(params)}")
    return Preset(name, params)


def split_preset_list(text):
    """Split a preset list on top-level commas (commas inside parens kept)."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise PresetError(f"unbalanced parentheses in {text!r}")
        if ch in ",;" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise PresetError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


@dataclass(frozen=True)
class RateSchedule:
    """Rates ``gamma_k(t)`` for an ordered label set.

    ``funcs[i]`` is any callable ``t -> float`` for ``labels[i]``; presets
    additionally know their exact integral.
    """

    labels: tuple
    funcs: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.labels) != len(self.funcs):
            raise ValueError("labels and rate functions are misaligned")

    def __call__(self, t):
        return np.array([float(f(t)) for f in self.funcs])

    def rate(self, label, t):
        return float(self.funcs[self.labels.index(label)](t))

    def integral(self, t0, t1):
        out = []
        for f in self.funcs:
            if isinstance(f, Preset):
                out.append(f.integral(t0, t1))
            else:
                out.append(quad(f, t0, t1, epsabs=1e-14, epsrel=1e-13)[0])
        return np.array(out)

    @classmethod
    def constant(cls, labels, values):
        values = np.broadcast_to(np.asarray(values, dtype=float), (len(labels),))
        return cls(tuple(labels), tuple(Preset("const", (float(v),)) for v in values))

    @classmethod
    def from_presets(cls, labels, presets):
        presets = [p if isinstance(p, Preset) else parse_preset(p) for p in presets]
        return cls(tuple(labels), tuple(presets))

    @classmethod
    def from_functions(cls, labels, funcs):
        return cls(tuple(labels), tuple(funcs))

    def with_rate(self, label, func):
        funcs = list(self.funcs)
        funcs[self.labels.index(label)] = func if callable(func) else parse_preset(func)
        return RateSchedule(self.labels, tuple(funcs))


def schedule_from_text(labels, text, skip=None):
    """Build a schedule from a CLI preset list.

    A single preset applies to every label except ``skip`` (the identity
    label, whose rate is ignored anyway).  Otherwise one preset per
    non-skipped label, in label order.
    """
    labels = tuple(labels)
    active = [l for l in labels if l != skip]
    presets = split_preset_list(text) if isinstance(text, str) else list(text)
    if len(presets) == 1:
        presets = presets * len(active)
    if len(presets) != len(active):
        raise PresetError(f"expected 1 or {len(active)} rate presets, got {len(presets)}")
    by_label = dict(zip(active, presets))
    return RateSchedule.from_presets(
        labels, [by_label.get(l, "0") for l in labels])
