"""Weight sequences alpha = (alpha_n) defining the spaces H_alpha.

A space H_alpha consists of power series ``f = sum a_n z^n`` with
``||f||^2 = sum |a_n|^2 alpha_n``.  Finitely many leading weights may vanish;
this is modelled by ``start_index``: the space is spanned by the monomials
``z^n`` with ``n >= start_index``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._errors import DomainError, ParameterError, UnknownFamilyError, WindowError

FAMILIES = (
    "one",
    "n",
    "n_plus_1",
    "n2_nminus1",
    "inv_n",
    "inv_n_plus_1",
    "gamma_log",
    "gamma_log_deriv",
)

DEFAULT_WINDOW = 10_000
DEFAULT_TOL = 1e-12
DEFAULT_LIMIT_TOL = 1e-2


@dataclass(frozen=True)
class WeightSequence:
    """The sequence n -> alpha_n.

    ``generator`` maps an integer ndarray to float weights; it is only ever
    called on indices ``>= start_index`` and the zero head is filled in here.
    """

    name: str
    params: tuple = ()
    start_index: int = 0
    generator: Callable[[np.ndarray], np.ndarray] = field(
        default=None, compare=False, repr=False
    )

    def values(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=float)
        mask = n >= self.start_index
        if np.any(mask):
            out[mask] = self.generator(n[mask].astype(float))
        return out

    def __call__(self, n):
        if np.ndim(n) == 0:
            return float(self.values(np.array([n]))[0])
        return self.values(n)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}({','.join(f'{p:g}' for p in self.params)})"


@dataclass(frozen=True)
class WeightClass:
    ratio_limit_ok: bool
    shape: str  # convex | concave | affine | neither
    root_limsup_ok: bool
    window: tuple[int, int]
    ratio_at_end: float = float("nan")
    root_at_end: float = float("nan")

    @property
    def admissible(self) -> bool:
        return self.ratio_limit_ok and self.shape in ("convex", "concave", "affine")


def gamma_fn(x: float) -> float:
    """Euler's Gamma for x > 0; exact factorial at positive integers."""
    if x <= 0:
        raise ParameterError(f"Gamma argument must be positive, got {x}")
    if float(x).is_integer() and x < 171:
        return float(math.factorial(int(x) - 1))
    return math.gamma(x)


def _check_gamma_beta(gamma: float, beta: float) -> None:
    if not gamma > -2:
        raise ParameterError(f"gamma must exceed -2, got {gamma}")
    if not beta > -1:
        raise ParameterError(f"beta must exceed -1, got {beta}")


def builtin_family(name: str, params: Sequence[float] = ()) -> WeightSequence:
    """Weight families from the example tables.

    ``gamma_log`` takes ``(gamma, beta)``; ``gamma_log_deriv`` takes
    ``(gamma, beta, k)``.  The others take no parameters.
    """
    params = tuple(float(p) for p in params)
    if name not in FAMILIES:
        raise UnknownFamilyError(f"unknown weight family {name!r}; choose from {FAMILIES}")
    simple = {
        "one": (0, lambda n: np.ones_like(n)),
        "n": (1, lambda n: n),
        "n_plus_1": (0, lambda n: n + 1.0),
        "n2_nminus1": (2, lambda n: n * n * (n - 1.0)),
        "inv_n": (1, lambda n: 1.0 / n),
        "inv_n_plus_1": (0, lambda n: 1.0 / (n + 1.0)),
    }
    if name in simple:
        if params:
            raise ParameterError(f"family {name!r} takes no parameters")
        start, gen = simple[name]
        return WeightSequence(name, (), start, gen)

    if name == "gamma_log":
        if len(params) != 2:
            raise ParameterError("gamma_log requires params (gamma, beta)")
        g, b = params
        _check_gamma_beta(g, b)
        c = gamma_fn(b + 1.0)
        return WeightSequence(name, params, 0, lambda n: c / (g + 2.0 * n + 2.0) ** (1.0 + b))

    if len(params) != 3:
        raise ParameterError("gamma_log_deriv requires params (gamma, beta, k)")
    g, b, k = params
    _check_gamma_beta(g, b)
    if k < 0 or not k.is_integer():
        raise ParameterError(f"k must be a nonnegative integer, got {k}")
    k = int(k)
    c = gamma_fn(b + 1.0)

    def gen(n):
        prod = np.ones_like(n)
        for i in range(2, k + 1):
            prod = prod * (n - k + i) ** 2
        return (n - k + 1.0) * c / (g + 2.0 * n + 2.0) ** (1.0 + b) * prod

    return WeightSequence(name, (g, b, float(k)), k, gen)


def custom_family(values_fn: Callable[[np.ndarray], np.ndarray], start_index: int = 0,
                  label: str = "custom") -> WeightSequence:
    """Wrap an arbitrary vectorised generator (positive from ``start_index``)."""
    return WeightSequence(label, (), int(start_index), values_fn)


def load_custom_family(path: str) -> WeightSequence:
    """Read weights from a text file, one nonnegative real per line.

    Leading zeros set the start index.  Past the end of the file the
    sequence continues geometrically with the last ratio.
    """
    with open(path) as fh:
        vals = [float(line) for line in fh if line.strip() and not line.lstrip().startswith("#")]
    if len(vals) < 2:
        raise ParameterError("custom weight file needs at least two values")
    start = 0
    while start < len(vals) and vals[start] == 0.0:
        start += 1
    tail = vals[start:]
    if len(tail) < 2 or any(v <= 0 for v in tail):
        raise ParameterError("custom weights must be positive after the leading zeros")
    table = np.array(vals)
    last = len(vals) - 1
    q = vals[-1] / vals[-2]

    def gen(n):
        n = n.astype(np.int64)
        out = np.empty(n.shape, dtype=float)
        inside = n <= last
        out[inside] = table[n[inside]]
        with np.errstate(over="ignore"):
            out[~inside] = vals[-1] * q ** (n[~inside] - last).astype(float)
        return out

    return WeightSequence(f"custom:{path}", (), start, gen)


def resolve_family(name: str, params: Sequence[float] = ()) -> WeightSequence:
    if name.startswith("custom:"):
        return load_custom_family(name[len("custom:"):])
    return builtin_family(name, params)


def weight_at(w: WeightSequence, n: int) -> float:
    return w(int(n))


def ratio(w: WeightSequence, n: int) -> float:
    """alpha_{n+1} / alpha_n."""
    if n < w.start_index:
        raise DomainError(f"ratio undefined for n={n} < start_index={w.start_index}")
    a = w.values(np.array([n, n + 1]))
    return float(a[1] / a[0])


def ratios(w: WeightSequence, n) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    return w.values(n + 1) / w.values(n)


def classify(w: WeightSequence, n_test: int = DEFAULT_WINDOW, tol: float = DEFAULT_TOL,
             limit_tol: float = DEFAULT_LIMIT_TOL) -> WeightClass:
    """Numerically classify a weight sequence on ``[start_index, n_test]``.

    Second differences are compared against ``tol`` relative to the local
    weight scale.  The two limit hypotheses (ratio -> 1, n-th root -> 1) are
    judged at the window end against ``limit_tol``; ratio evidence also
    requires the deviation from 1 not to grow over the second half of the
    window.
    """
    s = w.start_index
    if n_test < s + 3:
        raise WindowError(f"window end {n_test} must be >= start_index + 3 = {s + 3}")
    n = np.arange(s, n_test + 1)
    a = w.values(n)
    finite = np.isfinite(a)
    if not finite.all():
        # weights overflowed: judge only the finite head, hypotheses fail
        a = a[: int(np.argmin(finite))]
        if a.size < 3:
            raise WindowError("weights overflow before three values are available")
    overflowed = a.size < n.size
    n_end = s + a.size - 1
    d2 = a[2:] - 2.0 * a[1:-1] + a[:-2]
    scale = np.maximum(np.maximum(np.abs(a[2:]), np.abs(a[1:-1])), np.abs(a[:-2]))
    thresh = tol * scale
    if np.all(np.abs(d2) <= thresh):
        shape = "affine"
    elif np.all(d2 >= -thresh):
        shape = "convex"
    elif np.all(d2 <= thresh):
        shape = "concave"
    else:
        shape = "neither"

    end_dev = abs(a[-1] / a[-2] - 1.0)
    mid = (s + n_end) // 2
    mid_dev = abs(w(mid + 1) / w(mid) - 1.0)
    ratio_ok = bool(end_dev < limit_tol and end_dev <= mid_dev * (1 + 1e-12) + tol)
    ratio_ok = ratio_ok and not overflowed

    root = math.exp(math.log(a[-1]) / max(n_end, 1))
    root_ok = bool(abs(root - 1.0) < limit_tol) and not overflowed
    return WeightClass(ratio_ok, shape, root_ok, (s, n_test), float(a[-1] / a[-2]), root)
