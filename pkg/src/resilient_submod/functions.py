"""Concrete monotone submodular objectives and the instance file format."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import kernels
from .core import SetFunction, Subset
from .errors import InstanceParseError, InvalidInputError, NotPositiveDefiniteError

SYM_TOL = 1e-9
PSD_JITTER = 1e-9
TABULAR_MAX_M = 20


def _check_symmetric(matrix, name="matrix"):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {matrix.shape}")
    asym = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asym > SYM_TOL:
        raise InvalidInputError(f"{name} is not symmetric (max |M - M^T| = {asym:.3g})")
    return matrix


def cholesky_logdet(matrix) -> float:
    """log det of a symmetric positive definite matrix, via its Cholesky factor."""
    matrix = _check_symmetric(matrix)
    value = kernels.chol_logdet(matrix)
    if np.isnan(value):
        raise NotPositiveDefiniteError("matrix is not positive definite (non-positive pivot)")
    return float(value)


class ModularFunction(SetFunction):
    """``f(A) = sum of weights[v] for v in A``."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise InvalidInputError("weights must be non-empty")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be finite and non-negative")
        super().__init__(w.size)
        self.weights = w

    def _value(self, members):
        total = 0.0
        for x in members:
            total += self.weights[x]
        return total


def check_table(values, m, tol=1e-9):
    """Return a list of human-readable violations of normalisation,
    monotonicity and submodularity for a full ``2**m`` value table."""
    values = np.asarray(values, dtype=np.float64)
    problems = []
    if values[0] != 0.0:
        problems.append(f"f({{}}) = {values[0]!r}, expected 0")
    masks = np.arange(1 << m)
    for x in range(m):
        bx = 1 << x
        base = masks[(masks & bx) == 0]
        gain_x = values[base | bx] - values[base]
        bad = np.flatnonzero(gain_x < -tol)
        if bad.size:
            problems.append(f"not monotone: adding {x} to mask {int(base[bad[0]])} decreases f")
        for y in range(x + 1, m):
            by = 1 << y
            b = masks[(masks & (bx | by)) == 0]
            lhs = values[b | bx] + values[b | by]
            rhs = values[b | bx | by] + values[b]
            bad = np.flatnonzero(lhs < rhs - tol)
            if bad.size:
                problems.append(
                    f"not submodular: elements {x},{y} over mask {int(b[bad[0]])}")
    return problems


class TabularFunction(SetFunction):
    """Explicit value table over all ``2**m`` subsets, indexed by bit mask."""

    def __init__(self, m, values, validate=True):
        m = int(m)
        if not 1 <= m <= TABULAR_MAX_M:
            raise InvalidInputError(f"tabular functions need 1 <= m <= {TABULAR_MAX_M}, got {m}")
        values = np.asarray(values, dtype=np.float64).ravel()
        if values.size != 1 << m:
            raise InvalidInputError(f"table needs {1 << m} entries, got {values.size}")
        if values[0] != 0.0:
            raise InvalidInputError("table[{}] must be 0")
        if validate:
            problems = check_table(values, m)
            if problems:
                raise InvalidInputError("; ".join(problems[:3]))
        super().__init__(m)
        self.values = values

    @classmethod
    def from_function(cls, fn, m, validate=True):
        """Tabulate ``fn(tuple_of_members)`` over every subset."""
        vals = np.empty(1 << m)
        for mask in range(1 << m):
            vals[mask] = fn(tuple(i for i in range(m) if mask >> i & 1))
        return cls(m, vals, validate=validate)

    def _value(self, members):
        mask = 0
        for x in members:
            mask |= 1 << x
        return self.values[mask]


class WeightedCoverageFunction(SetFunction):
    """Weight of the union of the universe items covered by the chosen elements."""

    def __init__(self, universe_weights, covers):
        uw = np.asarray(universe_weights, dtype=np.float64).ravel()
        if np.any(uw < 0) or not np.all(np.isfinite(uw)):
            raise InvalidInputError("universe weights must be finite and non-negative")
        if len(covers) == 0:
            raise InvalidInputError("covers must list at least one element")
        incidence = np.zeros((len(covers), uw.size), dtype=bool)
        for v, items in enumerate(covers):
            for u in items:
                if not 0 <= int(u) < uw.size:
                    raise InvalidInputError(f"element {v} covers unknown universe item {u}")
                incidence[v, int(u)] = True
        super().__init__(len(covers))
        self.universe_weights = uw
        self.covers = [sorted({int(u) for u in items}) for items in covers]
        self.incidence = incidence

    def _value(self, members):
        if not members:
            return 0.0
        covered = self.incidence[list(members)].any(axis=0)
        return float(self.universe_weights[covered].sum())


class LogDetFunction(SetFunction):
    """``f(A) = log det(I + sum of D_i for i in A)`` for symmetric PSD ``D_i``."""

    def __init__(self, matrices, validate=True):
        mats = np.ascontiguousarray(matrices, dtype=np.float64)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] < 1:
            raise InvalidInputError(f"matrices must have shape (m, d, d), got {mats.shape}")
        if validate:
            eye = np.eye(mats.shape[1])
            for i, mat in enumerate(mats):
                _check_symmetric(mat, f"D_{i}")
                try:
                    np.linalg.cholesky(mat + PSD_JITTER * eye)
                except np.linalg.LinAlgError:
                    raise InvalidInputError(f"D_{i} is not positive semi-definite") from None
        super().__init__(mats.shape[0])
        self.matrices = mats

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    def _values(self, rows):
        k = max(len(r) for r in rows)
        idx = np.full((len(rows), k), -1, dtype=np.int64)
        for i, r in enumerate(rows):
            idx[i, :len(r)] = r
        out = kernels.logdet_sums(self.matrices, idx)
        if np.isnan(out).any():
            raise NotPositiveDefiniteError("I + sum of D_i lost positive definiteness")
        return out

    def _value(self, members):
        return float(self._values([members])[0])


def make_example1_function(base: float = 1.0) -> TabularFunction:
    """Three-element instance where the plain greedy choice is not resilient.

    Elements 0, 1, 2 stand for v1, v2, v3 and ``base`` is f(v3).
    """
    base = float(base)
    if not base > 0:
        raise InvalidInputError(f"base must be > 0, got {base}")
    table = {
        (): 0.0,
        (0,): base + 1,
        (1,): base + 0.5,
        (2,): base,
        (0, 1): base + 1,
        (0, 2): 2 * base + 1,
        (1, 2): 2 * base + 0.5,
        (0, 1, 2): 2 * base + 1,
    }
    return TabularFunction.from_function(table.__getitem__, 3)


def random_psd_instance(m: int, d: int, seed: int) -> LogDetFunction:
    """Log-det objective with ``D_i = G_i G_i^T`` for standard normal ``d x d`` ``G_i``."""
    if int(m) < 1 or int(d) < 1:
        raise InvalidInputError(f"need m >= 1 and d >= 1, got m={m}, d={d}")
    rng = np.random.default_rng(int(seed))
    g = rng.standard_normal((int(m), int(d), int(d)))
    mats = g @ g.transpose(0, 2, 1)
    # exact symmetry; matmul of G and G^T need not round identically per triangle
    mats = 0.5 * (mats + mats.transpose(0, 2, 1))
    return LogDetFunction(mats)


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------

def _require(spec, key):
    if key not in spec:
        raise InstanceParseError(f"instance of type {spec.get('type')!r} is missing field {key!r}")
    return spec[key]


def instance_from_dict(spec: dict, validate: bool = True) -> SetFunction:
    if not isinstance(spec, dict) or "type" not in spec:
        raise InstanceParseError("instance must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "modular":
            return ModularFunction(_require(spec, "weights"))
        if kind == "tabular":
            m = int(_require(spec, "m"))
            raw = _require(spec, "values")
            values = np.full(1 << m, np.nan)
            for key, val in raw.items():
                values[Subset.parse(key, m).mask] = float(val)
            if np.isnan(values).any():
                missing = int(np.flatnonzero(np.isnan(values))[0])
                raise InstanceParseError(
                    f"tabular instance missing value for subset "
                    f"{Subset.of([i for i in range(m) if missing >> i & 1], m)}")
            return TabularFunction(m, values, validate=validate)
        if kind == "coverage":
            return WeightedCoverageFunction(_require(spec, "universe_weights"), _require(spec, "covers"))
        if kind == "logdet":
            fn = LogDetFunction(_require(spec, "matrices"), validate=validate)
            if "d" in spec and int(spec["d"]) != fn.d:
                raise InstanceParseError(f"field 'd' = {spec['d']} disagrees with matrix size {fn.d}")
            return fn
        if kind == "logdet_random":
            return random_psd_instance(int(_require(spec, "m")), int(_require(spec, "d")),
                                       int(_require(spec, "seed")))
    except (TypeError, KeyError, AttributeError) as exc:
        raise InstanceParseError(f"malformed {kind!r} instance: {exc}") from None
    raise InstanceParseError(f"unknown instance type {kind!r}")


def instance_to_dict(fn: SetFunction) -> dict:
    if isinstance(fn, ModularFunction):
        return {"type": "modular", "weights": fn.weights.tolist()}
    if isinstance(fn, TabularFunction):
        m = fn.ground_size
        values = {}
        for mask in range(1 << m):
            key = str(Subset(tuple(i for i in range(m) if mask >> i & 1), m))
            values[key] = float(fn.values[mask])
        return {"type": "tabular", "m": m, "values": values}
    if isinstance(fn, WeightedCoverageFunction):
        return {"type": "coverage", "universe_weights": fn.universe_weights.tolist(),
                "covers": fn.covers}
    if isinstance(fn, LogDetFunction):
        return {"type": "logdet", "d": fn.d, "matrices": fn.matrices.tolist()}
    raise InvalidInputError(f"no file format for {type(fn).__name__}")


def load_instance(path) -> SetFunction:
    try:
        spec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"{path}: invalid JSON ({exc})") from None
    return instance_from_dict(spec)


def save_instance(fn: SetFunction, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(fn)) + "\n")


__all__ = [
    "LogDetFunction", "ModularFunction", "TabularFunction", "WeightedCoverageFunction",
    "check_table", "cholesky_logdet", "instance_from_dict", "instance_to_dict",
    "load_instance", "make_example1_function", "random_psd_instance", "save_instance",
]
