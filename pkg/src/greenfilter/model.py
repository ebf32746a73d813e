"""Declarative description of the linear time-varying estimation problem.

A model carries the state equation matrices F, G, Q, the observation
matrices H, R, the drifts f, h, the initial/terminal covariances Pi0 and
SigmaT, and the time grid.  Time-varying entries are either constant or
tabulated on the grid with piecewise-linear interpolation in between.
"""

import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import OutOfHorizon, ParseError, ValidationError
from .numcore import TimeGrid

R_MIN_EIG = 1e-10
PSD_TOL = 1e-10

__all__ = [
    "MatrixSchedule",
    "LtvModel",
    "Violation",
    "validate",
    "load_model",
    "serialize_model",
    "build_model",
]


@dataclass(frozen=True)
class MatrixSchedule:
    """A constant or grid-tabulated matrix (or vector) valued function of time.

    Tabulated schedules interpolate linearly between the bracketing grid
    samples and are exact at grid points.
    """

    kind: str  # "constant" | "tabulated"
    constant_value: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None
    grid: Optional[TimeGrid] = field(default=None, compare=False)

    @classmethod
    def constant(cls, value, grid=None) -> "MatrixSchedule":
        return cls("constant", np.array(value, dtype=float), None, grid)

    @classmethod
    def tabulated(cls, samples, grid) -> "MatrixSchedule":
        return cls("tabulated", None, np.array(samples, dtype=float), grid)

    @property
    def shape(self):
        if self.kind == "constant":
            return self.constant_value.shape
        return self.samples.shape[1:]

    def with_grid(self, grid: TimeGrid) -> "MatrixSchedule":
        return replace(self, grid=grid)

    def _check_horizon(self, t: float):
        g = self.grid
        if g is None:
            return
        span = g.T - g.t0
        if t < g.t0 - 1e-12 * span or t > g.T + 1e-12 * span:
            raise OutOfHorizon(f"t={t} outside [{g.t0}, {g.T}]")

    def eval(self, t: float) -> np.ndarray:
        """Value at time t; exact at grid points, linear in between."""
        self._check_horizon(t)
        if self.kind == "constant":
            return self.constant_value
        g = self.grid
        pos = (t - g.t0) / g.h
        k = int(np.floor(pos))
        k = min(max(k, 0), g.n_steps - 1)
        w = pos - k
        if w <= 0.0:
            return self.samples[k]
        if w >= 1.0:
            return self.samples[k + 1]
        return (1.0 - w) * self.samples[k] + w * self.samples[k + 1]

    def tabulate(self, times) -> np.ndarray:
        """Values at an array of times, shape (len(times), *self.shape)."""
        times = np.asarray(times, dtype=float)
        if self.kind == "constant":
            return np.broadcast_to(
                self.constant_value, times.shape + self.shape
            ).copy()
        self._check_horizon(float(times.min()))
        self._check_horizon(float(times.max()))
        g = self.grid
        pos = np.clip((times - g.t0) / g.h, 0.0, g.n_steps)
        k = np.minimum(pos.astype(int), g.n_steps - 1)
        w = (pos - k).reshape((-1,) + (1,) * len(self.shape))
        return (1.0 - w) * self.samples[k] + w * self.samples[k + 1]


def eval(schedule: MatrixSchedule, t: float) -> np.ndarray:
    """Functional alias for :meth:`MatrixSchedule.eval`."""
    return schedule.eval(t)


@dataclass(frozen=True)
class LtvModel:
    """Full problem description for one estimation horizon."""

    n: int
    p: int
    m: int
    F: MatrixSchedule
    G: MatrixSchedule
    Q: MatrixSchedule
    H: MatrixSchedule
    R: MatrixSchedule
    f: MatrixSchedule
    h: MatrixSchedule
    x0: np.ndarray
    y0: np.ndarray
    Pi0: np.ndarray
    SigmaT: np.ndarray
    grid: TimeGrid

    @property
    def time_invariant(self) -> bool:
        for sched in (self.F, self.G, self.Q, self.H, self.R, self.f, self.h):
            if sched.kind != "constant":
                return False
        return True

    def with_grid(self, grid: TimeGrid) -> "LtvModel":
        """Same model on another grid (constant schedules only)."""
        for name in ("F", "G", "Q", "H", "R", "f", "h"):
            if getattr(self, name).kind != "constant":
                raise ValueError("cannot regrid a model with tabulated schedules")
        kw = {
            name: getattr(self, name).with_grid(grid)
            for name in ("F", "G", "Q", "H", "R", "f", "h")
        }
        return replace(self, grid=grid, **kw)


@dataclass(frozen=True)
class Violation:
    """One model-invariant violation, machine readable."""

    field: str
    code: str
    detail: str
    time: Optional[float] = None

    def __str__(self):
        at = f" at t={self.time:g}" if self.time is not None else ""
        return f"{self.field} {self.code}{at}: {self.detail}"


_SCHEDULE_SHAPES = {
    "F": ("n", "n"),
    "G": ("n", "p"),
    "Q": ("p", "p"),
    "H": ("m", "n"),
    "R": ("m", "m"),
    "f": ("n",),
    "h": ("m",),
}


def _schedule_values(model: LtvModel, name: str):
    """(time, value) pairs to check: one for constants, per-grid-point else."""
    sched = getattr(model, name)
    if sched.kind == "constant":
        return [(None, sched.constant_value)]
    return list(zip(model.grid.points, sched.samples))


def validate(model: LtvModel) -> list:
    """Check every model invariant; returns violations (empty list = valid)."""
    out = []
    dims = {"n": model.n, "p": model.p, "m": model.m}
    for d, v in dims.items():
        if v < 1:
            out.append(Violation(d, "nonpositive dimension", f"{d}={v}"))
    if out:
        return out

    for name, spec in _SCHEDULE_SHAPES.items():
        sched = getattr(model, name)
        want = tuple(dims[s] for s in spec)
        if sched.kind == "tabulated":
            if sched.samples.shape[0] != model.grid.n_steps + 1:
                out.append(
                    Violation(
                        name,
                        "wrong tabulation length",
                        f"{sched.samples.shape[0]} samples for "
                        f"{model.grid.n_steps + 1} grid points",
                    )
                )
                continue
        if sched.shape != want:
            out.append(
                Violation(name, "wrong shape", f"got {sched.shape}, want {want}")
            )
        vals = sched.constant_value if sched.kind == "constant" else sched.samples
        if not np.all(np.isfinite(vals)):
            out.append(Violation(name, "non-finite entries", "NaN or Inf present"))

    for name, want in (
        ("x0", (model.n,)),
        ("y0", (model.m,)),
        ("Pi0", (model.n, model.n)),
        ("SigmaT", (model.n, model.n)),
    ):
        arr = getattr(model, name)
        if arr.shape != want:
            out.append(Violation(name, "wrong shape", f"got {arr.shape}, want {want}"))
        elif not np.all(np.isfinite(arr)):
            out.append(Violation(name, "non-finite entries", "NaN or Inf present"))
    if out:
        return out

    def check_psd(name, t, M):
        scale = max(1.0, float(np.max(np.abs(M))))
        if float(np.max(np.abs(M - M.T))) > PSD_TOL * scale:
            out.append(Violation(name, "not symmetric", "asymmetry above tolerance", t))
            return
        w = np.linalg.eigvalsh(0.5 * (M + M.T))
        if w.min() < -PSD_TOL * max(1.0, float(np.max(np.abs(w)))):
            out.append(Violation(name, "not PSD", f"min eigenvalue {w.min():.3e}", t))

    for t, Qv in _schedule_values(model, "Q"):
        check_psd("Q", t, Qv)
    check_psd("Pi0", None, model.Pi0)
    check_psd("SigmaT", None, model.SigmaT)

    for t, Rv in _schedule_values(model, "R"):
        scale = max(1.0, float(np.max(np.abs(Rv))))
        if float(np.max(np.abs(Rv - Rv.T))) > PSD_TOL * scale:
            out.append(Violation("R", "not symmetric", "asymmetry above tolerance", t))
            continue
        w = np.linalg.eigvalsh(0.5 * (Rv + Rv.T))
        if w.min() < R_MIN_EIG:
            out.append(
                Violation(
                    "R",
                    "not uniformly positive definite",
                    f"min eigenvalue {w.min():.3e} < {R_MIN_EIG:g}",
                    t,
                )
            )
    return out


_CONFIG_FIELDS = [
    "t0", "T", "n_steps", "n", "p", "m",
    "F", "G", "Q", "H", "R", "f", "h", "x0", "y0", "Pi0", "SigmaT",
]


def _parse_schedule(name, raw, grid) -> MatrixSchedule:
    if not isinstance(raw, dict) or len(raw) != 1:
        raise ParseError(f"field {name!r} must be a single-key object "
                         "{'constant': ...} or {'tabulated': ...}")
    key, payload = next(iter(raw.items()))
    try:
        arr = np.array(payload, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {name!r}: not a numeric array: {exc}")
    if key == "constant":
        return MatrixSchedule.constant(arr, grid)
    if key == "tabulated":
        return MatrixSchedule.tabulated(arr, grid)
    raise ParseError(f"field {name!r}: unknown schedule kind {key!r}")


def load_model(config_text: str) -> LtvModel:
    """Parse, build and validate a model from its JSON config text.

    Raises
    ------
    ParseError
        Malformed JSON, missing fields, or non-numeric payloads.
    ValidationError
        Structurally parse-able model that violates an invariant; the
        violation list is attached to the exception.
    """
    try:
        raw = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    for name in _CONFIG_FIELDS:
        if name not in raw:
            raise ParseError(f"config is missing field {name!r}")
    try:
        grid = TimeGrid(float(raw["t0"]), float(raw["T"]), int(raw["n_steps"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad grid fields: {exc}")
    try:
        dims = {k: int(raw[k]) for k in ("n", "p", "m")}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad dimension fields: {exc}")

    sched = {k: _parse_schedule(k, raw[k], grid) for k in _SCHEDULE_SHAPES}
    try:
        vecs = {k: np.array(raw[k], dtype=float)
                for k in ("x0", "y0", "Pi0", "SigmaT")}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad array field: {exc}")

    model = LtvModel(
        n=dims["n"], p=dims["p"], m=dims["m"],
        F=sched["F"], G=sched["G"], Q=sched["Q"], H=sched["H"], R=sched["R"],
        f=sched["f"], h=sched["h"],
        x0=vecs["x0"], y0=vecs["y0"], Pi0=vecs["Pi0"], SigmaT=vecs["SigmaT"],
        grid=grid,
    )
    violations = validate(model)
    if violations:
        raise ValidationError(violations)
    return model


def _schedule_to_json(sched: MatrixSchedule):
    if sched.kind == "constant":
        return {"constant": sched.constant_value.tolist()}
    return {"tabulated": sched.samples.tolist()}


def serialize_model(model: LtvModel) -> str:
    """Config text such that ``load_model(serialize_model(m))`` equals m."""
    g = model.grid
    raw = {
        "t0": g.t0, "T": g.T, "n_steps": g.n_steps,
        "n": model.n, "p": model.p, "m": model.m,
    }
    for name in _SCHEDULE_SHAPES:
        raw[name] = _schedule_to_json(getattr(model, name))
    for name in ("x0", "y0", "Pi0", "SigmaT"):
        raw[name] = getattr(model, name).tolist()
    return json.dumps(raw, indent=2)


def _coerce_schedule(value, shape, grid) -> MatrixSchedule:
    if isinstance(value, MatrixSchedule):
        return value.with_grid(grid)
    arr = np.array(value, dtype=float)
    if arr.shape == ():
        arr = np.full(shape, float(arr)) if len(shape) == 1 else float(arr) * np.eye(*shape)
    if arr.shape == shape:
        return MatrixSchedule.constant(arr, grid)
    if arr.shape == (grid.n_steps + 1,) + shape:
        return MatrixSchedule.tabulated(arr, grid)
    raise ValueError(f"cannot coerce shape {arr.shape} to schedule of shape {shape}")


def build_model(grid: TimeGrid, n: int, p: int, m: int, *, F, G, Q, H, R,
                f=0.0, h=0.0, x0=0.0, y0=0.0, Pi0=0.0, SigmaT=0.0,
                check: bool = True) -> LtvModel:
    """Convenience constructor taking scalars, arrays or schedules.

    Scalars broadcast: to a multiple of the identity for square matrix
    fields, to a constant-filled vector for vector fields, and arrays of
    shape (n_steps+1, ...) become tabulated schedules.
    """
    def vec(v, k):
        a = np.array(v, dtype=float)
        return np.full(k, float(a)) if a.shape == () else a

    def mat(v, r, c):
        a = np.array(v, dtype=float)
        if a.shape == ():
            out = np.zeros((r, c))
            np.fill_diagonal(out, float(a))
            return out
        return a

    model = LtvModel(
        n=n, p=p, m=m,
        F=_coerce_schedule(F, (n, n), grid),
        G=_coerce_schedule(G, (n, p), grid),
        Q=_coerce_schedule(Q, (p, p), grid),
        H=_coerce_schedule(H, (m, n), grid),
        R=_coerce_schedule(R, (m, m), grid),
        f=_coerce_schedule(vec(f, n) if np.ndim(f) <= 1 else f, (n,), grid),
        h=_coerce_schedule(vec(h, m) if np.ndim(h) <= 1 else h, (m,), grid),
        x0=vec(x0, n), y0=vec(y0, m),
        Pi0=mat(Pi0, n, n), SigmaT=mat(SigmaT, n, n),
        grid=grid,
    )
    if check:
        violations = validate(model)
        if violations:
            raise ValidationError(violations)
    return model
