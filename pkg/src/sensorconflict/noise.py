"""Seeded corruption of trajectories: impulses, DC offset, Gaussian noise."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import NoiseSpecError
from .fusion import AXES, Trajectory3D

KINDS = ("impulse", "dc", "gaussian")


def _axes(axes) -> tuple:
    if isinstance(axes, str):
        axes = tuple(axes.replace(",", ""))
    axes = tuple(axes)
    bad = [a for a in axes if a not in AXES]
    if bad or not axes:
        raise NoiseSpecError(f"axes must be a nonempty subset of x, y, z; got {axes}")
    return axes


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    axes: tuple = ("z",)
    count: Optional[int] = None
    magnitude: Optional[float] = None
    offset: Optional[float] = None
    snr_db: Optional[float] = None
    seed: int = 0
    sign: int = 1
    power: str = "ac"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise NoiseSpecError(f"unknown noise kind {self.kind!r}")
        object.__setattr__(self, "axes", _axes(self.axes))
        populated = {
            "impulse": self.count is not None or self.magnitude is not None,
            "dc": self.offset is not None,
            "gaussian": self.snr_db is not None,
        }
        others = [k for k, v in populated.items() if v and k != self.kind]
        if others:
            raise NoiseSpecError(f"{self.kind} spec also sets parameters for {others}")
        if self.kind == "impulse" and (self.count is None or self.count < 1 or self.magnitude is None):
            raise NoiseSpecError("impulse noise needs count >= 1 and a magnitude")
        if self.kind == "dc" and self.offset is None:
            raise NoiseSpecError("dc noise needs an offset")
        if self.kind == "gaussian" and self.snr_db is None:
            raise NoiseSpecError("gaussian noise needs snr_db")
        if self.sign not in (1, -1):
            raise NoiseSpecError("impulse sign must be +1 or -1")
        if self.power not in ("ac", "raw"):
            raise NoiseSpecError("signal power reference must be 'ac' or 'raw'")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "axes": "".join(self.axes), "seed": self.seed}
        if self.kind == "impulse":
            out.update(count=self.count, magnitude=self.magnitude, sign=self.sign)
        elif self.kind == "dc":
            out.update(offset=self.offset)
        else:
            out.update(snr_db=self.snr_db, power=self.power)
        return out


PRESETS = {
    "impulse": NoiseSpec("impulse", axes=("z",), count=5, magnitude=100.0),
    "dc": NoiseSpec("dc", axes=("z",), offset=-1000.0),
    "gaussian": NoiseSpec("gaussian", axes=("x", "y", "z"), snr_db=30.0),
}


def preset(name: str, seed: int = 0) -> NoiseSpec:
    from dataclasses import replace

    try:
        return replace(PRESETS[name], seed=seed)
    except KeyError:
        raise NoiseSpecError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def add_impulse(traj: Trajectory3D, count: int, magnitude: float, axes: Sequence[str] = ("z",), seed=None, sign: int = 1) -> Trajectory3D:
    """Add ``sign * magnitude`` at ``count`` distinct random indices on each axis.

    The same indices are used for every selected axis.
    """
    axes = _axes(axes)
    if count < 0 or count > len(traj):
        raise NoiseSpecError(f"impulse count {count} exceeds trajectory length {len(traj)}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(traj), size=count, replace=False)
    changes = {}
    for a in axes:
        v = traj.axis(a).copy()
        v[idx] += sign * magnitude
        changes[a] = v
    return traj.replace(**changes)


def add_dc(traj: Trajectory3D, offset: float, axes: Sequence[str] = ("z",)) -> Trajectory3D:
    axes = _axes(axes)
    return traj.replace(**{a: traj.axis(a) + offset for a in axes})


def signal_power(values: np.ndarray, power: str = "ac") -> float:
    values = np.asarray(values, dtype=float)
    if power == "ac":
        return float(np.mean((values - values.mean()) ** 2))
    return float(np.mean(values**2))


def add_gaussian(traj: Trajectory3D, snr_db: float, axes: Sequence[str] = ("x", "y", "z"), seed=None, power: str = "ac") -> Trajectory3D:
    """Add white Gaussian noise at the requested per-axis SNR."""
    axes = _axes(axes)
    rng = np.random.default_rng(seed)
    changes = {}
    for a in axes:
        clean = traj.axis(a)
        p_signal = signal_power(clean, power)
        if p_signal == 0:
            raise NoiseSpecError(f"axis {a} has zero signal power; SNR is undefined")
        sigma = np.sqrt(p_signal / 10 ** (snr_db / 10))
        changes[a] = clean + rng.normal(0.0, sigma, size=clean.size)
    return traj.replace(**changes)


def derive_noisy_source(source: Trajectory3D, spec: NoiseSpec, source_id: Optional[int] = None) -> Trajectory3D:
    """Corrupted copy of ``source`` with a new id (default: original id + 1000)."""
    if spec.kind == "impulse":
        out = add_impulse(source, spec.count, spec.magnitude, spec.axes, spec.seed, spec.sign)
    elif spec.kind == "dc":
        out = add_dc(source, spec.offset, spec.axes)
    else:
        out = add_gaussian(source, spec.snr_db, spec.axes, spec.seed, spec.power)
    new_id = source.source_id + 1000 if source_id is None else source_id
    return out.replace(source_id=new_id, label=f"{source.label or source.source_id}+{spec.kind}")
