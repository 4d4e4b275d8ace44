"""Synthetic five-organ time-activity-curve datasets.

Curves follow a gamma-variate rise plus an optional late-accumulation
plateau, evaluated at the mid-times of a 24-frame dynamic acquisition
(fourteen 5 s, three 10 s, three 20 s and four 30 s frames, 280 s total).
"""

from __future__ import annotations

import csv
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ORGANS = ("brain", "heart", "kidney", "lung", "bladder")


class DatasetFormatError(ValueError):
    """Raised when a dataset file cannot be parsed."""


@dataclass(frozen=True)
class FrameSchedule:
    """Timing grid of a dynamic acquisition."""

    durations: tuple

    def __post_init__(self):
        if len(self.durations) == 0:
            raise ValueError("schedule needs at least one frame")
        if any(d <= 0 for d in self.durations):
            raise ValueError("frame durations must be strictly positive")

    @property
    def count(self) -> int:
        return len(self.durations)

    @property
    def mid_times(self) -> np.ndarray:
        d = np.asarray(self.durations, dtype=float)
        return np.cumsum(d) - d / 2.0

    @property
    def end_times(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.durations, dtype=float))


def default_frame_schedule() -> FrameSchedule:
    durations = (5.0,) * 14 + (10.0,) * 3 + (20.0,) * 3 + (30.0,) * 4
    return FrameSchedule(durations)


@dataclass(frozen=True)
class OrganKineticTemplate:
    """Noiseless kinetic model of one organ's TAC."""

    organ: str
    amplitude: float
    delay: float
    rise_shape: float
    washout: float
    plateau: float

    def __post_init__(self):
        if self.amplitude <= 0 or self.rise_shape <= 0 or self.washout <= 0:
            raise ValueError("amplitude, rise_shape and washout must be > 0")
        if self.delay < 0:
            raise ValueError("delay must be >= 0")
        if not 0.0 <= self.plateau <= 1.0:
            raise ValueError("plateau must lie in [0, 1]")

    def evaluate(self, times: np.ndarray) -> np.ndarray:
        return _kinetic_curve(
            np.asarray(times, dtype=float),
            self.amplitude,
            self.delay,
            self.rise_shape,
            self.washout,
            self.plateau,
        )


def _kinetic_curve(times, amplitude, delay, rise_shape, washout, plateau):
    x = (times - delay) / washout
    x = np.maximum(x, 0.0)
    rise = amplitude * np.power(x, rise_shape) * np.exp(-x)
    accumulation = plateau * amplitude * (1.0 - np.exp(-x))
    return rise + accumulation


# Fixed organ kinetics: heart is the early blood-pool spike, kidney peaks
# later and washes out slowly, bladder only accumulates within the 280 s
# window.  Amplitudes are arbitrary activity units.
_TEMPLATES = {
    "brain": OrganKineticTemplate("brain", amplitude=9.0, delay=10.0,
                                  rise_shape=2.0, washout=20.0, plateau=0.15),
    "heart": OrganKineticTemplate("heart", amplitude=30.0, delay=3.0,
                                  rise_shape=1.8, washout=9.0, plateau=0.02),
    "kidney": OrganKineticTemplate("kidney", amplitude=14.0, delay=18.0,
                                   rise_shape=2.2, washout=30.0, plateau=0.25),
    "lung": OrganKineticTemplate("lung", amplitude=18.0, delay=4.0,
                                 rise_shape=1.2, washout=14.0, plateau=0.05),
    "bladder": OrganKineticTemplate("bladder", amplitude=10.0, delay=25.0,
                                    rise_shape=1.5, washout=400.0, plateau=0.9),
}

MAX_TEMPLATE_AMPLITUDE = max(t.amplitude for t in _TEMPLATES.values())


def organ_template(organ: str) -> OrganKineticTemplate:
    try:
        return _TEMPLATES[organ]
    except KeyError:
        raise ValueError(f"unknown organ {organ!r}; expected one of {ORGANS}") from None


@dataclass(frozen=True)
class SyntheticConfig:
    curves_per_organ: int = 1000
    noise_relative: float = 0.10
    noise_floor: float = 0.02 * MAX_TEMPLATE_AMPLITUDE
    per_curve_jitter: float = 0.05
    seed: int = 0

    def validate(self):
        if self.curves_per_organ < 1:
            raise ValueError("curves_per_organ must be >= 1")
        if self.noise_relative < 0 or self.noise_floor < 0 or self.per_curve_jitter < 0:
            raise ValueError("noise sigmas must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


@dataclass
class TacDataset:
    curves: np.ndarray  # (n, T) activity values
    labels: list  # n organ names
    schedule: FrameSchedule
    patient_id: str

    @property
    def n(self) -> int:
        return self.curves.shape[0]

    def equals(self, other: "TacDataset") -> bool:
        return (
            self.labels == other.labels
            and self.curves.shape == other.curves.shape
            and np.array_equal(self.curves, other.curves)
        )


def generate_dataset(config: SyntheticConfig, schedule: FrameSchedule,
                     patient_id: str) -> TacDataset:
    """Deterministic synthetic dataset: a pure function of its arguments."""
    config.validate()
    rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, zlib.crc32(patient_id.encode("utf-8"))])
    )
    times = schedule.mid_times
    m = config.curves_per_organ
    blocks = []
    labels = []
    for organ in ORGANS:
        tpl = _TEMPLATES[organ]
        jitter = rng.normal(0.0, config.per_curve_jitter, size=(m, 3))
        amp = tpl.amplitude * (1.0 + jitter[:, 0])
        delay = tpl.delay * (1.0 + jitter[:, 1])
        washout = tpl.washout * (1.0 + jitter[:, 2])
        x = (times[None, :] - delay[:, None]) / washout[:, None]
        x = np.maximum(x, 0.0)
        clean = (amp[:, None] * np.power(x, tpl.rise_shape) * np.exp(-x)
                 + tpl.plateau * amp[:, None] * (1.0 - np.exp(-x)))
        eps_rel = rng.normal(0.0, 1.0, size=clean.shape) * config.noise_relative
        eps_abs = rng.normal(0.0, 1.0, size=clean.shape) * config.noise_floor
        noisy = np.maximum(0.0, clean * (1.0 + eps_rel) + eps_abs)
        blocks.append(noisy)
        labels.extend([organ] * m)
    return TacDataset(np.vstack(blocks), labels, schedule, patient_id)


def _schedule_sidecar_path(path: Path) -> Path:
    return path.with_suffix(".schedule.json")


def save_dataset(ds: TacDataset, path) -> Path:
    path = Path(path)
    T = ds.schedule.count
    if ds.curves.shape[1] != T:
        raise ValueError("curve length does not match schedule")
    header = ["id", "label"] + [f"f{j:02d}" for j in range(T)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, (row, label) in enumerate(zip(ds.curves, ds.labels)):
            writer.writerow([f"{ds.patient_id}-{i:05d}", label]
                            + [repr(float(v)) for v in row])
    with _schedule_sidecar_path(path).open("w") as fh:
        json.dump({"durations": list(ds.schedule.durations), "unit": "s"}, fh)
    return path


def load_dataset(path) -> TacDataset:
    path = Path(path)
    sidecar = _schedule_sidecar_path(path)
    if sidecar.exists():
        with sidecar.open() as fh:
            meta = json.load(fh)
        schedule = FrameSchedule(tuple(float(d) for d in meta["durations"]))
    else:
        schedule = default_frame_schedule()
    T = schedule.count

    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"{path}: line 1: no header") from None
        expected = ["id", "label"] + [f"f{j:02d}" for j in range(T)]
        if header != expected:
            raise DatasetFormatError(
                f"{path}: line 1: malformed header; expected {','.join(expected)}"
            )
        curves = []
        labels = []
        patient_id = ""
        for lineno, row in enumerate(reader, start=2):
            if len(row) != T + 2:
                raise DatasetFormatError(
                    f"{path}: line {lineno}: expected {T + 2} fields, got {len(row)}"
                )
            rid, label = row[0], row[1]
            if label not in ORGANS:
                raise DatasetFormatError(
                    f"{path}: line {lineno}: unknown label {label!r}"
                )
            try:
                values = [float(v) for v in row[2:]]
            except ValueError:
                raise DatasetFormatError(
                    f"{path}: line {lineno}: non-numeric activity value"
                ) from None
            if not patient_id:
                patient_id = rid.rsplit("-", 1)[0]
            curves.append(values)
            labels.append(label)
    if not curves:
        raise DatasetFormatError(f"{path}: no data rows")
    return TacDataset(np.asarray(curves, dtype=float), labels, schedule, patient_id)
