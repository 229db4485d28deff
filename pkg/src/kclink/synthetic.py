"""Reproducible synthetic comparison datasets.

Each laboratory is simulated by drawing ``n`` observations of its
travelling standard(s) from a Gaussian population and reporting the sample
mean, the standard deviation of the mean, and (for linking laboratories)
the covariance of the two means.  Draws come from numpy's counter-based
Philox generator (Philox4x64-10) seeded per laboratory through
``SeedSequence(seed, spawn_key=(kind, index, attempt))``, so every lab has
an independent substream and changing one group's size never perturbs the
draws of other labs.  Normal variates are produced by the inverse-CDF
transform, which consumes exactly one uniform per observation.
"""

from __future__ import annotations

import json
import warnings as _warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .model import ComparisonDataset, LabResult, ValidationError, validate_dataset

LabKind = str  # "a_only" | "linking" | "b_only"

_KIND_KEYS = {"a_only": 0, "linking": 1, "b_only": 2}

# retries with fresh substreams before giving up on a non-degenerate sample
_MAX_ATTEMPTS = 8

# relative floor for the reported uncertainty when every retry produced a
# degenerate (zero spread) sample, e.g. when sigma underflows next to the
# true value; keeps the result a valid LabResult
_DEGENERATE_U_FLOOR = 1e-15


@dataclass(frozen=True)
class ScenarioLayout:
    """How many laboratories of each participation kind to simulate."""

    only_a: int
    linking: int
    only_b: int

    def __post_init__(self) -> None:
        if min(self.only_a, self.linking, self.only_b) < 0:
            raise ValidationError("layout counts must be non-negative")
        if self.only_a + self.linking < 1 or self.only_b + self.linking < 1:
            raise ValidationError("each standard needs at least one laboratory")


@dataclass(frozen=True)
class SyntheticScenario:
    """Ground truth and sampling plan for a synthetic comparison."""

    y_a_true: float
    y_b_true: float
    sigma_a: float
    sigma_b: float
    rho: float
    n: int
    layout: ScenarioLayout
    seed: int

    def __post_init__(self) -> None:
        if not self.sigma_a > 0.0 or not self.sigma_b > 0.0:
            raise ValidationError("population standard deviations must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValidationError("population correlation must lie inside (-1, 1)")
        if self.n < 2:
            raise ValidationError("sample size per laboratory must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 bits")


def _rng(scenario: SyntheticScenario, kind: LabKind, index: int, attempt: int):
    seq = np.random.SeedSequence(
        entropy=scenario.seed, spawn_key=(_KIND_KEYS[kind], index, attempt)
    )
    return np.random.Generator(np.random.Philox(seq))


def _standard_normal(rng, size: int) -> np.ndarray:
    # uniforms strictly inside (0, 1) so the inverse CDF stays finite
    u = (rng.integers(0, 2**53, size=size) + 0.5) / 2**53
    return ndtri(u)


def _mean_and_u(obs: np.ndarray) -> tuple[float, float]:
    n = obs.size
    mean = float(np.mean(obs))
    var = float(np.sum((obs - mean) ** 2)) / (n - 1)
    return mean, float(np.sqrt(var / n))


def sample_lab(
    scenario: SyntheticScenario,
    kind: LabKind,
    index: int,
    label: str | None = None,
) -> LabResult:
    """Simulate one laboratory and return its reported result.

    ``index`` selects the lab's substream within its kind.  A sample with
    zero spread (or, for a linking lab, a singular sample correlation) is
    redrawn from the next substream with a warning; if every retry is
    degenerate the observed mean is reported with a floored uncertainty.
    """
    if kind not in _KIND_KEYS:
        raise ValidationError(f"unknown laboratory kind: {kind!r}")
    if label is None:
        label = f"{kind}-{index + 1:02d}"

    for attempt in range(_MAX_ATTEMPTS):
        rng = _rng(scenario, kind, index, attempt)
        if kind == "linking":
            z_a = _standard_normal(rng, scenario.n)
            z_i = _standard_normal(rng, scenario.n)
            z_b = scenario.rho * z_a + np.sqrt(1.0 - scenario.rho**2) * z_i
            obs_a = scenario.y_a_true + scenario.sigma_a * z_a
            obs_b = scenario.y_b_true + scenario.sigma_b * z_b
            x_a, u_a = _mean_and_u(obs_a)
            x_b, u_b = _mean_and_u(obs_b)
            sample_cov = float(
                np.sum((obs_a - x_a) * (obs_b - x_b))
            ) / (scenario.n - 1)
            cov = sample_cov / scenario.n
            if u_a > 0.0 and u_b > 0.0 and abs(cov) < u_a * u_b:
                return LabResult(
                    label=label, value_a=x_a, u_a=u_a, value_b=x_b, u_b=u_b,
                    cov_ab=cov,
                )
        else:
            z = _standard_normal(rng, scenario.n)
            if kind == "a_only":
                x, u = _mean_and_u(scenario.y_a_true + scenario.sigma_a * z)
            else:
                x, u = _mean_and_u(scenario.y_b_true + scenario.sigma_b * z)
            if u > 0.0:
                if kind == "a_only":
                    return LabResult(label=label, value_a=x, u_a=u)
                return LabResult(label=label, value_b=x, u_b=u)
        _warnings.warn(
            f"{label}: degenerate sample (attempt {attempt + 1}), redrawing "
            f"from the next substream",
            RuntimeWarning,
            stacklevel=2,
        )

    # every retry degenerate: report the (exact) mean with a floored u
    if kind == "a_only":
        u = max(abs(x), 1.0) * _DEGENERATE_U_FLOOR
        return LabResult(label=label, value_a=x, u_a=u)
    if kind == "b_only":
        u = max(abs(x), 1.0) * _DEGENERATE_U_FLOOR
        return LabResult(label=label, value_b=x, u_b=u)
    u_a = max(u_a, max(abs(x_a), 1.0) * _DEGENERATE_U_FLOOR)
    u_b = max(u_b, max(abs(x_b), 1.0) * _DEGENERATE_U_FLOOR)
    return LabResult(
        label=label, value_a=x_a, u_a=u_a, value_b=x_b, u_b=u_b, cov_ab=0.0
    )


def generate_scenario(scenario: SyntheticScenario) -> ComparisonDataset:
    """Simulate the full comparison: labelled labs in layout order.

    Deterministic for a given scenario; labels run LAB-01, LAB-02, ... over
    the A-only, linking and B-only groups in that order.
    """
    labs: list[LabResult] = []
    counter = 0
    for kind, count in (
        ("a_only", scenario.layout.only_a),
        ("linking", scenario.layout.linking),
        ("b_only", scenario.layout.only_b),
    ):
        for index in range(count):
            counter += 1
            labs.append(sample_lab(scenario, kind, index, label=f"LAB-{counter:02d}"))
    return validate_dataset(labs)


def scenario_from_dict(data: dict) -> SyntheticScenario:
    try:
        layout = data["layout"]
        return SyntheticScenario(
            y_a_true=float(data["y_a_true"]),
            y_b_true=float(data["y_b_true"]),
            sigma_a=float(data["sigma_a"]),
            sigma_b=float(data["sigma_b"]),
            rho=float(data["rho"]),
            n=int(data["n"]),
            layout=ScenarioLayout(
                only_a=int(layout["only_a"]),
                linking=int(layout["linking"]),
                only_b=int(layout["only_b"]),
            ),
            seed=int(data["seed"]),
        )
    except KeyError as missing:
        raise ValidationError(f"scenario is missing field {missing}") from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed scenario: {exc}") from None


def load_scenario(path: str | Path) -> SyntheticScenario:
    """Read a scenario specification from a JSON file."""
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: scenario must be a JSON object")
    return scenario_from_dict(data)
