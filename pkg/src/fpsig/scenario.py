"""Scenario files and deterministic JSON serialization.

A scenario bundles the quality prior, the buyer valuations and the buyer
rationality, plus optional solver overrides:

    {
      "distribution": {"family": "uniform", "params": {}, "support": [0, 1]},
      "buyers": [{"form": "linear", "params": {"intercept": 0.3, "slope": 0.4}}],
      "rationality": "ex_post",
      "overrides": {"grid_m": 201, "price_steps": 41, "seed": 7, "trials": 100000}
    }

All emitted JSON is schema-tagged ("fps/1"), key-sorted and floats are
rounded to 12 significant digits, so outputs are byte-identical across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .fixed_price import EX_INTERIM, EX_POST, FixedPrice
from .quality_dist import QualityDistribution, make_distribution
from .signaling import SignalingMechanism
from .valuation import ValuationProfile, make_valuation

SCHEMA = "fps/1"


class ScenarioError(ValueError):
    """Malformed scenario or mechanism configuration."""


@dataclass
class Scenario:
    distribution: QualityDistribution
    profile: ValuationProfile
    rationality: str
    overrides: dict = field(default_factory=dict)

    @property
    def n_buyers(self) -> int:
        return len(self.profile)


def parse_scenario(data: dict) -> Scenario:
    try:
        dist_spec = data["distribution"]
        buyer_specs = data["buyers"]
        rationality = data["rationality"]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"scenario missing required field: {exc}") from exc
    if rationality not in (EX_POST, EX_INTERIM):
        raise ScenarioError(
            f"rationality must be '{EX_POST}' or '{EX_INTERIM}', got {rationality!r}"
        )
    if not buyer_specs:
        raise ScenarioError("scenario needs at least one buyer")
    try:
        dist = make_distribution(
            dist_spec["family"],
            dist_spec.get("params", {}),
            dist_spec.get("support"),
        )
        buyers = [
            make_valuation(spec["form"], spec.get("params", {}), dist.support)
            for spec in buyer_specs
        ]
        profile = ValuationProfile(buyers)
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc
    overrides = data.get("overrides", {}) or {}
    if not isinstance(overrides, dict):
        raise ScenarioError("overrides must be an object")
    return Scenario(dist, profile, rationality, overrides)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(data)


def mechanism_from_dict(data: dict):
    """Parse a mechanism file: fixed price or signaling.

    A full ``solve`` report is accepted too; its embedded mechanism is used.
    """
    if isinstance(data, dict) and isinstance(data.get("mechanism"), dict):
        data = data["mechanism"]
    try:
        if data.get("type") == "fixed_price":
            return FixedPrice(float(data["price"]))
        if "scheme" in data:
            return SignalingMechanism.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid mechanism: {exc}") from exc
    raise ScenarioError("mechanism must be a fixed_price or signaling object")


def load_mechanism(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read mechanism {path}: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("mechanism"), dict):
        data = data["mechanism"]
    mech = mechanism_from_dict(data)
    return mech, data


def round_floats(obj, digits: int = 12):
    """Recursively round floats to ``digits`` significant figures."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def dumps_json(data: dict) -> str:
    payload = dict(data)
    payload.setdefault("schema", SCHEMA)
    return json.dumps(round_floats(payload), sort_keys=True, indent=2) + "\n"


def write_json(data: dict, path: str | None) -> str:
    text = dumps_json(data)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text
