"""
Run configuration and table artifacts for the scenario runner.

Settings keep the values exactly as written in the JSON file (degrees at the
boundary); the `to_*` methods build the radian-valued domain objects.
"""
import csv
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from classes.errors import ValidationError
from classes.link import ChannelParams, LinkGeometry
from classes.mobility import MobilityMode, OrwpConfig, quadrant_aps
from classes.orientation import Family, OrientationModel


class Scenario(str, Enum):
    FIT_DATASET = "fit_dataset"
    TABULATE_COSPSI = "tabulate_cospsi"
    TABULATE_GAIN = "tabulate_gain"
    TABULATE_SNR = "tabulate_snr"
    ORWP_SWEEP = "orwp_sweep"
    VALIDATE = "validate"


@dataclass(frozen=True)
class ChannelSettings:
    half_angle_deg: float = 60.0
    fov_deg: float = 90.0
    area_m2: float = 1e-4
    responsivity: float = 1.0
    p_opt: float = 1.0
    noise_psd: float = 1e-21
    bandwidth: float = 1e7

    def to_params(self) -> ChannelParams:
        return ChannelParams(
            area=self.area_m2,
            half_angle=math.radians(self.half_angle_deg),
            fov=math.radians(self.fov_deg),
            responsivity=self.responsivity,
            p_opt=self.p_opt,
            noise_psd=self.noise_psd,
            bandwidth=self.bandwidth,
        )


@dataclass(frozen=True)
class ModelSettings:
    family: str = "laplace"
    mean_deg: float = 41.39
    sigma_deg: float = 7.68
    sigma_kind: str = "std"
    exact: bool = True

    def to_model(self) -> OrientationModel:
        try:
            family = Family(self.family)
        except ValueError:
            raise ValidationError(f"unknown family '{self.family}'", "family in {laplace, gaussian}")
        return OrientationModel.from_degrees(family, self.mean_deg, self.sigma_deg, self.sigma_kind, self.exact)


SITTING_DEFAULT = ModelSettings()
WALKING_DEFAULT = ModelSettings(family="gaussian", mean_deg=29.67, sigma_deg=7.78)

# AP overhead, UEs along the x axis, user facing -x
AXIS_UE_POSITIONS = ((-2.0, 0.0), (-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (2.0, 0.0))


@dataclass(frozen=True)
class GeometrySettings:
    ap: Tuple[float, float, float] = (0.0, 0.0, 2.0)
    ue_height: float = 0.0
    omega_deg: float = 180.0
    ue_positions: Tuple[Tuple[float, float], ...] = AXIS_UE_POSITIONS

    def links(self) -> List[LinkGeometry]:
        omega = math.radians(self.omega_deg)
        return [LinkGeometry(self.ap, (x, y, self.ue_height), omega) for x, y in self.ue_positions]


@dataclass(frozen=True)
class OrwpSettings:
    room_lengths: Tuple[float, ...] = (4.0, 8.0, 12.0, 16.0)
    speeds: Tuple[float, ...] = (1.0, 1.4, 2.0)
    modes: Tuple[str, ...] = (MobilityMode.VERTICAL_UPWARD.value, MobilityMode.ORWP_GAUSSIAN.value)
    ts_s: float = 0.013
    tc_s: float = 0.130
    n_runs: int = 10_000
    ap_height: float = 2.0
    ue_height: float = 0.0
    init_serving: str = "quadrant"
    handover_margin_db: float = 5.0
    time_to_trigger: int = 3

    def base_config(self, walking: OrientationModel, seed: int) -> OrwpConfig:
        length = self.room_lengths[0]
        return OrwpConfig(
            room_length=length,
            speed=self.speeds[0],
            ts=self.ts_s,
            tc_theta=self.tc_s,
            theta_mean=walking.mu_theta,
            theta_std=walking.sigma,
            ap_positions=quadrant_aps(length, self.ap_height),
            seed=seed,
            ue_height=self.ue_height,
            init_serving=self.init_serving,
            handover_margin_db=self.handover_margin_db,
            time_to_trigger=self.time_to_trigger,
        )


@dataclass(frozen=True)
class TabulateSettings:
    n_tau: int = 201
    n_gain: int = 201
    density_ceiling: float = 1e3


@dataclass(frozen=True)
class ValidateTolerances:
    ksd: float = 0.01
    quadrature: float = 1e-6
    moment_se: float = 3.0
    n_samples: int = 1_000_000
    n_geometries: int = 20
    n_proposition_geometries: int = 100
    approx_grid_ksd: float = 0.05
    dirac_reference: float = 0.0336
    dirac_band: float = 0.015


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario = Scenario.VALIDATE
    seed: int = 1
    output_dir: str = "results"
    dataset: Optional[str] = None
    channel: ChannelSettings = field(default_factory=ChannelSettings)
    sitting: ModelSettings = SITTING_DEFAULT
    walking: ModelSettings = WALKING_DEFAULT
    geometry: GeometrySettings = field(default_factory=GeometrySettings)
    orwp: OrwpSettings = field(default_factory=OrwpSettings)
    tabulate: TabulateSettings = field(default_factory=TabulateSettings)
    tolerances: ValidateTolerances = field(default_factory=ValidateTolerances)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["scenario"] = self.scenario.value
        return _lists(data)


def _lists(value):
    # JSON has no tuples; keep the dict form identical to what json.load returns
    if isinstance(value, dict):
        return {k: _lists(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_lists(v) for v in value]
    return value


@dataclass
class TableArtifact:
    """A result table plus provenance. Written as CSV + .meta.json."""
    name: str
    columns: Sequence[str]
    rows: List[Sequence[Any]]
    provenance: Dict[str, Any]

    def __post_init__(self):
        for key in ("config_hash", "seed", "git_describe"):
            if key not in self.provenance:
                raise ValidationError(f"provenance missing '{key}'", "provenance always populated")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValidationError(f"row {i} has {len(row)} cells, schema has {width}", "schema matches rows")

    def write(self, output_dir) -> Path:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        csv_path = output_dir / f"{self.name}.csv"
        with open(csv_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(self.columns)
            writer.writerows(self.rows)
        meta = {"name": self.name, "columns": list(self.columns), "n_rows": len(self.rows), **self.provenance}
        with open(output_dir / f"{self.name}.meta.json", "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")
        return csv_path
