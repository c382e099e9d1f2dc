#!/usr/bin/env python3
"""
Ingest a device-orientation log and fit the polar-angle models.

The CSV must carry a header with t_seconds, alpha_deg, beta_deg, gamma_deg.
Angles are converted to radians; theta is derived from pitch and roll.

Usage:
    python preprocessing/ingest_orientation_csv.py --input data/session01.csv
    python preprocessing/ingest_orientation_csv.py --input data/session01.csv --output results/fit.json
"""
import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from classes.errors import OrientationModelError, ParseError
from classes.orientation import Family, SampleSeries
from utils.orientation_stats import fit_mle
from utils.rotation import polar_angles

REQUIRED_COLUMNS = ("t_seconds", "alpha_deg", "beta_deg", "gamma_deg")


@dataclass(frozen=True)
class OrientationDataset:
    alpha: SampleSeries
    beta: SampleSeries
    gamma: SampleSeries
    theta: SampleSeries

    def __len__(self):
        return len(self.theta)


def ingest_orientation_csv(path) -> OrientationDataset:
    path = Path(path)
    try:
        f = open(path, newline="", encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot open {path}: {e}")

    with f:
        reader = csv.DictReader(f)
        header = [h.strip() for h in (reader.fieldnames or [])]
        if not header:
            raise ParseError(f"{path} has no header row", line=1)
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise ParseError(f"missing column '{column}'", line=1, field=column)
        reader.fieldnames = header

        columns = {name: [] for name in REQUIRED_COLUMNS}
        for row in reader:
            for name in REQUIRED_COLUMNS:
                raw = (row.get(name) or "").strip()
                try:
                    value = float(raw)
                except ValueError:
                    raise ParseError(f"not a number: {raw!r}", line=reader.line_num, field=name)
                if not math.isfinite(value):
                    raise ParseError(f"non-finite value {raw!r}", line=reader.line_num, field=name)
                columns[name].append(value)

    if not columns["t_seconds"]:
        raise ParseError(f"{path} has a header but no data rows", line=2)

    t = np.asarray(columns["t_seconds"])
    alpha = np.radians(columns["alpha_deg"])
    beta = np.radians(columns["beta_deg"])
    gamma = np.radians(columns["gamma_deg"])
    return OrientationDataset(
        alpha=SampleSeries(alpha, t, name="alpha"),
        beta=SampleSeries(beta, t, name="beta"),
        gamma=SampleSeries(gamma, t, name="gamma"),
        theta=SampleSeries(polar_angles(beta, gamma), t, name="theta"),
    )


def fit_summary(dataset: OrientationDataset) -> dict:
    """Fit both families to theta; keys are family names."""
    summary = {"n": len(dataset)}
    for family in Family:
        report = fit_mle(dataset.theta, family)
        summary[family.value] = {
            "mu_deg": math.degrees(report.model.mu_theta),
            "sigma_deg": math.degrees(report.model.sigma),
            "ksd": report.ksd,
            "skewness": report.skewness,
            "kurtosis": report.kurtosis,
        }
    return summary


def main():
    parser = argparse.ArgumentParser(description="Ingest an orientation CSV and fit theta models.")
    parser.add_argument("--input", type=str, required=True, help="CSV with t_seconds,alpha_deg,beta_deg,gamma_deg")
    parser.add_argument("--output", type=str, default=None, help="Optional JSON file for the fit summary")
    args = parser.parse_args()

    try:
        dataset = ingest_orientation_csv(args.input)
        print(f"✓ Loaded {len(dataset)} samples from {args.input}")
        summary = fit_summary(dataset)
    except OrientationModelError as e:
        print(f"✗ {e}")
        sys.exit(1)

    for family in Family:
        s = summary[family.value]
        print(f"  {family.value:9s} mu={s['mu_deg']:.2f}°  sigma={s['sigma_deg']:.2f}°  KSD={s['ksd']:.4f}")

    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
        print(f"✓ Saved fit summary to {out}")


if __name__ == "__main__":
    main()
