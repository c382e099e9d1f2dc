"""
Table builders for the scenario runner.

Each builder takes a validated RunConfig and returns a TableArtifact whose
provenance carries the config hash, seed and git describe string. Cells that a
law cannot produce (collapsed approximation, Gaussian theta with the Laplace
approximation, points past a support edge) are written as empty strings.
"""
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from classes.errors import DegenerateScale, OutOfSupport, UnsupportedFamily, ValidationError
from classes.link import GainDistribution, LinkGeometry
from classes.mobility import MobilityMode
from classes.orientation import Family
from classes.run_config import RunConfig, Scenario, TableArtifact
from preprocessing.ingest_orientation_csv import ingest_orientation_csv
from utils import channel, incidence, mobility
from utils.config import hash_config
from utils.general import git_describe
from utils.orientation_stats import fit_mle

COSPSI_COLUMNS = ("x_u", "y_u", "a", "b", "tau", "pdf_exact", "cdf_exact", "pdf_approx", "cdf_approx")
GAIN_COLUMNS = ("x_u", "y_u", "h", "pdf_exact", "cdf_exact", "pdf_approx", "cdf_approx")
SNR_COLUMNS = ("x_u", "y_u", "snr", "snr_db", "pdf_exact", "cdf_exact", "pdf_approx", "cdf_approx")
FIT_COLUMNS = ("series", "family", "mu_deg", "sigma_deg", "ksd", "skewness", "kurtosis", "n", "selected")

_UNAVAILABLE = (DegenerateScale, OutOfSupport, UnsupportedFamily)


def provenance(cfg: RunConfig) -> Dict[str, Any]:
    return {
        "config_hash": hash_config(cfg),
        "seed": cfg.seed,
        "git_describe": git_describe(),
        "scenario": cfg.scenario.value,
    }


def _cell(fn: Callable[[float], Any], x: float):
    try:
        value = fn(x)
    except _UNAVAILABLE:
        return ""
    return float(value)


def _approx_or_none(g: LinkGeometry, cfg: RunConfig, model) -> Optional[GainDistribution]:
    if model.family is not Family.LAPLACE:
        return None
    return channel.gain_distribution(g, cfg.channel.to_params(), model, approximate=True)


# ---------------------------------------------------------------------------
# cos(psi)
# ---------------------------------------------------------------------------

def tabulate_cospsi(cfg: RunConfig) -> TableArtifact:
    """Exact and approximate cos(psi) laws on a tau grid for every configured UE."""
    model = cfg.sitting.to_model()
    ceiling = cfg.tabulate.density_ceiling
    rows: List[list] = []
    for g in cfg.geometry.links():
        coeffs = incidence.coefficients(g)
        exact = incidence.cos_psi_distribution(coeffs, model)
        approx = None
        if model.family is Family.LAPLACE:
            approx = incidence.cos_psi_distribution(coeffs, model, approximate=True)
        lo, hi = exact.support
        # the density is unbounded at tau = r; stay inside the open support
        pad = 1e-6 * (hi - lo)
        for tau in np.linspace(lo + pad, hi - pad, cfg.tabulate.n_tau):
            row = [g.ue[0], g.ue[1], coeffs.a, coeffs.b, float(tau),
                   min(incidence.exact_density(exact, tau), ceiling), incidence.cdf(exact, tau)]
            if approx is None:
                row += ["", ""]
            else:
                row += [_cell(lambda t: incidence.density(approx, t), tau), _cell(lambda t: incidence.cdf(approx, t), tau)]
            rows.append(row)
    return TableArtifact("cospsi", COSPSI_COLUMNS, rows, provenance(cfg))


# ---------------------------------------------------------------------------
# Gain and SNR
# ---------------------------------------------------------------------------

def _gain_grid(dist: GainDistribution, n: int) -> np.ndarray:
    """n points on [0, h_max), dense enough to show the Dirac step at h = 0."""
    if dist.h_max <= 0.0:
        return np.zeros(1)
    return np.linspace(0.0, dist.h_max, n + 1)[:-1]


def tabulate_gain(cfg: RunConfig) -> TableArtifact:
    params = cfg.channel.to_params()
    model = cfg.sitting.to_model()
    rows: List[list] = []
    for g in cfg.geometry.links():
        exact = channel.gain_distribution(g, params, model, approximate=False)
        approx = _approx_or_none(g, cfg, model)
        for h in _gain_grid(exact, cfg.tabulate.n_gain):
            h = float(h)
            row = [g.ue[0], g.ue[1], h, _cell(lambda x: channel.gain_pdf(exact, x), h), channel.gain_cdf(exact, h)]
            if approx is None:
                row += ["", ""]
            else:
                row += [
                    _cell(lambda x: channel.gain_pdf(approx, x), h),
                    _cell(lambda x: channel.gain_cdf(approx, x), h),
                ]
            rows.append(row)
    return TableArtifact("gain", GAIN_COLUMNS, rows, provenance(cfg))


def tabulate_snr(cfg: RunConfig) -> TableArtifact:
    params = cfg.channel.to_params()
    model = cfg.sitting.to_model()
    rows: List[list] = []
    for g in cfg.geometry.links():
        exact = channel.gain_distribution(g, params, model, approximate=False)
        approx = _approx_or_none(g, cfg, model)
        _, s_max = channel.snr_support(exact, params)
        if s_max <= 0.0:
            continue
        # open interval: no log of zero, no divergent density at s_max
        for s in np.linspace(0.0, s_max, cfg.tabulate.n_gain + 2)[1:-1]:
            s = float(s)
            row = [
                g.ue[0], g.ue[1], s, 10.0 * math.log10(s),
                _cell(lambda x: channel.snr_pdf(exact, params, x), s),
                _cell(lambda x: channel.snr_cdf(exact, params, x), s),
            ]
            if approx is None:
                row += ["", ""]
            else:
                row += [
                    _cell(lambda x: channel.snr_pdf(approx, params, x), s),
                    _cell(lambda x: channel.snr_cdf(approx, params, x), s),
                ]
            rows.append(row)
    return TableArtifact("snr", SNR_COLUMNS, rows, provenance(cfg))


# ---------------------------------------------------------------------------
# ORWP sweep and dataset fit
# ---------------------------------------------------------------------------

def orwp_sweep_table(cfg: RunConfig, show_progress: bool = True) -> TableArtifact:
    walking = cfg.walking.to_model()
    base = cfg.orwp.base_config(walking, cfg.seed)
    results = mobility.handover_sweep(
        base,
        cfg.orwp.room_lengths,
        cfg.orwp.speeds,
        [MobilityMode(mode) for mode in cfg.orwp.modes],
        cfg.orwp.n_runs,
        params=cfg.channel.to_params(),
        show_progress=show_progress,
    )
    return TableArtifact("orwp_sweep", mobility.SWEEP_COLUMNS, [r.row() for r in results], provenance(cfg))


def fit_dataset_table(cfg: RunConfig) -> TableArtifact:
    """Both families fitted to the theta series of cfg.dataset; the lower-KSD fit is marked selected."""
    if not cfg.dataset:
        raise ValidationError("fit_dataset needs a dataset path", "dataset set for fit_dataset")
    dataset = ingest_orientation_csv(Path(cfg.dataset))

    reports = [fit_mle(dataset.theta, family) for family in Family]
    best = min(reports, key=lambda r: r.ksd)
    rows = [
        [
            "theta",
            r.model.family.value,
            math.degrees(r.model.mu_theta),
            math.degrees(r.model.sigma),
            r.ksd,
            r.skewness,
            r.kurtosis,
            r.n,
            r is best,
        ]
        for r in reports
    ]
    return TableArtifact("fit_dataset", FIT_COLUMNS, rows, provenance(cfg))


BUILDERS = {
    Scenario.FIT_DATASET: fit_dataset_table,
    Scenario.TABULATE_COSPSI: tabulate_cospsi,
    Scenario.TABULATE_GAIN: tabulate_gain,
    Scenario.TABULATE_SNR: tabulate_snr,
    Scenario.ORWP_SWEEP: orwp_sweep_table,
}
