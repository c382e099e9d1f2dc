"""
Value types shared by the numerical modules and the scenario runner.
"""

from .errors import (
    ConditionUnmet,
    DegenerateGeometry,
    DegeneratePose,
    DegenerateScale,
    DegenerateVariance,
    EmptySeries,
    InvalidConfig,
    InvalidTiming,
    NonMonotonicTimestamps,
    OrientationModelError,
    OutOfSupport,
    ParseError,
    UnsupportedFamily,
    ValidationError,
)
from .orientation import DeviceMode, EulerAngles, Family, FitReport, OrientationModel, SampleSeries, UnitVector3
from .link import ChannelParams, CosPsiKind, IncidenceCoeffs, LinkGeometry
from .mobility import Ar1Params, MobilityMode, OrwpConfig, Trajectory

__all__ = [
    'ConditionUnmet',
    'DegenerateGeometry',
    'DegeneratePose',
    'DegenerateScale',
    'DegenerateVariance',
    'EmptySeries',
    'InvalidConfig',
    'InvalidTiming',
    'NonMonotonicTimestamps',
    'OrientationModelError',
    'OutOfSupport',
    'ParseError',
    'UnsupportedFamily',
    'ValidationError',
    'DeviceMode',
    'EulerAngles',
    'Family',
    'FitReport',
    'OrientationModel',
    'SampleSeries',
    'UnitVector3',
    'ChannelParams',
    'CosPsiKind',
    'IncidenceCoeffs',
    'LinkGeometry',
    'Ar1Params',
    'MobilityMode',
    'OrwpConfig',
    'Trajectory',
]
