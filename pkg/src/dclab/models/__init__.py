"""Value types of the laboratory."""
from dclab.models.arcs import ArcGerm, ProjectivePair
from dclab.models.flow import Census, CensusDiagnostics, FlowState, Trajectory
from dclab.models.forms import PartialFractionForm, PoleTerm, RelativeOneForm
from dclab.models.geometry import LoopKind, Punctures
from dclab.models.melnikov import (
    BifurcationPair,
    ComponentTag,
    IntegralEstimate,
    MonodromyClass,
    ZeroCount,
)
from dclab.models.parameters import Center, Parameters
from dclab.models.paths import CircleArc, LineSegment, PathLoop
from dclab.models.run_config import Command, HGrid, OutputFormat, RunConfig

__all__ = [
    'ArcGerm',
    'BifurcationPair',
    'Census',
    'CensusDiagnostics',
    'Center',
    'CircleArc',
    'Command',
    'ComponentTag',
    'FlowState',
    'HGrid',
    'IntegralEstimate',
    'LineSegment',
    'LoopKind',
    'MonodromyClass',
    'OutputFormat',
    'Parameters',
    'PartialFractionForm',
    'PathLoop',
    'PoleTerm',
    'Punctures',
    'RelativeOneForm',
    'RunConfig',
    'Trajectory',
    'ZeroCount',
]
