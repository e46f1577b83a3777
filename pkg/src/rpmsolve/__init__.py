"""Probabilistic abduction and execution solver for Raven-style matrices."""

from .abduction import AxisPosterior, RulePosterior, abduce, abduce_axis, select_rules
from .domain import (
    AXES, CONFIG_NAMES, CONFIGURATIONS, DEFAULT_DOMAIN, AttributeDomain, Axis, Kind, Rule,
    catalog_for_axis, get_configuration, rule_forward, rule_holds_row, rule_precondition,
)
from .errors import (
    ContractViolation, DegenerateBeliefError, ExecutionInfeasibleError, GenerationError,
    InstanceFormatError, PreconditionError, RPMError,
)
from .execution import PredictedScene, execute_axis, execute_scene
from .generator import PuzzleInstance, generate, make_distractors
from .perception import NoiseModel, ObjectBelief, corrupt
from .pipeline import SolveResult, solve
from .render import PanelRaster, RenderOptions, render_panel, render_svg, sample_and_render
from .scene import ComponentBelief, PanelBelief, infer_component, infer_panel
from .selection import AnswerReport, jsd, score_candidates
from .symbols import ComponentSymbol, PanelSymbol

__version__ = "0.1.0"
