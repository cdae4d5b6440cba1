"""fsc: feature models and extended finite automata compiled to a composed
discrete-event model, with maximally permissive supervisory controller
synthesis that stays correct under run-time feature reconfiguration."""

from fsc.errors import (BudgetError, EvalError, FscError, LexError, ParseError,
                        ResolveError, StepError, SynthesisEmpty)
from fsc.features import (Attribute, Feature, FeatureConstraint, FeatureModel,
                          ReconfigMode, Strictness, SwapGroup, compile_feature,
                          compile_feature_model, compile_swap, constraint_formula,
                          count_valid_configurations, lower_to_text)
from fsc.lang.parser import parse, parse_expression
from fsc.lang.printer import format_expr, format_spec
from fsc.lang.resolver import resolve
from fsc.semantics import (CompiledModel, TransitionSystem, explore,
                           initial_states)
from fsc.synth import (ControlProblem, Supervisor, SynthesisReport,
                       maximality_probe, normalize, supervisor_text, synthesize,
                       verify_controlled)

__version__ = "0.1.0"
