"""
Stabiliser Taxonomy Module

Classifies a fiscal instrument from a vector of sufficiency predicates into
the finest class of the hierarchy

    S -> SM -> SF -> { SFnA -> {SFnAv, SFnAc},  SFA -> {SFAv, SFAc} }

Rule table (each class requires its parent plus the listed predicates):

    S      institutional device controlling change, reduces the gap between
           actual and desired change, counters the change, acts
           overproportionally to the change
    SM     controls the change of GDP, aims to reduce GDP volatility
    SF     formal normative action
    SFnA   formal explicit (discretionary) action
    SFnAv  controls revenue, linearly, through discrete action
    SFnAc  controls expenditure, linearly, through discrete action
    SFA    formal implicit (non-discretionary) action
    SFAv   controls revenue, non-linearly, through discrete action
    SFAc   controls expenditure, non-linearly, through discrete action

A descriptor that satisfies a genus but none of its species (no target,
wrong control shape, continuous action) stays at the genus.
"""

from collections.abc import Callable, Iterable
from enum import Enum

from pydantic import BaseModel, ConfigDict

from ..utils.errors import FiscalDomainError


class ActionMode(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class ControlShape(str, Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"


class ActionContinuity(str, Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class Target(str, Enum):
    REVENUE = "revenue"
    EXPENDITURE = "expenditure"
    NONE = "none"


class StabiliserClass(str, Enum):
    NOT_STABILISER = "NotStabiliser"
    S = "S"
    SM = "SM"
    SF = "SF"
    SFNA = "SFnA"
    SFNAV = "SFnAv"
    SFNAC = "SFnAc"
    SFA = "SFA"
    SFAV = "SFAv"
    SFAC = "SFAc"


_BOOL_TRUE = {"true", "1", "yes", "y", "on"}
_BOOL_FALSE = {"false", "0", "no", "n", "off"}


class StabiliserDescriptor(BaseModel):
    """Predicate vector describing one fiscal instrument."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    is_institutional_device: bool = False
    counters_change: bool = False
    overproportional: bool = False
    reduces_gap_actual_desired: bool = False
    controls_gdp_change: bool = False
    aims_reduce_gdp_volatility: bool = False
    formal_normative: bool = False
    action_mode: ActionMode = ActionMode.EXPLICIT
    control_shape: ControlShape = ControlShape.LINEAR
    action_continuity: ActionContinuity = ActionContinuity.DISCRETE
    target: Target = Target.NONE

    @classmethod
    def from_pairs(cls, pairs: Iterable[str]) -> "StabiliserDescriptor":
        """
        Build a descriptor from `key=value` strings.

        Boolean fields accept true/false, yes/no, 1/0, on/off. Fields that are
        not mentioned keep their defaults (booleans false).

        Raises:
            FiscalDomainError: Malformed pair, unknown key or bad value.
        """
        values: dict[str, object] = {}
        for pair in pairs:
            key, sep, raw = pair.partition("=")
            key = key.strip()
            raw = raw.strip()
            if not sep or not key:
                raise FiscalDomainError(f"expected key=value, got '{pair}'", field=key or None)
            if key not in cls.model_fields:
                raise FiscalDomainError(f"unknown descriptor field '{key}'", field=key)

            if cls.model_fields[key].annotation is bool:
                lowered = raw.lower()
                if lowered in _BOOL_TRUE:
                    values[key] = True
                elif lowered in _BOOL_FALSE:
                    values[key] = False
                else:
                    raise FiscalDomainError(f"'{raw}' is not a boolean for {key}", field=key)
            else:
                values[key] = raw.lower()

        try:
            return cls(**values)
        except ValueError as e:
            raise FiscalDomainError(f"invalid descriptor: {e}") from e


Predicate = Callable[[StabiliserDescriptor], bool]


def _is_stabiliser(d: StabiliserDescriptor) -> bool:
    return (
        d.is_institutional_device
        and d.reduces_gap_actual_desired
        and d.counters_change
        and d.overproportional
    )


def _is_macroeconomic(d: StabiliserDescriptor) -> bool:
    return d.controls_gdp_change and d.aims_reduce_gdp_volatility


def _species(target: Target, shape: ControlShape) -> Predicate:
    def check(d: StabiliserDescriptor) -> bool:
        return (
            d.target is target
            and d.control_shape is shape
            and d.action_continuity is ActionContinuity.DISCRETE
        )

    return check


# class -> (parent, own predicates)
_RULES: dict[StabiliserClass, tuple[StabiliserClass | None, Predicate]] = {
    StabiliserClass.S: (None, _is_stabiliser),
    StabiliserClass.SM: (StabiliserClass.S, _is_macroeconomic),
    StabiliserClass.SF: (StabiliserClass.SM, lambda d: d.formal_normative),
    StabiliserClass.SFNA: (StabiliserClass.SF, lambda d: d.action_mode is ActionMode.EXPLICIT),
    StabiliserClass.SFNAV: (
        StabiliserClass.SFNA,
        _species(Target.REVENUE, ControlShape.LINEAR),
    ),
    StabiliserClass.SFNAC: (
        StabiliserClass.SFNA,
        _species(Target.EXPENDITURE, ControlShape.LINEAR),
    ),
    StabiliserClass.SFA: (StabiliserClass.SF, lambda d: d.action_mode is ActionMode.IMPLICIT),
    StabiliserClass.SFAV: (
        StabiliserClass.SFA,
        _species(Target.REVENUE, ControlShape.NONLINEAR),
    ),
    StabiliserClass.SFAC: (
        StabiliserClass.SFA,
        _species(Target.EXPENDITURE, ControlShape.NONLINEAR),
    ),
}


def class_lineage(cls: StabiliserClass) -> list[StabiliserClass]:
    """Chain of classes from S down to cls (empty for NotStabiliser)."""
    if cls is StabiliserClass.NOT_STABILISER:
        return []

    chain: list[StabiliserClass] = []
    current: StabiliserClass | None = cls
    while current is not None:
        chain.append(current)
        current = _RULES[current][0]
    return list(reversed(chain))


def holds(cls: StabiliserClass, d: StabiliserDescriptor) -> bool:
    """Whether the full predicate conjunction of cls (including ancestors) holds for d."""
    if cls is StabiliserClass.NOT_STABILISER:
        return not _is_stabiliser(d)
    return all(_RULES[level][1](d) for level in class_lineage(cls))


def _children(cls: StabiliserClass) -> list[StabiliserClass]:
    return [child for child, (parent, _) in _RULES.items() if parent is cls]


def classify_stabiliser(d: StabiliserDescriptor) -> StabiliserClass:
    """Finest class whose predicate conjunction holds for the descriptor."""
    if not _is_stabiliser(d):
        return StabiliserClass.NOT_STABILISER

    current = StabiliserClass.S
    while True:
        matches = [child for child in _children(current) if _RULES[child][1](d)]
        if not matches:
            return current
        # Single-valued enum fields make sibling predicates mutually exclusive.
        current = matches[0]


# Qualitative traits of discretionary vs automatic instruments
_GENUS_PROFILES: dict[StabiliserClass, dict[str, object]] = {
    StabiliserClass.SFNA: {
        "discretionary": True,
        "normative": "explicit",
        "generates_delays": False,
        "activation": "on a signal about GDP volatility, or outside it",
    },
    StabiliserClass.SFA: {
        "discretionary": False,
        "normative": "implicit",
        "generates_delays": True,
        "activation": "automatically, on reaching a programmed level of GDP volatility",
    },
}


def class_profile(cls: StabiliserClass) -> dict[str, object]:
    """
    Describe a class: its lineage plus discretionary/automatic traits.

    Species add their target, control shape and action continuity.
    """
    lineage = class_lineage(cls)
    profile: dict[str, object] = {
        "class": cls.value,
        "lineage": [level.value for level in lineage],
    }

    for genus, traits in _GENUS_PROFILES.items():
        if genus in lineage:
            profile.update(traits)

    species = {
        StabiliserClass.SFNAV: (Target.REVENUE, ControlShape.LINEAR),
        StabiliserClass.SFNAC: (Target.EXPENDITURE, ControlShape.LINEAR),
        StabiliserClass.SFAV: (Target.REVENUE, ControlShape.NONLINEAR),
        StabiliserClass.SFAC: (Target.EXPENDITURE, ControlShape.NONLINEAR),
    }
    if cls in species:
        target, shape = species[cls]
        profile["target"] = target.value
        profile["control_shape"] = shape.value
        profile["action_continuity"] = ActionContinuity.DISCRETE.value

    return profile
