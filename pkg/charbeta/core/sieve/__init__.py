from .basis import (
    build_basis,
    expand_characteristics,
    leverage_h,
    project,
    rate_condition_report,
    standardize_columns,
)
from .models import CharacteristicPanel, ProjectionOperator, SieveBasisSpec

__all__ = [
    "CharacteristicPanel",
    "SieveBasisSpec",
    "ProjectionOperator",
    "build_basis",
    "expand_characteristics",
    "standardize_columns",
    "project",
    "leverage_h",
    "rate_condition_report",
]
