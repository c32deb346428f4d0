"""Contribution-based token incentives."""

from .registry import (
    DEFAULT_CONSTANT,
    IncentiveConfig,
    IncentiveRegistry,
    TokenEvent,
    WorkReport,
)
from .report import TokenReport, TokenRow, TOKEN_CSV_HEADER

__all__ = [
    "DEFAULT_CONSTANT",
    "IncentiveConfig",
    "IncentiveRegistry",
    "TokenEvent",
    "WorkReport",
    "TokenReport",
    "TokenRow",
    "TOKEN_CSV_HEADER",
]
