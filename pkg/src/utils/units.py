"""Unit Parsing

Converts human-written data rates and sizes ("100 Mb/s", "2Gbps", "50 Mb")
into canonical bit/s and bits, and formats rates for reports.

Usage:
    from src.utils.units import parse_rate, parse_size

    parse_rate("100 Mb/s")   # 100000000.0
    parse_size("50Mb")       # 50000000.0
"""

import math
import re
from typing import Union

from src.constants import UNIT_MULTIPLIERS, REPORT_RATE_DECIMALS
from src.utils.validation import ConfigError

Number = Union[int, float]


class UnitParser:
    """Recognizes quantity strings by pattern table."""

    # Order matters: rate patterns carry a per-second suffix, size patterns do not
    QUANTITY_KINDS = {
        "rate": {
            "patterns": [
                r"^(?P<value>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(?P<prefix>[kKmMgGtT]?)b(?:it)?s?/s$",
                r"^(?P<value>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(?P<prefix>[kKmMgGtT]?)bps$",
            ],
            "unit": "bit/s",
        },
        "size": {
            "patterns": [
                r"^(?P<value>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(?P<prefix>[kKmMgGtT]?)b(?:it)?s?$",
            ],
            "unit": "bit",
        },
    }

    @classmethod
    def parse(cls, value: Union[Number, str], kind: str) -> float:
        """
        Convert a number or suffixed string to the canonical unit of ``kind``.

        Args:
            value: Plain number (already canonical) or string such as "100 Mb/s"
            kind: 'rate' or 'size'

        Returns:
            Quantity in bit/s (rate) or bits (size)

        Raises:
            ConfigError: If the string matches no pattern of that kind
        """
        if isinstance(value, bool):
            raise ConfigError(f"Expected a {kind}, got boolean {value!r}")
        if isinstance(value, (int, float)):
            number = float(value)
            if not math.isfinite(number):
                raise ConfigError(f"{kind} must be finite, got {value!r}")
            return number
        if not isinstance(value, str):
            raise ConfigError(f"Expected a {kind}, got {type(value).__name__}")

        text = value.strip()
        try:
            number = float(text)
        except ValueError:
            pass
        else:
            if not math.isfinite(number):
                raise ConfigError(f"{kind} must be finite, got {value!r}")
            return number

        for pattern in cls.QUANTITY_KINDS[kind]["patterns"]:
            match = re.match(pattern, text)
            if match:
                multiplier = UNIT_MULTIPLIERS[match.group("prefix").lower()]
                return float(match.group("value")) * multiplier

        raise ConfigError(
            f"Cannot parse {kind} {value!r} "
            f"(expected a number in {cls.QUANTITY_KINDS[kind]['unit']} or a suffixed value)"
        )


def parse_rate(value: Union[Number, str]) -> float:
    """Rate in bit/s from a number or a string like '100 Mb/s', '2Gbps'."""
    return UnitParser.parse(value, "rate")


def parse_size(value: Union[Number, str]) -> float:
    """Size in bits from a number or a string like '50 Mb'."""
    return UnitParser.parse(value, "size")


def to_mbps(rate: float) -> float:
    """Rate in Mb/s rounded for reports."""
    return round(rate / 1e6, REPORT_RATE_DECIMALS)


def format_rate(rate: float) -> str:
    """Human-readable rate for console tables."""
    if rate >= 1e9:
        return f"{rate / 1e9:.2f} Gb/s"
    if rate >= 1e6:
        return f"{rate / 1e6:.1f} Mb/s"
    if rate >= 1e3:
        return f"{rate / 1e3:.1f} kb/s"
    return f"{rate:.0f} b/s"
