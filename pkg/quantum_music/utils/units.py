"""Power and angle parsing utilities."""

import math
import re
from typing import Union

PowerLike = Union[str, float, int]

_DBM_PATTERN = re.compile(r'^([+-]?\d+(?:\.\d*)?(?:e[+-]?\d+)?)\s*dbm$')
_LINEAR_PATTERN = re.compile(r'^([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:e[+-]?\d+)?)\s*(?:w|lin)?$')


def dbm_to_linear(dbm: float) -> float:
    """Convert a dBm value to the normalized linear power domain.

    The simulator follows the convention -191 dBm -> 10**-19.1, i.e. the dBm
    value divided by ten is used directly as the decimal exponent.
    """
    return float(10.0 ** (dbm / 10.0))


def linear_to_dbm(power: float) -> float:
    """Inverse of :func:`dbm_to_linear`."""
    if power <= 0:
        return -math.inf
    return 10.0 * math.log10(power)


def parse_power(value: PowerLike) -> float:
    """Parse a power given as a number or a suffix-tagged string.

    Supports:
    - plain numbers: 1e-18, 0.5
    - dBm: "-191dBm", "-176 dBm"
    - explicit linear: "1e-18lin", "2W"

    Args:
        value: The power to parse.

    Returns:
        The power in the linear normalized domain.

    Raises:
        ValueError: If the value cannot be parsed or is negative.
    """
    if isinstance(value, bool):
        raise ValueError(f'Could not parse power: {value!r}')

    if isinstance(value, (int, float)):
        power = float(value)
    else:
        text = value.strip().lower()
        match = _DBM_PATTERN.match(text)
        if match:
            power = dbm_to_linear(float(match.group(1)))
        else:
            match = _LINEAR_PATTERN.match(text)
            if not match:
                raise ValueError(f"Could not parse power: '{value}'")
            power = float(match.group(1))

    if not math.isfinite(power) or power < 0:
        raise ValueError(f'Power must be finite and non-negative, got {value!r}')
    return power


def parse_power_list(text: str) -> list[float]:
    """Parse a comma separated list of powers (e.g. "-200dBm,-190dBm")."""
    items = [item for item in text.split(',') if item.strip()]
    if not items:
        raise ValueError('Expected at least one power value')
    return [parse_power(item) for item in items]


def parse_count_list(text: str) -> list[int]:
    """Parse a comma separated list of positive integers, with a-b ranges."""
    counts: list[int] = []
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        match = re.match(r'^(\d+)\s*-\s*(\d+)$', item)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if hi < lo:
                raise ValueError(f"Empty range: '{item}'")
            counts.extend(range(lo, hi + 1))
        elif item.isdigit():
            counts.append(int(item))
        else:
            raise ValueError(f"Could not parse count: '{item}'")
    if not counts or min(counts) < 1:
        raise ValueError(f"Expected positive counts, got '{text}'")
    return counts


def format_power(power: float) -> str:
    """Format a linear power for display, with its dBm equivalent."""
    if power <= 0:
        return '0'
    return f'{power:.3g} ({linear_to_dbm(power):.1f} dBm)'
