"""Half-up decimal rounding on exact rationals.

Percentages are kept as exact fractions until the reporting boundary, then
rounded half up (not banker's rounding: 28.125% must report as 28.13%).
"""

from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction


def round_half_up(value: Fraction, decimals: int = 2) -> float:
    """Round an exact rational half-up to the given number of decimals."""
    with localcontext() as ctx:
        ctx.prec = 50
        d = Decimal(value.numerator) / Decimal(value.denominator)
        q = d.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP)
    return float(q)


def pct(numerator: int, denominator: int, decimals: int = 2) -> float:
    """100 * numerator / denominator, rounded half up. 0/0 reports 0.0."""
    if denominator == 0:
        return 0.0
    return round_half_up(Fraction(100 * numerator, denominator), decimals)
