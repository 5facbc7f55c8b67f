"""Exact rational number handling.

Every numeric quantity in this package (prices, quantities, arc lengths,
cycle means, epsilon thresholds, lambda values) is an exact rational.
Verdicts hinge on sign tests of cycle sums, so floating point is never
used on the decision path; it appears only in cosmetic decimal renderings
of results.

`fractions.Fraction` already provides canonical reduced form with a
positive denominator and exact comparisons, so it is the rational type.
This module adds the parsing and formatting conventions used at the
package boundary: decimal strings on the wire, ``num/den`` strings in
exports, and a fixed-precision decimal approximation for human eyes.
"""

from __future__ import annotations

from fractions import Fraction

Rational = Fraction


class RationalParseError(ValueError):
    """A string could not be read as an exact rational."""


def parse_rational(text: str) -> Fraction:
    """Parse a decimal string ("2", "-1.5") or a ratio string ("3/2").

    Scientific notation is rejected: exponents invite copy/paste of float
    reprs, which defeats the exactness contract.
    """
    if not isinstance(text, str):
        raise RationalParseError(f"expected a string, got {type(text).__name__}")
    s = text.strip()
    if not s or "e" in s.lower():
        raise RationalParseError(f"not an exact rational: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise RationalParseError(f"not an exact rational: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Render exactly: ``"3/2"``, or ``"2"`` when the denominator is 1."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def wire_string(q: Fraction) -> str:
    """Render for the wire: an exact decimal when one exists, else ``num/den``.

    A rational has a finite decimal expansion exactly when its reduced
    denominator is of the form 2^a * 5^b; those render as "1.5", "0.04",
    "-3".  Anything else (e.g. 1/3) falls back to the exact ratio form,
    which `parse_rational` also accepts.
    """
    d = q.denominator
    e2 = e5 = 0
    while d % 2 == 0:
        d //= 2
        e2 += 1
    while d % 5 == 0:
        d //= 5
        e5 += 1
    if d != 1:
        return format_rational(q)
    places = max(e2, e5)
    if places == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * 10**places // q.denominator
    sign = "-" if q.numerator < 0 else ""
    digits = str(scaled).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def decimal_approx(q: Fraction, places: int = 9) -> str:
    """Fixed-point decimal approximation, round-half-even, for display only.

    Trailing zeros are trimmed so exact decimals render naturally
    ("-1", "0.5").
    """
    scaled = q * 10**places
    n = scaled.numerator
    d = scaled.denominator
    quot, rem = divmod(n, d)
    # round half to even on the scaled integer
    if 2 * rem > d or (2 * rem == d and quot % 2):
        quot += 1
    sign = "-" if quot < 0 else ""
    digits = str(abs(quot)).rjust(places + 1, "0")
    whole, frac = digits[:-places], digits[-places:]
    frac = frac.rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"
