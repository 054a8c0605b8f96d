"""Brute-force reference implementations.

Everything here is a direct transcription of a definition: loop over all
residues, no bitsets, no CRT, no resultants.  Deliberately slow and boring;
the tests trust these and check the fast paths against them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .polyarith import IntPoly, critical_diffs_mod

MAX_BRUTE_MODULUS = 10**6


def _eval_mod(f: IntPoly, x: int, m: int) -> int:
    # term-by-term on purpose; shares nothing with the Horner paths
    return sum(c * pow(x, i, m) for i, c in enumerate(f.coeffs)) % m


def brute_image(f: IntPoly, m: int) -> list[int]:
    """Sorted image of f modulo m by evaluating every residue."""
    if m > MAX_BRUTE_MODULUS:
        raise InvalidInputError(f"brute-force modulus {m} exceeds {MAX_BRUTE_MODULUS}")
    return sorted({_eval_mod(f, x, m) for x in range(m)})


def brute_joint_count(f: IntPoly, m: int, offsets) -> int:
    """Count of image elements t with every t + h also in the image."""
    image = set(brute_image(f, m))
    offsets = list(offsets)
    return sum(
        1
        for t in image
        if all((t + h) % m in image for h in offsets)
    )


@dataclass(frozen=True)
class OracleReport:
    description: str
    expected: object
    actual: object
    match: bool


def critical_diffs_check(f: IntPoly, p: int) -> OracleReport:
    """Compare the resultant-based critical-value difference set with a scan
    over rational critical points.  The scan only sees critical points inside
    F_p itself, so the check is that its differences form a subset; the
    resultant path may legitimately contain more (values from extensions)."""
    if p > 200:
        raise InvalidInputError("cross-check is limited to p <= 200")
    if p <= f.degree:
        raise InvalidInputError("cross-check needs p > deg f")
    deriv = [i * c % p for i, c in enumerate(f.coeffs) if i]
    crit = [x for x in range(p)
            if sum(c * pow(x, i, p) for i, c in enumerate(deriv)) % p == 0]
    values = {_eval_mod(f, x, p) for x in crit}
    diffs = sorted({(a - b) % p for a in values for b in values})
    full = critical_diffs_mod(f, p)
    match = set(diffs) <= set(full.elements)
    return OracleReport(
        description=f"rational critical-value differences of {f} mod {p} "
                    "against the resultant-based set",
        expected=diffs,
        actual=list(full.elements),
        match=match,
    )
