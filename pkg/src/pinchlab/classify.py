"""Radon-Hurwitz numbers, the menu of possible invariant structures, and verdicts.

Writing n = (2a+1) 2^b with b = c + 4d, 0 <= c <= 3, the Radon-Hurwitz number
is rho(n) = 2^c + 8d; rho(n) - 1 is the maximal number of pointwise linearly
independent vector fields on S^{n-1} and constrains the rank of invariant
projectors.

The structure menu encodes, per dimension, which flow-invariant objects could
obstruct ergodicity, each annotated with the pinching threshold that rules it
out.  Verdicts are one-directional: pinching above every threshold certifies
ergodicity, anything else is inconclusive (never "non-ergodic").
"""

from __future__ import annotations

from dataclasses import dataclass

from . import thresholds

__all__ = [
    "StructureCase",
    "Verdict",
    "radon_hurwitz",
    "structure_menu",
    "verdict",
]


def radon_hurwitz(n: int) -> int:
    """rho(n) = 2^c + 8d where n = odd * 2^(c+4d), 0 <= c <= 3."""
    if n < 1:
        raise ValueError("need n >= 1")
    b = 0
    while n % 2 == 0:
        n //= 2
        b += 1
    c, d = b % 4, b // 4
    return 2 ** c + 8 * d


@dataclass
class StructureCase:
    """One possible invariant structure with the pinching threshold excluding it."""

    label: str
    threshold: float
    max_rank: int | None = None   # even projectors only
    min_degree: int | None = None  # the n = 134 bracket only
    note: str = ""


def _projector_case(n: int) -> StructureCase:
    max_rank = min(radon_hurwitz(n) - 1, (n - 2) // 2)
    if max_rank < 1:
        raise AssertionError(f"projector rank bound < 1 at n={n}")
    return StructureCase(
        label="EvenProjector",
        threshold=thresholds.delta_sym2(n),
        max_rank=max_rank,
        note=f"even-degree orthogonal projector of rank 1..{max_rank} on the normal bundle",
    )


def structure_menu(n: int) -> list[StructureCase]:
    """Invariant structures that could exist at dimension n, with thresholds."""
    if n < 3:
        raise ValueError("need n >= 3")
    if n == 7:
        return [StructureCase(
            label="ComplexStructure7",
            threshold=thresholds.delta_master(7)[0],
            note="odd invariant almost-complex structure on the normal bundle",
        )]
    if n == 8:
        g2 = max(thresholds.delta1(8, 3, 3), thresholds.delta2(8, 3, 3))
        return [
            StructureCase(label="G2Structure8", threshold=g2,
                          note="odd invariant 3-form with exceptional stabilizer"),
            _projector_case(8),
        ]
    if n == 134:
        bracket = max(thresholds.delta1(134, 3, 3), thresholds.delta2(134, 3, 3))
        return [
            StructureCase(label="LieBracket134", threshold=bracket, min_degree=3,
                          note="odd invariant Lie bracket 3-form, degree >= 3"),
            StructureCase(label="OddVectorField", threshold=thresholds.delta_lambda1(134),
                          note="odd invariant unit vector field"),
        ]
    if n % 2 == 1:
        return [StructureCase(label="NoneOddDim", threshold=0.0,
                              note="no structure-group reduction exists; ergodic unconditionally")]
    if n == 4 or n % 4 == 2:
        return [StructureCase(label="OddVectorField", threshold=thresholds.delta_lambda1(n),
                              note="odd invariant unit vector field")]
    return [_projector_case(n)]


@dataclass
class Verdict:
    """Outcome of the pinching test at (n, delta)."""

    status: str                # "ergodic" | "inconclusive"
    n: int
    delta: float
    cases: list
    notes: list

    @property
    def ergodic(self) -> bool:
        return self.status == "ergodic"


def verdict(n: int, delta: float) -> Verdict:
    """Ergodic iff delta exceeds the threshold of every case in the menu.

    The criterion is sufficient only, so the negative outcome is
    "inconclusive".  For even n the verdict annotates the conjectural 1/4
    context when delta > 1/4.
    """
    if n < 3 or not (0 < delta <= 1):
        raise ValueError("need n >= 3 and delta in (0, 1]")
    cases = structure_menu(n)
    notes = []
    if n % 2 == 0 and delta > 0.25:
        notes.append("above the conjectural 1/4 threshold for even dimensions")
    if all(delta > case.threshold for case in cases):
        return Verdict(status="ergodic", n=n, delta=delta, cases=cases, notes=notes)
    return Verdict(status="inconclusive", n=n, delta=delta, cases=cases, notes=notes)
