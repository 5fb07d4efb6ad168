"""Exact rational linear feasibility via phase-1 simplex.

Small instances only (tens of rows/columns): decides whether
``{x >= 0 : A x = b}`` is nonempty with `fractions.Fraction` arithmetic,
so symbolic region comparisons never depend on floating point.  Bland's
rule guarantees termination.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["feasible"]


def feasible(A: list[list[Fraction]], b: list[Fraction]) -> bool:
    """True iff A x = b has a solution with x >= 0 (exact arithmetic)."""
    m = len(A)
    if m == 0:
        return True
    n = len(A[0]) if A else 0
    # Make every rhs nonnegative, then add one artificial column per row.
    rows = []
    rhs = []
    for i in range(m):
        if b[i] < 0:
            rows.append([-a for a in A[i]])
            rhs.append(-b[i])
        else:
            rows.append(list(A[i]))
            rhs.append(b[i])
    total = n + m
    tableau = []
    for i in range(m):
        row = rows[i] + [Fraction(0)] * m
        row[n + i] = Fraction(1)
        row.append(rhs[i])
        tableau.append(row)
    # Objective: minimize sum of artificials; start from z-row = -sum(rows).
    z = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            z[j] -= tableau[i][j]
    for i in range(m):
        z[n + i] = Fraction(0)
    basis = [n + i for i in range(m)]

    while True:
        # Bland: entering column = lowest index with negative reduced cost.
        enter = -1
        for j in range(total):
            if z[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        # Ratio test, Bland tie-break on basis index.
        leave = -1
        best = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][total] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            # Unbounded phase-1 objective cannot happen (bounded below by 0);
            # treat defensively as infeasible evidence of a malformed system.
            raise ArithmeticError("phase-1 simplex unbounded")
        piv = tableau[leave][enter]
        tableau[leave] = [v / piv for v in tableau[leave]]
        for i in range(m):
            if i != leave and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [v - f * w for v, w in zip(tableau[i], tableau[leave])]
        if z[enter] != 0:
            f = z[enter]
            z = [v - f * w for v, w in zip(z, tableau[leave])]
        basis[leave] = enter

    # Feasible iff the artificial objective reaches 0.
    return -z[total] == 0
