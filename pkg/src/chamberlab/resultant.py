"""Sylvester resultants with fraction-free determinant evaluation.

The Sylvester matrix is built from formal degrees (the supplied coefficient
lists fix them), so vanishing leading coefficients are kept as zero entries.
Row layout puts the second polynomial's coefficient block first, which fixes
the sign convention: resultant of (t - x, t - y) at formal degrees (1, 1) is
y - x.
"""

from __future__ import annotations

from .poly import SpatialPoly


def sylvester_matrix(pa: list[SpatialPoly], pc: list[SpatialPoly]) -> list[list[SpatialPoly]]:
    """8x8-style Sylvester matrix for coefficient lists given low-to-high.

    ``pa`` has formal degree len(pa)-1 and ``pc`` formal degree len(pc)-1.
    The first len(pa)-1 rows carry pc's coefficients, the remaining rows pa's.
    """
    deg_a = len(pa) - 1
    deg_c = len(pc) - 1
    if deg_a < 1 or deg_c < 1:
        raise ValueError("both polynomials need formal degree at least 1")
    size = deg_a + deg_c
    zero = SpatialPoly.zero()
    matrix = []
    desc_c = list(reversed(pc))
    desc_a = list(reversed(pa))
    for shift in range(deg_a):
        row = [zero] * shift + desc_c + [zero] * (size - shift - deg_c - 1)
        matrix.append(row)
    for shift in range(deg_c):
        row = [zero] * shift + desc_a + [zero] * (size - shift - deg_a - 1)
        matrix.append(row)
    return matrix


def determinant_bareiss(matrix: list[list[SpatialPoly]]) -> SpatialPoly:
    """Fraction-free Bareiss determinant over the polynomial integral domain.

    Every division is exact (the intermediate entries are minors of the row
    permuted matrix); row swaps flip the sign.
    """
    n = len(matrix)
    m = [row[:] for row in matrix]
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    if n == 1:
        return m[0][0]
    sign = 1
    prev = None
    for k in range(n - 1):
        if m[k][k].is_zero:
            for i in range(k + 1, n):
                if not m[i][k].is_zero:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return SpatialPoly.zero()
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            head = row_i[k]
            for j in range(k + 1, n):
                entry = pivot * row_i[j] - head * m[k][j]
                if prev is not None:
                    entry = entry.divide_exact(prev)
                row_i[j] = entry
        prev = pivot
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def determinant_cofactor(matrix: list[list[SpatialPoly]]) -> SpatialPoly:
    """Naive cofactor expansion along the first row (test oracle)."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = SpatialPoly.zero()
    for j, entry in enumerate(matrix[0]):
        if entry.is_zero:
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = entry * determinant_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def sylvester_resultant(pa: list[SpatialPoly], pc: list[SpatialPoly]) -> SpatialPoly:
    """Resultant of the two coefficient lists (low-to-high) at formal degrees."""
    return determinant_bareiss(sylvester_matrix(pa, pc))
