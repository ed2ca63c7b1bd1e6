from fractions import Fraction

import pytest

from hessbasis.exact_arith import CycloScalar
from hessbasis.linalg import InconsistentSystem, determinant, inverse_matrix, matmul, rank, solve_unique

F = Fraction


def test_determinant_known_values():
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[F(1, 2), F(1, 3)], [F(1, 4), F(1, 5)]]) == F(1, 10) - F(1, 12)
    assert determinant([]) == 1
    # Vandermonde on 1,2,3,4
    v = [[F(x) ** k for k in range(4)] for x in (1, 2, 3, 4)]
    assert determinant(v) == 12


def test_determinant_needs_pivoting():
    assert determinant([[0, 1, 0], [1, 0, 0], [0, 0, 1]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0


def test_determinant_cyclotomic():
    z = CycloScalar.zeta(5)
    phi = -(z ** 2 + z ** 3)
    # [[2, -phi], [-phi, 2]] has determinant 4 - phi^2 = 3 - phi
    d = determinant([[2, -phi], [-phi, 2]])
    assert d == 3 - phi


def test_solve_unique_and_failures():
    assert solve_unique([[2, 1], [1, 3]], [3, 5]) == [F(4, 5), F(7, 5)]
    with pytest.raises(InconsistentSystem):
        solve_unique([[1, 1], [2, 2]], [1, 3])
    with pytest.raises(ValueError):
        solve_unique([[1, 1], [2, 2]], [1, 2])


def test_inverse_and_rank():
    a = [[F(2), F(1)], [F(7), F(4)]]
    assert matmul(a, inverse_matrix(a)) == [[1, 0], [0, 1]]
    assert rank([[1, 2, 3], [2, 4, 6]]) == 1
    with pytest.raises(ZeroDivisionError):
        inverse_matrix([[1, 2], [2, 4]])
