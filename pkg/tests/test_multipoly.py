from fractions import Fraction

from hypothesis import given, strategies as st

from hessbasis.multipoly import LinearForm, MultiPoly, SymTensorPoly, hessian_sym, tensor_eval

x = MultiPoly.var(2, 0)
y = MultiPoly.var(2, 1)


def test_arithmetic_and_degree():
    p = (x + y) ** 2
    assert p == x * x + x * y.scale(2) + y * y
    assert p.degree == 2 and p.is_homogeneous(2)
    assert MultiPoly.zero(2).degree == -1
    assert (p - p).is_zero()


def test_derivatives():
    p = x ** 3 * y + y.scale(5)
    assert p.diff(0) == (x ** 2 * y).scale(3)
    assert p.diff(1) == x ** 3 + MultiPoly.const(2, 5)
    assert p.evaluate((2, 3)) == 39


def test_hessian_of_rho1_squared_at_point():
    rho = x * x + y * y
    h = tensor_eval(hessian_sym(rho * rho), (1, 2))
    assert h == [[28, 16], [16, 52]]


def test_substitute_and_compose():
    swap = [[0, 1], [1, 0]]
    assert (x ** 2 + y).substitute_linear(swap) == y ** 2 + x
    assert (x * y).compose([x + y, x - y]) == x * x - y * y


def test_tensor_transform_rotation():
    rot = [[0, -1], [1, 0]]
    dx2 = SymTensorPoly.constant([[1, 0], [0, 0]])
    assert dx2.transform(rot) == SymTensorPoly.constant([[0, 0], [0, 1]])
    ident = SymTensorPoly.constant([[1, 0], [0, 1]])
    assert ident.transform(rot) == ident


def test_json_round_trips():
    p = (x + y.scale(Fraction(1, 3))) ** 3
    assert MultiPoly.from_json(p.to_json()) == p
    s = hessian_sym(p)
    assert SymTensorPoly.from_json(s.to_json()) == s


def test_linear_form_action():
    lam = LinearForm([1, 2])
    g = [[0, 1], [1, 0]]
    assert lam.act(g) == LinearForm([2, 1])
    assert lam((3, 4)) == 11


coeff = st.integers(-5, 5)
monos = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)), coeff, max_size=5)


@given(monos, monos)
def test_hessian_product_rule(a, b):
    p, q = MultiPoly(3, a), MultiPoly(3, b)
    lhs = hessian_sym(p * q)
    gp, gq = p.gradient(), q.gradient()
    hp, hq = hessian_sym(p), hessian_sym(q)
    for i in range(3):
        for j in range(i, 3):
            rhs = gp[i] * gq[j] + gq[i] * gp[j] + p * hq[i, j] + q * hp[i, j]
            assert lhs[i, j] == rhs
