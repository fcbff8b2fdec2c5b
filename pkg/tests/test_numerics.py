import numpy as np
import pytest
from parkrr.exceptions import AsymmetricMatrixException, ConjugateGradientException, \
                              DimensionMismatchException, FactorizationException, \
                              InvalidParameterException, SingularMatrixException
from parkrr.numerics import CholFactor, EAGER_JITTER, JitterPolicy, cg, check_symmetric, \
                            cholesky, make_rng, sym_eig, tri_solve

def spd_matrix(m, seed=0, shift=1e-3):
    G = np.random.default_rng(seed).standard_normal((m, m))
    return G @ G.T + shift * np.eye(m)

# it draws reproducible and independent random streams
def test_make_rng():
    a = make_rng(7, 3).standard_normal(5)
    b = make_rng(7, 3).standard_normal(5)
    c = make_rng(7, 4).standard_normal(5)

    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

    rng = np.random.default_rng(1)
    assert make_rng(rng) is rng

# it factorizes a positive definite matrix without jitter
def test_cholesky():
    A = spd_matrix(30)
    factor = cholesky(A)

    assert factor.jitter_used == 0.0
    assert np.allclose(factor.reconstruct(), A, rtol=1e-10, atol=1e-10)
    assert np.array_equal(factor.L, np.tril(factor.L))

# it escalates the jitter for singular positive semidefinite matrices
def test_cholesky_jitter():
    v = np.arange(1.0, 6.0)
    A = np.outer(v, v)
    factor = cholesky(A)

    assert factor.jitter_used > 0
    assert np.allclose(factor.reconstruct(), A + factor.jitter_used * np.eye(5))

# it always shifts when the eager policy is used
def test_cholesky_eager():
    A = np.eye(4)
    factor = cholesky(A, EAGER_JITTER)

    assert factor.jitter_used == pytest.approx(1e-12)

# it gives up after the last escalation
def test_cholesky_failure():
    A = -np.eye(3)

    with pytest.raises(FactorizationException):
        cholesky(A, JitterPolicy(max_escalations=2), "test matrix")

# it rejects asymmetric and non-square input
input_data = [
    (np.array([[1.0, 2.0], [0.0, 1.0]]), AsymmetricMatrixException),
    (np.ones((2, 3)), DimensionMismatchException),
    (np.ones(3), DimensionMismatchException),
]

@pytest.mark.parametrize("A,exception", input_data)
def test_check_symmetric(A, exception):
    with pytest.raises(exception):
        check_symmetric(A)

# it solves the three kinds of triangular systems
input_data = [
    ("lower", lambda L: L),
    ("upper", lambda L: L.T),
    ("lower_transposed", lambda L: L.T),
]

@pytest.mark.parametrize("side,system", input_data)
def test_tri_solve(side, system):
    factor = cholesky(spd_matrix(8, seed=2, shift=1.0))
    B = np.random.default_rng(3).standard_normal((8, 3))

    X = tri_solve(factor, B, side)

    assert np.allclose(system(factor.L) @ X, B)
    assert tri_solve(factor, B[:, 0], side).shape == (8,)

# it handles empty right-hand sides and reports singular factors
def test_tri_solve_edge_cases():
    factor = CholFactor(np.eye(3))
    assert tri_solve(factor, np.zeros((3, 0))).shape == (3, 0)

    singular = CholFactor(np.diag([1.0, 0.0, 1.0]))
    with pytest.raises(SingularMatrixException) as error:
        tri_solve(singular, np.ones(3))

    assert error.value.index == 1

    with pytest.raises(DimensionMismatchException):
        tri_solve(factor, np.ones(4))

    with pytest.raises(InvalidParameterException):
        tri_solve(factor, np.ones(3), "diagonal")

# it returns ascending eigenvalues with orthonormal eigenvectors
def test_sym_eig():
    A = spd_matrix(10, seed=4)
    w, V = sym_eig(A)

    assert np.all(np.diff(w) >= 0)
    assert np.allclose(V.T @ V, np.eye(10))
    assert np.allclose(V @ np.diag(w) @ V.T, A)

# it solves a positive definite system in at most m iterations
def test_cg_exact():
    A = spd_matrix(12, seed=5, shift=1.0)
    b = np.random.default_rng(6).standard_normal(12)

    x, trace = cg(lambda v: A @ v, b, 50, tol=1e-12)

    assert np.allclose(A @ x, b, atol=1e-8)
    assert trace.converged is True
    assert trace.iterations <= 50

# it runs exactly t iterations without a tolerance
def test_cg_fixed_iterations():
    A = spd_matrix(30, seed=7, shift=1.0)
    b = np.ones(30)
    calls = []

    x, trace = cg(lambda v: A @ v, b, 5, callback=lambda it, x: calls.append(it))

    assert trace.iterations == 5
    assert calls == [1, 2, 3, 4, 5]
    assert trace.converged is False

# it returns zero for a zero right-hand side
def test_cg_zero_rhs():
    x, trace = cg(lambda v: v, np.zeros(4), 10)

    assert np.array_equal(x, np.zeros(4))
    assert trace.iterations == 0
    assert trace.converged is True

# it stops on zero curvature
def test_cg_null_direction():
    x, trace = cg(lambda v: np.zeros_like(v), np.ones(3), 10)

    assert np.array_equal(x, np.zeros(3))
    assert trace.iterations == 0

# it fails on non-finite input and invalid parameters
def test_cg_failures():
    with pytest.raises(ConjugateGradientException):
        cg(lambda v: v, np.array([1.0, np.nan]), 3)

    with pytest.raises(ConjugateGradientException):
        cg(lambda v: v * np.inf, np.ones(2), 3)

    with pytest.raises(InvalidParameterException):
        cg(lambda v: v, np.ones(2), 0)

    with pytest.raises(InvalidParameterException):
        cg(lambda v: v, np.ones(2), 3, tol=-1.0)
