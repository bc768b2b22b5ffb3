"""Operator and superoperator algebra on B(H).

Operators are plain square complex ``numpy`` arrays. Superoperators act on
operators through column-stacking vectorization; that is the only convention
used anywhere in the package, so that

    vec(A @ X @ B) == kron(B.T, A) @ vec(X)

holds for every triple.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotHermitian, NotStrictlyPositive
from .tolerances import DEFAULT

COLUMN_STACKING = "column-stacking"


def as_operator(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {A.shape}")
    return A


def dagger(A):
    return np.conj(np.transpose(A))


def frob(A) -> float:
    return float(np.linalg.norm(A))


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def is_hermitian(A, tol=DEFAULT.hermitian) -> bool:
    A = as_operator(A)
    return frob(A - dagger(A)) <= tol * max(1.0, frob(A))


def hermitian_part(A):
    return 0.5 * (A + dagger(A))


def min_eigenvalue(A) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(as_operator(A)))[0])


def is_psd(A, tol=DEFAULT.defect) -> bool:
    """Hermitian with smallest eigenvalue >= -tol * max(1, ||A||_F)."""
    A = as_operator(A)
    if not is_hermitian(A):
        return False
    return min_eigenvalue(A) >= -tol * max(1.0, frob(A))


def positivity_threshold(A, tol=DEFAULT.positive) -> float:
    A = as_operator(A)
    return tol * abs(np.trace(A).real) / A.shape[0]


def is_strictly_positive(A, tol=DEFAULT.positive) -> bool:
    A = as_operator(A)
    if not is_hermitian(A):
        return False
    return min_eigenvalue(A) > positivity_threshold(A, tol)


def has_unit_trace(A, tol=DEFAULT.trace) -> bool:
    return abs(np.trace(as_operator(A)) - 1.0) <= tol


def require_strictly_positive(A, name="operator", tol=DEFAULT.positive):
    A = as_operator(A)
    if not is_hermitian(A):
        raise NotHermitian(f"{name} is not hermitian")
    lo = min_eigenvalue(A)
    if not lo > positivity_threshold(A, tol):
        raise NotStrictlyPositive(
            f"{name} is not strictly positive (min eigenvalue {lo:.3e})")
    return A


# ---------------------------------------------------------------------------
# inner product and vectorization
# ---------------------------------------------------------------------------

def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt product ``Tr(A^+ B)``, conjugate-linear in ``A``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def vec(X) -> np.ndarray:
    """Stack the columns of ``X`` into a vector of length N**2."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, dim: Optional[int] = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((dim, dim), order="F")


def sandwich_matrix(A, B) -> np.ndarray:
    """Matrix of the map ``X -> A X B`` under column stacking."""
    return np.kron(np.transpose(B), A)


# ---------------------------------------------------------------------------
# superoperators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Superoperator:
    """A linear map on B(H) stored as an N**2 x N**2 matrix."""

    matrix: np.ndarray
    dim: int = field(default=0)
    convention: str = COLUMN_STACKING

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n2 = m.shape[0]
        dim = self.dim or int(round(np.sqrt(n2)))
        if m.shape != (dim * dim, dim * dim):
            raise ValueError(f"superoperator matrix shape {m.shape} does not match dim {dim}")
        if self.convention != COLUMN_STACKING:
            raise ValueError(f"unsupported vectorization convention {self.convention!r}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", dim)

    def __call__(self, X):
        return self.apply(X)

    def apply(self, X):
        X = as_operator(X)
        if X.shape[0] != self.dim:
            raise ValueError(f"operator dim {X.shape[0]} != superoperator dim {self.dim}")
        return unvec(self.matrix @ vec(X), self.dim)

    def adjoint(self) -> "Superoperator":
        """Adjoint with respect to the Hilbert-Schmidt product."""
        return Superoperator(dagger(self.matrix), self.dim)

    def __matmul__(self, other):
        if isinstance(other, Superoperator):
            return Superoperator(self.matrix @ other.matrix, self.dim)
        return NotImplemented

    def __add__(self, other):
        return Superoperator(self.matrix + other.matrix, self.dim)

    def __sub__(self, other):
        return Superoperator(self.matrix - other.matrix, self.dim)

    def scaled(self, c) -> "Superoperator":
        return Superoperator(c * self.matrix, self.dim)

    def norm(self) -> float:
        return frob(self.matrix)

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim * dim, dtype=complex), dim)

    @classmethod
    def from_kraus(cls, kraus):
        kraus = [as_operator(A) for A in kraus]
        dim = kraus[0].shape[0]
        m = sum(np.kron(A.conj(), A) for A in kraus)
        return cls(m, dim)

    @classmethod
    def from_map(cls, fn: Callable, dim: int):
        """Tabulate an arbitrary linear map by applying it to matrix units."""
        cols = []
        for k in range(dim * dim):
            e = np.zeros(dim * dim, dtype=complex)
            e[k] = 1.0
            cols.append(vec(fn(unvec(e, dim))))
        return cls(np.column_stack(cols), dim)


def left_mult_super(P) -> Superoperator:
    P = as_operator(P)
    return Superoperator(sandwich_matrix(P, np.eye(P.shape[0])), P.shape[0])


def right_mult_super(P) -> Superoperator:
    P = as_operator(P)
    return Superoperator(sandwich_matrix(np.eye(P.shape[0]), P), P.shape[0])


def relative_modular(Q, P, tol=DEFAULT.positive) -> Superoperator:
    """``X -> Q X P^{-1}``; ``P`` must be strictly positive."""
    Q = as_operator(Q)
    P = require_strictly_positive(P, "P", tol)
    if not is_psd(Q):
        raise NotStrictlyPositive("Q is not positive semidefinite")
    return Superoperator(sandwich_matrix(Q, np.linalg.inv(P)), P.shape[0])


# ---------------------------------------------------------------------------
# functional calculus
# ---------------------------------------------------------------------------

def op_function(f: Callable, A, tol=DEFAULT.hermitian) -> np.ndarray:
    """Apply a scalar function to a hermitian operator through its eigenbasis."""
    A = as_operator(A)
    if not is_hermitian(A, tol):
        raise NotHermitian("op_function requires a hermitian operator")
    w, U = np.linalg.eigh(hermitian_part(A))
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape:
        fw = np.array([f(x) for x in w])
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise ValueError(f"function undefined at eigenvalue(s) {bad}")
    return (U * fw) @ dagger(U)


def op_power(A, alpha):
    """Real power of a strictly positive operator."""
    return op_function(lambda w: np.power(w, alpha), require_strictly_positive(A))


def op_log(A):
    return op_function(np.log, require_strictly_positive(A))


def op_exp(A):
    return op_function(np.exp, A)


def op_sqrt(A):
    return op_function(np.sqrt, A)


# ---------------------------------------------------------------------------
# operator monotone functions and k(Delta)
# ---------------------------------------------------------------------------

_RATIO_SAMPLES = np.logspace(-6, 6, 61)


@dataclass(frozen=True)
class MonotoneFunction:
    """A positive function ``k`` used as ``k(Delta_{sigma1, sigma2})``.

    Build instances with :meth:`power`, :meth:`log1p`, :meth:`custom`, or
    :meth:`parse` (``"power:0.5"``, ``"log1p"``).
    """

    kind: str
    alpha: Optional[float] = None
    func: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    @classmethod
    def power(cls, alpha):
        alpha = float(alpha)
        if not 0.0 < alpha <= 1.0:
            raise ValueError(
                f"power({alpha}) is operator monotone only for alpha in (0, 1]; "
                "use duality.power_bijection for other exponents")
        return cls("power", alpha, name=f"power:{alpha:g}")

    @classmethod
    def log1p(cls):
        return cls("log1p", name="log1p")

    @classmethod
    def custom(cls, func, attested=False, name="custom"):
        if not attested:
            raise ValueError("custom monotone functions require attested=True")
        with np.errstate(all="ignore"):
            vals = np.array([func(y) for y in _RATIO_SAMPLES], dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("custom monotone function is not positive on sampled ratios")
        return cls("custom", func=func, name=name)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "log1p":
            return cls.log1p()
        if text.startswith("power:"):
            return cls.power(float(text.split(":", 1)[1]))
        raise ValueError(f"unknown monotone function {text!r}; use power:<alpha> or log1p")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "power":
            return np.power(y, self.alpha)
        if self.kind == "log1p":
            return np.log1p(y)
        return np.vectorize(self.func, otypes=[float])(y)

    def __str__(self):
        return self.name or self.kind


def _eig_positive(sigma, name):
    sigma = require_strictly_positive(sigma, name)
    return np.linalg.eigh(hermitian_part(sigma))


def k_of_delta_apply(k: MonotoneFunction, sigma1, sigma2, X) -> np.ndarray:
    """Evaluate ``k(Delta_{sigma1,sigma2})(X)``.

    With ``sigma1 = sum p_i |u_i><u_i|`` and ``sigma2 = sum q_j |v_j><v_j|`` the
    relative modular operator is diagonal on ``|u_i><v_j|`` with eigenvalue
    ``p_i / q_j``, so the result is ``sum_ij k(p_i/q_j) <u_i|X|v_j> |u_i><v_j|``.
    """
    p, U = _eig_positive(sigma1, "sigma1")
    q, V = _eig_positive(sigma2, "sigma2")
    X = as_operator(X)
    Y = dagger(U) @ X @ V
    Y = Y * k(np.divide.outer(p, q))
    return U @ Y @ dagger(V)


# ---------------------------------------------------------------------------
# Choi matrices
# ---------------------------------------------------------------------------

def choi_matrix(kraus: Sequence) -> np.ndarray:
    """``sum_k vec(A_k) vec(A_k)^+``, equal to ``sum_jl |j><l| (x) T(|j><l|)``."""
    kraus = [as_operator(A) for A in kraus]
    dims = {A.shape for A in kraus}
    if len(dims) != 1:
        raise ValueError(f"inconsistent Kraus operator shapes {sorted(dims)}")
    vs = np.column_stack([vec(A) for A in kraus])
    return vs @ dagger(vs)


def choi_from_superoperator(S: Superoperator) -> np.ndarray:
    """Reshuffle a superoperator matrix into the Choi matrix of the same map."""
    n = S.dim
    s4 = S.matrix.reshape(n, n, n, n)  # [k, i, l, j]: row (i,k), column (j,l)
    return s4.transpose(3, 1, 2, 0).reshape(n * n, n * n)


def is_completely_positive(S: Superoperator, tol=1e-10) -> bool:
    J = choi_from_superoperator(S)
    return is_psd(J, tol)
