"""Quantum Markov process models and their generators.

Two kinds of model are supported:

* :class:`DiscreteModel` - a quantum operation ``T(X) = sum_j A_j X A_j^+``
  iterated in discrete steps;
* :class:`ContinuousModel` - a semigroup ``exp(tL)`` with
  ``L(X) = i[X, H] + sum_j (L_j X L_j^+ - 1/2 {L_j^+ L_j, X}) - G X - X G``.

Rates are folded into the jump operators; ``K = iH + 1/2 sum L_j^+ L_j + G``
is never stored.

Model files are JSON. Complex numbers are ``[re, im]`` pairs (plain numbers
are read as real), matrices are row-major nested lists::

    {"kind": "discrete", "dim": 2, "kraus": [[[[1, 0], [0, 0]], ...]]}
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .errors import ParseError, ValidationError
from .operators import (
    Superoperator,
    as_operator,
    dagger,
    frob,
    is_hermitian,
    min_eigenvalue,
    sandwich_matrix,
)
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class DiscreteModel:
    dim: int
    kraus: List[np.ndarray]
    trace_preserving: Optional[bool] = None
    tstate: Optional[np.ndarray] = None
    tolerances: Tolerances = DEFAULT
    name: str = ""

    kind = "discrete"

    def __post_init__(self):
        kraus = [as_operator(A) for A in self.kraus]
        object.__setattr__(self, "kraus", kraus)
        _check_dims(self.dim, {"kraus": kraus})
        if not kraus:
            raise ValidationError("a discrete model needs at least one Kraus operator")
        if self.tstate is not None:
            object.__setattr__(self, "tstate", _checked(self.dim, "tstate", self.tstate))
        tol = self.tolerances
        eye = np.eye(self.dim)
        kk = sum(dagger(A) @ A for A in kraus)
        defect = min_eigenvalue(eye - kk)
        if defect < -tol.trace:
            raise ValidationError(
                f"sum A_j^+ A_j exceeds the identity (min eigenvalue of I - sum = {defect:.3e})")
        tp = frob(kk - eye) <= tol.trace
        if self.trace_preserving is None:
            object.__setattr__(self, "trace_preserving", tp)
        elif self.trace_preserving and not tp:
            raise ValidationError(
                f"declared trace-preserving but ||sum A_j^+ A_j - I||_F = {frob(kk - eye):.3e}")
        elif not self.trace_preserving and tp:
            object.__setattr__(self, "trace_preserving", True)


@dataclass(frozen=True)
class ContinuousModel:
    dim: int
    hamiltonian: np.ndarray
    lindblads: List[np.ndarray] = field(default_factory=list)
    optical_potential: Optional[np.ndarray] = None
    tstate: Optional[np.ndarray] = None
    tolerances: Tolerances = DEFAULT
    name: str = ""

    kind = "continuous"

    def __post_init__(self):
        H = as_operator(self.hamiltonian)
        Ls = [as_operator(L) for L in self.lindblads]
        G = (np.zeros((self.dim, self.dim), complex) if self.optical_potential is None
             else as_operator(self.optical_potential))
        _check_dims(self.dim, {"hamiltonian": [H], "lindblads": Ls, "optical_potential": [G]})
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "lindblads", Ls)
        object.__setattr__(self, "optical_potential", G)
        if self.tstate is not None:
            object.__setattr__(self, "tstate", _checked(self.dim, "tstate", self.tstate))
        tol = self.tolerances
        if not is_hermitian(H, tol.hermitian):
            raise ValidationError("hamiltonian is not hermitian")
        if not is_hermitian(G, tol.hermitian):
            raise ValidationError("optical_potential is not hermitian")
        g_min = min_eigenvalue(G)
        if g_min < -tol.defect * max(1.0, frob(G)):
            raise ValidationError(
                f"optical_potential is not positive semidefinite (min eigenvalue {g_min:.3e})")

    @property
    def trace_preserving(self):
        return frob(self.optical_potential) <= self.tolerances.trace

    @property
    def K(self):
        """``iH + 1/2 sum L_j^+ L_j + G``."""
        v = sum((dagger(L) @ L for L in self.lindblads), np.zeros((self.dim, self.dim), complex))
        return 1j * self.hamiltonian + 0.5 * v + self.optical_potential


Model = Union[DiscreteModel, ContinuousModel]


def _check_dims(dim, groups):
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim!r}")
    for name, ops in groups.items():
        for k, A in enumerate(ops):
            if A.shape != (dim, dim):
                raise ValidationError(f"{name}[{k}] has shape {A.shape}, expected ({dim}, {dim})")


def _checked(dim, name, A):
    A = as_operator(A)
    if A.shape != (dim, dim):
        raise ValidationError(f"{name} has shape {A.shape}, expected ({dim}, {dim})")
    return A


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def generator_schrodinger(model: Model) -> Superoperator:
    """Superoperator of ``T`` (discrete) or ``L`` (continuous)."""
    n = model.dim
    if model.kind == "discrete":
        return Superoperator.from_kraus(model.kraus)
    eye = np.eye(n)
    H = model.hamiltonian
    m = 1j * (sandwich_matrix(eye, H) - sandwich_matrix(H, eye))
    for L in model.lindblads:
        LL = dagger(L) @ L
        m = m + sandwich_matrix(L, dagger(L)) - 0.5 * (sandwich_matrix(LL, eye) + sandwich_matrix(eye, LL))
    G = model.optical_potential
    m = m - sandwich_matrix(G, eye) - sandwich_matrix(eye, G)
    return Superoperator(m, n)


def generator_heisenberg(model: Model) -> Superoperator:
    """Hilbert-Schmidt adjoint of :func:`generator_schrodinger`."""
    return generator_schrodinger(model).adjoint()


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    trace: str  # "trace_preserving" | "trace_nonincreasing"
    unitality: str  # "unital" | "sub_unital" | "neither"

    def as_dict(self):
        return {"trace": self.trace, "unitality": self.unitality}


def classify(model: Model) -> Classification:
    tol = model.tolerances
    n = model.dim
    eye = np.eye(n)
    if model.kind == "discrete":
        image_of_identity = sum(A @ dagger(A) for A in model.kraus)
        unital_defect = image_of_identity - eye  # T(I) - I
    else:
        S = generator_schrodinger(model)
        unital_defect = S.apply(eye)  # L(I)
    trace = "trace_preserving" if model.trace_preserving else "trace_nonincreasing"
    if frob(unital_defect) <= tol.trace:
        unitality = "unital"
    elif min_eigenvalue(-unital_defect) >= -tol.trace:
        unitality = "sub_unital"
    else:
        unitality = "neither"
    return Classification(trace, unitality)


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------

def decode_complex(x):
    if isinstance(x, bool):
        raise ParseError(f"expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"expected a complex number [re, im], got {x!r}")


def decode_matrix(rows, name="matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{name}: expected a nested list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(f"{name}: ragged rows")
    try:
        return np.array([[decode_complex(x) for x in r] for r in rows], dtype=complex)
    except ParseError as exc:
        raise ParseError(f"{name}: {exc}") from None


def encode_complex(z, digits=None):
    z = complex(z)
    re, im = z.real, z.imag
    if digits is not None:
        re, im = round(re, digits), round(im, digits)
    return [re + 0.0, im + 0.0]


def encode_matrix(A, digits=None):
    A = np.asarray(A)
    return [[encode_complex(z, digits) for z in row] for row in A]


def parse_model(document) -> Model:
    """Build a validated model from a JSON string or an already-decoded dict."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ParseError("model document must be a JSON object")
    kind = document.get("kind")
    dim = document.get("dim")
    if kind not in ("discrete", "continuous"):
        raise ParseError(f"'kind' must be 'discrete' or 'continuous', got {kind!r}")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"'dim' must be a positive integer, got {dim!r}")
    tols = DEFAULT
    if "tolerances" in document:
        try:
            tols = DEFAULT.updated(document["tolerances"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"tolerances: {exc}") from None
    tstate = decode_matrix(document["tstate"], "tstate") if "tstate" in document else None
    name = str(document.get("name", ""))

    if kind == "discrete":
        if "kraus" not in document or not isinstance(document["kraus"], list):
            raise ParseError("discrete model needs a 'kraus' list")
        kraus = [decode_matrix(m, f"kraus[{i}]") for i, m in enumerate(document["kraus"])]
        tp = document.get("trace_preserving")
        if tp is not None and not isinstance(tp, bool):
            raise ParseError("'trace_preserving' must be a boolean")
        return DiscreteModel(dim, kraus, tp, tstate, tols, name)

    if "hamiltonian" not in document:
        raise ParseError("continuous model needs a 'hamiltonian'")
    H = decode_matrix(document["hamiltonian"], "hamiltonian")
    lind = document.get("lindblads", [])
    if not isinstance(lind, list):
        raise ParseError("'lindblads' must be a list of matrices")
    Ls = [decode_matrix(m, f"lindblads[{i}]") for i, m in enumerate(lind)]
    G = (decode_matrix(document["optical_potential"], "optical_potential")
         if "optical_potential" in document else None)
    return ContinuousModel(dim, H, Ls, G, tstate, tols, name)


def load_model(path) -> Model:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_model(text)


def model_to_dict(model: Model) -> dict:
    doc = {"kind": model.kind, "dim": model.dim}
    if model.name:
        doc["name"] = model.name
    if model.kind == "discrete":
        doc["kraus"] = [encode_matrix(A) for A in model.kraus]
        doc["trace_preserving"] = bool(model.trace_preserving)
    else:
        doc["hamiltonian"] = encode_matrix(model.hamiltonian)
        doc["lindblads"] = [encode_matrix(L) for L in model.lindblads]
        doc["optical_potential"] = encode_matrix(model.optical_potential)
    if model.tstate is not None:
        doc["tstate"] = encode_matrix(model.tstate)
    if model.tolerances != DEFAULT:
        doc["tolerances"] = model.tolerances.as_dict()
    return doc


def load_state(path) -> np.ndarray:
    """Read a state file: a bare matrix, or an object with a ``state`` matrix."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None
    if isinstance(doc, dict):
        if "state" not in doc:
            raise ParseError("state document needs a 'state' matrix")
        doc = doc["state"]
    return decode_matrix(doc, "state")
