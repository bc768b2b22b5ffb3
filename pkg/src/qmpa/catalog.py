"""Reference models and operators.

Includes the two bundled examples (a CNOT random-unitary chain on two qubits
and a four-level semigroup with jump operators), textbook channels used as
controls, and seeded generators of random trace-preserving models with
non-trivial peripheral structure.
"""
from importlib import resources

import numpy as np
from scipy.stats import unitary_group

from .models import ContinuousModel, DiscreteModel, load_model
from .operators import dagger

# two-qubit computational basis |00>, |01>, |10>, |11>
PHI = np.array([1, 0, 0, 0], dtype=complex)
PSI = np.array([0, 1, 1, 1], dtype=complex) / np.sqrt(3)

CNOT_12 = np.array([[1, 0, 0, 0],
                    [0, 1, 0, 0],
                    [0, 0, 0, 1],
                    [0, 0, 1, 0]], dtype=complex)
CNOT_21 = np.array([[1, 0, 0, 0],
                    [0, 0, 0, 1],
                    [0, 0, 1, 0],
                    [0, 1, 0, 0]], dtype=complex)

X_MINUS_ONE = np.array([[0, 0, 0, 0],
                        [0, 0, -1, 1],
                        [0, 1, 0, -1],
                        [0, -1, 1, 0]], dtype=complex)


def ketbra(a, b):
    return np.outer(a, np.conj(b))


def unit(i, n):
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def matrix_unit(i, j, n):
    return ketbra(unit(i, n), unit(j, n))


def cnot_ruo(p12=0.5):
    """Random application of the two CNOT gates with probabilities p12, 1 - p12."""
    p21 = 1.0 - p12
    return DiscreteModel(4, [np.sqrt(p12) * CNOT_12, np.sqrt(p21) * CNOT_21],
                         name="cnot_ruo")


def cnot_fixed_points():
    """Spanning set of the eigenvalue-1 attractors of :func:`cnot_ruo`."""
    return [np.eye(4, dtype=complex), ketbra(PHI, PHI), ketbra(PSI, PSI),
            ketbra(PHI, PSI), ketbra(PSI, PHI)]


def cnot_tstate():
    return (np.eye(4) + ketbra(PHI, PHI)) / 5


def jump_operators():
    """``h_+ = |0><1| + |2><3|`` and ``h_- = h_+^+``."""
    hp = matrix_unit(0, 1, 4) + matrix_unit(2, 3, 4)
    return hp, dagger(hp)


def jump_hamiltonian(eps=1.0):
    return eps * (matrix_unit(2, 2, 4) + matrix_unit(3, 3, 4))


def jump_lindblad(eps=1.0):
    """Four-level semigroup: transfer 1->0 and 3->2 at rate 2, back at rate 1."""
    hp, hm = jump_operators()
    return ContinuousModel(4, jump_hamiltonian(eps), [np.sqrt(2) * hp, hm],
                           name="jump_lindblad")


def jump_attractors():
    """``X1, X2, X+, X-`` with eigenvalues 0, 0, +i eps, -i eps."""
    m = lambda i, j: matrix_unit(i, j, 4)
    X1 = 2 * m(0, 0) + m(1, 1)
    X2 = 2 * m(2, 2) + m(3, 3)
    Xp = 2 * m(0, 2) + m(1, 3)
    Xm = 2 * m(2, 0) + m(3, 1)
    return X1, X2, Xp, Xm


def jump_observables():
    """``A_-`` and ``A_+``, the rotating integrals at eigenvalues -i eps, +i eps."""
    m = lambda i, j: matrix_unit(i, j, 4)
    return m(0, 2) + m(1, 3), m(2, 0) + m(3, 1)


def jump_tstate():
    X1, X2, _, _ = jump_attractors()
    return (X1 + X2) / 6


def amplitude_damping(gamma=0.3):
    return DiscreteModel(2, [np.array([[1, 0], [0, np.sqrt(1 - gamma)]]),
                             np.array([[0, np.sqrt(gamma)], [0, 0]])],
                         name="amplitude_damping")


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def depolarizing(p=0.5):
    kraus = [np.sqrt(1 - 3 * p / 4) * np.eye(2)]
    kraus += [np.sqrt(p / 4) * P for P in (PAULI_X, PAULI_Y, PAULI_Z)]
    return DiscreteModel(2, kraus, name="depolarizing")


def unitary_channel(U):
    U = np.asarray(U, dtype=complex)
    return DiscreteModel(U.shape[0], [U], name="unitary")


def identity_channel(dim):
    return DiscreteModel(dim, [np.eye(dim)], name="identity")


def bundled_path(name):
    """Filesystem path of a bundled model file (``cnot_ruo`` or ``jump_lindblad``)."""
    return resources.files("qmpa") / "data" / f"{name}.json"


def load_bundled(name):
    return load_model(bundled_path(name))


# ---------------------------------------------------------------------------
# random models
# ---------------------------------------------------------------------------

def random_kraus(dim, n_kraus, rng):
    """Kraus operators of a random channel, cut from a Haar-random isometry."""
    z = rng.normal(size=(n_kraus * dim, dim)) + 1j * rng.normal(size=(n_kraus * dim, dim))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return [q[k * dim:(k + 1) * dim, :] for k in range(n_kraus)]


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.exp(
        2j * np.pi * rng.random()) * np.eye(1)


def random_state(dim, rng, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def _direct_sum(blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def _conjugate(kraus, W):
    return [W @ A @ dagger(W) for A in kraus]


def random_block_channel(sizes, rng, n_kraus=2):
    """Direct sum of independent random channels, hidden by a random unitary."""
    per_block = [random_kraus(s, n_kraus, rng) if s > 1 else
                 [np.eye(1) * np.sqrt(1 / n_kraus)] * n_kraus for s in sizes]
    kraus = [_direct_sum([blk[j] for blk in per_block]) for j in range(n_kraus)]
    W = random_unitary(sum(sizes), rng)
    return DiscreteModel(sum(sizes), _conjugate(kraus, W), name=f"block{tuple(sizes)}")


def random_noiseless_subsystem(dim_a, dim_b, rng, n_kraus=2):
    """``A_j = U (x) K_j``: a unitary on a protected factor times noise on the other."""
    U = random_unitary(dim_a, rng)
    kraus = [np.kron(U, K) for K in random_kraus(dim_b, n_kraus, rng)]
    W = random_unitary(dim_a * dim_b, rng)
    return DiscreteModel(dim_a * dim_b, _conjugate(kraus, W),
                         name=f"noiseless({dim_a}x{dim_b})")


def random_block_swap(block, rng, n_kraus=2):
    """Two equal blocks exchanged every step, with independent noise on each."""
    per_block = [random_kraus(block, n_kraus, rng) for _ in range(2)]
    swap = np.zeros((2 * block, 2 * block), dtype=complex)
    swap[:block, block:] = np.eye(block)
    swap[block:, :block] = np.eye(block)
    kraus = [swap @ _direct_sum([per_block[0][j], per_block[1][j]]) for j in range(n_kraus)]
    W = random_unitary(2 * block, rng)
    return DiscreteModel(2 * block, _conjugate(kraus, W), name=f"swap({block})")


def random_generic_channel(dim, rng, n_kraus=2):
    return DiscreteModel(dim, random_kraus(dim, n_kraus, rng), name=f"generic({dim})")


def random_unitary_model(dim, rng):
    return DiscreteModel(dim, [random_unitary(dim, rng)], name=f"unitary({dim})")


def random_trace_preserving_models(count=20, seed=2024):
    """A deterministic mix of random channels on dimensions 2, 3 and 4.

    The recipes cycle through generic channels, block-diagonal channels,
    noiseless subsystems, block swaps and unitary channels so that the
    peripheral spectra include degenerate fixed points and rotating phases.
    """
    rng = np.random.default_rng(seed)
    recipes = [
        lambda: random_generic_channel(2, rng),
        lambda: random_block_channel([1, 2], rng),
        lambda: random_noiseless_subsystem(2, 2, rng),
        lambda: random_block_swap(2, rng),
        lambda: random_unitary_model(3, rng),
        lambda: random_generic_channel(3, rng, n_kraus=3),
        lambda: random_block_channel([2, 2], rng),
        lambda: random_block_swap(1, rng),
        lambda: random_unitary_model(2, rng),
        lambda: random_block_channel([1, 1, 2], rng),
    ]
    return [recipes[i % len(recipes)]() for i in range(count)]
