"""Two-qubit state arithmetic: concurrence, fidelity, ground-manifold projection.

Qubits are the two stable lower levels |+> and |-> of a three-level
emitter.  Pure two-qubit states are length-4 complex arrays ordered
(++, +-, -+, --); density matrices are 4x4 in the same basis.  States
of the full pair of {e, +, -} level triplets are length-9 arrays
indexed by ``3 * level_A + level_B`` with e = 0, + = 1, - = 2.

Inputs are validated, never silently renormalized: a state whose norm
is off by more than ``STATE_NORM_ATOL`` is rejected so that upstream
normalization bugs surface here instead of propagating.
"""

import numpy as np

from .errors import InvalidInputError, NumericalFailureError

__all__ = [
    "BASIS_LABELS",
    "LEVEL_E",
    "LEVEL_PLUS",
    "LEVEL_MINUS",
    "GROUND_INDICES",
    "concurrence_pure",
    "concurrence_mixed",
    "fidelity_pure_target",
    "pure_to_density",
    "validate_state",
    "validate_density",
    "joint_index",
    "excited_pair_state",
    "project_to_ground_manifold",
]

#: basis order of all two-qubit vectors and matrices
BASIS_LABELS = ("++", "+-", "-+", "--")

#: level indices of a single emitter
LEVEL_E, LEVEL_PLUS, LEVEL_MINUS = 0, 1, 2

#: positions of the two-qubit basis inside the 9-dim joint level space
GROUND_INDICES = (4, 5, 7, 8)

#: largest tolerated deviation of a pure-state norm from 1
STATE_NORM_ATOL = 1e-6

#: largest tolerated entrywise deviation from Hermiticity / unit trace
HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12

#: density-matrix eigenvalues may undershoot zero by at most this much
EIGENVALUE_FLOOR = -1e-10

#: the concurrence spectrum must reproduce tr(rho rho~) within this
SPECTRUM_CONSISTENCY_TOL = 1e-9

# sigma_y (x) sigma_y in the (++, +-, -+, --) basis
_SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ],
    dtype=complex,
)


def _as_complex_array(value, shape, name):
    arr = np.asarray(value, dtype=complex)
    if arr.shape != shape:
        raise InvalidInputError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def validate_state(state, atol=STATE_NORM_ATOL):
    """Check that ``state`` is a normalized two-qubit vector and return it.

    Parameters
    ----------
    state : array_like
        Length-4 complex vector in the (++, +-, -+, --) basis.
    atol : float
        Largest accepted deviation of the norm from 1.

    Returns
    -------
    ndarray
        The validated vector as a complex array.

    Raises
    ------
    InvalidInputError
        If the shape is wrong, entries are non-finite, or the norm
        deviates from 1 by more than ``atol``.
    """
    vec = _as_complex_array(state, (4,), "state")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > atol:
        raise InvalidInputError(
            f"state norm {norm:.12g} deviates from 1 by more than {atol:g}"
        )
    return vec


def validate_density(rho, herm_atol=HERMITIAN_ATOL, trace_atol=TRACE_ATOL,
                     eig_floor=EIGENVALUE_FLOOR):
    """Check that ``rho`` is a valid 4x4 density matrix and return it.

    Hermiticity and unit trace are required within ``herm_atol`` and
    ``trace_atol``; eigenvalues may undershoot zero by at most
    ``-eig_floor`` (roundoff slack).

    Raises
    ------
    InvalidInputError
        If any of the density-matrix conditions is violated.
    """
    mat = _as_complex_array(rho, (4, 4), "rho")
    herm_dev = np.max(np.abs(mat - mat.conj().T))
    if herm_dev > herm_atol:
        raise InvalidInputError(
            f"rho is not Hermitian: max deviation {herm_dev:.3g} > {herm_atol:g}"
        )
    trace_dev = abs(np.trace(mat) - 1.0)
    if trace_dev > trace_atol:
        raise InvalidInputError(
            f"rho trace deviates from 1 by {trace_dev:.3g} > {trace_atol:g}"
        )
    evals = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    if evals.min() < eig_floor:
        raise InvalidInputError(
            f"rho has negative eigenvalue {evals.min():.3g} below {eig_floor:g}"
        )
    return mat


def pure_to_density(state):
    """Rank-1 density matrix |state><state| of a normalized pure state."""
    vec = validate_state(state)
    return np.outer(vec, vec.conj())


def concurrence_pure(state):
    """Concurrence of a normalized two-qubit pure state.

    For amplitudes (a, b, c, d) in the (++, +-, -+, --) basis the
    concurrence is ``2 |a d - b c|``, the overlap with the spin-flipped
    state.  It is 0 for product states and 1 for maximally entangled
    ones.

    Parameters
    ----------
    state : array_like
        Length-4 complex vector, normalized within ``STATE_NORM_ATOL``.

    Returns
    -------
    float
        Concurrence in [0, 1].
    """
    a, b, c, d = validate_state(state)
    return 2.0 * abs(a * d - b * c)


def concurrence_mixed(rho):
    """Concurrence of a two-qubit density matrix (Wootters formula).

    The concurrence is ``max(0, l1 - l2 - l3 - l4)`` with l1 >= ... >=
    l4 the square roots of the eigenvalues of ``rho @ spin_flip(rho)``,
    where ``spin_flip(rho) = (sy x sy) conj(rho) (sy x sy)``.  The
    square roots are evaluated as the singular values of the symmetric
    matrix ``X.T (sy x sy) X`` with ``rho = X X^dag``: identical
    spectrum, but stable for near-pure inputs where square roots of
    eigensolver noise would otherwise dominate the small l_i.

    Parameters
    ----------
    rho : array_like
        4x4 density matrix (Hermitian, unit trace, positive within
        roundoff).

    Returns
    -------
    float
        Concurrence in [0, 1].

    Raises
    ------
    InvalidInputError
        If ``rho`` is not a valid density matrix.
    NumericalFailureError
        If the computed spectrum fails to reproduce the trace of
        ``rho @ spin_flip(rho)`` within ``SPECTRUM_CONSISTENCY_TOL``.
    """
    mat = validate_density(rho)
    evals, basis = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    # clamp roundoff negatives before the square root
    factor = basis * np.sqrt(np.clip(evals, 0.0, None))
    lam = np.linalg.svd(factor.T @ _SPIN_FLIP @ factor, compute_uv=False)
    flipped = _SPIN_FLIP @ mat.conj() @ _SPIN_FLIP
    trace_product = float(np.real(np.trace(mat @ flipped)))
    if abs(np.sum(lam**2) - trace_product) > SPECTRUM_CONSISTENCY_TOL:
        raise NumericalFailureError(
            "concurrence spectrum is inconsistent with tr(rho spin_flip(rho)) "
            f"by {abs(np.sum(lam ** 2) - trace_product):.3g}"
        )
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def fidelity_pure_target(rho, target):
    """Overlap <target| rho |target> with a pure target state.

    Parameters
    ----------
    rho : array_like
        4x4 density matrix.
    target : array_like
        Normalized pure state, length 4.

    Returns
    -------
    float
        Fidelity in [0, 1]; equals 1 exactly when ``rho`` is the
        projector onto ``target``.
    """
    mat = validate_density(rho)
    vec = validate_state(target)
    return float(np.real(vec.conj() @ mat @ vec))


def joint_index(level_a, level_b):
    """Flat index of |level_a, level_b> in the 9-dim joint level space."""
    if level_a not in (0, 1, 2) or level_b not in (0, 1, 2):
        raise InvalidInputError("emitter levels must be 0 (e), 1 (+) or 2 (-)")
    return 3 * level_a + level_b


def excited_pair_state():
    """Length-9 vector with both emitters in the excited level |e, e>."""
    vec = np.zeros(9, dtype=complex)
    vec[joint_index(LEVEL_E, LEVEL_E)] = 1.0
    return vec


def project_to_ground_manifold(state):
    """Project a joint 9-dim level-space state onto the two-qubit manifold.

    Parameters
    ----------
    state : array_like
        Length-9 complex vector over {e, +, -} x {e, +, -}.

    Returns
    -------
    amplitudes : ndarray
        The four amplitudes on (++, +-, -+, --), not renormalized.
    weight : float
        Squared norm of the projected part, i.e. the probability of
        finding both emitters in their lower levels.
    """
    vec = _as_complex_array(state, (9,), "state")
    amps = vec[list(GROUND_INDICES)]
    weight = float(np.real(np.vdot(amps, amps)))
    return amps, weight
