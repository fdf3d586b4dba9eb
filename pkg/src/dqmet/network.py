"""Weight vectors and linear-network synthesis.

Builds the optimal 2d-mode (or d+1-mode reduced) network for a target
weight vector, completes it to a unitary, and decomposes any unitary into
a rectangular nearest-neighbor mesh of two-mode mixers.

The single two-mode mixer convention used everywhere (including the Fock
simulator) is, on the creation operators of a mode pair,

    T(theta, phi) = [[cos(theta), -e^{i phi} sin(theta)],
                     [e^{-i phi} sin(theta), cos(theta)]].
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

LinearNetwork = np.ndarray

WEIGHT_FLOOR = 1e-12
UNITARY_TOL = 1e-12


class PairingViolationError(ValueError):
    """Paired weights must come as (x, -x) pairs."""


class ZeroVectorError(ValueError):
    """All-zero weights define no estimand."""


class NonUnitaryError(ValueError):
    """Input matrix is not unitary within tolerance."""


@dataclass(frozen=True)
class WeightVector:
    """Normalized weights defining the global quantity q = 2 sum_j w_j theta_j.

    paired scheme: length 2d, each pair sums to zero.
    reduced scheme: length d+1, last entry closes the sum to zero.
    Both carry unit 1-norm and no exactly-zero entries.
    """

    entries: np.ndarray
    scheme: str = "paired"

    def __post_init__(self) -> None:
        ent = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", ent)
        if self.scheme not in ("paired", "reduced"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "paired":
            if len(ent) < 2 or len(ent) % 2:
                raise ValueError("paired weights need even length >= 2")
            if np.max(np.abs(ent[0::2] + ent[1::2])) > 1e-9:
                raise PairingViolationError("pairs must sum to zero")
        else:
            if len(ent) < 2:
                raise ValueError("reduced weights need length >= 2")
            if abs(ent.sum()) > 1e-9:
                raise ValueError("reduced weights must sum to zero")
        if abs(np.abs(ent).sum() - 1.0) > 1e-12:
            raise ValueError("weights must have unit 1-norm")
        if np.any(ent == 0.0):
            raise ValueError("zero entries must be clamped before construction")

    @property
    def d(self) -> int:
        return len(self.entries) // 2 if self.scheme == "paired" else len(self.entries) - 1

    @property
    def modes(self) -> int:
        return len(self.entries)


def _clamp_and_normalize(ent: np.ndarray) -> np.ndarray:
    """Replace |w| < 1e-12 entries by signed 1e-12 and restore unit 1-norm.

    The optimal network needs w_j/sqrt(|w_j|), so exact zeros must go.
    """
    ent = ent / np.abs(ent).sum()
    small = np.abs(ent) < WEIGHT_FLOOR
    if np.any(small):
        signs = np.sign(ent[small])
        signs[signs == 0] = 1.0
        ent[small] = signs * WEIGHT_FLOOR
        ent = ent / np.abs(ent).sum()
    return ent


def validate_weights(raw, scheme: str = "paired") -> WeightVector:
    """Normalize raw weights into a WeightVector.

    paired: raw lists all 2d entries and must already honor the (x, -x)
    pairing up to 1e-9 of its own scale; the tiny residue is removed
    exactly.  reduced: raw lists the d sensing weights; the reference
    entry -sum(raw) is appended before normalization.
    """
    ent = np.asarray(raw, dtype=float).ravel()
    if ent.size == 0 or not np.all(np.isfinite(ent)):
        raise ValueError("weights must be a non-empty finite vector")
    if np.abs(ent).sum() == 0.0:
        raise ZeroVectorError("weights are all zero")
    if scheme == "paired":
        if len(ent) < 2 or len(ent) % 2:
            raise ValueError("paired weights need even length >= 2")
        unit = ent / np.abs(ent).sum()
        if np.max(np.abs(unit[0::2] + unit[1::2])) > 1e-9:
            raise PairingViolationError("paired weights must come as (x, -x) pairs")
        half = (unit[1::2] - unit[0::2]) / 2.0
        ent = np.stack([-half, half], axis=1).ravel()
    elif scheme == "reduced":
        ent = np.concatenate([ent, [-ent.sum()]])
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return WeightVector(_clamp_and_normalize(ent), scheme)


# ---------------------------------------------------------------------------
# Network synthesis


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() <= tol)


def unitary_completion(columns: np.ndarray) -> np.ndarray:
    """Complete orthonormal columns to a full unitary.

    Modified Gram-Schmidt over the standard basis with pivoting on the
    residual norm, re-orthogonalized once; deterministic for fixed input.
    """
    cols = [np.array(c, dtype=complex) for c in np.asarray(columns, dtype=complex).T]
    m = cols[0].shape[0]
    basis = [np.eye(m, dtype=complex)[:, k] for k in range(m)]
    while len(cols) < m:
        residuals = []
        for e in basis:
            r = e.copy()
            for c in cols:
                r -= c * np.vdot(c, r)
            residuals.append(r)
        norms = [np.linalg.norm(r) for r in residuals]
        pick = int(np.argmax(norms))
        if norms[pick] < 1e-8:
            raise NonUnitaryError("orthonormal completion degenerated")
        r = residuals[pick]
        # second MGS pass removes the O(eps) leakage of the first
        for c in cols:
            r -= c * np.vdot(c, r)
        cols.append(r / np.linalg.norm(r))
    return np.stack(cols, axis=1)


def build_optimal_network(w: WeightVector) -> LinearNetwork:
    """Network whose first two columns realize the weight vector.

    U_{j1} = sqrt(|w_j|) routes the nonclassical input by |w_j|, and
    U_{j2} = w_j/sqrt(|w_j|) signs the coherent input, which makes the
    entangling vector v_j = U_{j1} U_{j2}* equal w_j itself.  Length-4
    paired weights use the explicit four-mode construction; other sizes
    are completed by orthonormalization.
    """
    ent = w.entries
    col1 = np.sqrt(np.abs(ent)).astype(complex)
    col2 = (ent / np.sqrt(np.abs(ent))).astype(complex)
    if w.scheme == "paired" and w.modes == 4:
        return four_mode_network(w)
    if w.modes == 2:
        u = np.stack([col1, col2], axis=1)
    else:
        u = unitary_completion(np.stack([col1, col2], axis=1))
    assert is_unitary(u), "completion must return a unitary"
    return u


def four_mode_network(
    w: WeightVector, phases: tuple[float, float, float] = (0.0, math.pi, 0.0)
) -> LinearNetwork:
    """Explicit four-mode network with free phases on the last two columns.

    The default phases (0, pi, 0) give the all-real matrix; when
    w1 * w3 < 0 the third-column and fourth-column entries of rows 3 and 4
    trade places, which is what keeps the columns orthogonal.
    """
    if w.scheme != "paired" or w.modes != 4:
        raise ValueError("four_mode_network needs length-4 paired weights")
    p1, p2, p3 = phases
    w1, w3 = w.entries[0], w.entries[2]
    r1, r3 = math.sqrt(abs(w1)), math.sqrt(abs(w3))
    e1, e2, e3 = cmath.exp(1j * p1), cmath.exp(1j * p2), cmath.exp(1j * p3)
    e123 = cmath.exp(1j * (p1 + p2 - p3))
    u = np.zeros((4, 4), dtype=complex)
    u[:, 0] = np.sqrt(np.abs(w.entries))
    u[:, 1] = w.entries / np.sqrt(np.abs(w.entries))
    u[0, 2], u[1, 2] = r3 * e1, -r3 * e123
    u[2, 2], u[3, 2] = -r1 * e1, r1 * e123
    u[0, 3], u[1, 3] = r3 * e3, r3 * e2
    u[2, 3], u[3, 3] = -r1 * e3, -r1 * e2
    if w1 * w3 < 0:
        u[[2, 3], 2] = u[[3, 2], 2]
        u[[2, 3], 3] = u[[3, 2], 3]
    if not is_unitary(u):
        raise NonUnitaryError("four-mode construction failed unitarity")
    return u


# ---------------------------------------------------------------------------
# Mesh decomposition (rectangular nearest-neighbor nulling)


@dataclass(frozen=True)
class MeshElement:
    """Two-mode mixer on modes (mode, mode + 1), zero-based."""

    mode: int
    theta: float
    phi: float


@dataclass(frozen=True)
class BeamsplitterMesh:
    """Mixer sequence in application order, then per-mode output phases."""

    modes: int
    elements: tuple[MeshElement, ...]
    output_phases: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        phases = np.asarray(self.output_phases, dtype=float)
        if len(phases) != self.modes:
            raise ValueError("output_phases length must equal mode count")
        for el in self.elements:
            if not 0 <= el.mode < self.modes - 1:
                raise IndexError(f"mixer mode {el.mode} out of range for {self.modes} modes")
        object.__setattr__(self, "output_phases", phases)
        object.__setattr__(self, "elements", tuple(self.elements))


def mixer_matrix(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[c, -cmath.exp(1j * phi) * s], [cmath.exp(-1j * phi) * s, c]], dtype=complex
    )


def _apply_right_dagger(v: np.ndarray, c: int, theta: float, phi: float) -> None:
    """v <- v @ Tdag on columns (c, c+1), in place."""
    t = mixer_matrix(theta, phi).conj().T
    v[:, [c, c + 1]] = v[:, [c, c + 1]] @ t


def _apply_left(v: np.ndarray, r: int, theta: float, phi: float) -> None:
    """v <- T on rows (r-1, r) times v, in place."""
    t = mixer_matrix(theta, phi)
    v[[r - 1, r], :] = t @ v[[r - 1, r], :]


def mesh_decompose(u: LinearNetwork, tol: float = 1e-10) -> BeamsplitterMesh:
    """Decompose a unitary into nearest-neighbor mixers plus output phases.

    Rectangular nulling: even anti-diagonals are cleared by right
    multiplications (absorbed as input-side mixers), odd ones by left
    multiplications, leaving a diagonal D.  Left factors are then pushed
    through D, which the mixer convention leaves unchanged up to a phi
    shift, so the result is u = D * T_K ... T_1.
    """
    v = np.array(u, dtype=complex)
    m = v.shape[0]
    if not is_unitary(v, tol):
        raise NonUnitaryError("mesh_decompose needs a unitary matrix")
    right: list[MeshElement] = []
    left: list[MeshElement] = []
    for i0 in range(m - 1):
        if i0 % 2 == 0:
            for j in range(i0 + 1):
                r, c = m - 1 - j, i0 - j
                theta = math.atan2(abs(v[r, c]), abs(v[r, c + 1]))
                if theta < 1e-14:
                    continue
                phi = cmath.phase(v[r, c + 1]) - cmath.phase(v[r, c])
                _apply_right_dagger(v, c, theta, phi)
                right.append(MeshElement(c, theta, phi))
        else:
            for j in range(i0 + 1):
                r, c = m - 1 - i0 + j, j
                theta = math.atan2(abs(v[r, c]), abs(v[r - 1, c]))
                if theta < 1e-14:
                    continue
                phi = -(math.pi + cmath.phase(v[r, c]) - cmath.phase(v[r - 1, c]))
                _apply_left(v, r, theta, phi)
                left.append(MeshElement(r - 1, theta, phi))
    psi = np.angle(np.diagonal(v))
    # push each left factor through D: phi picks up psi[r] - psi[r-1] + pi
    pushed = [
        MeshElement(el.mode, el.theta, el.phi + psi[el.mode + 1] - psi[el.mode] + math.pi)
        for el in reversed(left)
    ]
    return BeamsplitterMesh(m, tuple(right + pushed), psi)


def mesh_reconstruct(mesh: BeamsplitterMesh, modes: int | None = None) -> LinearNetwork:
    """Compose mesh elements in application order, then the output phases."""
    m = mesh.modes if modes is None else modes
    if m != mesh.modes:
        raise ValueError(f"mesh is defined on {mesh.modes} modes, not {m}")
    u = np.eye(m, dtype=complex)
    for el in mesh.elements:
        block = mixer_matrix(el.theta, el.phi)
        u[[el.mode, el.mode + 1], :] = block @ u[[el.mode, el.mode + 1], :]
    return np.diag(np.exp(1j * mesh.output_phases)) @ u


# ---------------------------------------------------------------------------
# Serialization (text and JSON mirrors; mode indices are 1-based on disk)


def mesh_to_text(mesh: BeamsplitterMesh) -> str:
    lines = [f"BS {el.mode + 1} {el.mode + 2} {el.theta:.17g} {el.phi:.17g}" for el in mesh.elements]
    lines += [
        f"PS {j + 1} {phase:.17g}"
        for j, phase in enumerate(mesh.output_phases)
        if phase != 0.0
    ]
    return "\n".join(lines) + "\n" if lines else ""


def mesh_from_text(text: str, modes: int) -> BeamsplitterMesh:
    elements = []
    phases = np.zeros(modes)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "BS" and len(parts) == 5:
            i, j = int(parts[1]) - 1, int(parts[2]) - 1
            if j != i + 1:
                raise ValueError(f"line {lineno}: mixers act on adjacent modes")
            elements.append(MeshElement(i, float(parts[3]), float(parts[4])))
        elif parts[0] == "PS" and len(parts) == 3:
            phases[int(parts[1]) - 1] = float(parts[2])
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    return BeamsplitterMesh(modes, tuple(elements), phases)


def mesh_to_json(mesh: BeamsplitterMesh) -> dict:
    return {
        "modes": mesh.modes,
        "elements": [
            {"modes": [el.mode + 1, el.mode + 2], "theta": el.theta, "phi": el.phi}
            for el in mesh.elements
        ],
        "output_phases": list(mesh.output_phases),
    }


def mesh_from_json(data: dict) -> BeamsplitterMesh:
    elements = tuple(
        MeshElement(int(el["modes"][0]) - 1, float(el["theta"]), float(el["phi"]))
        for el in data["elements"]
    )
    return BeamsplitterMesh(int(data["modes"]), elements, np.asarray(data["output_phases"], dtype=float))


def matrix_to_json(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix, dtype=complex)]


def matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def dump_matrix(matrix: np.ndarray) -> str:
    return json.dumps(matrix_to_json(matrix))
