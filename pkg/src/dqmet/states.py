"""Catalog of single-mode bosonic input states.

Provides Fock-space embeddings, operator moments, metrological power, and
the spectral sums needed for mixed-state quantum Fisher information.

Convention: the squeeze operator is S(z) = exp[(z* a^2 - z a^+2)/2] with
z = r e^{i theta}, so squeezed vacuum has <a^2> = -e^{i theta} sinh r cosh r
and the theta = 0 state has reduced variance in the x = (a + a^+)/sqrt(2)
quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

DEFAULT_TAIL_THRESHOLD = 1e-10
# Eigenvalue pairs below this total are dropped from spectral double sums;
# the summand is bounded by min(lam_a, lam_b) so the error is below the drop.
PAIR_FLOOR = 1e-14
_AUTO_CUTOFF_START = 32
_AUTO_CUTOFF_MAX = 4096


class CutoffTooSmallError(ValueError):
    """Raised when a Fock truncation leaves more tail mass than allowed."""


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Coherent:
    """Coherent state |alpha>."""

    amplitude: complex

    def __post_init__(self) -> None:
        _require_finite("amplitude.real", self.amplitude.real)
        _require_finite("amplitude.imag", self.amplitude.imag)


@dataclass(frozen=True)
class SqueezedVacuum:
    """Squeezed vacuum S(r e^{i phase})|0>."""

    squeeze_modulus: float
    squeeze_phase: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("squeeze_modulus", self.squeeze_modulus)
        _require_finite("squeeze_phase", self.squeeze_phase)
        if self.squeeze_modulus < 0:
            raise ValueError("squeeze_modulus must be >= 0")


@dataclass(frozen=True)
class EvenCat:
    """Even cat state (|alpha_c> + |-alpha_c>) / norm.

    Only even photon numbers are populated, so <a> = <a^+ a a> = 0 while
    the state stays an exact eigenstate of a^2 with eigenvalue alpha_c^2.
    """

    amplitude: complex

    def __post_init__(self) -> None:
        _require_finite("amplitude.real", self.amplitude.real)
        _require_finite("amplitude.imag", self.amplitude.imag)


@dataclass(frozen=True)
class Fock:
    """Number eigenstate |photon_count>."""

    photon_count: int

    def __post_init__(self) -> None:
        if self.photon_count < 0 or self.photon_count != int(self.photon_count):
            raise ValueError("photon_count must be a nonnegative integer")


@dataclass(frozen=True)
class SqueezedThermal:
    """Squeezed thermal state S(z) rho_th(n_th) S(z)^+, the one mixed catalog entry."""

    squeeze_modulus: float
    squeeze_phase: float = 0.0
    thermal_occupation: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("squeeze_modulus", self.squeeze_modulus)
        _require_finite("squeeze_phase", self.squeeze_phase)
        _require_finite("thermal_occupation", self.thermal_occupation)
        if self.squeeze_modulus < 0:
            raise ValueError("squeeze_modulus must be >= 0")
        if self.thermal_occupation < 0:
            raise ValueError("thermal_occupation must be >= 0")


@dataclass(frozen=True)
class CustomFock:
    """State given directly by Fock coefficients (c_0, c_1, ...)."""

    coefficients: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) == 0:
            raise ValueError("coefficients must be non-empty")
        norm_sq = sum(abs(c) ** 2 for c in self.coefficients)
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValueError(f"coefficients must have unit norm, |c|^2 = {norm_sq!r}")


SingleModeState = Union[Coherent, SqueezedVacuum, EvenCat, Fock, SqueezedThermal, CustomFock]


@dataclass(frozen=True)
class StateMoments:
    """The five single-mode moments entering the Fisher-matrix coefficients.

    alpha1 = <a>, xi1 = <a^2>, beta1 = <a^+ a a>, n1 = <a^+ a>,
    nu1 = <(a^+ a)^2> - n1^2 (photon-number variance).
    """

    alpha1: complex
    xi1: complex
    beta1: complex
    n1: float
    nu1: float


@dataclass(frozen=True)
class SpectralState:
    """Spectral decomposition of a single-mode density operator.

    eigenvalues are sorted descending; eigenvectors[a] holds the Fock
    coefficients of the a-th eigenvector; truncation_mass is the discarded
    eigenvalue weight, so eigenvalues.sum() + truncation_mass = 1.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    truncation_mass: float

    def __post_init__(self) -> None:
        lam = np.asarray(self.eigenvalues, dtype=float)
        vecs = np.asarray(self.eigenvectors, dtype=complex)
        if lam.ndim != 1 or vecs.ndim != 2 or vecs.shape[0] != lam.shape[0]:
            raise ValueError("eigenvalues and eigenvectors shapes are inconsistent")
        if np.any(lam < -1e-14):
            raise ValueError("eigenvalues must be nonnegative")
        total = float(lam.sum()) + float(self.truncation_mass)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"eigenvalue mass plus truncation_mass is {total!r}, not 1")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def cutoff(self) -> int:
        return self.eigenvectors.shape[1] - 1


# ---------------------------------------------------------------------------
# Fock-space ladder operators (dense, dimension cutoff + 1)


def annihilation_matrix(cutoff: int) -> np.ndarray:
    """Matrix of a with a|n> = sqrt(n)|n-1> on the truncated basis."""
    a = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    n = np.arange(1, cutoff + 1)
    a[n - 1, n] = np.sqrt(n)
    return a


def number_matrix(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff + 1, dtype=float)).astype(complex)


def quadrature_matrix(cutoff: int, phase: float) -> np.ndarray:
    """X_phi = i(e^{-i phi} a^+ - e^{i phi} a)/sqrt(2); phase 0 gives p, pi/2 gives x."""
    a = annihilation_matrix(cutoff)
    return 1j * (cmath.exp(-1j * phase) * a.conj().T - cmath.exp(1j * phase) * a) / math.sqrt(2)


# ---------------------------------------------------------------------------
# Embedding: exact truncated coefficient vectors (not renormalized)


def _coherent_coeffs(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    if alpha == 0:
        vec = np.zeros(cutoff + 1, dtype=complex)
        vec[0] = 1.0
        return vec
    # log scale: |c_n| = exp(n ln|alpha| - |alpha|^2/2 - ln(n!)/2)
    logmag = n * math.log(abs(alpha)) - abs(alpha) ** 2 / 2 - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * cmath.phase(alpha))


def _squeezed_vacuum_coeffs(r: float, theta: float, cutoff: int) -> np.ndarray:
    vec = np.zeros(cutoff + 1, dtype=complex)
    if r == 0:
        vec[0] = 1.0
        return vec
    m = np.arange(cutoff // 2 + 1)
    # c_{2m} = sech(r)^{1/2} (-e^{i theta} tanh r)^m sqrt((2m)!)/(2^m m!)
    logmag = (
        -0.5 * math.log(math.cosh(r))
        + m * math.log(math.tanh(r))
        + 0.5 * gammaln(2 * m + 1)
        - m * math.log(2.0)
        - gammaln(m + 1)
    )
    vec[2 * m] = np.exp(logmag) * np.exp(1j * m * (theta + math.pi))
    return vec


def _even_cat_coeffs(alpha_c: complex, cutoff: int) -> np.ndarray:
    # build only even entries so parity zeros stay exact instead of 1e-17 residue
    vec = np.zeros(cutoff + 1, dtype=complex)
    coh = _coherent_coeffs(alpha_c, cutoff)
    # exact normalization 2(1 + e^{-2|alpha|^2}) avoids amplifying truncation error
    norm = math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(alpha_c) ** 2)))
    vec[0::2] = 2.0 * coh[0::2] / norm
    return vec


def _squeezed_fock_coeffs(r: float, theta: float, n: int, cutoff: int) -> np.ndarray:
    """S(z)|n> by the ladder recurrence chi_n = (cosh r a^+ + e^{-i theta} sinh r a) chi_{n-1}/sqrt(n)."""
    chi = _squeezed_vacuum_coeffs(r, theta, cutoff)
    ch, sh = math.cosh(r), math.sinh(r) * cmath.exp(-1j * theta)
    sq = np.sqrt(np.arange(cutoff + 2))
    for k in range(1, n + 1):
        raised = np.zeros(cutoff + 1, dtype=complex)
        raised[1:] = sq[1 : cutoff + 1] * chi[:-1]
        lowered = np.zeros(cutoff + 1, dtype=complex)
        lowered[:-1] = sq[1 : cutoff + 1] * chi[1:]
        chi = (ch * raised + sh * lowered) / math.sqrt(k)
    return chi


def _pure_coefficients(state: SingleModeState, cutoff: int) -> np.ndarray:
    """Exact coefficients of a pure catalog state, truncated without renormalizing."""
    if isinstance(state, Coherent):
        return _coherent_coeffs(state.amplitude, cutoff)
    if isinstance(state, SqueezedVacuum):
        return _squeezed_vacuum_coeffs(state.squeeze_modulus, state.squeeze_phase, cutoff)
    if isinstance(state, EvenCat):
        return _even_cat_coeffs(state.amplitude, cutoff)
    if isinstance(state, Fock):
        if state.photon_count > cutoff:
            raise CutoffTooSmallError(f"Fock({state.photon_count}) needs cutoff >= {state.photon_count}")
        vec = np.zeros(cutoff + 1, dtype=complex)
        vec[state.photon_count] = 1.0
        return vec
    if isinstance(state, CustomFock):
        coeffs = np.asarray(state.coefficients, dtype=complex)
        if len(coeffs) > cutoff + 1 and np.any(np.abs(coeffs[cutoff + 1 :]) > 0):
            raise CutoffTooSmallError(f"CustomFock support exceeds cutoff {cutoff}")
        vec = np.zeros(cutoff + 1, dtype=complex)
        vec[: min(len(coeffs), cutoff + 1)] = coeffs[: cutoff + 1]
        return vec
    raise TypeError(f"not a pure catalog state: {state!r}")


def fock_embed(
    state: SingleModeState,
    cutoff: int,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
):
    """Embed a catalog state in the truncated Fock basis {|0>..|cutoff>}.

    Pure states return (coefficients, tail_mass) with the coefficient vector
    renormalized after truncation and tail_mass = 1 - pre-truncation norm.
    SqueezedThermal returns a SpectralState whose eigenvectors are squeezed
    Fock states and whose eigenvalues are the thermal weights
    n_th^n / (n_th + 1)^{n+1}, kept until their cumulative mass reaches
    1 - tail_threshold.

    Raises CutoffTooSmallError when the tail mass exceeds tail_threshold.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if isinstance(state, SqueezedThermal):
        return _embed_squeezed_thermal(state, cutoff, tail_threshold)
    vec = _pure_coefficients(state, cutoff)
    norm_sq = float(np.vdot(vec, vec).real)
    tail = max(0.0, 1.0 - norm_sq)
    if tail > tail_threshold:
        raise CutoffTooSmallError(
            f"tail mass {tail:.3e} exceeds {tail_threshold:.3e} at cutoff {cutoff}"
        )
    return vec / math.sqrt(norm_sq), tail


def _embed_squeezed_thermal(
    state: SqueezedThermal, cutoff: int, tail_threshold: float
) -> SpectralState:
    nt = state.thermal_occupation
    if nt == 0:
        vec, tail = fock_embed(
            SqueezedVacuum(state.squeeze_modulus, state.squeeze_phase), cutoff, tail_threshold
        )
        return SpectralState(np.array([1.0 - tail]), vec[None, :], tail)
    # thermal weights decay geometrically; keep until cumulative >= 1 - threshold
    ratio = nt / (nt + 1.0)
    count = 1 + int(math.ceil(math.log(tail_threshold) / math.log(ratio)))
    count = min(count, cutoff + 1)
    n = np.arange(count)
    lam = (1.0 / (nt + 1.0)) * ratio**n
    mass = float(lam.sum())
    if 1.0 - mass > tail_threshold:
        raise CutoffTooSmallError(
            f"thermal weight tail {1.0 - mass:.3e} exceeds {tail_threshold:.3e} at cutoff {cutoff}"
        )
    vecs = np.array(
        [
            _squeezed_fock_coeffs(state.squeeze_modulus, state.squeeze_phase, int(k), cutoff)
            for k in n
        ]
    )
    return SpectralState(lam, vecs, 1.0 - mass)


def as_spectral(state: SingleModeState, cutoff: int, tail_threshold: float = DEFAULT_TAIL_THRESHOLD) -> SpectralState:
    """Any catalog state as a SpectralState; pure states become rank one."""
    embedded = fock_embed(state, cutoff, tail_threshold)
    if isinstance(embedded, SpectralState):
        return embedded
    vec, tail = embedded
    return SpectralState(np.array([1.0]), vec[None, :], 0.0)


# ---------------------------------------------------------------------------
# Moments


def moments_from_fock(coeffs: np.ndarray) -> StateMoments:
    """Moments of a normalized pure state given by Fock coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    n = np.arange(len(c), dtype=float)
    prob = np.abs(c) ** 2
    rt1 = np.sqrt(n[1:])  # sqrt(n) for n = 1..
    alpha1 = complex(np.sum(np.conj(c[:-1]) * c[1:] * rt1))
    if len(c) > 2:
        xi1 = complex(np.sum(np.conj(c[:-2]) * c[2:] * np.sqrt(n[1:-1] * n[2:])))
    else:
        xi1 = 0.0 + 0.0j
    beta1 = complex(np.sum(np.conj(c[:-1]) * c[1:] * rt1 * n[:-1]))
    n1 = float(np.sum(prob * n))
    nsq = float(np.sum(prob * n**2))
    return StateMoments(alpha1, xi1, beta1, n1, nsq - n1**2)


def _moments_from_spectral(rho: SpectralState) -> StateMoments:
    lam = rho.eigenvalues
    raw = np.zeros(5, dtype=complex)
    for a in range(len(lam)):
        m = moments_from_fock(rho.eigenvectors[a])
        nsq = m.nu1 + m.n1**2
        raw += lam[a] * np.array([m.alpha1, m.xi1, m.beta1, m.n1, nsq])
    n1 = raw[3].real
    return StateMoments(complex(raw[0]), complex(raw[1]), complex(raw[2]), n1, raw[4].real - n1**2)


def _closed_form_moments(state: SingleModeState) -> StateMoments | None:
    if isinstance(state, Coherent):
        a = state.amplitude
        n = abs(a) ** 2
        return StateMoments(a, a * a, n * a, n, n)
    if isinstance(state, Fock):
        return StateMoments(0j, 0j, 0j, float(state.photon_count), 0.0)
    if isinstance(state, SqueezedVacuum):
        r, th = state.squeeze_modulus, state.squeeze_phase
        sh, ch = math.sinh(r), math.cosh(r)
        n1 = sh * sh
        return StateMoments(0j, -cmath.exp(1j * th) * sh * ch, 0j, n1, 2.0 * n1 * (n1 + 1.0))
    if isinstance(state, SqueezedThermal):
        r, th, nt = state.squeeze_modulus, state.squeeze_phase, state.thermal_occupation
        sh, ch = math.sinh(r), math.cosh(r)
        n1 = (2 * nt + 1) * sh * sh + nt
        # Var(n) splits into a cosh(2r)-scaled thermal part and a pair-production
        # part; both reduce correctly at r = 0 and at nt = 0.
        nu1 = math.cosh(2 * r) ** 2 * (nt * nt + nt) + 2 * sh * sh * ch * ch * (
            nt * nt + (nt + 1.0) ** 2
        )
        return StateMoments(0j, -cmath.exp(1j * th) * (2 * nt + 1) * sh * ch, 0j, n1, nu1)
    if isinstance(state, EvenCat):
        x = abs(state.amplitude) ** 2
        n1 = x * math.tanh(x)
        return StateMoments(0j, state.amplitude**2, 0j, n1, x * x + n1 - n1 * n1)
    return None


def moments_of(
    state: SingleModeState,
    cutoff: int | None = None,
    method: str = "auto",
) -> StateMoments:
    """Extract the five moments of a catalog state.

    method "auto" uses closed forms for coherent, Fock, squeezed vacuum and
    squeezed thermal states and Fock summation otherwise; "closed" and
    "fock" force one path.  With cutoff None the Fock path doubles the
    cutoff from 32 until the embedding tail drops below 1e-10 (capped at
    4096); an explicit cutoff is checked, not grown.
    """
    if method not in ("auto", "closed", "fock"):
        raise ValueError(f"unknown method {method!r}")
    closed = _closed_form_moments(state)
    if method == "closed":
        if closed is None:
            raise ValueError(f"no closed-form moments for {type(state).__name__}")
        return closed
    if method == "auto" and closed is not None and not isinstance(state, EvenCat):
        return closed
    if cutoff is not None:
        embedded = fock_embed(state, cutoff)
    else:
        embedded = None
        c = _AUTO_CUTOFF_START
        while True:
            try:
                embedded = fock_embed(state, c)
                break
            except CutoffTooSmallError:
                if c >= _AUTO_CUTOFF_MAX:
                    raise
                c = min(2 * c, _AUTO_CUTOFF_MAX)
    if isinstance(embedded, SpectralState):
        return _moments_from_spectral(embedded)
    vec, _tail = embedded
    return moments_from_fock(vec)


# ---------------------------------------------------------------------------
# Spectral-sum Fisher information of single-mode operators


def _pair_weights(lam: np.ndarray) -> np.ndarray:
    """W_ab = lam_a lam_b / (lam_a + lam_b) over all pairs, including a = b."""
    s = lam[:, None] + lam[None, :]
    w = np.zeros_like(s)
    keep = s > PAIR_FLOOR
    w[keep] = (lam[:, None] * lam[None, :])[keep] / s[keep]
    return w


def _sandwich(rho: SpectralState, op: np.ndarray) -> np.ndarray:
    """Matrix elements <a|op|b> in the eigenvector basis."""
    return rho.eigenvectors.conj() @ op @ rho.eigenvectors.T


def operator_qfi(rho: SpectralState, op: np.ndarray) -> float:
    """Quantum Fisher information 4 Tr[G^2 rho] - 8 sum_ab W_ab |<a|G|b>|^2 for hermitian G."""
    lam = rho.eigenvalues
    second = float(
        np.sum(lam * np.real(np.einsum("ai,ij,aj->a", rho.eigenvectors.conj(), op @ op, rho.eigenvectors)))
    )
    m = _sandwich(rho, op)
    return 4.0 * second - 8.0 * float(np.sum(_pair_weights(lam) * np.abs(m) ** 2))


def mixed_quadrature_qfi(rho: SpectralState, phase: float) -> float:
    """QFI of rho for displacement generated by the quadrature X_phase."""
    return operator_qfi(rho, quadrature_matrix(rho.cutoff, phase))


def number_qfi(rho: SpectralState) -> float:
    """QFI of rho for phase rotation generated by the number operator."""
    return operator_qfi(rho, number_matrix(rho.cutoff))


def quadrature_qfi_harmonics(rho: SpectralState) -> tuple[float, complex]:
    """Exact harmonic form F(phi) = C0 + Re[C2 e^{2 i phi}] from three samples.

    X_phi is linear in e^{+-i phi}, so F is exactly this trigonometric
    polynomial; three evaluations determine it.
    """
    f0 = mixed_quadrature_qfi(rho, 0.0)
    f_half = mixed_quadrature_qfi(rho, math.pi / 2)
    f_quarter = mixed_quadrature_qfi(rho, math.pi / 4)
    c0 = (f0 + f_half) / 2.0
    c2 = complex((f0 - f_half) / 2.0, c0 - f_quarter)
    return c0, c2


def max_quadrature_qfi(rho: SpectralState) -> tuple[float, float]:
    """Maximum of F_{X_phi} over phi and the maximizing phase in [0, pi)."""
    c0, c2 = quadrature_qfi_harmonics(rho)
    if abs(c2) < 1e-300:
        return c0, 0.0
    phi = (-cmath.phase(c2) / 2.0) % math.pi
    return c0 + abs(c2), phi


def mixed_cross_term(rho: SpectralState) -> complex:
    """Fisher cross element between the number and annihilation generators.

    Returns 2 Tr[(n a + a n) rho] - 8 sum_ab W_ab <a|n|b><b|a|a_op>.
    For a pure state this reduces to 4(beta1 + alpha1/2 - n1 alpha1).
    """
    cut = rho.cutoff
    a_op = annihilation_matrix(cut)
    n_op = number_matrix(cut)
    lam = rho.eigenvalues
    sym = n_op @ a_op + a_op @ n_op
    first = complex(
        np.sum(lam * np.einsum("ai,ij,aj->a", rho.eigenvectors.conj(), sym, rho.eigenvectors))
    )
    mn = _sandwich(rho, n_op)
    ma = _sandwich(rho, a_op)
    return 2.0 * first - 8.0 * complex(np.sum(_pair_weights(lam) * mn * ma.T))


# ---------------------------------------------------------------------------
# Metrological power


def metrological_power(state: SingleModeState | SpectralState, cutoff: int | None = None) -> float:
    """Quadrature-sensing advantage over coherent light, per photon pair with n2.

    Pure states: W = n1 - |alpha1|^2 + |xi1 - alpha1^2|.  Squeezed thermal:
    (e^{2r}/(1 + 2 n_th) - 1)/2 clamped at 0.  A SpectralState is scored by
    max_phi F_{X_phi}/4 - 1/2, clamped at 0; for pure states the two
    prescriptions coincide because max_phi Var(X_phi) = W + 1/2.
    """
    if isinstance(state, SpectralState):
        fmax, _ = max_quadrature_qfi(state)
        return max(0.0, fmax / 4.0 - 0.5)
    if isinstance(state, SqueezedThermal):
        r, nt = state.squeeze_modulus, state.thermal_occupation
        return max(0.0, (math.exp(2 * r) / (1.0 + 2.0 * nt) - 1.0) / 2.0)
    m = moments_of(state, cutoff=cutoff)
    return m.n1 - abs(m.alpha1) ** 2 + abs(m.xi1 - m.alpha1**2)
