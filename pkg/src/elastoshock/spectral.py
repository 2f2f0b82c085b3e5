"""Numerical Kreiss-Lopatinski oracle for planar elastic shocks.

Everything here is built from the constant-coefficient linearized problem
behind the shock, in the unknowns U = (p, v1, v2, v3, F_1, F_2, F_3) where
F_j = (F_1j, F_2j, F_3j) is the j-th column of the perturbed deformation
gradient.  Frequencies are s = eta + i xi (Laplace, eta >= 0) and
omega' = (w2, w3) (Fourier, tangential).

The oracle never touches the closed-form margin: it evaluates the reduced
Lopatinski function on the incoming root lambda+ and searches for its zeros.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .analytic import StabilityReport, Verdict, circle_coefficients
from .errors import DegenerateFrequencyError, InternalConsistencyError, ParameterError
from .states import DimensionlessShock

ETA_LIMIT_REL = 1e-8


# --- interior symbol -----------------------------------------------------------

def interior_matrices(shock: DimensionlessShock) -> tuple[np.ndarray, list[np.ndarray]]:
    """A0 = diag(1, M^2 I3, I9) and the three coefficient matrices A1, A2, A3."""
    F = shock.F
    A0 = np.diag([1.0] + [shock.M**2] * 3 + [1.0] * 9)
    mats = []
    for j in range(3):
        B = np.zeros((13, 13))
        B[0, 1 + j] = B[1 + j, 0] = 1.0
        for k in range(3):
            for i in range(3):
                B[1 + i, 4 + 3 * k + i] = B[4 + 3 * k + i, 1 + i] = -F[j, k]
        mats.append(A0 + B if j == 0 else B)
    return A0, mats


def interior_symbol(shock: DimensionlessShock, s, lam, omega) -> np.ndarray:
    """s A0 + lam A1 + i w2 A2 + i w3 A3, broadcast over array arguments."""
    A0, (A1, A2, A3) = interior_matrices(shock)
    w2, w3 = omega
    s, lam, w2, w3 = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (s, lam, w2, w3)))
    e = (..., None, None)
    return s[e] * A0 + lam[e] * A1 + 1j * w2[e] * A2 + 1j * w3[e] * A3


def dispersion_product(shock: DimensionlessShock, s, lam, omega):
    """Factored form Omega^7 q^2 (q - lam^2 + w^2) of det(interior_symbol)."""
    w2, w3 = (np.asarray(x, dtype=float) for x in omega)
    s = np.asarray(s, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    Om = s + lam
    zeta = (lam, 1j * w2, 1j * w3)
    sig_sq = 0
    for j in range(3):
        col = shock.F[:, j]
        sig = col[0] * zeta[0] + col[1] * zeta[1] + col[2] * zeta[2]
        sig_sq = sig_sq + sig**2
    q = shock.M**2 * Om**2 - sig_sq
    return Om**7 * q**2 * (q - lam**2 + w2**2 + w3**2)


# --- coefficients in unnormalized omega' ---------------------------------------

def _omega_terms(shock: DimensionlessShock, w2, w3):
    """(l, fw2, w2sum): l = l2 w2 + l3 w3 = l0 |w|, fw2 = |w2 row2 + w3 row3|^2, |w|^2."""
    w2 = np.asarray(w2, dtype=float)
    w3 = np.asarray(w3, dtype=float)
    F = shock.F
    l = shock.l2 * w2 + shock.l3 * w3
    g22, g23, g33 = F[1] @ F[1], F[1] @ F[2], F[2] @ F[2]
    fw2 = g22 * w2**2 + 2 * g23 * w2 * w3 + g33 * w3**2
    return l, fw2, w2**2 + w3**2


def lambda_roots(shock: DimensionlessShock, s, omega):
    """Both roots (lam_a, lam_b) of the effective dispersion relation.

    M^2 (s+lam)^2 - M*^2 lam^2 + K0 w^2 = 2 i l0 lam w, written with the signed
    tangential coupling l = l2 w2 + l3 w3.
    """
    s = np.asarray(s, dtype=complex)
    l, fw2, ww = _omega_terms(shock, *omega)
    M2, Ms2, b2 = shock.M**2, shock.Mstar**2, shock.beta**2
    K0w = ww + fw2
    root = np.sqrt(M2 * Ms2 * s**2 - 2j * l * M2 * s + (K0w * b2 - l**2))
    base = M2 * s - 1j * l
    return (base + root) / b2, (base - root) / b2


def _select_positive(la, lb):
    ra, rb = np.real(la), np.real(lb)
    if np.any((ra > 0) == (rb > 0)):
        bad = np.argwhere(np.atleast_1d((ra > 0) == (rb > 0)))
        raise InternalConsistencyError(
            f"expected exactly one root with Re > 0 for eta > 0; failed at {len(bad)} samples"
        )
    return np.where(ra > 0, la, lb)


def lambda_plus(shock: DimensionlessShock, s, omega, eta_rel: float = ETA_LIMIT_REL):
    """The incoming root lam+ (Re > 0) at eta > 0, or its limit as eta -> +0.

    On the imaginary axis the branch is fixed by evaluating at
    eta = eta_rel * max(1, |xi|, |omega'|) and taking the nearer root.
    """
    s = np.asarray(s, dtype=complex)
    w2, w3 = (np.asarray(x, dtype=float) for x in omega)
    s, w2, w3 = np.broadcast_arrays(s, w2, w3)
    ww = np.hypot(w2, w3)
    if np.any((np.abs(s) == 0) & (ww == 0)):
        raise ParameterError("(s, omega') must not vanish together")
    if np.any(s.real < 0):
        raise ParameterError("Re s must be nonnegative")
    on_axis = s.real == 0
    if not np.any(on_axis):
        return _select_positive(*lambda_roots(shock, s, (w2, w3)))
    eta = np.where(on_axis, eta_rel * np.maximum(1.0, np.maximum(np.abs(s.imag), ww)), s.real)
    guide = _select_positive(*lambda_roots(shock, eta + 1j * s.imag, (w2, w3)))
    la, lb = lambda_roots(shock, s, (w2, w3))
    at_axis = np.where(np.abs(la - guide) <= np.abs(lb - guide), la, lb)
    return np.where(on_axis, at_axis, guide)


def effective_dispersion_residual(shock: DimensionlessShock, s, lam, omega):
    """Relative residual of the effective dispersion relation at (s, lam)."""
    l, fw2, ww = _omega_terms(shock, *omega)
    s = np.asarray(s, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    Om = s + lam
    terms = (shock.M**2 * Om**2, -shock.Mstar**2 * lam**2, (ww + fw2) * (1 + 0j), -2j * l * lam)
    scale = np.maximum.reduce([np.abs(t) for t in terms])
    return np.abs(sum(terms)) / np.where(scale > 0, scale, 1.0)


# --- boundary symbol and kernel --------------------------------------------------

def boundary_coefficients(shock: DimensionlessShock) -> dict[str, float]:
    M2 = shock.M**2
    return {
        "d0": (shock.Mstar**2 + M2) / (2 * M2),
        "a0": -shock.beta**2 * shock.R / (2 * M2),
        "l2": shock.l2,
        "l3": shock.l3,
        "R": shock.R,
    }


def boundary_symbol(shock: DimensionlessShock, s: complex, omega) -> np.ndarray:
    """12 x 13 Fourier-Laplace symbol of the shock boundary conditions.

    Rows: normal velocity relation, the two cross-differentiated tangential
    relations, the three first-row deformation relations and the six
    relations for rows 2-3 of F.
    """
    c = boundary_coefficients(shock)
    w2, w3 = (float(x) for x in omega)
    M2, R, Fs = shock.M**2, shock.R, shock.F
    star = s - 1j * (c["l2"] * w2 + c["l3"] * w3) / M2
    B = np.zeros((12, 13), dtype=complex)
    B[0, 1] = 1.0
    B[0, 0] = c["d0"]
    B[0, 2] = -c["l2"] / (M2 * R)
    B[0, 3] = -c["l3"] / (M2 * R)
    for r, (k, wk) in enumerate(((2, w2), (3, w3)), start=1):
        B[r, k] = star
        B[r, 0] = -c["a0"] * 1j * wk
    for j in range(3):
        row = 3 + j
        B[row, 4 + 3 * j] = 1.0                # F_1j
        B[row, 0] = Fs[0, j]
        B[row, 2] = -Fs[1, j] / R
        B[row, 3] = -Fs[2, j] / R
    row = 6
    for k in (2, 3):
        for j in range(3):
            B[row, 4 + 3 * j + (k - 1)] = 1.0    # F_kj
            B[row, k] = -Fs[0, j]                  # v_k
            row += 1
    return B


def kernel_closed_form(shock: DimensionlessShock, s: complex, omega) -> np.ndarray:
    """Unnormalized boundary kernel vector U0 from the closed-form components."""
    c = boundary_coefficients(shock)
    w2, w3 = (float(x) for x in omega)
    M2, R, F = shock.M**2, shock.R, shock.F
    l = c["l2"] * w2 + c["l3"] * w3
    a0 = c["a0"]
    Fw = w2 * F[1] + w3 * F[2]
    p = s - 1j * l / M2
    u = np.zeros(13, dtype=complex)
    u[0] = p
    u[1] = -c["d0"] * s + 1j * l / M2
    u[2] = 1j * a0 * w2
    u[3] = 1j * a0 * w3
    u[[4, 7, 10]] = -p * F[0] + 1j * a0 / R * Fw
    u[[5, 8, 11]] = 1j * a0 * w2 * F[0]
    u[[6, 9, 12]] = 1j * a0 * w3 * F[0]
    return u


def boundary_kernel(shock: DimensionlessShock, s: complex, omega, rank_tol: float = 1e-12) -> np.ndarray:
    """Unit-length kernel vector; phase fixed so the largest component is real positive."""
    w2, w3 = (float(x) for x in omega)
    if s == 0 and w2 == 0 and w3 == 0:
        raise ParameterError("(s, omega') must not vanish together")
    B = boundary_symbol(shock, s, (w2, w3))
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[-1] <= rank_tol * sv[0]:
        raise DegenerateFrequencyError(f"boundary symbol rank < 12 at s={s}, omega'={(w2, w3)}")
    u = kernel_closed_form(shock, s, (w2, w3))
    u = u / np.linalg.norm(u)
    k = int(np.argmax(np.abs(u)))
    u = u * (abs(u[k]) / u[k])
    res = np.linalg.norm(B @ u) / sv[0]
    if res > 1e-10:
        raise InternalConsistencyError(f"closed-form kernel residual {res:.3e} at s={s}")
    return u


def a1u0(shock: DimensionlessShock, s: complex, omega) -> np.ndarray:
    """The row A1 U0 entering the Lopatinski matrix (matrix product)."""
    _, (A1, _, _) = interior_matrices(shock)
    return A1 @ kernel_closed_form(shock, s, omega)


def a1u0_display(shock: DimensionlessShock, s: complex, omega) -> np.ndarray:
    """Compact closed form of A1 U0; equals (M / beta) times :func:`a1u0`."""
    w2, w3 = (float(x) for x in omega)
    F, M, R = shock.F, shock.M, shock.R
    l = shock.l2 * w2 + shock.l3 * w3
    out = np.zeros(13, dtype=complex)
    out[0] = s
    out[1] = 1j * l - s * M**2
    out[2] = 1j * R * (M**2 - shock.M1**2) * w2
    out[3] = 1j * R * (M**2 - shock.M1**2) * w3
    out[[4, 7, 10]] = -s * F[0] + 1j * (w2 * F[1] + w3 * F[2])
    return -shock.beta / (2 * M) * out


# --- Lopatinski determinant ----------------------------------------------------------

def reduced_lopatinski(shock: DimensionlessShock, s, lam, omega):
    """Omega (M^2 lam s + K w^2) + (M*^2 lam^2 - K0 w^2) s - 2 i l0 w lam^2."""
    l, fw2, ww = _omega_terms(shock, *omega)
    s = np.asarray(s, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    Om = s + lam
    M2 = shock.M**2
    Kw = shock.R * (M2 - shock.M1**2) * ww + fw2
    K0w = ww + fw2
    return Om * (M2 * lam * s + Kw) + (shock.Mstar**2 * lam**2 - K0w) * s - 2j * l * lam**2


def reduced_substituted(shock: DimensionlessShock, s, lam, omega):
    """Omega (M^2 Omega^2 - M^2 lam^2 + K w^2 - 2 i l0 w lam); equals the
    reduced function wherever lam solves the effective dispersion relation."""
    l, fw2, ww = _omega_terms(shock, *omega)
    s = np.asarray(s, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    Om = s + lam
    M2 = shock.M**2
    Kw = shock.R * (M2 - shock.M1**2) * ww + fw2
    return Om * (M2 * Om**2 - M2 * lam**2 + Kw - 2j * l * lam)


def lopatinski_prefactor(shock: DimensionlessShock, s, lam, omega):
    """det L / reduced.  The minus sign comes from the scaling of the kernel vector."""
    _, _, ww = _omega_terms(shock, *omega)
    Om = np.asarray(s, dtype=complex) + lam
    return -shock.beta**2 * Om**6 * (ww - lam**2) ** 2 / (2 * shock.M**2)


@dataclass(frozen=True)
class LopatinskiValues:
    full_det: complex
    reduced: complex
    lam: complex
    replaced_row: int
    prefactor: complex


def lopatinski_values(shock: DimensionlessShock, s: complex, omega, rank_tol: float = 1e-10) -> LopatinskiValues:
    """Full 13 x 13 Lopatinski determinant and the reduced scalar at lam+.

    Row 0 of the interior symbol is replaced by A1 U0.  If the other twelve
    rows are rank deficient the first row whose removal leaves rank 12 is
    replaced instead (``replaced_row`` records it; the prefactor relation then
    no longer applies).
    """
    lam = complex(lambda_plus(shock, s, omega))
    S = interior_symbol(shock, s, lam, omega)
    row_vec = a1u0(shock, s, omega)
    replaced = 0
    for r in range(13):
        rest = np.delete(S, r, axis=0)
        sv = np.linalg.svd(rest, compute_uv=False)
        if sv[-1] > rank_tol * sv[0]:
            replaced = r
            break
    else:
        raise DegenerateFrequencyError(f"interior symbol rank < 12 at s={s}")
    L = S.copy()
    L[replaced] = row_vec
    return LopatinskiValues(
        full_det=complex(np.linalg.det(L)),
        reduced=complex(reduced_lopatinski(shock, s, lam, omega)),
        lam=lam,
        replaced_row=replaced,
        prefactor=complex(lopatinski_prefactor(shock, s, lam, omega)),
    )


# --- transition points and the lower-bound certificate -------------------------------

def _unit_terms(shock: DimensionlessShock, omega_bar):
    w2, w3 = (float(x) for x in omega_bar)
    if abs(math.hypot(w2, w3) - 1.0) > 1e-12:
        raise ParameterError("omega_bar must be a unit vector")
    l, fw2, _ = _omega_terms(shock, w2, w3)
    return abs(float(l)), float(fw2)


@dataclass(frozen=True)
class TransitionData:
    xi1: float
    xi2: float
    delta1: float
    delta2: float
    sigma: float
    K1: float
    K2: float


def transition_points(shock: DimensionlessShock, omega_bar) -> TransitionData:
    """Frequencies where the two imaginary-axis roots merge (omega = 1)."""
    shock.require_admissible()
    l0, M2sq = _unit_terms(shock, omega_bar)
    M, Ms2, beta = shock.M, shock.Mstar**2, shock.beta
    sigma = math.sqrt(Ms2 * (1.0 + M2sq) - l0**2)
    xi1 = (M * l0 + beta * sigma) / (M * Ms2)
    xi2 = (M * l0 - beta * sigma) / (M * Ms2)
    d1 = (M**2 * xi1 - l0) / beta**2
    d2 = (M**2 * xi2 - l0) / beta**2
    K1 = (M * sigma - l0 * beta) ** 2 / Ms2**2
    K2 = (M * sigma + l0 * beta) ** 2 / Ms2**2
    return TransitionData(xi1, xi2, d1, d2, sigma, K1, K2)


def transition_discriminant(shock: DimensionlessShock, omega_bar, xi):
    """M^2 M*^2 xi^2 - 2 |l0| M^2 xi + l0^2 - K0 beta^2 (omega = 1)."""
    l0, M2sq = _unit_terms(shock, omega_bar)
    M2 = shock.M**2
    xi = np.asarray(xi, dtype=float)
    return M2 * shock.Mstar**2 * xi**2 - 2 * l0 * M2 * xi + l0**2 - (1.0 + M2sq) * shock.beta**2


def delta_pm(shock: DimensionlessShock, omega_bar, xi, clamp: float = 1e-12):
    """Imaginary parts (delta+, delta-) of the roots on the imaginary axis.

    The discriminant is evaluated in factored form M^2 M*^2 (xi - xi1)(xi - xi2)
    through the closed-form transition points, which keeps it accurate near
    them (the expanded quadratic loses half the digits under the square
    root).  Between the transition points the roots leave the axis; values
    there within ``clamp`` of zero are rounded, anything else raises.
    """
    l0, _ = _unit_terms(shock, omega_bar)
    td = transition_points(shock, omega_bar)
    M2, Ms2, b2 = shock.M**2, shock.Mstar**2, shock.beta**2
    xi = float(xi)
    disc = M2 * Ms2 * (xi - td.xi1) * (xi - td.xi2)
    if disc < 0:
        scale = M2 * Ms2 * max(xi * xi, td.xi1**2, td.xi2**2)
        if disc < -clamp * scale:
            raise ParameterError(f"xi={xi} lies between the transition points (complex roots)")
        disc = 0.0
    sgn = 1.0 if Ms2 * xi - l0 >= 0 else -1.0
    root = sgn * math.sqrt(disc)
    base = M2 * xi - l0
    return (base + root) / b2, (base - root) / b2


@dataclass(frozen=True)
class SubsonicCertificate:
    applicable: bool
    eta_candidate: float = math.nan
    positivity_gap: float = math.nan
    lam: float = math.nan
    xi: float = math.nan
    residual_imag: float = math.nan
    residual_real: float = math.nan

    @property
    def passed(self) -> bool:
        return self.applicable and self.eta_candidate < 0 and self.positivity_gap > 0


def subsonic_certificate(shock: DimensionlessShock, omega_bar) -> SubsonicCertificate:
    """For K < K0: the only candidate common root has eta < 0 (omega = 1).

    The real incoming root is lam = sqrt(K0 - K) / beta.  Writing g = eta + lam,
    the imaginary part of the boundary relation gives M^2 xi g = |l0| lam and
    the real part M^2 (eta^2 - xi^2 + 2 eta lam) + K = 0; eliminating xi leaves
    a quadratic in g^2 whose nonnegative root is theta.  When l0 = 0 and
    theta = 0 the first relation holds for any xi and the second fixes it.
    """
    shock.require_admissible()
    l0, M2sq = _unit_terms(shock, omega_bar)
    M2 = shock.M**2
    K0 = 1.0 + M2sq
    K = shock.R * (M2 - shock.M1**2) + M2sq
    if not K < K0:
        return SubsonicCertificate(False)
    lam = math.sqrt(K0 - K) / shock.beta
    a = M2 * lam**2 - K
    c = 4 * l0**2 * lam**2
    root = math.sqrt(a * a + c)
    # conjugate form avoids cancellation when a < 0
    theta = (a + root) / (2 * M2) if a >= 0 else c / (2 * M2 * (root - a))
    gamma = math.sqrt(theta)
    eta = gamma - lam
    if gamma > 0:
        xi = l0 * lam / (M2 * gamma)
    else:
        xi = math.sqrt(max(0.0, -a) / M2)
    t2 = (M2 * xi * gamma, -l0 * lam)
    t3 = (M2 * eta**2, -M2 * xi**2, 2 * M2 * eta * lam, K)
    res2 = abs(sum(t2)) / max(max(abs(t) for t in t2), 1e-300)
    res3 = abs(sum(t3)) / max(abs(t) for t in t3)
    return SubsonicCertificate(True, eta, K * M2 - l0**2, lam, xi, res2, res3)


# --- frequency scan -----------------------------------------------------------------

@dataclass
class ScanGrid:
    xi_min: float = -10.0
    xi_max: float = 10.0
    xi_count: int = 2001
    theta_count: int = 256
    etas: tuple[float, ...] = (0.0, 1e-4, 1e-2, 1e-1)
    auto_expand: bool = True
    max_xi_count: int = 20001

    def xi(self) -> np.ndarray:
        return np.linspace(self.xi_min, self.xi_max, self.xi_count)

    def theta(self) -> np.ndarray:
        return np.arange(self.theta_count) * (2 * math.pi / self.theta_count)


def _expanded(shock: DimensionlessShock, grid: ScanGrid) -> ScanGrid:
    if not grid.auto_expand:
        return grid
    th = grid.theta()
    bound = 0.0
    for t in th:
        td = transition_points(shock, (math.cos(t), math.sin(t)))
        bound = max(bound, abs(td.xi1), abs(td.xi2))
    need = 2.0 * bound
    if need <= max(abs(grid.xi_min), abs(grid.xi_max)):
        return grid
    lo, hi = min(grid.xi_min, -need), max(grid.xi_max, need)
    spacing = (grid.xi_max - grid.xi_min) / (grid.xi_count - 1)
    count = min(grid.max_xi_count, int(math.ceil((hi - lo) / spacing)) + 1)
    return ScanGrid(lo, hi, count, grid.theta_count, grid.etas, False, grid.max_xi_count)


def reduced_on_grid(shock: DimensionlessShock, eta: float, xi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Reduced Lopatinski function at lam+ on a (theta, xi) grid with |omega'| = 1."""
    T, X = np.meshgrid(theta, xi, indexing="ij")
    w2, w3 = np.cos(T), np.sin(T)
    s = eta + 1j * X
    lam = lambda_plus(shock, s, (w2, w3))
    return reduced_lopatinski(shock, s, lam, (w2, w3))


def _neighbour_scale(a: np.ndarray) -> np.ndarray:
    """Max of |f| over the 8 neighbours; theta wraps, xi does not."""
    padded = np.pad(a, ((0, 0), (1, 1)), constant_values=0.0)
    padded = np.concatenate([padded[-1:], padded, padded[:1]], axis=0)
    n, m = a.shape
    out = np.zeros_like(a)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            out = np.maximum(out, padded[1 + di:1 + di + n, 1 + dj:1 + dj + m])
    return out


def _local_minima(a: np.ndarray) -> np.ndarray:
    padded = np.pad(a, ((0, 0), (1, 1)), constant_values=np.inf)
    padded = np.concatenate([padded[-1:], padded, padded[:1]], axis=0)
    n, m = a.shape
    mask = np.ones_like(a, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            mask &= a <= padded[1 + di:1 + di + n, 1 + dj:1 + dj + m]
    return mask


@dataclass
class ScanLevel:
    eta: float
    min_grid_rel: float
    min_polished_rel: float
    argmin: tuple[float, float]
    zeros: list[tuple[float, float, float]] = field(default_factory=list)


class _ScalarReduced:
    """Scalar |reduced(eta + i xi, lam+, (cos t, sin t))|, same branch rule as the array path."""

    def __init__(self, shock: DimensionlessShock, eta: float, eta_rel: float = ETA_LIMIT_REL):
        F = shock.F
        self.eta = eta
        self.eta_rel = eta_rel
        self.l2, self.l3 = shock.l2, shock.l3
        self.g = (F[1] @ F[1], F[1] @ F[2], F[2] @ F[2])
        self.M2, self.Ms2, self.b2 = shock.M**2, shock.Mstar**2, shock.beta**2
        self.RMt2 = shock.R * (shock.M**2 - shock.M1**2)

    def _roots(self, s, l, K0w):
        root = cmath.sqrt(self.M2 * self.Ms2 * s * s - 2j * l * self.M2 * s + (K0w * self.b2 - l * l))
        base = self.M2 * s - 1j * l
        return (base + root) / self.b2, (base - root) / self.b2

    def branch_points(self, t: float) -> tuple[float, float]:
        """Real xi where the two roots collide on eta = 0 (signed l, unlike transition_points)."""
        w2, w3 = math.cos(t), math.sin(t)
        g22, g23, g33 = self.g
        l = self.l2 * w2 + self.l3 * w3
        K0w = 1.0 + g22 * w2 * w2 + 2 * g23 * w2 * w3 + g33 * w3 * w3
        # M^2 M*^2 xi^2 - 2 l M^2 xi + l^2 - K0 beta^2 = 0
        a = self.M2 * self.Ms2
        half_b = -l * self.M2
        root = math.sqrt(max(half_b * half_b - a * (l * l - K0w * self.b2), 0.0))
        q = -(half_b + math.copysign(root, half_b))
        if q == 0.0:
            return 0.0, 0.0
        return q / a, (l * l - K0w * self.b2) / q

    def __call__(self, xi: float, t: float) -> float:
        w2, w3 = math.cos(t), math.sin(t)
        g22, g23, g33 = self.g
        l = self.l2 * w2 + self.l3 * w3
        fw2 = g22 * w2 * w2 + 2 * g23 * w2 * w3 + g33 * w3 * w3
        K0w = 1.0 + fw2
        eta = self.eta if self.eta > 0 else self.eta_rel * max(1.0, abs(xi))
        la, lb = self._roots(complex(eta, xi), l, K0w)
        if (la.real > 0) == (lb.real > 0):
            raise InternalConsistencyError(f"no unique incoming root at eta={eta}, xi={xi}")
        lam = la if la.real > 0 else lb
        s = complex(self.eta, xi)
        if self.eta == 0:
            la, lb = self._roots(s, l, K0w)
            lam = la if abs(la - lam) <= abs(lb - lam) else lb
        Om = s + lam
        val = Om * (self.M2 * lam * s + self.RMt2 + fw2) + (self.Ms2 * lam * lam - K0w) * s - 2j * l * lam * lam
        return abs(val)


def _polish(shock, eta, xi0, th0, scale, dxi, dth, tol):
    f = _ScalarReduced(shock, eta)

    def obj(x):
        return (f(x[0], x[1]) / scale) ** 2

    start = np.array([xi0, th0])
    simplex = np.array([start, start + [dxi, 0.0], start + [0.0, dth]])
    res = minimize(
        obj, start, method="Nelder-Mead",
        options=dict(initial_simplex=simplex, xatol=1e-13, fatol=(0.01 * tol) ** 2, maxiter=800, maxfev=1600),
    )
    return float(res.x[0]), float(res.x[1]), math.sqrt(max(res.fun, 0.0))


def _scan_level(shock, eta, xi, theta, tol, n_polish, polish_below):
    vals = np.abs(reduced_on_grid(shock, eta, xi, theta))
    scale = _neighbour_scale(vals)
    rel = vals / np.where(scale > 0, scale, 1.0)
    zeros = []
    i, j = np.unravel_index(np.argmin(rel), rel.shape)
    level = ScanLevel(eta, float(rel[i, j]), float(rel[i, j]), (float(xi[j]), float(theta[i])))
    cand = np.argwhere(_local_minima(vals) & (rel < polish_below))
    order = np.argsort(rel[cand[:, 0], cand[:, 1]]) if len(cand) else []
    dxi = float(xi[1] - xi[0])
    dth = float(theta[1] - theta[0]) if len(theta) > 1 else 0.1
    for idx in list(order)[:n_polish]:
        ti, xj = cand[idx]
        x, t, r = _polish(shock, eta, float(xi[xj]), float(theta[ti]), float(scale[ti, xj]), dxi, dth, tol)
        if r < level.min_polished_rel:
            level.min_polished_rel = r
            level.argmin = (x, t % (2 * math.pi))
        if r < tol:
            zeros.append((x, t % (2 * math.pi), r))
    if eta == 0:
        for x, t, r in _branch_point_search(shock, vals, xi, theta, tol, n_polish, polish_below):
            if r < level.min_polished_rel:
                level.min_polished_rel = r
                level.argmin = (x, t)
            if r < tol:
                zeros.append((x, t, r))
    for ti, xj in np.argwhere(rel < tol):
        zeros.append((float(xi[xj]), float(theta[ti]), float(rel[ti, xj])))
    level.zeros = zeros
    return level


def _branch_point_search(shock, vals, xi, theta, tol, n_polish, polish_below):
    """Follow the root-collision curves xi_b(theta) on eta = 0.

    Zeros on the imaginary axis can sit exactly where the two roots collide.
    There |reduced| has a square-root cusp in xi, which the grid ratio test
    and the simplex polish both resolve poorly.  Along the curve the function
    is smooth in theta, so a 1D bounded minimization finds them.  The scale is
    the grid neighbour maximum around the nearest cell, as for the grid test.
    """
    f = _ScalarReduced(shock, 0.0)
    n = len(theta)
    dth = float(theta[1] - theta[0]) if n > 1 else 0.1
    out = []
    for k in (0, 1):
        pts = np.array([f.branch_points(float(t))[k] for t in theta])
        inside = (pts >= xi[0]) & (pts <= xi[-1])
        if not inside.any():
            continue
        js = np.clip(np.searchsorted(xi, pts), 1, len(xi) - 2)
        scale = np.array([
            vals[[(i - 1) % n, i, (i + 1) % n]][:, js[i] - 1:js[i] + 2].max() for i in range(n)
        ])
        g = np.array([f(float(x), float(t)) for x, t in zip(pts, theta)])
        rel = np.where(inside, g / np.where(scale > 0, scale, 1.0), np.inf)
        is_min = (rel <= np.roll(rel, 1)) & (rel <= np.roll(rel, -1)) & (rel < polish_below)
        cand = np.flatnonzero(is_min)
        for i in cand[np.argsort(rel[cand])][:n_polish]:
            sc, t0 = float(scale[i]), float(theta[i])

            def obj(t, sc=sc, k=k):
                return f(f.branch_points(t)[k], t) / sc

            res = minimize_scalar(obj, bounds=(t0 - dth, t0 + dth), method="bounded",
                                  options=dict(xatol=1e-13))
            t = float(res.x)
            r = float(res.fun)
            if r > rel[i]:
                t, r = t0, float(rel[i])
            out.append((f.branch_points(t)[k], t % (2 * math.pi), r))
    return out


def scan_stability(
    shock: DimensionlessShock,
    grid: ScanGrid | None = None,
    tol: float = 1e-6,
    n_polish: int = 6,
    polish_below: float = 0.5,
) -> StabilityReport:
    """Decide uniform / weak stability by locating zeros of the reduced function.

    Zeros on eta = 0 only: weakly stable.  No zeros: uniformly stable.  A
    zero at any eta > 0 would make the shock violently unstable, which cannot
    happen for a Lax shock, so it raises InternalConsistencyError.
    The report's ``min_margin`` is (smallest relative |reduced| on eta = 0)
    minus ``tol``; only its sign is meaningful.
    """
    shock.require_admissible()
    grid = _expanded(shock, grid or ScanGrid())
    xi, theta = grid.xi(), grid.theta()
    levels = [_scan_level(shock, float(e), xi, theta, tol, n_polish, polish_below) for e in grid.etas]
    interior = [lv for lv in levels if lv.eta > 0 and lv.zeros]
    if interior:
        lv = interior[0]
        raise InternalConsistencyError(
            f"Lopatinski zero at eta={lv.eta} (xi, theta, rel)={lv.zeros[0]}: KL condition violated"
        )
    boundary = [lv for lv in levels if lv.eta == 0]
    weak = any(lv.zeros for lv in boundary)
    best = min(boundary, key=lambda lv: lv.min_polished_rel) if boundary else None
    rel0 = best.min_polished_rel if best else math.inf
    theta0 = best.argmin[1] if best else 0.0
    diagnostics = {
        "grid": {"xi": [grid.xi_min, grid.xi_max, grid.xi_count], "theta_count": grid.theta_count,
                 "etas": list(grid.etas)},
        "tol": tol,
        "levels": [
            {"eta": lv.eta, "min_grid_rel": lv.min_grid_rel, "min_polished_rel": lv.min_polished_rel,
             "argmin_xi": lv.argmin[0], "argmin_theta": lv.argmin[1], "zero_count": len(lv.zeros)}
            for lv in levels
        ],
        "zeros_eta0": [list(z) for lv in boundary for z in lv.zeros[:10]],
        "inconclusive": (not weak) and rel0 < 1e3 * tol,
    }
    return StabilityReport(
        verdict=Verdict.WEAK if weak else Verdict.UNIFORM,
        min_margin=rel0 - tol,
        argmin_angle=theta0,
        coeffs_at_argmin=circle_coefficients(shock, (math.cos(theta0), math.sin(theta0))),
        lax_pass=True,
        method="spectral_scan",
        diagnostics=diagnostics,
    )


SCAN_CSV_COLUMNS = ("eta", "xi", "theta", "re_reduced", "im_reduced", "abs_reduced")


def write_scan_csv(shock: DimensionlessShock, grid: ScanGrid, path: str | Path) -> None:
    """Dump the reduced function over the grid for external plotting."""
    xi, theta = grid.xi(), grid.theta()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SCAN_CSV_COLUMNS)
        for eta in grid.etas:
            f = reduced_on_grid(shock, float(eta), xi, theta)
            for i, t in enumerate(theta):
                for j, x in enumerate(xi):
                    v = f[i, j]
                    w.writerow([repr(float(eta)), repr(float(x)), repr(float(t)),
                                repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v)))])
