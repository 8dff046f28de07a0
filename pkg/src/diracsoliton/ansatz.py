"""Two-scale soliton ansatz: carrier Bloch pair times the spinor envelope.

The candidate field is u_delta(x) = sqrt(delta) (U0(x, delta x)
+ delta U1(x, delta x)) with U0 = Psi-(y) Phi-(x) + Psi+(y) Phi+(x).
All fast-variable functions here are pi-pseudo-periodic,
f(x) = sum_j c_j e^{i pi j x} with j odd, so products and conjugates are
tracked on the integer half-frequency lattice and converted back to the
standard plane-wave representation at an extended cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import (
    FourierCutoff,
    PeriodicPotential,
    assemble_coefficient_matrix,
    fourier_eval,
)
from .dirac import DiracPointData
from .homoclinic import SpinorProfile


@dataclass
class TwoScaleField:
    """Assembled real candidate soliton on a uniform fast-variable grid."""

    delta: float
    mu_delta: float
    x_grid: np.ndarray
    samples: np.ndarray
    u0_samples: np.ndarray
    u1_samples: np.ndarray | None = None


@dataclass
class SeparableForcing:
    """Corrector forcing G1(x, y) = sum_j f_j(x) g_j(y), ten terms.

    x_profiles[j] holds the plane-wave coefficients of f_j at the
    extended cutoff; y_profiles[j](y) returns complex g_j samples.
    """

    x_profiles: np.ndarray
    y_profiles: list
    cutoff_ext: FourierCutoff
    labels: list[str]


# half-frequency lattice helpers: arrays are centered, entry i holds the
# coefficient of e^{i pi (i - J) x} with J = (len - 1) // 2.

def _half_from_modes(c: np.ndarray) -> np.ndarray:
    """Embed e^{i pi x} sum c_m e^{2 pi i m x} on the half lattice."""
    M = (len(c) - 1) // 2
    out = np.zeros(2 * (2 * M + 1) + 1, dtype=complex)
    out[2::2] = c
    return out


def _half_conj(a: np.ndarray) -> np.ndarray:
    return np.conj(a)[::-1]


def _half_potential(pot: PeriodicPotential) -> np.ndarray:
    J = 2 * pot.max_index
    out = np.zeros(2 * J + 1, dtype=complex)
    for m, amp in pot.coeffs.items():
        out[J + 2 * m] += 0.5 * amp
        out[J - 2 * m] += 0.5 * amp
    return out


def _half_derivative(a: np.ndarray) -> np.ndarray:
    J = (len(a) - 1) // 2
    return 1j * np.pi * np.arange(-J, J + 1) * a


def _half_to_modes(a: np.ndarray, M_ext: int) -> np.ndarray:
    """Extract the e^{i pi x}-representation coefficients at cutoff M_ext."""
    J = (len(a) - 1) // 2
    out = np.zeros(2 * M_ext + 1, dtype=complex)
    for i, coeff in enumerate(a):
        if coeff == 0.0:
            continue
        j = i - J
        if j % 2 == 0:
            raise RuntimeError("even half-frequency coefficient: parity bookkeeping bug")
        m = (j - 1) // 2
        if m < -M_ext or m > M_ext:
            raise RuntimeError(f"mode {m} exceeds extended cutoff {M_ext}")
        out[m + M_ext] = coeff
    return out


def extended_cutoff(cut: FourierCutoff) -> FourierCutoff:
    """Cutoff holding triple products of base-cutoff pseudo-periodic factors."""
    return FourierCutoff(3 * cut.M + 2)


def _require_coeffs(dirac: DiracPointData):
    missing = [
        name
        for name in ("c_sharp", "theta_sharp", "beta1", "beta2", "pot_V", "pot_W")
        if getattr(dirac, name) is None
    ]
    if missing:
        raise ValueError(f"Dirac-point data incomplete, missing {missing}")


def build_U0(
    dirac: DiracPointData, profile: SpinorProfile, delta: float, x_grid
) -> np.ndarray:
    """Leading-order field U0(x, delta x) = 2 Re(Psi-(delta x) Phi-(x)).

    Real by construction since Psi+ = conj(Psi-) and Phi+ = conj(Phi-).
    """
    x_grid = np.asarray(x_grid, dtype=float)
    y_span = delta * np.max(np.abs(x_grid))
    if y_span > profile.y_max * (1.0 + 1e-12):
        raise ValueError(
            f"envelope support exceeds its grid: delta*|x| reaches {y_span:.3g} "
            f"but the profile ends at {profile.y_max:.3g}; enlarge y_max or shrink L"
        )
    phi = fourier_eval(dirac.g1, np.pi, x_grid)
    u, v = profile.evaluate(delta * x_grid)
    return u * phi.real - v * phi.imag


def build_G1(dirac: DiracPointData, profile: SpinorProfile) -> SeparableForcing:
    """Ten-term separable corrector forcing.

    Two terms from the mixed fast/slow derivative 2 dx dy U0, two from
    (mu# - W) U0, six from the cubic power |U0|^2 U0.  Slow-variable
    derivatives come from the envelope vector field, not differences.
    """
    _require_coeffs(dirac)
    mu_sharp = profile.params.mu_sharp
    P = _half_from_modes(dirac.g1)
    Q = _half_from_modes(dirac.g2)
    Wv = _half_potential(dirac.pot_W)
    Pc, Qc = _half_conj(P), _half_conj(Q)

    def cube(a, b, c):
        return np.convolve(np.convolve(a, b), c)

    x_half = [
        _half_derivative(P),
        _half_derivative(Q),
        mu_sharp * np.pad(P, (len(Wv) - 1) // 2) - np.convolve(Wv, P),
        mu_sharp * np.pad(Q, (len(Wv) - 1) // 2) - np.convolve(Wv, Q),
        cube(P, Pc, P),
        cube(Q, Qc, Q),
        cube(P, P, Qc),
        cube(Q, Q, Pc),
        2.0 * cube(P, Pc, Q),
        2.0 * cube(Q, Qc, P),
    ]

    def psim(y):
        u, v = profile.evaluate(y)
        return 0.5 * (u + 1j * v)

    def dpsim(y):
        du, dv = profile.derivative(y)
        return 0.5 * (du + 1j * dv)

    y_profiles = [
        lambda y: 2.0 * dpsim(y),
        lambda y: 2.0 * np.conj(dpsim(y)),
        psim,
        lambda y: np.conj(psim(y)),
        lambda y: np.abs(psim(y)) ** 2 * psim(y),
        lambda y: np.abs(psim(y)) ** 2 * np.conj(psim(y)),
        lambda y: psim(y) ** 2 * psim(y),
        lambda y: np.conj(psim(y)) ** 2 * np.conj(psim(y)),
        lambda y: np.abs(psim(y)) ** 2 * np.conj(psim(y)),
        lambda y: np.abs(psim(y)) ** 2 * psim(y),
    ]
    labels = [
        "2*dxPhi-*dyPsi-",
        "2*dxPhi+*dyPsi+",
        "(mu#-W)Phi-*Psi-",
        "(mu#-W)Phi+*Psi+",
        "|Phi-|^2Phi-*|Psi-|^2Psi-",
        "|Phi+|^2Phi+*|Psi+|^2Psi+",
        "Phi-^2conj(Phi+)*Psi-^2conj(Psi+)",
        "Phi+^2conj(Phi-)*Psi+^2conj(Psi-)",
        "2|Phi-|^2Phi+*|Psi-|^2Psi+",
        "2|Phi+|^2Phi-*|Psi+|^2Psi-",
    ]
    cut_ext = extended_cutoff(dirac.cutoff)
    x_profiles = np.stack([_half_to_modes(a, cut_ext.M) for a in x_half])
    return SeparableForcing(
        x_profiles=x_profiles,
        y_profiles=y_profiles,
        cutoff_ext=cut_ext,
        labels=labels,
    )


def _pad_modes(c: np.ndarray, M_from: int, M_to: int) -> np.ndarray:
    out = np.zeros(2 * M_to + 1, dtype=c.dtype)
    out[M_to - M_from : M_to + M_from + 1] = c
    return out


def _y_matrix(forcing: SeparableForcing, y_grid) -> np.ndarray:
    y_grid = np.asarray(y_grid, dtype=float)
    return np.stack([g(y_grid) for g in forcing.y_profiles], axis=1)


def solvability_check(
    forcing: SeparableForcing,
    dirac: DiracPointData,
    y_grid,
    fail_tol: float | None = None,
) -> float:
    """Largest kernel projection of the forcing, relative to its size.

    For an envelope that solves the effective spinor system the forcing
    is orthogonal to the carrier pair at every y, which is exactly the
    condition making the corrector solvable.
    """
    M_ext = forcing.cutoff_ext.M
    M = dirac.cutoff.M
    kernel = np.stack(
        [_pad_modes(dirac.g1.astype(complex), M, M_ext),
         _pad_modes(dirac.g2.astype(complex), M, M_ext)],
        axis=1,
    )
    ip = forcing.x_profiles @ np.conj(kernel)
    G = _y_matrix(forcing, y_grid)
    proj = G @ ip
    coeffs = G @ forcing.x_profiles
    scale = np.max(np.linalg.norm(coeffs, axis=1))
    if scale == 0.0:
        return 0.0
    rel = float(np.max(np.abs(proj)) / scale)
    if fail_tol is not None and rel > fail_tol:
        y_grid = np.asarray(y_grid, dtype=float)
        bad = float(y_grid[np.argmax(np.max(np.abs(proj), axis=1))])
        raise RuntimeError(
            f"kernel projection {rel:.3e} exceeds {fail_tol:.1e} at y={bad:.4g}: "
            "the envelope does not solve the effective spinor system accurately"
        )
    return rel


@dataclass
class CorrectorSolution:
    """Kernel-orthogonal x-solutions of the corrector equation, per term."""

    x_solutions: np.ndarray
    forcing: SeparableForcing
    mu_star: float
    solve_residual_max: float


def solve_U1(
    forcing: SeparableForcing, dirac: DiracPointData
) -> CorrectorSolution:
    """Invert the frozen-y cell operator on the kernel complement.

    The operator -dx^2 + V - mu* is diagonalized once at the extended
    cutoff; the degenerate crossing eigenspace is dropped and each
    separable x-profile is solved in the remaining eigenbasis.
    """
    _require_coeffs(dirac)
    M_ext = forcing.cutoff_ext.M
    A = assemble_coefficient_matrix(dirac.pot_V.coeffs, np.pi, M_ext)
    evals, evecs = np.linalg.eigh(A)
    mu = dirac.mu_star
    scale = 1.0 + abs(mu)
    kernel_mask = np.abs(evals - mu) <= 1e-6 * scale
    if int(np.sum(kernel_mask)) != 2:
        raise RuntimeError(
            f"expected a double eigenvalue at {mu:.9g}, found "
            f"{int(np.sum(kernel_mask))} eigenvalues in its cluster"
        )
    rest = evals[~kernel_mask]
    spacing = np.min(np.abs(rest - mu))
    if spacing < 1e-3 * scale:
        off = rest[np.argmin(np.abs(rest - mu))]
        raise RuntimeError(
            f"corrector system near-singular: eigenvalue {off:.9g} lies "
            f"{spacing:.3e} from the crossing energy {mu:.9g}"
        )
    U = evecs[:, ~kernel_mask]
    K = evecs[:, kernel_mask]
    lam = evals[~kernel_mask]

    F = forcing.x_profiles
    coeffs = np.conj(U).T @ F.T
    sols = (U @ (coeffs / (lam - mu)[:, None])).T
    sols -= (K @ (np.conj(K).T @ sols.T)).T

    perp = F - (K @ (np.conj(K).T @ F.T)).T
    resid = (A @ sols.T).T - mu * sols - perp
    fnorm = np.linalg.norm(F, axis=1)
    res_max = float(np.max(np.linalg.norm(resid, axis=1) / (1.0 + fnorm)))
    if res_max > 1e-10:
        raise RuntimeError(f"corrector solve residual {res_max:.3e} above 1e-10")
    return CorrectorSolution(
        x_solutions=sols,
        forcing=forcing,
        mu_star=mu,
        solve_residual_max=res_max,
    )


def _eval_separable(
    x_profiles: np.ndarray, y_profiles, x_grid, y_grid, drop: float = 1e-17
) -> np.ndarray:
    """Samples of sum_j f_j(x) g_j(y) on paired grids (complex)."""
    out = np.zeros(np.shape(x_grid), dtype=complex)
    for coeffs, g in zip(x_profiles, y_profiles):
        c = coeffs.copy()
        top = np.max(np.abs(c))
        if top == 0.0:
            continue
        c[np.abs(c) < drop * top] = 0.0
        out += fourier_eval(c, np.pi, x_grid) * g(y_grid)
    return out


def evaluate_udelta(
    dirac: DiracPointData,
    profile: SpinorProfile,
    with_U1: bool,
    delta: float,
    x_grid,
    corrector: CorrectorSolution | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Samples of sqrt(delta)(U0 + delta U1) on an arbitrary grid.

    Returns (scaled field, U0 samples, U1 samples or None).  A corrector
    solution may be passed in for reuse across delta values.
    """
    _require_coeffs(dirac)
    if not 0.0 < delta < 1.0:
        raise ValueError(
            f"delta must lie in (0, 1), got {delta}; the two-scale field "
            "degenerates at delta = 0 and no solve path exists there"
        )
    u0 = build_U0(dirac, profile, delta, x_grid)
    u1 = None
    samples = u0.copy()
    if with_U1:
        if corrector is None:
            corrector = solve_U1(build_G1(dirac, profile), dirac)
        field1 = _eval_separable(
            corrector.x_solutions,
            corrector.forcing.y_profiles,
            x_grid,
            delta * np.asarray(x_grid, dtype=float),
        )
        im_max = np.max(np.abs(field1.imag))
        re_max = max(np.max(np.abs(field1.real)), 1.0)
        if im_max > 1e-10 * re_max:
            raise RuntimeError(
                f"corrector field has imaginary residue {im_max:.3e}"
            )
        u1 = field1.real
        samples = samples + delta * u1
    return np.sqrt(delta) * samples, u0, u1


def assemble_udelta(
    dirac: DiracPointData,
    profile: SpinorProfile,
    with_U1: bool,
    delta: float,
    L: float,
    h: float,
    corrector: CorrectorSolution | None = None,
) -> TwoScaleField:
    """Candidate soliton sqrt(delta) (U0 + delta U1) on [-L, L], spacing h."""
    params = profile.params
    ell = 1.0 / params.decay_rate
    if delta > 0.0:
        L_min = 10.0 * ell / delta
        if L < L_min:
            raise ValueError(
                f"domain half-length {L:.4g} below the envelope-decay floor "
                f"{L_min:.4g} for delta={delta}"
            )
    n = int(round(L / h))
    x_grid = np.arange(-n, n + 1) * h
    samples, u0, u1 = evaluate_udelta(
        dirac, profile, with_U1, delta, x_grid, corrector
    )
    return TwoScaleField(
        delta=float(delta),
        mu_delta=float(dirac.mu_star + delta * params.mu_sharp),
        x_grid=x_grid,
        samples=samples,
        u0_samples=u0,
        u1_samples=u1,
    )


_D2_STENCIL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_EDGE_SKIP = 5


def residual_profile(
    field: TwoScaleField, pot_V: PeriodicPotential, pot_W: PeriodicPotential
) -> tuple[np.ndarray, np.ndarray]:
    """Interior samples of (-dx^2 + V + delta W - mu_delta) u - u^3.

    The second derivative uses the 4th-order centered stencil; the first
    and last few points are excluded so every retained sample is
    stencil-valid and clear of the truncation edge.
    """
    x = field.x_grid
    h = float(x[1] - x[0])
    if h > 1.0 / 64.0 + 1e-15:
        raise ValueError(f"grid spacing {h} too coarse to resolve the cell")
    u = field.samples
    d2 = np.convolve(u, _D2_STENCIL[::-1], mode="valid") / h**2
    s = _EDGE_SKIP
    inner = slice(s, len(u) - s)
    d2 = d2[s - 2 : len(d2) - (s - 2)]
    xi = x[inner]
    ui = u[inner]
    pot = pot_V(xi) + field.delta * pot_W(xi) - field.mu_delta
    return xi, -d2 + pot * ui - ui**3


def residual_norm(
    field: TwoScaleField, pot_V: PeriodicPotential, pot_W: PeriodicPotential
) -> float:
    """Discrete L2 norm of the stationary-equation residual."""
    x, r = residual_profile(field, pot_V, pot_W)
    h = float(x[1] - x[0])
    return float(np.sqrt(h * np.sum(r**2)))


def fit_order(deltas, norms) -> float:
    """Least-squares slope of log(norm) against log(delta)."""
    deltas = np.asarray(deltas, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if len(deltas) < 2:
        raise ValueError("order fit needs at least two delta values")
    if np.any(norms <= 0.0) or np.any(deltas <= 0.0):
        raise ValueError("order fit needs positive deltas and norms")
    return float(np.polyfit(np.log(deltas), np.log(norms), 1)[0])
