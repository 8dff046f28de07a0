"""Dirac points at k = pi: detection, Bloch pair and effective coefficients.

For an even-index cosine potential the truncated matrix at k = pi
decouples into blocks of even and odd Fourier index.  The inversion
x -> -x maps one block onto the other, so every eigenvalue at k = pi
is doubly degenerate and each pair is a linear band crossing.  The
even-block eigenvector supplies g1; its index-flipped copy
q_n = p_{-n-1} supplies g2 = g1(-x), and the effective coefficients
c#, theta#, beta1, beta2 are coefficient-space forms of the pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bloch import (
    FourierCutoff,
    ParityClass,
    PeriodicPotential,
    assemble_coefficient_matrix,
    assemble_fb_matrix,
    fourier_eval,
    solve_bands_at_k,
)

DEGENERACY_RTOL = 1e-8


@dataclass
class DiracPointData:
    """One certified band crossing at k = pi.

    band_pair is 1-based (n*, n*+1).  g1 and g2 are real coefficient
    vectors of the periodic parts of Phi-(., pi) and Phi+(., pi),
    supported on even and odd Fourier indices respectively.
    """

    band_pair: tuple[int, int]
    mu_star: float
    g1: np.ndarray
    g2: np.ndarray
    cutoff: FourierCutoff
    c_sharp: float | None = None
    theta_sharp: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    pot_V: PeriodicPotential | None = None
    pot_W: PeriodicPotential | None = None


@dataclass
class GapReport:
    delta: float
    a: float
    interval: tuple[float, float]
    violations: list[tuple[float, int, float]] = field(default_factory=list)
    half_gap_at_pi: float | None = None

    @property
    def gap_open(self) -> bool:
        return not self.violations


def parity_block_split(matrix: np.ndarray, parity_ok: bool = True):
    """Split an assembled k = pi matrix into even/odd Fourier-index blocks.

    Returns (even_block, odd_block, even_positions, odd_positions) where
    the positions index rows of the full matrix.  Any cross-block entry
    above 1e-14 indicates an assembly bug and is fatal.
    """
    if not parity_ok:
        raise ValueError("parity block split requires an even-index potential")
    size = matrix.shape[0]
    M = (size - 1) // 2
    m = np.arange(-M, M + 1)
    even_pos = np.where(m % 2 == 0)[0]
    odd_pos = np.where(m % 2 != 0)[0]
    cross = matrix[np.ix_(even_pos, odd_pos)]
    if np.max(np.abs(cross)) > 1e-14:
        raise RuntimeError(
            f"nonzero cross-parity entry {np.max(np.abs(cross)):.3e}: "
            "matrix assembly violates the parity decoupling"
        )
    return (
        matrix[np.ix_(even_pos, even_pos)],
        matrix[np.ix_(odd_pos, odd_pos)],
        even_pos,
        odd_pos,
    )


def _index_flip(p: np.ndarray) -> np.ndarray:
    """q_n = p_{-n-1}: coefficients of g(x) -> g(-x) at k = pi."""
    M = (len(p) - 1) // 2
    q = np.zeros_like(p)
    n = np.arange(-M, M - 1 + 1)  # -n-1 stays within [-M, M]
    q[n + M] = p[(-n - 1) + M]
    return q


def find_dirac_point(
    pot_V: PeriodicPotential, cut: FourierCutoff, pair_selector: int = 1
) -> DiracPointData:
    """Locate the pair_selector-th (1-based) band crossing at k = pi.

    g1 is taken from the even-index block only, so the splitting and
    inversion structure hold exactly by construction; g2 is the
    index-flipped copy.  Both are re-verified against the full matrix.
    """
    if pot_V.parity_class is not ParityClass.EVEN_INDEX:
        raise ValueError("Dirac-point search requires an even-index potential V")
    if pair_selector < 1:
        raise ValueError("pair_selector is a 1-based crossing ordinal")
    A = assemble_fb_matrix(pot_V, np.pi, cut)
    A_even, A_odd, even_pos, odd_pos = parity_block_split(A)
    evals_e, evecs_e = np.linalg.eigh(A_even)
    evals_o = np.linalg.eigvalsh(A_odd)
    if pair_selector > len(evals_e):
        raise ValueError(f"pair_selector {pair_selector} exceeds cutoff range")
    c = pair_selector - 1
    mu_star = evals_e[c]
    tol = DEGENERACY_RTOL * (1.0 + abs(mu_star))
    if abs(evals_o[c] - mu_star) > tol:
        raise ValueError(
            f"not a Dirac point: even/odd eigenvalues {mu_star:.12g} and "
            f"{evals_o[c]:.12g} differ by more than {tol:.3e}"
        )
    for other in (c - 1, c + 1):
        if 0 <= other < len(evals_e) and abs(evals_e[other] - mu_star) <= tol:
            raise RuntimeError(
                f"ambiguous degeneracy: even block holds eigenvalues "
                f"{evals_e[other]:.12g} and {mu_star:.12g} within tolerance"
            )

    g1 = np.zeros(cut.size)
    g1[even_pos] = evecs_e[:, c]
    if g1[np.argmax(np.abs(g1))] < 0:
        g1 = -g1
    g2 = _index_flip(g1)

    for g in (g1, g2):
        resid = np.max(np.abs(A @ g - mu_star * g))
        if resid > 1e-8 * (1.0 + abs(mu_star)):
            raise RuntimeError(
                f"constructed kernel vector fails the eigen-equation, residual {resid:.3e}"
            )

    n_star = 2 * pair_selector - 1
    return DiracPointData(
        band_pair=(n_star, n_star + 1),
        mu_star=float(mu_star),
        g1=g1,
        g2=g2,
        cutoff=cut,
        pot_V=pot_V,
    )


def compute_c_sharp(data: DiracPointData) -> float:
    """Crossing slope c# = -2 sum_m (2 pi m + pi) |p_m|^2 from g1.

    Also evaluates the g2-based expression (opposite sign convention)
    and checks consistency.
    """
    m = data.cutoff.indices()
    freqs = 2.0 * np.pi * m + np.pi
    c1 = -2.0 * float(freqs @ (data.g1 ** 2))
    c2 = 2.0 * float(freqs @ (data.g2 ** 2))
    if abs(c1 - c2) > 1e-12 * (1.0 + abs(c1)):
        raise RuntimeError(f"c# consistency failure: {c1!r} vs {c2!r}")
    if abs(c1) < 1e-8:
        raise RuntimeError(
            "degenerate crossing (quadratic touching): |c#| below 1e-8, "
            "Dirac-point certification fails"
        )
    return c1


def band_slope_oracle(
    pot_V: PeriodicPotential, data: DiracPointData, h: float = 1e-4
) -> tuple[float, float]:
    """Centered-difference slopes of the two smooth branches across k = pi.

    The smooth branches swap raw band indices at pi: one follows band
    n*+1 for k < pi and band n* for k > pi, the other the reverse.
    """
    lo = solve_bands_at_k(pot_V, np.pi - h, data.cutoff).eigenvalues
    hi = solve_bands_at_k(pot_V, np.pi + h, data.cutoff).eigenvalues
    i_lo, i_hi = data.band_pair[0] - 1, data.band_pair[1] - 1
    slope_minus = (hi[i_lo] - lo[i_hi]) / (2.0 * h)
    slope_plus = (hi[i_hi] - lo[i_lo]) / (2.0 * h)
    return float(slope_minus), float(slope_plus)


def _coupling_matrix(pot: PeriodicPotential, M: int) -> np.ndarray:
    """Coefficient-space multiplication operator of the cosine series."""
    C = np.zeros((2 * M + 1, 2 * M + 1))
    for j, amp in pot.coeffs.items():
        if j <= 2 * M:
            idx = np.arange(2 * M + 1 - j)
            C[idx, idx + j] += 0.5 * amp
            C[idx + j, idx] += 0.5 * amp
    return C


def compute_theta_sharp(data: DiracPointData, pot_W: PeriodicPotential) -> float:
    """Gap-opening coefficient theta# = <W Phi+(., pi), Phi-(., pi)>."""
    if pot_W.parity_class is not ParityClass.ODD_INDEX:
        raise ValueError("theta# requires an odd-index potential W")
    C = _coupling_matrix(pot_W, data.cutoff.M)
    val = complex(np.vdot(data.g1, C @ data.g2))
    if abs(val.imag) > 1e-12 * (1.0 + abs(val)):
        raise RuntimeError(f"theta# has spurious imaginary part {val.imag:.3e}")
    theta = float(val.real)
    if abs(theta) < 1e-10:
        raise ValueError(
            "W does not open a gap at this Dirac point: theta# vanishes"
        )
    return theta


def compute_betas(data: DiracPointData, n_quad: int | None = None) -> tuple[float, float]:
    """Quartic cell integrals beta1 = int |Phi+|^2 |Phi-|^2, beta2 = int conj(Phi+)^2 Phi-^2.

    Evaluated by uniform sampling of the periodic parts; the integrand
    is band-limited so the grid average is exact once the grid exceeds
    the total bandwidth (>= 8M + 8 points).
    """
    M = data.cutoff.M
    if n_quad is None:
        n_quad = max(2048, 8 * M + 8)
    x = np.arange(n_quad) / n_quad
    P1 = fourier_eval(data.g1, 0.0, x)
    P2 = fourier_eval(data.g2, 0.0, x)
    beta1 = float(np.mean(np.abs(P1) ** 2 * np.abs(P2) ** 2).real)
    b2 = complex(np.mean(np.conj(P2) ** 2 * P1 ** 2))
    if abs(b2.imag) > 1e-10 * (1.0 + abs(b2)):
        raise RuntimeError(f"beta2 has spurious imaginary part {b2.imag:.3e}")
    beta2 = float(b2.real)
    if beta1 <= 0.0 or abs(beta2) > beta1 * (1.0 + 1e-12):
        raise RuntimeError(f"beta values violate 0 < |beta2| <= beta1: {beta1}, {beta2}")
    return beta1, beta2


def certify_dirac_point(
    pot_V: PeriodicPotential,
    pot_W: PeriodicPotential,
    cut: FourierCutoff,
    pair_selector: int = 1,
) -> DiracPointData:
    """find_dirac_point plus all effective coefficients, filled in place."""
    data = find_dirac_point(pot_V, cut, pair_selector)
    data.pot_W = pot_W
    data.c_sharp = compute_c_sharp(data)
    data.theta_sharp = compute_theta_sharp(data, pot_W)
    data.beta1, data.beta2 = compute_betas(data)
    return data


def default_gap_k_grid(n_local: int = 401, n_global: int = 81) -> np.ndarray:
    """Chebyshev-clustered points near pi plus a coarse global grid."""
    t = np.linspace(0.0, np.pi, n_local)
    local = np.pi + 0.5 * np.cos(t)  # clusters at pi +- 0.5
    global_grid = np.linspace(0.0, 2.0 * np.pi, n_global)
    return np.unique(np.concatenate([local, global_grid]))


def verify_gap_opening(
    pot_V: PeriodicPotential,
    pot_W: PeriodicPotential,
    data: DiracPointData,
    delta: float,
    a: float,
    k_grid=None,
) -> GapReport:
    """Sweep the bands of H + delta*W and test the predicted gap interval.

    W breaks the half-period structure, so the full mixed-index matrix
    is assembled at each k.  Success means no band value inside
    (mu* - a delta |theta#|, mu* + a delta |theta#|).
    """
    if not 0.0 < a < 1.0:
        raise ValueError("safety fraction a must lie in (0, 1)")
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    theta = data.theta_sharp
    if theta is None:
        theta = compute_theta_sharp(data, pot_W)
    if k_grid is None:
        k_grid = default_gap_k_grid()
    half = a * delta * abs(theta)
    lo, hi = data.mu_star - half, data.mu_star + half
    coeffs = dict(pot_V.coeffs)
    for j, amp in pot_W.coeffs.items():
        coeffs[j] = coeffs.get(j, 0.0) + delta * amp
    M = data.cutoff.M
    violations = []
    for k in np.asarray(k_grid, dtype=float):
        evals = np.linalg.eigvalsh(assemble_coefficient_matrix(coeffs, k, M))
        if half == 0.0:
            # degenerate interval {mu*}: mu* itself is in the spectrum
            inside = np.where(np.abs(evals - data.mu_star) <= 1e-9 * (1.0 + abs(data.mu_star)))[0]
        else:
            inside = np.where((evals > lo) & (evals < hi))[0]
        for n in inside:
            violations.append((float(k), int(n + 1), float(evals[n])))
    evals_pi = np.linalg.eigvalsh(assemble_coefficient_matrix(coeffs, np.pi, M))
    i = data.band_pair[0] - 1
    half_gap = 0.5 * float(evals_pi[i + 1] - evals_pi[i])
    return GapReport(
        delta=float(delta),
        a=float(a),
        interval=(float(lo), float(hi)),
        violations=violations,
        half_gap_at_pi=half_gap,
    )
