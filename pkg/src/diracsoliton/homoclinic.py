"""Homoclinic soliton of the effective cubic nonlinear Dirac equation.

The spinor ansatz Psi = ((u + iv)/2, (u - iv)/2) turns the stationary
NLD system into the planar Hamiltonian flow

    c# u' = dH/dv,   c# v' = -dH/du,
    H(u, v) = (b/4)(u^4 + v^4) + (a/2) u^2 v^2
              + (mu#/2)(u^2 + v^2) + (theta#/2)(v^2 - u^2),

with a = 3(beta1 - beta2)/4 and b = (3 beta1 + beta2)/4.  The homoclinic
orbit lives on the zero-energy level and leaves from the u-axis
(theta# > 0) or the v-axis (theta# < 0); one half is integrated and the
proved parity supplies the other half exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp


@dataclass(frozen=True)
class NLDParams:
    c_sharp: float
    theta_sharp: float
    mu_sharp: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if self.c_sharp == 0.0:
            raise ValueError("c_sharp must be nonzero")
        if self.theta_sharp == 0.0:
            raise ValueError("theta_sharp must be nonzero")
        if abs(self.mu_sharp) >= abs(self.theta_sharp):
            raise ValueError(
                f"mu_sharp={self.mu_sharp} must lie strictly inside "
                f"(-|theta_sharp|, |theta_sharp|) = (-{abs(self.theta_sharp)}, "
                f"{abs(self.theta_sharp)})"
            )
        if self.beta1 <= 0.0 or self.beta1 < abs(self.beta2):
            raise ValueError(
                f"need beta1 >= |beta2| > 0 compatible coefficients, got "
                f"beta1={self.beta1}, beta2={self.beta2}"
            )

    @property
    def a(self) -> float:
        return 0.75 * (self.beta1 - self.beta2)

    @property
    def b(self) -> float:
        return 0.25 * (3.0 * self.beta1 + self.beta2)

    @property
    def decay_rate(self) -> float:
        """Asymptotic decay exponent sqrt(theta#^2 - mu#^2) / |c#|."""
        return np.sqrt(self.theta_sharp**2 - self.mu_sharp**2) / abs(self.c_sharp)


@dataclass
class SpinorProfile:
    """Sampled homoclinic solution with its diagnostics.

    evaluate/derivative use the integrator's dense output on y >= 0 and
    the parity relations on y < 0, so off-grid values carry integrator
    accuracy rather than interpolation error.
    """

    params: NLDParams
    y_grid: np.ndarray
    u: np.ndarray
    v: np.ndarray
    hamiltonian_trace: np.ndarray
    decay_rate_fit: float
    h_drift_max: float
    _dense: object = None

    @property
    def psi_minus(self) -> np.ndarray:
        return 0.5 * (self.u + 1j * self.v)

    @property
    def psi_plus(self) -> np.ndarray:
        return 0.5 * (self.u - 1j * self.v)

    @property
    def y_max(self) -> float:
        return float(self.y_grid[-1])

    def evaluate(self, y) -> tuple[np.ndarray, np.ndarray]:
        y = np.asarray(y, dtype=float)
        ya = np.abs(y)
        uv = self._dense(np.clip(ya, 0.0, self.y_max))
        u, v = uv[0], uv[1]
        neg = y < 0
        if self.params.theta_sharp > 0:
            v = np.where(neg, -v, v)
        else:
            u = np.where(neg, -u, u)
        return u, v

    def derivative(self, y) -> tuple[np.ndarray, np.ndarray]:
        """(u', v') from the vector field, machine-precision."""
        u, v = self.evaluate(y)
        du, dv = _rhs(self.params, u, v)
        return du, dv

    def psi_at(self, y) -> np.ndarray:
        u, v = self.evaluate(y)
        return np.stack([0.5 * (u + 1j * v), 0.5 * (u - 1j * v)])

    def dpsi_at(self, y) -> np.ndarray:
        du, dv = self.derivative(y)
        return np.stack([0.5 * (du + 1j * dv), 0.5 * (du - 1j * dv)])


def hamiltonian(params: NLDParams, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    a, b = params.a, params.b
    return (
        0.25 * b * (u**4 + v**4)
        + 0.5 * a * u**2 * v**2
        + 0.5 * params.mu_sharp * (u**2 + v**2)
        + 0.5 * params.theta_sharp * (v**2 - u**2)
    )


def _rhs(params: NLDParams, u, v):
    a, b, mu, th, c = params.a, params.b, params.mu_sharp, params.theta_sharp, params.c_sharp
    du = (th * v + mu * v + a * u**2 * v + b * v**3) / c
    dv = (th * u - mu * u - b * u**3 - a * v**2 * u) / c
    return du, dv


def initial_condition(params: NLDParams) -> tuple[float, float]:
    """Zero-energy axis crossing the homoclinic passes through at y = 0."""
    th, mu, b = params.theta_sharp, params.mu_sharp, params.b
    if th > 0:
        return (float(np.sqrt(2.0 * (th - mu) / b)), 0.0)
    return (0.0, float(np.sqrt(2.0 * (-th - mu) / b)))


def equilibria(params: NLDParams) -> list[tuple[float, float]]:
    th, mu, b = params.theta_sharp, params.mu_sharp, params.b
    if th > 0:
        r = np.sqrt((th - mu) / b)
        pts = [(0.0, 0.0), (r, 0.0), (-r, 0.0)]
    else:
        r = np.sqrt((-th - mu) / b)
        pts = [(0.0, 0.0), (0.0, r), (0.0, -r)]
    for u, v in pts:
        du, dv = _rhs(params, u, v)
        if max(abs(du), abs(dv)) > 1e-12:
            raise RuntimeError(f"equilibrium candidate ({u}, {v}) does not zero the field")
    return pts


class _RecenteredDense:
    """Dense output of the backward tail solve, re-centered at the apex."""

    def __init__(self, raw_dense, y_apex: float, y_max: float):
        self._raw = raw_dense
        self._y_apex = y_apex
        self._y_max = y_max

    def __call__(self, y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, -self._y_apex)
        return self._raw(self._y_apex + y)


def _stable_tail_point(params: NLDParams, eps: float) -> tuple[float, float]:
    """Point on the stable-manifold branch the homoclinic tail follows.

    The linearization at the origin has eigenvalue -r along
    xi = (1, -r c / (theta + mu)); nonlinear corrections to the manifold
    are O(eps^2) relative, negligible for the eps used here.
    """
    th, mu, c = params.theta_sharp, params.mu_sharp, params.c_sharp
    r = params.decay_rate
    xi = np.array([1.0, -r * c / (th + mu)])
    if params.theta_sharp <= 0:
        # pick the branch on the v > 0 side of the loop
        if xi[1] < 0:
            xi = -xi
    xi /= np.linalg.norm(xi)
    return eps * xi[0], eps * xi[1]


def integrate_homoclinic(
    params: NLDParams,
    y_max: float | None = None,
    tol: float = 1e-10,
    n_samples: int = 6001,
) -> SpinorProfile:
    """Construct one half of the homoclinic orbit and mirror it.

    y_max defaults to 18 decay lengths.  Forward integration from the axis crossing is unstable: noise grows
    like exp(+r y) along the unstable direction and swamps the tail.
    Instead the orbit is integrated backward from a point far down the
    stable manifold, which damps the unstable direction, and re-centered
    at the axis crossing it reaches.
    """
    ell = 1.0 / params.decay_rate
    if y_max is None:
        y_max = 18.0 * ell
    if y_max < 10.0 * ell:
        raise ValueError(
            f"y_max={y_max:.3g} shorter than 10 decay lengths ({10.0 * ell:.3g})"
        )
    u0, v0 = initial_condition(params)
    scale = np.hypot(u0, v0)
    eps = scale * np.exp(-params.decay_rate * y_max - 4.0)

    def f(_, w):
        du, dv = _rhs(params, w[0], w[1])
        return (du, dv)

    if params.theta_sharp > 0:
        def apex(_, w):
            return w[1]
    else:
        def apex(_, w):
            return w[0]
    apex.terminal = True

    horizon = -(y_max + 16.0 / params.decay_rate)
    sol = solve_ivp(
        f,
        (0.0, horizon),
        _stable_tail_point(params, eps),
        method="DOP853",
        rtol=1e-13,
        atol=1e-16,
        dense_output=True,
        events=apex,
    )
    if not sol.success:
        raise RuntimeError(f"homoclinic integration failed: {sol.message}")
    if len(sol.t_events[0]) == 0:
        raise RuntimeError(
            "backward integration never reached the symmetry axis; "
            "parameters may be outside the homoclinic regime"
        )
    y_apex = sol.t_events[0][0]
    if -y_apex < y_max:
        raise RuntimeError(
            f"tail span {-y_apex:.3g} shorter than requested y_max={y_max:.3g}"
        )
    apex_uv = sol.sol(y_apex)
    if abs(np.hypot(*apex_uv) - scale) > 1e-6 * scale:
        raise RuntimeError(
            f"axis crossing at |(u,v)|={np.hypot(*apex_uv):.12g} does not match "
            f"the zero-energy crossing {scale:.12g}"
        )

    dense = _RecenteredDense(sol.sol, y_apex, y_max)
    y_half = np.linspace(0.0, y_max, (n_samples + 1) // 2)
    uv = dense(y_half)
    amp = np.hypot(uv[0], uv[1])
    scale = np.hypot(u0, v0)
    if amp[-1] > 1e-6 * scale:
        raise RuntimeError(
            f"trajectory has not decayed at y_max: |(u,v)|={amp[-1]:.3e} "
            f"vs floor {1e-6 * scale:.3e}; increase y_max"
        )
    H_half = hamiltonian(params, uv[0], uv[1])
    h_scale = abs(hamiltonian(params, *_nontrivial_equilibrium(params)))
    drift = float(np.max(np.abs(H_half)))
    if drift > 100.0 * tol * (1.0 + h_scale):
        raise RuntimeError(
            f"Hamiltonian drift {drift:.3e} exceeds 100*tol: step-size failure"
        )

    # mirror onto the symmetric grid via the proved parity
    y_grid = np.concatenate([-y_half[:0:-1], y_half])
    if params.theta_sharp > 0:
        u = np.concatenate([uv[0][:0:-1], uv[0]])
        v = np.concatenate([-uv[1][:0:-1], uv[1]])
    else:
        u = np.concatenate([-uv[0][:0:-1], uv[0]])
        v = np.concatenate([uv[1][:0:-1], uv[1]])
    H = hamiltonian(params, u, v)

    fit = _decay_fit(y_half, amp, y_max)
    return SpinorProfile(
        params=params,
        y_grid=y_grid,
        u=u,
        v=v,
        hamiltonian_trace=H,
        decay_rate_fit=fit,
        h_drift_max=drift,
        _dense=dense,
    )


def _nontrivial_equilibrium(params: NLDParams) -> tuple[float, float]:
    th, mu, b = params.theta_sharp, params.mu_sharp, params.b
    if th > 0:
        return (float(np.sqrt((th - mu) / b)), 0.0)
    return (0.0, float(np.sqrt((-th - mu) / b)))


def _decay_fit(y_half: np.ndarray, amp: np.ndarray, y_max: float) -> float:
    """Slope of log amplitude on the tail window [0.5, 0.9] * y_max."""
    mask = (y_half >= 0.5 * y_max) & (y_half <= 0.9 * y_max) & (amp > 0)
    coef = np.polyfit(y_half[mask], np.log(amp[mask]), 1)
    return float(-coef[0])


def polar_angle(profile: SpinorProfile) -> np.ndarray:
    """Unwrapped phase-plane angle along the trajectory."""
    return np.unwrap(np.arctan2(profile.v, profile.u))


def angle_monotone(profile: SpinorProfile, floor_rel: float = 1e-6) -> bool:
    """Whether the polar angle is one-signed monotone along the orbit.

    Samples with amplitude below floor_rel times the peak are excluded:
    there the angle increments sit at rounding level (the angle itself
    tends to a constant eigendirection) and carry no information.
    """
    theta = polar_angle(profile)
    amp = np.hypot(profile.u, profile.v)
    keep = amp > floor_rel * np.max(amp)
    d = np.diff(theta)[keep[:-1] & keep[1:]]
    if len(d) == 0:
        raise ValueError("no samples above the amplitude floor")
    return bool(np.all(d < 0.0) or np.all(d > 0.0))


def _fd1(samples: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative on a uniform grid, one-sided at the ends."""
    d = np.empty_like(samples)
    d[2:-2] = (
        samples[:-4] - 8.0 * samples[1:-3] + 8.0 * samples[3:-1] - samples[4:]
    ) / (12.0 * h)
    for i in (0, 1):
        d[i] = (
            -25.0 * samples[i] + 48.0 * samples[i + 1] - 36.0 * samples[i + 2]
            + 16.0 * samples[i + 3] - 3.0 * samples[i + 4]
        ) / (12.0 * h)
    for i in (-1, -2):
        d[i] = (
            25.0 * samples[i] - 48.0 * samples[i - 1] + 36.0 * samples[i - 2]
            - 16.0 * samples[i - 3] + 3.0 * samples[i - 4]
        ) / (12.0 * h)
    return d


def _potential_matrix(params: NLDParams, psi_minus: np.ndarray) -> np.ndarray:
    """Pointwise 2x2 coupling built from the soliton, shape (2, 2, n)."""
    b1, b2 = params.beta1, params.beta2
    diag = 6.0 * b1 * np.abs(psi_minus) ** 2
    off_top = 3.0 * (b1 * psi_minus**2 + b2 * np.conj(psi_minus) ** 2)
    off_bot = 3.0 * (b1 * np.conj(psi_minus) ** 2 + b2 * psi_minus**2)
    return np.array([[diag, off_top], [off_bot, diag]])


def d0_apply(params: NLDParams, profile: SpinorProfile, eta: np.ndarray) -> np.ndarray:
    """Apply the linearized operator at the soliton to spinor samples.

    eta has shape (2, n) on profile.y_grid; the derivative uses the
    fourth-order stencil above.  The derivative spinor Psi' lies in the
    kernel, which is the main consistency check downstream.
    """
    eta = np.asarray(eta, dtype=complex)
    if eta.shape != (2, len(profile.y_grid)):
        raise ValueError(
            f"eta shape {eta.shape} does not match grid (2, {len(profile.y_grid)})"
        )
    h = profile.y_grid[1] - profile.y_grid[0]
    c, th, mu = params.c_sharp, params.theta_sharp, params.mu_sharp
    deta = np.stack([_fd1(eta[0], h), _fd1(eta[1], h)])
    W = _potential_matrix(params, profile.psi_minus)
    out = np.empty_like(eta)
    out[0] = 1j * c * deta[0] + th * eta[1] - mu * eta[0] - W[0, 0] * eta[0] - W[0, 1] * eta[1]
    out[1] = -1j * c * deta[1] + th * eta[0] - mu * eta[1] - W[1, 0] * eta[0] - W[1, 1] * eta[1]
    return out


@dataclass
class KernelCheckResult:
    sigma_min_unrestricted: float
    sigma_min_restricted: float
    operator_norm: float


def _d0_matrix(params: NLDParams, profile: SpinorProfile) -> np.ndarray:
    """Dense complex matrix of the linearized operator with Dirichlet ends."""
    n = len(profile.y_grid)
    h = profile.y_grid[1] - profile.y_grid[0]
    c, th, mu = params.c_sharp, params.theta_sharp, params.mu_sharp
    # 4th-order central difference with zero extension beyond the ends
    D = np.zeros((n, n))
    for off, w in ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)):
        idx = np.arange(max(0, -off), min(n, n - off))
        D[idx, idx + off] = w / (12.0 * h)
    W = _potential_matrix(params, profile.psi_minus)
    A = np.zeros((2 * n, 2 * n), dtype=complex)
    A[:n, :n] = 1j * c * D - (mu * np.eye(n)) - np.diag(W[0, 0])
    A[:n, n:] = th * np.eye(n) - np.diag(W[0, 1])
    A[n:, :n] = th * np.eye(n) - np.diag(W[1, 0])
    A[n:, n:] = -1j * c * D - (mu * np.eye(n)) - np.diag(W[1, 1])
    return A


def kernel_check_on_Y(
    params: NLDParams, profile: SpinorProfile, n_points: int = 601
) -> KernelCheckResult:
    """Smallest singular values of the discretized linearization.

    Unrestricted, the derivative spinor gives a near-kernel.  Restricted
    to the symmetric subspace Y = {conj(zeta) = sigma1 zeta,
    zeta(y) = +-sigma1 zeta(-y)} (sign by sign(theta#)), the smallest
    singular value stays bounded away from zero.
    """
    sub = _subsample(profile, n_points)
    A = _d0_matrix(params, sub)
    svals = np.linalg.svd(A, compute_uv=False)
    op_norm, s_unres = float(svals[0]), float(svals[-1])

    # real representation acting on [Re z, Im z]
    n2 = A.shape[0]
    R = np.block([[A.real, -A.imag], [A.imag, A.real]])
    B = _symmetry_basis(len(sub.y_grid), params.theta_sharp > 0)
    s_res = float(np.linalg.svd(R @ B, compute_uv=False)[-1])
    return KernelCheckResult(
        sigma_min_unrestricted=s_unres,
        sigma_min_restricted=s_res,
        operator_norm=op_norm,
    )


def _subsample(profile: SpinorProfile, n_points: int) -> SpinorProfile:
    if n_points % 2 == 0:
        n_points += 1
    y = np.linspace(-profile.y_max, profile.y_max, n_points)
    u, v = profile.evaluate(y)
    return SpinorProfile(
        params=profile.params,
        y_grid=y,
        u=u,
        v=v,
        hamiltonian_trace=hamiltonian(profile.params, u, v),
        decay_rate_fit=profile.decay_rate_fit,
        h_drift_max=profile.h_drift_max,
        _dense=profile._dense,
    )


def _symmetry_basis(n: int, even_case: bool) -> np.ndarray:
    """Orthonormal basis of Y in the real representation.

    Spinors in Y have zeta = ((p + iq)/2, (p - iq)/2) with p, q real and,
    for theta# > 0, p even and q odd in y (swapped parities otherwise).
    Real-representation coordinates are [Re z-, Re z+, Im z-, Im z+],
    each block of length n on a symmetric grid with center point.
    """
    mid = n // 2
    cols = []

    def spinor_cols(field, is_p):
        # zeta- = (p + iq)/2, zeta+ = (p - iq)/2
        col = np.zeros(4 * n)
        if is_p:
            col[0:n] = 0.5 * field
            col[n:2 * n] = 0.5 * field
        else:
            col[2 * n:3 * n] = 0.5 * field
            col[3 * n:4 * n] = -0.5 * field
        return col

    p_even = even_case
    for j in range(mid, n):
        f = np.zeros(n)
        f[j] = 1.0
        if j != n - 1 - j:
            f[n - 1 - j] = 1.0 if p_even else -1.0
        if p_even or j != n - 1 - j:
            cols.append(spinor_cols(f / np.linalg.norm(f), True))
    q_even = not p_even
    for j in range(mid, n):
        f = np.zeros(n)
        f[j] = 1.0
        if j != n - 1 - j:
            f[n - 1 - j] = 1.0 if q_even else -1.0
        if q_even or j != n - 1 - j:
            cols.append(spinor_cols(f / np.linalg.norm(f), False))
    B = np.array(cols).T
    # columns have norm 1/sqrt(2) * ... from the 1/2 spinor factors; orthonormalize
    B /= np.linalg.norm(B, axis=0)
    return B
