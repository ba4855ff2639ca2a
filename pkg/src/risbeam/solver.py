"""Joint active/passive beamforming via BCD with an ADPM phase solver.

The spectral-efficiency objective log2 det(I + H W W^H H^H Sigma^-1) is
handled through its weighted-MSE reformulation

    min  tr(Omega J(Z, W)) - log det(Omega) - n_s

over the receiver Z, weight Omega, precoder W (power-limited) and the
unit-modulus RIS phases phi. Z, Omega and W have closed-form exact
minimizers; the phi block reduces to a unit-modulus quadratic program
min phi^H A phi - 2 Re{d^T phi} solved by an alternating direction
penalty method whose penalty grows whenever the split residual stalls.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .cee import ChannelSet
from .config import SolverConfig
from .covariance import NoiseCovariance, NumericalError, sigma_design, sigma_eval

log = logging.getLogger(__name__)

LN2 = float(np.log(2.0))


def _mat(sigma) -> np.ndarray:
    return sigma.matrix if isinstance(sigma, NoiseCovariance) else np.asarray(sigma)


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def cascade(cs: ChannelSet, phi: np.ndarray) -> np.ndarray:
    """Estimated cascaded channel R_hat diag(phi) G_hat."""
    return cs.r_hat @ (phi[:, None] * cs.g_hat)


def achievable_se(h_hat, w, sigma) -> float:
    """log2 det(I + H W W^H H^H Sigma^-1), in bits/s/Hz.

    Evaluated in the symmetrized form det(I + L^-1 H W (L^-1 H W)^H)
    with L the Cholesky factor of Sigma, which keeps the argument
    Hermitian PSD regardless of conditioning.
    """
    sig = _mat(sigma)
    try:
        chol = np.linalg.cholesky(sig)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("interference covariance not positive definite") from exc
    a = np.linalg.solve(chol, h_hat @ w)
    m = np.eye(sig.shape[0]) + _herm(a @ a.conj().T)
    sign, logdet = np.linalg.slogdet(m)
    if sign.real <= 0:
        raise NumericalError("log-det argument lost positive definiteness")
    return float(logdet) / LN2


def mse_matrix(z, w, h_hat, sigma) -> np.ndarray:
    """Error covariance of the linear receiver z on the estimated channel."""
    sig = _mat(sigma)
    hw = h_hat @ w
    zhw = z.conj().T @ hw
    j = z.conj().T @ (hw @ hw.conj().T + sig) @ z - zhw - zhw.conj().T + np.eye(w.shape[1])
    return _herm(j)


def update_z(h_hat, w, sigma) -> np.ndarray:
    """MMSE receiver (H W W^H H^H + Sigma)^-1 H W; exact block minimizer."""
    sig = _mat(sigma)
    hw = h_hat @ w
    s = _herm(hw @ hw.conj().T + sig)
    try:
        return np.linalg.solve(s, hw)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("receiver update: singular covariance") from exc


def update_omega(j: np.ndarray) -> np.ndarray:
    """Weight update Omega = J^-1; raises if the MSE matrix is singular."""
    try:
        omega = np.linalg.solve(j, np.eye(j.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("weight update: singular MSE matrix") from exc
    if not np.all(np.isfinite(omega)):
        raise NumericalError("weight update: non-finite inverse")
    return _herm(omega)


def update_w(
    h_hat: np.ndarray,
    g_hat: np.ndarray,
    r_hat: np.ndarray,
    z: np.ndarray,
    omega: np.ndarray,
    sigma_g2: float,
    sigma_r2: float,
    n_r: int,
    p_tx: float,
    eta_tol: float = 1e-8,
    max_doublings: int = 200,
) -> tuple[np.ndarray, float]:
    """Power-constrained precoder update.

    Solves [H^H Z Om Z^H H + sig_r^2 tr(Om Z^H Z) G^H G
            + sig_g^2 tr(Om Z^H R R^H Z) I + n_r sig_g^2 sig_r^2 tr(Om Z^H Z) I
            + eta I]^-1 H^H Z Om,
    with eta = 0 when the unconstrained solution already satisfies
    ||W||_F^2 <= p_tx and otherwise found by bisection on the monotone
    decreasing map eta -> ||W(eta)||_F^2. Returns (W, eta); the result
    always satisfies ||W||_F^2 <= p_tx (1 + 1e-9), with equality within
    eta_tol relative whenever eta > 0.
    """
    if p_tx <= 0:
        raise ValueError("p_tx must be > 0")
    rhs = h_hat.conj().T @ z @ omega
    n_tx = h_hat.shape[1]
    if np.linalg.norm(rhs) == 0.0:
        return np.zeros((n_tx, omega.shape[0]), dtype=complex), 0.0

    hz = h_hat.conj().T @ z
    v = r_hat.conj().T @ z
    t_zz = float(np.real(np.trace(omega @ (z.conj().T @ z))))
    t_zrz = float(np.real(np.trace(omega @ (v.conj().T @ v))))
    b = hz @ omega @ hz.conj().T
    b = b + sigma_r2 * t_zz * (g_hat.conj().T @ g_hat)
    b = _herm(b) + (sigma_g2 * t_zrz + n_r * sigma_g2 * sigma_r2 * t_zz) * np.eye(n_tx)

    evals, evecs = np.linalg.eigh(b)
    evals = np.maximum(evals, 0.0)
    rt = evecs.conj().T @ rhs
    row_e = np.sum(np.abs(rt) ** 2, axis=1)

    def power(eta: float) -> float:
        denom = evals + eta
        mask = row_e > 0
        if np.any(mask & (denom <= 0)):
            return np.inf
        out = np.zeros_like(row_e)
        out[mask] = row_e[mask] / denom[mask] ** 2
        return float(np.sum(out))

    def w_at(eta: float) -> np.ndarray:
        denom = evals + eta
        coeff = np.zeros_like(rt)
        mask = row_e > 0
        coeff[mask] = rt[mask] / denom[mask, None]
        return evecs @ coeff

    if power(0.0) <= p_tx * (1.0 + 1e-12):
        return w_at(0.0), 0.0

    def power_slope(eta: float) -> float:
        mask = row_e > 0
        return float(-2.0 * np.sum(row_e[mask] / (evals[mask] + eta) ** 3))

    hi, doublings = 1.0, 0
    while power(hi) > p_tx:
        hi *= 2.0
        doublings += 1
        if doublings > max_doublings:
            raise NumericalError("power bisection: bracket not found")
    lo = hi / 2.0 if doublings else 0.0

    # Newton steps safeguarded by the [lo, hi] bracket; power(eta) is
    # smooth, convex and strictly decreasing, so this converges to float
    # accuracy, far inside the configured tolerance, keeping the returned
    # precoder within the power budget.
    eta, p = hi, power(hi)
    for _ in range(200):
        if abs(p - p_tx) <= 1e-13 * p_tx:
            break
        if p > p_tx:
            lo = eta
        else:
            hi = eta
        slope = power_slope(eta)
        nxt = eta - (p - p_tx) / slope if slope < 0 else np.nan
        if not np.isfinite(nxt) or not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == eta or nxt == lo or nxt == hi:
            eta, p = hi, power(hi)  # interval at float resolution
            break
        eta, p = nxt, power(nxt)
    if abs(p - p_tx) > eta_tol * p_tx:
        raise NumericalError("power bisection did not converge")
    return w_at(eta), eta


def build_qp(g_hat, r_hat, w, z, omega) -> tuple[np.ndarray, np.ndarray]:
    """Reduce the phase block to min phi^H A phi - 2 Re{d^T phi}.

    A = (R^H Z Om Z^H R) o (G W W^H G^H)^T is Hermitian PSD (Hadamard
    product of PSD factors); d collects the diagonal of G W Om Z^H R.
    """
    zo = z @ omega @ z.conj().T
    quad_r = r_hat.conj().T @ zo @ r_hat
    gw = g_hat @ w
    quad_g = gw @ gw.conj().T
    a = _herm(quad_r * quad_g.T)
    dmat = gw @ omega @ z.conj().T @ r_hat
    return a, np.diag(dmat).copy()


def qp_objective(a: np.ndarray, d: np.ndarray, phi: np.ndarray) -> float:
    """phi^H A phi - 2 Re{d^T phi}."""
    return float(np.real(np.vdot(phi, a @ phi)) - 2.0 * np.real(np.sum(d * phi)))


@dataclass(frozen=True)
class AdpmResult:
    phi: np.ndarray        # unit-modulus output (final feasible projection)
    iters: int
    residual: float        # ||phi - phi0|| at exit
    converged: bool
    rho: float             # final penalty
    objective: float       # QP objective at the returned phi


def initial_penalty(a: np.ndarray) -> float:
    """sqrt(lambda_min * lambda_max) of A, with the smallest nonzero
    eigenvalue standing in when A is singular (threshold 1e-12 lambda_max);
    falls back to 1.0 for A = 0."""
    evals = np.linalg.eigvalsh(_herm(a))
    lmax = float(evals[-1])
    if lmax <= 0.0:
        return 1.0
    nonzero = evals[evals > 1e-12 * lmax]
    return float(np.sqrt(float(nonzero[0]) * lmax))


def adpm_solve(
    a: np.ndarray,
    d: np.ndarray,
    cfg: SolverConfig,
    phi_init: np.ndarray,
    u0: np.ndarray | None = None,
    rho0: float | None = None,
) -> AdpmResult:
    """Unit-modulus QP solver by alternating direction with a growing penalty.

    Per iteration: project gamma = u + rho*phi onto the unit circle to get
    phi0, solve (2A + rho I) phi = rho phi0 - u + 2 conj(d), then keep rho
    if the residual ||phi - phi0|| fell by at least delta1, else grow it
    by delta2; the multiplier u is rescaled by its largest modulus when
    that exceeds kappa. Terminates when the residual reaches adpm_eps.

    The linear-solve factorization is refreshed only when rho changes.
    A non-converged run is returned flagged, carrying the best feasible
    iterate seen.
    """
    n = d.shape[0]
    a = _herm(np.asarray(a, dtype=complex))
    phi = np.asarray(phi_init, dtype=complex).reshape(-1).copy()
    if phi.shape[0] != n:
        raise ValueError("phi_init length mismatch")
    u = np.zeros(n, dtype=complex) if u0 is None else np.asarray(u0, dtype=complex).copy()
    rho = initial_penalty(a) if rho0 is None else float(rho0)
    if rho <= 0:
        rho = 1.0
    d_conj2 = 2.0 * np.conj(d)

    factor = cho_factor(2.0 * a + rho * np.eye(n))
    de_prev = np.inf
    best_obj, best_phi0 = np.inf, np.exp(1j * np.angle(phi))
    phi0 = best_phi0
    de = 0.0
    iters = 0
    for t in range(1, cfg.adpm_max_iters + 1):
        iters = t
        gamma = u + rho * phi
        phi0 = np.exp(1j * np.angle(gamma))
        phi = cho_solve(factor, rho * phi0 - u + d_conj2)
        de = float(np.linalg.norm(phi - phi0))

        obj0 = qp_objective(a, d, phi0)
        if obj0 < best_obj:
            best_obj, best_phi0 = obj0, phi0

        if de > cfg.adpm_delta1 * de_prev:
            rho *= cfg.adpm_delta2
            factor = cho_factor(2.0 * a + rho * np.eye(n))
        u_trial = u + rho * (phi - phi0)
        u_max = float(np.max(np.abs(u_trial)))
        u = u_trial / u_max if u_max > cfg.adpm_kappa else u_trial
        de_prev = de
        if de <= cfg.adpm_eps:
            return AdpmResult(phi0, t, de, True, rho, qp_objective(a, d, phi0))

    log.debug("ADPM hit the iteration cap with residual %.3e", de)
    return AdpmResult(best_phi0, iters, de, False, rho, best_obj)


@dataclass(frozen=True)
class IterationTrace:
    outer_iter: int
    obj_after_z: float
    obj_after_omega: float
    obj_after_w: float
    objective: float        # after the phase step (end of the iteration)
    se_design: float
    se_eval: float
    adpm_iters: int
    adpm_residual: float
    eta: float
    phi_rejected: bool


@dataclass
class BeamformingState:
    """Solution and per-iteration history of one BCD run."""

    w: np.ndarray
    phi: np.ndarray
    z: np.ndarray
    omega: np.ndarray
    objective: float
    se_design: float
    se_eval: float
    iters: int
    converged: bool
    trace: list[IterationTrace] = field(default_factory=list)


def _objective(cs, z, omega, w, h_hat, phi, noise_var, n_s) -> float:
    sig = sigma_design(cs, w, phi, noise_var)
    j = mse_matrix(z, w, h_hat, sig)
    sign, logdet = np.linalg.slogdet(omega)
    if sign.real <= 0:
        raise NumericalError("weight matrix lost positive definiteness")
    return float(np.real(np.trace(omega @ j))) - float(logdet) - n_s


def init_precoder(h_hat: np.ndarray, n_s: int, p_tx: float) -> np.ndarray:
    """Equal-power start along the top right singular vectors of H_hat."""
    n_tx = h_hat.shape[1]
    w = np.zeros((n_tx, n_s), dtype=complex)
    _, s, vh = np.linalg.svd(h_hat, full_matrices=False)
    rank = int(np.sum(s > max(s[0], 0.0) * 1e-12)) if s.size and s[0] > 0 else 0
    m = min(n_s, rank)
    if m == 0:
        w[0, 0] = np.sqrt(p_tx)
        return w
    w[:, :m] = vh[:m].conj().T * np.sqrt(p_tx / m)
    return w


def bcd_solve(
    cs: ChannelSet,
    cfg: SolverConfig,
    p_tx: float,
    noise_var: float,
    n_s: int,
    rng: np.random.Generator,
    keep_trace: bool = True,
) -> BeamformingState:
    """Alternate the Z / Omega / W / phi blocks until the objective settles.

    Z, Omega and W are exact minimizers of their blocks, so the objective
    is non-increasing across those sub-steps; the ADPM phase step is
    safeguarded (a candidate raising the objective by more than 1e-9 is
    discarded for that iteration). Stops when the end-of-iteration
    objective changes by less than eps_outer, or at r_max (returned with
    converged=False).
    """
    n_r = cs.n_r
    phi = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n_r))
    h_hat = cascade(cs, phi)
    w = init_precoder(h_hat, n_s, p_tx)
    omega = np.eye(n_s, dtype=complex)
    z = np.zeros((cs.n_rx, n_s), dtype=complex)

    trace: list[IterationTrace] = []
    prev_obj = None
    converged = False
    obj_end = np.inf
    iters = 0
    for r in range(1, cfg.r_max + 1):
        iters = r
        sig_d = sigma_design(cs, w, phi, noise_var)
        z = update_z(h_hat, w, sig_d)
        obj_z = _objective(cs, z, omega, w, h_hat, phi, noise_var, n_s)

        omega = update_omega(mse_matrix(z, w, h_hat, sig_d))
        obj_omega = _objective(cs, z, omega, w, h_hat, phi, noise_var, n_s)

        w, eta = update_w(
            h_hat, cs.g_hat, cs.r_hat, z, omega,
            cs.sigma_g2, cs.sigma_r2, n_r, p_tx,
            eta_tol=cfg.eta_tol, max_doublings=cfg.eta_max_doublings,
        )
        obj_w = _objective(cs, z, omega, w, h_hat, phi, noise_var, n_s)

        a, d = build_qp(cs.g_hat, cs.r_hat, w, z, omega)
        res = adpm_solve(a, d, cfg, phi_init=phi)
        h_cand = cascade(cs, res.phi)
        obj_cand = _objective(cs, z, omega, w, h_cand, res.phi, noise_var, n_s)
        if obj_cand > obj_w + 1e-9:
            phi_rejected = True
            obj_end = obj_w
        else:
            phi_rejected = False
            phi, h_hat = res.phi, h_cand
            obj_end = obj_cand

        se_d = achievable_se(h_hat, w, sigma_design(cs, w, phi, noise_var))
        se_e = achievable_se(h_hat, w, sigma_eval(cs, w, phi, noise_var))
        if keep_trace:
            trace.append(IterationTrace(
                r, obj_z, obj_omega, obj_w, obj_end, se_d, se_e,
                res.iters, res.residual, eta, phi_rejected,
            ))
        if prev_obj is not None and abs(obj_end - prev_obj) < cfg.eps_outer:
            converged = True
            break
        prev_obj = obj_end

    se_d = achievable_se(h_hat, w, sigma_design(cs, w, phi, noise_var))
    se_e = achievable_se(h_hat, w, sigma_eval(cs, w, phi, noise_var))
    return BeamformingState(
        w=w, phi=phi, z=z, omega=omega, objective=obj_end,
        se_design=se_d, se_eval=se_e, iters=iters, converged=converged,
        trace=trace,
    )
