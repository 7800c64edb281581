"""Stochastic collapse dynamics on a 1-d position grid.

Two layers:

* trajectory evolution of the family of noise-driven wave equations

      d psi = [ -(i/hbar) H dt + sqrt(lam) (zeta q - Re(zeta) <q>) dW
                - (lam/2) (|zeta|^2 q^2 - 2 zeta Re(zeta) q <q>
                           + Re(zeta)^2 <q>^2) dt ] psi

  whose noise averages of quadratic observables do not depend on the unit
  phase zeta. zeta = 1 is the norm-preserving collapse equation; zeta = i
  removes every nonlinear term and integrates as a random potential
  -sqrt(lam) hbar q w(t) (midpoint/Stratonovich), a pure position phase.

* ensemble-level master equations for the averaged density matrix: the
  quadratic-localization form with decay (lam/2)(x-y)^2 and the jump-model
  form with decay lam_grw [1 - exp(-alpha (x-y)^2 / 4)].

Integrator: split steps, kinetic term applied spectrally, potential and
noise terms applied in position space where they are diagonal (the noise
factor is exact per step for frozen <q>; <q> is fixed-point iterated at the
step midpoint). Trajectories are seeded independently from a master seed
via spawn keys, so ensembles are reproducible and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import GrwParams, ModelParams

__all__ = [
    "WavefunctionGrid",
    "NoisePath",
    "DensityMatrixGrid",
    "EnsembleStats",
    "ZetaTrajectory",
    "NormDriftError",
    "GridEscapeError",
    "TraceDriftError",
    "make_grid",
    "evolve_zeta",
    "ensemble_run",
    "evolve_master_qmupl",
    "evolve_master_grw",
]


class NormDriftError(RuntimeError):
    """Collapse-path norm drift left the per-step envelope.

    The unnormalized step norm is a martingale weight whose physical
    fluctuation scale is lam * Var_q * dW^2; the abort fires at 30x that
    envelope, or at the absolute floor 1e-4 when the envelope is tighter.
    """


class GridEscapeError(RuntimeError):
    """Wavefunction support reached the grid boundary."""


class TraceDriftError(RuntimeError):
    """Master-equation trace left unity beyond tolerance."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass
class WavefunctionGrid:
    """Complex amplitudes on a periodic position grid.

    The grid is x_min + dx * [0 .. n_points-1] with dx = (x_max - x_min) /
    n_points (FFT convention, x_max excluded); n_points must be a power of
    two.
    """

    x_min: float
    x_max: float
    n_points: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if not _is_power_of_two(self.n_points):
            raise ValueError("n_points must be a power of two")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.n_points,):
            raise ValueError("amplitudes shape does not match n_points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def norm(self) -> float:
        return math.sqrt(self.dx * float(np.sum(np.abs(self.amplitudes) ** 2)))

    def normalized(self) -> "WavefunctionGrid":
        return WavefunctionGrid(self.x_min, self.x_max, self.n_points,
                                self.amplitudes / self.norm())

    def mean_q(self) -> float:
        a2 = np.abs(self.amplitudes) ** 2
        return float(np.sum(self.x * a2) / np.sum(a2))

    def mean_q2(self) -> float:
        a2 = np.abs(self.amplitudes) ** 2
        return float(np.sum(self.x ** 2 * a2) / np.sum(a2))

    def mean_p2(self, hbar: float) -> float:
        ft = np.fft.fft(self.amplitudes)
        k = 2.0 * math.pi * np.fft.fftfreq(self.n_points, self.dx)
        w = np.abs(ft) ** 2
        return float(np.sum((hbar * k) ** 2 * w) / np.sum(w))

    def boundary_ok(self, rel: float = 1e-6) -> bool:
        amp = np.abs(self.amplitudes)
        edge = max(amp[:2].max(), amp[-2:].max())
        return edge < rel * amp.max()

    @classmethod
    def gaussian(cls, x_min: float, x_max: float, n_points: int,
                 center: float = 0.0, sigma: float = 1.0,
                 momentum: float = 0.0, hbar: float = 1.0
                 ) -> "WavefunctionGrid":
        """Normalized Gaussian packet of position spread sigma, optionally
        boosted to mean momentum ``momentum``."""
        grid = cls(x_min, x_max, n_points,
                   np.zeros(n_points, dtype=complex))
        x = grid.x
        psi = np.exp(-((x - center) ** 2) / (4.0 * sigma ** 2)
                     + 1j * momentum * x / hbar)
        grid.amplitudes = psi
        return grid.normalized()

    @classmethod
    def two_gaussians(cls, x_min: float, x_max: float, n_points: int,
                      centers: tuple, sigma: float,
                      weights: tuple = (0.5, 0.5)) -> "WavefunctionGrid":
        """Normalized superposition sqrt(w1) g1 + sqrt(w2) g2 of two packets."""
        grid = cls(x_min, x_max, n_points, np.zeros(n_points, dtype=complex))
        x = grid.x
        psi = np.zeros_like(x, dtype=complex)
        for c, w in zip(centers, weights):
            g = np.exp(-((x - c) ** 2) / (4.0 * sigma ** 2))
            g /= math.sqrt(math.sqrt(2.0 * math.pi) * sigma)  # unit L2 norm
            psi += math.sqrt(w) * g
        grid.amplitudes = psi
        return grid.normalized()


def make_grid(sigma_max: float, sigma_min: float, center: float = 0.0,
              span_sigmas: float = 8.0, points_per_sigma: int = 16
              ) -> tuple[float, float, int]:
    """Default box: +-span_sigmas of the widest expected state, resolution
    dx <= sigma_min / points_per_sigma, rounded up to a power of two."""
    half = span_sigmas * sigma_max
    dx_target = sigma_min / points_per_sigma
    n = 1 << max(2, math.ceil(math.log2(2.0 * half / dx_target)))
    return center - half, center + half, n


@dataclass(frozen=True)
class NoisePath:
    """Precomputed Wiener increments: i.i.d. N(0, dt), units sqrt(s).

    ``seed`` is the 64-bit integer actually fed to the generator, so equal
    seeds reproduce identical paths.
    """

    seed: int
    dt: float
    increments: np.ndarray

    @classmethod
    def generate(cls, seed: int, dt: float, n_steps: int) -> "NoisePath":
        rng = np.random.default_rng(seed)
        inc = rng.normal(0.0, math.sqrt(dt), n_steps)
        return cls(seed=seed, dt=dt, increments=inc)

    @staticmethod
    def trajectory_seed(master_seed: int, index: int) -> int:
        """Mixing function: first state word of SeedSequence(master_seed,
        spawn_key=(index,)). Deterministic and independent of evaluation
        order, so parallel ensembles reproduce bit-identically."""
        ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
        return int(ss.generate_state(1, np.uint64)[0])

    @classmethod
    def for_trajectory(cls, master_seed: int, index: int, dt: float,
                       n_steps: int) -> "NoisePath":
        return cls.generate(cls.trajectory_seed(master_seed, index),
                            dt, n_steps)


@dataclass
class DensityMatrixGrid:
    """Position-representation density matrix rho(x, y) on the grid of
    :class:`WavefunctionGrid` (same FFT box conventions)."""

    x_min: float
    x_max: float
    n_points: int
    rho: np.ndarray

    def __post_init__(self):
        if not _is_power_of_two(self.n_points):
            raise ValueError("n_points must be a power of two")
        self.rho = np.asarray(self.rho, dtype=complex)
        if self.rho.shape != (self.n_points, self.n_points):
            raise ValueError("rho must be n_points x n_points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho))) * self.dx

    def hermiticity_defect(self) -> float:
        scale = np.max(np.abs(self.rho))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.rho - self.rho.conj().T)) / scale)

    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.rho + self.rho.conj().T)
        return float(np.linalg.eigvalsh(sym * self.dx).min())

    def mean_q2(self) -> float:
        p = np.real(np.diag(self.rho)) * self.dx
        return float(np.sum(self.x ** 2 * p) / np.sum(p))

    def mean_p2(self, hbar: float) -> float:
        # <p^2> = -hbar^2 Tr[d^2 rho(x, y)/dx^2 at y = x], spectrally in x
        k = 2.0 * math.pi * np.fft.fftfreq(self.n_points, self.dx)
        d2 = np.fft.ifft(-(k[:, None] ** 2) * np.fft.fft(self.rho, axis=0),
                         axis=0)
        val = -hbar * hbar * np.sum(np.diag(d2)) * self.dx
        return float(np.real(val)) / self.trace()

    @classmethod
    def from_pure(cls, psi: WavefunctionGrid) -> "DensityMatrixGrid":
        a = psi.normalized().amplitudes
        return cls(psi.x_min, psi.x_max, psi.n_points,
                   np.outer(a, a.conj()))


@dataclass(frozen=True)
class ZetaTrajectory:
    """One stochastic trajectory sampled at requested times."""

    times: np.ndarray
    states: list
    mean_q: np.ndarray
    mean_q2: np.ndarray
    mean_p2: np.ndarray
    norms: np.ndarray
    max_norm_drift: float


@dataclass(frozen=True)
class EnsembleStats:
    """Trajectory-ensemble observables with trajectory-level standard errors."""

    n_traj: int
    times: np.ndarray
    mean_q: np.ndarray
    se_q: np.ndarray
    mean_q2: np.ndarray
    se_q2: np.ndarray
    mean_p2: np.ndarray
    se_p2: np.ndarray
    flags: tuple = ()
    mean_density: np.ndarray | None = None
    density_se_frobenius: float | None = None
    per_trajectory: dict | None = None


def _validate_steps(t_final: float, dt: float) -> int:
    n_steps = int(round(t_final / dt))
    if n_steps < 1 or abs(n_steps * dt - t_final) > 1e-9 * max(t_final, dt):
        raise ValueError("t_final must be an integer number of dt steps")
    return n_steps


def _sample_steps(sample_times, t_final: float, dt: float,
                  n_steps: int) -> list[int]:
    if sample_times is None:
        return [n_steps]
    steps = []
    for ts in sample_times:
        idx = int(round(ts / dt))
        if idx < 0 or idx > n_steps:
            raise ValueError(f"sample time {ts} outside [0, {t_final}]")
        steps.append(idx)
    if sorted(set(steps)) != steps:
        raise ValueError("sample times must be strictly increasing")
    return steps


def _evolve_batch(psi: np.ndarray, x: np.ndarray, dx: float, dt: float,
                  n_steps: int, dw: np.ndarray, *, hbar: float, mass: float,
                  kappa: float, lam: float, zeta: complex,
                  with_hamiltonian: bool, sample_steps: list[int],
                  collect_states: bool = False):
    """Evolve a (batch, n) amplitude array; returns per-sample observables.

    Strang composition per step: half kinetic, position-diagonal noise +
    potential factor (exact for frozen midpoint <q>), half kinetic.
    Adjacent half steps are merged; samples land on step boundaries.
    """
    batch, n = psi.shape
    zr = zeta.real
    nonlinear = abs(zr) > 1e-14
    collapse_path = abs(zeta - 1.0) < 1e-12
    x_row = x[None, :]
    x_scale = max(abs(x[0]), abs(x[-1]))

    k = 2.0 * math.pi * np.fft.fftfreq(n, dx)
    kin_half = np.exp(-1j * hbar * k * k * dt / (4.0 * mass))
    kin_full = kin_half * kin_half
    pot = -1j * (0.5 * kappa * x * x) * dt / hbar if with_hamiltonian else 0.0
    # step-constant part of the position factor (potential phase)
    pot_fac = np.exp(pot) if with_hamiltonian and kappa != 0.0 else None

    sqrt_lam = math.sqrt(lam)

    def collapse_exponent(qbar, dwj):
        # zeta = 1: real exponent sqrt(lam) u dW - lam u^2 dt, u = x - qbar
        u = x_row - qbar
        return u * (sqrt_lam * dwj - lam * dt * u)

    def noise_exponent(qbar, dwj):
        lin = sqrt_lam * (zeta * x_row - zr * qbar) * dwj
        quad = (abs(zeta) ** 2 * x_row * x_row
                - 2.0 * zeta * zr * x_row * qbar + zr * zr * qbar * qbar)
        ito = (zeta * x_row - zr * qbar) ** 2
        return lin - 0.5 * lam * (quad + ito) * dt

    def mean_q_of(a):
        w = np.abs(a) ** 2
        return (np.sum(x_row * w, axis=1) / np.sum(w, axis=1))[:, None]

    n_samp = len(sample_steps)
    obs = {name: np.empty((batch, n_samp)) for name in
           ("q", "q2", "p2", "norm")}
    states = np.empty((n_samp, batch, n), dtype=complex) if collect_states \
        else None
    max_drift = 0.0

    def record(i_samp, a):
        w = np.abs(a) ** 2
        tot = np.sum(w, axis=1)
        if np.any(~np.isfinite(tot)):
            raise NormDriftError("non-finite amplitudes encountered")
        edge = np.maximum(np.abs(a[:, :2]).max(axis=1),
                          np.abs(a[:, -2:]).max(axis=1))
        if np.any(edge > 1e-6 * np.abs(a).max(axis=1)):
            raise GridEscapeError("wavefunction reached the grid boundary; "
                                  "enlarge the box")
        obs["q"][:, i_samp] = np.sum(x_row * w, axis=1) / tot
        obs["q2"][:, i_samp] = np.sum(x_row ** 2 * w, axis=1) / tot
        ft = np.fft.fft(a, axis=1)
        wk = np.abs(ft) ** 2
        obs["p2"][:, i_samp] = (np.sum((hbar * k[None, :]) ** 2 * wk, axis=1)
                                / np.sum(wk, axis=1))
        obs["norm"][:, i_samp] = np.sqrt(dx * tot)
        if collect_states:
            states[i_samp] = a

    sample_set = set(sample_steps)
    i_samp = 0
    if sample_steps and sample_steps[0] == 0:
        record(0, psi)
        i_samp = 1

    open_half = False
    if with_hamiltonian and n_steps > 0:
        psi = np.fft.ifft(np.fft.fft(psi, axis=1) * kin_half, axis=1)
        open_half = True

    for j in range(n_steps):
        dwj = dw[:, j][:, None]
        if collapse_path:
            # real-exponent fast path: the fixed-point iteration runs on
            # the weights |psi|^2 only; psi is touched once at the end
            w0 = psi.real ** 2 + psi.imag ** 2
            tot0 = np.sum(w0, axis=1)
            q_pre = (np.sum(x_row * w0, axis=1) / tot0)[:, None]
            var_pre = np.sum(x_row ** 2 * w0, axis=1) / tot0 \
                - q_pre[:, 0] ** 2
            # pre-normalization norm is a martingale weight; abort only
            # well outside its fluctuation envelope (or the absolute floor
            # 1e-4 when that envelope is tighter)
            envelope = np.maximum(
                1e-4, 30.0 * lam * var_pre * (dwj[:, 0] ** 2 + dt))
            qbar = q_pre
            for _ in range(4):
                wt = w0 * np.exp(2.0 * collapse_exponent(qbar, dwj))
                q_post = (np.sum(x_row * wt, axis=1)
                          / np.sum(wt, axis=1))[:, None]
                qbar_new = 0.5 * (q_pre + q_post)
                converged = np.max(np.abs(qbar_new - qbar)) <= 1e-10 * x_scale
                qbar = qbar_new
                if converged:
                    break
            psi = psi * np.exp(collapse_exponent(qbar, dwj))
            if pot_fac is not None:
                psi = psi * pot_fac
            norms = np.sqrt(dx * np.sum(psi.real ** 2 + psi.imag ** 2,
                                        axis=1))
            drifts = np.abs(norms - 1.0)
            if np.any(drifts > envelope):
                raise NormDriftError(
                    f"norm drift {drifts.max():.3e} beyond the step envelope "
                    f"{envelope[np.argmax(drifts)]:.3e}; reduce dt")
            max_drift = max(max_drift, float(drifts.max()))
            psi = psi / norms[:, None]
        elif nonlinear:
            q_pre = mean_q_of(psi)
            qbar = q_pre
            trial = None
            for _ in range(4):
                trial = psi * np.exp(pot + noise_exponent(qbar, dwj))
                qbar_new = 0.5 * (q_pre + mean_q_of(trial))
                converged = np.max(np.abs(qbar_new - qbar)) <= 1e-10 * x_scale
                qbar = qbar_new
                if converged:
                    break
            psi = trial if converged else \
                psi * np.exp(pot + noise_exponent(qbar, dwj))
        else:
            psi = psi * np.exp(pot + noise_exponent(0.0, dwj))
        at_boundary = (j + 1) in sample_set or j == n_steps - 1
        if with_hamiltonian:
            if at_boundary:
                psi = np.fft.ifft(np.fft.fft(psi, axis=1) * kin_half, axis=1)
                open_half = False
            else:
                psi = np.fft.ifft(np.fft.fft(psi, axis=1) * kin_full, axis=1)
        if (j + 1) in sample_set:
            record(i_samp, psi)
            i_samp += 1
        if with_hamiltonian and j != n_steps - 1 and not open_half:
            psi = np.fft.ifft(np.fft.fft(psi, axis=1) * kin_half, axis=1)
            open_half = True

    return obs, states, psi, max_drift


def evolve_zeta(psi0: WavefunctionGrid, params: ModelParams, zeta: complex,
                noise: NoisePath, t_final: float, *,
                sample_times=None, with_hamiltonian: bool = True,
                collect_states: bool = True) -> ZetaTrajectory:
    """Evolve one trajectory of the zeta-family equation.

    ``zeta`` must be a unit phase. The collapse path (zeta = 1) is
    renormalized each step after a drift check; the linear path (zeta = i)
    keeps its norm pathwise since its step factor is a pure phase.
    """
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError("zeta must be a unit phase")
    dt = noise.dt
    n_steps = _validate_steps(t_final, dt)
    if len(noise.increments) < n_steps:
        raise ValueError("noise path shorter than the requested evolution")
    sample_steps = _sample_steps(sample_times, t_final, dt, n_steps)
    psi = psi0.normalized().amplitudes[None, :].copy()
    obs, states, _, drift = _evolve_batch(
        psi, psi0.x, psi0.dx, dt, n_steps,
        noise.increments[None, :n_steps],
        hbar=params.constants.hbar, mass=params.mass, kappa=params.kappa,
        lam=params.lambda_qmupl, zeta=zeta,
        with_hamiltonian=with_hamiltonian, sample_steps=sample_steps,
        collect_states=collect_states)
    times = np.array([s * dt for s in sample_steps])
    state_list = []
    if collect_states:
        state_list = [WavefunctionGrid(psi0.x_min, psi0.x_max,
                                       psi0.n_points, states[i, 0])
                      for i in range(len(sample_steps))]
    return ZetaTrajectory(times=times, states=state_list,
                          mean_q=obs["q"][0], mean_q2=obs["q2"][0],
                          mean_p2=obs["p2"][0], norms=obs["norm"][0],
                          max_norm_drift=drift)


def ensemble_run(params: ModelParams, zeta: complex, psi0: WavefunctionGrid,
                 n_traj: int, t_final: float, master_seed: int, *,
                 dt: float, sample_times=None, with_hamiltonian: bool = True,
                 collect_density: bool = False,
                 keep_trajectory_observables: bool = False,
                 chunk_size: int = 500, threads: int = 1,
                 target_stderr: float | None = None) -> EnsembleStats:
    """Monte-Carlo ensemble of trajectories with deterministic seeding.

    Trajectory i draws its noise from ``NoisePath.trajectory_seed(
    master_seed, i)``; chunks are combined in fixed index order, so results
    are bit-identical across runs and thread counts.
    """
    if n_traj < 100:
        raise ValueError("ensemble_run requires n_traj >= 100")
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError("zeta must be a unit phase")
    n_steps = _validate_steps(t_final, dt)
    sample_steps = _sample_steps(sample_times, t_final, dt, n_steps)
    psi_init = psi0.normalized().amplitudes
    x, dx = psi0.x, psi0.dx
    hbar = params.constants.hbar

    ranges = [(i, min(i + chunk_size, n_traj))
              for i in range(0, n_traj, chunk_size)]

    def run_chunk(bounds):
        i0, i1 = bounds
        b = i1 - i0
        dw = np.empty((b, n_steps))
        for j in range(b):
            dw[j] = NoisePath.for_trajectory(master_seed, i0 + j, dt,
                                             n_steps).increments
        psi = np.broadcast_to(psi_init, (b, len(psi_init))).copy()
        obs, _, psi_final, _ = _evolve_batch(
            psi, x, dx, dt, n_steps, dw, hbar=hbar, mass=params.mass,
            kappa=params.kappa, lam=params.lambda_qmupl, zeta=zeta,
            with_hamiltonian=with_hamiltonian, sample_steps=sample_steps,
            collect_states=False)
        out = {"obs": obs}
        if collect_density:
            a = psi_final / np.sqrt(dx * np.sum(np.abs(psi_final) ** 2,
                                                axis=1))[:, None]
            out["rho_sum"] = np.einsum("bi,bj->ij", a, a.conj())
            amp2 = np.abs(a) ** 2
            out["rho_sq_sum"] = np.einsum("bi,bj->ij", amp2, amp2)
        return out

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, ranges))
    else:
        results = [run_chunk(r) for r in ranges]

    # fixed-order reduction
    all_obs = {name: np.concatenate([r["obs"][name] for r in results], axis=0)
               for name in ("q", "q2", "p2", "norm")}
    times = np.array([s * dt for s in sample_steps])

    def stats(a):
        mean = a.mean(axis=0)
        var = a.var(axis=0, ddof=1)
        return mean, np.sqrt(var / n_traj)

    mean_q, se_q = stats(all_obs["q"])
    mean_q2, se_q2 = stats(all_obs["q2"])
    mean_p2, se_p2 = stats(all_obs["p2"])

    flags = []
    if target_stderr is not None:
        worst = max(se_q2.max(), se_p2.max())
        if worst > target_stderr:
            flags.append(f"stderr {worst:.3e} above target {target_stderr:.3e}")

    mean_density = None
    se_frob = None
    if collect_density:
        mean_density = sum(r["rho_sum"] for r in results) / n_traj
        second = sum(r["rho_sq_sum"] for r in results) / n_traj
        var = np.maximum(second - np.abs(mean_density) ** 2, 0.0)
        se_frob = float(dx * math.sqrt(np.sum(var) / n_traj))

    per_traj = None
    if keep_trajectory_observables:
        per_traj = all_obs
    return EnsembleStats(n_traj=n_traj, times=times, mean_q=mean_q,
                         se_q=se_q, mean_q2=mean_q2, se_q2=se_q2,
                         mean_p2=mean_p2, se_p2=se_p2, flags=tuple(flags),
                         mean_density=mean_density,
                         density_se_frobenius=se_frob,
                         per_trajectory=per_traj)


# ---------------------------------------------------------------------------
# master equations

def _unitary_step(rho: np.ndarray, kin_phase: np.ndarray,
                  pot_half: np.ndarray) -> np.ndarray:
    # rho -> U rho U^dagger, U = P_half K P_half (kinetic spectral)
    rho = pot_half[:, None] * rho * pot_half.conj()[None, :]
    rho = np.fft.ifft(kin_phase[:, None] * np.fft.fft(rho, axis=0), axis=0)
    rho = np.fft.fft(kin_phase.conj()[None, :] * np.fft.ifft(rho, axis=1),
                     axis=1)
    rho = pot_half[:, None] * rho * pot_half.conj()[None, :]
    return rho


def _evolve_master(rho0: DensityMatrixGrid, decay_rate: np.ndarray,
                   params: ModelParams, t_final: float, dt: float | None,
                   with_hamiltonian: bool) -> DensityMatrixGrid:
    """Shared driver: exact exponential for the position-diagonal decay,
    Strang-composed with the unitary part when a Hamiltonian is present."""
    rho = rho0.rho.copy()
    trace0 = rho0.trace()
    if not with_hamiltonian:
        rho = rho * np.exp(-decay_rate * t_final)
    else:
        if dt is None:
            scale = params.omega0 if params.omega0 > 0.0 else 1.0 / t_final
            dt = min(t_final, 0.05 / scale)
        n_steps = max(1, int(round(t_final / dt)))
        dt = t_final / n_steps
        x = rho0.x
        k = 2.0 * math.pi * np.fft.fftfreq(rho0.n_points, rho0.dx)
        hbar = params.constants.hbar
        kin = np.exp(-1j * hbar * k * k * dt / (2.0 * params.mass))
        pot_half = np.exp(-1j * (0.5 * params.kappa * x * x) * dt
                          / (2.0 * hbar))
        half_decay = np.exp(-decay_rate * dt / 2.0)
        for _ in range(n_steps):
            rho = half_decay * rho
            rho = _unitary_step(rho, kin, pot_half)
            rho = half_decay * rho
    out = DensityMatrixGrid(rho0.x_min, rho0.x_max, rho0.n_points, rho)
    if abs(out.trace() - trace0) > 1e-5 * max(abs(trace0), 1.0):
        raise TraceDriftError(f"trace drifted from {trace0} to {out.trace()}")
    return out


def evolve_master_qmupl(rho0: DensityMatrixGrid, params: ModelParams,
                        t_final: float, *, dt: float | None = None,
                        with_hamiltonian: bool = True) -> DensityMatrixGrid:
    """Quadratic-localization master equation: off-diagonal decay at rate
    (lam/2)(x - y)^2 (one dimension), exact when H = 0."""
    x = rho0.x
    decay = 0.5 * params.lambda_qmupl * (x[:, None] - x[None, :]) ** 2
    return _evolve_master(rho0, decay, params, t_final, dt, with_hamiltonian)


def evolve_master_grw(rho0: DensityMatrixGrid, grw: GrwParams,
                      params: ModelParams, t_final: float, *,
                      dt: float | None = None,
                      with_hamiltonian: bool = True) -> DensityMatrixGrid:
    """Jump-model master equation: decay rate lam_grw [1 - e^{-alpha d^2/4}],
    saturating at lam_grw for separations beyond the correlation length."""
    x = rho0.x
    d2 = (x[:, None] - x[None, :]) ** 2
    decay = grw.lambda_grw * (1.0 - np.exp(-0.25 * grw.alpha * d2))
    return _evolve_master(rho0, decay, params, t_final, dt, with_hamiltonian)
