"""Ensemble sampling for the Gaussian and weighted field measures.

The base measure draws each coefficient independently,

    Re c_n, Im c_n ~ Normal(0, 1/(1+n^2)),

so the joint density is proportional to exp(-(1/2) sum (1+n^2)|c_n|^2).
Draws are made mode by mode in the fixed order 0, +1, -1, +2, -2, ...
from a counter-based stream keyed by (seed, sample index). Two
consequences are load-bearing for every comparison study:

    * determinism: sample i depends only on (seed, i), not on count or
      worker scheduling;
    * coupling: the band-N restriction of sample i at bandwidth M > N
      is bit-identical to sample i at bandwidth N, because the first
      2(2N+1) variates of the stream are the same.

The weighted measure multiplies the base density by

    chi_{||v||_L2 <= B} * exp(-nonlinear_N(v) / (4 pi)).

With the per-mode variances above, the Gaussian log-density equals
-(m(v) + kinetic(v)/(2 pi)) / 2 up to a constant, so the weighted
density is exp(-m(v)/2 - full_E(v)/(4 pi)) times the cutoff: a function
of the exactly conserved mass and the almost-conserved energy alone.
That pairing is what the invariance experiments measure; any other
exponent would leave a non-conserved Gaussian remainder in the density.

Weighted expectations are self-normalized importance estimates from the
Gaussian ensemble, with delta-method standard errors and the effective
sample size (sum w)^2 / sum w^2 reported alongside.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .functionals import (
    batch_fl_norm,
    batch_l2_norm,
    batch_mass,
    batch_nonlinear_parts,
)
from .gauge import gauge_inverse
from .results import ExperimentResult, linear_fit
from .spectral import (
    SpectralState,
    TWO_PI,
    mode_numbers,
    state_from_bytes,
    state_to_bytes,
)

FOUR_PI = 2.0 * TWO_PI


# ---------------------------------------------------------------------------
# ensembles


@dataclass(frozen=True)
class Ensemble:
    """A matrix of coefficient samples with log importance weights."""

    bandwidth: int
    coeffs: np.ndarray  # (count, 2N+1) complex
    log_weights: np.ndarray  # (count,)
    cutoff_B: float = np.inf
    seed: int = 0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        logw = np.asarray(self.log_weights, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[1] != 2 * self.bandwidth + 1:
            raise ValueError("coeffs must have shape (count, 2*bandwidth+1)")
        if logw.shape != (coeffs.shape[0],):
            raise ValueError("log_weights length must match sample count")
        # cutoff consistency: excluded samples carry zero weight
        over = batch_l2_norm(coeffs) > self.cutoff_B
        if np.any(over & ~np.isneginf(logw)):
            raise ValueError("sample beyond the L2 cutoff must have -inf log weight")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "log_weights", logw)

    @property
    def count(self) -> int:
        return self.coeffs.shape[0]

    def state(self, i: int) -> SpectralState:
        return SpectralState(self.bandwidth, self.coeffs[i])

    def states(self):
        for i in range(self.count):
            yield self.state(i)


def _ordered_modes(bandwidth: int) -> np.ndarray:
    out = [0]
    for n in range(1, bandwidth + 1):
        out.extend((n, -n))
    return np.asarray(out)


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """The counter-based stream owning sample `index` of ensemble `seed`."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def sample_rho(bandwidth: int, count: int, seed: int) -> Ensemble:
    """Draw `count` independent samples of the Gaussian base measure."""
    if count < 1:
        raise ValueError("count must be >= 1")
    order = _ordered_modes(bandwidth)
    scale = 1.0 / np.sqrt(1.0 + order.astype(float) ** 2)
    k = 2 * bandwidth + 1
    coeffs = np.empty((count, k), dtype=np.complex128)
    for i in range(count):
        z = sample_stream(seed, i).standard_normal(2 * k)
        coeffs[i, order + bandwidth] = (z[0::2] + 1j * z[1::2]) * scale
    return Ensemble(bandwidth, coeffs, np.zeros(count), np.inf, seed)


def sample_rho_conditioned(
    bandwidth: int,
    count: int,
    seed: int,
    cutoff_B: float,
    chunk: int = 200000,
    max_proposals: int = 100_000_000,
) -> Ensemble:
    """Draw base-measure samples conditioned on the L2 cutoff ball.

    Chunked rejection: Gaussian proposals are drawn in fixed-size
    blocks (block j from the stream keyed by (seed, j, 1), disjoint
    from the per-sample streams) and only those inside the ball are
    kept, so every kept sample already passes the cutoff and the
    attached log-weights are finite. The result is deterministic in
    (seed, chunk). Raises if the ball is so small that `max_proposals`
    Gaussians are not enough, since the acceptance rate drops
    exponentially as the cutoff shrinks.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n = mode_numbers(bandwidth)
    scale = 1.0 / np.sqrt(1.0 + n.astype(float) ** 2)
    mass_cap = cutoff_B**2 / TWO_PI
    kept = []
    total = 0
    block = 0
    while total < count:
        if block * chunk >= max_proposals:
            raise RuntimeError(
                f"cutoff {cutoff_B} accepted only {total}/{count} samples "
                f"after {block * chunk} proposals"
            )
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(block, 1))
        z = np.random.Generator(np.random.Philox(ss)).standard_normal(
            (chunk, 2 * bandwidth + 1, 2)
        )
        c = (z[..., 0] + 1j * z[..., 1]) * scale
        inside = c[np.sum(np.abs(c) ** 2, axis=-1) <= mass_cap]
        kept.append(inside)
        total += inside.shape[0]
        block += 1
    coeffs = np.concatenate(kept, axis=0)[:count]
    logw = batch_weight_R(coeffs, bandwidth, cutoff_B)
    return Ensemble(bandwidth, coeffs, logw, cutoff_B, seed)


# ---------------------------------------------------------------------------
# weights


def batch_weight_R(coeffs: np.ndarray, bandwidth: int, cutoff_B: float) -> np.ndarray:
    """Log of the unnormalized density of the weighted measure vs the base."""
    nl, _, _, _ = batch_nonlinear_parts(coeffs, bandwidth)
    logw = -np.asarray(nl, dtype=float) / FOUR_PI
    return np.where(batch_l2_norm(coeffs) <= cutoff_B, logw, -np.inf)


def weight_R(state: SpectralState, cutoff_B: float) -> float:
    return float(batch_weight_R(state.coeffs[None, :], state.bandwidth, cutoff_B)[0])


def reweight_to_mu(ensemble: Ensemble, cutoff_B: float) -> Ensemble:
    logw = batch_weight_R(ensemble.coeffs, ensemble.bandwidth, cutoff_B)
    return Ensemble(ensemble.bandwidth, ensemble.coeffs, logw, cutoff_B, ensemble.seed)


def calibrate_cutoff(
    bandwidth: int, seed: int, count: int = 2000, quantile: float = 0.5
) -> float:
    """Pilot-run cutoff: the given L2-norm quantile of base-measure samples.

    Any quantile in (0.1, 0.9) keeps the cutoff pass fraction usable for
    importance sampling by construction.
    """
    if not 0.1 <= quantile <= 0.9:
        raise ValueError("quantile must lie in [0.1, 0.9]")
    pilot = sample_rho(bandwidth, count, seed)
    return float(np.quantile(batch_l2_norm(pilot.coeffs), quantile))


# ---------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    std_error: float
    effective_sample_size: float
    count: int


def estimate_from_values(values: np.ndarray, log_weights: np.ndarray) -> EstimateResult:
    """Self-normalized importance estimate of a weighted expectation."""
    values = np.asarray(values, dtype=float)
    logw = np.asarray(log_weights, dtype=float)
    finite = ~np.isneginf(logw)
    if not np.any(finite):
        raise ValueError("all log weights are -inf; the estimate is undefined")
    w = np.zeros_like(logw)
    w[finite] = np.exp(logw[finite] - np.max(logw[finite]))
    total = np.sum(w)
    ess = float(total**2 / np.sum(w**2))
    if ess < 10:
        raise ValueError(f"effective sample size {ess:.2f} < 10; estimate unusable")
    u = w / total
    mean = float(np.sum(u * values))
    std_error = float(np.sqrt(np.sum(u**2 * (values - mean) ** 2)))
    return EstimateResult(mean, std_error, ess, len(values))


def expectation(ensemble: Ensemble, observable) -> EstimateResult:
    """Weighted expectation of a scalar observable(SpectralState)."""
    values = np.fromiter(
        (float(observable(s)) for s in ensemble.states()), dtype=float, count=ensemble.count
    )
    return estimate_from_values(values, ensemble.log_weights)


def effective_sample_size(log_weights: np.ndarray) -> float:
    logw = np.asarray(log_weights, dtype=float)
    finite = ~np.isneginf(logw)
    if not np.any(finite):
        return 0.0
    w = np.zeros_like(logw)
    w[finite] = np.exp(logw[finite] - np.max(logw[finite]))
    return float(np.sum(w) ** 2 / np.sum(w**2))


# ---------------------------------------------------------------------------
# tail statistics


@dataclass(frozen=True)
class TailCurve:
    k_values: np.ndarray
    survival: np.ndarray
    slope: float  # of log survival against K^2
    intercept: float
    r_squared: float


def tail_curve(ensemble: Ensemble, s: float, r: float, k_grid) -> TailCurve:
    """Empirical weighted survival function of the FL^{s,r} norm."""
    k_grid = np.asarray(k_grid, dtype=float)
    norms = batch_fl_norm(ensemble.coeffs, ensemble.bandwidth, s, r)
    logw = ensemble.log_weights
    finite = ~np.isneginf(logw)
    w = np.zeros_like(logw)
    if np.any(finite):
        w[finite] = np.exp(logw[finite] - np.max(logw[finite]))
    total = np.sum(w)
    survival = np.array([np.sum(w[norms > k]) / total for k in k_grid])
    pos = survival > 0
    if np.sum(pos) >= 2:
        slope, intercept, r2 = linear_fit(k_grid[pos] ** 2, np.log(survival[pos]))
    else:
        slope = intercept = r2 = float("nan")
    return TailCurve(k_grid, survival, slope, intercept, r2)


# ---------------------------------------------------------------------------
# coupled-truncation studies


def _center_slice(coeffs: np.ndarray, big: int, small: int) -> np.ndarray:
    return coeffs[:, big - small : big + small + 1]


def xn_decay_exact_second_moment(n_small: int, n_big: int) -> float:
    """E |X_big - X_small|^2 under the base measure, in closed form.

    The difference is -2 pi i times the shell sum of n |c_n|^2, whose
    mean vanishes by symmetry and whose variance adds 4 n^2/(1+n^2)^2
    per shell mode.
    """
    n = np.arange(n_small + 1, n_big + 1, dtype=float)
    return float(TWO_PI**2 * 8.0 * np.sum(n**2 / (1.0 + n**2) ** 2))


def xn_decay_study(n_list, count: int, seed: int) -> ExperimentResult:
    """Decay of the momentum functional's truncation difference.

    For each N the comparison is X_{2N} - X_N on coupled samples; the
    second moment is checked against its closed form and the L^4 norm
    is fitted against N on a log-log scale.
    """
    rows = []
    for n in n_list:
        big = 2 * n
        ens = sample_rho(big, count, seed)
        modes = np.arange(-big, big + 1)
        shell = np.abs(modes) > n
        s_vals = np.sum(modes[shell] * np.abs(ens.coeffs[:, shell]) ** 2, axis=1)
        diff_sq = (TWO_PI * s_vals) ** 2
        second = float(np.mean(diff_sq))
        second_se = float(np.std(diff_sq) / np.sqrt(count))
        exact = xn_decay_exact_second_moment(n, big)
        l4 = float(np.mean(diff_sq**2) ** 0.25)
        rows.append(
            {
                "n": n,
                "m": big,
                "l4_norm": l4,
                "second_moment": second,
                "second_moment_se": second_se,
                "second_moment_exact": exact,
                "oracle_sigmas": abs(second - exact) / second_se,
            }
        )
    slope, intercept, r2 = linear_fit(
        np.log([r["n"] for r in rows]), np.log([r["l4_norm"] for r in rows])
    )
    fitted = {
        "l4_slope": slope,
        "l4_intercept": intercept,
        "l4_r_squared": r2,
        "max_oracle_sigmas": max(r["oracle_sigmas"] for r in rows),
    }
    passed = fitted["max_oracle_sigmas"] <= 3.0 and -0.8 <= slope <= -0.3
    return ExperimentResult(
        name="xn_decay",
        params={"n_list": list(n_list), "count": count, "seed": seed},
        rows=rows,
        fitted=fitted,
        passed=passed,
    )


NONLINEAR_PART_INDEX = {"F": 1, "G": 2, "K": 3}


def cauchy_in_measure_study(part: str, n_list, count: int, lam, seed: int) -> ExperimentResult:
    """Exceedance decay of one nonlinear-energy part across truncations.

    Estimates P(|Q_{2N} - Q_N| > lambda) under the base measure on
    coupled samples and requires it to decrease along n_list. With
    lam="auto" the threshold is set to the median difference at the
    coarsest level, which puts the exceedance near 1/2 there; a fixed
    threshold far below the difference scale saturates every
    exceedance at 1 and leaves the comparison powerless.
    """
    if part not in NONLINEAR_PART_INDEX:
        raise ValueError(f"part must be one of {sorted(NONLINEAR_PART_INDEX)}")
    idx = NONLINEAR_PART_INDEX[part]
    diffs = []
    for n in n_list:
        big = 2 * n
        ens = sample_rho(big, count, seed)
        q_big = batch_nonlinear_parts(ens.coeffs, big)[idx]
        small = _center_slice(ens.coeffs, big, n)
        q_small = batch_nonlinear_parts(small, n)[idx]
        diffs.append(np.abs(q_big - q_small))
    threshold = float(np.median(diffs[0])) if lam == "auto" else float(lam)
    rows = [
        {
            "n": n,
            "m": 2 * n,
            "median_diff": float(np.median(d)),
            "exceedance": float(np.mean(d > threshold)),
        }
        for n, d in zip(n_list, diffs)
    ]
    values = [r["exceedance"] for r in rows]
    fitted = {
        "lam": threshold,
        "max_exceedance": max(values),
        "min_exceedance": min(values),
    }
    passed = all(a > b for a, b in zip(values, values[1:]))
    return ExperimentResult(
        name=f"cauchy_in_measure_{part}",
        params={"part": part, "n_list": list(n_list), "count": count, "lam": threshold, "seed": seed},
        rows=rows,
        fitted=fitted,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# pushforward under the inverse gauge


def push_nu(ensemble: Ensemble, out_bandwidth: int | None = None) -> Ensemble:
    """Map every sample through the inverse gauge, keeping its weight."""
    if out_bandwidth is None:
        out_bandwidth = 4 * ensemble.bandwidth
    k = 2 * out_bandwidth + 1
    coeffs = np.empty((ensemble.count, k), dtype=np.complex128)
    for i in range(ensemble.count):
        coeffs[i] = gauge_inverse(ensemble.state(i), out_bandwidth).coeffs
    return Ensemble(out_bandwidth, coeffs, ensemble.log_weights.copy(), ensemble.cutoff_B, ensemble.seed)


# ---------------------------------------------------------------------------
# persistence

_HEADER = struct.Struct("<qqqqd")  # version, bandwidth, count, seed, cutoff_B
FORMAT_VERSION = 1


def save_ensemble(ensemble: Ensemble, path) -> None:
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(
                FORMAT_VERSION,
                ensemble.bandwidth,
                ensemble.count,
                ensemble.seed,
                ensemble.cutoff_B,
            )
        )
        for i in range(ensemble.count):
            fh.write(state_to_bytes(ensemble.state(i)))
            fh.write(struct.pack("<d", ensemble.log_weights[i]))


def load_ensemble(path) -> Ensemble:
    with open(path, "rb") as fh:
        version, bandwidth, count, seed, cutoff = _HEADER.unpack(fh.read(_HEADER.size))
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported ensemble format version {version}")
        state_size = 8 + 16 * (2 * bandwidth + 1)
        coeffs = np.empty((count, 2 * bandwidth + 1), dtype=np.complex128)
        logw = np.empty(count)
        for i in range(count):
            st = state_from_bytes(fh.read(state_size))
            if st.bandwidth != bandwidth:
                raise ValueError("sample bandwidth does not match header")
            coeffs[i] = st.coeffs
            (logw[i],) = struct.unpack("<d", fh.read(8))
    return Ensemble(bandwidth, coeffs, logw, cutoff, seed)


def ensemble_observables_csv(ensemble: Ensemble, path, s: float = 2.0 / 3.0 - 0.01, r: float = 3.0) -> None:
    """Per-sample scalar summary table."""
    import csv

    l2 = batch_l2_norm(ensemble.coeffs)
    m0 = batch_mass(ensemble.coeffs)
    fl = batch_fl_norm(ensemble.coeffs, ensemble.bandwidth, s, r)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "l2", "mass", f"fl_{s:g}_{r:g}", "log_weight"])
        for i in range(ensemble.count):
            writer.writerow(
                [i, repr(float(l2[i])), repr(float(m0[i])), repr(float(fl[i])), repr(float(ensemble.log_weights[i]))]
            )
