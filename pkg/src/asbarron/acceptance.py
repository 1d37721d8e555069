"""The acceptance suite: ten finite-instance checks with time budgets.

Every ``criterion_*`` function returns a :class:`CriterionResult`; a criterion
passes only if its inequality holds and it finished within its budget.
"""

from dataclasses import dataclass
import math
import time

import numpy as np

from .activations import fourier_inversion_check, highpass_relu, highpass_relu_by_quadrature
from .bounds import bound_sweep, check_lowrank
from .construction import construct, maurey_errors, shipped_measure
from .experiments.fitting import TrainConfig
from .experiments.network import AntisymNetwork, antisym_network_grad
from .experiments.scatter import default_windows, scatter_slack, scatter_targets, theorem_scatter
from .infrared import infrared_sweep, random_unit_wave, truncation_gap_mc
from .oracles import gauss_hermite_norm_sq, gauss_hermite_overlap
from .planewave import slater_norm_sq, slater_overlap

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    holds: bool  # the inequality itself
    seconds: float
    limit: float
    detail: str

    @property
    def in_time(self):
        return self.seconds <= self.limit

    @property
    def passed(self):
        return self.holds and self.in_time

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        timing = f"{self.seconds:.1f}s/{self.limit:.0f}s" + ("" if self.in_time else " OVER BUDGET")
        return f"[{status}] {self.number:2d} {self.name} ({timing}): {self.detail}"


def _timed(number, name, limit, body):
    t0 = time.perf_counter()
    holds, detail = body()
    return CriterionResult(number, name, bool(holds), time.perf_counter() - t0, limit, detail)


def criterion_oracle_equivalence(n_sets=50, tol=1e-6, seed=1):
    def body():
        rng = np.random.Generator(np.random.Philox(key=seed))
        worst = 0.0
        for n in (1, 2):
            for d in (1, 2):
                for _ in range(n_sets):
                    v = rng.uniform(-2, 2, (n, d))
                    w = rng.uniform(-2, 2, (n, d))
                    worst = max(
                        worst,
                        abs(slater_overlap(v, w) - gauss_hermite_overlap(v, w)),
                        abs(slater_norm_sq(w) - gauss_hermite_norm_sq(w)),
                    )
        return worst <= tol, f"max |closed form - quadrature| = {worst:.2e} (tol {tol:g})"

    return _timed(1, "oracle equivalence", 10.0, body)


def criterion_hadamard(per_cell=1000, seed=2):
    def body():
        rng = np.random.Generator(np.random.Philox(key=seed))
        worst = -math.inf
        lowest = math.inf
        for n in range(1, 7):
            for d in range(1, 4):
                for _ in range(per_cell):
                    val = slater_norm_sq(rng.standard_normal((n, d)))
                    worst = max(worst, val)
                    lowest = min(lowest, val)
        ok = worst <= 1 + 1e-10 and lowest >= 0
        return ok, f"norm^2 range [{lowest:.3e}, {worst!r}] over {18 * per_cell} draws"

    return _timed(2, "Hadamard bound", 5.0, body)


def criterion_fourier_inversion(n_grid=4001, tol=1e-6):
    def body():
        y = np.linspace(-10, 10, n_grid)
        violation = max(fourier_inversion_check(g, y).max_violation for g in (0.25, 0.5, 1.0, 2.0))
        spots = np.linspace(-5, 5, 10)
        gap = max(
            abs(highpass_relu(float(s), g) - highpass_relu_by_quadrature(s, g)) for g in (0.5, 1.0, 2.0) for s in spots
        )
        ok = violation <= 0 and gap <= tol
        return ok, f"max remainder violation {violation:.3e}; closed form vs quadrature {gap:.2e} at 30 points"

    return _timed(3, "Fourier inversion", 30.0, body)


def criterion_lowrank(n_cases=100, K=25, seed=4):
    def body():
        rng = np.random.Generator(np.random.Philox(key=seed))
        failures = 0
        worst_ratio = 0.0
        for _ in range(n_cases):
            n = int(rng.integers(1, 13))
            d = int(rng.integers(1, 4))
            v = rng.uniform(-1, 1, (n, d))
            w = rng.uniform(-1, 1, (n, d))
            # rescale so that mu = |v|_inf |w|_inf d is at most 1
            target_mu = rng.uniform(0.05, 1.0)
            s = math.sqrt(target_mu / (np.max(np.abs(v)) * np.max(np.abs(w)) * d))
            v, w = v * s, w * s
            reports, err, tail = check_lowrank(v, w, K)
            # the tail is far below double precision; allow the round-off of the dense reference
            roundoff = 16 * n * _EPS * float(np.linalg.norm(np.exp(v @ w.T)))
            worst_ratio = max(worst_ratio, err / (tail + roundoff))
            failures += (err > tail + roundoff) + sum(not r.ok for r in reports)
        return failures == 0, f"{failures} failed checks; max error/(tail + round-off) = {worst_ratio:.2f}"

    return _timed(4, "low-rank decomposition", 60.0, body)


def criterion_detbound():
    def body():
        rows = bound_sweep()
        feasible = [r for r in rows if r.p is not None and not r.error]
        infeasible = [r for r in rows if r.p is None]
        failed = [r for r in rows if r.p is not None and r.error]
        negative = [r for r in feasible if not r.margin > 0]
        ok = not negative and not failed and feasible
        cells = ", ".join(sorted({f"(n={r.n}, d={r.d})" for r in infeasible}))
        min_margin = min(r.margin for r in feasible) if feasible else math.nan
        return ok, (
            f"{len(feasible)} feasible rows, min log-margin {min_margin:.1f}, {len(negative)} negative; "
            f"infeasible: {cells or 'none'}"
        )

    return _timed(5, "determinant bound", 60.0, body)


def criterion_maurey_rate(ms=(4, 16, 64, 256), n_seeds=50):
    def body():
        rho = shipped_measure("three_atom_n3d1")
        errs, tv = maurey_errors(rho, ms, range(n_seeds), gamma=0.5)
        means = errs.mean(axis=1)
        slope = float(np.polyfit(np.log(ms), np.log(means), 1)[0])
        ratios = means / (tv / np.sqrt(ms))
        ok = -0.65 <= slope <= -0.35 and np.all(ratios <= 1.5)
        return ok, f"slope {slope:.3f}; mean/(||mu||/sqrt m) = " + ", ".join(f"{r:.3f}" for r in ratios)

    return _timed(6, "Maurey rate", 300.0, body)


def criterion_end_to_end(ms=(16, 64, 256), n_samples=1 << 18):
    def body():
        rho = shipped_measure("three_atom_n3d1")
        parts, ok = [], True
        for m in ms:
            _, rep = construct(rho, m, seed=m, n_samples=n_samples, sample_seed=777)
            ok &= rep.slack >= 0
            parts.append(f"m={m}: {rep.error:.4f} <= {rep.rhs + 3 * rep.std_error:.4f}")
        return ok, "; ".join(parts)

    return _timed(7, "end-to-end construction", 600.0, body)


def criterion_infrared(ns=(4, 6, 8), b=0.3):
    def body():
        rows = infrared_sweep(ns, d=1, b=b)
        gaps = [r.gap for r in rows]
        monotone = all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
        below = all(r.gap <= r.bound for r in rows)
        # Monte Carlo cross-check where the gap is above permutation-sum round-off
        mc, se = truncation_gap_mc(random_unit_wave(ns[0], 1, seed=ns[0]), b, 0.5, n_samples=1 << 16)
        agrees = abs(mc - gaps[0]) <= 4 * se
        detail = ", ".join(f"n={r.n}: {r.gap:.2e} <= {r.bound:.2e}" for r in rows)
        return monotone and below and agrees, f"{detail}; MC at n={ns[0]}: {mc:.2e} +- {se:.1e}"

    return _timed(8, "infrared decay", 300.0, body)


def _fd_grad(net, xs, targets, h):
    theta = net.flat()
    K, n, d = net.width, net.n, net.d
    g = np.empty_like(theta)
    for i in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[i] += h
        dn[i] -= h
        lu, _ = antisym_network_grad(AntisymNetwork.from_flat(up, K, n, d), xs, targets)
        ld, _ = antisym_network_grad(AntisymNetwork.from_flat(dn, K, n, d), xs, targets)
        g[i] = (lu - ld) / (2 * h)
    return g


def criterion_gradient(n_cases=20, h=1e-5, tol=1e-4, seed=9):
    def body():
        rng = np.random.Generator(np.random.Philox(key=seed))
        worst = 0.0
        for _ in range(n_cases):
            n, d, K = int(rng.integers(1, 5)), int(rng.integers(1, 3)), int(rng.integers(1, 9))
            net = AntisymNetwork(rng.standard_normal(K), rng.standard_normal(K), rng.standard_normal((K, n, d)))
            xs = rng.standard_normal((32, n, d))
            targets = rng.standard_normal(32)
            _, g = antisym_network_grad(net, xs, targets)
            fd = _fd_grad(net, xs, targets, h)
            worst = max(worst, float(np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-300)))
        return worst <= tol, f"max relative error {worst:.2e} over {n_cases} instances"

    return _timed(9, "gradient check", 30.0, body)


SCATTER_CONFIG = TrainConfig(restarts=1, steps=1500, fit_steps=200, width=16)


def criterion_scatter(n=4, d=1, m=64, cfg=SCATTER_CONFIG, mapper=map):
    def body():
        rows = theorem_scatter(scatter_targets(n, d, default_windows()), m, cfg, mapper=mapper)
        errors = [r.error for r in rows if r.error]
        slacks = [scatter_slack(r, m, d) for r in rows if not r.error]
        ok = not errors and len(rows) == 9 and all(s >= 0 for s in slacks)
        worst = min(slacks) if slacks else math.nan
        binding = sum(r.ab_norm_estimate * 2 * math.sqrt(d) / math.pi / math.sqrt(m) < 1 for r in rows if not r.error)
        return ok, (
            f"{len(rows)} rows, {len(errors)} failed, min slack {worst:.3f}, "
            f"{binding} rows with estimate*C/sqrt(m) < 1, "
            f"fit errors {min(r.slater_fit_error for r in rows):.3f}..{max(r.slater_fit_error for r in rows):.3f}"
        )

    return _timed(10, "experiments scatter", 1200.0, body)


CRITERIA = (
    criterion_oracle_equivalence,
    criterion_hadamard,
    criterion_fourier_inversion,
    criterion_lowrank,
    criterion_detbound,
    criterion_maurey_rate,
    criterion_end_to_end,
    criterion_infrared,
    criterion_gradient,
    criterion_scatter,
)


def run_acceptance(numbers=None, echo=print):
    """Run the selected criteria (1-based numbers, default all) and echo one line each."""
    chosen = range(1, len(CRITERIA) + 1) if numbers is None else numbers
    results = []
    for k in chosen:
        res = CRITERIA[k - 1]()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
