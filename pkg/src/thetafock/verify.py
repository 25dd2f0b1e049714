"""The verification suite behind ``verify-all`` and ``report``.

Each check is a pure function of (cfg, seed) returning a :class:`CheckResult`.
Checks draw from their own seeded generators, so the report does not depend
on the order or the thread in which they run.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basis import (
    NORM_VARIANTS,
    BasisFunction,
    basis_eval,
    log_norm_squared,
    log_norm_squared_printed,
)
from .character import Character, check_rdq
from .errors import ThetaFockError
from .expansion import (
    Expansion,
    automorphy_residual,
    expand,
    norm_growth,
    norm_growth_slices,
    pointwise_bound,
    random_expansion,
    reconstruct,
)
from .geometry import BasisIndex, Point, SpaceConfig
from .kernel import calibrate_kernel, kernel_closed, kernel_series, probe_pairs, reproduce
from .quadrature import basis_separable, build_grid, default_window, gram_matrix, inner_product
from .theta import ThetaArgs, theta_eval, theta_partial, theta_tail_bound, truncation_order

# pinned tolerances, one per acceptance criterion
TOL_GRAM = 1e-8
TOL_NORM = 1e-8
TOL_RATIO_SPREAD = 1e-12
TOL_KERNEL = 1e-8
TOL_TAU = 1e-12
TOL_REPRODUCE = 1e-6
TOL_ROUNDTRIP = 1e-9
TOL_PARSEVAL = 1e-8
TOL_AUTOMORPHY = 1e-11
TOL_NONMEMBER = 1e-3
TOL_RDQ = 1e-12
BOUND_SLACK = 1e-12

THETA_SAMPLES = 1000
BOUND_TRIALS = 10_000
ROUNDTRIP_EXPANSIONS = 20


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        # wall time is left out so that the JSON is byte-stable
        return {
            "name": self.name,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "details": self.details,
        }


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([seed, tag])


def _rand_point(cfg: SpaceConfig, rng, zbox=(1.0, 1.0), radius=1.0) -> Point:
    z = complex(rng.uniform(-zbox[0], zbox[0]), rng.uniform(-zbox[1], zbox[1]))
    r = radius * np.sqrt(rng.uniform(0, 1, cfg.g - 1))
    phi = rng.uniform(0, 2 * np.pi, cfg.g - 1)
    return Point(z, tuple(r * np.exp(1j * phi)))


def check_orthogonality(cfg: SpaceConfig, seed: int) -> CheckResult:
    window = default_window(cfg)
    G = gram_matrix(build_grid(cfg), window)
    off = G - np.diag(np.diag(G))
    max_off = float(np.max(np.abs(off))) if len(window) > 1 else 0.0
    max_diag = float(np.max(np.abs(np.diag(G) - 1)))
    res = max(max_off, max_diag)
    return CheckResult(
        "orthogonality", res < TOL_GRAM, res, TOL_GRAM,
        {"size": len(window), "max_offdiag": max_off, "max_diag_err": max_diag},
    )


def norm_variant_ratios(cfg: SpaceConfig, indices=None) -> dict:
    """canonical / printed norm per variant, with its spread over ``indices``."""
    indices = default_window(cfg) if indices is None else indices
    out = {}
    for variant in NORM_VARIANTS:
        idx = [i for i in indices if variant != "lemma22" or i.k.degree == 0]
        logs = np.array([log_norm_squared(cfg, i) - log_norm_squared_printed(cfg, i, variant) for i in idx])
        ref = float(np.exp(logs[0]))
        spread = float(np.max(np.abs(np.expm1(logs - logs[0]))))
        out[variant] = {"ratio": ref, "spread": spread, "indices": len(idx),
                        "covers": "k = 0 only" if variant == "lemma22" else "all"}
    return out


def check_norms(cfg: SpaceConfig, seed: int) -> CheckResult:
    grid = build_grid(cfg)
    worst = 0.0
    where = None
    for idx in default_window(cfg):
        # compare in log space; the quadrature scales each pair internally
        q = inner_product(grid, basis_separable(cfg, idx), _shifted(cfg, idx))
        rel = abs(q.real - 1.0) + abs(q.imag)
        if rel > worst:
            worst, where = rel, idx
    ratios = norm_variant_ratios(cfg)
    spread = ratios["thm32"]["spread"]
    passed = worst < TOL_NORM and spread < TOL_RATIO_SPREAD
    return CheckResult(
        "norm_arbitration", passed, worst, TOL_NORM,
        {"worst_index": None if where is None else where.to_dict(),
         "thm32_ratio": ratios["thm32"]["ratio"], "thm32_ratio_spread": spread,
         "spread_tolerance": TOL_RATIO_SPREAD},
    )


def _shifted(cfg: SpaceConfig, idx: BasisIndex):
    # e_{n,k} / ||e_{n,k}||^2 so that <e, e / ||e||^2> = 1 stays in range
    b = basis_separable(cfg, idx)
    lognorm = log_norm_squared(cfg, idx)
    zlog = b.zlog
    return type(b)(zlog=lambda z: zlog(z) - lognorm, transverse=b.transverse, y_center=b.y_center)


def check_kernel(cfg: SpaceConfig, seed: int) -> CheckResult:
    spec = calibrate_kernel(cfg, seed=seed)
    pairs = probe_pairs(cfg, 50, seed=seed + 1)
    dev = 0.0
    for u, v in pairs:
        s = kernel_series(cfg, u, v)
        c = kernel_closed(spec, u, v)
        dev = max(dev, abs(c - s) / abs(s))
    target = 2j * math.pi / cfg.nu
    tau_err = abs(spec.tau_kernel - target) / abs(target)
    passed = dev < TOL_KERNEL and tau_err < TOL_TAU
    return CheckResult(
        "kernel_consistency", passed, dev, TOL_KERNEL,
        {"tau_rel_err": tau_err, "tau_tolerance": TOL_TAU,
         "fitted_constant": spec.closed_form_constant, "calibration_dev": spec.max_rel_dev},
    )


def check_reproducing(cfg: SpaceConfig, seed: int) -> CheckResult:
    spec = calibrate_kernel(cfg, seed=seed)
    rng = _rng(seed, 4)
    grid = build_grid(cfg)
    small = cfg.replace(n_max=min(2, cfg.n_max), k_max=min(2, cfg.k_max))
    points = [_rand_point(cfg, rng, zbox=(0.5, 0.5), radius=0.5) for _ in range(5)]
    worst = 0.0
    for idx in default_window(small):
        f = basis_separable(cfg, idx)
        bf = BasisFunction(cfg, idx)
        for u in points:
            exact = basis_eval(bf, u)
            got = reproduce(spec, f, u, grid)
            worst = max(worst, abs(got - exact) / abs(exact))
    return CheckResult("reproducing", worst < TOL_REPRODUCE, worst, TOL_REPRODUCE,
                       {"functions": len(default_window(small)), "points": len(points)})


def _random_members(cfg: SpaceConfig, seed: int, count: int, tag: int) -> list[Expansion]:
    rng = _rng(seed, tag)
    size = len(default_window(cfg))
    return [random_expansion(cfg, int(rng.integers(1, min(15, size) + 1)), rng) for _ in range(count)]


def check_roundtrip(cfg: SpaceConfig, seed: int) -> CheckResult:
    grid = build_grid(cfg)
    coef_err = parseval = 0.0
    for e in _random_members(cfg, seed, ROUNDTRIP_EXPANSIONS, 5):
        back = expand(cfg, e)
        scale = max(abs(a) for a in e.coeffs.values())
        keys = set(e.coeffs) | set(back.coeffs)
        coef_err = max(coef_err, max(abs(e.coeffs.get(i, 0) - back.coeffs.get(i, 0)) for i in keys) / scale)
        ng = norm_growth(e)
        q = inner_product(grid, e, e)
        parseval = max(parseval, abs(q - ng) / ng, abs(norm_growth_slices(e) - ng) / ng)
    passed = coef_err < TOL_ROUNDTRIP and parseval < TOL_PARSEVAL
    return CheckResult(
        "roundtrip", passed, coef_err, TOL_ROUNDTRIP,
        {"parseval_rel_err": parseval, "parseval_tolerance": TOL_PARSEVAL,
         "expansions": ROUNDTRIP_EXPANSIONS},
    )


def planted_nonmembers(cfg: SpaceConfig) -> dict[str, Callable]:
    """Entire functions that violate the functional equation."""
    nu, alpha = cfg.nu, cfg.alpha
    out = {
        # half-integer frequency shift: wrong character for every alpha
        "half_shift": lambda z, zp=None: np.exp(0.5 * nu * np.asarray(z) ** 2 + 2j * math.pi * (alpha + 0.5) * np.asarray(z)),
        # polynomial in z times a member breaks the periodicity of h
        "z_times_basis": lambda z, zp=None: np.asarray(z) * np.exp(0.5 * nu * np.asarray(z) ** 2 + 2j * math.pi * alpha * np.asarray(z)),
    }
    if abs(alpha - round(alpha)) > 1e-6:
        out["gaussian"] = lambda z, zp=None: np.exp(0.5 * nu * np.asarray(z, dtype=complex) ** 2)
    return out


def check_automorphy(cfg: SpaceConfig, seed: int) -> CheckResult:
    rng = _rng(seed, 6)
    members = _random_members(cfg, seed, ROUNDTRIP_EXPANSIONS, 5)
    worst = 0.0
    for e in members:
        for _ in range(3):
            u = _rand_point(cfg, rng, zbox=(1.0, 0.5), radius=1.0)
            for m in range(-3, 4):
                worst = max(worst, automorphy_residual(cfg, e, m, u))
    least = math.inf
    for name, f in planted_nonmembers(cfg).items():
        u = Point(0.25 + 0.1j, (0.3,) * (cfg.g - 1))
        least = min(least, automorphy_residual(cfg, f, 1, u))
    passed = worst < TOL_AUTOMORPHY and least > TOL_NONMEMBER
    return CheckResult(
        "automorphy", passed, worst, TOL_AUTOMORPHY,
        {"min_nonmember_residual": least, "nonmember_threshold": TOL_NONMEMBER,
         "nonmembers": sorted(planted_nonmembers(cfg))},
    )


def check_character(cfg: SpaceConfig, seed: int) -> CheckResult:
    ch = Character(cfg.alpha)
    ms = range(-100, 101)
    worst = max(check_rdq(ch, a, b) for a in ms for b in ms)
    return CheckResult("character_rdq", worst < TOL_RDQ, worst, TOL_RDQ, {"m_range": 100})


def check_theta(cfg: SpaceConfig, seed: int) -> CheckResult:
    rng = _rng(seed, 8)
    tol = cfg.theta_tol
    worst_ratio = 0.0
    worst_qp = 0.0
    for _ in range(THETA_SAMPLES):
        alpha = float(rng.uniform(-1, 1))
        beta = float(rng.uniform(-1, 1))
        z = complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        tau = complex(rng.uniform(-1, 1), rng.uniform(0.5, 3))
        args = ThetaArgs(alpha, beta, z, tau)
        N = int(rng.integers(2, 13))
        while True:
            try:
                bound = theta_tail_bound(args, N)
                break
            except ThetaFockError:
                N += 1
        # the omitted terms N < |n| <= N + 20, summed on their own
        ns = np.concatenate([np.arange(N + 1, N + 21), -np.arange(N + 1, N + 21)])
        s = ns + alpha
        tail = abs(np.sum(np.exp(1j * math.pi * s * s * tau + 2j * math.pi * s * (z + beta))))
        if tail > 0:
            worst_ratio = max(worst_ratio, tail / bound if bound > 0 else math.inf)
        # quasi-periodicity, relative to the sum of term moduli
        Nq = truncation_order(alpha, abs(z.imag), tau.imag, tol)
        v0, scale = theta_partial(alpha, beta, z, tau, Nq)
        v1, _ = theta_partial(alpha, beta, z + 1, tau, Nq)
        qp = abs(complex(v1) - np.exp(2j * math.pi * alpha) * complex(v0)) / float(scale)
        worst_qp = max(worst_qp, qp)
    # the configured tolerance must also be reachable for the kernel's theta
    theta_eval(ThetaArgs(cfg.alpha, 0.0, 0.5j, 2j * math.pi / cfg.nu), tol)
    passed = worst_ratio <= 1.0 and worst_qp < 10 * tol
    return CheckResult(
        "theta_soundness", passed, worst_qp, 10 * tol,
        {"max_tail_over_bound": float(worst_ratio), "samples": THETA_SAMPLES},
    )


def check_pointwise(cfg: SpaceConfig, seed: int) -> CheckResult:
    rng = _rng(seed, 9)
    n_exp = 100
    per = BOUND_TRIALS // n_exp
    worst = 0.0
    violations = 0
    size = len(default_window(cfg))
    for i in range(n_exp):
        terms = 1 if i % 4 == 0 else int(rng.integers(2, min(10, size) + 1))
        e = random_expansion(cfg, terms, rng)
        for _ in range(per):
            u = _rand_point(cfg, rng, zbox=(1.0, 1.0), radius=1.5)
            b = pointwise_bound(e, u)
            f = abs(reconstruct(e, u))
            ratio = f / b
            worst = max(worst, ratio)
            if f > b * (1 + BOUND_SLACK):
                violations += 1
    return CheckResult(
        "pointwise_bound", violations == 0, float(violations), 0.0,
        {"trials": n_exp * per, "max_value_over_bound": worst, "rounding_slack": BOUND_SLACK},
    )


CHECKS: tuple[tuple[str, Callable[[SpaceConfig, int], CheckResult]], ...] = (
    ("orthogonality", check_orthogonality),
    ("norm_arbitration", check_norms),
    ("kernel_consistency", check_kernel),
    ("reproducing", check_reproducing),
    ("roundtrip", check_roundtrip),
    ("automorphy", check_automorphy),
    ("character_rdq", check_character),
    ("theta_soundness", check_theta),
    ("pointwise_bound", check_pointwise),
)


def _run_one(name, fn, cfg, seed) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = fn(cfg, seed)
    except ThetaFockError as exc:
        res = CheckResult(name, False, math.inf, math.nan, {"error": f"{type(exc).__name__}: {exc}"})
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(cfg: SpaceConfig, seed: int | None = None, workers: int = 1) -> list[CheckResult]:
    """Run checks 1-9; results come back in fixed order whatever ``workers`` is."""
    seed = cfg.seed if seed is None else seed
    if workers <= 1:
        return [_run_one(n, f, cfg, seed) for n, f in CHECKS]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, n, f, cfg, seed) for n, f in CHECKS]
        return [fut.result() for fut in futures]


def _digest(results: list[CheckResult]) -> str:
    text = json.dumps([r.to_dict() for r in results], sort_keys=True, allow_nan=True)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunReport:
    cfg: SpaceConfig
    seed: int
    checks: list[CheckResult]
    calibration: dict
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        d = {
            "config": self.cfg.to_dict(),
            "seed": hex(self.seed),
            "checks": [c.to_dict() for c in self.checks],
            "calibration": self.calibration,
            "all_passed": self.passed,
        }
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=True) + "\n"

    def to_table(self) -> str:
        if not self.checks:
            return _calibration_table(self.calibration) + "\n"
        rows = [("check", "status", "residual", "tolerance", "seconds")]
        for c in self.checks:
            rows.append((c.name, c.status, f"{c.residual:.3e}", f"{c.tolerance:.1e}", f"{c.seconds:.2f}"))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)) for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        for c in self.checks:
            if "error" in c.details:
                lines.append(f"{c.name}: {c.details['error']}")
        if self.calibration:
            lines.append("")
            lines.append(_calibration_table(self.calibration))
        if self.error:
            lines.append(f"error: {self.error}")
        lines.append("")
        lines.append("ALL PASS" if self.passed else "FAILURES")
        return "\n".join(lines) + "\n"


def _calibration_table(cal: dict) -> str:
    lines = []
    for key in ("fitted_constant", "printed_constant", "fitted_tau", "printed_tau"):
        if key in cal:
            lines.append(f"{key:18s} {cal[key]}")
    for variant, info in cal.get("norm_variant_ratios", {}).items():
        lines.append(f"ratio canonical/{variant:8s} {info['ratio']:.15g}  spread {info['spread']:.2e}  ({info['covers']})")
    return "\n".join(lines)


def calibration_block(cfg: SpaceConfig, seed: int) -> dict:
    spec = calibrate_kernel(cfg, seed=seed)
    d = spec.to_dict()
    d["norm_variant_ratios"] = norm_variant_ratios(cfg)
    return d


def report_discrepancies(cfg: SpaceConfig, seed: int | None = None) -> RunReport:
    """Printed vs oracle-resolved constants; raises on calibration failure."""
    seed = cfg.seed if seed is None else seed
    return RunReport(cfg, seed, [], calibration_block(cfg, seed))


def verify_all(cfg: SpaceConfig, seed: int | None = None, workers: int = 1) -> RunReport:
    """Run every acceptance check once; the last one reruns 1-9 on another
    thread count and compares the serialized results byte for byte."""
    seed = cfg.seed if seed is None else seed
    t0 = time.perf_counter()
    results = run_checks(cfg, seed, workers)
    other = 1 if workers > 1 else 2
    again = run_checks(cfg, seed, other)
    same = _digest(results) == _digest(again)
    det = CheckResult(
        "determinism", same, 0.0 if same else 1.0, 0.0,
        {"digest": _digest(results)},
    )
    det.seconds = time.perf_counter() - t0
    results.append(det)
    try:
        cal = calibration_block(cfg, seed)
        err = None
    except ThetaFockError as exc:
        cal, err = {}, f"{type(exc).__name__}: {exc}"
    return RunReport(cfg, seed, results, cal, err)
