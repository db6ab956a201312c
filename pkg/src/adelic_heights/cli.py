"""Batch runner for the verification suites.

Every suite returns a JSON-serialisable body plus counts of failures and
inconclusive (cap-limited) results. The exit status is 0 when both are zero,
2 when only inconclusive results remain, and 1 on failures or bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import linalg as la
from .exactnum import gm_heights, lcm_range
from .lattice_heights import compose_with_automorphisms, hom_height_f, hom_height_p, random_unimodular
from .minkowski import (
    count_gl_by_enumeration,
    is_torsion_witness,
    minkowski_constant,
    torsion_scan,
)
from .orbit_index import Experiment, cyclic_exp_index, verify_global_bound, verify_local_bound
from .padic import BoundViolation, check_log_chi_necessity, log_bounds, log_exp_roundtrip, log_partial_sum, matrix_norm
from .sampling import random_exp_matrix, random_hom, random_log_matrix
from .siegel import (
    CSV_HEADER,
    SamplerConfig,
    check_siegel_claim,
    height_comparison_experiment,
    p_map,
    rational_rotation,
    sample_siegel,
    torus_ray_decreasing,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2

DEFAULT_PRIMES = (2, 3, 5, 7, 13)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    suite: str
    seed: int = 0
    cap: int = 10 ** 6
    samples: int | None = None
    p: list[int] | None = None
    d: list[int] | None = None
    out: str | None = None
    format: str = "json"
    precision: int = 8
    experiments: list[str] = field(default_factory=list)

    def validate(self) -> "ExperimentConfig":
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.format == "csv" and self.suite != "siegel-compare":
            raise ConfigError("csv output is only available for siegel-compare")
        if self.cap < 1:
            raise ConfigError("cap must be positive")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be positive")
        return self


@dataclass
class Outcome:
    body: dict
    failures: int = 0
    inconclusive: int = 0
    csv_rows: list[str] | None = None


def _primes(cfg: ExperimentConfig, default) -> list[int]:
    return list(cfg.p) if cfg.p else list(default)


def _dims(cfg: ExperimentConfig, default) -> list[int]:
    return list(cfg.d) if cfg.d else list(default)


def _mat(m) -> list[list[str]]:
    return [[str(x) for x in row] for row in m]


def suite_exp_log(cfg: ExperimentConfig) -> Outcome:
    rng = random.Random(cfg.seed)
    n = cfg.samples or 100
    primes, dims = _primes(cfg, DEFAULT_PRIMES), _dims(cfg, (1, 2, 3))
    roundtrip_fail, bound_fail, chi_fail = [], [], []
    for i in range(n):
        p, d = rng.choice(primes), rng.choice(dims)
        x = random_exp_matrix(rng, p, d)
        if not log_exp_roundtrip(x, p, cfg.precision):
            roundtrip_fail.append({"sample": i, "p": p, "X": _mat(x)})
        y = random_log_matrix(rng, p, d)
        general, precise = log_bounds(y, p)
        norm = matrix_norm(log_partial_sum(y, p, cfg.precision), p)
        if norm > general or (precise is not None and norm > precise):
            bound_fail.append({"sample": i, "p": p, "Y": _mat(y), "norm": str(norm)})
        if not check_log_chi_necessity(y, p):
            chi_fail.append({"sample": i, "p": p, "Y": _mat(y)})
    body = {
        "claim": "log(exp X) = X, the norm bounds on log(1+Y), and chi_Y = T^d mod p",
        "samples": n, "precision": cfg.precision, "primes": primes, "dims": dims,
        "roundtrip_failures": roundtrip_fail, "log_bound_failures": bound_fail,
        "chi_failures": chi_fail,
    }
    return Outcome(body, len(roundtrip_fail) + len(bound_fail) + len(chi_fail))


def suite_cyclic_index(cfg: ExperimentConfig) -> Outcome:
    primes = _primes(cfg, (2, 3, 5, 7))
    kmax = cfg.samples or 6
    rows, failures, inconclusive = [], 0, 0
    for p in primes:
        for k in range(1, kmax + 1):
            x = ((Fraction(0), Fraction(1, p ** k)), (Fraction(0), Fraction(0)))
            rep = cyclic_exp_index(x, p, cfg.cap)
            h = p ** k
            general = Fraction(h, 2)
            row = {"p": p, "k": k, "height": h, **rep.as_dict(),
                   "bound_general": str(general), "bound_precise": h if p > 2 else None}
            if rep.at_least and rep.index < h:
                row["pass"] = None
                inconclusive += 1
            else:
                ok = rep.index >= general and (p <= 2 or rep.index >= h)
                row["pass"] = ok
                failures += not ok
            rows.append(row)
    body = {"claim": "orbit index of exp(X)^Z is at least H_p(X)/d, and H_p(X) when p > d",
            "cap": cfg.cap, "results": rows}
    return Outcome(body, failures, inconclusive)


def default_local_experiments(primes) -> list[Experiment]:
    e12 = [((0, 1), (0, 0))]
    torus = [la.diag(1, 0), la.diag(0, 1)]
    out = []
    for p in primes:
        for m in (1, 2, 3):
            out.append(Experiment.build("nilpotent", p, la.diag(Fraction(1, p ** m), 1), e12))
        for k in (1, 2):
            shear = ((1, Fraction(1, p ** k)), (0, 1))
            out.append(Experiment.build("torus", p, shear, torus))
            out.append(Experiment.build("exp2p", p, shear, torus))
        out.append(Experiment.build("exp2p", p, la.diag(Fraction(1, p ** 3), 1), e12))
        out.append(Experiment.build(
            "mixed", p, ((1, Fraction(1, p)), (0, 1)), [],
            parts=[("torus", torus), ("nilpotent", e12)]))
    return out


def suite_local_bound(cfg: ExperimentConfig) -> Outcome:
    if cfg.experiments:
        exps = [Experiment.parse(Path(f).read_text()) for f in cfg.experiments]
    else:
        exps = default_local_experiments(_primes(cfg, (3, 5, 7)))
    exps = [replace(e, cap=min(e.cap, cfg.cap)) for e in exps]
    results = [verify_local_bound(e) for e in exps]
    torus_c2 = [r.measured_c for r in results if r.case == "torus" and r.measured_c is not None]
    c2 = max(torus_c2) if torus_c2 else None
    rows = []
    failures = inconclusive = 0
    for e, r in zip(exps, results):
        if r.case == "torus" and c2 is not None and r.measured_c is not None and e.c2 is None:
            # one c2 for the whole family
            ok = Fraction(r.index) >= Fraction(e.p) / c2
            r = replace(r, bound=Fraction(e.p) / c2, passed=ok)
        rows.append({"descriptor": e.format(), **r.as_dict()})
        failures += (not r.passed) and not r.inconclusive
        inconclusive += r.inconclusive
    body = {"claim": "local orbit-index bounds for exp(2p m), nilpotent, torus and mixed cases",
            "d_star": "lcm(1..d)", "family_c2": None if c2 is None else str(c2), "results": rows}
    return Outcome(body, failures, inconclusive)


def default_global_families():
    e12 = [((0, 1), (0, 0))]
    torus = [la.diag(1, 0), la.diag(0, 1)]
    fams = []
    for a, b in ((2, 1), (1, 1), (3, 2), (0, 2), (2, 0)):
        n = 2 ** a * 3 ** b
        fams.append(("nilpotent", la.diag(Fraction(1, n), 1), e12))
        fams.append(("torus", ((1, Fraction(1, n)), (0, 1)), torus))
    return fams


def suite_global_bound(cfg: ExperimentConfig) -> Outcome:
    rows, failures, inconclusive = [], 0, 0
    worst = Fraction(0)
    for case, g, basis in default_global_families():
        r = verify_global_bound(case, g, basis, cap=cfg.cap)
        dstar = lcm_range(len(g))
        within = r.c_at_most(2 * dstar)
        row = {"case": case, "conjugator": _mat(g), **r.as_dict(), "c_within_2dstar": within}
        rows.append(row)
        if r.inconclusive:
            inconclusive += 1
        elif not (r.passed and within):
            failures += 1
        worst = max(worst, Fraction(r.height_f, r.product))
    body = {"claim": "product of local indices is at least H_f(dphi) / c^omega",
            "results": rows, "worst_height_over_product": str(worst)}
    return Outcome(body, failures, inconclusive)


def suite_minkowski(cfg: ExperimentConfig) -> Outcome:
    top = max(_dims(cfg, (3,)))
    ns = list(range(1, top + 1))
    consts = [minkowski_constant(n) for n in ns]
    counted = [count_gl_by_enumeration(n) for n in ns]
    scans = [torsion_scan(n) for n in ns]
    minus_one = all(is_torsion_witness(la.scale(-1, la.identity(n)), 2) for n in ns)
    mod2 = torsion_scan(2, modulus=2)
    body = {
        "claim": "finite subgroups of GL(N, Z) embed in GL(N, Z/3)",
        "C": consts, "enumeration_match": consts == counted,
        "torsion_free": all(s.torsion_free for s in scans),
        "search_bounds": [s.bound for s in scans],
        "finite_order_elements": [s.finite_order for s in scans],
        "mod2_minus_identity_flagged": minus_one and not mod2.torsion_free,
    }
    failures = (not body["enumeration_match"]) + (not body["torsion_free"]) + \
        (not body["mod2_minus_identity_flagged"])
    return Outcome(body, failures)


def suite_gm_heights(cfg: ExperimentConfig) -> Outcome:
    bound = cfg.samples or 1000
    n = np.arange(1, bound + 1, dtype=np.int64)
    checked = 0
    violations = []
    for m in range(1, bound + 1):
        num = n[np.gcd(n, m) == 1]
        # for t = +-num/m: H_R = max(num, m)/min(num, m) and H_f = num*m
        hi, lo = np.maximum(num, m), np.minimum(num, m)
        bad = num[hi > num * m * lo]
        violations += [f"{int(k)}/{m}" for k in bad]
        checked += 2 * len(num)
    # the exact implementation must agree with the closed form on a sample
    rng = random.Random(cfg.seed)
    mismatched = 0
    for _ in range(2000):
        a, b = rng.randint(1, bound), rng.randint(1, bound)
        t = Fraction(rng.choice((-1, 1)) * a, b)
        hr, hf = gm_heights(t)
        u, v = abs(t.numerator), t.denominator
        mismatched += (hr, hf) != (Fraction(max(u, v), min(u, v)), u * v) or hr > hf
    body = {"claim": "H_R(t) <= H_f(t) on G_m(Q)", "bound": bound, "checked": checked,
            "violations": violations[:20], "violation_count": len(violations),
            "exact_spot_checks": 2000, "exact_mismatches": mismatched}
    return Outcome(body, len(violations) + mismatched)


def suite_invariance(cfg: ExperimentConfig) -> Outcome:
    rng = random.Random(cfg.seed)
    n_homs = cfg.samples or 200
    pairs = 50
    mismatches = []
    for i in range(n_homs):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        phi = random_hom(rng, rows, cols)
        hf = hom_height_f(phi)
        hps = {q: hom_height_p(phi, q) for q in (2, 3, 5, 7)}
        for j in range(pairs):
            k = random_unimodular(rng, rows)
            u = random_unimodular(rng, cols)
            psi = compose_with_automorphisms(phi, k, u)
            if hom_height_f(psi) != hf or any(hom_height_p(psi, q) != h for q, h in hps.items()):
                mismatches.append({"hom": i, "pair": j})
    body = {"claim": "H_f and H_p are invariant under integral automorphisms on both sides",
            "homs": n_homs, "pairs_per_hom": pairs, "mismatches": mismatches[:20],
            "mismatch_count": len(mismatches)}
    return Outcome(body, len(mismatches))


def suite_siegel_claim(cfg: ExperimentConfig) -> Outcome:
    scfg = SamplerConfig(n_samples=cfg.samples or 10_000, seed=cfg.seed)
    pts = sample_siegel(scfg)
    c_measured, positive = check_siegel_claim(pts, scfg.params)
    ray = torus_ray_decreasing(range(1, 11))
    rot = rational_rotation(2, 1)
    k_invariant = all(p_map(la.matmul(g, rot)) == p_map(g) for g in pts[:200])
    body = {"claim": "0 < p(g) <= C chi^-2 on a Siegel set, and p decreases along the torus ray",
            "samples": len(pts), "C": str(c_measured), "positive": positive,
            "torus_ray_decreasing": ray, "right_K_invariant": k_invariant,
            "omega_bound": str(scfg.params.omega_bound), "height_floor": str(scfg.params.height_floor)}
    return Outcome(body, (not positive) + (not ray) + (not k_invariant))


def suite_siegel_compare(cfg: ExperimentConfig) -> Outcome:
    scfg = SamplerConfig(n_samples=cfg.samples or 10_000, seed=cfg.seed)
    fit, rows = height_comparison_experiment(scfg)
    body = {"claim": "H_R is polynomially dominated by H_f on a Siegel set",
            "fit": fit.as_dict()}
    csv_rows = [CSV_HEADER] + [r.csv() for r in rows]
    return Outcome(body, fit.violations, csv_rows=csv_rows)


SUITES: dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "exp-log": suite_exp_log,
    "cyclic-index": suite_cyclic_index,
    "local-bound": suite_local_bound,
    "global-bound": suite_global_bound,
    "minkowski": suite_minkowski,
    "gm-heights": suite_gm_heights,
    "invariance": suite_invariance,
    "siegel-claim": suite_siegel_claim,
    "siegel-compare": suite_siegel_compare,
}


def run(cfg: ExperimentConfig) -> tuple[str, int]:
    """Run a suite and return the rendered report with the exit status."""
    cfg.validate()
    outcome = SUITES[cfg.suite](cfg)
    if cfg.format == "csv":
        text = "\n".join(outcome.csv_rows) + "\n"
    else:
        report = {
            "schema_version": SCHEMA_VERSION,
            "suite": cfg.suite,
            "seed": cfg.seed,
            "failures": outcome.failures,
            "inconclusive": outcome.inconclusive,
            **outcome.body,
        }
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if outcome.failures:
        status = EXIT_ERROR
    elif outcome.inconclusive:
        status = EXIT_INCONCLUSIVE
    else:
        status = EXIT_OK
    return text, status


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which this tool reserves for inconclusive runs
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="adelic-heights", description=__doc__.splitlines()[0])
    ap.add_argument("--suite", choices=sorted(SUITES))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--cap", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--p", type=_int_list, help="comma-separated primes")
    ap.add_argument("--d", type=_int_list, help="comma-separated dimensions")
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--precision", type=int)
    ap.add_argument("--experiment", action="append", dest="experiments",
                    help="experiment descriptor file (local-bound); repeatable")
    ap.add_argument("--config", help="JSON file with any of the options above")
    return ap


def load_config(argv: list[str] | None = None) -> ExperimentConfig:
    """Defaults, then the config file, then explicit flags."""
    args = build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(data)
    for name, value in vars(args).items():
        if name != "config" and value is not None:
            values[name] = value
    if "suite" not in values:
        raise ConfigError("no suite given")
    try:
        return ExperimentConfig(**values).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = load_config(argv)
        text, status = run(cfg)
    except (ConfigError, ValueError, OSError, BoundViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
