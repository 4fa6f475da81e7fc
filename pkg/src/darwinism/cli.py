"""Command-line front end: redundancy reports, curves, validation, sweeps.

The CLI adds no arithmetic of its own; every emitted number is a direct call
into the library.  Identical config and seed produce byte-identical output.

Exit codes: 0 success, 1 validation-suite failure, 2 input error,
3 deficit unreachable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Optional, Sequence

from . import fragments, oracle, qcb
from .errors import DeficitUnreachableError, OracleCapError, SpecValidationError
from .info import binary_entropy, holevo_from_overlap
from .model import DeficitSpec, EnvironmentSpec, hypergeometric_pmf, validate_spec

EXIT_OK = 0
EXIT_VALIDATION_SUITE = 1
EXIT_INPUT = 2
EXIT_DEFICIT = 3

# Fixed documented default seed: reproducible output without any flags.
DEFAULT_SEED = 42

CURVE_HEADER = "fragment_size,avg_holevo_bits,avg_mi_bits,qcb_holevo_bits,method,stderr"
SWEEP_COLUMNS = [
    "n_good", "n_bad", "gamma2_good", "gamma2_bad", "p0", "delta",
    "f_delta", "r_avg", "r_max_discrete", "r_max_continuous",
    "r_qcb", "r_qcb_expanded", "ratio_avg_over_max", "definition_ratio",
    "qcb_valid", "max_formula_valid", "deficit_unreachable",
]

_DEFAULTS = {
    "n_good": 2,
    "n_bad": 4,
    "gamma2_good": 0.0,
    "gamma2_bad": 1.0,
    "p0": 0.5,
    "delta": 0.1,
    "fmin": 0,
    "fmax": None,
    "method": "exact",
    "samples": 100_000,
    "seed": DEFAULT_SEED,
    "out": None,
    "format": None,
}

_CONVERTERS = {
    "n_good": int, "n_bad": int, "fmin": int, "fmax": int,
    "samples": int, "seed": int,
    "gamma2_good": float, "gamma2_bad": float, "p0": float, "delta": float,
    "method": str, "out": str, "format": str,
}

_MAX_CURVE_ROWS = 100_000


@dataclass(frozen=True)
class RunConfig:
    n_good: int
    n_bad: int
    gamma2_good: float
    gamma2_bad: float
    p0: float
    delta: float
    fmin: int
    fmax: Optional[int]
    method: str
    samples: int
    seed: int
    out: Optional[str]
    format: Optional[str]

    def spec(self) -> EnvironmentSpec:
        return validate_spec(
            EnvironmentSpec(self.n_good, self.n_bad, self.gamma2_good, self.gamma2_bad, self.p0)
        )

    def deficit(self) -> DeficitSpec:
        return DeficitSpec(self.delta)


def _fmt(x) -> str:
    """CSV number formatting: 12 significant digits, '.' decimal, no grouping."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _json_num(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


def _load_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SpecValidationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONVERTERS:
            raise SpecValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value.strip())
        except ValueError as err:
            raise SpecValidationError(f"{path}:{lineno}: bad value for {key}: {err}") from err
    return values


def _merge_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
    return RunConfig(**merged)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-good", dest="n_good", type=int)
    p.add_argument("--n-bad", dest="n_bad", type=int)
    p.add_argument("--gamma2-good", dest="gamma2_good", type=float)
    p.add_argument("--gamma2-bad", dest="gamma2_bad", type=float)
    p.add_argument("--p0", dest="p0", type=float)
    p.add_argument("--delta", dest="delta", type=float)
    p.add_argument("--fmin", dest="fmin", type=int)
    p.add_argument("--fmax", dest="fmax", type=int)
    p.add_argument("--method", dest="method",
                   choices=["exact", "monte-carlo", "qcb", "oracle"])
    p.add_argument("--samples", dest="samples", type=int)
    p.add_argument("--seed", dest="seed", type=int)
    p.add_argument("--out", dest="out")
    p.add_argument("--format", dest="format", choices=["csv", "json"])
    p.add_argument("--config", dest="config")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# redundancy
# ---------------------------------------------------------------------------

def cmd_redundancy(config: RunConfig) -> int:
    report = fragments.redundancy_report(config.spec(), config.deficit())
    payload = {
        "f_delta": report.f_delta,
        "f_delta_interpolated": report.f_delta_interpolated,
        "r_avg": report.r_avg,
        "r_max_discrete": report.r_max_discrete,
        "r_max_continuous": _json_num(report.r_max_continuous),
        "r_qcb": _json_num(report.r_qcb),
        "r_qcb_expanded": _json_num(report.r_qcb_expanded),
        "ratio_avg_over_max": _json_num(report.ratio_avg_over_max),
        "validity_flags": sorted(report.validity_flags),
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", config.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------------

def _curve_rows(config: RunConfig) -> list[dict]:
    spec = config.spec()
    fmax = config.fmax if config.fmax is not None else spec.n_total
    if not (0 <= config.fmin <= fmax <= spec.n_total):
        raise SpecValidationError(
            f"fragment range [{config.fmin}, {fmax}] outside [0, {spec.n_total}]"
        )
    if fmax - config.fmin + 1 > _MAX_CURVE_ROWS:
        raise SpecValidationError(
            f"curve would emit {fmax - config.fmin + 1} rows; "
            f"narrow the range below {_MAX_CURVE_ROWS}"
        )
    state = oracle.branch_state(spec) if config.method == "oracle" else None
    rows = []
    for f in range(config.fmin, fmax + 1):
        avg = mi = stderr = None
        if config.method == "exact":
            avg = fragments.avg_holevo_exact(spec, f)
        elif config.method == "monte-carlo":
            est = fragments.mc_avg_holevo(
                spec, f, config.samples, seed=fragments.split_seed(config.seed, f)
            )
            avg, stderr = est.value, est.stderr
        elif config.method == "oracle":
            avg = oracle.all_fragment_average(state, f, "holevo")
            mi = oracle.all_fragment_average(state, f, "mutual-information")
        rows.append(
            {
                "fragment_size": f,
                "avg_holevo_bits": avg,
                "avg_mi_bits": mi,
                "qcb_holevo_bits": qcb.holevo_asymptotic(spec, f),
                "method": config.method,
                "stderr": stderr,
            }
        )
    return rows


def cmd_curve(config: RunConfig) -> int:
    rows = _curve_rows(config)
    if config.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", config.out)
        return EXIT_OK
    buf = io.StringIO()
    buf.write(CURVE_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for r in rows:
        writer.writerow(
            [
                r["fragment_size"],
                _fmt(r["avg_holevo_bits"]),
                _fmt(r["avg_mi_bits"]),
                _fmt(r["qcb_holevo_bits"]),
                r["method"],
                _fmt(r["stderr"]),
            ]
        )
    _emit(buf.getvalue(), config.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _validation_checks(config: RunConfig) -> list[dict]:
    spec = config.spec()
    if spec.n_total > oracle.state_qubit_cap():
        raise OracleCapError(
            f"validate needs n_total <= {oracle.state_qubit_cap()} dense-state qubits"
        )
    checks = []

    def record(name: str, deviation: float, tolerance: float) -> None:
        checks.append(
            {
                "name": name,
                "max_deviation": deviation,
                "tolerance": tolerance,
                "pass": deviation <= tolerance,
            }
        )

    n = spec.n_total
    sizes = range(0, n + 1)

    dev = max(
        abs(
            math.fsum(hypergeometric_pmf(spec, f, b) for b in range(0, f + 1)) - 1.0
        )
        for f in sizes
    )
    record("pmf-normalization", dev, 1e-12)

    # exhaustive subset enumeration: spins 0..n-1, first n_good are good
    dev = 0.0
    for f in sizes:
        counts = {}
        for subset in combinations(range(n), f):
            b = sum(1 for q in subset if q >= spec.n_good)
            counts[b] = counts.get(b, 0) + 1
        total = sum(counts.values())
        for b in range(0, f + 1):
            expected = counts.get(b, 0) / total
            dev = max(dev, abs(hypergeometric_pmf(spec, f, b) - expected))
    record("pmf-enumeration", dev, 1e-12)

    perfect = EnvironmentSpec(spec.n_good, spec.n_bad, 0.0, 1.0, spec.p0)
    h_s = binary_entropy(spec.p0)
    dev = max(
        abs(
            fragments.avg_holevo_exact(perfect, f)
            - h_s * (1.0 - fragments.p_all_bad(perfect, f))
        )
        for f in sizes
    )
    record("perfect-closed-form", dev, 1e-12)

    dev = 0.0
    for g2 in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]:
        one_spin = oracle.build_branch_state(spec.p0, [math.sqrt(g2)])
        chi, _ = oracle.holevo_and_discord(one_spin, [1])
        dev = max(dev, abs(chi - holevo_from_overlap(g2, spec.p0)))
    record("holevo-oracle-single-spin", dev, 1e-10)

    state = oracle.branch_state(spec)
    dev = max(
        abs(
            fragments.avg_holevo_exact(spec, f)
            - oracle.all_fragment_average(state, f, "holevo")
        )
        for f in sizes
    )
    record("exact-vs-oracle-average", dev, 1e-10)

    min_discord = 0.0
    for f in sizes:
        for frag in combinations(range(1, n + 1), f):
            _, discord = oracle.holevo_and_discord(state, frag)
            min_discord = min(min_discord, discord)
    record("discord-nonnegative", max(0.0, -min_discord), 1e-10)

    record("global-purity", oracle.subset_entropy(state, range(0, n + 1)), 1e-10)

    h_s_vn = oracle.subset_entropy(state, [0])
    dev = max(
        abs(
            oracle.all_fragment_average(state, f, "mutual-information")
            + oracle.all_fragment_average(state, n - f, "mutual-information")
            - 2.0 * h_s_vn
        )
        for f in sizes
    )
    record("partial-information-antisymmetry", dev, 1e-10)

    couplings = [1.0] * spec.n_good + [0.0] * spec.n_bad
    dev = 0.0
    for t in (math.pi / 4, math.pi / 8, 0.3):
        evolved = oracle.evolve_pure_decoherence(couplings, t)
        reference = oracle.build_branch_state(
            0.5, [math.cos(2.0 * g * t) for g in couplings]
        )
        dev = max(dev, 1.0 - oracle.fidelity(evolved, reference))
    record("branch-evolution-fidelity", dev, 1e-10)

    f_mid = max(1, n // 2)
    est = fragments.mc_avg_holevo(spec, f_mid, config.samples, seed=config.seed)
    exact = fragments.avg_holevo_exact(spec, f_mid)
    record("mc-within-4-sigma", abs(est.value - exact), max(4.0 * est.stderr, 1e-15))

    return checks


def cmd_validate(config: RunConfig, corrupt_check: Optional[str] = None) -> int:
    checks = _validation_checks(config)
    if corrupt_check is not None:
        hit = False
        for c in checks:
            if c["name"] == corrupt_check:
                c["max_deviation"] += 1.0
                c["pass"] = False
                hit = True
        if not hit:
            raise SpecValidationError(f"unknown check {corrupt_check!r}")
    failing = [c["name"] for c in checks if not c["pass"]]
    payload = {"checks": checks, "all_pass": not failing}
    _emit(json.dumps(payload, indent=2) + "\n", config.out)
    if failing:
        sys.stderr.write(f"validation failed: {failing[0]}\n")
        return EXIT_VALIDATION_SUITE
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _parse_grid(raw: Optional[str], converter, fallback) -> list:
    if raw is None:
        return [fallback]
    try:
        values = [converter(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError as err:
        raise SpecValidationError(f"malformed grid {raw!r}: {err}") from err
    if not values:
        raise SpecValidationError(f"malformed grid {raw!r}: empty")
    return values


def _sweep_row(config: RunConfig, n_bad: int, gamma2_good: float, delta: float) -> dict:
    spec = validate_spec(
        EnvironmentSpec(config.n_good, n_bad, gamma2_good, config.gamma2_bad, config.p0)
    )
    deficit = DeficitSpec(delta)
    row = dict.fromkeys(SWEEP_COLUMNS)
    row.update(
        {
            "n_good": spec.n_good,
            "n_bad": spec.n_bad,
            "gamma2_good": spec.gamma2_good,
            "gamma2_bad": spec.gamma2_bad,
            "p0": spec.p0,
            "delta": delta,
            "definition_ratio": qcb.definition_ratio(gamma2_good, deficit).value,
            "qcb_valid": False,
            "max_formula_valid": False,
            "deficit_unreachable": False,
        }
    )
    try:
        report = fragments.redundancy_report(spec, deficit)
    except DeficitUnreachableError:
        row["deficit_unreachable"] = True
        return row
    row.update(
        {
            "f_delta": report.f_delta,
            "r_avg": report.r_avg,
            "r_max_discrete": report.r_max_discrete,
            "r_max_continuous": report.r_max_continuous,
            "r_qcb": report.r_qcb if report.r_qcb is None or math.isfinite(report.r_qcb) else None,
            "r_qcb_expanded": report.r_qcb_expanded,
            "ratio_avg_over_max": report.ratio_avg_over_max,
            "qcb_valid": "qcb_valid" in report.validity_flags,
            "max_formula_valid": "max_formula_valid" in report.validity_flags,
            "deficit_unreachable": "deficit_unreachable" in report.validity_flags,
        }
    )
    return row


def _sweep_key(row: dict) -> tuple[str, str, str]:
    return (_fmt(row["n_bad"]), _fmt(row["gamma2_good"]), _fmt(row["delta"]))


def cmd_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    n_bad_grid = _parse_grid(args.sweep_n_bad, int, config.n_bad)
    gamma_grid = _parse_grid(args.sweep_gamma2_good, float, config.gamma2_good)
    delta_grid = _parse_grid(args.sweep_delta, float, config.delta)
    grid = list(product(n_bad_grid, gamma_grid, delta_grid))

    existing_keys: set[tuple[str, str, str]] = set()
    existing_text = ""
    out_path = Path(config.out) if config.out else None
    if out_path is not None and out_path.exists():
        existing_text = out_path.read_text(encoding="utf-8")
        reader = csv.DictReader(io.StringIO(existing_text))
        for row in reader:
            existing_keys.add((row["n_bad"], row["gamma2_good"], row["delta"]))

    rows = []
    for nb, g2g, dl in grid:
        row = _sweep_row(config, nb, g2g, dl)
        if _sweep_key(row) not in existing_keys:
            rows.append(row)

    if config.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", config.out)
        return EXIT_OK

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if not existing_text:
        writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])
    if out_path is not None:
        out_path.write_text(existing_text + buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darwinism",
        description="Redundancy of pointer-state records in good/bad spin environments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("redundancy", "redundancy report (JSON)"),
        ("curve", "averaged information vs fragment size (CSV)"),
        ("validate", "cross-check suite on a small instance (JSON)"),
        ("sweep", "redundancy grid sweep (CSV)"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common_flags(p)
        if name == "validate":
            p.add_argument("--corrupt-check", dest="corrupt_check", help=argparse.SUPPRESS)
        if name == "sweep":
            p.add_argument("--sweep-n-bad", dest="sweep_n_bad")
            p.add_argument("--sweep-gamma2-good", dest="sweep_gamma2_good")
            p.add_argument("--sweep-delta", dest="sweep_delta")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge_config(args)
        if args.command == "redundancy":
            return cmd_redundancy(config)
        if args.command == "curve":
            return cmd_curve(config)
        if args.command == "validate":
            return cmd_validate(config, corrupt_check=args.corrupt_check)
        if args.command == "sweep":
            return cmd_sweep(config, args)
        raise SpecValidationError(f"unknown command {args.command!r}")
    except DeficitUnreachableError as err:
        _emit_error("deficit_unreachable", err)
        return EXIT_DEFICIT
    except (SpecValidationError, OracleCapError, FileNotFoundError) as err:
        _emit_error("input_error", err)
        return EXIT_INPUT


def _emit_error(code: str, err: Exception) -> None:
    sys.stderr.write(json.dumps({"error": {"code": code, "message": str(err)}}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
