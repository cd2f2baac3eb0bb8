"""Command-line drivers tying the modules into reproducible runs.

Subcommands: ``entropy``, ``bound-chain``, ``check-domains``,
``mu-field``, ``build-family``.  Every run is driven by a config file
(TOML, or JSON with the same structure), writes its outputs atomically
(temp file + rename) under the output directory, and embeds the fully
resolved config and a schema version string in each report, so
identical configs produce byte-identical outputs.

Exit codes: 0 all checks pass, 1 usage or config error, 2 a flagged
mathematical inconsistency.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import dilatation, domains, entropy
from .config import RunConfig, load_config, with_overrides
from .errors import ConfigError, TorusDynError
from .maps import map_from_descriptor
from .torus import jittered_grid

SCHEMA_VERSION = "torusdyn-report-v1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FLAGGED = 2


def _fmt(value: float) -> str:
    """Fixed 17-significant-digit decimal so CSV dumps are diffable."""
    return format(float(value), ".17g")


def _write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj) -> None:
    _write_atomic(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _report_shell(cfg: RunConfig, command: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg.resolved_dict(),
    }


def _require_map(cfg: RunConfig):
    if cfg.map_descriptor is None:
        raise ConfigError("this command needs a [map] table in the config")
    return map_from_descriptor(cfg.map_descriptor)


def cmd_entropy(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    f = _require_map(cfg)
    candidates = jittered_grid(cfg.candidate_grid, cfg.seed)
    results = []
    csv_rows = []
    for eps in cfg.epsilons:
        fit = entropy.entropy_estimate(f, eps, cfg.n_range, candidates, seed=cfg.seed)
        results.append(
            {
                "epsilon": eps,
                "slope": fit.slope,
                "counts": [
                    {"n": r.n, "count": r.count, "rate_raw": float(np.log(r.count)) / r.n}
                    for r in fit.reports
                ],
                "candidate_count": fit.reports[0].candidate_count,
            }
        )
        csv_rows.extend((eps, r.n, r.count) for r in fit.reports)
    report = _report_shell(cfg, "entropy")
    report["estimator_note"] = entropy.ESTIMATOR_NOTE
    report["results"] = results
    if fmt == "json":
        _write_json(out_dir / "entropy.json", report)
    _write_csv(out_dir / "entropy_counts.csv", ("epsilon", "n", "count"), csv_rows)
    return EXIT_OK


def cmd_bound_chain(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    f = _require_map(cfg)
    collection = None
    if cfg.family_path:
        collection = _load_family(cfg.family_path)
    params = entropy.ChainParams(
        n_range=tuple(cfg.n_range),
        epsilons=tuple(cfg.epsilons),
        quadrature=cfg.quadrature,
        candidate_grid=cfg.candidate_grid,
        seed=cfg.seed,
    )
    chain = entropy.bound_chain(f, params, collection)
    records = []
    csv_rows = []
    for rec in chain.records:
        records.append(
            {
                "n": rec.n,
                "counts": {str(e): c for e, c in rec.counts.items()},
                "rate_raw": {str(e): v for e, v in rec.rate_raw.items()},
                "entropy_rate": {str(e): v for e, v in rec.entropy_rate.items()},
                "dilatation_bound": rec.dilatation_bound,
                "przytycki_bound": rec.przytycki_bound,
                "xi_rate": rec.xi_rate,
                "max_log_K": rec.max_log_K,
                "power_sum_bound": rec.power_sum_bound,
            }
        )
        for eps in cfg.epsilons:
            csv_rows.append(
                (
                    eps,
                    rec.n,
                    rec.counts[eps],
                    rec.entropy_rate[eps] if rec.entropy_rate[eps] is not None else "",
                    rec.dilatation_bound,
                    rec.przytycki_bound,
                )
            )
    report = _report_shell(cfg, "bound-chain")
    report["estimator_note"] = chain.estimator_note
    report["map"] = chain.map_descriptor
    report["records"] = records
    report["flags"] = chain.flags
    report["constants"] = chain.constants
    if fmt == "json":
        _write_json(out_dir / "bound_chain.json", report)
    else:
        _write_csv(
            out_dir / "bound_chain.csv",
            ("epsilon", "n", "count", "entropy_rate", "dilatation_bound", "przytycki_bound"),
            csv_rows,
        )
    return EXIT_FLAGGED if chain.flags else EXIT_OK


def _load_family(path) -> domains.DomainCollection:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"family file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: family JSON parse error: {exc}") from exc
    return domains.family_from_dict(data)


def cmd_check_domains(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    f = _require_map(cfg)
    if not cfg.family_path:
        raise ConfigError("check-domains needs analysis.family pointing at a family file")
    fam = _load_family(cfg.family_path)

    coll = domains.verify_collection(fam)
    beta = domains.beta_of(fam)
    perm = domains.verify_permutation(f, fam, tol=cfg.permutation_tol)
    area = domains.null_sequence_check(fam, epsilon=min(cfg.epsilons))
    power_sums = []
    for n in cfg.n_range:
        try:
            value = domains.max_power_sum(fam, cfg.alpha, n)
            power_sums.append({"n": n, "value": value, "rate": value / n})
        except TorusDynError:
            power_sums.append({"n": n, "value": None, "rate": None})

    first_label = min(d.label for d in fam.domains)
    chain_depth = 0
    cur = first_label
    while cur in fam.permutation and chain_depth < max(cfg.n_range):
        cur = fam.permutation[cur]
        chain_depth += 1
    sum_diam = domains.sum_diam_check(
        f, fam, cfg.alpha, n=chain_depth, t=first_label, seed=cfg.seed
    )
    cap = domains.bounded_dilatation_diagnostic(
        f, fam, n_max=max(cfg.n_range), samples_in_S=256, seed=cfg.seed
    )

    passed = (
        coll.passed
        and perm.passed
        and area.within_budget
        and sum_diam.passed
        and cap.within_cap
    )
    report = _report_shell(cfg, "check-domains")
    report["collection"] = {
        "disjointness_violations": [list(v) for v in coll.disjointness_violations],
        "orbit_repeats": [list(v) for v in coll.orbit_repeats],
        "covering_radius": coll.covering_radius,
        "truncation_note": coll.truncation_note,
        "passed": coll.passed,
    }
    report["beta"] = beta
    report["permutation"] = {
        "checked": perm.checked,
        "tol": perm.tol,
        "failures": list(perm.failures),
        "passed": perm.passed,
    }
    report["area_budget"] = {
        "epsilon": area.epsilon,
        "count_at_or_above": area.count_at_or_above,
        "area_sum": area.area_sum,
        "within_budget": area.within_budget,
    }
    report["power_sums"] = power_sums
    report["sum_diam"] = {
        "start_label": sum_diam.start_label,
        "depth": sum_diam.depth,
        "lhs": sum_diam.lhs,
        "rhs": sum_diam.rhs,
        "margin": sum_diam.margin,
        "constants": sum_diam.constants,
        "passed": sum_diam.passed,
    }
    report["bounded_dilatation"] = {
        "n_max": cap.n_max,
        "sample_count": cap.sample_count,
        "max_log_K": cap.max_log_K,
        "max_K": cap.max_K if cap.max_K != float("inf") else None,
        "beta_sq": cap.beta_sq,
        "tol": cap.tol,
        "within_cap": cap.within_cap,
    }
    report["passed"] = passed
    if fmt == "json":
        _write_json(out_dir / "check_domains.json", report)
    else:
        rows = [
            ("collection", int(coll.passed)),
            ("permutation", int(perm.passed)),
            ("area_budget", int(area.within_budget)),
            ("sum_diam", int(sum_diam.passed)),
            ("bounded_dilatation", int(cap.within_cap)),
        ]
        _write_csv(out_dir / "check_domains.csv", ("check", "passed"), rows)
    return EXIT_OK if passed else EXIT_FLAGGED


def cmd_mu_field(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    f = _require_map(cfg)
    rows = dilatation.mu_field_rows(f, cfg.field_grid)
    _write_csv(
        out_dir / "mu_field.csv",
        dilatation.MU_FIELD_COLUMNS,
        [tuple(float(v) for v in row) for row in rows],
    )
    return EXIT_OK


def cmd_build_family(cfg: RunConfig, out_dir: Path, fmt: str) -> int:
    if not cfg.build:
        raise ConfigError("build-family needs a [build] table in the config")
    params = dict(cfg.build)
    try:
        family = domains.build_translation_family(
            omega=tuple(params.pop("omega")),
            count=int(params.pop("count")),
            c=float(params.pop("c")),
            rho=float(params.pop("rho")),
            start=tuple(params.pop("start", (0.0, 0.0))),
            alpha=float(params.pop("alpha", cfg.alpha)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"build: missing or malformed field ({exc})") from exc
    doc = domains.family_to_dict(family)
    doc["config"] = cfg.resolved_dict()
    _write_json(out_dir / "family.json", doc)
    return EXIT_OK


_COMMANDS = {
    "entropy": cmd_entropy,
    "bound-chain": cmd_bound_chain,
    "check-domains": cmd_check_domains,
    "mu-field": cmd_mu_field,
    "build-family": cmd_build_family,
}


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1 here, not argparse's default 2, so the
    # code 2 stays reserved for flagged mathematical inconsistencies
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="torusdyn",
        description=(
            "Entropy estimation and dilatation diagnostics for torus "
            "diffeomorphisms, driven by a TOML or JSON config file."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the run config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument(
            "--format", choices=("json", "csv"), default="json",
            help="primary report encoding",
        )
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        # the seed override becomes part of the resolved config (the run
        # must be reproducible from what the report embeds); --out only
        # redirects where files land and is not embedded
        cfg = load_config(args.config)
        cfg = with_overrides(cfg, seed=args.seed)
        out_dir = Path(args.out) if args.out is not None else Path(cfg.out_dir)
        return _COMMANDS[args.command](cfg, out_dir, args.format)
    except ConfigError as exc:
        print(f"torusdyn: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TorusDynError as exc:
        print(f"torusdyn: {exc}", file=sys.stderr)
        return EXIT_FLAGGED


if __name__ == "__main__":
    raise SystemExit(main())
