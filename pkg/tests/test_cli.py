import json
import math
import subprocess
import sys

import pytest

from torusdyn.cli import EXIT_FLAGGED, EXIT_OK, EXIT_USAGE, main

LOG_LAMBDA1 = math.log((3.0 + math.sqrt(5.0)) / 2.0)

TRANSLATION_TOML = """
[map]
kind = "translation"
omega = [0.41421356237309515, 0.7320508075688772]

[analysis]
n_range = [2, 3, 4, 5, 6]
epsilons = [0.2]
quadrature = 32
candidate_grid = 60
seed = 0
"""

CAT_TOML = """
[map]
kind = "linear"
matrix = [[2, 1], [1, 1]]

[analysis]
n_range = [2, 3, 4, 5, 6]
epsilons = [0.2]
quadrature = 16
candidate_grid = 60
field_grid = 8
seed = 0
"""


def run_cli(tmp_path, name, text, command, extra=()):
    cfg = tmp_path / name
    cfg.write_text(text)
    out = tmp_path / "out"
    code = main([command, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def test_entropy_translation(tmp_path):
    code, out = run_cli(tmp_path, "t.toml", TRANSLATION_TOML, "entropy")
    assert code == EXIT_OK
    report = json.loads((out / "entropy.json").read_text())
    assert report["schema_version"] == "torusdyn-report-v1"
    assert report["config"]["map"]["kind"] == "translation"
    assert abs(report["results"][0]["slope"]) <= 0.02
    counts = (out / "entropy_counts.csv").read_text().splitlines()
    assert counts[0] == "epsilon,n,count"
    assert len(counts) == 6


def test_entropy_cat_slope(tmp_path):
    code, out = run_cli(tmp_path, "c.toml", CAT_TOML, "entropy")
    assert code == EXIT_OK
    report = json.loads((out / "entropy.json").read_text())
    assert 0.6 <= report["results"][0]["slope"] <= 1.2


def test_malformed_config_exit_one(tmp_path):
    code, _ = run_cli(tmp_path, "bad.toml", "[map]\nkind = 'moebius'\n", "entropy")
    assert code == EXIT_USAGE
    code, _ = run_cli(tmp_path, "bad2.toml", "[map\nbroken", "entropy")
    assert code == EXIT_USAGE
    code, _ = run_cli(
        tmp_path, "bad3.toml", CAT_TOML.replace("field_grid = 8", "field_grid = 0"),
        "mu-field",
    )
    assert code == EXIT_USAGE


def test_json_config_accepted(tmp_path):
    doc = {
        "map": {"kind": "linear", "matrix": [[2, 1], [1, 1]]},
        "analysis": {"n_range": [1, 2, 3], "epsilons": [0.2], "quadrature": 8,
                     "candidate_grid": 20, "seed": 0},
    }
    code, out = run_cli(tmp_path, "c.json", json.dumps(doc), "bound-chain")
    assert code == EXIT_OK
    report = json.loads((out / "bound_chain.json").read_text())
    for rec in report["records"]:
        assert rec["dilatation_bound"] == pytest.approx(LOG_LAMBDA1, abs=1e-6)


def test_bound_chain_cat(tmp_path):
    code, out = run_cli(tmp_path, "c.toml", CAT_TOML, "bound-chain")
    assert code == EXIT_OK
    report = json.loads((out / "bound_chain.json").read_text())
    assert report["flags"] == []
    for rec in report["records"]:
        assert rec["dilatation_bound"] == pytest.approx(LOG_LAMBDA1, abs=1e-6)
        assert rec["przytycki_bound"] == pytest.approx(LOG_LAMBDA1, abs=1e-6)


def test_bound_chain_translation_zero(tmp_path):
    code, out = run_cli(tmp_path, "t.toml", TRANSLATION_TOML, "bound-chain")
    assert code == EXIT_OK
    report = json.loads((out / "bound_chain.json").read_text())
    for rec in report["records"]:
        assert rec["dilatation_bound"] == 0.0
        assert rec["przytycki_bound"] == 0.0
        rate = rec["entropy_rate"]["0.2"]
        assert rate is None or rate == 0.0


def test_standard_map_rates_below_przytycki(tmp_path):
    toml = CAT_TOML.replace(
        'kind = "linear"\nmatrix = [[2, 1], [1, 1]]', 'kind = "standard_map"\nk = 6.0'
    )
    code, out = run_cli(tmp_path, "s.toml", toml, "bound-chain")
    assert code == EXIT_OK
    report = json.loads((out / "bound_chain.json").read_text())
    for rec in report["records"]:
        rate = rec["entropy_rate"]["0.2"]
        if rate is not None:
            assert rate <= rec["przytycki_bound"] + 2.0 * math.log(2.0) / rec["n"]


def test_mu_field_translation_and_cat(tmp_path):
    code, out = run_cli(tmp_path, "t.toml", TRANSLATION_TOML + "field_grid = 8\n", "mu-field")
    assert code == EXIT_OK
    lines = (out / "mu_field.csv").read_text().splitlines()
    assert lines[0] == "x,y,mu_re,mu_im,theta_arg,K"
    assert len(lines) == 65
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[2]) == 0.0 and float(cells[3]) == 0.0
        assert float(cells[5]) == 1.0

    code, out = run_cli(tmp_path, "c.toml", CAT_TOML, "mu-field")
    rows = (out / "mu_field.csv").read_text().splitlines()[1:]
    mu = {tuple(r.split(",")[2:4]) for r in rows}
    assert len(mu) == 1  # spatially constant coefficient for a linear map
    re, im = (float(v) for v in next(iter(mu)))
    assert (re, im) == pytest.approx((1 / 3, 2 / 3), abs=1e-15)


def _family_config(tmp_path, map_section, count=200, extra_analysis=""):
    build = f"""
[build]
omega = [0.41421356237309515, 0.7320508075688772]
count = {count}
c = 0.01
rho = 0.98

[analysis]
seed = 0
"""
    cfg = tmp_path / "build.toml"
    cfg.write_text(build)
    out = tmp_path / "fam"
    assert main(["build-family", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    family_path = out / "family.json"
    run = f"""
{map_section}

[analysis]
n_range = [2, 3, 4, 5, 6]
epsilons = [0.2]
quadrature = 32
candidate_grid = 60
seed = 0
alpha = 0.5
family = "{family_path}"
{extra_analysis}
"""
    cfg2 = tmp_path / "run.toml"
    cfg2.write_text(run)
    return cfg2


def test_check_domains_translation_passes(tmp_path):
    cfg = _family_config(
        tmp_path,
        '[map]\nkind = "translation"\nomega = [0.41421356237309515, 0.7320508075688772]',
    )
    out = tmp_path / "out"
    code = main(["check-domains", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_OK
    report = json.loads((out / "check_domains.json").read_text())
    assert report["passed"] is True
    assert report["beta"] == 1.0
    assert report["bounded_dilatation"]["max_K"] == 1.0
    assert report["permutation"]["failures"] == []
    assert report["collection"]["covering_radius"] > 0.0


def test_check_domains_cat_flagged(tmp_path):
    cfg = _family_config(tmp_path, '[map]\nkind = "linear"\nmatrix = [[2, 1], [1, 1]]')
    out = tmp_path / "out"
    code = main(["check-domains", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_FLAGGED
    report = json.loads((out / "check_domains.json").read_text())
    assert report["passed"] is False
    assert report["permutation"]["failures"]


def test_check_domains_overlap_flagged(tmp_path):
    family = {
        "schema_version": "torusdyn-family-v1",
        "alpha": 0.5,
        "truncation_note": "overlapping pair",
        "boundary_count": 16,
        "domains": [
            {"label": 0, "center": [0.0, 0.0], "inradius": 0.4, "circumradius": 0.4,
             "diameter": 0.7},
            {"label": 1, "center": [0.5, 0.5], "inradius": 0.4, "circumradius": 0.4,
             "diameter": 0.7},
        ],
        "permutation": {},
    }
    fam_path = tmp_path / "family.json"
    fam_path.write_text(json.dumps(family))
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        f"""
[map]
kind = "translation"
omega = [0.41421356237309515, 0.7320508075688772]

[analysis]
n_range = [2, 3, 4]
epsilons = [0.2]
quadrature = 8
candidate_grid = 20
family = "{fam_path}"
"""
    )
    out = tmp_path / "out"
    code = main(["check-domains", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_FLAGGED
    report = json.loads((out / "check_domains.json").read_text())
    assert report["collection"]["disjointness_violations"]


def test_byte_identical_reruns(tmp_path):
    for command, toml in (
        ("entropy", CAT_TOML),
        ("bound-chain", CAT_TOML),
        ("mu-field", CAT_TOML),
    ):
        cfg = tmp_path / "c.toml"
        cfg.write_text(toml)
        blobs = []
        for run in ("a", "b"):
            out = tmp_path / f"{command}-{run}"
            assert main([command, "--config", str(cfg), "--out", str(out)]) in (0, 2)
            blobs.append(
                {p.name: p.read_bytes() for p in sorted(out.iterdir())}
            )
        assert blobs[0] == blobs[1]


def test_seed_override_changes_candidates(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(CAT_TOML)
    out1, out2, out3 = tmp_path / "s0", tmp_path / "s1", tmp_path / "s0b"
    main(["entropy", "--config", str(cfg), "--out", str(out1)])
    main(["entropy", "--config", str(cfg), "--out", str(out2), "--seed", "1"])
    main(["entropy", "--config", str(cfg), "--out", str(out3), "--seed", "0"])
    a = (out1 / "entropy.json").read_bytes()
    b = (out2 / "entropy.json").read_bytes()
    c = (out3 / "entropy.json").read_bytes()
    assert a != b  # different candidate jitter
    assert a == c  # explicit seed equal to the default reproduces it


def test_csv_format_option(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(CAT_TOML)
    out = tmp_path / "out"
    code = main(["bound-chain", "--config", str(cfg), "--out", str(out), "--format", "csv"])
    assert code == EXIT_OK
    lines = (out / "bound_chain.csv").read_text().splitlines()
    assert lines[0].startswith("epsilon,n,count,entropy_rate")
    assert not (out / "bound_chain.json").exists()


def test_usage_error_exit_code():
    assert main(["entropy"]) == EXIT_USAGE  # missing --config


def test_console_entry_point(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(CAT_TOML)
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "torusdyn.cli", "mu-field",
         "--config", str(cfg), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    assert (out / "mu_field.csv").exists()
