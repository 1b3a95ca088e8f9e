import pytest

from saturn.config import build_config, config_to_dict, dump_config, parse_config
from saturn.errors import ConfigError
from saturn.harness import DEFAULT_N_GRID

MINIMAL = """\
kernel: min
fstar: e2
algorithms: [krr, gf]
alphas: [1.5, 2.0, 2.5, 3.0, 3.5]
"""


@pytest.fixture
def write(tmp_path):
    def _write(text, name="c.yaml"):
        p = tmp_path / name
        p.write_text(text)
        return p
    return _write


def test_minimal_defaults(write):
    c = parse_config(write(MINIMAL), env={})
    assert c.n_grid == DEFAULT_N_GRID and c.trials == 100 and c.noise_sigma == 0.2
    assert c.schedule == "alpha" and c.schedule_values == (1.5, 2.0, 2.5, 3.0, 3.5)
    assert c.algorithms == ("krr", "gf")


def test_override_trials(write):
    base = parse_config(write(MINIMAL), env={})
    c = parse_config(write(MINIMAL), ["trials=20"], env={})
    assert c.trials == 20
    assert config_to_dict(c) | {"trials": 100} == config_to_dict(base)


def test_nested_override(write):
    c = parse_config(write(MINIMAL), ["schedule.c=0.02", "quadrature.nodes=1025"], env={})
    assert c.c == 0.02 and c.quadrature_nodes == 1025


def test_theta_truncpow(write):
    c = parse_config(write("kernel: truncpow3\nfstar: Y11\nalgorithms: [krr]\nschedule:\n  theta: [0.6, 0.4]\n"), env={})
    assert c.schedule == "theta"


def test_express(write):
    assert parse_config(write(MINIMAL + "express: true\n"), env={}).trials == 20


def test_seed_env_and_override_precedence(write):
    p = write(MINIMAL + "base_seed: 3\n")
    assert parse_config(p, env={}).base_seed == 3
    assert parse_config(p, env={"SATURN_SEED": "9"}).base_seed == 9
    assert parse_config(p, ["base_seed=11"], env={"SATURN_SEED": "9"}).base_seed == 11
    with pytest.raises(ConfigError, match="SATURN_SEED"):
        parse_config(p, env={"SATURN_SEED": "abc"})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "none.yaml", env={})


def test_parse_failure_reports_line(write):
    with pytest.raises(ConfigError, match="line"):
        parse_config(write("kernel: min\nfstar: [e2\n"), env={})


def test_empty_and_non_mapping(write):
    with pytest.raises(ConfigError, match="empty"):
        parse_config(write(""), env={})
    with pytest.raises(ConfigError, match="mapping"):
        parse_config(write("- a\n- b\n"), env={})


@pytest.mark.parametrize("extra,field,line", [
    ("trials: many\n", "trials", 5),
    ("colour: red\n", "colour", 5),
    ("n_grid: [256]\n", "n_grid", 5),
    ("noise_sigma: -1\n", "noise_sigma", 5),
])
def test_invalid_field_has_name_and_line(write, extra, field, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(MINIMAL + extra), env={})
    assert str(exc.value).startswith(f"{field} (line {line}):")


def test_invalid_nested_field_line(write):
    text = "kernel: min\nfstar: e2\nalgorithms: [krr]\nschedule:\n  alpha: [2.0]\n  c: -1\n"
    with pytest.raises(ConfigError, match=r"^schedule.c \(line 6\)"):
        parse_config(write(text), env={})
    with pytest.raises(ConfigError, match=r"^schedule.beta \(line 6\)"):
        parse_config(write(text.replace("c: -1", "beta: 1")), env={})


def test_override_errors_are_marked(write):
    with pytest.raises(ConfigError, match=r"^trials \(override\)"):
        parse_config(write(MINIMAL), ["trials=-3"], env={})
    with pytest.raises(ConfigError, match="key=value"):
        parse_config(write(MINIMAL), ["trials"], env={})
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(write(MINIMAL), ["9x=1"], env={})


def test_required_fields():
    with pytest.raises(ConfigError, match="kernel"):
        build_config({"fstar": "e2", "algorithms": ["krr"], "alphas": [2.0]})
    with pytest.raises(ConfigError, match="exactly one"):
        build_config({"kernel": "min", "fstar": "e2", "algorithms": ["krr"]})
    with pytest.raises(ConfigError, match="exactly one"):
        build_config({"kernel": "min", "fstar": "e2", "algorithms": ["krr"], "alphas": [2.0], "thetas": [0.3]})


def test_type_errors():
    base = {"kernel": "min", "fstar": "e2", "algorithms": ["krr"], "alphas": [2.0]}
    for key, val in [("trials", True), ("noise_sigma", "x"), ("algorithms", "krr"), ("fstar_normalize", 1)]:
        with pytest.raises(ConfigError, match=f"^{key}"):
            build_config(base | {key: val})


def test_config_round_trip(write, tmp_path):
    c = parse_config(write(MINIMAL), ["schedule.c=0.03", "workers=2", "quadrature.nodes=4097"], env={})
    echo = write(dump_config(c), "echo.yaml")
    again = parse_config(echo, env={})
    assert again == c
    assert dump_config(again) == dump_config(c)


@pytest.mark.parametrize("name", ["min_e2.yaml", "heavyside_e2.yaml", "sphere_truncpow3_Y11.yaml"])
def test_shipped_configs_parse(name):
    from pathlib import Path

    c = parse_config(Path(__file__).parent.parent / "configs" / name, env={})
    assert c.trials == 100
