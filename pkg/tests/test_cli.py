import importlib
import inspect
import json
import re

import pytest
from click.testing import CliRunner

from mapcone import cli
from mapcone.artin import truncated
from mapcone.dgla import GradedVectorSpace, from_half_table
from mapcone.exactalg import GradedMap
from mapcone.mcdef import InternalInconsistency
from mapcone.textformat import dumps
from fractions import Fraction

ONE = Fraction(1)
MODULES = ["exactalg", "dgla", "linfty", "cone", "artin", "mcdef", "grassmann", "period"]


def run(*args, env=None):
    return CliRunner().invoke(cli.main, list(args), env=env, catch_exceptions=False)


def structured(*args, env=None):
    r = run(*args, "--format", "structured", env=env)
    return r, json.loads(r.output)


def checks_of(report):
    return {c["check"] for c in report["checks"]}


@pytest.fixture
def jacobi_broken(tmp_path):
    S = GradedVectorSpace({0: ["a", "b", "c"]})
    g = from_half_table(S, GradedMap.zero(S, S, 1),
                        {("a", "b"): {"c": ONE}, ("b", "c"): {"a": ONE}, ("a", "c"): {"a": ONE}})
    p = tmp_path / "broken.yaml"
    p.write_text(dumps(g))
    return p


def test_validate_shipped_fixtures():
    r, rep = structured("validate")
    assert r.exit_code == 0 and rep["checks"] and checks_of(rep) <= set(cli.COMMAND_CHECKS["validate"])


def test_validate_broken_jacobi_names_a_triple(jacobi_broken):
    r, rep = structured("validate", str(jacobi_broken))
    assert r.exit_code == 1
    failed = [c for c in rep["checks"] if not c["ok"]]
    assert failed[0]["check"] == "dgla.Dgla.check" and len(failed[0]["witness"]) == 3


def test_cone_arity_four():
    r, rep = structured("cone", "--arity", "4")
    assert r.exit_code == 0 and "cone.compare_with_oracle" in checks_of(rep)


def test_cone_perturbation_fails():
    r = run("cone", "--arity", "4", "--oracle-arity", "2", "--perturb", "2=1/11")
    assert r.exit_code == 1 and "FAIL" in r.output


def test_period_elliptic_submodule():
    r, rep = structured("period", "--model", "elliptic", "--p", "1", "--artin", "t2")
    assert r.exit_code == 0
    assert rep["objects"]["period"]["submodule"]["1"] == ["[dz]+t[dzb]"]


def test_period_obstruction_on_affine():
    r, rep = structured("period-run", "--model", "affine", "--artin", "t2", "--xi", "q1.d/p1@t + q2.d/p2@t",
                        "--obstruction")
    assert r.exit_code == 0
    assert rep["objects"]["obstruction"]["source_class"] == ["0", "1"]


@pytest.mark.parametrize("args", [
    ("mc-residual", "--samples", "2"), ("mc-equiv", "--samples", "2"), ("mc-lift", "--samples", "2"),
    ("grass-tangent",), ("grass-compare", "--samples", "2"), ("grass-membership", "--samples", "4"),
    ("suite", "--only", "1"),
])
def test_commands_pass(args):
    r, rep = structured(*args)
    assert r.exit_code == 0, r.output
    family = args[0].split("-")[0]
    assert checks_of(rep) <= set(cli.COMMAND_CHECKS[family])


def test_parse_errors_exit_two(tmp_path):
    assert run("validate", str(tmp_path / "missing.yaml")).exit_code == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: dgla\nspace: [1, 2\n")
    assert run("validate", str(bad)).exit_code == 2
    assert run("period", "--xi", "d/dz@t").exit_code == 2
    assert run("mc-residual", "--artin", "nosuch").exit_code == 2


def test_internal_inconsistency_exits_three(monkeypatch):
    def boom(*a, **k):
        raise InternalInconsistency("two routes disagreed")
    monkeypatch.setattr(cli, "cmd_cone", boom)
    r = run("cone")
    assert r.exit_code == 3 and "internal inconsistency" in r.output


def test_reports_are_deterministic_and_round_trip():
    a = run("grass-membership", "--format", "structured", "--seed", "3", "--samples", "4").output
    b = run("grass-membership", "--format", "structured", "--seed", "3", "--samples", "4").output
    assert a == b
    assert cli.RunReport.from_json(a).to_json() == a
    assert "wall_time" not in json.loads(a)
    timed = json.loads(run("suite", "--only", "1", "--format", "structured", "--timing").output)
    assert "wall_time" in timed


def test_fixture_search_path(tmp_path):
    (tmp_path / "mytrunc.yaml").write_text(dumps(truncated(3)))
    r = run("mc-residual", "--artin", "mytrunc", "--samples", "2", env={cli.FIXTURE_ENV: str(tmp_path)})
    assert r.exit_code == 0
    assert run("mc-residual", "--artin", "mytrunc", "--samples", "2", env={cli.FIXTURE_ENV: ""}).exit_code == 2


def test_output_file(tmp_path):
    out = tmp_path / "rep.json"
    r = run("suite", "--only", "1", "--output", str(out))
    assert r.exit_code == 0
    assert json.loads(out.read_text())["schema"] == cli.SCHEMA


def _resolve(name):
    mod, _, rest = name.partition(".")
    obj = importlib.import_module(f"mapcone.{mod}")
    for part in rest.split("."):
        obj = getattr(obj, part)
    # unwrap property-like descriptors to the function they run
    return getattr(obj, "fget", None) or getattr(obj, "func", None) or obj


def test_registry_names_resolve():
    for names in cli.COMMAND_CHECKS.values():
        for n in names:
            for target in cli.COMPOSITE_CHECKS.get(n, (n,)):
                assert callable(_resolve(target)), target


def test_every_library_check_is_reachable():
    registered = {n for names in cli.COMMAND_CHECKS.values() for n in names}
    for agg, subs in cli.SUBCHECKS.items():
        src = inspect.getsource(_resolve(agg))
        for s in subs:
            assert f"self.{s}()" in src
            registered.add(agg.rsplit(".", 1)[0] + "." + s)
    pattern = re.compile(r"^(check(_|$)|compare_|validate_|.*_check$)")
    for m in MODULES:
        mod = importlib.import_module(f"mapcone.{m}")
        for name, obj in vars(mod).items():
            if getattr(obj, "__module__", None) != mod.__name__:
                continue
            if inspect.isfunction(obj) and pattern.match(name):
                assert f"{m}.{name}" in registered, name
            if inspect.isclass(obj):
                for attr in vars(obj):
                    if attr in ("check", "validation") or attr.startswith("check_"):
                        assert f"{m}.{name}.{attr}" in registered, f"{name}.{attr}"
