import pytest

from fincsp import cli
from fincsp.finstr import load_structure, serialize_structure
from fincsp.instances import (
    boolean_template,
    build_not23_instance,
    example_4_12,
    nor_template,
    star_demo,
    unary_algebra,
)
from fincsp.structure import Structure


@pytest.fixture
def write(tmp_path):
    def _write(S, name):
        path = tmp_path / f"{name}.finstr"
        path.write_text(serialize_structure(S))
        return str(path)

    return _write


def fields(outcome):
    return dict(outcome.fields)


def test_hom_count_on_one_point(write):
    one = write(Structure.build(1, {"m": (2, [0])}), "one")
    outcome = cli.run(["hom", "count", "--source", one, "--target", one])
    assert outcome.exit_code == 0
    assert outcome.text() == "1\n"


def test_hom_exists_and_enumerate(write):
    X, A = write(build_not23_instance(), "x"), write(nor_template(), "a")
    assert cli.run(["hom", "exists", "--source", X, "--target", A]).exit_code == 1
    outcome = cli.run(["hom", "enumerate", "--source", A, "--target", A])
    assert outcome.text().splitlines() == ["0 1"]
    assert fields(outcome)["count"] == 1


def test_classify_boolean(write):
    hard = write(boolean_template(["neg"], ["NAE"]), "hard")
    outcome = cli.run(["classify", "boolean", hard])
    assert outcome.exit_code == 1
    assert outcome.text().startswith("NP-complete")
    porcelain = outcome.text(porcelain=True)
    assert "complexity=NP-complete\n" in porcelain
    assert "refuted.minority=NAE:" in porcelain
    easy = write(boolean_template(["nor"], []), "easy")
    assert cli.run(["classify", "boolean", easy]).exit_code == 0


def test_classify_ksurj(write):
    outcome = cli.run(["classify", "ksurj", write(example_4_12(), "ex")])
    assert outcome.exit_code == 0 and fields(outcome)["verdict"] == "InKsurjEff"
    outcome = cli.run(["classify", "ksurj", write(star_demo(), "star")])
    assert outcome.exit_code == 1 and fields(outcome)["verdict"] == "NotInKsurj"
    assert cli.run(["classify", "simple", write(example_4_12(), "ex")]).exit_code == 2


def test_congruences_and_tct(write):
    path = write(example_4_12(), "ex")
    outcome = cli.run(["congruences", path])
    assert fields(outcome)["count"] == 3
    outcome = cli.run(["tct", "type", path, "--alpha", "0", "--beta", "{0,1}{2}", "--porcelain"])
    assert outcome.exit_code == 0
    assert "3" in outcome.text(porcelain=True)
    assert cli.run(["tct", "chain", path]).exit_code == 1


def test_rewrite_and_free_algebra(write, tmp_path):
    path = write(Structure.build(3, {"o": (2, [0, 1, 2, 1, 0, 2, 2, 2, 2])}), "x")
    out = tmp_path / "reduced.finstr"
    outcome = cli.run(["rewrite", "enforce", path, "--identities", "semilattice", "--rename", "s=o", "--output", str(out)])
    assert outcome.exit_code == 0
    assert load_structure(str(out)).size < 3
    free = tmp_path / "free.finstr"
    outcome = cli.run(["free-algebra", write(unary_algebra((1, 0)), "neg"), "-n", "3", "--output", str(free)])
    assert outcome.exit_code == 0
    assert load_structure(str(free)).size == 6


def test_probe(write):
    outcome = cli.run(["probe", "counting", write(unary_algebra((1, 0)), "neg"), "--n-max", "3"])
    assert outcome.exit_code == 0
    assert "n=3 |X|=6 homs=8 surjective=8" in outcome.text()


def test_solve(write):
    X = write(build_not23_instance(), "x")
    outcome = cli.run(["solve", "sheffer", X])
    assert outcome.exit_code == 1 and outcome.text() == "no\n"
    one = write(Structure.build(1, {"p": (2, [0]), "q": (2, [0])}), "one")
    assert cli.run(["solve", "z", one]).exit_code == 1


def test_width_minimality_dump(write, tmp_path):
    dump = tmp_path / "p.txt"
    X, A = write(build_not23_instance(), "x"), write(nor_template(), "a")
    outcome = cli.run(["width", "minimality", "--source", X, "--target", A, "--dump", str(dump)])
    assert outcome.exit_code == 0
    assert dump.read_text().startswith("K={}: ()")


@pytest.mark.parametrize("name", ["example-4-12", "prop-5-1", "sheffer", "z-template"])
def test_builtin_reproductions_succeed(name):
    assert cli.run(["paper", name]).exit_code == 0


def test_ten_element_reproduction():
    outcome = cli.run(["paper", "prop-6-1"])
    assert outcome.exit_code == 1
    assert outcome.report[0] == "homomorphisms: 0; (2,3)-minimality: nontrivial"
    assert fields(outcome)["explicit_system"] == "compatible"
    assert cli.run(["width", "paper", "not23"]).text() == outcome.text()


def test_usage_errors():
    assert cli.run([]).exit_code == 2
    assert cli.run(["hom", "count"]).exit_code == 2
    assert cli.run(["rewrite", "enforce", "x.finstr"]).exit_code == 2
    assert cli.run(["congruences", "/nonexistent.finstr"]).exit_code == 2


def test_budget_exit_code(write):
    outcome = cli.run(["free-algebra", write(example_4_12(), "ex"), "-n", "3", "--budget", "50"])
    assert outcome.exit_code == 3
    assert fields(outcome)["error"] == "budget"


def test_main_writes_streams(write, capsys):
    path = write(nor_template(), "a")
    assert cli.main(["congruences", path, "--porcelain"]) == 0
    assert "count=2" in capsys.readouterr().out
    assert cli.main(["congruences", "/nonexistent.finstr"]) == 2
    assert "error" in capsys.readouterr().err
