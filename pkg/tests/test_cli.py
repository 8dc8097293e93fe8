import json

from hlx.cli import main, run_steinberg, run_tpd_grid


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_verify_identities_small(capsys):
    code, out = _run(capsys, ["verify-identities", "--kmax", "1", "--smax", "1", "--rmax", "2"])
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] is True
    assert all(r["pass"] for r in rep["results"])


def test_verify_identities_mutant_fails(capsys):
    code, out = _run(
        capsys, ["verify-identities", "--kmax", "1", "--smax", "0", "--rmax", "1", "--inject-mutant"]
    )
    assert code == 1
    rep = json.loads(out.split("\n{")[0] if out.startswith("{") else out)
    bad = [r for r in rep["results"] if not r["pass"]]
    assert bad and bad[0]["identity"] == "basicrel-mutant"
    assert bad[0]["residual"] != "0"


def test_reports_deterministic(tmp_path, capsys):
    f1, f2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["verify-identities", "--kmax", "1", "--smax", "0", "--rmax", "1", "--out", f1]) == 0
    assert main(["verify-identities", "--kmax", "1", "--smax", "0", "--rmax", "1", "--out", f2]) == 0
    capsys.readouterr()
    assert open(f1, "rb").read() == open(f2, "rb").read()


def test_module_build_and_chop(tmp_path, capsys):
    recipe = {
        "ring": {"kind": "Fp", "p": 3},
        "build": {
            "tensor": [
                {"eval_weyl": {"lambda": 1, "a": "1"}},
                {"eval_weyl": {"lambda": 1, "a": "2"}},
            ]
        },
    }
    rpath = str(tmp_path / "recipe.json")
    with open(rpath, "w") as fh:
        json.dump(recipe, fh)
    code, out = _run(capsys, ["module", "build", "--recipe", rpath])
    assert code == 0
    rep = json.loads(out)
    assert rep["dim"] == 4
    assert rep["drinfeld"] == [["1", "0", "2"]]  # (1-u)(1-2u) = 1 - 3u + 2u^2 = 1 + 2u^2 mod 3

    code, out = _run(capsys, ["module", "chop", "--recipe", rpath])
    assert code == 0
    rep = json.loads(out)
    assert [f["dim"] for f in rep["factors"]] == [4]

    code, out = _run(capsys, ["module", "dual", "--recipe", rpath])
    assert code == 0
    rep = json.loads(out)
    assert rep["drinfeld"] == [["1", "0", "2"]]


def test_module_bad_recipe(tmp_path, capsys):
    rpath = str(tmp_path / "bad.json")
    with open(rpath, "w") as fh:
        json.dump({"ring": {"kind": "Fp", "p": 3}, "build": {"nonsense": {}}}, fh)
    code, _ = _run(capsys, ["module", "build", "--recipe", rpath])
    assert code == 2


def test_steinberg_report():
    rep = run_steinberg(2, 8)
    assert rep["pass"]
    assert [r["dim"] for r in rep["rows"]] == [1, 2, 2, 4, 2, 4, 4, 8, 2]
    rep3 = run_steinberg(3, 5)
    assert rep3["pass"]
    assert rep3["rows"][5]["dim"] == 6


def test_tpd_grid_small():
    rep = run_tpd_grid(2)
    assert rep["pass"] and rep["cases"] == 6
    rep3 = run_tpd_grid(3, max_pairs=20)
    assert rep3["pass"]


def test_paper_example_cli(capsys):
    code, out = _run(capsys, ["paper-example", "--p", "3", "--a", "1", "--b", "2"])
    assert code == 0
    rep = json.loads(out)
    assert rep["symbolic"]["matrix1"] == [["1", "0", "-a**2"], ["0", "1", "2*a"], ["1", "b", "b**2"]]
    assert rep["symbolic"]["matrix2"] == [["1", "2*a", "a**2"], ["1", "b", "0"], ["0", "1", "b"]]
    assert rep["numeric"]["lattices_equal"] is True


def test_lattice_cli(tmp_path, capsys):
    recipe = {
        "build": {
            "tensor": [
                {"eval_weyl": {"lambda": 1, "a": "1"}},
                {"eval_weyl": {"lambda": 1, "a": "4"}},
            ]
        }
    }
    rpath = str(tmp_path / "ambient.json")
    with open(rpath, "w") as fh:
        json.dump(recipe, fh)
    code, out = _run(capsys, ["lattice", "--recipe", rpath, "--p", "3", "--reduce"])
    assert code == 0
    rep = json.loads(out)
    assert rep["rank"] == 4
    assert rep["reduction"]["dim"] == 4
    assert rep["reduction"]["drinfeld"] == [["1", "1", "1"]]  # (1-u)^2 = 1+u+u^2 mod 3


def test_blocks_cli(tmp_path, capsys):
    recipes = [
        {"ring": {"kind": "Fp", "p": 3}, "build": {"irreducible": {"lambda": 2, "a": "1"}}},
        {"ring": {"kind": "Fp", "p": 3}, "build": {"eval_weyl": {"lambda": 0, "a": "1"}}},
        {"ring": {"kind": "Fp", "p": 3}, "build": {"irreducible": {"lambda": 1, "a": "1"}}},
        {"ring": {"kind": "Fp", "p": 3}, "build": {"irreducible": {"lambda": 1, "a": "2"}}},
    ]
    paths = []
    for i, rec in enumerate(recipes):
        rpath = str(tmp_path / ("recipe%d.json" % i))
        with open(rpath, "w") as fh:
            json.dump(rec, fh)
        opath = str(tmp_path / ("module%d.json" % i))
        assert main(["module", "build", "--recipe", rpath, "--out", opath]) == 0
        paths.append(opath)
    capsys.readouterr()
    code, out = _run(capsys, ["blocks"] + paths)
    assert code == 0
    rep = json.loads(out)
    # V(2,1) and V(0) share the zero character; V(1,1) and V(1,2) are apart
    assert len(rep["groups"]) == 3
    sizes = sorted(len(g["members"]) for g in rep["groups"])
    assert sizes == [1, 1, 2]
    assert rep["pass"] is True


def test_conjecture_cli(capsys):
    code, out = _run(capsys, ["conjecture-cp0", "--p", "3", "--degmax", "1"])
    assert code == 0
    rep = json.loads(out)
    assert rep["reports"][0]["status"] == "VERIFIED"


def test_ext_degree_grids():
    from hlx.cli import run_steinberg, run_tpd_grid

    rep = run_steinberg(2, 3, ext_degree=2)
    assert rep["pass"]
    rep2 = run_tpd_grid(2, ext_degree=2, max_pairs=10)
    assert rep2["pass"]


def test_json_and_out_flag_interaction(tmp_path, capsys):
    out = str(tmp_path / "r.json")
    code = main(["verify-identities", "--kmax", "1", "--smax", "0", "--rmax", "1", "--out", out])
    text = capsys.readouterr().out
    assert code == 0
    assert text.startswith("wrote ")
    code = main(
        ["verify-identities", "--kmax", "1", "--smax", "0", "--rmax", "1", "--out", out, "--json"]
    )
    text = capsys.readouterr().out
    assert code == 0
    assert json.loads(text)["pass"] is True
