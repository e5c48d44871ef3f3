import json
from fractions import Fraction

import pytest

from wallcross import cli
from wallcross.factor import RaySpectrum
from wallcross.lattice import Pairing
from wallcross.stabfile import StabilityFileError, dump_stability, load_stability, parse_stability
from wallcross.stability import CentralCharge, QuadraticForm, StabilityData


def stability_doc(omega, z=(("0", "1"), ("1", "0")), q=(("1", "0"), ("0", "1")), k=1, order=8):
    return {
        "k": k,
        "order": order,
        "Z": {"gamma1": list(z[0]), "gamma2": list(z[1])},
        "Q": [list(r) for r in q],
        "omega": [{"gamma": list(g), "value": v} for g, v in omega],
    }


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="in.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
        return str(path)

    return _write


PENTAGON = [((1, 0), "1"), ((0, 1), "1")]


# -- factor-commutator --------------------------------------------------------


def test_factor_commutator_trivial_order(run_cli):
    code, out, _ = run_cli("factor-commutator", "--k", "1", "--order", "1")
    assert code == 0
    assert out == "a\tb\tn\tomega\n"


def test_factor_commutator_pentagon(run_cli):
    code, out, _ = run_cli("factor-commutator", "--k", "1", "--order", "6")
    assert code == 0
    assert out.splitlines()[1:] == ["1\t1\t1\t1"]


K2_SNAPSHOT = """\
a\tb\tn\tomega
1\t2\t1\t1
2\t3\t1\t1
1\t1\t1\t-2
3\t2\t1\t1
2\t1\t1\t1
"""


def test_factor_commutator_k2_snapshot(run_cli):
    code, out, _ = run_cli("factor-commutator", "--k", "2", "--order", "6")
    assert code == 0
    assert out == K2_SNAPSHOT


@pytest.mark.parametrize("k", ["1", "2", "3"])
def test_tsv_and_json_agree(run_cli, k):
    _, tsv, _ = run_cli("factor-commutator", "--k", k, "--order", "7")
    _, js, _ = run_cli("factor-commutator", "--k", k, "--order", "7", "--format", "json")
    doc = json.loads(js)
    assert doc["k"] == int(k) and doc["order"] == 7
    rows = [tuple(line.split("\t")) for line in tsv.splitlines()[1:]]
    assert rows == [(str(r["a"]), str(r["b"]), str(r["n"]), r["omega"]) for r in doc["rows"]]


def test_default_order_is_eight(run_cli):
    _, js, _ = run_cli("factor-commutator", "--k", "1", "--format", "json")
    assert json.loads(js)["order"] == 8


@pytest.mark.parametrize("args", [["--k", "0"], ["--k", "x"], ["--k", "1", "--order", "0"], []])
def test_factor_commutator_usage_errors(run_cli, args):
    code, out, err = run_cli("factor-commutator", *args)
    assert code == 2
    assert out == ""
    assert "usage" in err


def test_non_integral_exit_code(run_cli, monkeypatch):
    fake = RaySpectrum.from_omegas({(1, 1): Fraction(1, 2)}, 4)
    monkeypatch.setattr(cli, "commutator_spectrum", lambda k, order: fake)
    code, out, err = run_cli("factor-commutator", "--k", "1", "--order", "4")
    assert code == 3
    assert "1/2" in out and "non-integral" in err


def test_thread_cap_validated(run_cli, monkeypatch):
    monkeypatch.setenv("WCF_THREADS", "-2")
    code, _, err = run_cli("factor-commutator", "--k", "1", "--order", "2")
    assert code == 2 and "WCF_THREADS" in err
    monkeypatch.setenv("WCF_THREADS", "4")
    assert run_cli("factor-commutator", "--k", "1", "--order", "2")[0] == 0


# -- cross-wall ---------------------------------------------------------------


def test_cross_wall_pentagon(run_cli, write, tmp_path):
    src = write(stability_doc(PENTAGON))
    dst = tmp_path / "out.json"
    code, out, _ = run_cli("cross-wall", "--input", src, "--order", "8", "--output", str(dst))
    assert code == 0
    assert "Omega(1, 1): 0 -> 1" in out
    sd = load_stability(dst)
    assert sd.spectrum.omegas() == {(1, 0): 1, (1, 1): 1, (0, 1): 1}
    # crossing back restores the input
    back = tmp_path / "back.json"
    assert run_cli("cross-wall", "--input", str(dst), "--output", str(back))[0] == 0
    assert load_stability(back) == load_stability(src)


def test_cross_wall_single_ray_identical(run_cli, write, tmp_path):
    sd = StabilityData(CentralCharge.from_values(0, 1, 1, 0), QuadraticForm(1, 0, 1),
                       RaySpectrum.from_omegas({(1, 1): 1, (2, 2): 3}, 8), Pairing(2))
    src = write(dump_stability(sd))
    dst = tmp_path / "out.json"
    code, out, _ = run_cli("cross-wall", "--input", src, "--order", "8", "--output", str(dst))
    assert code == 0
    assert out.strip() == "no change"
    assert dst.read_text() == (tmp_path / "in.json").read_text()


def test_cross_wall_malformed_rational(run_cli, write, tmp_path):
    src = write(stability_doc([((1, 0), "1/0"), ((0, 1), "1")]))
    code, out, err = run_cli("cross-wall", "--input", src, "--order", "8", "--output", str(tmp_path / "o"))
    assert code == 2
    assert "omega[0].value" in err
    assert out == ""
    assert not (tmp_path / "o").exists()


def test_cross_wall_support_violation(run_cli, write, tmp_path):
    src = write(stability_doc(PENTAGON, q=(("1", "0"), ("0", "-1"))))
    code, _, err = run_cli("cross-wall", "--input", src, "--output", str(tmp_path / "o"))
    assert code == 4
    assert "(0, 1)" in err


def test_cross_wall_charge_on_wall(run_cli, write, tmp_path):
    # Z(g1) = Z(g2) = 1: the data sits on the wall; Q is negative on ker Z
    src = write(stability_doc(PENTAGON, z=(("1", "0"), ("1", "0")), q=(("1", "3/2"), ("3/2", "1"))))
    code, _, err = run_cli("cross-wall", "--input", src, "--output", str(tmp_path / "o"))
    assert code == 5
    assert "wall" in err


# -- check-support ------------------------------------------------------------


def test_check_support(run_cli, write):
    code, out, _ = run_cli("check-support", "--input", write(stability_doc(PENTAGON)))
    assert (code, out) == (0, "ok\n")
    bad = write(stability_doc(PENTAGON, z=(("1", "0"), ("-1", "0"))), "bad.json")
    code, out, _ = run_cli("check-support", "--input", bad)
    assert code == 4
    assert out.startswith("1\t1\t")


# -- lift-path ----------------------------------------------------------------


def test_lift_path_pentagon_round_trip(run_cli, write, tmp_path):
    src = write(stability_doc(PENTAGON))
    mid, end = tmp_path / "mid.json", tmp_path / "end.json"
    code, out, _ = run_cli("lift-path", "--input", src, "--z-end", "1", "0", "0", "1",
                           "--order", "8", "--output", str(mid))
    assert code == 0
    assert "Omega(1, 1): 0 -> 1" in out
    lifted = load_stability(mid)
    assert lifted.charge == CentralCharge.from_values(1, 0, 0, 1)
    assert lifted.spectrum.omega((1, 1)) == 1
    code, _, _ = run_cli("lift-path", "--input", str(mid), "--z-end", "0", "1", "1", "0",
                         "--output", str(end))
    assert code == 0
    assert load_stability(end) == load_stability(src)


def test_lift_path_non_generic(run_cli, write, tmp_path):
    omega = [((1, 0), "1"), ((2, 1), "1"), ((0, 1), "1"), ((1, 2), "1")]
    src = write(stability_doc(omega, z=(("1", "0"), ("-1", "1"))))
    code, _, err = run_cli("lift-path", "--input", src, "--z-end", "1", "0", "-1", "-1",
                           "--output", str(tmp_path / "o"))
    assert code == 5
    assert "coincide" in err


def test_lift_path_bad_rational(run_cli, write, tmp_path):
    src = write(stability_doc(PENTAGON))
    code, _, err = run_cli("lift-path", "--input", src, "--z-end", "1", "0", "x", "1",
                           "--output", str(tmp_path / "o"))
    assert code == 2
    assert "malformed rational" in err


# -- stability files ----------------------------------------------------------


def test_file_round_trip():
    sd = StabilityData(CentralCharge.from_values(Fraction(1, 3), -2, 0, Fraction(7, 5)),
                       QuadraticForm(2, Fraction(-1, 2), 3),
                       RaySpectrum.from_omegas({(1, 0): 1, (2, 2): Fraction(-5, 4), (1, 3): 2}, 6),
                       Pairing(3))
    text = dump_stability(sd)
    assert parse_stability(text) == sd
    assert dump_stability(parse_stability(text)) == text


def test_file_order_override():
    text = json.dumps(stability_doc(PENTAGON, order=4))
    assert parse_stability(text).order == 4
    assert parse_stability(text, order=9).order == 9


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.pop("Q"), "Q"),
    (lambda d: d.update(k=-1), "k"),
    (lambda d: d["Z"]["gamma2"].__setitem__(1, 0.5), "Z.gamma2[1]"),
    (lambda d: d["Z"]["gamma1"].__setitem__(0, "1/x"), "Z.gamma1[0]"),
    (lambda d: d["Q"][0].__setitem__(1, "2"), "Q"),
    (lambda d: d["omega"].append({"gamma": [1, 0], "value": "2"}), "omega[2].gamma"),
    (lambda d: d["omega"].append({"gamma": [9, 0], "value": "2"}), "omega[2].gamma"),
    (lambda d: d["omega"].append({"gamma": [-1, 1], "value": "2"}), "omega[2].gamma"),
    (lambda d: d["omega"].append({"gamma": [0, 0], "value": "2"}), "omega[2].gamma"),
])
def test_file_validation_names_field(mutate, field):
    doc = stability_doc(PENTAGON)
    mutate(doc)
    with pytest.raises(StabilityFileError) as exc:
        parse_stability(json.dumps(doc, indent=2))
    assert exc.value.field == field
    assert f"'{field}'" in str(exc.value)


def test_file_error_line_numbers():
    doc = stability_doc([((1, 0), "1"), ((0, 1), "3/0")])
    text = json.dumps(doc, indent=2)
    with pytest.raises(StabilityFileError) as exc:
        parse_stability(text)
    expected = next(i for i, line in enumerate(text.splitlines(), 1) if '"3/0"' in line)
    assert exc.value.line == expected
    assert str(exc.value).startswith(f"line {expected}: ")

    with pytest.raises(StabilityFileError) as exc:
        parse_stability('{\n  "k": 1,\n  "Z": oops\n}')
    assert exc.value.line == 3
