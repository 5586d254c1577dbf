import hashlib
import json
import shutil
import subprocess

import pytest

from borel_cycles import cli
from borel_cycles.cycles import torsion_cycle
from borel_cycles.foxbar import bar_d
from borel_cycles.serialize import ChainFile, FormatError, IntegrityError, _canonical


def redigest(obj):
    obj["digest"] = hashlib.sha256(
        _canonical({k: v for k, v in obj.items() if k not in ("digest", "meta")}).encode()
    ).hexdigest()
    return obj


def test_chain_file_round_trip(tmp_path, zeta3):
    ch, g = torsion_cycle(zeta3, 3)
    path = tmp_path / "t.json"
    digest = ChainFile(ch, g, meta={"note": "x"}).write(path)
    back = ChainFile.read(path)
    assert back.to_json()["digest"] == digest
    assert bar_d(back.chain, back.group).is_zero()
    assert sorted(back.chain.terms.values()) == sorted(ch.terms.values())
    # meta is not covered by the digest
    obj = json.loads(path.read_text())
    obj["meta"]["note"] = "changed"
    path.write_text(json.dumps(obj))
    ChainFile.read(path)


def test_chain_file_integrity(tmp_path, zeta3):
    ch, g = torsion_cycle(zeta3, 3)
    path = tmp_path / "t.json"
    ChainFile(ch, g).write(path)
    obj = json.loads(path.read_text())
    obj["matrices"][0][0][0] = "7"
    path.write_text(json.dumps(obj))
    with pytest.raises(IntegrityError):
        ChainFile.read(path)
    path.write_text("[]")
    with pytest.raises(FormatError):
        ChainFile.read(path)


def test_cli_torsion_flow(tmp_path, capsys):
    out, res = tmp_path / "tor.json", tmp_path / "res.json"
    assert cli.main(["build-cycle", "--variant", "torsion", "--out", str(out)]) == 0
    assert cli.main(["verify", str(out)]) == 0
    assert cli.main(["regulate", str(out), "--mmax", "4", "--out", str(res)]) == 0
    assert cli.main(["report", "--result", str(res)]) == 0
    assert "consistent with zero" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "tor.json"
    cli.main(["build-cycle", "--variant", "torsion", "--out", str(out)])
    obj = json.loads(out.read_text())
    obj["terms"][0][0] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    assert cli.main(["verify", str(bad)]) == 3                   # digest mismatch
    bad.write_text(json.dumps(redigest(obj)))
    assert cli.main(["verify", str(bad)]) == 1                   # consistent file, not a cycle
    assert cli.main(["regulate", str(bad), "--mmax", "3"]) == 1
    assert cli.main(["build-cycle", "--unit", "z +", "--out", str(out)]) == 2
    assert cli.main(["build-cycle", "--conductor", "1", "--out", str(out)]) == 2
    assert cli.main(["build-cycle", "--variant", "nope", "--out", str(out)]) == 2
    assert cli.main(["verify", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["zeta-target", "--conductor", "5"]) == 2
    assert cli.main(["verify", str(out), "--expect-boundary", "steinberg:A,B"]) == 2


def test_cli_x_boundary(tmp_path, capsys):
    out, trace = tmp_path / "x.json", tmp_path / "trace.json"
    assert cli.main(["build-cycle", "--variant", "x", "--residual-checks", "none", "--out", str(out),
                     "--emit-trace", str(trace)]) == 0
    assert len(json.loads(trace.read_text())) == 388
    assert cli.main(["verify", str(out), "--expect-boundary", "steinberg:A,B"]) == 0
    assert cli.main(["verify", str(out), "--expect-boundary", "steinberg:B,A"]) == 1


def test_zeta_target_and_precision_env(monkeypatch, capsys):
    monkeypatch.setenv("BOREL_PRECISION", "200")
    assert cli.build_parser().parse_args(["zeta-target"]).precision == 200
    assert cli.main(["zeta-target"]) == 0
    assert "-0.02692216226828754284" in capsys.readouterr().out


def test_verdicts():
    t = 0.0269
    assert cli.verdict(-0.0269j, 1e-3, t).startswith("consistent within")
    assert cli.verdict(1e-9j, 1e-6, t) == "consistent with zero"
    assert cli.verdict(-0.2j, float("inf"), t).startswith("not converged")
    assert cli.verdict(-0.2j, 1e-3, t) == "inconsistent"
    assert cli.verdict(0j, 0.0, t, n_tuples=0).startswith("trivial")


@pytest.mark.skipif(shutil.which("borel-cycles") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["borel-cycles", "zeta-target"], capture_output=True, text=True)
    assert r.returncode == 0 and "zeta_F(2)" in r.stdout
