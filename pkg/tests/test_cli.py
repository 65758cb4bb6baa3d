from __future__ import annotations

import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from cablefloer.cfk import catalog, emit_complex, parse_complex
from cablefloer.cli import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_UNSUPPORTED,
    DomainError,
    emit_svg,
    module_from_json,
    module_to_json,
    parse_caps,
    run,
)
from cablefloer.pattern import build_diagram, pattern_data


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    root = tmp_path / "cache"
    monkeypatch.setenv("CABLEFLOER_CACHE", str(root))
    return root


def run_json(*argv):
    code, out, err = run(list(argv))
    assert code == EXIT_OK, err
    return json.loads(out)


def test_catalog_list():
    data = run_json("catalog", "list")
    assert [row["name"] for row in data["catalog"]] == sorted(catalog(), key=list(catalog()).index)


def test_validate(tmp_path):
    assert run_json("validate", "catalog:figure_eight")["valid"] is True
    bad = tmp_path / "bad.cfk"
    bad.write_text("cfk v1\ngen a A=0 M=0\ngen b A=0 M=0\narrow a b U=0\n")
    code, _, err = run(["validate", str(bad)])
    assert code == EXIT_DOMAIN and "Maslov" in err
    bad.write_text("cfk v1\ngen a A=0 M=0\narrow a b U=0\n")
    code, _, err = run(["validate", str(bad)])
    assert code == EXIT_DOMAIN and "DanglingArrowError" in err
    code, _, err = run(["validate", str(tmp_path / "missing.cfk")])
    assert code == EXIT_DOMAIN


def test_file_input_matches_catalog(tmp_path):
    f = tmp_path / "trefoil.cfk"
    f.write_text(emit_complex(catalog()["trefoil_rh"]))
    a = run_json("cable", str(f), "-p", "3", "-q", "2", "--hfk")
    b = run_json("cable", "catalog:trefoil_rh", "-p", "3", "-q", "2", "--hfk")
    assert a["hfk"] == b["hfk"]


def test_roundtrip_of_every_catalog_file():
    for C in catalog().values():
        text = emit_complex(C)
        assert parse_complex(emit_complex(parse_complex(text, C.name)), C.name) == C


def test_cfd_json():
    data = run_json("cfd", "catalog:unknot", "--framing", "-1")
    assert data["t"] == 1
    assert sorted(g["id"] for g in data["generators"]) == ["mu1", "x0"]
    assert all("/" in v or v.lstrip("-").isdigit() for g in data["generators"] for v in g["grading"].values() if isinstance(v, str))


def test_pattern_unsupported_residue():
    code, _, err = run(["pattern", "3", "7"])
    assert code == EXIT_UNSUPPORTED and "unsupported" in err
    code, _, _ = run(["pattern", "4", "6"])
    assert code == EXIT_DOMAIN


def test_pattern_cfa_dump():
    data = run_json("pattern", "3", "2", "--cfa")
    assert (data["vx"], data["n_w"], data["a"], data["b1"]) == (2, 3, "x3", "y1")
    assert "m x3 rho3 rho2 rho1 -> U^1 y1" in data["operations"]


def test_svg_is_deterministic(tmp_path):
    for pq in [(3, 2), (5, 3)]:
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_svg(build_diagram(*pq), a)
        emit_svg(build_diagram(*pq), b)
        assert a.read_bytes() == b.read_bytes()
        root = ET.parse(a).getroot()
        labels = {el.text for el in root.iter("{http://www.w3.org/2000/svg}text")}
        assert {g.name for g in build_diagram(*pq).generators} <= labels
    with pytest.raises(OSError):
        emit_svg(build_diagram(3, 2), tmp_path / "no" / "such" / "dir.svg")


def test_cable_unknot_staircase():
    data = run_json("cable", "catalog:unknot", "-p", "3", "-q", "2", "--hfk", "--euler")
    assert [(h["A"], h["M"], h["rank"]) for h in data["hfk"]] == [(-1, -2, 1), (0, -1, 1), (1, 0, 1)]
    assert data["euler"]["match"] is True


def test_cable_negative_slope_is_the_mirror():
    pos = run_json("cable", "catalog:trefoil_lh", "-p", "3", "-q", "2", "--hfk")
    neg = run_json("cable", "catalog:trefoil_rh", "-p", "3", "-q", "-2", "--hfk")
    flipped = sorted((-h["A"], -h["M"], h["rank"]) for h in pos["hfk"])
    assert sorted((h["A"], h["M"], h["rank"]) for h in neg["hfk"]) == flipped


def test_thinness_json_and_cache(cache):
    argv = ["thinness", "catalog:trefoil_rh", "-p", "3", "-q", "2", "--framing", "0"]
    code, cold, _ = run(argv)
    assert code == EXIT_OK
    data = json.loads(cold)
    assert data["verdict"] == "not-thin"
    assert [(w["a"], w["b"]) for w in data["witnesses"]] == [(0, 3), (-1, 2)]
    assert any(p.name.startswith("thinness-") for p in cache.iterdir())
    code, warm, _ = run(argv)
    assert warm == cold
    code, uncached, _ = run(argv + ["--no-cache"])
    assert uncached == cold


def test_thinness_errors():
    code, _, err = run(["thinness", "catalog:unknot", "-p", "3", "-q", "2"])
    assert code == EXIT_DOMAIN and "NoWitnessError" in err
    code, _, _ = run(["thinness", "catalog:trefoil_lh", "-p", "3", "-q", "2", "--framing", "0"])
    assert code == EXIT_UNSUPPORTED
    code, _, _ = run(["thinness", "catalog:nosuchknot", "-p", "3", "-q", "2"])
    assert code == EXIT_DOMAIN


def test_report_writes_json_and_figure(tmp_path):
    out = tmp_path / "report"
    data = run_json("thinness", "catalog:trefoil_rh", "-p", "3", "-q", "2", "--report", str(out))
    files = sorted(p.name for p in out.iterdir())
    assert files == ["thinness-catalog_trefoil_rh.json", "thinness-catalog_trefoil_rh.png"]
    saved = json.loads((out / files[0]).read_text())
    assert saved["figure"] == files[1]
    assert saved["verdict"] == data["verdict"]
    assert (out / files[1]).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_caps():
    assert parse_caps("chordlen=8,wmult=9") == {"chordlen": 8, "wmult": 9}
    with pytest.raises(DomainError):
        parse_caps("depth=3")
    code, _, _ = run(["pattern", "3", "2", "--cfa", "--caps", "chordlen=x"])
    assert code == EXIT_DOMAIN
    code, _, err = run(["cable", "catalog:trefoil_rh", "-p", "3", "-q", "2", "--caps", "chordlen=2,wmult=2", "--no-cache"])
    assert code == EXIT_UNSUPPORTED


def test_module_json_roundtrip():
    M = pattern_data(3, 2).module
    again = module_from_json(json.loads(json.dumps(module_to_json(M))))
    assert again.operations == M.operations
    assert again.frontier == M.frontier and again.overflow == M.overflow


def test_text_output():
    code, out, _ = run(["catalog", "list", "--format", "text"])
    assert code == EXIT_OK and "trefoil_rh" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cablefloer.cli", "pattern", "3", "7"], capture_output=True, text=True
    )
    assert proc.returncode == EXIT_UNSUPPORTED
