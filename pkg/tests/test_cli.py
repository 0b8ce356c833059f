import json
from pathlib import Path

import numpy as np
import pytest

from niph.cli import EXIT_BUDGET, EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from niph.geometry import load_cloud_csv, save_cloud_csv

DATA = Path(__file__).parent / "data"


def test_generate_grid(tmp_path):
    out = tmp_path / "grid.csv"
    code = main(["generate", "--shape", "grid", "--n1", "5", "--n2", "4",
                 "--d1", "1", "--d2", "2", "--phi", "0.3", "-o", str(out)])
    assert code == EXIT_OK
    X = load_cloud_csv(out)
    assert X.shape == (20, 2)
    sidecar = json.loads((tmp_path / "grid.json").read_text())
    assert sidecar["kind"] == "grid" and sidecar["n1"] == 5


def test_generate_shapes(tmp_path):
    out = tmp_path / "field.csv"
    code = main(["generate", "--shape", "rectangle", "--count", "5",
                 "--points", "30", "--region", "60", "--s", "2",
                 "--seed", "3", "-o", str(out)])
    assert code == EXIT_OK
    assert load_cloud_csv(out).shape == (150, 2)


def test_ph_dim0(tmp_path):
    cloud = tmp_path / "c.csv"
    save_cloud_csv(cloud, np.array([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]))
    out = tmp_path / "pd.json"
    code = main(["ph", str(cloud), "--dim", "0", "-o", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    deaths = sorted(p["death"] for p in doc if p["death"] != "inf")
    assert deaths == pytest.approx([1.0, 2.0])


def test_ph_dim1_requires_rmax(tmp_path, capsys):
    cloud = tmp_path / "c.csv"
    save_cloud_csv(cloud, np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert main(["ph", str(cloud), "--dim", "1"]) == EXIT_DATA
    assert "rmax" in capsys.readouterr().err


def test_ph_probe_flags(tmp_path):
    cloud = tmp_path / "c.csv"
    save_cloud_csv(cloud, np.array([[0.0, 0.0], [1.0, 0.0]]))
    out = tmp_path / "pd.json"
    code = main(["ph", str(cloud), "--dim", "0", "--probe-angle", "0",
                 "--probe-scale", "3", "-o", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc[0]["death"] == pytest.approx(3.0)
    # one flag without the other is a data error
    assert main(["ph", str(cloud), "--dim", "0", "--probe-angle", "0"]) == EXIT_DATA


def test_niph_fit_plot_roundtrip(tmp_path):
    field = tmp_path / "field.csv"
    assert main(["generate", "--shape", "rectangle", "--count", "6",
                 "--points", "40", "--region", "70", "--s", "2",
                 "--phi", "0.5", "--size-min", "0.5", "--size-max", "1.5",
                 "-o", str(field)]) == EXIT_OK
    report = tmp_path / "report.json"
    curves = tmp_path / "curves.csv"
    code = main(["niph", str(field), "--dim", "1", "--directions", "4",
                 "--weighting", "persistence-diff", "--rmax", "2.2",
                 "--curves", str(curves), "-o", str(report)])
    assert code == EXIT_OK
    doc = json.loads(report.read_text())
    assert len(doc["probes"]) == 4
    assert curves.exists()

    svg = tmp_path / "curves.svg"
    assert main(["plot", str(curves), "-o", str(svg)]) == EXIT_OK
    assert svg.read_text().lstrip().startswith("<?xml")

    peaks = tmp_path / "peaks.csv"
    with open(peaks, "w") as fh:
        fh.write("# psi,S,peak\n")
        for p in doc["probes"]:
            fh.write(f"{p['psi_rad']},{p['alpha']},{p['peak']}\n")
    fit_out = tmp_path / "fit.json"
    assert main(["fit", str(peaks), "--dim", "1", "-o", str(fit_out)]) == EXIT_OK
    fit_doc = json.loads(fit_out.read_text())
    assert abs(fit_doc["phi_rad"] - doc["fit"]["phi_rad"]) < 0.2


def test_pca_command(tmp_path):
    cloud = tmp_path / "c.csv"
    t = np.linspace(-1, 1, 30)
    save_cloud_csv(cloud, np.column_stack([t, 0.01 * np.sin(9 * t)]))
    out = tmp_path / "pca.json"
    assert main(["pca", str(cloud), "-o", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert abs(doc["angle_deg"]) < 5.0


def test_sample_network_command(tmp_path):
    out = tmp_path / "pts.csv"
    code = main(["sample-network", str(DATA / "grid_city.geojson"),
                 "--count", "500", "--seed", "1", "-o", str(out)])
    assert code == EXIT_OK
    assert load_cloud_csv(out).shape == (500, 2)
    code = main(["sample-network", str(DATA / "grid_city.geojson"),
                 "--road-types", "secondary", "--count", "100", "-o", str(out)])
    assert code == EXIT_OK


def test_exit_codes(tmp_path):
    assert main(["ph", str(tmp_path / "missing.csv")]) == EXIT_DATA
    assert main(["no-such-command"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    big = tmp_path / "big.csv"
    rng = np.random.default_rng(0)
    save_cloud_csv(big, rng.normal(size=(20_001, 2)))
    assert main(["ph", str(big), "--dim", "0"]) == EXIT_BUDGET


def test_config_file(tmp_path):
    cfg = tmp_path / "niph.cfg"
    cfg.write_text("shape = grid\nn1 = 3\nn2 = 3\nd2 = 4.0  # comment\n")
    out = tmp_path / "g.csv"
    assert main(["--config", str(cfg), "generate", "--n2", "5",
                 "-o", str(out)]) == EXIT_OK
    X = load_cloud_csv(out)
    # n1 from config, n2 from the explicit flag
    assert X.shape == (15, 2)
    assert X[:, 1].max() == pytest.approx(16.0)
    bad = tmp_path / "bad.cfg"
    bad.write_text("unknown_key = 1\n")
    assert main(["--config", str(bad), "generate", "-o", str(out)]) == EXIT_DATA
