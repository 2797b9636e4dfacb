import numpy as np
import pytest

from kinkspec.cli import main
from kinkspec.config import ConfigError, RunConfig
from kinkspec.fock_sim import FockSpace, WickKernel, modeset_from_gl
from kinkspec.io import (
    MAGIC_FOCK,
    MAGIC_KERNEL,
    MAGIC_SPECTRAL,
    read_fock_kernel,
    read_kernel_binary,
    read_spectral_cache,
    write_csv,
    write_fock_kernel,
    write_kernel_binary,
    write_spectral_cache,
    write_state_json,
)
from kinkspec.params import ModelParams


def test_magic_headers_exact():
    assert MAGIC_SPECTRAL == b"KINKSPEC-SPECv1\x00" and len(MAGIC_SPECTRAL) == 16
    assert MAGIC_KERNEL == b"KINKSPEC-KERv1\x00"
    assert MAGIC_FOCK == b"KINKSPEC-FOKv1\x00"


def test_spectral_cache_roundtrip(tmp_path):
    k = np.array([0.5, 1.0, 2.0])
    delta = np.array([-0.3, -0.8, -1.5])
    x = np.linspace(-2, 2, 17)
    E = np.exp(1j * np.outer(k, x))
    path = write_spectral_cache(tmp_path / "cache.bin", k, delta, x, E)
    k2, d2, x2, E2 = read_spectral_cache(path)
    assert np.array_equal(k, k2) and np.array_equal(delta, d2) and np.array_equal(x, x2)
    assert np.array_equal(E, E2)
    # little-endian layout pinned: first momentum value right after header+counts
    raw = path.read_bytes()
    assert np.frombuffer(raw, "<f8", count=1, offset=16 + 16)[0] == 0.5


def test_kernel_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    real = rng.normal(size=(7, 5))
    assert np.array_equal(read_kernel_binary(write_kernel_binary(tmp_path / "r.bin", real)), real)
    cplx = real + 1j * rng.normal(size=(7, 5))
    assert np.array_equal(read_kernel_binary(write_kernel_binary(tmp_path / "c.bin", cplx)), cplx)


def test_fock_kernel_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    wk = WickKernel(2, 1, rng.normal(size=(4, 4, 4)) + 1j * rng.normal(size=(4, 4, 4)))
    m_out, n_in, arr = read_fock_kernel(write_fock_kernel(tmp_path / "w.bin", wk))
    assert (m_out, n_in) == (2, 1)
    assert np.allclose(arr, wk.array)


def test_state_json(tmp_path):
    p = ModelParams()
    space = FockSpace(modeset_from_gl(p, M=2, k_max=2.0), 3)
    st = space.vacuum()
    path = write_state_json(tmp_path / "state.json", st)
    import json

    payload = json.loads(path.read_text())
    assert payload["n_max"] == 3
    assert payload["amplitudes"]["0,0,0"] == [1.0, 0.0]


def test_csv_deterministic(tmp_path):
    rows = [(1, 0.1234567890123456, "a"), (2, 7.0, "b")]
    p1 = write_csv(tmp_path / "a.csv", ("i", "v", "s"), rows)
    p2 = write_csv(tmp_path / "b.csv", ("i", "v", "s"), rows)
    assert p1.read_bytes() == p2.read_bytes()


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(m=1.5, g=0.4, grid_n=2048, kappa_list=(100.0, 200.0, 400.0),
                    theta=0.3, fock_modes=3, fock_n_max=6, formats=("json",), seed=77)
    path = cfg.to_file(tmp_path / "run.ini")
    back = RunConfig.from_file(path)
    assert back == cfg


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(m=-1.0)
    with pytest.raises(ConfigError):
        RunConfig(kappa_list=(0.5,))
    with pytest.raises(ConfigError):
        RunConfig(formats=("xml",))
    with pytest.raises(ConfigError):
        RunConfig(mollifier="gaussian")
    with pytest.raises(ConfigError):
        RunConfig.from_file("/definitely/not/here.ini")


def test_cli_wavepacket_and_exit_codes(tmp_path):
    rc = main(["wavepacket", "--out", str(tmp_path / "o")])
    assert rc == 0
    assert (tmp_path / "o" / "wavepacket.csv").exists()
    assert (tmp_path / "o" / "wavepacket_report.json").exists()


def test_cli_config_error_exit_code(tmp_path):
    rc = main(["wavepacket", "--config", str(tmp_path / "missing.ini")])
    assert rc == 2


def test_cli_flag_overrides(tmp_path):
    cfg = RunConfig()
    path = cfg.to_file(tmp_path / "run.ini")
    out = tmp_path / "out"
    rc = main(["transform", "--config", str(path), "--out", str(out), "--format", "json"])
    assert rc == 0
    assert (out / "transform_report.json").exists()
    assert not (out / "transform.csv").exists()


def test_cli_transform_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["transform", "--out", str(a), "--seed", "5"]) == 0
    assert main(["transform", "--out", str(b), "--seed", "5"]) == 0
    assert (a / "transform.csv").read_bytes() == (b / "transform.csv").read_bytes()


def test_cli_mass_shift_kappa_list(tmp_path):
    out = tmp_path / "ms"
    rc = main(["mass-shift", "--out", str(out), "--kappa-list", "120,240,480,960"])
    assert rc == 0
    text = (out / "mass_shift.csv").read_text().splitlines()
    assert text[0].startswith("kappa,discrete,j0,j1,j2,j3,c0,total_half,extrapolated")
    assert len(text) == 5
    first = float(text[1].split(",")[0])
    assert first == 120.0
