"""File formats: provenance-tagged CSV, JSON reports and binary caches.

Binary layouts (all little-endian float64, counts as little-endian uint64):

* spectral cache, magic ``KINKSPEC-SPECv1\\0`` (16 bytes):
  n_k, n_x, k[n_k], delta[n_k], x[n_x], Re E (n_k*n_x row-major), Im E.
* kernel dump, magic ``KINKSPEC-KERv1\\0`` (15 bytes):
  rows, cols, is_complex, Re (row-major) [, Im].
* Fock kernel dump, magic ``KINKSPEC-FOKv1\\0`` (15 bytes):
  m_out, n_in, n_modes, Re entries (row-major over modes^(m+n)), Im entries.

CSV output is deterministic: fixed column order, fixed float format, ascending
sort keys.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

MAGIC_SPECTRAL = b"KINKSPEC-SPECv1\x00"
MAGIC_KERNEL = b"KINKSPEC-KERv1\x00"
MAGIC_FOCK = b"KINKSPEC-FOKv1\x00"

_FLOAT_FMT = "{:.12e}"


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _FLOAT_FMT.format(float(v))
    return str(v)


def write_csv(path, columns, rows) -> Path:
    """Write rows (iterables matching `columns`) with deterministic formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    lines = Path(path).read_text().strip().split("\n")
    cols = lines[0].split(",")
    data = [ln.split(",") for ln in lines[1:]]
    return cols, data


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _le64(arr) -> bytes:
    return np.asarray(arr, dtype="<f8").tobytes()


def _le_u64(*vals) -> bytes:
    return np.asarray(vals, dtype="<u8").tobytes()


def write_spectral_cache(path, k, delta, x, E) -> Path:
    """Binary spectral cache: momenta, phases, grid and eigenfunction samples."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    k = np.asarray(k, float)
    x = np.asarray(x, float)
    E = np.asarray(E, complex).reshape(k.size, x.size)
    with open(path, "wb") as fh:
        fh.write(MAGIC_SPECTRAL)
        fh.write(_le_u64(k.size, x.size))
        fh.write(_le64(k))
        fh.write(_le64(np.asarray(delta, float)))
        fh.write(_le64(x))
        fh.write(_le64(E.real))
        fh.write(_le64(E.imag))
    return path


def read_spectral_cache(path):
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC_SPECTRAL):
        raise ValueError("not a spectral cache file")
    off = len(MAGIC_SPECTRAL)
    nk, nx = np.frombuffer(raw, dtype="<u8", count=2, offset=off)
    off += 16
    def take(n):
        nonlocal off
        out = np.frombuffer(raw, dtype="<f8", count=n, offset=off).copy()
        off += 8 * n
        return out
    k = take(int(nk))
    delta = take(int(nk))
    x = take(int(nx))
    re = take(int(nk * nx)).reshape(int(nk), int(nx))
    im = take(int(nk * nx)).reshape(int(nk), int(nx))
    return k, delta, x, re + 1j * im


def write_kernel_binary(path, matrix) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mat = np.asarray(matrix)
    is_complex = np.iscomplexobj(mat)
    with open(path, "wb") as fh:
        fh.write(MAGIC_KERNEL)
        fh.write(_le_u64(mat.shape[0], mat.shape[1], 1 if is_complex else 0))
        fh.write(_le64(mat.real))
        if is_complex:
            fh.write(_le64(mat.imag))
    return path


def read_kernel_binary(path):
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC_KERNEL):
        raise ValueError("not a kernel dump")
    off = len(MAGIC_KERNEL)
    rows, cols, is_complex = np.frombuffer(raw, dtype="<u8", count=3, offset=off)
    off += 24
    n = int(rows * cols)
    re = np.frombuffer(raw, dtype="<f8", count=n, offset=off).reshape(int(rows), int(cols)).copy()
    off += 8 * n
    if is_complex:
        im = np.frombuffer(raw, dtype="<f8", count=n, offset=off).reshape(int(rows), int(cols))
        return re + 1j * im
    return re


def write_kernel_csv(path, matrix) -> Path:
    mat = np.asarray(matrix)
    rows = []
    for i in range(mat.shape[0]):
        for j in range(mat.shape[1]):
            v = complex(mat[i, j])
            rows.append((i, j, v.real, v.imag))
    return write_csv(path, ("i", "j", "re", "im"), rows)


def write_fock_kernel(path, kernel) -> Path:
    """Dense binary dump of a WickKernel array."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.asarray(kernel.array, dtype=complex)
    nm = arr.shape[0] if arr.ndim else 0
    with open(path, "wb") as fh:
        fh.write(MAGIC_FOCK)
        fh.write(_le_u64(kernel.m_out, kernel.n_in, nm))
        fh.write(_le64(arr.real.ravel()))
        fh.write(_le64(arr.imag.ravel()))
    return path


def read_fock_kernel(path):
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC_FOCK):
        raise ValueError("not a Fock kernel dump")
    off = len(MAGIC_FOCK)
    m_out, n_in, nm = (int(v) for v in np.frombuffer(raw, dtype="<u8", count=3, offset=off))
    off += 24
    count = nm ** (m_out + n_in) if (m_out + n_in) else 1
    re = np.frombuffer(raw, dtype="<f8", count=count, offset=off).copy()
    off += 8 * count
    im = np.frombuffer(raw, dtype="<f8", count=count, offset=off)
    arr = (re + 1j * im).reshape((nm,) * (m_out + n_in) if (m_out + n_in) else ())
    return m_out, n_in, arr


def write_state_json(path, state) -> Path:
    """Occupation-basis snapshot: occupation vector -> [re, im] amplitude."""
    amp = {}
    for occ, a in zip(state.space.basis, state.amplitudes):
        if a != 0:
            amp[",".join(map(str, occ))] = [float(np.real(a)), float(np.imag(a))]
    payload = {
        "n_max": state.space.n_max,
        "n_modes": state.space.modes.n_modes,
        "k_nodes": state.space.modes.k_nodes,
        "dropped_norm2": state.dropped_norm2,
        "amplitudes": amp,
    }
    return write_json(path, payload)
