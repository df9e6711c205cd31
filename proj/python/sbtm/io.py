"""Readers for run artifacts (the inputs of the plotting scripts). Pure numpy."""
import struct

import numpy as np

DIAGNOSTICS_COLUMNS = (
    "t", "loss", "kl", "fisher", "dissipation", "identity_lhs", "identity_rhs", "l2_error", "cosine_sim",
)
_MAGIC = b"SBTMSNAP"


def read_table(path):
    """Header-row CSV of numbers ("nan" allowed) -> dict of float arrays."""
    with open(path) as f:
        header = f.readline().strip().split(",")
    data = np.genfromtxt(path, delimiter=",", skip_header=1, ndmin=2)
    return {name: data[:, k] for k, name in enumerate(header)}


def read_diagnostics(path):
    table = read_table(path)
    missing = [c for c in DIAGNOSTICS_COLUMNS if c not in table]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    return table


def read_snapshots_csv(path):
    """step,t,x1..xd rows -> list of (step, t, positions[n, d])."""
    table = read_table(path)
    dims = sorted((c for c in table if c.startswith("x")), key=lambda c: int(c[1:]))
    steps = table["step"].astype(int)
    out = []
    for step in dict.fromkeys(steps):
        rows = steps == step
        out.append((int(step), float(table["t"][rows][0]), np.column_stack([table[c][rows] for c in dims])))
    return out


def read_snapshots_bin(path):
    """Binary snapshot stream -> list of (step, t, positions[n, d])."""
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:8] != _MAGIC:
        raise ValueError(f"{path}: not a snapshot file")
    version, _ = struct.unpack_from("<II", blob, 8)
    if version != 1:
        raise ValueError(f"{path}: unsupported version {version}")
    pos, out = 16, []
    while pos < len(blob):
        step, t, n, d = struct.unpack_from("<qdQQ", blob, pos)
        pos += 32
        count = n * d
        if pos + 8 * count > len(blob):
            raise ValueError(f"{path}: truncated")
        x = np.frombuffer(blob, dtype="<f8", count=count, offset=pos).reshape(n, d)
        pos += 8 * count
        out.append((step, t, x.copy()))
    return out
