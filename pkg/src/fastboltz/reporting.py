"""CSV emission and run metadata files.

Column schemas:

  moments.csv   t, rho, u_1..u_d, T, upper-triangle P_ij (row-major),
                M4, M5, M6, M8, M4_norm..M8_norm (raw and M_k/M_k(0)), H,
                neg_nodes
  errors.csv    t, E1, E2, Einf
  entropy.csv   t, H_l, H_g, hydro_part, neg_node_count
  cells.csv     t, x, rho, u_1..u_d, T
  dsmc_moments.csv  t, observable, mean, stderr, n_runs, n_particles

run_meta is a plain key = value dump of the fully resolved configuration.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_run_meta(path, entries: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"fastboltz_version = {__version__}\n")
        for key, val in entries.items():
            fh.write(f"{key} = {_fmt(val)}\n")


def moments_header(d: int) -> list:
    cols = ["t", "rho"] + [f"u_{i+1}" for i in range(d)] + ["T"]
    cols += [f"P_{i+1}{j+1}" for i in range(d) for j in range(i, d)]
    cols += ["M4", "M5", "M6", "M8"]
    cols += ["M4_norm", "M5_norm", "M6_norm", "M8_norm"]
    cols += ["H", "neg_nodes"]
    return cols


def moments_row(t, mom, mom0) -> list:
    d = mom.u.size
    row = [t, mom.rho] + list(mom.u) + [mom.T]
    row += [mom.P[i, j] for i in range(d) for j in range(i, d)]
    row += [mom.radial[k] for k in (4, 5, 6, 8)]
    row += [mom.radial[k] / mom0.radial[k] if mom0.radial[k] != 0 else np.nan
            for k in (4, 5, 6, 8)]
    row += [mom.H, mom.neg_nodes]
    return row


def write_csv(path, header: list, rows: list):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) if isinstance(x, float) else x for x in row])


def read_entropy_csv(path):
    """Load t, H_l, H_g columns from an entropy.csv file."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None or "t" not in data.dtype.names:
        raise ValueError(f"{path} is not an entropy series")
    return data
