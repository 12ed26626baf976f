"""Regenerate the fragment files shipped in src/kdrep/data/."""

import json
from pathlib import Path

import numpy as np

from kdrep.fileio import basis_to_json, matrix_to_json

OUT = Path(__file__).resolve().parents[1] / "src" / "kdrep" / "data"
S2 = 1 / np.sqrt(2)
KET = {
    "0": np.array([1, 0]), "1": np.array([0, 1]),
    "+": np.array([S2, S2]), "-": np.array([S2, -S2]),
    "y+": np.array([S2, 1j * S2]), "y-": np.array([S2, -1j * S2]),
}
ZX_FRAME = {
    "name": "zx", "system": "A",
    "basis_a": basis_to_json(np.eye(2)),
    "basis_a_prime": basis_to_json(np.array([[S2, S2], [S2, -S2]])),
}


def proj(v):
    return np.outer(v, np.conj(v))


def doc(**parts):
    return {"schema_version": 1, "systems": [{"name": "A", "dim": 2}], "frames": [ZX_FRAME], **parts}


def classical_kraus(p):
    ops = []
    for j in range(p.shape[0]):
        for i in range(p.shape[1]):
            if p[j, i] > 0:
                k = np.zeros(p.shape)
                k[j, i] = np.sqrt(p[j, i])
                ops.append(matrix_to_json(k))
    return ops


files = {
    "qubit_zx": doc(
        states=[
            {"name": "state0", "matrix": matrix_to_json(proj(KET["0"]))},
            {"name": "state1", "matrix": matrix_to_json(np.eye(2) / 2)},
        ],
        measurements=[
            {"name": "z", "effects": [matrix_to_json(proj(KET["0"])), matrix_to_json(proj(KET["1"]))]},
            {"name": "x", "effects": [matrix_to_json(proj(KET["+"])), matrix_to_json(proj(KET["-"]))]},
        ],
        channels=[{"name": "hadamard", "kraus": [matrix_to_json(np.array([[S2, S2], [S2, -S2]]))]}],
    ),
    "ypsilon": doc(states=[{"name": "y_plus", "matrix": matrix_to_json(proj(KET["y+"]))}]),
    "classical": doc(
        states=[
            {"name": "p30", "matrix": matrix_to_json(np.diag([0.3, 0.7]))},
            {"name": "zero", "matrix": matrix_to_json(np.diag([1.0, 0.0]))},
        ],
        measurements=[
            {"name": "z", "effects": [matrix_to_json(np.diag([1.0, 0.0])), matrix_to_json(np.diag([0.0, 1.0]))]},
            {"name": "noisy_z", "effects": [matrix_to_json(np.diag([0.9, 0.2])), matrix_to_json(np.diag([0.1, 0.8]))]},
        ],
        channels=[
            {"name": "flip", "kraus": classical_kraus(np.array([[0.8, 0.3], [0.2, 0.7]]))},
        ],
        instruments=[{
            "name": "z_instrument",
            "branches": [
                {"name": "yes", "kraus": classical_kraus(np.array([[0.6, 0.0], [0.0, 0.1]]))},
                {"name": "no", "kraus": classical_kraus(np.array([[0.4, 0.0], [0.0, 0.9]]))},
            ],
        }],
    ),
    "pauli": doc(
        states=[{"name": f"s{k}", "matrix": matrix_to_json(proj(KET[k]))} for k in ("0", "1", "+", "-", "y+", "y-")],
        measurements=[
            {"name": n, "effects": [matrix_to_json(proj(KET[a])), matrix_to_json(proj(KET[b]))]}
            for n, a, b in (("z", "0", "1"), ("x", "+", "-"), ("y", "y+", "y-"))
        ],
    ),
}

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, d in files.items():
        (OUT / f"{name}.json").write_text(json.dumps(d, indent=1) + "\n")
        print("wrote", OUT / f"{name}.json")
