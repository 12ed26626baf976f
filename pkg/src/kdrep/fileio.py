"""JSON fragment files and CSV/JSON report writers.

Fragment file layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "systems": [{"name": "A", "dim": 2}],
      "frames": [{"name": "zx", "system": "A",
                  "basis_a": [vec, ...], "basis_a_prime": [vec, ...]}],
      "states": [{"name": "state0", "systems": ["A"], "matrix": M}],
      "measurements": [{"name": "z", "systems": ["A"], "effects": [M, ...]}],
      "channels": [{"name": "h", "input": ["A"], "output": ["A"],
                    "kraus": [M, ...], "trace_class": "trace-preserving"}],
      "instruments": [{"name": "i", "input": ["A"], "output": ["A"],
                       "branches": [{"name": "yes", "kraus": [M, ...]}, ...]}]
    }

Complex scalars are ``[re, im]``; matrices are row-major nested lists;
basis vectors are listed one per entry. ``systems``/``input``/``output``
default to every system in order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from importlib import resources
from pathlib import Path

import numpy as np

from .config import Config, default_config
from .errors import KDError, ValidationError
from .frame import BasisPair, KDFrame, build_frame
from .qops import TRACE_DECREASING, TRACE_PRESERVING, DensityOperator, KrausChannel, POVM
from .verify import Fragment, Instrument, Member, RepresentedObject

SCHEMA_VERSION = 1
BUNDLED_PREFIX = "bundled:"


class ParseError(KDError, ValueError):
    """The input file is not valid JSON or does not follow the schema."""


# --- scalars and matrices --------------------------------------------------

def parse_complex(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(_is_number(v) for v in x):
        return complex(float(x[0]), float(x[1]))
    if _is_number(x):
        return complex(float(x), 0.0)
    raise ParseError(f"expected a complex scalar [re, im], got {x!r}")


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def parse_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("a matrix must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError("matrix rows have unequal lengths")
    return np.array([[parse_complex(v) for v in r] for r in rows], dtype=np.complex128)


def fmt_float(x: float) -> str:
    """Shortest repr after rounding to 15 significant digits; no negative zero."""
    v = float(f"{float(x):.15g}")
    if v == 0.0:
        v = 0.0
    return repr(v)


def _clean(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0.0 else x


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [_clean(z.real), _clean(z.imag)]


def matrix_to_json(m: np.ndarray) -> list:
    return [[complex_to_json(v) for v in row] for row in np.asarray(m)]


def basis_to_json(b: np.ndarray) -> list:
    """Columns of ``b`` as a list of vectors."""
    return [[complex_to_json(v) for v in b[:, k]] for k in range(b.shape[1])]


def pair_to_json(name: str, system: str, pair: BasisPair) -> dict:
    return {"name": name, "system": system,
            "basis_a": basis_to_json(pair.basis_a), "basis_a_prime": basis_to_json(pair.basis_a_prime)}


def to_jsonable(x):
    """Recursively convert numpy/complex values into JSON-friendly ones."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return complex_to_json(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _clean(x) if math.isfinite(x) else None
    return x


# --- loading ---------------------------------------------------------------

def read_document(source: str | os.PathLike) -> dict:
    """Read a fragment JSON document from a path or ``bundled:NAME``."""
    src = str(source)
    try:
        if src.startswith(BUNDLED_PREFIX):
            name = src[len(BUNDLED_PREFIX):]
            if not name.endswith(".json"):
                name += ".json"
            text = resources.files("kdrep").joinpath("data", name).read_text()
        else:
            text = Path(src).read_text()
    except (OSError, FileNotFoundError) as exc:
        raise ParseError(f"cannot read {src}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{src}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{src}: top level must be an object")
    return doc


def bundled_names() -> list[str]:
    root = resources.files("kdrep").joinpath("data")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _systems(doc: dict) -> tuple[list[str], list[int]]:
    systems = doc.get("systems")
    if not isinstance(systems, list) or not systems:
        raise ParseError("'systems' must be a non-empty list")
    names, dims = [], []
    for s in systems:
        try:
            names.append(str(s["name"]))
            dims.append(int(s["dim"]))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"bad system entry {s!r}") from None
    if len(set(names)) != len(names):
        raise ParseError("duplicate system names")
    return names, dims


def _resolve(names: list[str], refs, owner: str) -> tuple[int, ...]:
    if refs is None:
        return tuple(range(len(names)))
    if not isinstance(refs, list):
        raise ParseError(f"{owner}: system references must be a list of names")
    out = []
    for r in refs:
        if r not in names:
            raise ValidationError(f"{owner}: unknown system {r!r}")
        out.append(names.index(r))
    return tuple(out)


def _field(entry: dict, key: str, owner: str):
    if not isinstance(entry, dict) or key not in entry:
        raise ParseError(f"{owner}: missing field {key!r}")
    return entry[key]


def load_fragment(doc: dict, config: Config | None = None) -> Fragment:
    """Build a validated Fragment from a parsed document.

    Raises:
        ParseError: schema violations.
        ValidationError: objects that parse but are not valid quantum objects.
    """
    config = config or default_config()
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")
    names, dims = _systems(doc)
    for key in ("states", "measurements", "channels", "instruments"):
        if not isinstance(doc.get(key, []), list):
            raise ParseError(f"'{key}' must be a list")

    states = []
    for n, e in enumerate(doc.get("states", [])):
        name = str(e.get("name", f"state{n}")) if isinstance(e, dict) else f"state{n}"
        m = parse_matrix(_field(e, "matrix", name))
        states.append(Member(name, DensityOperator.from_matrix(m, config), _resolve(names, e.get("systems"), name)))
    povms = []
    for n, e in enumerate(doc.get("measurements", [])):
        name = str(e.get("name", f"povm{n}")) if isinstance(e, dict) else f"povm{n}"
        effects = _field(e, "effects", name)
        if not isinstance(effects, list):
            raise ParseError(f"{name}: 'effects' must be a list")
        povms.append(Member(name, POVM.from_effects([parse_matrix(x) for x in effects], config),
                            _resolve(names, e.get("systems"), name)))
    channels = []
    for n, e in enumerate(doc.get("channels", [])):
        name = str(e.get("name", f"channel{n}")) if isinstance(e, dict) else f"channel{n}"
        kraus = _field(e, "kraus", name)
        if not isinstance(kraus, list):
            raise ParseError(f"{name}: 'kraus' must be a list")
        tc = e.get("trace_class", TRACE_PRESERVING)
        try:
            ch = KrausChannel.from_kraus([parse_matrix(k) for k in kraus], tc, config)
        except ValidationError as exc:
            raise ValidationError(f"{name}: {exc}") from None
        channels.append(Member(name, ch, _resolve(names, e.get("input"), name),
                               _resolve(names, e.get("output"), name)))
    instruments = []
    for n, e in enumerate(doc.get("instruments", [])):
        name = str(e.get("name", f"instrument{n}")) if isinstance(e, dict) else f"instrument{n}"
        branches = _field(e, "branches", name)
        if not isinstance(branches, list) or not branches:
            raise ParseError(f"{name}: 'branches' must be a non-empty list")
        chans, bnames = [], []
        for b, br in enumerate(branches):
            bname = str(br.get("name", f"branch{b}")) if isinstance(br, dict) else f"branch{b}"
            kraus = _field(br, "kraus", f"{name}[{bname}]")
            chans.append(KrausChannel.from_kraus([parse_matrix(k) for k in kraus], TRACE_DECREASING, config))
            bnames.append(bname)
        instruments.append(Member(name, Instrument(tuple(chans), tuple(bnames)),
                                  _resolve(names, e.get("input"), name), _resolve(names, e.get("output"), name)))
    frag = Fragment(tuple(dims), tuple(states), tuple(povms), tuple(channels), tuple(instruments), tuple(names))
    frag.validate(config)
    return frag


def load_frames(doc: dict, config: Config | None = None) -> list[tuple[str, str, BasisPair]]:
    """``(frame name, system name, BasisPair)`` for each entry of ``frames``."""
    config = config or default_config()
    raw = doc.get("frames", [])
    if not isinstance(raw, list):
        raise ParseError("'frames' must be a list")
    out = []
    for n, e in enumerate(raw):
        name = str(_field(e, "name", f"frame{n}"))
        system = str(_field(e, "system", name))
        cols = []
        for key in ("basis_a", "basis_a_prime"):
            vecs = _field(e, key, name)
            if not isinstance(vecs, list) or not vecs:
                raise ParseError(f"{name}: '{key}' must be a list of vectors")
            cols.append(parse_matrix(vecs).T)
        out.append((name, system, BasisPair.from_bases(cols[0], cols[1], config)))
    return out


def select_frames(doc: dict, selectors=(), extra=(), config: Config | None = None) -> list[KDFrame]:
    """One frame per system of ``doc``.

    For each system the first of these wins: a frame named in ``selectors``,
    any frame in ``extra`` (e.g. from ``--frames FILE``), the first frame the
    document lists, the (computational, Fourier) pair.
    """
    config = config or default_config()
    names, dims = _systems(doc)
    listed = list(extra) + load_frames(doc, config)
    known = {fname for fname, _, _ in listed}
    for s in selectors:
        if s not in known:
            raise ValidationError(f"no frame named {s!r}")
    frames = []
    for sname, d in zip(names, dims):
        chosen = None
        for fname, system, pair in listed:
            if system == sname and fname in selectors:
                chosen = pair
                break
        if chosen is None:
            chosen = next((p for _, system, p in listed if system == sname), None)
        if chosen is None:
            chosen = BasisPair.computational_fourier(d, config)
        if chosen.dim != d:
            raise ValidationError(f"frame for system {sname!r} has dim {chosen.dim}, expected {d}")
        frames.append(build_frame(chosen, config))
    return frames


# --- writing ---------------------------------------------------------------

VECTOR_HEADER = ["object", "i", "i_prime", "re", "im"]
CHANNEL_HEADER = ["object", "i", "i_prime", "j", "j_prime", "re", "im"]


def _split_label(frame: KDFrame, k: int) -> tuple[str, str]:
    i, ip = frame.index_pairs[k]
    return ":".join(map(str, i)), ":".join(map(str, ip))


def entries_csv(reps: list[RepresentedObject], kinds: tuple[str, ...]) -> str:
    """CSV text for represented objects of the given kinds.

    Vector rows are ``object,i,i_prime,re,im``; channel rows list the input
    pair then the output pair. Composite indices join per-system values
    with ``:``.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    is_channel = kinds[0] in ("channel", "branch")
    w.writerow(CHANNEL_HEADER if is_channel else VECTOR_HEADER)
    for r in reps:
        if r.kind not in kinds:
            continue
        if r.entries.ndim == 1:
            for k, v in enumerate(r.entries):
                w.writerow([r.name, *_split_label(r.frame_in, k), fmt_float(v.real), fmt_float(v.imag)])
        else:
            for k in range(r.entries.shape[1]):
                ik = _split_label(r.frame_in, k)
                for m in range(r.entries.shape[0]):
                    v = r.entries[m, k]
                    w.writerow([r.name, *ik, *_split_label(r.frame_out, m), fmt_float(v.real), fmt_float(v.imag)])
    return buf.getvalue()


def rows_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_outputs(out_dir: str | os.PathLike, files: dict[str, str]) -> None:
    """Write every file only after all contents are ready."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        tmp = out / (name + ".tmp")
        tmp.write_text(text)
        tmp.replace(out / name)


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"
