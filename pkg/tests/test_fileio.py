import json

import numpy as np
import pytest

from kdrep.fileio import (
    ParseError,
    dump_json,
    entries_csv,
    fmt_float,
    load_fragment,
    load_frames,
    pair_to_json,
    parse_complex,
    parse_matrix,
    read_document,
    select_frames,
)
from kdrep.frame import BasisPair
from kdrep.qops import haar_unitary, sample
from kdrep.suites import random_frame
from kdrep.verify import Fragment, Member, represent_fragment


def test_parse_complex():
    assert parse_complex([0.5, -1]) == 0.5 - 1j
    assert parse_complex(2) == 2
    for bad in ([1, 2, 3], "1+2j", True, [1, None]):
        with pytest.raises(ParseError):
            parse_complex(bad)


def test_parse_matrix_shapes():
    np.testing.assert_array_equal(parse_matrix([[1, [0, 1]], [[0, -1], 1]]), [[1, 1j], [-1j, 1]])
    with pytest.raises(ParseError):
        parse_matrix([[1, 0], [0]])
    with pytest.raises(ParseError):
        parse_matrix([])


def test_fmt_float():
    assert fmt_float(0.49999999999999994) == "0.5"
    assert fmt_float(-0.0) == "0.0"
    assert fmt_float(-1e-17) == "-1e-17"
    assert fmt_float(0.125) == "0.125"


def test_frame_serialisation_is_byte_stable(rng):
    pair = BasisPair.from_bases(haar_unitary(3, rng), haar_unitary(3, rng))
    text = dump_json({"frames": [pair_to_json("f", "A", pair)]})
    (_, _, again), = load_frames(json.loads(text))
    assert dump_json({"frames": [pair_to_json("f", "A", again)]}) == text
    np.testing.assert_array_equal(again.basis_a, pair.basis_a)


def test_rephased_input_serialises_identically(rng):
    u, v = haar_unitary(2, rng), haar_unitary(2, rng)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
    a = pair_to_json("f", "A", BasisPair.from_bases(u, v))
    b = pair_to_json("f", "A", BasisPair.from_bases(u * phases, v * phases[::-1]))
    np.testing.assert_allclose(np.array(a["basis_a"]), np.array(b["basis_a"]), atol=1e-14)
    np.testing.assert_allclose(np.array(a["basis_a_prime"]), np.array(b["basis_a_prime"]), atol=1e-14)


def test_frame_selection_priority(rng):
    doc = read_document("bundled:qubit_zx")
    zx = select_frames(doc)[0]
    np.testing.assert_allclose(zx.basis_pair.basis_a, np.eye(2))
    other = BasisPair.from_bases(haar_unitary(2, rng), haar_unitary(2, rng))
    extra = [("mine", "A", other)]
    np.testing.assert_allclose(select_frames(doc, extra=extra)[0].basis_pair.basis_a, other.basis_a)
    chosen = select_frames(doc, selectors=["zx"], extra=extra)[0]
    np.testing.assert_allclose(chosen.basis_pair.basis_a, np.eye(2))


def test_bundled_fragments_load():
    frag = load_fragment(read_document("bundled:classical"))
    assert [m.name for m in frag.members()] == ["p30", "zero", "z", "noisy_z", "flip", "z_instrument"]
    with pytest.raises(ParseError):
        read_document("bundled:missing")


def test_entries_csv_composite_labels(rng):
    frag = Fragment.build(
        (2, 2),
        states=[Member("ab", sample("random_density", 4, rng), (0, 1))],
        channels=[Member("c", sample("random_channel", 2, rng), (0,), (1,))],
    )
    reps = represent_fragment(frag, [random_frame(2, rng), random_frame(2, rng)])
    states = entries_csv(reps, ("state",)).splitlines()
    assert len(states) == 1 + 16
    assert states[1].startswith("ab,0:0,0:0,")
    assert states[2].startswith("ab,0:0,0:1,")
    assert states[5].startswith("ab,0:0,1:0,")
    channels = entries_csv(reps, ("channel",)).splitlines()
    assert channels[0] == "object,i,i_prime,j,j_prime,re,im"
    # input pair first, output pair varies fastest
    assert channels[1].startswith("c,0,0,0,0,") and channels[2].startswith("c,0,0,0,1,")
