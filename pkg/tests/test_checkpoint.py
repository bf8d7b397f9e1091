from pathlib import Path

import numpy as np
import pytest

from tripledeck import checkpoint as ckpt
from tripledeck import spectral as sp
from tripledeck.errors import CorruptCheckpointError
from tripledeck.norms import NormParams, composite_norms
from tripledeck.selftest import random_state

FIXTURE = Path(__file__).parent / "fixtures" / "smooth_16x64.tdk"
# regression values for the committed fixture at tau = 0.5, t = 0
FROZEN = {"X": 0.17183837873760105, "Y": 0.0378055813259105,
          "Z": 0.06908574282197541, "H": 0.08099820512316067}


def sample(rng):
    g = sp.Grid(16, 20.0, 32, 12.0)
    w, A = random_state(g, rng)
    return ckpt.Checkpoint(w, A, 0.125, 0.9, 1 / 64, 4.2, 2.5, 20.0, 12.0)


def test_round_trip_is_byte_identical(rng, tmp_path):
    ck = sample(rng)
    raw = ckpt.to_bytes(ck)
    back = ckpt.from_bytes(raw)
    assert ckpt.to_bytes(back) == raw
    assert np.array_equal(back.wbar, ck.wbar) and np.array_equal(back.A, ck.A)
    path = tmp_path / "a.tdk"
    ckpt.write(path, ck)
    assert ckpt.read(path).t == 0.125 and path.read_bytes() == raw


def test_header_layout(rng):
    raw = ckpt.to_bytes(sample(rng))
    assert raw[:8] == b"TDKSIM01"
    assert len(raw) == 8 + 16 + 56 + 16 * (16 * 32 + 16) + 4


@pytest.mark.parametrize("mutate", [
    lambda b: b[:-1],
    lambda b: b[:40],
    lambda b: b"XXXXXXXX" + b[8:],
    lambda b: b[:200] + bytes([b[200] ^ 0xFF]) + b[201:],
    lambda b: b + b"\0",
])
def test_corruption_detected(rng, mutate):
    raw = ckpt.to_bytes(sample(rng))
    with pytest.raises(CorruptCheckpointError):
        ckpt.from_bytes(mutate(raw))


def test_committed_fixture():
    ck = ckpt.read(FIXTURE)
    assert (ck.n_modes, ck.n_y, ck.L_x, ck.y_max) == (16, 64, 20.0, 12.0)
    g = sp.Grid(ck.n_modes, ck.L_x, ck.n_y, ck.y_max)
    norms = composite_norms(g, ck.wbar, ck.A, ck.t, NormParams(ck.tau, ck.r, ck.delta, ck.eps))
    for k, v in FROZEN.items():
        assert norms[k] == pytest.approx(v, rel=1e-12)
    assert sp.hermitian_defect(ck.wbar) == 0.0
