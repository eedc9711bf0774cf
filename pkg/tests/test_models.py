import numpy as np
import pytest

from nmqj.errors import UnsupportedModel
from nmqj.models import (
    build_jaynes_cummings,
    build_ladder,
    build_lambda,
    build_vee,
    master_rhs,
    with_constant_rates,
)

ALL_BUILDERS = {
    "jc": build_jaynes_cummings,
    "lambda": build_lambda,
    "vee": build_vee,
    "ladder": build_ladder,
}


def test_jc_defaults():
    m = build_jaynes_cummings()
    assert len(m.channels) == 1
    assert m.channels[0].rate.reservoir.coupling == 5.0
    assert m.channels[0].rate.detuning == 5.0
    assert abs(m.initial_state[0]) ** 2 == pytest.approx(9.0 / 13.0, abs=1e-15)
    # single lowering operator from the excited to the ground level
    assert np.array_equal(m.channels[0].jump_op, np.array([[0, 0], [1, 0]], dtype=complex))


def test_lambda_defaults():
    m = build_lambda()
    assert [ch.rate.detuning for ch in m.channels] == [-3.0, 5.0]
    assert m.channels[0].rate.reservoir.coupling == 2.0
    assert np.allclose(m.initial_state, np.array([4, 2, 1]) / np.sqrt(21), atol=1e-15)
    # both channels drain the shared excited level
    for ch in m.channels:
        assert np.count_nonzero(ch.jump_op[:, 0]) == 1
        assert np.count_nonzero(ch.jump_op) == 1


def test_vee_defaults():
    m = build_vee()
    assert np.allclose(
        np.abs(m.initial_state) ** 2, np.full(3, 1.0 / 3.0), atol=1e-15
    )
    assert [ch.rate.detuning for ch in m.channels] == [-3.0, 5.0]
    # both channels feed the shared ground level
    for ch in m.channels:
        assert np.count_nonzero(ch.jump_op[2, :]) == 1
        assert np.count_nonzero(ch.jump_op) == 1


def test_ladder_geometry():
    m = build_ladder("mixed_start")
    c1, c2 = (ch.jump_op for ch in m.channels)
    tgt1 = int(np.argwhere(c1)[0][0])
    src2 = int(np.argwhere(c2)[0][1])
    assert tgt1 == src2 == 1  # the cascade passes through the middle level


def test_ladder_starts():
    mixed = build_ladder("mixed_start")
    assert np.allclose(mixed.initial_state, np.array([4, 2, 1]) / np.sqrt(21), atol=1e-15)
    excited = build_ladder("excited_start")
    assert np.array_equal(excited.initial_state, np.array([1, 0, 0], dtype=complex))
    with pytest.raises(UnsupportedModel):
        build_ladder("sideways_start")


GROUND_LEVELS = {"jc": [1], "lambda": [1, 2], "vee": [2], "ladder": [2]}


@pytest.mark.parametrize("name", sorted(ALL_BUILDERS))
def test_channels_annihilate_ground_states(name):
    m = ALL_BUILDERS[name]()
    for lvl in GROUND_LEVELS[name]:
        ground = np.zeros(m.dim, dtype=complex)
        ground[lvl] = 1.0
        for ch in m.channels:
            assert np.linalg.norm(ch.jump_op @ ground) == 0.0


@pytest.mark.parametrize("name", sorted(ALL_BUILDERS))
def test_total_jump_weight_diagonal(name):
    m = ALL_BUILDERS[name]()
    total = sum(ch.jump_op.conj().T @ ch.jump_op for ch in m.channels)
    assert np.count_nonzero(total - np.diag(np.diag(total))) == 0


@pytest.mark.parametrize("name", sorted(ALL_BUILDERS))
def test_initial_state_normalized(name):
    m = ALL_BUILDERS[name]()
    assert np.linalg.norm(m.initial_state) == pytest.approx(1.0, abs=1e-12)


def test_initial_amplitudes_are_normalized_on_build():
    m = build_jaynes_cummings(initial_amplitudes=(6.0, 4.0))
    assert abs(m.initial_state[0]) ** 2 == pytest.approx(9.0 / 13.0, abs=1e-14)


def test_master_rhs_trace_free():
    rng = np.random.default_rng(1)
    for name, builder in ALL_BUILDERS.items():
        m = builder(lamb_shift_enabled=True) if name != "ladder" else builder(
            "mixed_start", lamb_shift_enabled=True
        )
        a = rng.normal(size=(m.dim, m.dim)) + 1j * rng.normal(size=(m.dim, m.dim))
        rho = a @ a.conj().T
        rho /= rho.trace()
        drho = master_rhs(m, rho, t=0.8)
        assert abs(drho.trace()) < 1e-12
        assert np.max(np.abs(drho - drho.conj().T)) < 1e-12


def test_with_constant_rates():
    m = with_constant_rates(build_lambda(), [0.5, 0.25])
    assert m.channels[0].rate.decay_rate(10.0) == 0.5
    assert m.channels[1].rate.decay_rate(10.0) == 0.25
    assert m.name == "lambda"
