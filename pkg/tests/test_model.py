"""Model-layer tests: interference, utilities, uncertainty, scenario I/O."""
import json
import warnings

import numpy as np
import pytest

from riwfa import (
    ChannelRealization,
    DegenerateUncertaintyWarning,
    PowerConstraints,
    Scenario,
    UncertaintySpec,
    effective_interference,
    epsilon_from_uniform,
    load_bundled_scenario,
    load_scenario,
    normalized_interference,
    profile_feasible,
    random_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    uniform_profile,
    user_utility,
    zero_profile,
)


def single_user_channel(gain: float, noise: float, num_subchannels: int = 1):
    gains = np.full((1, 1, num_subchannels), gain)
    noise_arr = np.full((1, num_subchannels), noise)
    return ChannelRealization(gains=gains, noise=noise_arr)


def test_normalized_interference_single_user():
    channel = single_user_channel(gain=2.0, noise=0.5)
    s = normalized_interference(channel, np.zeros((1, 1)), 0)
    assert s.shape == (1,)
    assert s[0] == 0.25


def test_normalized_interference_zero_profile_is_noise_over_direct():
    sc = random_scenario(4, 6, direct_range=(0.05, 0.1), cross_range=(0.0, 0.01),
                         noise_range=(0.001, 0.01), seed=3)
    for i in range(4):
        s = normalized_interference(sc.channel, zero_profile(4, 6), i)
        expected = sc.channel.noise[i] / sc.channel.gains[i, i, :]
        assert np.array_equal(s, expected)


def test_normalized_interference_bundled_value():
    # noise 2.2 over direct gain 20.52 on the first sub-channel of user 1
    sc = load_bundled_scenario()
    s = normalized_interference(sc.channel, zero_profile(3, 6), 0)
    assert abs(s[0] - 2.2 / 20.52) < 1e-15
    assert abs(s[0] - 0.10721247563352827) < 1e-15


def test_normalized_interference_ignores_own_row():
    sc = random_scenario(3, 5, seed=11, noise_range=(0.001, 0.01))
    profile = uniform_profile(sc.constraints)
    base = normalized_interference(sc.channel, profile, 1)
    poked = profile.copy()
    poked[1] = 0.0
    assert np.array_equal(normalized_interference(sc.channel, poked, 1), base)


def test_normalized_interference_receiver_scale_invariance():
    # scaling everything receiver i hears (gains into i and its noise) by c
    # leaves s_i unchanged
    sc = random_scenario(3, 4, seed=21, noise_range=(0.001, 0.01))
    profile = uniform_profile(sc.constraints)
    base = normalized_interference(sc.channel, profile, 2)
    gains = sc.channel.gains.copy()
    noise = sc.channel.noise.copy()
    gains[:, 2, :] *= 7.5
    noise[2, :] *= 7.5
    scaled = ChannelRealization(gains=gains, noise=noise)
    assert np.allclose(normalized_interference(scaled, profile, 2), base,
                       rtol=1e-14, atol=0)


def test_normalized_interference_monotone_in_others_power_and_noise():
    sc = random_scenario(3, 4, seed=5, cross_range=(0.001, 0.01),
                         noise_range=(0.001, 0.01))
    profile = uniform_profile(sc.constraints)
    base = normalized_interference(sc.channel, profile, 0)
    hotter = profile.copy()
    hotter[1] = sc.constraints.mask[1]
    assert np.all(normalized_interference(sc.channel, hotter, 0) >= base)
    noisier = ChannelRealization(gains=sc.channel.gains,
                                 noise=sc.channel.noise * 2.0)
    assert np.all(normalized_interference(noisier, profile, 0) >= base)


def test_normalized_interference_input_errors():
    channel = single_user_channel(2.0, 0.5)
    with pytest.raises(ValueError):
        normalized_interference(channel, np.zeros((1, 1)), 1)
    with pytest.raises(ValueError):
        normalized_interference(channel, np.zeros((2, 1)), 0)


def test_user_utility_zero_power():
    assert user_utility(np.zeros(5), np.full(5, 0.3)) == 0.0


def test_user_utility_equal_power_and_interference():
    assert abs(user_utility(np.full(4, 0.2), np.full(4, 0.2)) - 4 * np.log(2)) < 1e-15


def test_user_utility_two_channel_value():
    got = user_utility(np.array([0.6, 0.4]), np.array([0.1, 0.3]))
    # ln 7 + ln(7/3), computed independently
    assert abs(got - 2.793208009442517) < 1e-15


def test_user_utility_rejects_bad_inputs():
    with pytest.raises(ValueError):
        user_utility(np.array([0.1]), np.array([0.0]))
    with pytest.raises(ValueError):
        user_utility(np.array([-0.1]), np.array([0.2]))
    with pytest.raises(ValueError):
        user_utility(np.array([0.1, 0.2]), np.array([0.2]))
    with pytest.raises(ValueError):
        user_utility(np.array([np.inf]), np.array([0.2]))


def test_effective_interference_nominal_identity():
    spec = UncertaintySpec.nominal(2, 3)
    s = np.array([0.1, 0.2, 0.3])
    assert np.array_equal(effective_interference(s, spec, 0), s)


def test_effective_interference_worstcase_scales():
    spec = UncertaintySpec.uniform(1, 3, 0.5)
    s = np.array([0.1, 0.2, 0.3])
    assert np.allclose(effective_interference(s, spec, 0), 1.5 * s, rtol=1e-15)


def test_effective_interference_probabilistic_endpoints():
    s = np.array([0.2, 0.4])
    top = UncertaintySpec.uniform(1, 2, 0.8, mode="probabilistic", delta0=1.0)
    assert np.array_equal(effective_interference(s, top, 0), 1.8 * s)
    mid = UncertaintySpec.uniform(1, 2, 0.8, mode="probabilistic", delta0=0.5)
    assert np.array_equal(effective_interference(s, mid, 0), s)


def test_effective_interference_clamps_degenerate_multiplier():
    # eps > 1 at delta0 = 0 drives the multiplier negative; the result must
    # clamp to a positive floor and warn
    spec = UncertaintySpec.uniform(1, 2, 1.5, mode="probabilistic", delta0=0.0)
    assert spec.is_degenerate()
    with pytest.warns(DegenerateUncertaintyWarning):
        out = effective_interference(np.array([0.2, 0.4]), spec, 0)
    assert np.all(out > 0)


def test_multiplier_identities_are_exact():
    eps = np.full((3, 4), 0.37)
    nominal = UncertaintySpec(eps=np.zeros((3, 4)), mode="nominal")
    half = UncertaintySpec(eps=eps, mode="probabilistic", delta0=0.5)
    full = UncertaintySpec(eps=eps, mode="probabilistic", delta0=1.0)
    worst = UncertaintySpec(eps=eps, mode="worstcase")
    assert np.array_equal(half.multipliers(), nominal.multipliers())
    assert np.array_equal(full.multipliers(), worst.multipliers())
    assert np.array_equal(half.effective_eps(), np.zeros((3, 4)))
    assert np.array_equal(full.effective_eps(), worst.effective_eps())


def test_uncertainty_spec_validation():
    with pytest.raises(ValueError):
        UncertaintySpec(eps=np.zeros((2, 2)), mode="pessimistic")
    with pytest.raises(ValueError):
        UncertaintySpec(eps=np.full((2, 2), -0.1), mode="worstcase")
    with pytest.raises(ValueError):
        UncertaintySpec(eps=np.zeros((2, 2)), mode="probabilistic")
    with pytest.raises(ValueError):
        UncertaintySpec(eps=np.zeros((2, 2)), mode="probabilistic", delta0=1.5)
    with pytest.raises(ValueError):
        UncertaintySpec(eps=np.zeros((2, 2)), mode="worstcase", delta0=0.5)
    with pytest.raises(ValueError):
        UncertaintySpec(eps=np.zeros(4), mode="nominal")


def test_epsilon_from_uniform():
    assert epsilon_from_uniform(0.7, 1.0) == 0.7
    assert epsilon_from_uniform(0.7, 0.0) == 0.0
    assert abs(epsilon_from_uniform(0.2, 0.9) - 0.18) < 1e-15
    with pytest.raises(ValueError):
        epsilon_from_uniform(-0.1, 0.5)
    with pytest.raises(ValueError):
        epsilon_from_uniform(0.1, 1.5)


def test_random_scenario_deterministic_by_seed():
    a = random_scenario(4, 8, seed=42)
    b = random_scenario(4, 8, seed=42)
    c = random_scenario(4, 8, seed=43)
    assert np.array_equal(a.channel.gains, b.channel.gains)
    assert np.array_equal(a.channel.noise, b.channel.noise)
    assert not np.array_equal(a.channel.gains, c.channel.gains)
    assert a.seed == 42


def test_random_scenario_respects_ranges():
    sc = random_scenario(6, 16, direct_range=(0.0, 0.1), cross_range=(0.0, 0.01),
                         noise_range=(0.0, 0.01), seed=7)
    direct = sc.channel.direct_gains()
    assert np.all(direct > 0) and np.all(direct <= 0.1)
    off = sc.channel.gains.copy()
    idx = np.arange(6)
    off[idx, idx, :] = 0.0
    assert np.all(off <= 0.01)
    assert np.all(sc.channel.noise <= 0.01)
    assert np.all(sc.constraints.p_max == 1.0)
    assert np.all(sc.constraints.mask == 1.0)


def test_random_scenario_single_user_and_mask_broadcast():
    sc = random_scenario(1, 3, seed=0, p_max=2.0, mask=0.9)
    assert sc.num_users == 1 and sc.num_subchannels == 3
    assert np.all(sc.constraints.mask == 0.9)
    with pytest.raises(ValueError):
        random_scenario(0, 3)
    with pytest.raises(ValueError):
        random_scenario(2, 2, direct_range=(0.2, 0.1))


def test_profile_helpers():
    constraints = PowerConstraints.uniform(2, 4, p_max=1.0, mask=0.4)
    even = uniform_profile(constraints)
    assert np.all(even == 0.25)
    tight = PowerConstraints.uniform(2, 4, p_max=1.0, mask=0.2)
    assert np.all(uniform_profile(tight) == 0.2)  # clipped by the mask
    assert profile_feasible(even, constraints)
    assert not profile_feasible(np.full((2, 4), 0.5), constraints)   # mask
    assert not profile_feasible(np.full((2, 4), -0.1), constraints)  # sign
    assert not profile_feasible(np.zeros((3, 4)), constraints)       # shape


def test_channel_validation():
    with pytest.raises(ValueError):
        ChannelRealization(gains=np.ones((2, 3, 4)), noise=np.ones((2, 4)))
    with pytest.raises(ValueError):
        ChannelRealization(gains=np.ones((2, 2, 4)), noise=np.ones((2, 3)))
    gains = np.ones((2, 2, 3))
    gains[0, 0, 1] = 0.0
    with pytest.raises(ValueError):
        ChannelRealization(gains=gains, noise=np.ones((2, 3)))


def test_scenario_shape_consistency():
    channel = ChannelRealization(gains=np.ones((2, 2, 3)), noise=np.ones((2, 3)))
    good = PowerConstraints.uniform(2, 3, 1.0)
    bad = PowerConstraints.uniform(2, 4, 1.0)
    spec = UncertaintySpec.nominal(2, 3)
    Scenario(channel=channel, constraints=good, uncertainty=spec)
    with pytest.raises(ValueError):
        Scenario(channel=channel, constraints=bad, uncertainty=spec)
    with pytest.raises(ValueError):
        Scenario(channel=channel, constraints=good,
                 uncertainty=UncertaintySpec.nominal(2, 4))


def test_scenario_roundtrip(tmp_path):
    sc = random_scenario(3, 5, seed=9,
                         uncertainty=UncertaintySpec.uniform(3, 5, 0.4,
                                                             mode="probabilistic",
                                                             delta0=0.8))
    path = tmp_path / "sc.json"
    save_scenario(sc, path)
    back = load_scenario(path)
    assert np.array_equal(back.channel.gains, sc.channel.gains)
    assert np.array_equal(back.channel.noise, sc.channel.noise)
    assert np.array_equal(back.constraints.mask, sc.constraints.mask)
    assert np.array_equal(back.uncertainty.eps, sc.uncertainty.eps)
    assert back.uncertainty.mode == "probabilistic"
    assert back.uncertainty.delta0 == 0.8
    assert back.seed == 9


def test_scenario_dict_errors_name_the_field():
    doc = scenario_to_dict(random_scenario(2, 3, seed=1))
    missing = dict(doc)
    del missing["gains"]
    with pytest.raises(ValueError, match="gains"):
        scenario_from_dict(missing)
    wrong_shape = dict(doc)
    wrong_shape["noise"] = [[1.0, 2.0]]
    with pytest.raises(ValueError, match="noise"):
        scenario_from_dict(wrong_shape)
    bad_mode = dict(doc)
    bad_mode["mode"] = "optimistic"
    with pytest.raises(ValueError, match="mode"):
        scenario_from_dict(bad_mode)
    not_numeric = dict(doc)
    not_numeric["p_max"] = ["a", "b"]
    with pytest.raises(ValueError, match="p_max"):
        scenario_from_dict(not_numeric)
    with pytest.raises(ValueError):
        scenario_from_dict([1, 2, 3])


def test_load_scenario_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="JSON"):
        load_scenario(path)


def test_bundled_scenario_shape():
    sc = load_bundled_scenario()
    assert sc.num_users == 3 and sc.num_subchannels == 6
    assert np.all(sc.constraints.p_max == 1.0)
    assert np.all(sc.constraints.mask == 0.5)
    with pytest.raises(ValueError):
        load_bundled_scenario("no_such_table")


def test_degenerate_warning_not_raised_for_safe_specs():
    spec = UncertaintySpec.uniform(1, 2, 0.9, mode="probabilistic", delta0=0.2)
    assert not spec.is_degenerate()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        effective_interference(np.array([0.1, 0.2]), spec, 0)


def test_scenario_to_dict_is_json_ready():
    sc = random_scenario(2, 3, seed=4)
    text = json.dumps(scenario_to_dict(sc))
    assert "gains" in text and "worstcase" not in text  # nominal by default
