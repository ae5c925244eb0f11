import numpy as np

from duplexsim import randstream


def test_same_key_reproduces():
    a = randstream.stream(7, randstream.FADING_BS_UE, 3, 9).standard_normal(100)
    b = randstream.stream(7, randstream.FADING_BS_UE, 3, 9).standard_normal(100)
    assert np.array_equal(a, b)


def test_distinct_keys_decorrelate():
    base = randstream.stream(7, randstream.FADING_BS_UE, 3, 9).standard_normal(64)
    for key in ((8, randstream.FADING_BS_UE, 3, 9),
                (7, randstream.FADING_BS_BS, 3, 9),
                (7, randstream.FADING_BS_UE, 4, 9),
                (7, randstream.FADING_BS_UE, 3, 10)):
        other = randstream.stream(*key).standard_normal(64)
        assert not np.array_equal(base, other)


def test_keys_are_order_independent():
    # drawing counter 5 first or last never changes what counter 5 yields
    direct = randstream.stream(1, randstream.TRAFFIC, 5).uniform(size=8)
    for counter in (0, 9, 2):
        randstream.stream(1, randstream.TRAFFIC, counter).uniform(size=8)
    again = randstream.stream(1, randstream.TRAFFIC, 5).uniform(size=8)
    assert np.array_equal(direct, again)


def test_stream_ids_unique():
    ids = [randstream.TRAFFIC, randstream.DTDD_DIRECTION,
           randstream.FADING_BS_UE, randstream.FADING_BS_BS,
           randstream.FADING_SI, randstream.FADING_UE_UE,
           randstream.USER_DROP, randstream.LOS_STATE, randstream.CSI_ERROR]
    assert len(set(ids)) == len(ids)


def test_complex_normal_unit_variance():
    rng = randstream.stream(0, randstream.FADING_BS_UE)
    z = randstream.complex_normal(rng, (100000,))
    assert z.dtype == complex
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.02
    assert abs(np.mean(z.real)) < 0.02 and abs(np.mean(z.imag)) < 0.02
    # real and imaginary parts carry half the power each
    assert abs(np.mean(z.real ** 2) - 0.5) < 0.01
