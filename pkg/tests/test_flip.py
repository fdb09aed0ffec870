import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarflip.channel import ChannelConfig, transmit
from polarflip.construction import build_code, nr_code
from polarflip.flip import (
    CandidatePool,
    FlipCandidate,
    FlipConfig,
    FlipDecoder,
    extend_pool,
    flip_metric,
    seed_pool,
)
from polarflip.sc import DecodeOutcome, sc_trial

from refimpl import simplified_metric


def test_metric_worked_example():
    code = build_code(8, 4, None, [0, 1, 2, 4, 3, 5, 6, 7])
    dec = np.zeros(8)
    dec[[3, 5, 6, 7]] = [0.5, -7.0, 2.0, 6.0]
    # |0.5| + J(3)
    assert flip_metric([3], dec, code) == pytest.approx(2.0)
    # |-7| + J(3) + J(6): position 5 is reliable and skips its penalty
    assert flip_metric([5, 6], dec, code) == pytest.approx(7 + 2 + 3.0)
    assert flip_metric([7], dec, code) == pytest.approx(6 + 3.0)


def test_metric_validation():
    code = build_code(8, 4, None, [0, 1, 2, 4, 3, 5, 6, 7])
    dec = np.ones(8)
    for bad in ([], [6, 5], [5, 5], [0], [8]):
        with pytest.raises(ValueError):
            flip_metric(bad, dec, code)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_metric_matches_reference(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    code = build_code(64, 30, None, rng.permutation(64))
    dec = rng.normal(0, 6, 64)
    size = data.draw(st.integers(1, 3))
    eps = sorted(rng.choice(code.info_set, size, replace=False).tolist())
    assert flip_metric(eps, dec, code) == pytest.approx(
        simplified_metric(eps, dec, list(code.info_set)))


def failed_outcome(code, rng):
    dec = np.zeros(code.N)
    dec[code.info_set] = rng.normal(0, 6, code.k_tot)
    return DecodeOutcome(np.zeros(code.N, np.uint8), dec, False)


def test_seed_pool_cap_and_order():
    code = nr_code(128, 40, 6)
    out = failed_outcome(code, np.random.default_rng(3))
    pool = seed_pool(out, FlipConfig(1, 11), code)
    assert len(pool) == 10 and pool.capacity == 10
    metrics = [c.metric for c in pool]
    assert metrics == sorted(metrics)
    everything = sorted(flip_metric([a], out.alpha_dec, code) for a in code.info_set)
    assert metrics == pytest.approx(everything[:10])
    assert len(seed_pool(out, FlipConfig(1, 1), code)) == 0


def test_seed_pool_rejects_passed_trial():
    code = nr_code(64, 20, 6)
    with pytest.raises(ValueError):
        seed_pool(DecodeOutcome(np.zeros(64, np.uint8), np.zeros(64), True), FlipConfig(), code)


def test_ties_break_on_lower_index():
    code = build_code(8, 4, None, [0, 1, 2, 4, 3, 5, 6, 7])
    dec = np.full(8, 9.0)
    pool = seed_pool(DecodeOutcome(np.zeros(8, np.uint8), dec, False), FlipConfig(1, 5), code)
    assert [c.eps for c in pool] == [(3,), (5,), (6,), (7,)]


def test_pool_offer_merge_pop():
    pool = CandidatePool(3)
    assert pool.offer(FlipCandidate((5,), 2.0))
    assert not pool.offer(FlipCandidate((5,), 2.0))
    pool.merge([FlipCandidate((i,), float(10 - i)) for i in range(10)])
    assert [c.eps for c in pool] == [(9,), (5,), (8,)]
    assert pool.full and pool.worst_key()[0] == 2.0
    assert not pool.offer(FlipCandidate((11,), 2.5))
    top = pool.pop()
    assert top.tried and top.eps == (9,)
    assert len(pool) == 2
    with pytest.raises(IndexError):
        CandidatePool(1).pop()


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.integers(0, 30), st.integers(0, 20), max_size=30),
       st.lists(st.integers(0, 30), max_size=10), st.integers(0, 8))
def test_merge_equals_repeated_offer(items, already, cap):
    cands = [FlipCandidate((i,), float(m)) for i, m in items.items()]
    a, b = CandidatePool(cap), CandidatePool(cap)
    for pool in (a, b):
        for i in already:
            pool.offer(FlipCandidate((i,), float(i % 7)))
    for c in cands:
        a.offer(c)
    b.merge(cands)
    assert [c.eps for c in a] == [c.eps for c in b]


def test_merge_keeps_first_of_repeated_sets():
    pool = CandidatePool(5)
    pool.merge([FlipCandidate((i % 3,), float(i)) for i in range(12)])
    assert [(c.eps, c.metric) for c in pool] == [((0,), 0.0), ((1,), 1.0), ((2,), 2.0)]


def test_extend_pool_no_op_and_last_bit():
    code = nr_code(64, 20, 6)
    out = failed_outcome(code, np.random.default_rng(0))
    pool = CandidatePool(10)
    last = FlipCandidate((int(code.info_set[-1]),), 1.0, True)
    assert extend_pool(pool, last, out, FlipConfig(1, 11), code) == 0
    assert extend_pool(pool, last, out, FlipConfig(2, 11), code) == 0
    with pytest.raises(ValueError):
        extend_pool(pool, FlipCandidate((1, 2), 1.0), out, FlipConfig(2, 11), code)
    used = FlipCandidate((int(code.info_set[2]),), 1.0, True)
    assert extend_pool(pool, used, out, FlipConfig(2, 11), code) == 10
    assert all(c.eps[0] == used.eps[0] and len(c.eps) == 2 for c in pool)


def reference_dscf(code, llr, omega, t_max):
    """Unbounded-list DSCF: every candidate stays eligible until tried."""
    info = list(code.info_set)
    out0 = sc_trial(code, llr)
    tried = [()]
    if out0.crc_pass:
        return tried
    cands = {(a,): simplified_metric([a], out0.alpha_dec, info) for a in info}
    while len(tried) < t_max and cands:
        eps = min(cands, key=lambda e: (cands[e], e[0], e))
        del cands[eps]
        tried.append(eps)
        out = sc_trial(code, llr, eps)
        if out.crc_pass:
            break
        if len(eps) < omega:
            for a in info:
                if a > eps[-1]:
                    e2 = eps + (a,)
                    if e2 not in tried:
                        cands[e2] = simplified_metric(e2, out.alpha_dec, info)
    return tried


@pytest.mark.parametrize("omega,t_max", [(1, 8), (2, 20), (3, 30)])
def test_decoder_matches_unbounded_reference(omega, t_max):
    code = nr_code(64, 26, 6)
    dec = FlipDecoder(code, FlipConfig(omega, t_max))
    cfg = ChannelConfig(1.0, 26 / 64)
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(300):
        llr = transmit(np.zeros(64, np.uint8), cfg, rng)
        res = dec.decode(llr)
        ref = reference_dscf(code, llr, omega, t_max)
        assert [t.eps for t in res.trials] == ref
        checked += res.tau > 2
    assert checked > 5


def test_noiseless_single_trial():
    code = nr_code(1024, 512, 11)
    llr = transmit(np.zeros(1024, np.uint8), ChannelConfig(2.0, 0.5, noiseless=True))
    for baseline in ("sc", "sclrt", "fssc"):
        res = FlipDecoder(code, FlipConfig(3, 301), baseline, "grm").decode(llr)
        assert res.success and res.tau_extra == 0
        assert res.cycles_without_mechanism == res.full_cycles


@pytest.mark.parametrize("baseline", ["sc", "sclrt", "fssc"])
def test_mechanisms_do_not_change_decoding(baseline):
    code = nr_code(256, 100, 11)
    cfg = ChannelConfig(1.0, 100 / 256)
    decoders = {m: FlipDecoder(code, FlipConfig(2, 30), baseline, m)
                for m in ("none", "lrt", "srm", "grm")}
    rng = np.random.default_rng(5)
    for _ in range(60):
        llr = transmit(np.zeros(256, np.uint8), cfg, rng)
        results = {m: d.decode(llr) for m, d in decoders.items()}
        base = results["none"]
        for m, r in results.items():
            assert [t.eps for t in r.trials] == [t.eps for t in base.trials]
            assert np.array_equal(r.u, base.u) and r.success == base.success
            assert 0 <= r.cycles_with_mechanism <= r.cycles_without_mechanism
        assert results["grm"].cycles_with_mechanism <= results["srm"].cycles_with_mechanism \
            or baseline == "fssc"


def test_decoder_validation():
    code = nr_code(64, 20, 6)
    with pytest.raises(ValueError):
        FlipDecoder(code, FlipConfig(), "bp")
    with pytest.raises(ValueError):
        FlipDecoder(code, FlipConfig(), "sc", "fast")
    with pytest.raises(ValueError):
        FlipConfig(0, 1)
    with pytest.raises(ValueError):
        FlipConfig(1, 0)
