import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarflip.construction import nr_code
from polarflip.cost import (
    CostParams,
    fast_node_saving,
    llr_cycles,
    lrt_saving,
    memory_estimate,
    ps_cycles,
    restart_saving,
    restoration_cycles,
    sc_cycles,
    sc_restart_saving,
    skipped_llr_cycles,
    skipped_ps_cycles,
    trial_cost,
)
from polarflip.schedule import build_schedule


def brute_tree_cycles(N, P, psi=None):
    """Walk every node of the SC tree and charge it.

    With ``psi`` only nodes lying wholly left of leaf psi are charged.
    Returns (llr, partial sums).
    """
    n = N.bit_length() - 1
    llr = ps = 0
    for s in range(n):
        for i in range(N >> s):
            lo, hi = i << s, (i + 1) << s
            if psi is not None and hi > psi:
                continue
            llr += math.ceil((1 << s) / P)
            # combining a stage-s node (s >= 1); the last node of a stage
            # never feeds a g-function
            if s >= 1 and (psi is not None or hi < N):
                ps += math.ceil((1 << s) / (2 * P))
    return llr, ps


@pytest.fixture(scope="module")
def code512():
    return nr_code(1024, 512, 11)


def test_reference_constants():
    code = nr_code(1024, 256, 11)
    assert trial_cost("sc", code, CostParams(P=64)) == 3099
    assert trial_cost("sc", code, CostParams(P=16)) == 3389
    assert trial_cost("sclrt", code, CostParams(P=64)) == 2349
    sched = build_schedule(code, 3)
    # value of this node-cost model; see the decisions ledger for the gap
    # against the reference figure
    assert trial_cost("fssc", code, CostParams(P=64), sched) == 460


@pytest.mark.parametrize("N", [4, 16, 256, 1024])
@pytest.mark.parametrize("P", [1, 4, 16, 64, 256])
def test_sc_cycles_match_brute_force(N, P):
    llr, ps = brute_tree_cycles(N, P)
    assert llr_cycles(N, P) == llr
    assert ps_cycles(N, P) == ps
    assert sc_cycles(N, P) == llr + ps


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 10), st.sampled_from([1, 4, 16, 64]), st.data())
def test_skipped_cycles_match_brute_force(n, P, data):
    N = 1 << n
    psi = data.draw(st.integers(0, N))
    llr, ps = brute_tree_cycles(N, P, psi)
    assert skipped_llr_cycles(psi, N, P) == llr
    assert skipped_ps_cycles(psi, N, P) == ps


def test_saving_term_by_term_at_543():
    # 543 = 1000011111b: LLR nodes left of 543 are 543 >> s per stage
    N, P = 1024, 64
    llr = sum((543 >> s) * math.ceil(2**s / P) for s in range(10))
    ps = sum((543 >> s) * math.ceil(2**s / (2 * P)) for s in range(1, 10))
    theta = sum(math.ceil(2**s / (2 * P)) * s for s in (9, 4, 3, 2, 1))
    assert restoration_cycles(543, N, P) == theta == 4 * 9 + 4 + 3 + 2 + 1
    assert sc_restart_saving(543, N, P) == llr + ps - theta


@pytest.mark.parametrize("psi", [0, 1])
def test_no_restoration_without_g_stages(psi):
    assert restoration_cycles(psi, 1024, 64) == 0


@pytest.mark.parametrize("N", [16, 64, 1024])
def test_large_p_collapse(N):
    n = N.bit_length() - 1
    assert ps_cycles(N, N // 4) == N - n - 1
    assert llr_cycles(N, N // 2) == 2 * N - 2


def test_lrt_accounting(code512):
    p = CostParams()
    a0 = code512.a0
    assert restart_saving("sc", a0, code512, p, mechanism="lrt") == lrt_saving(code512, 64)
    assert restart_saving("sclrt", a0, code512, p, mechanism="lrt") == 0
    assert trial_cost("sc", code512, p) - trial_cost("sclrt", code512, p) == lrt_saving(code512, 64)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["sc", "sclrt", "fssc"]), st.integers(0, 1024),
       st.sampled_from(["grm", "srm", "lrt"]))
def test_saving_bounds(baseline, psi, mechanism):
    code = nr_code(1024, 512, 11)
    sched = build_schedule(code, 3)
    p = CostParams()
    full = trial_cost(baseline, code, p, sched)
    s = restart_saving(baseline, psi, code, p, sched, mechanism=mechanism)
    assert 0 <= s <= full
    if psi == 1024:
        assert s == full


def test_composition_inequalities(code512):
    p = CostParams()
    sched = build_schedule(code512, 3)
    l_sc = trial_cost("sc", code512, p)
    assert trial_cost("fssc", code512, p, sched) < trial_cost("sclrt", code512, p) < l_sc
    for psi in code512.info_set[::25]:
        psi = int(sched.anchor(int(psi)))
        sc = restart_saving("sc", psi, code512, p)
        assert restart_saving("sclrt", psi, code512, p) <= sc
        assert restart_saving("fssc", psi, code512, p, sched) <= sc


def test_fast_node_savings():
    # size-4 subtree: 4 + 2 LLR cycles and 2 partial-sum cycles, versus 1
    assert fast_node_saving("R0", 4, 64) == 4 + 2 + 2 - 1
    for kind in ("R1", "REP", "SPC"):
        assert fast_node_saving(kind, 64, 64) > 0


@pytest.mark.parametrize("omega,t_max,without", [(1, 13, 15556), (1, 8, 15471),
                                                 (2, 51, 16702), (3, 301, 26452)])
def test_memory_table(omega, t_max, without):
    rep = memory_estimate(omega, t_max, CostParams(), 1024)
    assert rep.without_restart == without
    assert rep.total == without + 1024
    assert rep.overhead_pct == pytest.approx(100 * 1024 / without)


def test_memory_edge_cases():
    rep = memory_estimate(1, 1, CostParams(), 1024)
    assert rep.flip_bits == 0
    assert memory_estimate(3, 301, CostParams(), 1024, with_grm=False).restart_bits == 0
    with pytest.raises(ValueError):
        memory_estimate(0, 10, CostParams(), 1024)
    with pytest.raises(ValueError):
        memory_estimate(1, 10, CostParams(), 1000)


def test_input_validation(code512):
    with pytest.raises(ValueError):
        CostParams(P=0)
    with pytest.raises(ValueError):
        restoration_cycles(1025, 1024, 64)
    with pytest.raises(ValueError):
        trial_cost("bp", code512, CostParams())
    with pytest.raises(ValueError):
        trial_cost("fssc", code512, CostParams())
