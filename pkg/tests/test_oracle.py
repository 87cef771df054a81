import numpy as np
import pytest
import scipy.sparse as sp

from islandea import objective as O, oracle, topology as T
from islandea.island_model import ModelConfig, run_batch

import golden

Z999 = 3.2905


def cfg_of(obj, g, p, tau=1):
    return ModelConfig(obj, g, p, tau=tau)


def test_one_bit_chain():
    chain = oracle.build_chain(cfg_of(O.onemax(1), T.complete(1), 0.0))
    assert chain.transition.toarray().tolist() == [[0.0, 1.0], [0.0, 1.0]]
    assert oracle.expected_absorption_time(chain, "0") == 1.0


def test_two_bit_chain_rows():
    P = oracle.build_chain(cfg_of(O.onemax(2), T.complete(1), 0.0)).transition.toarray()
    # state index = bit0 + 2 * bit1; from 00: stay 1/4, each one-bit string 1/4, 11 with 1/4
    assert P[0].tolist() == [0.25, 0.25, 0.25, 0.25]
    assert P[0, 3] == 0.25 and P[0, 1] + P[0, 2] == 0.5


def test_two_bit_times_are_exact():
    cfg = cfg_of(O.onemax(2), T.complete(1), 0.0)
    assert oracle.expected_t_par(cfg, "00") == pytest.approx(golden.ORACLE_N2_FROM_00, abs=1e-12)
    assert oracle.expected_t_par(cfg, "01") == pytest.approx(golden.ORACLE_N2_FROM_01, abs=1e-12)


def test_two_islands_without_transmission_factorise():
    cfg = cfg_of(O.onemax(2), T.complete(2), 0.0)
    single = oracle.island_kernel(cfg)
    chain = oracle.build_chain(cfg)
    expected = np.kron(single, single)
    keep = ~chain.absorbing
    assert np.allclose(chain.transition.toarray()[keep], expected[keep], atol=1e-15)
    assert oracle.expected_t_par(cfg, "00") == pytest.approx(golden.ORACLE_MU2_P0_FROM_00, abs=1e-12)


@pytest.mark.parametrize("cfg", [
    cfg_of(O.onemax(3), T.complete(2), 0.5),
    cfg_of(O.leading_ones(2), T.uni_ring(4), 0.3),
    cfg_of(O.jump(3, 2), T.bi_ring(3), 0.7, tau=2),
    cfg_of(O.onemax(4), T.complete(2), 1.0),
], ids=["om3-complete", "lo2-ring4", "jump-biring-tau2", "om4-full"])
def test_chain_invariants(cfg):
    chain = oracle.build_chain(cfg)
    P = chain.transition
    assert np.allclose(np.asarray(P.sum(axis=1)).ravel(), 1.0, atol=1e-10)
    assert (P.data >= 0).all()
    diag = P.diagonal()
    assert (diag[chain.absorbing] == 1.0).all()


@pytest.mark.parametrize("fn,n", [("onemax", 2), ("onemax", 3), ("lo", 3), ("jump:2", 3)])
def test_independent_islands_match_product_chain(fn, n):
    cfg = cfg_of(O.parse(fn, n), T.complete(2), 0.0)
    assert oracle.expected_t_par(cfg) == pytest.approx(oracle.independent_min_time(cfg), rel=1e-10)


@pytest.mark.parametrize("fn,n", [("onemax", 2), ("onemax", 3), ("onemax", 4), ("lo", 2), ("lo", 3), ("lo", 4)])
def test_full_migration_never_slower_on_monotone_functions(fn, n):
    none = cfg_of(O.parse(fn, n), T.complete(2), 0.0)
    full = cfg_of(O.parse(fn, n), T.complete(2), 1.0)
    assert oracle.expected_t_par(full) <= oracle.expected_t_par(none) + 1e-12


def test_full_migration_can_hurt_on_jump():
    # both islands get pulled onto the local optimum, which is then hard to leave
    none = cfg_of(O.jump(3, 2), T.complete(2), 0.0)
    full = cfg_of(O.jump(3, 2), T.complete(2), 1.0)
    assert oracle.expected_t_par(full) > oracle.expected_t_par(none)


def test_caps_and_singular_systems():
    with pytest.raises(oracle.StateSpaceTooLarge):
        oracle.build_chain(cfg_of(O.onemax(5), T.complete(4), 0.5))
    with pytest.raises(oracle.StateSpaceTooLarge):
        oracle.build_chain(cfg_of(O.onemax(4), T.complete(4), 0.5))
    stuck = oracle.ChainModel(1, 1, 1, sp.csr_matrix(np.eye(2)), np.array([False, True]))
    with pytest.raises(oracle.SingularSystem):
        oracle.expected_absorption_time(stuck, "0")


def test_build_is_cached():
    cfg = cfg_of(O.onemax(3), T.complete(2), 0.5)
    assert oracle.build_chain(cfg) is oracle.build_chain(cfg)


def test_decode_round_trips():
    chain = oracle.build_chain(cfg_of(O.onemax(2), T.complete(2), 0.5, tau=2))
    s = chain.encode(["10", "01"], phase=0)
    assert chain.decode(s) == (["10", "01"], 0)


@pytest.mark.slow
@pytest.mark.parametrize("cfg,start", [
    (cfg_of(O.onemax(3), T.complete(2), 0.5), None),
    (cfg_of(O.leading_ones(3), T.uni_ring(2), 0.2), "000"),
    (cfg_of(O.leading_ones(2), T.bi_ring(4), 0.6), None),
    (cfg_of(O.jump(4, 2), T.complete(2), 0.3, tau=3), "0000"),
], ids=["om3", "lo3-ring", "lo2-biring4", "jump-tau3"])
def test_simulator_matches_exact_value(cfg, start):
    exact = oracle.expected_t_par(cfg, start)
    t = run_batch(cfg, np.arange(100_000), fixed_start=start).t_par
    half = Z999 * t.std(ddof=1) / np.sqrt(len(t))
    assert abs(t.mean() - exact) <= half
