import pytest

from tropdiv import Divisor, canonical_divisor
from tropdiv.harness import (CampaignConfig, HarnessError, graph_fingerprint,
                             random_instance, run_campaign, verify_rr)

def test_random_instance_deterministic():
    cfg = CampaignConfig(seed=99, instances=10)
    for i in range(6):
        g1, d1 = random_instance(cfg, i)
        g2, d2 = random_instance(cfg, i)
        assert graph_fingerprint(g1, d1) == graph_fingerprint(g2, d2)


def test_random_instance_respects_ranges():
    cfg = CampaignConfig(seed=4, instances=1, genus_range=(0, 0),
                         degree_range=(-1, -1), edge_range=(1, 3))
    for i in range(10):
        g, d = random_instance(cfg, i)
        assert g.genus() == 0
        assert d.degree() == -1
        rec = verify_rr(g, d, index=i)
        assert rec.rank_d == -1
        assert rec.status == "pass"


def test_genus_zero_is_tree():
    cfg = CampaignConfig(seed=8, instances=1, genus_range=(0, 0), max_ends=2)
    for i in range(8):
        g, _ = random_instance(cfg, i)
        assert g.genus() == 0


def test_verify_rr_dumbbell(dumbbell):
    k = canonical_divisor(dumbbell)
    rec = verify_rr(dumbbell, k)
    assert rec.status == "pass"
    assert (rec.rank_d, rec.rank_kd) == (1, 0)
    assert rec.lhs == rec.rhs == 1


def test_verify_rr_tree_zero_divisor(segment):
    rec = verify_rr(segment, Divisor.zero(segment))
    assert rec.status == "pass"
    assert (rec.rank_d, rec.rank_kd) == (0, -1)
    assert rec.lhs == 1 and rec.rhs == 1


def test_verify_rr_unit_loop_zero_divisor(unit_loop):
    rec = verify_rr(unit_loop, Divisor.zero(unit_loop))
    assert rec.status == "pass"
    assert (rec.rank_d, rec.rank_kd) == (0, 0)


def test_fixture_campaign_three_graphs(dumbbell, unit_loop, segment):
    for g in (dumbbell, unit_loop, segment):
        k = canonical_divisor(g)
        assert verify_rr(g, k).status == "pass"


def test_empty_campaign():
    report = run_campaign(CampaignConfig(seed=1, instances=0))
    assert report.summary()["instances"] == 0
    assert report.all_pass()


def test_small_campaign_passes():
    report = run_campaign(CampaignConfig(seed=31337, instances=12))
    assert report.failed == 0
    assert report.passed + report.inconclusive == 12


def test_duality_involution():
    # the identity is symmetric under swapping D and K - D
    cfg = CampaignConfig(seed=21, instances=6)
    for i in range(6):
        g, d = random_instance(cfg, i)
        k = canonical_divisor(g)
        r1 = verify_rr(g, d)
        r2 = verify_rr(g, k - d)
        assert (r1.status == "pass") == (r2.status == "pass")


def test_degree_shift_coherence():
    cfg = CampaignConfig(seed=13, instances=5, max_ends=0, degree_range=(0, 3))
    from tropdiv import tropical_rank
    for i in range(5):
        g, d = random_instance(cfg, i)
        p = g.vertex_point(sorted(g.vertices)[0])
        r0 = tropical_rank(g, d).rank
        r1 = tropical_rank(g, d + Divisor.of(g, (1, p))).rank
        assert r1 - r0 in (0, 1)


def test_bad_config_rejected():
    with pytest.raises(HarnessError):
        CampaignConfig(seed=1, instances=-1)
    with pytest.raises(HarnessError):
        CampaignConfig(seed=1, genus_range=(2, 1))
    with pytest.raises(HarnessError):
        CampaignConfig(seed=1, scale_cap=0)


def test_retraction_consistency_with_ends():
    """tropical rank equals the metric rank of the retracted divisor."""
    from tropdiv import metric_rank, retract_divisor, tropical_rank
    cfg = CampaignConfig(seed=77, instances=1, max_ends=2)
    checked = 0
    for i in range(12):
        g, d = random_instance(cfg, i)
        if not g.has_infinite_edges():
            continue
        checked += 1
        core, _ = g.retract_core()
        d_core, _ = retract_divisor(g, d)
        lhs = tropical_rank(g, d).rank
        rhs = metric_rank(core, d_core.rehost(core)).rank
        assert lhs == rhs
    assert checked >= 4
