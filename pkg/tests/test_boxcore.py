"""Box construction, extremal catalog and relabeling-group tests."""

import itertools

import numpy as np
import pytest

from boxlab import boxcore
from boxlab.boxcore import (
    BadWeightsError,
    NegativeEntryError,
    NotNormalizedError,
    SignalingError,
)

RNG = np.random.default_rng(1234)

PR000_TABLE = np.array([
    [[[0.5, 0.0], [0.0, 0.5]], [[0.5, 0.0], [0.0, 0.5]]],
    [[[0.5, 0.0], [0.0, 0.5]], [[0.0, 0.5], [0.5, 0.0]]],
])

MERMIN000_TABLE = np.array([
    [[[0.5, 0.0], [0.0, 0.5]], [[0.25, 0.25], [0.25, 0.25]]],
    [[[0.25, 0.25], [0.25, 0.25]], [[0.0, 0.5], [0.5, 0.0]]],
])

NMM0_TABLE = np.array([  # even mixture of (a=x, b=0) and (a=0, b=y)
    [[[1.0, 0.0], [0.0, 0.0]], [[0.5, 0.5], [0.0, 0.0]]],
    [[[0.5, 0.0], [0.5, 0.0]], [[0.0, 0.5], [0.5, 0.0]]],
])


def test_make_box_accepts_white_noise():
    box = boxcore.make_box(np.full(16, 0.25))
    assert np.allclose(box.table, 0.25)


def test_pr_box_matches_printed_table():
    assert np.array_equal(boxcore.pr_box(0, 0, 0).table, PR000_TABLE)


def test_mermin_box_matches_printed_table():
    assert np.array_equal(boxcore.mermin_box(0, 0, 0).table, MERMIN000_TABLE)


def test_mermin_box_is_even_pr_mixture():
    for al, be, ga in itertools.product(range(2), repeat=3):
        mixed = 0.5 * (boxcore.pr_box(al, be, ga).table
                       + boxcore.pr_box(al ^ 1, be ^ 1, ga ^ be).table)
        assert np.array_equal(boxcore.mermin_box(al, be, ga).table, mixed)


def test_mermin_nmm_variant_zero_of_second_family_matches_table():
    assert np.array_equal(boxcore.mermin_nmm_box(16).table, NMM0_TABLE)


def test_det_box_outputs():
    box = boxcore.det_box(0, 0, 0, 0)
    for x, y in itertools.product(range(2), repeat=2):
        assert box.prob(x, y, 0, 0) == 1.0


def test_make_box_rejects_signaling():
    t = PR000_TABLE.copy()
    # P(a=0|x=0) becomes 0.5 under y=0 but 0.3 under y=1
    t[0, 0] = [[0.5, 0.0], [0.0, 0.5]]
    t[0, 1] = [[0.3, 0.0], [0.2, 0.5]]
    with pytest.raises(SignalingError):
        boxcore.make_box(t)


def test_make_box_rejects_unnormalized():
    t = np.full((2, 2, 2, 2), 0.25)
    t[1, 1, 0, 0] = 0.3
    with pytest.raises(NotNormalizedError):
        boxcore.make_box(t)


def test_make_box_rejects_negative_and_clamps_tiny():
    t = np.full((2, 2, 2, 2), 0.25)
    t[0, 0, 0, 0] = -0.05
    t[0, 0, 1, 1] = 0.55
    with pytest.raises(NegativeEntryError):
        boxcore.make_box(t)
    # slight extrapolation past the PR vertex: -1e-12 on its zero cells,
    # nonsignaling and normalized to the same order
    delta = 4e-12
    t2 = (1 + delta) * PR000_TABLE - delta * 0.25
    box = boxcore.make_box(t2)
    assert box.prob(0, 0, 0, 1) == 0.0


def test_vertex_entries_are_quarters():
    ids = (boxcore.all_pr_ids() + boxcore.all_det_ids() + boxcore.all_mermin_ids()
           + boxcore.all_mermin_nmm_ids() + boxcore.all_cc_ids() + [boxcore.NOISE_ID])
    allowed = {0.0, 0.25, 0.5, 1.0}
    for vid in ids:
        values = set(np.unique(boxcore.vertex(vid).table))
        assert values <= allowed, vid
        boxcore.make_box(boxcore.vertex(vid).table)  # all invariants hold exactly


def test_tsirelson_box_is_valid_and_scaled_pr():
    w = 1 / np.sqrt(2)
    for al, be, ga in itertools.product(range(2), repeat=3):
        box = boxcore.tsirelson_box(al, be, ga)
        expected = w * boxcore.pr_box(al, be, ga).table + (1 - w) * 0.25
        assert np.allclose(box.table, expected)
        boxcore.make_box(box.table)


def test_vertex_catalog_counts():
    assert len(boxcore.all_pr_ids()) == 8
    assert len(boxcore.all_det_ids()) == 16
    assert len(boxcore.all_mermin_ids()) == 8
    assert len(boxcore.all_mermin_nmm_ids()) == 32
    assert len(boxcore.all_cc_ids()) == 8
    assert len(boxcore.all_tsirelson_ids()) == 8
    assert len(boxcore.ns_vertex_ids()) == 24


def test_mermin_boxes_all_distinct():
    tables = [boxcore.vertex(v).table.ravel() for v in boxcore.all_mermin_ids()]
    assert len(np.unique(np.stack(tables), axis=0)) == 8


def test_parse_vertex_label_round_trip():
    for label in ("PR010", "Det1101", "MerminMM001", "MerminNMM17", "CC110",
                  "Tsirelson000", "Noise"):
        vid = boxcore.parse_vertex_label(label)
        assert vid.label() == label


def test_mix_identity_and_average():
    pr = boxcore.pr_box(0, 0, 0)
    assert boxcore.mix([pr], [1.0]).allclose(pr)
    # averaging a PR box with its anti-box gives white noise
    avg = boxcore.mix([pr, boxcore.pr_box(0, 0, 1)], [0.5, 0.5])
    assert np.allclose(avg.table, 0.25)
    iso = boxcore.mix([pr, boxcore.noise_box()], [0.5, 0.5])
    assert np.allclose(iso.table, 0.5 * pr.table + 0.125)


def test_mix_rejects_bad_weights():
    pr = boxcore.pr_box(0, 0, 0)
    with pytest.raises(BadWeightsError):
        boxcore.mix([pr, boxcore.noise_box()], [0.7, 0.7])
    with pytest.raises(BadWeightsError):
        boxcore.mix([pr, boxcore.noise_box()], [1.5, -0.5])


def test_joint_expectations_pr_and_noise():
    pr = boxcore.pr_box(0, 0, 0)
    assert boxcore.joint_expectation(pr, 0, 0) == 1.0
    assert boxcore.joint_expectation(pr, 1, 1) == -1.0
    assert boxcore.joint_expectation(boxcore.noise_box(), 0, 1) == 0.0


def test_joint_expectation_is_affine_in_mixtures():
    for _ in range(50):
        w = RNG.exponential(size=3)
        w /= w.sum()
        boxes = [boxcore.pr_box(0, 1, 0), boxcore.det_box(1, 0, 1, 1),
                 boxcore.mermin_box(1, 1, 0)]
        mixed = boxcore.mix(boxes, w)
        expected = sum(wi * boxcore.joint_expectations(b) for wi, b in zip(w, boxes))
        assert np.allclose(boxcore.joint_expectations(mixed), expected, atol=1e-12)


def test_marginal_expectations():
    assert boxcore.marginal_expectation(boxcore.pr_box(1, 0, 1), "A", 0) == 0.0
    assert boxcore.marginal_expectation(boxcore.det_box(0, 0, 0, 0), "A", 0) == 1.0
    nmm = boxcore.mermin_nmm_box(16)
    assert boxcore.marginal_expectation(nmm, "A", 1) == 0.0
    assert boxcore.marginal_expectation(nmm, "A", 0) == 1.0


def test_ns_check_matches_h_representation():
    # sample the 8 reduced coordinates (two marginals per party + one joint per
    # input pair) and compare table validity with the H-representation facets
    for _ in range(300):
        pa = RNG.uniform(size=2)   # P(a=0|x)
        pb = RNG.uniform(size=2)   # P(b=0|y)
        joint = RNG.uniform(size=(2, 2))  # P(0,0|x,y)
        t = np.empty((2, 2, 2, 2))
        for x, y in itertools.product(range(2), repeat=2):
            t[x, y, 0, 0] = joint[x, y]
            t[x, y, 0, 1] = pa[x] - joint[x, y]
            t[x, y, 1, 0] = pb[y] - joint[x, y]
            t[x, y, 1, 1] = 1 - pa[x] - pb[y] + joint[x, y]
        h_ok = all(
            joint[x, y] <= pa[x] + 1e-12 and joint[x, y] <= pb[y] + 1e-12
            and joint[x, y] >= pa[x] + pb[y] - 1 - 1e-12
            for x, y in itertools.product(range(2), repeat=2)
        )
        try:
            boxcore.make_box(t)
            accepted = True
        except (NegativeEntryError, SignalingError, NotNormalizedError):
            accepted = False
        assert accepted == h_ok


# -- relabeling group ---------------------------------------------------------

def test_lro_group_size_and_closure():
    group = boxcore.lro_group()
    assert len(group) == 128
    members = set(group)
    sample = RNG.choice(len(group), size=60)
    for i, j in zip(sample[::2], sample[1::2]):
        assert boxcore.compose_lro(group[i], group[j]) in members


def test_lro_inverse_round_trip():
    group = boxcore.lro_group()
    box = boxcore.mix([boxcore.pr_box(0, 0, 0), boxcore.det_box(1, 0, 1, 0),
                       boxcore.noise_box()], [0.3, 0.5, 0.2])
    for g in group:
        gi = boxcore.invert_lro(g)
        assert boxcore.compose_lro(g, gi) == boxcore.IDENTITY_LRO
        back = boxcore.apply_lro(boxcore.apply_lro(box, g), gi)
        assert back.allclose(box, tol=1e-14)


def test_lro_identity_and_alice_output_flip():
    pr = boxcore.pr_box(0, 0, 0)
    assert boxcore.apply_lro(pr, boxcore.IDENTITY_LRO).allclose(pr)
    flip = boxcore.Lro(a=boxcore.PartyRelabel(out_const=1))
    assert boxcore.apply_lro(pr, flip).allclose(boxcore.pr_box(0, 0, 1))


def test_party_swap_fixes_symmetric_mermin_box():
    swap = boxcore.Lro(party_swap=True)
    box = boxcore.mermin_box(0, 0, 0)
    assert boxcore.apply_lro(box, swap).allclose(box)


def test_lro_permutes_pr_and_det_orbits():
    pr_tables = {boxcore.vertex(v).table.tobytes() for v in boxcore.all_pr_ids()}
    det_tables = {boxcore.vertex(v).table.tobytes() for v in boxcore.all_det_ids()}
    for g in boxcore.lro_group():
        moved_pr = {boxcore.apply_lro(boxcore.vertex(v), g).table.tobytes()
                    for v in boxcore.all_pr_ids()}
        moved_det = {boxcore.apply_lro(boxcore.vertex(v), g).table.tobytes()
                     for v in boxcore.all_det_ids()}
        assert moved_pr == pr_tables
        assert moved_det == det_tables


def test_lro_index_permutation_matches_apply():
    box = boxcore.mix([boxcore.pr_box(1, 1, 0), boxcore.cc_box(0, 1, 0),
                       boxcore.noise_box()], [0.25, 0.35, 0.4])
    flat = box.table.ravel()
    for g in boxcore.lro_group()[::7]:
        perm = boxcore.lro_index_permutation(g)
        assert np.array_equal(flat[perm],
                              boxcore.apply_lro(box, g).table.ravel())


def test_json_round_trip():
    box = boxcore.mix([boxcore.pr_box(0, 1, 1), boxcore.noise_box()], [0.4, 0.6])
    again = boxcore.box_from_json(boxcore.box_to_json(box))
    assert again.allclose(box, tol=1e-15)


def test_json_rejects_wrong_parties():
    text = boxcore.box_to_json(boxcore.noise_box()).replace('"parties": 2',
                                                            '"parties": 5')
    with pytest.raises(boxcore.BoxError):
        boxcore.box_from_json(text)
