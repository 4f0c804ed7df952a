"""LP membership and canonical-decomposition tests."""

import numpy as np
import pytest

from boxlab import boxcore, discord2, polytope, qstate

RNG = np.random.default_rng(2024)


def test_is_local_on_deterministic_box():
    det = boxcore.det_box(0, 1, 1, 0)
    res = polytope.is_local(det)
    assert res.inside
    assert res.weights[boxcore.det_id(0, 1, 1, 0)] == pytest.approx(1.0, abs=1e-7)


def test_is_local_isotropic_pr_boundary():
    pr = boxcore.pr_box(0, 0, 0)
    noise = boxcore.noise_box()
    outside = polytope.is_local(boxcore.mix([pr, noise], [0.6, 0.4]))
    assert not outside.inside
    facet, margin = outside.violated_facet
    assert facet == "B000"
    assert margin == pytest.approx(0.4, abs=1e-9)
    inside = polytope.is_local(boxcore.mix([pr, noise], [0.5, 0.5]))
    assert inside.inside


def test_membership_reconstruction_tolerance():
    for _ in range(20):
        box = polytope.random_ns_box(RNG)
        weights = polytope.lp_vertex_decomposition(box, boxcore.ns_vertex_ids())
        assert weights is not None
        recon = sum(w * boxcore.vertex(v).table for v, w in weights.items())
        assert np.max(np.abs(recon - box.table)) <= 1e-7


def test_ns_membership_and_monotonicity():
    assert polytope.ns_membership(boxcore.pr_box(0, 0, 0))
    for _ in range(30):
        box = polytope.random_ns_box(RNG)
        assert polytope.ns_membership(box)
        if polytope.is_local(box).inside:
            assert polytope.ns_membership(box)


def test_pr_box_is_not_local():
    weights = polytope.lp_vertex_decomposition(boxcore.pr_box(0, 0, 0),
                                               boxcore.all_det_ids())
    assert weights is None


def test_tsirelson_decomposition_weight():
    box = boxcore.tsirelson_box(0, 0, 0)
    weights = polytope.lp_vertex_decomposition(box, boxcore.ns_vertex_ids())
    assert weights is not None  # the LP picks one of many representations
    # the advertised representation (1/sqrt2 on PR000, rest white noise)
    # reconstructs the box exactly, and the canonical split returns it
    w = 1 / np.sqrt(2)
    recon = w * boxcore.pr_box(0, 0, 0).table + (1 - w) * 0.25
    assert np.allclose(recon, box.table, atol=1e-15)
    dec = polytope.canonical_2decomposition(box)
    assert dec.mu == pytest.approx(w, abs=1e-12)
    assert np.allclose(dec.residual.table, 0.25, atol=1e-12)


def test_fine_agreement_on_random_sample():
    agree = 0
    total = 0
    for _ in range(300):
        box = polytope.random_ns_box(RNG)
        bmax = float(np.max(discord2.bell_functions(box)))
        if abs(bmax - 2.0) <= boxcore.EPS_LP:
            continue
        total += 1
        agree += polytope.is_local(box).inside == (bmax < 2.0)
    assert total > 250
    assert agree == total


def test_canonical_2decomposition_isotropic_pr():
    noise = boxcore.noise_box()
    for p in (0.0, 0.3, 0.8):
        box = boxcore.mix([boxcore.pr_box(0, 0, 0), noise], [p, 1 - p])
        dec = polytope.canonical_2decomposition(box)
        assert dec.mu == pytest.approx(p, abs=1e-12)
        assert np.allclose(dec.residual.table, 0.25, atol=1e-12)
        assert dec.nu == 0.0


def test_canonical_2decomposition_prq_maximally_entangled():
    box = qstate.born_box2(qstate.schmidt_state(np.pi / 4),
                           qstate.settings_catalog("PRQ", 1.0))
    dec = polytope.canonical_2decomposition(box)
    assert dec.mu == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert np.allclose(dec.residual.table, 0.25, atol=1e-9)


def test_canonical_2decomposition_degenerate_pr():
    dec = polytope.canonical_2decomposition(boxcore.pr_box(1, 0, 1))
    assert dec.mu == 1.0
    assert dec.pr_id == boxcore.pr_id(1, 0, 1)


def test_canonical_2decomposition_idempotent_and_reconstructs():
    for _ in range(25):
        box = polytope.random_ns_box(RNG)
        try:
            dec = polytope.canonical_2decomposition(box)
        except polytope.ResidualInvalidError:
            continue  # boxes without a PR-subtractable frame are reported, not forced
        recon = dec.reconstruction(boxcore.vertex(dec.pr_id).table, None)
        assert np.max(np.abs(recon - box.table)) <= 1e-7
        again = polytope.canonical_2decomposition(dec.residual)
        assert again.mu <= 1e-7


def test_canonical_2decomposition_reports_tilted_product_box():
    # tilted product boxes have positive formula-G but no PR-subtractable
    # weight (they vanish where every PR box has support); the structured
    # error is the contract here
    rho = qstate.density_matrix(np.kron(
        0.5 * (np.eye(2) + qstate.SIGMA_X),
        0.5 * (np.eye(2) + 0.8 * qstate.SIGMA_X + 0.1 * qstate.SIGMA_Y)))
    frame = qstate.settings([1, 0, 0], [2 / np.sqrt(5), 1 / np.sqrt(5), 0],
                            [1, 0, 0], [0, 1, 0])
    box = qstate.born_box2(rho, frame)
    assert discord2.bell_discord(box) > 0.1
    with pytest.raises(polytope.ResidualInvalidError):
        polytope.canonical_2decomposition(box)


def test_three_decomposition_mermin_box():
    dec = polytope.three_decomposition(boxcore.mermin_box(0, 0, 0))
    assert dec.mu == pytest.approx(0.0, abs=1e-12)
    assert dec.nu == pytest.approx(1.0, abs=1e-12)
    assert dec.mermin_id == boxcore.mermin_id(0, 0, 0)


def test_three_decomposition_det_box():
    det = boxcore.det_box(0, 0, 1, 1)
    dec = polytope.three_decomposition(det)
    assert dec.mu == 0.0 and dec.nu == 0.0
    assert dec.residual.allclose(det)


def test_three_decomposition_bell_state_family():
    rho = qstate.bell_psi_plus()
    for p in (0.5, 0.6, 0.75, 0.9, 1.0):
        box = qstate.born_box2(rho, qstate.settings_catalog("meb1", p))
        dec = polytope.three_decomposition(box)
        assert dec.mu == pytest.approx(np.sqrt(1 - p), abs=1e-9)
        assert dec.nu == pytest.approx(np.sqrt(p) - np.sqrt(1 - p), abs=1e-9)
        assert np.allclose(dec.residual.table, 0.25, atol=1e-9)
        recon = dec.reconstruction(boxcore.vertex(dec.pr_id).table,
                                   boxcore.vertex(dec.mermin_id).table)
        assert np.max(np.abs(recon - box.table)) <= 1e-9


def test_three_decomposition_constructed_canonical_mixtures():
    # mixtures built as mu*PR + nu*(canonical Mermin partner) + noise must
    # come back with exactly those weights
    pr = boxcore.pr_box(0, 0, 0)
    for mid in (boxcore.mermin_id(0, 0, 0), boxcore.mermin_id(1, 1, 1)):
        mm = boxcore.vertex(mid)
        for _ in range(8):
            mu, nu = RNG.dirichlet(np.ones(3))[:2]
            box = boxcore.mix([pr, mm, boxcore.noise_box()], [mu, nu, 1 - mu - nu])
            dec = polytope.three_decomposition(box)
            assert dec.mu == pytest.approx(mu, abs=1e-9)
            assert dec.nu == pytest.approx(nu, abs=1e-9)
            recon = dec.reconstruction(boxcore.vertex(dec.pr_id).table,
                                       boxcore.vertex(dec.mermin_id).table)
            assert np.max(np.abs(recon - box.table)) <= 1e-9


def test_three_decomposition_random_quantum_boxes_contract():
    # generic quantum boxes either decompose cleanly or raise the structured
    # error; a returned result must reconstruct with a double-zero residual
    frames = [qstate.settings_catalog("BSb"), qstate.settings_catalog("MSb"),
              qstate.settings_catalog("meb1", 0.7)]
    succeeded = 0
    for _ in range(8):
        rho = qstate.random_two_qubit_state(RNG)
        for frame in frames:
            box = qstate.born_box2(rho, frame)
            try:
                dec = polytope.three_decomposition(box)
            except polytope.ResidualInvalidError:
                continue
            succeeded += 1
            assert discord2.bell_discord(dec.residual) <= 1e-6
            assert discord2.mermin_discord(dec.residual) <= 1e-6
            assert abs(dec.mu - discord2.bell_discord(box) / 4) < 1e-12
            assert abs(dec.nu - discord2.mermin_discord(box) / 2) < 1e-12
            recon = dec.reconstruction(boxcore.vertex(dec.pr_id).table,
                                       boxcore.vertex(dec.mermin_id).table)
            assert np.max(np.abs(recon - box.table)) <= 1e-7
    assert succeeded >= 1


def test_random_ns_box_is_valid_and_seeded():
    a = polytope.random_ns_tables(np.random.default_rng(7), 5)
    b = polytope.random_ns_tables(np.random.default_rng(7), 5)
    assert np.array_equal(a, b)
    for t in a:
        boxcore.make_box(t)
