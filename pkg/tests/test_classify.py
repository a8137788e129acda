import numpy as np
import pytest

from conftest import FAST
from ncebkit.channels import (
    KrausChannel,
    compose_serial,
    depolarizing,
    global_depolarizing,
    identity_channel,
    local_depolarizing_pair,
    random_channel,
    random_holevo_eb,
    replacer,
    swap_channel,
    transpose_depolarizing,
)
from ncebkit.classify import (
    ChannelFamily,
    NonMonotoneError,
    OptimizerConfig,
    alpha_nceb_threshold,
    bell_output_ppt,
    bisect_root,
    channel_coherent_info,
    choi_distance_lower_bound,
    family,
    is_a_unital,
    is_eb,
    is_mib,
    is_ncea,
    is_nceb,
    is_ppt_channel,
    nceb_threshold_depolarizing,
    non_nceb_witness,
    predicate,
    threshold,
)
from ncebkit.entropy import (
    conditional_entropy_matrix,
    entropy_of_spectrum,
    isotropic_conditional_entropy,
    isotropic_entropy,
)
from ncebkit.qlinalg import DimensionError, herm_eigvals, random_unitary
from ncebkit.states import (
    DensityOperator,
    max_entangled,
    max_entangled_vector,
    maximally_mixed,
    pure_state_density,
    random_density,
    random_pure_state,
)

P_STAR = 0.252386166553606  # Bell-input hashing point of qubit depolarizing (noise convention)
COVARIANT = OptimizerConfig(covariant=True)


def test_ppt_examples():
    assert is_ppt_channel(depolarizing(2, 0.7)).status == "yes"
    v = is_ppt_channel(identity_channel(2))
    assert v.status == "no"
    assert v.certificate["choi_pt_min_eigenvalue"] == pytest.approx(-0.5)
    sigma = DensityOperator(np.array([[0.6, 0.1], [0.1, 0.4]]))
    assert is_ppt_channel(replacer(sigma, 3)).status == "yes"


def test_eb_examples():
    assert is_eb(depolarizing(2, 2 / 3)).status == "yes"
    assert is_eb(depolarizing(2, 0.5)).status == "no"
    v = is_eb(depolarizing(3, 0.9))
    assert v.status == "inconclusive"
    assert "PPT does not imply separability" in v.certificate["reason"]


def test_mib_examples():
    assert is_mib(replacer(maximally_mixed(2), 2)).status == "yes"
    assert is_mib(replacer(pure_state_density([1, 0]), 2)).status == "yes"
    v = is_mib(depolarizing(2, 0.9))
    assert v.status == "no" and v.certificate["choi_mutual_information"] > 0


def test_coherent_info_examples():
    ci = channel_coherent_info(identity_channel(2), FAST)
    assert ci.value == pytest.approx(1.0, abs=1e-8)
    # the optimum is maximally entangled up to a local unitary
    rho = DensityOperator(np.outer(ci.argmax, ci.argmax.conj()), (2, 2))
    np.testing.assert_allclose(rho.marginal(0).matrix, np.eye(2) / 2, atol=1e-4)
    assert channel_coherent_info(depolarizing(2, 1.0), FAST).value == 0.0


def test_coherent_info_depolarizing_0_1():
    # spectrum {0.925, 0.025 x3}: 1 - S = 0.49681626831941617
    expected = 1 - entropy_of_spectrum([0.925, 0.025, 0.025, 0.025])
    assert expected == pytest.approx(0.49681626831941617, abs=1e-15)
    assert channel_coherent_info(depolarizing(2, 0.1), COVARIANT).value == pytest.approx(expected, abs=1e-12)
    searched = channel_coherent_info(depolarizing(2, 0.1), FAST)
    assert searched.value == pytest.approx(expected, abs=1e-7)
    assert searched.lower_bound


def test_nceb_examples():
    v = is_nceb(depolarizing(2, 0.3), COVARIANT)
    assert v.status == "yes" and v.certificate["route"] == "covariant_bell_input"
    v = is_nceb(depolarizing(2, 0.1), FAST)
    assert v.status == "no"
    np.testing.assert_allclose(np.array(v.certificate["witness"]) @ [1, 1j],
                               max_entangled_vector(2), atol=1e-12)
    assert is_nceb(depolarizing(2, 0.8)).certificate["route"] == "ppt_choi"


def test_nceb_without_shortcut_is_inconclusive_certified():
    v = is_nceb(depolarizing(2, 0.3), FAST)
    assert v.status == "inconclusive"
    assert v.certificate["certified"] and v.certificate["budget"]["restarts"] == 4
    assert v.passes


def test_nceb_is_deterministic():
    ch = random_channel(2, 2, 2, np.random.default_rng(3))
    a = is_nceb(ch, FAST).to_dict()
    b = is_nceb(ch, FAST).to_dict()
    assert a == b


def test_ncea_examples():
    assert is_ncea(global_depolarizing(4, 0.7), (2, 2)).status == "yes"
    v = is_ncea(global_depolarizing(4, 0.9), (2, 2))
    assert v.status == "no"
    assert v.certificate["conditional_entropy"] == pytest.approx(isotropic_conditional_entropy(0.9, 2))
    assert is_ncea(identity_channel(4), (2, 2)).status == "no"
    with pytest.raises(DimensionError):
        is_ncea(identity_channel(4), (2, 3))


def test_ncea_search_path():
    # on a 2x2 partition that is not depolarizing-form the search is used
    assert is_ncea(local_depolarizing_pair(0.95), (2, 2), FAST).status == "no"
    v = is_ncea(local_depolarizing_pair(0.6), (2, 2), FAST)
    assert v.status == "inconclusive" and v.passes


def test_transpose_depolarizing_ncea():
    # at t=0 the output is maximally mixed; negative t cannot reach S < 0
    assert is_ncea(transpose_depolarizing(4, 0.2), (2, 2)).status == "yes"
    assert is_ncea(transpose_depolarizing(4, -1 / 3), (2, 2)).status == "yes"


def test_a_unital_examples():
    for p in (0.0, 0.4, 1.0):
        v = is_a_unital(global_depolarizing(4, p), (2, 2))
        assert v.status == "yes" and v.certificate["spanning_set"]
    assert is_a_unital(identity_channel(4), (2, 2)).status == "yes"
    v = is_a_unital(swap_channel(2), (2, 2))
    assert v.status == "no"
    np.testing.assert_allclose(np.array(v.certificate["counterexample_rho_B"]) @ [1, 1j], np.diag([1, 0]))


def test_bell_output_ppt():
    assert bell_output_ppt(global_depolarizing(4, 1 / 3), (2, 2)).status == "yes"
    assert bell_output_ppt(global_depolarizing(4, 0.34), (2, 2)).status == "no"


# thresholds


def test_threshold_examples():
    eb = threshold(family("depolarizing"), predicate("is_eb", family("depolarizing")))
    assert eb.value == pytest.approx(2 / 3, abs=1e-6) and eb.holds_above
    fam = family("depolarizing")
    nceb = threshold(fam, predicate("is_nceb", fam, COVARIANT))
    assert 0.810 <= 1 - 3 * nceb.value / 4 <= 0.812
    fam = family("global_depolarizing")
    ncea = threshold(fam, predicate("is_ncea", fam))
    assert ncea.value == pytest.approx(0.748, abs=1e-3) and not ncea.holds_above
    assert "keep convention" in ncea.convention
    assert ncea.describe().startswith("0.747614")


def test_threshold_non_monotone():
    fam = ChannelFamily("bump", lambda p: depolarizing(2, p), 0.0, 1.0, "noise")
    with pytest.raises(NonMonotoneError) as info:
        threshold(fam, lambda ch: 0.3 < depolarizing_noise(ch) < 0.6)
    assert len(info.value.probes) == 21
    with pytest.raises(NonMonotoneError):
        threshold(fam, lambda ch: True)


def depolarizing_noise(ch):
    # noise weight p from the identity Kraus weight 1 - 3p/4
    return (1 - abs(ch.kraus_ops[0][0, 0]) ** 2) * 4 / 3


def test_bisect_root():
    assert bisect_root(lambda x: x**2 - 2, 0, 2) == pytest.approx(np.sqrt(2), abs=1e-12)
    with pytest.raises(ValueError):
        bisect_root(lambda x: x**2 + 1, -1, 1)


def test_nceb_threshold_oracle():
    assert nceb_threshold_depolarizing(2) == pytest.approx(P_STAR, abs=1e-12)
    assert 1 - 3 * P_STAR / 4 == pytest.approx(0.81071, abs=1e-5)


def test_unknown_names():
    with pytest.raises(ValueError):
        family("amplitude_damping")
    with pytest.raises(ValueError):
        predicate("is_ncea", family("depolarizing"))
    with pytest.raises(ValueError):
        predicate("is_magic", family("depolarizing"))


# witness


def test_choi_distance_examples():
    d = depolarizing(2, 0.3)
    assert choi_distance_lower_bound(d, d) == pytest.approx(0, abs=1e-12)
    assert choi_distance_lower_bound(depolarizing(2, 0.2), depolarizing(2, 0.7)) == pytest.approx(0.75)
    assert choi_distance_lower_bound(identity_channel(2), replacer(maximally_mixed(2), 2)) == pytest.approx(1.5)
    with pytest.raises(DimensionError):
        choi_distance_lower_bound(identity_channel(2), identity_channel(3))


def test_witness_examples():
    w = non_nceb_witness(identity_channel(2), FAST)
    assert w.detected
    assert w.W == pytest.approx(1.5 * P_STAR, abs=1e-6)
    assert w.W == pytest.approx(0.3785792498304089, abs=1e-6)
    assert w.nearest_reference == pytest.approx(P_STAR, abs=1e-6)
    w = non_nceb_witness(depolarizing(2, 0.5), COVARIANT)
    assert not w.detected and w.W == 0.0
    w = non_nceb_witness(depolarizing(2, 0.1), COVARIANT)
    assert w.detected and w.to_dict()["witness_input"] is not None


# subset relations


def test_mib_implies_nceb(rng):
    for _ in range(10):
        ch = replacer(random_density((3,), rng), 2)
        assert is_mib(ch).passes and is_nceb(ch).passes


def test_holevo_eb_is_nceb(rng):
    for _ in range(20):
        ch = random_holevo_eb(2, 2, int(rng.integers(1, 5)), rng)
        assert is_eb(ch).passes
        assert is_nceb(ch).status == "yes"


def test_ppt_and_eb_qubit_channels_are_nceb(rng):
    hits = 0
    for _ in range(40):
        ch = compose_serial(random_channel(2, 2, 2, rng), depolarizing(2, float(rng.uniform(0.6, 1))))
        if is_ppt_channel(ch).passes and is_eb(ch).passes:
            hits += 1
            assert is_nceb(ch).passes
    assert hits > 5


# alpha family and global depolarizing structure


def test_alpha_threshold_peaks_at_maximal_entanglement():
    alphas = np.linspace(0, np.pi, 181)
    th = np.array([alpha_nceb_threshold(a) for a in alphas])
    top = th.max()
    assert th[45] == pytest.approx(top, abs=1e-9) and th[135] == pytest.approx(top, abs=1e-9)
    others = np.delete(th, [45, 135])
    assert np.all(others < top - 1e-6)
    assert top == pytest.approx(P_STAR, abs=1e-9)
    assert th[0] == 0.0 and th[90] == 0.0


def test_global_depolarizing_bell_matches_closed_form():
    phi = max_entangled(2).matrix
    for p in np.linspace(0, 1, 41):
        out = global_depolarizing(4, p).act(phi)
        assert conditional_entropy_matrix(out, (2, 2)) == pytest.approx(isotropic_conditional_entropy(p, 2),
                                                                       abs=1e-10)


def test_global_depolarizing_spectral_invariance(rng):
    phi = max_entangled(2).matrix
    for p in (0.2, 0.75, 0.9):
        ch = global_depolarizing(4, p)
        chi = ch.act(phi)
        ref_spec = herm_eigvals(chi)
        ref_cond = conditional_entropy_matrix(chi, (2, 2))
        for _ in range(20):
            u = np.kron(np.eye(2), random_unitary(2, rng))
            rotated = u @ phi @ u.conj().T
            np.testing.assert_allclose(herm_eigvals(ch.act(rotated)), ref_spec, atol=1e-10)
            psi = random_pure_state((4,), rng).matrix
            out = ch.act(psi)
            assert entropy_of_spectrum(herm_eigvals(out)) == pytest.approx(isotropic_entropy(p, 2), abs=1e-10)
            assert conditional_entropy_matrix(out, (2, 2)) >= ref_cond - 1e-9


def test_cross_convention_consistency():
    fam = family("global_depolarizing")
    ncea = threshold(fam, predicate("is_ncea", fam)).value
    assert abs(ncea - (1 - nceb_threshold_depolarizing(2))) < 1e-3


def test_compactness_boundary_channels():
    # the extreme values 0 and log d of the coherent information are attained
    assert channel_coherent_info(replacer(maximally_mixed(2), 2)).value == 0.0
    assert channel_coherent_info(identity_channel(3), FAST).value == pytest.approx(np.log2(3), abs=1e-6)


def test_non_kraus_channel_in_classifiers():
    ch = transpose_depolarizing(4, 0.1)
    assert is_ppt_channel(ch).status in ("yes", "no")
    assert isinstance(is_nceb(ch, FAST).status, str)


def test_kraus_channel_type_errors():
    with pytest.raises(DimensionError):
        is_a_unital(KrausChannel((np.eye(2),)), (2, 2))
