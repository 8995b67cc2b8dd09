import numpy as np
import pytest

from statelift import (
    ConstraintViolation,
    Inconclusive,
    Lifting,
    Product,
    ViolatesPositivity,
    ViolatesTrace,
    WitnessConfig,
    analyze,
    apply_lifting,
    basis_g,
    check_hermiticity_preserving,
    check_trace_constraint,
    components,
    diag_mixing_positive,
    diag_mixing_positive_scan,
    extract_reference,
    kraus_lifting,
    kron,
    partial_trace_env,
    perturbed_product_lifting,
    positivity_witness_search,
    product_lifting,
    product_residual,
    random_density,
    random_perturbation,
    reassemble,
    structure_report,
    trace_norm,
    vec,
)
from statelift.liftings import ptrace_env_superop
from statelift.rng import philox_rng


def swap_matrix(d):
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


# --- construction and application -----------------------------------------


def test_product_lifting_matches_kron():
    d = random_density(2, seed=1)
    f = product_lifting(d, 3)
    rng = philox_rng(2)
    for _ in range(5):
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.max(np.abs(apply_lifting(f, x) - kron(x, d))) < 1e-14


def test_product_lifting_right_inverse():
    d = random_density(3, seed=3)
    f = product_lifting(d, 2)
    for k in range(10):
        rho = random_density(2, seed=30 + k)
        back = partial_trace_env(apply_lifting(f, rho), 2, 3)
        assert trace_norm(back - rho) < 1e-12


def test_product_lifting_rejects_invalid_reference():
    with pytest.raises(ConstraintViolation):
        product_lifting(np.diag([2.0, 0.0]).astype(complex), 2)


def test_apply_linearity():
    f = product_lifting(random_density(2, seed=4), 2)
    rng = philox_rng(5)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    a, b = 0.7 - 0.1j, -0.4 + 0.9j
    lhs = apply_lifting(f, a * x + b * y)
    rhs = a * apply_lifting(f, x) + b * apply_lifting(f, y)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_apply_on_basis_element():
    d = random_density(2, seed=6)
    f = product_lifting(d, 3)
    g = basis_g(0, 1, 3)
    assert np.max(np.abs(apply_lifting(f, g) - kron(g, d))) == 0.0


def test_component_bookkeeping_exact():
    d = random_density(2, seed=7)
    f = product_lifting(d, 3)
    w = apply_lifting(f, basis_g(1, 2, 3))
    blocks = components(w, 3, 2)
    # convention: C[k, l, i, j] = W[k*de + i, l*de + j]
    assert blocks[1, 2, 0, 1] == w[2 * 1 + 0, 2 * 2 + 1]
    assert np.array_equal(reassemble(blocks), w)


def test_component_convention_inner_products():
    # C[k, l, i, j] = <e_k (x) f_i, W (e_l (x) f_j)> against explicit vectors
    rng = philox_rng(99)
    ds, de = 2, 3
    w = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    blocks = components(w, ds, de)
    for k in range(ds):
        for l in range(ds):
            for i in range(de):
                for j in range(de):
                    left = np.kron(np.eye(ds)[k], np.eye(de)[i])
                    right = np.kron(np.eye(ds)[l], np.eye(de)[j])
                    assert blocks[k, l, i, j] == left.conj() @ w @ right


# --- kraus liftings ---------------------------------------------------------


def test_kraus_identity_family_is_product():
    d = random_density(2, seed=8)
    fk = kraus_lifting([np.eye(6)], d, 3)
    fd = product_lifting(d, 3)
    assert np.array_equal(fk.matrix, fd.matrix)


def test_kraus_unitary_preserves_state():
    d = random_density(2, seed=9)
    h = philox_rng(10).standard_normal((4, 4))
    h = h + h.T
    vals, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(1j * vals)) @ vecs.conj().T
    f = kraus_lifting([u.astype(complex)], d, 2)
    rho = random_density(2, seed=11)
    w = apply_lifting(f, rho)
    assert abs(np.trace(w) - 1.0) < 1e-12
    assert np.linalg.eigvalsh((w + w.conj().T) / 2)[0] > -1e-12


def test_kraus_rejects_unnormalized():
    d = random_density(2, seed=12)
    with pytest.raises(ConstraintViolation, match="not normalized"):
        kraus_lifting([1.1 * np.eye(4)], d, 2)


def test_kraus_swap_violates_trace():
    # swapping system and environment is unitary but not a right inverse
    d = random_density(2, seed=13)
    f = kraus_lifting([swap_matrix(2)], d, 2)
    verdict = analyze(f)
    assert isinstance(verdict, ViolatesTrace)
    assert verdict.max_deviation > 0.1


# --- constraint checks ------------------------------------------------------


def test_trace_constraint_product_and_perturbed():
    d = random_density(2, seed=14)
    f = product_lifting(d, 2)
    assert check_trace_constraint(f) < 1e-14
    eps = 1e-3
    bumped = f.matrix.copy()
    bumped[0, 0] += eps  # shifts a diagonal block sum of the corner image
    assert check_trace_constraint(Lifting(2, 2, bumped)) >= eps


def test_hermiticity_check_product_and_defect():
    d = random_density(3, seed=15)
    f = product_lifting(d, 2)
    assert check_hermiticity_preserving(f) < 1e-14
    defect = np.zeros((6, 6), dtype=complex)
    defect[0, 3] = 1.0j  # anti-Hermitian contribution to the image of E_00
    bumped = f.matrix.copy()
    bumped[:, 0] += vec(defect)
    assert check_hermiticity_preserving(Lifting(2, 3, bumped)) > 1.0


# --- reference extraction -----------------------------------------------------


def test_extract_reference_product():
    d = random_density(3, seed=16)
    f = product_lifting(d, 2)
    assert np.array_equal(extract_reference(f), d)


def test_extract_reference_mixture():
    d1 = random_density(2, seed=17)
    d2 = random_density(2, seed=18)
    f1 = product_lifting(d1, 3)
    f2 = product_lifting(d2, 3)
    alpha = 0.35
    mix = Lifting(3, 2, alpha * f1.matrix + (1 - alpha) * f2.matrix)
    got = extract_reference(mix)
    assert np.max(np.abs(got - (alpha * d1 + (1 - alpha) * d2))) < 1e-12
    assert abs(np.trace(got) - 1.0) < 1e-12


# --- positivity witness search ------------------------------------------------


def test_witness_search_product_is_clean():
    f = product_lifting(random_density(2, seed=19), 3)
    assert positivity_witness_search(f) is None


def test_witness_search_finds_perturbation():
    d = random_density(2, seed=20)
    f = perturbed_product_lifting(d, 3, 1e-2, seed=21)
    witness = positivity_witness_search(f)
    assert witness is not None
    assert witness.min_eigenvalue < 0
    # confirm independently: the image of the witness state is negative
    w = apply_lifting(f, witness.state)
    assert np.linalg.eigvalsh((w + w.conj().T) / 2)[0] < 0
    # and the witness input is a genuine state
    assert abs(np.trace(witness.state) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(witness.state)[0] > -1e-12


def test_witness_found_by_boundary_family_alone():
    # the structured family suffices; no reliance on the random backstop
    no_backstop = WitnessConfig(extra=0)
    for k in range(20):
        d = random_density(2, seed=400 + k)
        f = perturbed_product_lifting(d, 3, 1e-2, seed=500 + k)
        verdict = analyze(f, witness_config=no_backstop)
        assert isinstance(verdict, ViolatesPositivity)


def _directional_perturbation(ds, de, target, image):
    """Map the Hermitian basis element `target` to `image`, all others to zero."""
    from statelift.states import hermitian_basis

    src = hermitian_basis(ds)
    g_cols = np.column_stack([vec(h) for h in src])
    coeffs = np.linalg.solve(g_cols, vec(target))
    idx = int(np.argmax(np.abs(coeffs)))
    assert abs(coeffs[idx] - 1.0) < 1e-12  # target must be a family member
    dual_rows = np.linalg.inv(g_cols)
    return np.outer(vec(image), dual_rows[idx])


def test_witness_search_catches_structured_violations():
    # perturbations concentrated on a single basis image, breaking one block
    # relation at a time; all must be caught by the structured family alone
    from statelift import basis_g_star

    ds, de = 2, 2
    d = random_density(de, seed=600)
    base = product_lifting(d, ds)
    t_diag = np.diag([1.0, -1.0]).astype(complex)
    t_off = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    cases = [
        (basis_g(0, 1, ds), kron(basis_g(0, 1, ds), t_diag)),      # cross-pair reference
        (basis_g(0, 1, ds), kron(basis_g(0, 1, ds), t_off)),
        (basis_g_star(0, 1, ds), kron(basis_g_star(0, 1, ds), t_diag)),  # star phases
        (basis_g_star(0, 1, ds), kron(basis_g_star(0, 1, ds), t_off)),
        (basis_g(1, 1, ds), kron(basis_g(1, 1, ds), t_diag)),      # diagonal corner
        (basis_g(0, 1, ds), kron(np.diag([1.0, -1.0]).astype(complex), t_diag)),  # asymmetry
    ]
    no_backstop = WitnessConfig(extra=0)
    for target, image in cases:
        delta = _directional_perturbation(ds, de, target, image)
        f = Lifting(ds, de, base.matrix + 1e-2 * delta)
        # images of Hermitian inputs stay Hermitian and the trace constraint holds
        assert check_hermiticity_preserving(f) < 1e-12
        assert check_trace_constraint(f) < 1e-12
        verdict = analyze(f, witness_config=no_backstop)
        assert isinstance(verdict, ViolatesPositivity)


def test_witness_search_mixture_is_clean():
    f1 = product_lifting(random_density(2, seed=22), 2)
    f2 = product_lifting(random_density(2, seed=23), 2)
    mix = Lifting(2, 2, 0.5 * f1.matrix + 0.5 * f2.matrix)
    assert positivity_witness_search(mix) is None


# --- structure diagnostics ------------------------------------------------------


def test_structure_report_product_is_exact():
    f = product_lifting(random_density(2, seed=24), 3)
    report = structure_report(f)
    assert report.max_deviation == 0.0


def test_structure_report_mixture():
    f1 = product_lifting(random_density(3, seed=25), 2)
    f2 = product_lifting(random_density(3, seed=26), 2)
    mix = Lifting(2, 3, 0.4 * f1.matrix + 0.6 * f2.matrix)
    assert structure_report(mix).max_deviation < 1e-10


def test_structure_report_flags_violations():
    d = random_density(2, seed=27)
    f = perturbed_product_lifting(d, 3, 1e-2, seed=28)
    assert structure_report(f).max_deviation > 1e-6


# --- analyzer -------------------------------------------------------------------


def test_analyze_product():
    d = random_density(3, seed=29)
    f = product_lifting(d, 3)
    verdict = analyze(f)
    assert isinstance(verdict, Product)
    assert verdict.residual <= 1e-10
    assert trace_norm(verdict.reference - d) <= 1e-10


def test_analyze_convex_mixture():
    d1 = random_density(2, seed=30)
    d2 = random_density(2, seed=31)
    alpha = 0.25
    mix = Lifting(
        3, 2, alpha * product_lifting(d1, 3).matrix + (1 - alpha) * product_lifting(d2, 3).matrix
    )
    verdict = analyze(mix)
    assert isinstance(verdict, Product)
    assert trace_norm(verdict.reference - (alpha * d1 + (1 - alpha) * d2)) < 1e-10


def test_analyze_perturbed_violates_positivity():
    d = random_density(2, seed=32)
    f = perturbed_product_lifting(d, 3, 1e-2, seed=33)
    verdict = analyze(f)
    assert isinstance(verdict, ViolatesPositivity)
    w = apply_lifting(f, verdict.witness)
    assert np.linalg.eigvalsh((w + w.conj().T) / 2)[0] < 0


def test_analyze_entangling_kraus_violates_trace():
    d = random_density(2, seed=34)
    f = kraus_lifting([swap_matrix(2)], d, 2)
    assert isinstance(analyze(f), ViolatesTrace)


def test_factorization_property_with_many_random_densities():
    # passing hermiticity + trace + an extended witness sweep forces the
    # product form within the analyzer residual
    d1 = random_density(2, seed=35)
    d2 = random_density(2, seed=36)
    for f in (
        product_lifting(d1, 2),
        Lifting(2, 2, 0.6 * product_lifting(d1, 2).matrix + 0.4 * product_lifting(d2, 2).matrix),
    ):
        assert check_hermiticity_preserving(f) <= 1e-9
        assert check_trace_constraint(f) <= 1e-10
        config = WitnessConfig(extra=1000)
        assert positivity_witness_search(f, config=config) is None
        assert product_residual(f, extract_reference(f)) <= 1e-8


# --- diagonal-mixing criterion ----------------------------------------------------


def test_diag_mixing_closed_form_cases():
    assert diag_mixing_positive(0.5, 1.0, 0.5)
    assert not diag_mixing_positive(1.0, 0.5, 1.0)
    for b in (0.0, 0.3, 2.0):
        assert diag_mixing_positive(0.0, b, 0.0)


def test_diag_mixing_scan_cases():
    assert diag_mixing_positive_scan(0.5, 1.0, 0.5)
    assert not diag_mixing_positive_scan(1.0, 0.5, 1.0)  # a > b
    assert not diag_mixing_positive_scan(0.5, 1.0, 0.6)  # a != c
    for b in (0.0, 0.3, 2.0):
        assert diag_mixing_positive_scan(0.0, b, 0.0)


def test_diag_mixing_rejects_negative():
    with pytest.raises(ConstraintViolation):
        diag_mixing_positive(-0.1, 1.0, 0.5)
    with pytest.raises(ConstraintViolation):
        diag_mixing_positive_scan(0.1, -1.0, 0.5)


def test_diag_mixing_agreement_sweep():
    rng = philox_rng(37)
    for _ in range(500):
        a, b, c = rng.uniform(0.0, 2.0, 3)
        closed = diag_mixing_positive(a, b, c)
        scanned = diag_mixing_positive_scan(a, b, c)
        if closed != scanned:
            assert min(abs(a - c), abs(a - b)) <= 1e-6
        else:
            assert closed == scanned


# --- perturbation construction -----------------------------------------------------


def test_random_perturbation_properties():
    delta = random_perturbation(2, 3, seed=38)
    assert abs(np.linalg.norm(delta) - 1.0) < 1e-12
    ptr = ptrace_env_superop(2, 3)
    # annihilated by the trace constraint
    assert np.max(np.abs(ptr @ delta)) < 1e-12
    # Hermiticity preserving on a Hermitian input
    from statelift import unvec
    from statelift.states import random_hermitian

    h = random_hermitian(2, seed=39)
    img = unvec(delta @ vec(h), 6)
    assert np.max(np.abs(img - img.conj().T)) < 1e-12


def test_perturbed_lifting_stays_in_hypothesis_set():
    d = random_density(2, seed=40)
    f = perturbed_product_lifting(d, 3, 1e-2, seed=41)
    assert check_trace_constraint(f) <= 1e-10
    assert check_hermiticity_preserving(f) <= 1e-9
