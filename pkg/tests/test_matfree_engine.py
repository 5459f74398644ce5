import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronspin.dense_linalg import eigh
from kronspin.errors import (
    CapacityError,
    ContractError,
    ConvergenceError,
    ShapeError,
)
from kronspin.hamiltonian_builder import (
    CouplingEdge,
    HamiltonianSpec,
    build_general,
    build_h2,
)
from kronspin.kron_core import kron
from kronspin.matfree_engine import (
    KronSum,
    KronTerm,
    _two_site_term,
    lanczos_extremal,
    matvec,
    spec_to_kronsum,
    to_dense,
    total_component_kronsum,
    total_spin_squared_kronsum,
    worker_count,
)
from kronspin.spin_algebra import pauli, total_component, total_spin_squared


def chain_spec(n: int, mu_b0: float = 1.0, j: float = 1.0) -> HamiltonianSpec:
    edges = tuple(CouplingEdge(k, k + 1, j) for k in range(1, n))
    return HamiltonianSpec(n, mu_b0, edges)


def random_spec(rng, n: int) -> HamiltonianSpec:
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    rng.shuffle(pairs)
    take = rng.integers(0, len(pairs) + 1)
    edges = tuple(CouplingEdge(i, j, rng.uniform(-2, 2)) for i, j in pairs[:take])
    return HamiltonianSpec(n, rng.uniform(-2, 2), edges)


class TestTermAndSumValidation:
    def test_active_slots(self):
        t = KronTerm(1.0, (None, pauli("x"), None, pauli("z")))
        assert t.active_slots == (1, 3)

    def test_non_finite_coefficient_rejected(self):
        with pytest.raises(ContractError):
            KronTerm(complex("inf"), (None,))

    def test_wrong_factor_shape_rejected(self):
        with pytest.raises(ShapeError):
            KronTerm(1.0, (np.eye(3),))

    def test_factor_count_must_match_sites(self):
        with pytest.raises(ShapeError):
            KronSum(3, (KronTerm(1.0, (None, None)),))

    def test_bad_site_count(self):
        with pytest.raises(ContractError):
            KronSum(0, ())

    def test_two_site_helper_rejects_equal_sites(self):
        with pytest.raises(ContractError):
            _two_site_term(1.0, pauli("x"), 2, pauli("x"), 2, 4)

    def test_dimension(self):
        assert KronSum(5, ()).dimension == 32


class TestToDense:
    def test_empty_sum_is_zero(self):
        assert np.array_equal(to_dense(KronSum(2, ())), np.zeros((4, 4)))

    def test_single_term(self):
        op = KronSum(2, (KronTerm(1.0, (pauli("x"), pauli("z"))),))
        assert np.array_equal(to_dense(op), kron(pauli("x"), pauli("z")))

    def test_identity_slots_fill_with_eye(self):
        op = KronSum(3, (KronTerm(2.0, (None, pauli("y"), None)),))
        want = 2.0 * kron(kron(np.eye(2), pauli("y")), np.eye(2))
        assert np.array_equal(to_dense(op), want)

    def test_matches_dense_builder_bitwise(self, rng):
        for n in (2, 3, 4):
            for _ in range(5):
                spec = random_spec(rng, n)
                assert np.array_equal(to_dense(spec_to_kronsum(spec)), build_general(spec))

    def test_capacity_cap(self):
        op = KronSum(13, (KronTerm(1.0, tuple([None] * 13)),))
        with pytest.raises(CapacityError):
            to_dense(op)


class TestTermCounts:
    def test_two_site_single_edge(self):
        spec = HamiltonianSpec(2, 1.0, (CouplingEdge(1, 2, 1.0),))
        assert len(spec_to_kronsum(spec).terms) == 5

    def test_three_site_triangle(self):
        spec = HamiltonianSpec(
            3, 1.0,
            (CouplingEdge(1, 2, 1.0), CouplingEdge(2, 3, 1.0), CouplingEdge(1, 3, 1.0)),
        )
        assert len(spec_to_kronsum(spec).terms) == 12

    def test_chain_count_formula(self):
        n = 6
        assert len(spec_to_kronsum(chain_spec(n)).terms) == n + 3 * (n - 1)


class TestMatvec:
    def test_identity_term_scales(self, rng):
        op = KronSum(3, (KronTerm(2.5, (None, None, None)),))
        x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        assert np.array_equal(matvec(op, x), 2.5 * x)

    def test_basis_column_matches_dense(self):
        spec = chain_spec(3, 0.7, -0.4)
        op = spec_to_kronsum(spec)
        dense = build_general(spec)
        e0 = np.zeros(8)
        e0[0] = 1.0
        assert np.array_equal(matvec(op, e0), dense[:, 0])

    def test_sz_eigenstate(self):
        n = 10
        op = total_component_kronsum("z", n)
        e0 = np.zeros(1 << n)
        e0[0] = 1.0
        got = matvec(op, e0)
        assert np.array_equal(got, (n / 2) * e0)

    def test_matches_dense_on_random_states(self, rng):
        for n in (2, 4, 6):
            spec = random_spec(rng, n)
            op = spec_to_kronsum(spec)
            dense = build_general(spec)
            for _ in range(3):
                x = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
                assert np.max(np.abs(matvec(op, x) - dense @ x)) < 1e-12

    def test_all_columns_match_dense_exactly(self, rng):
        spec = random_spec(rng, 4)
        op = spec_to_kronsum(spec)
        dense = build_general(spec)
        eye = np.eye(16, dtype=np.complex128)
        cols = np.stack([matvec(op, eye[:, k]) for k in range(16)], axis=1)
        assert np.array_equal(cols, dense)

    @given(st.integers(min_value=0, max_value=2 ** 31 - 1))
    @settings(max_examples=20)
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        spec = random_spec(rng, 4)
        op = spec_to_kronsum(spec)
        x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        y = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        a, b = complex(rng.uniform(-2, 2)), complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        lhs = matvec(op, a * x + b * y)
        rhs = a * matvec(op, x) + b * matvec(op, y)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_wrong_length_rejected(self):
        op = KronSum(3, ())
        with pytest.raises(ShapeError):
            matvec(op, np.zeros(4))

    def test_hermitian_inner_product_symmetry(self, rng):
        op = spec_to_kronsum(chain_spec(6))
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        lhs = np.vdot(x, matvec(op, y))
        rhs = np.conj(np.vdot(y, matvec(op, x)))
        assert abs(lhs - rhs) < 1e-11


class TestThreading:
    def test_worker_count_env_override(self, monkeypatch):
        monkeypatch.setenv("KRONSPIN_THREADS", "3")
        assert worker_count() == 3

    def test_worker_count_rejects_nonpositive(self, monkeypatch):
        monkeypatch.setenv("KRONSPIN_THREADS", "0")
        with pytest.raises(ValueError):
            worker_count()

    def test_worker_count_default_is_machine(self, monkeypatch):
        monkeypatch.delenv("KRONSPIN_THREADS", raising=False)
        assert worker_count() >= 1

    def test_results_bitwise_identical_across_worker_counts(self, monkeypatch):
        n = 16  # above the threading threshold so slabs actually split
        op = spec_to_kronsum(chain_spec(n, 0.9, 1.1))
        rng = np.random.default_rng(7)
        x = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        results = []
        for workers in ("1", "2", "4", "7"):
            monkeypatch.setenv("KRONSPIN_THREADS", workers)
            results.append(matvec(op, x))
        for r in results[1:]:
            assert np.array_equal(results[0], r)


class TestConservedKronsums:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_total_component_matches_dense(self, n):
        got = to_dense(total_component_kronsum("z", n))
        assert np.max(np.abs(got - total_component("z", n))) < 1e-15

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_total_spin_squared_matches_dense(self, n):
        got = to_dense(total_spin_squared_kronsum(n))
        assert np.max(np.abs(got - total_spin_squared(n))) < 1e-12

    def test_term_count_spin_squared(self):
        n = 5
        assert len(total_spin_squared_kronsum(n).terms) == 1 + 3 * (n * (n - 1) // 2)

    def test_bad_site_count(self):
        with pytest.raises(ContractError):
            total_component_kronsum("z", 0)
        with pytest.raises(ContractError):
            total_spin_squared_kronsum(0)


class TestLanczos:
    def test_h2_ground_state(self):
        op = spec_to_kronsum(HamiltonianSpec(2, 1.0, (CouplingEdge(1, 2, 1.0),)))
        s = lanczos_extremal(op, which="lowest", k=1)
        assert s.eigenvalues[0] == pytest.approx(-3.0, abs=1e-8)

    def test_h2_full_spectrum(self):
        op = spec_to_kronsum(HamiltonianSpec(2, 1.0, (CouplingEdge(1, 2, 1.0),)))
        s = lanczos_extremal(op, which="lowest", k=4)
        assert np.allclose(s.eigenvalues, [-3.0, -1.0, 1.0, 3.0], atol=1e-8)

    def test_highest_end(self):
        op = spec_to_kronsum(HamiltonianSpec(2, 1.0, (CouplingEdge(1, 2, 1.0),)))
        s = lanczos_extremal(op, which="highest", k=1)
        assert s.eigenvalues[0] == pytest.approx(3.0, abs=1e-8)

    def test_spin_squared_lowest_is_zero_sector(self):
        op = total_spin_squared_kronsum(6)
        s = lanczos_extremal(op, which="lowest", k=1, seed=3)
        assert s.eigenvalues[0] == pytest.approx(0.0, abs=1e-7)

    def test_four_site_chain_ground_state(self):
        op = spec_to_kronsum(chain_spec(4, 0.0, 1.0))
        s = lanczos_extremal(op, which="lowest", k=1)
        assert s.eigenvalues[0] == pytest.approx(-6.464101615137756, abs=1e-8)

    def test_matches_dense_solver(self):
        # pinned seeds so the drawn specs (degenerate or not) are stable
        for seed in (11, 12, 13):
            spec = random_spec(np.random.default_rng(seed), 6)
            op = spec_to_kronsum(spec)
            want = eigh(build_general(spec), want_vectors=False).eigenvalues
            s = lanczos_extremal(op, which="lowest", k=3, seed=11)
            assert np.max(np.abs(s.eigenvalues - want[:3])) < 1e-7

    def test_degenerate_extremal_values_keep_multiplicity(self):
        # field-only register: eigenvalues -mu_b0 * (n - 2 downs), so the
        # second-lowest level is n-fold degenerate and k = 3 must report it
        # twice, not climb to the next distinct level
        spec = HamiltonianSpec(n_sites=6, mu_b0=0.7)
        op = spec_to_kronsum(spec)
        s = lanczos_extremal(op, which="lowest", k=3, seed=11)
        assert np.allclose(s.eigenvalues, [-4.2, -2.8, -2.8], atol=1e-8)
        h = lanczos_extremal(op, which="highest", k=3, seed=11)
        assert np.allclose(h.eigenvalues, [2.8, 2.8, 4.2], atol=1e-8)

    def test_eigenvector_residual(self):
        op = spec_to_kronsum(chain_spec(5))
        s = lanczos_extremal(op, which="lowest", k=1)
        v = s.eigenvectors[:, 0]
        assert np.linalg.norm(matvec(op, v) - s.eigenvalues[0] * v) < 1e-7

    def test_deterministic_for_fixed_seed(self):
        op = spec_to_kronsum(chain_spec(5))
        s1 = lanczos_extremal(op, which="lowest", k=2, seed=42)
        s2 = lanczos_extremal(op, which="lowest", k=2, seed=42)
        assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
        assert np.array_equal(s1.eigenvectors, s2.eigenvectors)

    def test_degenerate_operator_identity_like(self):
        op = KronSum(4, (KronTerm(2.0, tuple([None] * 4)),))
        s = lanczos_extremal(op, which="lowest", k=3, seed=1)
        assert np.allclose(s.eigenvalues, [2.0, 2.0, 2.0], atol=1e-8)

    def test_k_out_of_range(self):
        op = spec_to_kronsum(chain_spec(2))
        with pytest.raises(ContractError):
            lanczos_extremal(op, k=0)
        with pytest.raises(ContractError):
            lanczos_extremal(op, k=5)

    def test_bad_which(self):
        with pytest.raises(ValueError):
            lanczos_extremal(spec_to_kronsum(chain_spec(2)), which="middle")

    def test_non_hermitian_rejected(self):
        raising = np.array([[0.0, 1.0], [0.0, 0.0]])
        op = KronSum(3, (KronTerm(1.0, (raising, None, None)),))
        with pytest.raises(ContractError, match="Hermitian"):
            lanczos_extremal(op)

    def test_non_convergence_carries_estimates(self):
        op = spec_to_kronsum(chain_spec(6))
        with pytest.raises(ConvergenceError) as err:
            lanczos_extremal(op, which="lowest", k=1, tol=1e-30, max_iter=8)
        estimates = err.value.estimates
        assert len(estimates) >= 1
        value, residual = estimates[0]
        assert np.isfinite(value) and residual > 0


class TestComplexityScaling:
    def test_matvec_cost_scales_near_linear_in_dimension(self):
        # best-of-5 timings on an n-site chain; amplitudes touched per matvec
        # is dim * sum(len(active) + 1), so log2(time) vs n should fit a line
        # of slope about 1 once overheads wash out.
        sizes = (15, 16, 17, 18)
        best = []
        for n in sizes:
            op = spec_to_kronsum(chain_spec(n))
            x = (np.arange(1 << n) % 7 - 3).astype(np.complex128)
            matvec(op, x)  # warm up allocations
            times = []
            for _ in range(5):
                t0 = time.perf_counter()
                matvec(op, x)
                times.append(time.perf_counter() - t0)
            best.append(min(times))
        slope = np.polyfit(sizes, np.log2(best), 1)[0]
        assert 0.5 < slope < 1.8, f"slope {slope:.2f} from timings {best}"
