import numpy as np
import pytest

from orbitcal.clifford import (
    ATOMIC_SU2,
    average_gates_per_clifford,
    clifford_table,
    compile_sequence,
    dump_decomposition_csv,
    generate_orbit_sequence,
    ideal_product,
    inverse,
    multiply,
    same_up_to_phase,
    su2_fidelity,
)


class TestGroupStructure:
    def test_order_24(self):
        assert len(clifford_table()) == 24

    def test_identity_is_index_zero(self):
        assert same_up_to_phase(clifford_table()[0].ideal_su2, np.eye(2))

    def test_closure_brute_force(self):
        table = clifford_table()
        for a in range(24):
            for b in range(24):
                k = multiply(a, b)
                product = table[a].ideal_su2 @ table[b].ideal_su2
                assert same_up_to_phase(product, table[k].ideal_su2)

    def test_every_inverse_in_table(self):
        for a in range(24):
            assert multiply(a, inverse(a)) == 0
            assert multiply(inverse(a), a) == 0

    def test_identity_neutral(self):
        for k in range(24):
            assert multiply(0, k) == k
            assert multiply(k, 0) == k

    def test_associativity_sampled(self, rng):
        triples = rng.integers(0, 24, size=(1000, 3))
        for a, b, c in triples:
            assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))

    def test_elements_distinct_up_to_phase(self):
        table = clifford_table()
        for a in range(24):
            for b in range(a + 1, 24):
                assert not same_up_to_phase(table[a].ideal_su2, table[b].ideal_su2)


class TestDecompositions:
    def test_compiled_matches_ideal_for_all_elements(self):
        for element in clifford_table():
            u = np.eye(2, dtype=complex)
            for gate in element.decomposition:
                u = ATOMIC_SU2[gate] @ u
            assert su2_fidelity(u, element.ideal_su2) > 1 - 1e-10

    def test_identity_uses_single_id_gate(self):
        assert clifford_table()[0].decomposition == ("Id",)

    def test_average_gate_count_in_band(self):
        assert 1.5 <= average_gates_per_clifford() <= 2.2

    def test_at_most_three_gates(self):
        assert max(len(e.decomposition) for e in clifford_table()) <= 3

    def test_dump_csv(self, tmp_path):
        path = tmp_path / "decomp.csv"
        dump_decomposition_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0].startswith("index")
        assert len(lines) == 25


class TestSequences:
    def test_length_one_ground_is_identity(self, rng):
        seq = generate_orbit_sequence(1, "ground", rng)
        assert seq.clifford_indices == (0,)

    @pytest.mark.parametrize("target,level", [("ground", 0), ("excited", 1)])
    def test_random_sequences_reach_target(self, target, level, rng):
        for _ in range(300):
            l = int(rng.integers(1, 81))
            seq = generate_orbit_sequence(l, target, rng)
            assert seq.length == l
            u = ideal_product(seq.clifford_indices)
            assert abs(u[level, 0]) ** 2 > 1 - 1e-10

    def test_deterministic_given_seed(self):
        a = generate_orbit_sequence(30, "excited", np.random.default_rng(99))
        b = generate_orbit_sequence(30, "excited", np.random.default_rng(99))
        assert a == b

    def test_excited_flip_uses_lowest_index(self, rng):
        table = clifford_table()
        for _ in range(50):
            seq = generate_orbit_sequence(int(rng.integers(1, 40)), "excited", rng)
            prefix = seq.clifford_indices[:-1]
            closing = seq.clifford_indices[-1]
            u_prefix = ideal_product(prefix)
            candidates = [
                f
                for f in range(24)
                if abs((table[f].ideal_su2 @ u_prefix)[1, 0]) > 1 - 1e-9
            ]
            assert closing == min(candidates)

    def test_invalid_length_rejected(self, rng):
        with pytest.raises(ValueError):
            generate_orbit_sequence(0, "ground", rng)

    def test_invalid_target_rejected(self, rng):
        with pytest.raises(ValueError):
            generate_orbit_sequence(3, "plus", rng)


class TestCompileSequence:
    def test_concatenates_decompositions(self, rng):
        seq = generate_orbit_sequence(10, "ground", rng)
        gates = compile_sequence(seq)
        table = clifford_table()
        expected = []
        for k in seq.clifford_indices:
            expected.extend(table[k].decomposition)
        assert gates == expected

    def test_compiled_product_reaches_target(self, rng):
        for target, level in (("ground", 0), ("excited", 1)):
            seq = generate_orbit_sequence(15, target, rng)
            u = np.eye(2, dtype=complex)
            for gate in compile_sequence(seq):
                u = ATOMIC_SU2[gate] @ u
            assert abs(u[level, 0]) ** 2 > 1 - 1e-10
