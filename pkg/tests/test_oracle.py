import pytest

from lexmatch import (
    Allocation,
    BudgetExceeded,
    EnumerationBudget,
    brute_force_lex_bottom,
    brute_force_lex_top,
    brute_force_stable,
    build_instance,
    definition_blocking_exists,
    enumerate_feasible,
    max_max_lex,
    random_instance,
    realized_utilities,
)


def count_feasible(instance):
    return sum(1 for _ in enumerate_feasible(instance))


class TestEnumeration:
    def test_single_pair_has_two_allocations(self):
        # assign the student or leave them out
        inst = build_instance(1, 1, [1], [[1.0]])
        assert count_feasible(inst) == 2

    def test_two_by_two_unit_capacities(self, two_by_two):
        # 3 options per student = 9 combos, minus the 2 double-booked ones
        assert count_feasible(two_by_two) == 7

    def test_three_students_one_school_two_seats(self):
        inst = build_instance(3, 1, [2], [[5.0], [3.0], [1.0]])
        # choose any subset of size <= 2 to assign
        assert count_feasible(inst) == 7

    def test_respects_capacities(self):
        inst = build_instance(2, 1, [1], [[2.0], [1.0]])
        for alloc in enumerate_feasible(inst):
            assert len(alloc.rosters[0]) <= 1

    def test_student_budget(self):
        inst = random_instance(8, 2, seed=0)
        with pytest.raises(BudgetExceeded):
            list(enumerate_feasible(inst, EnumerationBudget(max_students=7)))

    def test_allocation_budget(self):
        inst = random_instance(5, 3, seed=0)
        with pytest.raises(BudgetExceeded):
            list(
                enumerate_feasible(
                    inst, EnumerationBudget(max_allocations=10)
                )
            )


class TestBlockingOracle:
    def test_swapped_two_by_two_blocks(self, two_by_two):
        assert definition_blocking_exists(two_by_two, [1, 0])

    def test_greedy_output_does_not_block(self, two_by_two):
        assert not definition_blocking_exists(two_by_two, [0, 1])

    def test_unassigned_student_with_spare_seat_blocks(self):
        inst = build_instance(1, 1, [1], [[1.0]])
        assert definition_blocking_exists(inst, [None])


class TestBruteForce:
    def test_stable_is_singleton_greedy(self, two_by_two):
        stable = brute_force_stable(two_by_two)
        greedy, _ = max_max_lex(two_by_two)
        assert [a.assignment for a in stable] == [greedy.assignment]

    def test_lex_top_two_by_two(self, two_by_two):
        assert brute_force_lex_top(two_by_two).assignment == (0, 1)

    def test_lex_bottom_two_by_two(self, two_by_two):
        assert brute_force_lex_bottom(two_by_two).assignment == (1, 0)

    def test_lex_bottom_keeps_max_cardinality(self):
        # leaving a student out is never lex-bottom optimal here, even though
        # the unassigned sentinel would raise the minimum finite utility
        inst = build_instance(3, 1, [2], [[5.0], [3.0], [1.0]])
        bottom = brute_force_lex_bottom(inst)
        assert bottom.n_assigned == 2

    def test_lex_top_dominates_every_feasible(self):
        inst = random_instance(5, 2, seed=77)
        top_vec = realized_utilities(inst, brute_force_lex_top(inst)).sorted_descending()
        from lexmatch import SECOND_GREATER, lex_compare_top

        for alloc in enumerate_feasible(inst):
            vec = realized_utilities(inst, alloc).sorted_descending()
            assert lex_compare_top(top_vec, list(vec)) != SECOND_GREATER

    def test_oracle_triangle_on_small_instances(self, small_corpus):
        for inst in small_corpus[:25]:
            stable = brute_force_stable(inst)
            greedy, _ = max_max_lex(inst)
            assert len(stable) == 1
            assert stable[0].assignment == greedy.assignment
            assert brute_force_lex_top(inst).assignment == greedy.assignment
