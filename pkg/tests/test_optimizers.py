import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitcal.optimizers import (
    ALGORITHMS,
    AnnealingParams,
    CmaesParams,
    DifferentialEvolutionParams,
    NelderMeadParams,
    OnePlusOneParams,
    PowellParams,
    clamp_to_bounds,
    default_population_size,
    make_optimizer,
    powell_new,
)
from orbitcal.optimizers.annealing import acceptance_probability

ALL_TAGS = tuple(ALGORITHMS)


def box(dim, lo=-5.0, hi=10.0):
    return np.full(dim, lo), np.full(dim, hi)


def sphere_batch(batch):
    return np.sum(np.asarray(batch) ** 2, axis=1)


def run_sphere(tag, dim, budget, seed, hyperparams=None, x0=None):
    opt = make_optimizer(tag, dim, box(dim), seed, x0=x0, hyperparams=hyperparams)
    best = np.inf
    evals = 0
    while evals < budget:
        batch = opt.ask()
        losses = sphere_batch(batch)
        take = min(len(batch), budget - evals)
        best = min(best, losses[:take].min())
        evals += take
        if take < len(batch):
            break
        opt.tell(batch, losses)
    return best, opt


def drive(opt, fn, rounds):
    """Feed ``rounds`` ask/tell cycles; returns the concatenated asks."""
    asks = []
    for _ in range(rounds):
        batch = opt.ask()
        asks.append(batch.copy())
        opt.tell(batch, fn(batch))
    return np.concatenate(asks)


class TestContract:
    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_ask_twice_raises(self, tag):
        opt = make_optimizer(tag, 3, box(3), 0)
        opt.ask()
        with pytest.raises(RuntimeError, match="before tell"):
            opt.ask()

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_tell_without_ask_raises(self, tag):
        opt = make_optimizer(tag, 3, box(3), 0)
        with pytest.raises(RuntimeError, match="without a preceding ask"):
            opt.tell(np.zeros((1, 3)), [0.0])

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_candidates_within_bounds(self, tag):
        lo, hi = box(4)
        opt = make_optimizer(tag, 4, (lo, hi), 7)
        for _ in range(6):
            batch = opt.ask()
            assert np.all(batch >= lo) and np.all(batch <= hi)
            opt.tell(batch, sphere_batch(batch))

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_recommend_only_after_tell(self, tag):
        opt = make_optimizer(tag, 2, box(2), 3)
        with pytest.raises(RuntimeError):
            opt.recommend()
        batch = opt.ask()
        opt.tell(batch, sphere_batch(batch))
        rec = opt.recommend()
        assert any(np.array_equal(rec, row) for row in batch)

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_recommendation_monotone(self, tag):
        opt = make_optimizer(tag, 3, box(3), 11)
        best_losses = []
        for _ in range(8):
            batch = opt.ask()
            losses = sphere_batch(batch)
            opt.tell(batch, losses)
            best_losses.append(opt.best_loss)
        assert all(b >= a for a, b in zip(best_losses[1:], best_losses))

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_determinism_byte_exact(self, tag):
        a = make_optimizer(tag, 3, box(3), 42)
        b = make_optimizer(tag, 3, box(3), 42)
        for _ in range(6):
            batch_a, batch_b = a.ask(), b.ask()
            np.testing.assert_array_equal(batch_a, batch_b)
            losses = sphere_batch(batch_a)
            a.tell(batch_a, losses)
            b.tell(batch_b, losses)

    @pytest.mark.parametrize("tag", ("cmaes", "nelder_mead", "one_plus_one", "differential_evolution"))
    def test_rank_invariance(self, tag):
        a = make_optimizer(tag, 3, box(3), 5)
        b = make_optimizer(tag, 3, box(3), 5)
        for _ in range(8):
            batch_a, batch_b = a.ask(), b.ask()
            np.testing.assert_array_equal(batch_a, batch_b)
            losses = sphere_batch(batch_a)
            a.tell(batch_a, losses)
            b.tell(batch_b, 3.0 * losses + 17.0)  # strictly monotone transform

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_evals_used_counts(self, tag):
        opt = make_optimizer(tag, 3, box(3), 1)
        total = 0
        for _ in range(4):
            batch = opt.ask()
            opt.tell(batch, sphere_batch(batch))
            total += len(batch)
        assert opt.evals_used == total

    def test_diagnostics_csv(self, tmp_path):
        _, opt = run_sphere("cmaes", 3, 120, 0)
        path = tmp_path / "diag.csv"
        opt.write_diagnostics_csv(path)
        header = path.read_text().splitlines()[0]
        assert "sigma" in header and "cov_condition" in header


class TestClampToBounds:
    def test_inside_unchanged(self):
        x = np.array([1.0, 2.0])
        np.testing.assert_array_equal(clamp_to_bounds(x, box(2)), x)

    def test_below_lower_clamps_coordinate(self):
        lo, hi = box(4)
        x = np.array([0.0, 0.0, 0.0, -7.0])
        assert clamp_to_bounds(x, (lo, hi))[3] == lo[3]

    @given(st.lists(st.floats(-100, 100), min_size=3, max_size=3))
    def test_idempotent(self, values):
        x = np.array(values)
        once = clamp_to_bounds(x, box(3))
        np.testing.assert_array_equal(clamp_to_bounds(once, box(3)), once)


class TestCmaes:
    def test_one_dimensional_quadratic(self):
        for seed in range(3):
            best, opt = run_sphere("cmaes", 1, 600, seed, x0=np.array([1.0]))
            assert abs(opt.recommend()[0]) < 1e-6

    def test_ten_dimensional_sphere_all_seeds(self):
        hp = CmaesParams(population_size=10, initial_sigma=0.5)
        for seed in range(20):
            best, _ = run_sphere("cmaes", 10, 4000, seed, hp, x0=np.ones(10))
            assert best < 1e-10

    def test_constant_shift_leaves_asks_identical(self):
        a = make_optimizer("cmaes", 4, box(4), 9)
        b = make_optimizer("cmaes", 4, box(4), 9)
        for _ in range(10):
            batch_a, batch_b = a.ask(), b.ask()
            np.testing.assert_array_equal(batch_a, batch_b)
            losses = sphere_batch(batch_a)
            a.tell(batch_a, losses)
            b.tell(batch_b, losses + 123.456)

    def test_default_population_size(self):
        assert default_population_size(10) == 4 + int(3 * np.log(10))
        opt = make_optimizer("cmaes", 10, box(10), 0)
        assert len(opt.ask()) == default_population_size(10)

    def test_population_size_validation(self):
        with pytest.raises(ValueError):
            CmaesParams(population_size=1)


class TestNelderMead:
    def test_two_dimensional_sphere(self):
        hp = NelderMeadParams(initial_sigma=0.5)
        best, _ = run_sphere("nelder_mead", 2, 200, 0, hp, x0=np.array([1.0, 1.0]))
        assert best < 1e-8

    def test_identical_losses_trigger_shrink(self):
        opt = make_optimizer("nelder_mead", 3, box(3), 0)
        batch = opt.ask()  # initial simplex
        opt.tell(batch, np.zeros(len(batch)))
        next_batch = opt.ask()  # shrink re-evaluates d vertices
        assert len(next_batch) == 3
        assert opt.operations[-1] == "shrink"

    def test_reflection_hand_example(self):
        # simplex {(0,0),(1,0),(0,1)} with worst (0,0): reflect to (1,1)
        lo, hi = np.zeros(2), np.ones(2) * 2.0
        opt = make_optimizer("nelder_mead", 2, (lo, hi), 0, x0=np.zeros(2))
        batch = opt.ask()
        vertices = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        np.testing.assert_allclose(batch, np.stack(vertices) * 0.1, atol=1e-12)
        # rank: (1,0) best, (0,1) middle, (0,0) worst
        opt.tell(batch, [3.0, 1.0, 2.0])
        reflected = opt.ask()
        np.testing.assert_allclose(reflected[0], np.array([0.1, 0.1]), atol=1e-12)

    def test_degenerate_simplex_reinitialized(self):
        opt = make_optimizer("nelder_mead", 2, box(2), 0)
        gen = opt
        batch = gen.ask()
        gen.tell(batch, [1.0, 2.0, 3.0])
        # force degeneracy by collapsing internal state through many shrinks
        for _ in range(600):
            batch = gen.ask()
            gen.tell(batch, np.zeros(len(batch)))
            if gen.warning_flags:
                break
        assert any("degenerate" in w for w in gen.warning_flags)


class TestPowell:
    def test_no_hyperparameters(self):
        assert PowellParams() == PowellParams()

    def test_separable_quadratic_two_cycles(self):
        weights = np.array([1.0, 4.0, 0.25])
        opt = powell_new(3, box(3), 0, x0=np.array([1.0, 1.0, 1.0]))
        best = np.inf
        evals = 0
        # two cycles of line searches fit comfortably in 350 evaluations
        while evals < 350:
            batch = opt.ask()
            losses = [float(np.sum(weights * row**2)) for row in batch]
            opt.tell(batch, losses)
            best = min(best, min(losses))
            evals += len(batch)
        assert best < 1e-10

    def test_four_dimensional_rosenbrock(self):
        def rosen(batch):
            out = []
            for x in batch:
                out.append(
                    float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))
                )
            return out

        opt = make_optimizer("powell", 4, box(4, -2.0, 2.0), 0, x0=np.zeros(4))
        best = np.inf
        evals = 0
        while evals < 5000:
            batch = opt.ask()
            losses = rosen(batch)
            opt.tell(batch, losses)
            best = min(best, min(losses))
            evals += len(batch)
        assert best < 1e-6

    def test_direction_replacement_follows_biggest_drop(self):
        # correlated quadratic forces direction-set updates
        h = np.array([[4.0, 1.5, 0.0], [1.5, 2.0, 0.9], [0.0, 0.9, 1.0]])

        def f(batch):
            return [float(x @ h @ x) for x in batch]

        opt = make_optimizer("powell", 3, box(3, -2.0, 2.0), 0, x0=np.array([1.0, -1.0, 1.0]))
        evals = 0
        while evals < 3000:
            batch = opt.ask()
            opt.tell(batch, f(batch))
            evals += len(batch)
        assert opt.replacement_log, "no direction replacement happened"
        for _, replaced, drops in opt.replacement_log:
            assert replaced == int(np.argmax(drops))


class TestOnePlusOne:
    def test_success_rate_self_regulates(self):
        opt = make_optimizer(
            "one_plus_one", 1, box(1, -5.0, 5.0), 2, x0=np.array([2.0]),
            hyperparams=OnePlusOneParams(initial_sigma=0.3),
        )
        steps = 2000
        batch = opt.ask()
        opt.tell(batch, sphere_batch(batch))  # parent evaluation
        for _ in range(steps):
            batch = opt.ask()
            opt.tell(batch, sphere_batch(batch))
        assert 0.1 <= opt.successes / steps <= 0.35

    def test_elitism_parent_unchanged_on_worse_child(self):
        opt = make_optimizer("one_plus_one", 2, box(2), 4, x0=np.array([1.0, 2.0]))
        batch = opt.ask()
        opt.tell(batch, [1.0])  # parent evaluated
        batch = opt.ask()
        opt.tell(batch, [5.0])  # worse child rejected
        np.testing.assert_allclose(opt.parent, [1.0, 2.0], atol=1e-12)
        batch = opt.ask()
        opt.tell(batch, [7.0])
        np.testing.assert_allclose(opt.parent, [1.0, 2.0], atol=1e-12)
        # after two failures sigma must have shrunk twice
        c = 1.0 / np.sqrt(3.0)
        assert opt.sigma == pytest.approx(0.1 * np.exp(-c / 2), rel=1e-12)

    def test_sigma_strictly_decreases_without_successes(self):
        opt = make_optimizer("one_plus_one", 3, box(3), 8)
        batch = opt.ask()
        opt.tell(batch, [0.0])  # parent loss 0: every child fails
        sigmas = []
        for _ in range(100):
            batch = opt.ask()
            opt.tell(batch, [1.0])
            sigmas.append(opt.sigma)
        assert all(b < a for a, b in zip(sigmas, sigmas[1:]))


class TestDifferentialEvolution:
    def test_population_validation(self):
        with pytest.raises(ValueError):
            DifferentialEvolutionParams(population_size=3)

    def test_zero_weight_zero_crossover_single_coordinate(self):
        hp = DifferentialEvolutionParams(
            initial_sigma=0.1, population_size=6, crossover_rate=0.0, differential_weight=0.0
        )
        opt = make_optimizer("differential_evolution", 5, box(5), 3, hyperparams=hp)
        parents = opt.ask()
        opt.tell(parents, sphere_batch(parents))
        trials = opt.ask()
        for parent, trial in zip(parents, trials):
            assert np.sum(parent != trial) == 1

    def test_population_best_monotone(self):
        opt = make_optimizer("differential_evolution", 4, box(4), 6)
        bests = []
        for _ in range(25):
            batch = opt.ask()
            losses = sphere_batch(batch)
            opt.tell(batch, losses)
            if opt.diagnostics:
                bests.append(opt.diagnostics[-1]["population_best"])
        assert all(b <= a for a, b in zip(bests, bests[1:]))

    def test_batch_is_whole_population(self):
        hp = DifferentialEvolutionParams(population_size=9)
        opt = make_optimizer("differential_evolution", 3, box(3), 0, hyperparams=hp)
        assert len(opt.ask()) == 9


class TestSimulatedAnnealing:
    def test_acceptance_probability_rule(self):
        assert acceptance_probability(0.0, 1.0) == 1.0
        assert acceptance_probability(-3.0, 1.0) == 1.0
        assert acceptance_probability(1.0, 1.0) == pytest.approx(math.exp(-1))

    def test_monte_carlo_acceptance_frequency(self, rng):
        # delta = +T moves accepted with frequency exp(-1)
        trials = 100_000
        accepted = sum(
            rng.random() < acceptance_probability(0.7, 0.7) for _ in range(trials)
        )
        assert abs(accepted / trials - math.exp(-1)) < 0.01

    def test_frozen_temperature_is_greedy(self):
        hp = AnnealingParams(initial_temperature=1e-30)
        opt = make_optimizer("simulated_annealing", 2, box(2), 5, hyperparams=hp)
        batch = opt.ask()
        opt.tell(batch, [1.0])
        for _ in range(200):
            batch = opt.ask()
            opt.tell(batch, [2.0])  # strictly worse
        assert opt.accepted_moves == 0
        assert opt.current_loss == 1.0

    def test_equal_loss_always_accepted(self):
        opt = make_optimizer("simulated_annealing", 2, box(2), 5)
        batch = opt.ask()
        opt.tell(batch, [1.0])
        for _ in range(50):
            batch = opt.ask()
            opt.tell(batch, [1.0])
        assert opt.accepted_moves == 50

    def test_schedules(self):
        exp = AnnealingParams(schedule="exponential", initial_temperature=2.0, decay_rate=0.9)
        opt = make_optimizer("simulated_annealing", 2, box(2), 0, hyperparams=exp)
        assert opt.temperature(0) == 2.0
        assert opt.temperature(10) == pytest.approx(2.0 * 0.9**10)
        logp = AnnealingParams(schedule="logarithmic", initial_temperature=2.0)
        opt = make_optimizer("simulated_annealing", 2, box(2), 0, hyperparams=logp)
        assert opt.temperature(0) == pytest.approx(2.0 / math.log(2))

    def test_invalid_schedule(self):
        with pytest.raises(ValueError):
            AnnealingParams(schedule="linear")


SMOKE_BUDGETS = {
    "cmaes": (3000, None),
    "nelder_mead": (2000, None),
    "powell": (2000, None),
    "one_plus_one": (4000, None),
    "differential_evolution": (30000, None),
    "simulated_annealing": (50000, AnnealingParams(initial_temperature=0.1)),
}


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_smoke_five_dimensional_sphere(tag):
    budget, hp = SMOKE_BUDGETS[tag]
    x0 = np.ones(5) / np.sqrt(5.0)
    for seed in range(3):  # the acceptance suite runs all 20 seeds
        best, _ = run_sphere(tag, 5, budget, seed, hp, x0=x0)
        assert best < 1e-6, f"{tag} seed {seed}: best {best}"
