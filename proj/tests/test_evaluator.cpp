#include <doctest.h>

#include <cmath>
#include <limits>

#include "stacksr/error.hpp"
#include "stacksr/evaluator.hpp"
#include "support.hpp"

using namespace stacksr;
using namespace testsupport;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Dataset xs(std::vector<double> x, std::vector<double> y = {})
{
    Dataset d;
    d.variable_names = {"x"};
    for (std::size_t i = 0; i < x.size(); ++i) {
        d.inputs.push_back({x[i]});
        d.targets.push_back(y.empty() ? 0.0 : y[i]);
    }
    return d;
}

} // namespace

TEST_CASE("eval_postfix basic programs")
{
    const auto pset = case_study_pset_with_sin();
    const std::vector<double> two{2.0};
    const std::vector<double> three{3.0};
    const std::vector<double> zero{0.0};
    CHECK(eval_postfix(make_genome(pset, {"x", "1", "+"}), two, pset) == 3.0);
    CHECK(eval_postfix(make_genome(pset, {"x", "x", "*"}), three, pset) == 9.0);
    CHECK(std::isinf(eval_postfix(make_genome(pset, {"1", "x", "/"}), zero, pset)));
    CHECK(eval_postfix(make_genome(pset, {"x", "sin"}), two, pset) == std::sin(2.0));
}

TEST_CASE("eval_postfix ignores the inert tail")
{
    const auto pset = case_study_pset();
    const auto g = make_genome(pset, {"x", "2", "*"}, 10, "/");
    const std::vector<double> in{4.0};
    CHECK(eval_postfix(g, in, pset) == 8.0);
}

TEST_CASE("eval_tokens rejects malformed sequences")
{
    const auto pset = case_study_pset();
    const std::vector<double> in{1.0};
    CHECK_THROWS_AS(eval_tokens(tokens(pset, {"x", "+"}), in, pset), InvalidGenomeError);
    CHECK_THROWS_AS(eval_tokens(tokens(pset, {"x", "x"}), in, pset), InvalidGenomeError);
}

TEST_CASE("protected log and sqrt map invalid domains to zero")
{
    const auto pset = rich_pset();
    const std::vector<double> neg{-4.0};
    CHECK(eval_postfix(make_genome(pset, {"x", "log"}), neg, pset) == 0.0);
    CHECK(eval_postfix(make_genome(pset, {"x", "sqrt"}), neg, pset) == 0.0);
    const std::vector<double> four{4.0};
    CHECK(eval_postfix(make_genome(pset, {"x", "sqrt"}), four, pset) == 2.0);
}

TEST_CASE("eval_postfix matches the recursive tree oracle bit for bit")
{
    const auto pset = rich_pset();
    Rng rng(4242);
    int nonfinite = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto g = random_genome(pset, 1, 35, rng);
        const auto tree = build_tree(g.tokens, g.valid_length - 1, pset);
        for (int k = 0; k < 10; ++k) {
            const std::vector<double> in{(rng.uniform01() - 0.5) * 40.0};
            const double a = eval_postfix(g, in, pset);
            const double b = eval_tree(*tree, in, pset);
            REQUIRE(same_bits(a, b));
            nonfinite += std::isfinite(a) ? 0 : 1;
        }
    }
    CHECK(nonfinite > 0); // the sweep exercised early exits too
}

TEST_CASE("raw and adjusted fitness")
{
    const auto pset = case_study_pset();
    SUBCASE("perfect model")
    {
        const auto g = make_genome(pset, evolved_postfix());
        CHECK(raw_fitness(g, case_study_dataset(), pset) == 0.0);
    }
    SUBCASE("constant zero model")
    {
        const auto g = make_genome(pset, {"x", "x", "-"});
        CHECK(raw_fitness(g, xs({0, 1}, {6, 34}), pset) == 40.0);
    }
    SUBCASE("division by zero row")
    {
        const auto g = make_genome(pset, {"1", "x", "/"});
        CHECK(raw_fitness(g, xs({0, 1}, {1, 1}), pset) == inf);
        CHECK(evaluate_fitness(g, xs({0, 1}, {1, 1}), pset).adjusted == 0.0);
    }
    CHECK(adjusted_fitness(0) == 1.0);
    CHECK(adjusted_fitness(9) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(adjusted_fitness(inf) == 0.0);
    CHECK_THROWS_AS(adjusted_fitness(-1), ParameterError);
    CHECK_THROWS_AS(adjusted_fitness(std::nan("")), ParameterError);
}

TEST_CASE("adjusted fitness is strictly decreasing and bounded")
{
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform01() * 1e6;
        const double b = a + 1.0 + rng.uniform01() * 10.0;
        const double fa = adjusted_fitness(a);
        const double fb = adjusted_fitness(b);
        CHECK(fa > fb);
        CHECK(fa <= 1.0);
        CHECK(fb > 0.0);
    }
}

TEST_CASE("metrics")
{
    SUBCASE("exact predictions")
    {
        const std::vector<double> y{1, 4, 9, 16};
        const auto m = metrics(y, y);
        CHECK(m.mae == 0.0);
        CHECK(m.nmse == 0.0);
        CHECK(m.r == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("flat predictions leave r undefined")
    {
        const std::vector<double> y{0, 2};
        const std::vector<double> p{1, 1};
        const auto m = metrics(p, y);
        CHECK(m.mae == 1.0);
        CHECK(m.nmse == 1.0);
        CHECK_FALSE(m.r.has_value());
    }
    SUBCASE("constant offset at n=3, c=1")
    {
        // targets {1,2,6}: mean 3, centered sum of squares 4+1+9 = 14
        const std::vector<double> y{1, 2, 6};
        const std::vector<double> p{2, 3, 7};
        const auto m = metrics(p, y);
        CHECK(m.mae == 1.0);
        CHECK(*m.nmse == doctest::Approx(3.0 / 14.0).epsilon(1e-14));
        CHECK(*m.r == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("zero target variance")
    {
        const std::vector<double> y{5, 5, 5};
        const std::vector<double> p{4, 5, 6};
        const auto m = metrics(p, y);
        CHECK(m.mae == doctest::Approx(2.0 / 3.0));
        CHECK_FALSE(m.nmse.has_value());
        CHECK_FALSE(m.r.has_value());
    }
    SUBCASE("argument errors")
    {
        const std::vector<double> a{1, 2};
        const std::vector<double> b{1, 2, 3};
        const std::vector<double> one{1};
        CHECK_THROWS_AS(metrics(a, b), ParameterError);
        CHECK_THROWS_AS(metrics(one, one), ParameterError);
    }
}

TEST_CASE("mean predictor has nmse exactly one")
{
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        // Small integer targets keep the mean exactly representable.
        const std::size_t n = 2 + rng.below(10);
        std::vector<double> y(n);
        for (auto& v : y) {
            v = static_cast<double>(rng.between(-50, 50));
        }
        double sum = 0;
        for (double v : y) {
            sum += v;
        }
        if (std::fmod(sum, static_cast<double>(n)) != 0.0) {
            y[0] -= std::fmod(sum, static_cast<double>(n)); // make the mean an integer
        }
        double mean = 0;
        for (double v : y) {
            mean += v;
        }
        mean /= static_cast<double>(n);
        const std::vector<double> p(n, mean);
        const auto m = metrics(p, y);
        if (m.nmse) {
            CHECK(*m.nmse == 1.0);
        }
    }
}

TEST_CASE("fitness_report ties mae to raw")
{
    const auto pset = case_study_pset();
    const auto g = make_genome(pset, {"x", "x", "*"});
    const auto data = case_study_dataset();
    const auto rep = fitness_report(g, data, pset);
    CHECK(rep.metrics.mae == doctest::Approx(rep.raw / 21.0).epsilon(1e-14));
    CHECK(rep.adjusted == adjusted_fitness(rep.raw));
}

TEST_CASE("semantic distance")
{
    const auto pset = case_study_pset();
    const auto data = xs({0, 1});
    const auto x = tokens(pset, {"x"});
    const auto x1 = tokens(pset, {"x", "1", "+"});
    const auto inv = tokens(pset, {"1", "x", "/"});
    CHECK(semantic_distance(x, x, data, pset) == 0.0);
    CHECK(semantic_distance(x, x1, data, pset) == 1.0);
    CHECK(semantic_distance(inv, x, data, pset) == 0.0);
    // Two of three rows skipped is more than half.
    CHECK(semantic_distance(inv, x, xs({0, 0, 1}), pset) == inf);

    SUBCASE("span overload")
    {
        const auto g = make_genome(pset, {"x", "1", "+", "x", "*"});
        CHECK(semantic_distance(g, {0, 2}, g, {3, 3}, data, pset) == 1.0);
    }
}

TEST_CASE("semantic distance is symmetric")
{
    const auto pset = rich_pset();
    const auto data = case_study_dataset();
    Rng rng(55);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_genome(pset, 1, 15, rng);
        const auto b = random_genome(pset, 1, 15, rng);
        const double ab = semantic_distance(a.expressed(), b.expressed(), data, pset);
        const double ba = semantic_distance(b.expressed(), a.expressed(), data, pset);
        CHECK(same_bits(ab, ba));
        CHECK(ab >= 0.0);
        CHECK(semantic_distance(a.expressed(), a.expressed(), data, pset) == 0.0);
    }
}

TEST_CASE("interval feasibility examples")
{
    const auto pset = case_study_pset();
    const std::vector<Interval> wide{{-10, 10}};
    const std::vector<Interval> pos{{1, 10}};
    CHECK_FALSE(interval_feasible(make_genome(pset, {"1", "x", "/"}), wide, pset));
    CHECK(interval_feasible(make_genome(pset, {"x", "x", "*"}), wide, pset));
    CHECK(interval_feasible(make_genome(pset, {"1", "x", "/"}), pos, pset));
}

TEST_CASE("interval feasibility is sound on sampled inputs")
{
    const auto pset = rich_pset();
    const std::vector<Interval> box{{-3, 3}};
    Rng rng(31337);
    int feasible = 0;
    for (int i = 0; i < 400 && feasible < 60; ++i) {
        const auto g = random_genome(pset, 3, 25, rng);
        if (!interval_feasible(g, box, pset)) {
            continue;
        }
        ++feasible;
        for (int k = 0; k < 2000; ++k) {
            const std::vector<double> in{-3.0 + 6.0 * rng.uniform01()};
            REQUIRE(std::isfinite(eval_postfix(g, in, pset)));
        }
        for (double edge : {-3.0, 3.0}) {
            const std::vector<double> in{edge};
            REQUIRE(std::isfinite(eval_postfix(g, in, pset)));
        }
    }
    CHECK(feasible >= 20);
}

TEST_CASE("input_box and check_dataset")
{
    const auto data = case_study_dataset();
    const auto box = input_box(data);
    REQUIRE(box.size() == 1);
    CHECK(box[0].lo == -10.0);
    CHECK(box[0].hi == 10.0);

    Dataset bad = data;
    bad.inputs[3].push_back(1.0);
    CHECK_THROWS_AS(check_dataset(bad), DataError);
    Dataset nan = data;
    nan.targets[0] = std::nan("");
    CHECK_THROWS_AS(check_dataset(nan), DataError);
}

TEST_CASE("parallel population evaluation is bit-identical to the serial reference")
{
    const auto pset = rich_pset();
    const auto data = case_study_dataset();
    Rng rng(9);
    std::vector<Genome> pop;
    for (int i = 0; i < 300; ++i) {
        pop.push_back(random_genome(pset, 1, 35, rng));
    }
    auto serial = pop;
    auto parallel = pop;
    evaluate_population_serial(serial, data, pset);
    for (int threads : {1, 2, 4}) {
        set_eval_threads(threads);
        auto copy = pop;
        evaluate_population(copy, data, pset);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            REQUIRE(copy[i].fitness.has_value());
            CHECK(same_bits(copy[i].fitness->raw, serial[i].fitness->raw));
            CHECK(same_bits(copy[i].fitness->adjusted, serial[i].fitness->adjusted));
        }
    }
    set_eval_threads(1);
}
