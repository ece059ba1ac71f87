// Serial vs OpenMP population fitness evaluation.
//   bench_eval [population] [rows] [repeats]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stacksr/evaluator.hpp"
#include "stacksr/genome.hpp"
#include "stacksr/primitives.hpp"
#include "stacksr/rng.hpp"

using namespace stacksr;

namespace {

std::vector<Operator> ops(std::initializer_list<const char*> symbols, int arity)
{
    std::vector<Operator> out;
    for (const char* s : symbols) {
        out.push_back(*lookup_operator(s, arity));
    }
    return out;
}

template <class F>
double best_of(int repeats, F&& f)
{
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv)
{
    const std::size_t population = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
    const std::size_t rows = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 500;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

    const PrimitiveSet pset({"x"}, {1, 2, 3, 5, 7}, ops({"+", "-", "*", "/"}, 2), ops({"sin", "cos"}, 1));
    Dataset data;
    data.variable_names = {"x"};
    for (std::size_t i = 0; i < rows; ++i) {
        const double x = -10.0 + 20.0 * static_cast<double>(i) / static_cast<double>(rows);
        data.inputs.push_back({x});
        data.targets.push_back(x * x * x + std::sin(x));
    }

    Rng rng(1);
    std::vector<Genome> genomes;
    for (std::size_t i = 0; i < population; ++i) {
        genomes.push_back(random_genome(pset, 15, 35, rng));
    }

    auto serial = genomes;
    const double t_serial = best_of(repeats, [&] { evaluate_population_serial(serial, data, pset); });
    std::printf("population=%zu rows=%zu repeats=%d\n", population, rows, repeats);
    std::printf("%-10s %8s %10s %8s\n", "variant", "threads", "seconds", "speedup");
    std::printf("%-10s %8d %10.4f %8.2f\n", "serial", 1, t_serial, 1.0);

    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif
    for (int threads = 1; threads <= std::max(1, max_threads); threads *= 2) {
        set_eval_threads(threads);
        auto parallel = genomes;
        const double t = best_of(repeats, [&] { evaluate_population(parallel, data, pset); });
        bool same = true;
        for (std::size_t i = 0; i < genomes.size(); ++i) {
            same = same && parallel[i].fitness->raw == serial[i].fitness->raw;
        }
        std::printf("%-10s %8d %10.4f %8.2f%s\n", "openmp", threads, t, t_serial / t, same ? "" : "  MISMATCH");
        if (!same) {
            return 1;
        }
    }
    return 0;
}
