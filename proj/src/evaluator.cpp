#include "stacksr/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stacksr/error.hpp"

namespace stacksr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::atomic<int> g_eval_threads{1};

// Stack evaluation with a caller-owned value buffer, reused across rows.
double run_program(std::span<const Token> tokens, std::span<const double> inputs, const PrimitiveSet& pset,
                   std::vector<double>& stack)
{
    stack.clear();
    const Token terminals = static_cast<Token>(pset.terminal_count());
    const Token unary_begin = pset.unary_begin();
    for (Token t : tokens) {
        if (t < terminals) {
            stack.push_back(pset.is_variable(t) ? inputs[t] : pset.constant(t));
            continue;
        }
        double result;
        if (t < unary_begin) {
            if (stack.size() < 2) {
                throw InvalidGenomeError("stack underflow at binary operator");
            }
            const double y = stack.back();
            stack.pop_back();
            result = apply_binary(pset.binary_op(t).kind, stack.back(), y);
            stack.back() = result;
        } else if (t < pset.size()) {
            if (stack.empty()) {
                throw InvalidGenomeError("stack underflow at unary operator");
            }
            result = apply_unary(pset.unary_op(t).kind, stack.back());
            stack.back() = result;
        } else {
            throw InvalidGenomeError("token id " + std::to_string(t) + " outside primitive set");
        }
        if (!std::isfinite(result)) {
            return result;
        }
    }
    if (stack.size() != 1) {
        throw InvalidGenomeError("program leaves " + std::to_string(stack.size()) + " values on the stack");
    }
    return stack.front();
}

Fitness fitness_with_buffer(const Genome& g, const Dataset& data, const PrimitiveSet& pset,
                            std::vector<double>& stack)
{
    double sum = 0.0;
    for (std::size_t row = 0; row < data.rows(); ++row) {
        const double y = run_program(g.expressed(), data.inputs[row], pset, stack);
        if (!std::isfinite(y)) {
            return Fitness{kInf, 0.0};
        }
        sum += std::fabs(data.targets[row] - y);
    }
    return Fitness{sum, adjusted_fitness(sum)};
}

} // namespace

void check_dataset(const Dataset& data)
{
    if (data.variable_names.empty()) {
        throw DataError("dataset has no input variables");
    }
    if (data.rows() == 0) {
        throw DataError("dataset has no rows");
    }
    if (data.inputs.size() != data.targets.size()) {
        throw DataError("dataset input and target row counts differ");
    }
    for (std::size_t row = 0; row < data.rows(); ++row) {
        if (data.inputs[row].size() != data.variables()) {
            throw DataError("dataset row " + std::to_string(row + 1) + " has " +
                            std::to_string(data.inputs[row].size()) + " inputs, expected " +
                            std::to_string(data.variables()));
        }
        for (double v : data.inputs[row]) {
            if (!std::isfinite(v)) {
                throw DataError("dataset row " + std::to_string(row + 1) + " has a non-finite input");
            }
        }
        if (!std::isfinite(data.targets[row])) {
            throw DataError("dataset row " + std::to_string(row + 1) + " has a non-finite target");
        }
    }
}

std::vector<Interval> input_box(const Dataset& data)
{
    std::vector<Interval> box(data.variables(), Interval{kInf, -kInf});
    for (const auto& row : data.inputs) {
        for (std::size_t j = 0; j < box.size(); ++j) {
            box[j].lo = std::min(box[j].lo, row[j]);
            box[j].hi = std::max(box[j].hi, row[j]);
        }
    }
    return box;
}

double eval_tokens(std::span<const Token> tokens, std::span<const double> inputs, const PrimitiveSet& pset)
{
    if (inputs.size() != pset.variable_count()) {
        throw ParameterError("expected " + std::to_string(pset.variable_count()) + " inputs, got " +
                             std::to_string(inputs.size()));
    }
    std::vector<double> stack;
    stack.reserve(tokens.size());
    return run_program(tokens, inputs, pset, stack);
}

double eval_postfix(const Genome& g, std::span<const double> inputs, const PrimitiveSet& pset)
{
    return eval_tokens(g.expressed(), inputs, pset);
}

std::vector<double> semantics(std::span<const Token> tokens, const Dataset& data, const PrimitiveSet& pset)
{
    std::vector<double> out;
    out.reserve(data.rows());
    std::vector<double> stack;
    stack.reserve(tokens.size());
    for (const auto& row : data.inputs) {
        out.push_back(run_program(tokens, row, pset, stack));
    }
    return out;
}

double raw_fitness(const Genome& g, const Dataset& data, const PrimitiveSet& pset)
{
    std::vector<double> stack;
    stack.reserve(g.valid_length);
    return fitness_with_buffer(g, data, pset, stack).raw;
}

double adjusted_fitness(double raw)
{
    if (std::isnan(raw) || raw < 0.0) {
        throw ParameterError("raw fitness must be nonnegative");
    }
    if (std::isinf(raw)) {
        return 0.0;
    }
    return 1.0 / (1.0 + raw);
}

Fitness evaluate_fitness(const Genome& g, const Dataset& data, const PrimitiveSet& pset)
{
    std::vector<double> stack;
    stack.reserve(g.valid_length);
    return fitness_with_buffer(g, data, pset, stack);
}

Metrics metrics(std::span<const double> predictions, std::span<const double> targets)
{
    if (predictions.size() != targets.size()) {
        throw ParameterError("metrics: " + std::to_string(predictions.size()) + " predictions for " +
                             std::to_string(targets.size()) + " targets");
    }
    if (targets.size() < 2) {
        throw ParameterError("metrics need at least two points");
    }
    const auto n = static_cast<double>(targets.size());

    Metrics m;
    for (double p : predictions) {
        if (!std::isfinite(p)) {
            m.mae = kInf;
            m.nmse = kInf;
            return m;
        }
    }

    double mean_y = 0.0;
    double mean_p = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        mean_y += targets[i];
        mean_p += predictions[i];
    }
    mean_y /= n;
    mean_p /= n;

    double abs_err = 0.0;
    double sq_err = 0.0;
    double ss_y = 0.0;
    double ss_p = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = targets[i] - predictions[i];
        const double dy = targets[i] - mean_y;
        const double dp = predictions[i] - mean_p;
        abs_err += std::fabs(e);
        sq_err += e * e;
        ss_y += dy * dy;
        ss_p += dp * dp;
        cross += dy * dp;
    }
    m.mae = abs_err / n;
    if (ss_y > 0.0) {
        m.nmse = sq_err / ss_y;
    }
    if (ss_y > 0.0 && ss_p > 0.0) {
        m.r = std::clamp(cross / std::sqrt(ss_y * ss_p), -1.0, 1.0);
    }
    return m;
}

FitnessReport fitness_report(const Genome& g, const Dataset& data, const PrimitiveSet& pset)
{
    FitnessReport report;
    const auto fit = evaluate_fitness(g, data, pset);
    report.raw = fit.raw;
    report.adjusted = fit.adjusted;
    const auto predictions = semantics(g.expressed(), data, pset);
    if (data.rows() >= 2) {
        report.metrics = metrics(predictions, data.targets);
    } else {
        report.metrics.mae = fit.raw / static_cast<double>(data.rows());
    }
    return report;
}

double semantic_distance(std::span<const Token> a, std::span<const Token> b, const Dataset& data,
                         const PrimitiveSet& pset)
{
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        return 0.0; // same program, whatever its rows evaluate to
    }
    std::vector<double> stack;
    std::size_t used = 0;
    double total = 0.0;
    for (const auto& row : data.inputs) {
        const double ya = run_program(a, row, pset, stack);
        const double yb = run_program(b, row, pset, stack);
        if (!std::isfinite(ya) || !std::isfinite(yb)) {
            continue;
        }
        total += std::fabs(ya - yb);
        ++used;
    }
    const std::size_t skipped = data.rows() - used;
    if (used == 0 || 2 * skipped > data.rows()) {
        return kInf;
    }
    return total / static_cast<double>(used);
}

double semantic_distance(const Genome& a, SubtreeSpan span_a, const Genome& b, SubtreeSpan span_b,
                         const Dataset& data, const PrimitiveSet& pset)
{
    const auto slice_a = std::span<const Token>(a.tokens).subspan(span_a.start, span_a.length());
    const auto slice_b = std::span<const Token>(b.tokens).subspan(span_b.start, span_b.length());
    return semantic_distance(slice_a, slice_b, data, pset);
}

void evaluate_population_serial(std::span<Genome> genomes, const Dataset& data, const PrimitiveSet& pset)
{
    std::vector<double> stack;
    for (auto& g : genomes) {
        g.fitness = fitness_with_buffer(g, data, pset, stack);
    }
}

void evaluate_population(std::span<Genome> genomes, const Dataset& data, const PrimitiveSet& pset)
{
#ifdef _OPENMP
    const int threads = g_eval_threads.load();
    if (threads <= 1 || genomes.size() < 2) {
        evaluate_population_serial(genomes, data, pset);
        return;
    }
    const auto n = static_cast<std::ptrdiff_t>(genomes.size());
    // Each iteration writes only its own slot; exceptions are carried out of
    // the parallel region and rethrown on the calling thread.
    std::exception_ptr failure;
#pragma omp parallel num_threads(threads)
    {
        std::vector<double> stack;
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                genomes[static_cast<std::size_t>(i)].fitness =
                    fitness_with_buffer(genomes[static_cast<std::size_t>(i)], data, pset, stack);
            } catch (...) {
#pragma omp critical(stacksr_eval_failure)
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
#else
    evaluate_population_serial(genomes, data, pset);
#endif
}

void set_eval_threads(int threads) { g_eval_threads.store(threads < 1 ? 1 : threads); }

int eval_threads() { return g_eval_threads.load(); }

} // namespace stacksr
