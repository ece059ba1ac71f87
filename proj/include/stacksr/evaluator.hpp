#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stacksr/genome.hpp"
#include "stacksr/primitives.hpp"

namespace stacksr {

// Fitness cases: one input vector and one target per row.
struct Dataset {
    std::vector<std::string> variable_names;
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;

    std::size_t rows() const noexcept { return targets.size(); }
    std::size_t variables() const noexcept { return variable_names.size(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Throws DataError on ragged rows, non-finite values or an empty dataset.
void check_dataset(const Dataset& data);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Per-variable [min, max] over the dataset inputs.
std::vector<Interval> input_box(const Dataset& data);

struct Metrics {
    double mae = 0.0;
    std::optional<double> nmse; // undefined when targets have zero variance
    std::optional<double> r;    // undefined when either series has zero variance
};

struct FitnessReport {
    double raw = 0.0;
    double adjusted = 0.0;
    Metrics metrics;
};

// Evaluates a token sequence that must form one complete expression. Division
// is unprotected; the first non-finite intermediate is returned immediately.
double eval_tokens(std::span<const Token> tokens, std::span<const double> inputs, const PrimitiveSet& pset);

double eval_postfix(const Genome& g, std::span<const double> inputs, const PrimitiveSet& pset);

// Outputs of tokens on every dataset row.
std::vector<double> semantics(std::span<const Token> tokens, const Dataset& data, const PrimitiveSet& pset);

// Sum of absolute errors; +inf if any row is non-finite.
double raw_fitness(const Genome& g, const Dataset& data, const PrimitiveSet& pset);

// 1 / (1 + raw); 0 for +inf. Throws ParameterError for negative or NaN raw.
double adjusted_fitness(double raw);

Fitness evaluate_fitness(const Genome& g, const Dataset& data, const PrimitiveSet& pset);

// mae, nmse and Pearson r. Throws ParameterError when lengths differ or are < 2.
Metrics metrics(std::span<const double> predictions, std::span<const double> targets);

FitnessReport fitness_report(const Genome& g, const Dataset& data, const PrimitiveSet& pset);

// Mean absolute difference of two subtree outputs over the dataset rows,
// skipping rows where either output is non-finite. +inf when more than half
// the rows are skipped.
double semantic_distance(const Genome& a, SubtreeSpan span_a, const Genome& b, SubtreeSpan span_b,
                         const Dataset& data, const PrimitiveSet& pset);
double semantic_distance(std::span<const Token> a, std::span<const Token> b, const Dataset& data,
                         const PrimitiveSet& pset);

// Static interval evaluation over the input box. true means no input inside
// the box can make the program produce a non-finite value.
bool interval_feasible(const Genome& g, std::span<const Interval> box, const PrimitiveSet& pset);

// Assigns fitness to every genome. The serial version is the reference; the
// parallel version splits genomes across OpenMP threads and must produce
// bit-identical results.
void evaluate_population_serial(std::span<Genome> genomes, const Dataset& data, const PrimitiveSet& pset);
void evaluate_population(std::span<Genome> genomes, const Dataset& data, const PrimitiveSet& pset);

// Number of OpenMP threads used by evaluate_population; 1 when built without OpenMP.
void set_eval_threads(int threads);
int eval_threads();

} // namespace stacksr
