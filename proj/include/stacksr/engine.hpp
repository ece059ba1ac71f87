#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stacksr/evaluator.hpp"
#include "stacksr/genome.hpp"
#include "stacksr/rng.hpp"
#include "stacksr/selection.hpp"
#include "stacksr/variation.hpp"

namespace stacksr {

enum class InitialPopulation { random, semantically_diverse };

std::string_view to_string(InitialPopulation type);
InitialPopulation parse_initial_population(std::string_view text);

struct GpParams {
    std::size_t generations = 200;
    std::size_t generations_per_cascade = 200;
    std::size_t population_size = 50;
    std::size_t min_length = 15;
    std::size_t max_length = 35;
    double mutation_rate = 0.1;
    double crossover_rate = 0.9;
    CrossoverType crossover_type = CrossoverType::subtree;
    MutationType mutation_type = MutationType::fully_protected;
    SelectionConfig selection{.archive_size = 5};
    bool interval_arithmetic = false;
    double semantic_sensitivity = 0.0;
    InitialPopulation initial_population = InitialPopulation::random;
    int max_crossover_trials = 20;
    int max_mutation_trials = 10;
    double operator_mutate_frequency = 0.6;
    std::uint64_t seed = 0;

    friend bool operator==(const GpParams&, const GpParams&) = default;
};

// Throws ParameterError naming the offending field.
void check_params(const GpParams& params);

VariationParams variation_params(const GpParams& params);

// Semantic rounding step and rejection cap used by the diverse initializer.
inline constexpr double kSemanticTolerance = 1e-4;
inline constexpr int kDiversityRejectionCap = 50;

// Random genomes whose rounded output vectors on the dataset are pairwise
// distinct. After kDiversityRejectionCap consecutive rejections the next
// candidate is accepted regardless.
std::vector<Genome> semantically_diverse_population(const PrimitiveSet& pset, const GpParams& params,
                                                    const Dataset& data, Rng& rng);

// Output vector rounded to kSemanticTolerance, encoded so that equal rounded
// values (including non-finite ones) compare equal.
std::vector<std::int64_t> semantic_key(std::span<const double> outputs);

struct GenerationRecord {
    std::size_t generation = 0;
    double best_adjusted = 0.0;
    std::size_t best_size = 0;
    double archive_mean_adjusted = 0.0;
    double archive_mean_nodes = 0.0;
    std::string best_so_far_expr;
    std::size_t best_so_far_size = 0;
    double best_so_far_adjusted = 0.0;
    double mae = 0.0;
    std::optional<double> nmse;
    std::optional<double> r;

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

struct RunState {
    GpParams params;
    PrimitiveSet pset;
    Dataset data;
    std::vector<Genome> population;
    Archive archive;
    std::size_t generation = 0;
    Rng rng;
    std::vector<GenerationRecord> records;

    friend bool operator==(const RunState&, const RunState&) = default;
};

// Called after initialization and after every generation.
using GenerationObserver = std::function<void(const RunState&)>;

RunState init_run(const GpParams& params, const Dataset& data, const PrimitiveSet& pset);

// Breeds, evaluates and archives one generation, then appends its record.
void step_generation(RunState& state);

// Restarts the population while keeping the archive; archive members are
// copied into the first slots of the fresh population.
void cascade_boundary(RunState& state);

// True when a cascade restart is due before breeding the next generation.
bool cascade_due(const RunState& state);

RunState run(const GpParams& params, const Dataset& data, const PrimitiveSet& pset,
             const GenerationObserver& observer = {});

// Runs the remaining generations up to state.params.generations.
void continue_run(RunState& state, const GenerationObserver& observer = {});

GenerationRecord make_record(const RunState& state);

std::vector<double> predict_one_step(const Genome& g, std::span<const std::vector<double>> rows,
                                     const PrimitiveSet& pset);

struct MultiStepPrediction {
    std::vector<double> values;
    bool truncated = false; // stopped early on a non-finite prediction
};

// Autoregressive prediction: variable j holds lag j+1. Each prediction is
// pushed in as lag 1 and the oldest lag is dropped.
MultiStepPrediction predict_multi_step(const Genome& g, std::span<const double> seed_window, std::size_t horizon,
                                       const PrimitiveSet& pset);

} // namespace stacksr
