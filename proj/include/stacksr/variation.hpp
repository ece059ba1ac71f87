#pragma once

#include <cstddef>
#include <string_view>
#include <utility>

#include "stacksr/evaluator.hpp"
#include "stacksr/genome.hpp"
#include "stacksr/rng.hpp"

namespace stacksr {

enum class CrossoverType { ga_like, subtree, semantic_subtree };
enum class MutationType { fully_protected, partially_protected };

struct VariationParams {
    CrossoverType crossover_type = CrossoverType::subtree;
    MutationType mutation_type = MutationType::fully_protected;
    int max_crossover_trials = 20;
    int max_mutation_trials = 10;
    double operator_mutate_frequency = 0.6; // chance that mutation targets an operator position
    double semantic_sensitivity = 0.0;
    LengthLimits limits;
};

// Throws ParameterError when a field is out of range.
void check_variation_params(const VariationParams& params);

std::string_view to_string(CrossoverType type);
std::string_view to_string(MutationType type);
CrossoverType parse_crossover_type(std::string_view text);
MutationType parse_mutation_type(std::string_view text);

using Offspring = std::pair<Genome, Genome>;

// Every operator returns genomes that satisfy
// min_length <= valid_length <= max_length, or verbatim copies of the
// parents when no valid child was found within the trial budget.
// Newly built genomes carry no fitness.

// One shared cut point; children swap full-capacity tails.
Offspring crossover_ga_like(const Genome& p1, const Genome& p2, Rng& rng, const VariationParams& params,
                            const PrimitiveSet& pset);

// Swaps one uniformly chosen subtree of each parent.
Offspring crossover_subtree(const Genome& p1, const Genome& p2, Rng& rng, const VariationParams& params,
                            const PrimitiveSet& pset);

// Subtree crossover restricted to subtree pairs whose outputs on the dataset
// differ by more than params.semantic_sensitivity.
Offspring crossover_semantic(const Genome& p1, const Genome& p2, const Dataset& data, Rng& rng,
                             const VariationParams& params, const PrimitiveSet& pset);

Offspring crossover(const Genome& p1, const Genome& p2, const Dataset& data, Rng& rng,
                    const VariationParams& params, const PrimitiveSet& pset);

Genome mutate_fully_protected(const Genome& g, Rng& rng, const VariationParams& params, const PrimitiveSet& pset);
Genome mutate_partially_protected(const Genome& g, Rng& rng, const VariationParams& params,
                                  const PrimitiveSet& pset);

Genome mutate(const Genome& g, Rng& rng, const VariationParams& params, const PrimitiveSet& pset);

} // namespace stacksr
