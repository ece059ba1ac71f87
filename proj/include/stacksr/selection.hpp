#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stacksr/genome.hpp"
#include "stacksr/rng.hpp"

namespace stacksr {

enum class SelectionScheme { roulette, tournament, parsimony };

std::string_view to_string(SelectionScheme scheme);
SelectionScheme parse_selection_scheme(std::string_view text);

struct SelectionConfig {
    SelectionScheme scheme = SelectionScheme::tournament;
    std::size_t tournament_size = 4;
    double parsimony_epsilon = 1e-6;
    double archive_parent_rate = 0.2;
    std::size_t archive_size = 1;

    friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

// Default archive capacity: a tenth of the population, at least one.
std::size_t default_archive_size(std::size_t population_size);

void check_selection_config(const SelectionConfig& cfg);

// Index of the selected individual in pool.
//   roulette   - probability proportional to adjusted fitness (uniform if all zero)
//   tournament - best adjusted fitness among tournament_size draws with replacement
//   parsimony  - tournament where entrants within parsimony_epsilon of the best
//                fitness are ranked by smaller valid_length, then lower index
std::size_t select(std::span<const Genome> pool, const SelectionConfig& cfg, Rng& rng);

// Which pool the next parent is drawn from.
enum class PoolChoice { population, archive };

PoolChoice choose_pool(std::span<const Genome> population, std::span<const Genome> archive,
                       const SelectionConfig& cfg, Rng& rng);

// Elite store, sorted by adjusted fitness descending with pairwise-distinct
// expressed token sequences.
using Archive = std::vector<Genome>;

// Strict total order used to rank the archive: higher adjusted fitness, then
// smaller valid_length, then lexicographically smaller expressed tokens.
bool archive_before(const Genome& a, const Genome& b);

// Merges candidates into the archive, deduplicates by expressed tokens, and
// keeps the best cfg.archive_size entries.
Archive update_archive(const Archive& archive, std::span<const Genome> candidates, const SelectionConfig& cfg);

} // namespace stacksr
