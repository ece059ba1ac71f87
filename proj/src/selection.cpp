#include "stacksr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stacksr/error.hpp"

namespace stacksr {

std::string_view to_string(SelectionScheme scheme)
{
    switch (scheme) {
    case SelectionScheme::roulette: return "roulette";
    case SelectionScheme::tournament: return "tournament";
    case SelectionScheme::parsimony: return "parsimony";
    }
    return "";
}

SelectionScheme parse_selection_scheme(std::string_view text)
{
    for (auto s : {SelectionScheme::roulette, SelectionScheme::tournament, SelectionScheme::parsimony}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw ParameterError("unknown selection scheme '" + std::string(text) + "'");
}

std::size_t default_archive_size(std::size_t population_size) { return std::max<std::size_t>(1, population_size / 10); }

void check_selection_config(const SelectionConfig& cfg)
{
    if (cfg.tournament_size < 1) {
        throw ParameterError("tournament_size must be at least 1");
    }
    if (cfg.archive_size < 1) {
        throw ParameterError("archive_size must be at least 1");
    }
    if (!(cfg.archive_parent_rate >= 0.0 && cfg.archive_parent_rate <= 1.0)) {
        throw ParameterError("archive_parent_rate must lie in [0, 1]");
    }
    if (std::isnan(cfg.parsimony_epsilon) || cfg.parsimony_epsilon < 0.0) {
        throw ParameterError("parsimony_epsilon must be nonnegative");
    }
}

namespace {

std::size_t roulette(std::span<const Genome> pool, Rng& rng)
{
    double total = 0.0;
    for (const auto& g : pool) {
        total += g.adjusted();
    }
    if (!(total > 0.0)) {
        return rng.below(pool.size());
    }
    const double spin = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        acc += pool[i].adjusted();
        if (spin < acc) {
            return i;
        }
    }
    // Rounding can leave spin just above the final partial sum.
    for (std::size_t i = pool.size(); i-- > 0;) {
        if (pool[i].adjusted() > 0.0) {
            return i;
        }
    }
    return pool.size() - 1;
}

std::vector<std::size_t> draw_entrants(std::span<const Genome> pool, std::size_t k, Rng& rng)
{
    std::vector<std::size_t> entrants(k);
    for (auto& e : entrants) {
        e = rng.below(pool.size());
    }
    return entrants;
}

std::size_t tournament(std::span<const Genome> pool, std::size_t k, Rng& rng)
{
    const auto entrants = draw_entrants(pool, k, rng);
    std::size_t best = entrants.front();
    for (std::size_t e : entrants) {
        const double a = pool[e].adjusted();
        const double b = pool[best].adjusted();
        if (a > b || (a == b && e < best)) {
            best = e;
        }
    }
    return best;
}

std::size_t parsimony(std::span<const Genome> pool, std::size_t k, double epsilon, Rng& rng)
{
    const auto entrants = draw_entrants(pool, k, rng);
    double top = pool[entrants.front()].adjusted();
    for (std::size_t e : entrants) {
        top = std::max(top, pool[e].adjusted());
    }
    std::size_t best = pool.size();
    for (std::size_t e : entrants) {
        if (pool[e].adjusted() < top - epsilon) {
            continue;
        }
        if (best == pool.size() || pool[e].valid_length < pool[best].valid_length ||
            (pool[e].valid_length == pool[best].valid_length && e < best)) {
            best = e;
        }
    }
    return best;
}

} // namespace

std::size_t select(std::span<const Genome> pool, const SelectionConfig& cfg, Rng& rng)
{
    if (pool.empty()) {
        throw ParameterError("cannot select from an empty pool");
    }
    switch (cfg.scheme) {
    case SelectionScheme::roulette: return roulette(pool, rng);
    case SelectionScheme::tournament: return tournament(pool, cfg.tournament_size, rng);
    case SelectionScheme::parsimony: return parsimony(pool, cfg.tournament_size, cfg.parsimony_epsilon, rng);
    }
    return 0;
}

PoolChoice choose_pool(std::span<const Genome> /*population*/, std::span<const Genome> archive,
                       const SelectionConfig& cfg, Rng& rng)
{
    if (archive.empty()) {
        return PoolChoice::population;
    }
    return rng.bernoulli(cfg.archive_parent_rate) ? PoolChoice::archive : PoolChoice::population;
}

bool archive_before(const Genome& a, const Genome& b)
{
    if (a.adjusted() != b.adjusted()) {
        return a.adjusted() > b.adjusted();
    }
    if (a.valid_length != b.valid_length) {
        return a.valid_length < b.valid_length;
    }
    const auto ea = a.expressed();
    const auto eb = b.expressed();
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

Archive update_archive(const Archive& archive, std::span<const Genome> candidates, const SelectionConfig& cfg)
{
    Archive merged;
    merged.reserve(archive.size() + candidates.size());
    merged.insert(merged.end(), archive.begin(), archive.end());
    merged.insert(merged.end(), candidates.begin(), candidates.end());
    std::stable_sort(merged.begin(), merged.end(), archive_before);

    const auto same_genotype = [](const Genome& a, const Genome& b) {
        return std::ranges::equal(a.expressed(), b.expressed());
    };
    // Equal genotypes evaluate identically and so sort adjacent; the first
    // copy (an existing archive member when there is one) is kept.
    Archive out;
    out.reserve(cfg.archive_size);
    for (auto& g : merged) {
        if (!out.empty() && same_genotype(out.back(), g)) {
            continue;
        }
        if (out.size() == cfg.archive_size) {
            break;
        }
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace stacksr
