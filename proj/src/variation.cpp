#include "stacksr/variation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "stacksr/error.hpp"

namespace stacksr {

namespace {

// Builds a genome from a candidate token array if its largest completion
// point respects the length limits.
std::optional<Genome> accept(std::vector<Token> tokens, const LengthLimits& limits, const PrimitiveSet& pset)
{
    const auto vl = compute_valid_length(tokens, pset);
    if (!vl || *vl < limits.min_length || *vl > limits.max_length) {
        return std::nullopt;
    }
    Genome g;
    g.tokens = std::move(tokens);
    g.valid_length = *vl;
    return g;
}

void check_same_capacity(const Genome& p1, const Genome& p2)
{
    if (p1.capacity() != p2.capacity()) {
        throw ParameterError("crossover parents have different capacities (" + std::to_string(p1.capacity()) +
                             " vs " + std::to_string(p2.capacity()) + ")");
    }
}

// Replaces `host`'s subtree at `cut` with `donor`'s subtree at `graft`. The
// host's remaining tail follows the splice; the array is truncated or padded
// with random terminals to the host's capacity.
std::vector<Token> splice(const Genome& host, SubtreeSpan cut, const Genome& donor, SubtreeSpan graft, Rng& rng,
                          const PrimitiveSet& pset)
{
    const std::size_t capacity = host.capacity();
    std::vector<Token> out;
    out.reserve(capacity + graft.length());
    out.insert(out.end(), host.tokens.begin(), host.tokens.begin() + static_cast<std::ptrdiff_t>(cut.start));
    out.insert(out.end(), donor.tokens.begin() + static_cast<std::ptrdiff_t>(graft.start),
               donor.tokens.begin() + static_cast<std::ptrdiff_t>(graft.end + 1));
    out.insert(out.end(), host.tokens.begin() + static_cast<std::ptrdiff_t>(cut.end + 1), host.tokens.end());
    if (out.size() > capacity) {
        out.resize(capacity);
    }
    while (out.size() < capacity) {
        out.push_back(random_terminal(pset, rng));
    }
    return out;
}

bool splice_fits(const Genome& host, SubtreeSpan cut, SubtreeSpan graft, const LengthLimits& limits)
{
    const std::size_t length = host.valid_length - cut.length() + graft.length();
    return length >= limits.min_length && length <= limits.max_length && length <= host.capacity();
}

std::optional<Offspring> try_swap(const Genome& p1, SubtreeSpan s1, const Genome& p2, SubtreeSpan s2, Rng& rng,
                                  const VariationParams& params, const PrimitiveSet& pset)
{
    if (!splice_fits(p1, s1, s2, params.limits) || !splice_fits(p2, s2, s1, params.limits)) {
        return std::nullopt;
    }
    auto c1 = accept(splice(p1, s1, p2, s2, rng, pset), params.limits, pset);
    auto c2 = accept(splice(p2, s2, p1, s1, rng, pset), params.limits, pset);
    if (!c1 || !c2) {
        return std::nullopt;
    }
    return Offspring{std::move(*c1), std::move(*c2)};
}

struct ArityRange {
    Token begin;
    std::size_t count;
};

ArityRange range_of(Arity a, const PrimitiveSet& pset)
{
    switch (a) {
    case Arity::terminal: return {0, pset.terminal_count()};
    case Arity::binary: return {pset.binary_begin(), pset.binary_count()};
    case Arity::unary: return {pset.unary_begin(), pset.unary_count()};
    }
    return {0, 0};
}

// Draws a different token of the same arity for position `pos`. Returns false
// if no different token was drawn within the trial budget.
bool replace_same_arity(std::vector<Token>& tokens, std::size_t pos, Rng& rng, const VariationParams& params,
                        const PrimitiveSet& pset)
{
    const Token current = tokens[pos];
    const auto range = range_of(pset.arity(current), pset);
    if (range.count < 2) {
        return false;
    }
    for (int trial = 0; trial < params.max_mutation_trials; ++trial) {
        const Token candidate = range.begin + static_cast<Token>(rng.below(range.count));
        if (candidate != current) {
            tokens[pos] = candidate;
            return true;
        }
    }
    return false;
}

Genome mutated_copy(const Genome& g, std::vector<Token> tokens)
{
    Genome out;
    out.tokens = std::move(tokens);
    out.valid_length = g.valid_length;
    return out;
}

} // namespace

void check_variation_params(const VariationParams& params)
{
    if (params.max_crossover_trials < 1 || params.max_mutation_trials < 1) {
        throw ParameterError("trial caps must be at least 1");
    }
    if (!(params.operator_mutate_frequency >= 0.0 && params.operator_mutate_frequency <= 1.0)) {
        throw ParameterError("operator_mutate_frequency must lie in [0, 1]");
    }
    if (std::isnan(params.semantic_sensitivity) || params.semantic_sensitivity < 0.0) {
        throw ParameterError("semantic_sensitivity must be nonnegative");
    }
    if (params.limits.min_length < 1 || params.limits.max_length < params.limits.min_length) {
        throw ParameterError("length limits need 1 <= min_length <= max_length");
    }
}

std::string_view to_string(CrossoverType type)
{
    switch (type) {
    case CrossoverType::ga_like: return "ga_like";
    case CrossoverType::subtree: return "subtree";
    case CrossoverType::semantic_subtree: return "semantic_subtree";
    }
    return "";
}

std::string_view to_string(MutationType type)
{
    switch (type) {
    case MutationType::fully_protected: return "fully_protected";
    case MutationType::partially_protected: return "partially_protected";
    }
    return "";
}

CrossoverType parse_crossover_type(std::string_view text)
{
    for (auto t : {CrossoverType::ga_like, CrossoverType::subtree, CrossoverType::semantic_subtree}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    throw ParameterError("unknown crossover type '" + std::string(text) + "'");
}

MutationType parse_mutation_type(std::string_view text)
{
    for (auto t : {MutationType::fully_protected, MutationType::partially_protected}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    throw ParameterError("unknown mutation type '" + std::string(text) + "'");
}

Offspring crossover_ga_like(const Genome& p1, const Genome& p2, Rng& rng, const VariationParams& params,
                            const PrimitiveSet& pset)
{
    check_same_capacity(p1, p2);
    const std::size_t shortest = std::min(p1.valid_length, p2.valid_length);
    if (shortest < 2) {
        return {p1, p2};
    }
    const auto cut_of = [](std::size_t c) { return static_cast<std::ptrdiff_t>(c); };
    for (int trial = 0; trial < params.max_crossover_trials; ++trial) {
        const std::size_t cut = 1 + rng.below(shortest - 1);
        std::vector<Token> t1(p1.tokens.begin(), p1.tokens.begin() + cut_of(cut));
        t1.insert(t1.end(), p2.tokens.begin() + cut_of(cut), p2.tokens.end());
        std::vector<Token> t2(p2.tokens.begin(), p2.tokens.begin() + cut_of(cut));
        t2.insert(t2.end(), p1.tokens.begin() + cut_of(cut), p1.tokens.end());
        auto c1 = accept(std::move(t1), params.limits, pset);
        auto c2 = accept(std::move(t2), params.limits, pset);
        if (c1 && c2) {
            return {std::move(*c1), std::move(*c2)};
        }
    }
    return {p1, p2};
}

Offspring crossover_subtree(const Genome& p1, const Genome& p2, Rng& rng, const VariationParams& params,
                            const PrimitiveSet& pset)
{
    check_same_capacity(p1, p2);
    const auto spans1 = subtree_spans(p1, pset);
    const auto spans2 = subtree_spans(p2, pset);
    for (int trial = 0; trial < params.max_crossover_trials; ++trial) {
        const auto s1 = spans1[rng.below(spans1.size())];
        const auto s2 = spans2[rng.below(spans2.size())];
        if (auto children = try_swap(p1, s1, p2, s2, rng, params, pset)) {
            return std::move(*children);
        }
    }
    return {p1, p2};
}

Offspring crossover_semantic(const Genome& p1, const Genome& p2, const Dataset& data, Rng& rng,
                             const VariationParams& params, const PrimitiveSet& pset)
{
    // No distance exceeds an infinite threshold; skip straight to the fallback.
    if (std::isinf(params.semantic_sensitivity)) {
        return crossover_subtree(p1, p2, rng, params, pset);
    }
    check_same_capacity(p1, p2);
    const auto spans1 = subtree_spans(p1, pset);
    const auto spans2 = subtree_spans(p2, pset);
    for (int trial = 0; trial < params.max_crossover_trials; ++trial) {
        const auto s1 = spans1[rng.below(spans1.size())];
        const auto s2 = spans2[rng.below(spans2.size())];
        if (!splice_fits(p1, s1, s2, params.limits) || !splice_fits(p2, s2, s1, params.limits)) {
            continue;
        }
        if (!(semantic_distance(p1, s1, p2, s2, data, pset) > params.semantic_sensitivity)) {
            continue;
        }
        if (auto children = try_swap(p1, s1, p2, s2, rng, params, pset)) {
            return std::move(*children);
        }
    }
    return crossover_subtree(p1, p2, rng, params, pset);
}

Offspring crossover(const Genome& p1, const Genome& p2, const Dataset& data, Rng& rng,
                    const VariationParams& params, const PrimitiveSet& pset)
{
    switch (params.crossover_type) {
    case CrossoverType::ga_like: return crossover_ga_like(p1, p2, rng, params, pset);
    case CrossoverType::subtree: return crossover_subtree(p1, p2, rng, params, pset);
    case CrossoverType::semantic_subtree: return crossover_semantic(p1, p2, data, rng, params, pset);
    }
    return {p1, p2};
}

Genome mutate_fully_protected(const Genome& g, Rng& rng, const VariationParams& params, const PrimitiveSet& pset)
{
    std::vector<std::size_t> operators;
    std::vector<std::size_t> terminals;
    for (std::size_t i = 0; i < g.valid_length; ++i) {
        (pset.arity(g.tokens[i]) == Arity::terminal ? terminals : operators).push_back(i);
    }
    const bool want_operator = rng.bernoulli(params.operator_mutate_frequency);
    const auto& positions = (want_operator && !operators.empty()) || terminals.empty() ? operators : terminals;
    const std::size_t pos = positions[rng.below(positions.size())];

    std::vector<Token> tokens = g.tokens;
    if (!replace_same_arity(tokens, pos, rng, params, pset)) {
        return g;
    }
    return mutated_copy(g, std::move(tokens));
}

Genome mutate_partially_protected(const Genome& g, Rng& rng, const VariationParams& params,
                                  const PrimitiveSet& pset)
{
    for (int trial = 0; trial < params.max_mutation_trials; ++trial) {
        const std::size_t index = rng.below(g.capacity());
        std::vector<Token> tokens = g.tokens;
        if (index < params.limits.min_length) {
            if (!replace_same_arity(tokens, index, rng, params, pset)) {
                return g;
            }
            return mutated_copy(g, std::move(tokens));
        }
        tokens[index] = static_cast<Token>(rng.below(pset.size()));
        if (tokens[index] == g.tokens[index]) {
            return g;
        }
        if (auto child = accept(std::move(tokens), params.limits, pset)) {
            return std::move(*child);
        }
    }
    return g;
}

Genome mutate(const Genome& g, Rng& rng, const VariationParams& params, const PrimitiveSet& pset)
{
    switch (params.mutation_type) {
    case MutationType::fully_protected: return mutate_fully_protected(g, rng, params, pset);
    case MutationType::partially_protected: return mutate_partially_protected(g, rng, params, pset);
    }
    return g;
}

} // namespace stacksr
