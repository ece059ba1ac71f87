#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stacksr/primitives.hpp"
#include "stacksr/rng.hpp"

namespace stacksr {

struct Fitness {
    double raw = 0.0;      // sum of absolute errors, +inf on failed evaluation
    double adjusted = 0.0; // 1 / (1 + raw), 0 when raw is not finite

    friend bool operator==(const Fitness&, const Fitness&) = default;
};

// Linear postfix genome. The token array has a fixed capacity (the run's
// maximum length); only the leading valid_length tokens are expressed, the
// rest is inert material that crossover and mutation can reactivate.
struct Genome {
    std::vector<Token> tokens;
    std::size_t valid_length = 0;
    std::optional<Fitness> fitness;

    std::size_t capacity() const noexcept { return tokens.size(); }
    std::span<const Token> expressed() const noexcept
    {
        return std::span<const Token>(tokens).first(valid_length);
    }

    double adjusted() const { return fitness ? fitness->adjusted : 0.0; }

    friend bool operator==(const Genome&, const Genome&) = default;
};

struct SubtreeSpan {
    std::size_t start = 0;
    std::size_t end = 0; // inclusive

    std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const SubtreeSpan&, const SubtreeSpan&) = default;
};

struct LengthLimits {
    std::size_t min_length = 1;
    std::size_t max_length = 1;
};

Arity arity(Token id, const PrimitiveSet& pset);

// Largest prefix length that forms exactly one complete postfix expression,
// scanning with a depth counter. nullopt if no prefix is complete.
std::optional<std::size_t> compute_valid_length(std::span<const Token> tokens, const PrimitiveSet& pset);

// True when tokens[0..length) is itself a complete expression.
bool is_complete_expression(std::span<const Token> tokens, const PrimitiveSet& pset);

// Throws InvalidGenomeError unless g's expressed prefix is a completion point
// that fits its capacity.
void check_genome(const Genome& g, const PrimitiveSet& pset);

Token random_terminal(const PrimitiveSet& pset, Rng& rng);

// Random genome of capacity max_len whose valid_length is uniform over the
// feasible lengths in [min_len, max_len]. Tail positions hold random terminals.
Genome random_genome(const PrimitiveSet& pset, std::size_t min_len, std::size_t max_len, Rng& rng);

// One span per expressed position, ordered by end index.
std::vector<SubtreeSpan> subtree_spans(const Genome& g, const PrimitiveSet& pset);

// Proper subtrees longer than min_len, each as a standalone genome with the
// same capacity as g. Fitness is left unset.
std::vector<Genome> extract_subtrees(const Genome& g, std::size_t min_len, const PrimitiveSet& pset,
                                     Rng& rng);

// Fully parenthesized infix form, e.g. "((x*x)+2)" or "sin(x)".
std::string render_infix(const Genome& g, const PrimitiveSet& pset);
std::string render_infix(std::span<const Token> tokens, const PrimitiveSet& pset);

// Population-log line: "x#1#+# → AdjFit → 0.5000 → ValPos → 3".
std::string render_log(const Genome& g, const PrimitiveSet& pset);

} // namespace stacksr
