#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the evaluator or the depth-count scanner, so the tests can
// compare the library against it.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stacksr/engine.hpp"
#include "stacksr/evaluator.hpp"
#include "stacksr/genome.hpp"
#include "stacksr/primitives.hpp"

namespace testsupport {

using stacksr::Dataset;
using stacksr::Genome;
using stacksr::PrimitiveSet;
using stacksr::Token;

// x; constants {1,2,3,5,7}; + - * /
PrimitiveSet case_study_pset();
// case_study_pset plus the unary op sin.
PrimitiveSet case_study_pset_with_sin();
// x; constants {1,2,-0.5}; + - * / min max; sin cos exp log sqrt abs neg sq
PrimitiveSet rich_pset();

double cubic_target(double x);
// 21 points x = -10..10 of cubic_target.
Dataset case_study_dataset();
// x = 11..20 of cubic_target.
Dataset case_study_test_dataset();
stacksr::GpParams case_study_params(std::uint64_t seed);

// Token id for a printable symbol ("x", "1", "+", "sin").
Token token(const PrimitiveSet& pset, std::string_view symbol);
std::vector<Token> tokens(const PrimitiveSet& pset, const std::vector<std::string>& symbols);

// Genome from symbols; the tail up to `capacity` is filled with `pad`
// (first variable by default). valid_length is set to the symbol count.
Genome make_genome(const PrimitiveSet& pset, const std::vector<std::string>& symbols, std::size_t capacity = 0,
                   std::optional<std::string> pad = std::nullopt);

// Postfix form of the published 33-node evolved solution.
std::vector<std::string> evolved_postfix();

// --- oracles -----------------------------------------------------------

// Right-to-left recursive parse: index of the first token of the subtree
// ending at `end`, or nullopt if it runs off the front.
std::optional<std::size_t> subtree_start(std::span<const Token> tokens, std::size_t end, const PrimitiveSet& pset);

// True when tokens[0..length) is one complete expression (parse oracle).
bool oracle_complete(std::span<const Token> tokens, std::size_t length, const PrimitiveSet& pset);

// Largest complete prefix length, by trying every length.
std::optional<std::size_t> oracle_valid_length(std::span<const Token> tokens, const PrimitiveSet& pset);

struct Node {
    Token token;
    std::size_t start;
    std::size_t end;
    std::vector<std::unique_ptr<Node>> children;
};

std::unique_ptr<Node> build_tree(std::span<const Token> tokens, std::size_t end, const PrimitiveSet& pset);

// Recursive evaluation; returns the first non-finite intermediate in
// left-to-right order, as the stack machine does.
double eval_tree(const Node& node, std::span<const double> inputs, const PrimitiveSet& pset);

// Parses render_infix output back into a tree over pset symbols and evaluates it.
double eval_infix(std::string_view text, std::span<const double> inputs, const PrimitiveSet& pset);

bool same_bits(double a, double b);

} // namespace testsupport
