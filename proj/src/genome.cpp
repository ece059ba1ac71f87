#include "stacksr/genome.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "stacksr/error.hpp"

namespace stacksr {

namespace {

// Whether a partial program at stack depth `depth` can be finished with
// exactly `remaining` more tokens so that a single value is left.
bool completable(std::size_t depth, std::size_t remaining, bool has_unary, bool has_binary)
{
    if (depth == 0) {
        return false;
    }
    if (!has_binary) {
        // Unary padding only; nothing can merge two operands.
        return depth == 1 && (remaining == 0 || has_unary);
    }
    if (depth - 1 > remaining) {
        return false;
    }
    if (has_unary) {
        return true;
    }
    // Binary-only programs change depth by +-1 per token.
    return (remaining - (depth - 1)) % 2 == 0;
}

Token draw_in_range(Token begin, std::size_t count, Rng& rng)
{
    return begin + static_cast<Token>(rng.below(count));
}

} // namespace

Arity arity(Token id, const PrimitiveSet& pset) { return pset.arity(id); }

std::optional<std::size_t> compute_valid_length(std::span<const Token> tokens, const PrimitiveSet& pset)
{
    std::optional<std::size_t> best;
    std::size_t depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] >= pset.size()) {
            break;
        }
        switch (pset.arity(tokens[i])) {
        case Arity::terminal:
            ++depth;
            break;
        case Arity::unary:
            if (depth < 1) {
                return best;
            }
            break;
        case Arity::binary:
            if (depth < 2) {
                return best;
            }
            --depth;
            break;
        }
        if (depth == 1) {
            best = i + 1;
        }
    }
    return best;
}

bool is_complete_expression(std::span<const Token> tokens, const PrimitiveSet& pset)
{
    if (tokens.empty()) {
        return false;
    }
    std::size_t depth = 0;
    for (Token t : tokens) {
        if (t >= pset.size()) {
            return false;
        }
        switch (pset.arity(t)) {
        case Arity::terminal: ++depth; break;
        case Arity::unary:
            if (depth < 1) {
                return false;
            }
            break;
        case Arity::binary:
            if (depth < 2) {
                return false;
            }
            --depth;
            break;
        }
    }
    return depth == 1;
}

void check_genome(const Genome& g, const PrimitiveSet& pset)
{
    if (g.valid_length == 0 || g.valid_length > g.capacity()) {
        throw InvalidGenomeError("genome valid length " + std::to_string(g.valid_length) +
                                 " outside capacity " + std::to_string(g.capacity()));
    }
    for (Token t : g.tokens) {
        if (t >= pset.size()) {
            throw InvalidGenomeError("genome holds token " + std::to_string(t) + " outside primitive set");
        }
    }
    if (!is_complete_expression(g.expressed(), pset)) {
        throw InvalidGenomeError("genome prefix of length " + std::to_string(g.valid_length) +
                                 " is not a complete expression");
    }
}

Token random_terminal(const PrimitiveSet& pset, Rng& rng)
{
    return draw_in_range(0, pset.terminal_count(), rng);
}

Genome random_genome(const PrimitiveSet& pset, std::size_t min_len, std::size_t max_len, Rng& rng)
{
    if (min_len < 1 || max_len < min_len) {
        throw ParameterError("random genome needs 1 <= min_len <= max_len, got " + std::to_string(min_len) +
                             ", " + std::to_string(max_len));
    }
    const bool has_unary = pset.unary_count() > 0;
    const bool has_binary = pset.binary_count() > 0;

    std::vector<std::size_t> lengths;
    for (std::size_t len = min_len; len <= max_len; ++len) {
        if (completable(1, len - 1, has_unary, has_binary)) {
            lengths.push_back(len);
        }
    }
    if (lengths.empty()) {
        throw InfeasiblePrimitiveSetError("no expression with length in [" + std::to_string(min_len) + ", " +
                                          std::to_string(max_len) + "] can be built from the primitive set");
    }
    const std::size_t target = lengths[rng.below(lengths.size())];

    Genome g;
    g.tokens.resize(max_len);
    std::size_t depth = 0;
    for (std::size_t k = 0; k < target; ++k) {
        const std::size_t remaining = target - k - 1;
        std::array<Arity, 3> classes{};
        std::size_t n = 0;
        if (completable(depth + 1, remaining, has_unary, has_binary)) {
            classes[n++] = Arity::terminal;
        }
        if (has_unary && depth >= 1 && completable(depth, remaining, has_unary, has_binary)) {
            classes[n++] = Arity::unary;
        }
        if (has_binary && depth >= 2 && completable(depth - 1, remaining, has_unary, has_binary)) {
            classes[n++] = Arity::binary;
        }
        // n > 0 is guaranteed: the state before this token was completable.
        switch (classes[rng.below(n)]) {
        case Arity::terminal:
            g.tokens[k] = random_terminal(pset, rng);
            ++depth;
            break;
        case Arity::unary:
            g.tokens[k] = draw_in_range(pset.unary_begin(), pset.unary_count(), rng);
            break;
        case Arity::binary:
            g.tokens[k] = draw_in_range(pset.binary_begin(), pset.binary_count(), rng);
            --depth;
            break;
        }
    }
    for (std::size_t k = target; k < max_len; ++k) {
        g.tokens[k] = random_terminal(pset, rng);
    }
    g.valid_length = target;
    return g;
}

std::vector<SubtreeSpan> subtree_spans(const Genome& g, const PrimitiveSet& pset)
{
    check_genome(g, pset);
    std::vector<SubtreeSpan> spans;
    spans.reserve(g.valid_length);
    std::vector<SubtreeSpan> stack;
    for (std::size_t i = 0; i < g.valid_length; ++i) {
        SubtreeSpan span{i, i};
        switch (pset.arity(g.tokens[i])) {
        case Arity::terminal:
            break;
        case Arity::unary:
            span.start = stack.back().start;
            stack.pop_back();
            break;
        case Arity::binary:
            stack.pop_back();
            span.start = stack.back().start;
            stack.pop_back();
            break;
        }
        stack.push_back(span);
        spans.push_back(span);
    }
    return spans;
}

std::vector<Genome> extract_subtrees(const Genome& g, std::size_t min_len, const PrimitiveSet& pset, Rng& rng)
{
    std::vector<Genome> out;
    for (const auto& span : subtree_spans(g, pset)) {
        if (span.length() <= min_len || span.length() == g.valid_length) {
            continue;
        }
        Genome sub;
        sub.tokens.resize(g.capacity());
        std::copy(g.tokens.begin() + static_cast<std::ptrdiff_t>(span.start),
                  g.tokens.begin() + static_cast<std::ptrdiff_t>(span.end + 1), sub.tokens.begin());
        for (std::size_t k = span.length(); k < sub.capacity(); ++k) {
            sub.tokens[k] = random_terminal(pset, rng);
        }
        sub.valid_length = span.length();
        out.push_back(std::move(sub));
    }
    return out;
}

std::string render_infix(std::span<const Token> tokens, const PrimitiveSet& pset)
{
    std::vector<std::string> stack;
    for (Token t : tokens) {
        switch (pset.arity(t)) {
        case Arity::terminal:
            stack.push_back(pset.symbol(t));
            break;
        case Arity::unary: {
            if (stack.empty()) {
                throw InvalidGenomeError("unary operator without operand");
            }
            stack.back() = pset.unary_op(t).symbol + "(" + stack.back() + ")";
            break;
        }
        case Arity::binary: {
            if (stack.size() < 2) {
                throw InvalidGenomeError("binary operator without two operands");
            }
            std::string rhs = std::move(stack.back());
            stack.pop_back();
            const auto& op = pset.binary_op(t);
            if (op.kind == OpKind::min || op.kind == OpKind::max) {
                stack.back() = op.symbol + "(" + stack.back() + "," + rhs + ")";
            } else {
                stack.back() = "(" + stack.back() + op.symbol + rhs + ")";
            }
            break;
        }
        }
    }
    if (stack.size() != 1) {
        throw InvalidGenomeError("token sequence does not reduce to a single expression");
    }
    return stack.front();
}

std::string render_infix(const Genome& g, const PrimitiveSet& pset)
{
    check_genome(g, pset);
    return render_infix(g.expressed(), pset);
}

std::string render_log(const Genome& g, const PrimitiveSet& pset)
{
    if (!g.fitness) {
        throw StateError("cannot render log line for a genome without fitness");
    }
    std::string line;
    for (Token t : g.expressed()) {
        line += pset.symbol(t);
        line += '#';
    }
    char adj[32];
    std::snprintf(adj, sizeof adj, "%.4f", g.fitness->adjusted);
    line += " → AdjFit → ";
    line += adj;
    line += " → ValPos → ";
    line += std::to_string(g.valid_length);
    return line;
}

} // namespace stacksr
