#include "support.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace testsupport {

using stacksr::Arity;
using stacksr::Operator;

namespace {

std::vector<Operator> ops(const std::vector<std::pair<std::string, int>>& list)
{
    std::vector<Operator> out;
    for (const auto& [sym, arity] : list) {
        out.push_back(*stacksr::lookup_operator(sym, arity));
    }
    return out;
}

} // namespace

PrimitiveSet case_study_pset()
{
    return PrimitiveSet({"x"}, {1, 2, 3, 5, 7}, ops({{"+", 2}, {"-", 2}, {"*", 2}, {"/", 2}}), {});
}

PrimitiveSet case_study_pset_with_sin()
{
    return PrimitiveSet({"x"}, {1, 2, 3, 5, 7}, ops({{"+", 2}, {"-", 2}, {"*", 2}, {"/", 2}}), ops({{"sin", 1}}));
}

PrimitiveSet rich_pset()
{
    return PrimitiveSet({"x"}, {1, 2, -0.5},
                        ops({{"+", 2}, {"-", 2}, {"*", 2}, {"/", 2}, {"min", 2}, {"max", 2}}),
                        ops({{"sin", 1}, {"cos", 1}, {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"abs", 1}, {"neg", 1}, {"sq", 1}}));
}

double cubic_target(double x)
{
    const double u = x + 1;
    return 3 * u * u * u + 2 * u * u + u;
}

namespace {

Dataset cubic_range(int lo, int hi)
{
    Dataset d;
    d.variable_names = {"x"};
    for (int x = lo; x <= hi; ++x) {
        d.inputs.push_back({static_cast<double>(x)});
        d.targets.push_back(cubic_target(x));
    }
    return d;
}

} // namespace

Dataset case_study_dataset() { return cubic_range(-10, 10); }
Dataset case_study_test_dataset() { return cubic_range(11, 20); }

stacksr::GpParams case_study_params(std::uint64_t seed)
{
    stacksr::GpParams p;
    p.population_size = 50;
    p.generations = 200;
    p.generations_per_cascade = 200;
    p.crossover_rate = 0.9;
    p.mutation_rate = 0.1;
    p.min_length = 15;
    p.max_length = 35;
    p.selection.archive_size = stacksr::default_archive_size(p.population_size);
    p.seed = seed;
    return p;
}

Token token(const PrimitiveSet& pset, std::string_view symbol)
{
    for (Token t = 0; t < pset.size(); ++t) {
        if (pset.symbol(t) == symbol) {
            return t;
        }
    }
    throw std::invalid_argument("unknown symbol " + std::string(symbol));
}

std::vector<Token> tokens(const PrimitiveSet& pset, const std::vector<std::string>& symbols)
{
    std::vector<Token> out;
    for (const auto& s : symbols) {
        out.push_back(token(pset, s));
    }
    return out;
}

Genome make_genome(const PrimitiveSet& pset, const std::vector<std::string>& symbols, std::size_t capacity,
                   std::optional<std::string> pad)
{
    Genome g;
    g.tokens = tokens(pset, symbols);
    g.valid_length = g.tokens.size();
    const Token filler = pad ? token(pset, *pad) : 0;
    while (g.tokens.size() < capacity) {
        g.tokens.push_back(filler);
    }
    return g;
}

std::vector<std::string> evolved_postfix()
{
    // (x+(((((x*(5+(x+(2*x))))*(x+2))+(5/5*(5/5))))-5)+(x+(2*(x+5)))))
    return {"x", "x", "5", "x", "2", "x", "*", "+", "+", "*", "x", "2", "+", "*", "5", "5", "/",
            "5", "5", "/", "*", "+", "5", "-", "x", "2", "x", "5", "+", "*", "+", "+", "+"};
}

std::optional<std::size_t> subtree_start(std::span<const Token> tokens, std::size_t end, const PrimitiveSet& pset)
{
    std::size_t needed = 1;
    std::size_t i = end + 1;
    while (needed > 0) {
        if (i == 0) {
            return std::nullopt;
        }
        --i;
        switch (pset.arity(tokens[i])) {
        case Arity::terminal: --needed; break;
        case Arity::unary: break;
        case Arity::binary: ++needed; break;
        }
    }
    return i;
}

bool oracle_complete(std::span<const Token> tokens, std::size_t length, const PrimitiveSet& pset)
{
    if (length == 0 || length > tokens.size()) {
        return false;
    }
    for (std::size_t i = 0; i < length; ++i) {
        if (tokens[i] >= pset.size()) {
            return false;
        }
    }
    // The last token must root a subtree that starts exactly at 0, and every
    // operator inside must find its operands (checked by the tree build).
    const auto start = subtree_start(tokens, length - 1, pset);
    if (!start || *start != 0) {
        return false;
    }
    try {
        build_tree(tokens.first(length), length - 1, pset);
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

std::optional<std::size_t> oracle_valid_length(std::span<const Token> tokens, const PrimitiveSet& pset)
{
    for (std::size_t len = tokens.size(); len >= 1; --len) {
        if (oracle_complete(tokens, len, pset)) {
            return len;
        }
    }
    return std::nullopt;
}

std::unique_ptr<Node> build_tree(std::span<const Token> tokens, std::size_t end, const PrimitiveSet& pset)
{
    auto node = std::make_unique<Node>();
    node->token = tokens[end];
    node->end = end;
    switch (pset.arity(tokens[end])) {
    case Arity::terminal:
        node->start = end;
        break;
    case Arity::unary: {
        if (end == 0) {
            throw std::runtime_error("unary without operand");
        }
        node->children.push_back(build_tree(tokens, end - 1, pset));
        node->start = node->children[0]->start;
        break;
    }
    case Arity::binary: {
        if (end == 0) {
            throw std::runtime_error("binary without operands");
        }
        auto right = build_tree(tokens, end - 1, pset);
        if (right->start == 0) {
            throw std::runtime_error("binary missing left operand");
        }
        auto left = build_tree(tokens, right->start - 1, pset);
        node->start = left->start;
        node->children.push_back(std::move(left));
        node->children.push_back(std::move(right));
        break;
    }
    }
    return node;
}

double eval_tree(const Node& node, std::span<const double> inputs, const PrimitiveSet& pset)
{
    switch (pset.arity(node.token)) {
    case Arity::terminal:
        return pset.is_variable(node.token) ? inputs[node.token] : pset.constant(node.token);
    case Arity::unary: {
        const double a = eval_tree(*node.children[0], inputs, pset);
        if (!std::isfinite(a)) {
            return a;
        }
        return stacksr::apply_unary(pset.unary_op(node.token).kind, a);
    }
    case Arity::binary: {
        const double a = eval_tree(*node.children[0], inputs, pset);
        if (!std::isfinite(a)) {
            return a;
        }
        const double b = eval_tree(*node.children[1], inputs, pset);
        if (!std::isfinite(b)) {
            return b;
        }
        return stacksr::apply_binary(pset.binary_op(node.token).kind, a, b);
    }
    }
    return std::nan("");
}

namespace {

// Recursive-descent reader for the fully parenthesized infix grammar:
//   expr := '(' expr op expr ')' | name '(' expr [',' expr] ')' | atom
class InfixReader {
public:
    InfixReader(std::string_view text, std::span<const double> inputs, const PrimitiveSet& pset)
        : text_(text), inputs_(inputs), pset_(pset)
    {
    }

    double read()
    {
        const double v = expr();
        if (pos_ != text_.size()) {
            throw std::runtime_error("trailing input in infix text");
        }
        return v;
    }

private:
    double expr()
    {
        if (peek() == '(') {
            ++pos_;
            const double a = expr();
            const char op = text_[pos_++];
            const double b = expr();
            expect(')');
            for (const auto& o : pset_.binary_ops()) {
                if (o.symbol.size() == 1 && o.symbol[0] == op) {
                    return stacksr::apply_binary(o.kind, a, b);
                }
            }
            throw std::runtime_error(std::string("unknown infix operator ") + op);
        }
        // Longest name made of letters that is followed by '('.
        std::size_t n = 0;
        while (pos_ + n < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_ + n]))) {
            ++n;
        }
        if (n > 0 && pos_ + n < text_.size() && text_[pos_ + n] == '(') {
            const std::string name(text_.substr(pos_, n));
            pos_ += n + 1;
            const double a = expr();
            if (peek() == ',') {
                ++pos_;
                const double b = expr();
                expect(')');
                for (const auto& o : pset_.binary_ops()) {
                    if (o.symbol == name) {
                        return stacksr::apply_binary(o.kind, a, b);
                    }
                }
                throw std::runtime_error("unknown function " + name);
            }
            expect(')');
            for (const auto& o : pset_.unary_ops()) {
                if (o.symbol == name) {
                    return stacksr::apply_unary(o.kind, a);
                }
            }
            throw std::runtime_error("unknown function " + name);
        }
        if (n > 0) {
            const std::string name(text_.substr(pos_, n));
            pos_ += n;
            for (std::size_t i = 0; i < pset_.variable_count(); ++i) {
                if (pset_.variables()[i] == name) {
                    return inputs_[i];
                }
            }
            throw std::runtime_error("unknown variable " + name);
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc{}) {
            throw std::runtime_error("bad number in infix text");
        }
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void expect(char c)
    {
        if (peek() != c) {
            throw std::runtime_error(std::string("expected ") + c);
        }
        ++pos_;
    }

    std::string_view text_;
    std::span<const double> inputs_;
    const PrimitiveSet& pset_;
    std::size_t pos_ = 0;
};

} // namespace

double eval_infix(std::string_view text, std::span<const double> inputs, const PrimitiveSet& pset)
{
    return InfixReader(text, inputs, pset).read();
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

} // namespace testsupport
