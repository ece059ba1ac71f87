#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stacksr {

using Token = std::uint32_t;

enum class Arity { terminal, unary, binary };

enum class OpKind {
    add,
    sub,
    mul,
    div,
    min,
    max,
    sin,
    cos,
    exp,
    plog,  // log(x) for x > 0, else 0
    psqrt, // sqrt(x) for x >= 0, else 0
    abs,
    neg,
    square,
};

struct Operator {
    std::string symbol;
    OpKind kind;
    int arity;

    friend bool operator==(const Operator&, const Operator&) = default;
};

// Maps a function-file symbol to an operator. Returns nullopt for symbols
// outside the supported vocabulary or with a mismatched arity.
std::optional<Operator> lookup_operator(std::string_view symbol, int arity);

// True when the symbol is known for some arity.
bool is_known_symbol(std::string_view symbol);

double apply_binary(OpKind kind, double x, double y) noexcept;
double apply_unary(OpKind kind, double x) noexcept;

// Token ids are laid out contiguously:
//   variables [0, V), constants [V, V+C), binary ops [V+C, V+C+B),
//   unary ops [V+C+B, V+C+B+U).
class PrimitiveSet {
public:
    PrimitiveSet() = default;
    PrimitiveSet(std::vector<std::string> variables, std::vector<double> constants,
                 std::vector<Operator> binary_ops, std::vector<Operator> unary_ops);

    std::size_t variable_count() const noexcept { return variables_.size(); }
    std::size_t constant_count() const noexcept { return constants_.size(); }
    std::size_t binary_count() const noexcept { return binary_.size(); }
    std::size_t unary_count() const noexcept { return unary_.size(); }
    std::size_t terminal_count() const noexcept { return variables_.size() + constants_.size(); }
    std::size_t size() const noexcept { return terminal_count() + binary_.size() + unary_.size(); }

    Token binary_begin() const noexcept { return static_cast<Token>(terminal_count()); }
    Token unary_begin() const noexcept { return static_cast<Token>(terminal_count() + binary_.size()); }

    // Throws InvalidTokenError for ids >= size().
    Arity arity(Token id) const;

    bool is_variable(Token id) const noexcept { return id < variables_.size(); }
    bool is_constant(Token id) const noexcept
    {
        return id >= variables_.size() && id < terminal_count();
    }

    double constant(Token id) const { return constants_[id - variables_.size()]; }
    const Operator& binary_op(Token id) const { return binary_[id - binary_begin()]; }
    const Operator& unary_op(Token id) const { return unary_[id - unary_begin()]; }

    // Printable form of a token: variable name, shortest round-trip constant, or op symbol.
    std::string symbol(Token id) const;

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const std::vector<double>& constants() const noexcept { return constants_; }
    const std::vector<Operator>& binary_ops() const noexcept { return binary_; }
    const std::vector<Operator>& unary_ops() const noexcept { return unary_; }

    friend bool operator==(const PrimitiveSet&, const PrimitiveSet&) = default;

private:
    std::vector<std::string> variables_;
    std::vector<double> constants_;
    std::vector<Operator> binary_;
    std::vector<Operator> unary_;
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_real(double value);

} // namespace stacksr
