#include "stacksr/primitives.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>

#include "stacksr/error.hpp"

namespace stacksr {

namespace {

struct VocabularyEntry {
    std::string_view symbol;
    OpKind kind;
    int arity;
};

// "S" is kept as an alias of sin; older function files used it.
constexpr std::array<VocabularyEntry, 17> kVocabulary{{
    {"+", OpKind::add, 2},
    {"-", OpKind::sub, 2},
    {"−", OpKind::sub, 2},
    {"*", OpKind::mul, 2},
    {"/", OpKind::div, 2},
    {"min", OpKind::min, 2},
    {"max", OpKind::max, 2},
    {"sin", OpKind::sin, 1},
    {"S", OpKind::sin, 1},
    {"cos", OpKind::cos, 1},
    {"exp", OpKind::exp, 1},
    {"log", OpKind::plog, 1},
    {"sqrt", OpKind::psqrt, 1},
    {"abs", OpKind::abs, 1},
    {"neg", OpKind::neg, 1},
    {"sq", OpKind::square, 1},
    {"square", OpKind::square, 1},
}};

} // namespace

std::optional<Operator> lookup_operator(std::string_view symbol, int arity)
{
    for (const auto& entry : kVocabulary) {
        if (entry.symbol == symbol && entry.arity == arity) {
            // U+2212 is normalized so renderings stay ASCII.
            std::string printable = entry.kind == OpKind::sub ? "-" : std::string(symbol);
            return Operator{printable, entry.kind, entry.arity};
        }
    }
    return std::nullopt;
}

bool is_known_symbol(std::string_view symbol)
{
    for (const auto& entry : kVocabulary) {
        if (entry.symbol == symbol) {
            return true;
        }
    }
    return false;
}

double apply_binary(OpKind kind, double x, double y) noexcept
{
    switch (kind) {
    case OpKind::add: return x + y;
    case OpKind::sub: return x - y;
    case OpKind::mul: return x * y;
    case OpKind::div: return x / y;
    case OpKind::min: return std::fmin(x, y);
    case OpKind::max: return std::fmax(x, y);
    default: return std::nan("");
    }
}

double apply_unary(OpKind kind, double x) noexcept
{
    switch (kind) {
    case OpKind::sin: return std::sin(x);
    case OpKind::cos: return std::cos(x);
    case OpKind::exp: return std::exp(x);
    case OpKind::plog: return x > 0.0 ? std::log(x) : 0.0;
    case OpKind::psqrt: return x >= 0.0 ? std::sqrt(x) : 0.0;
    case OpKind::abs: return std::fabs(x);
    case OpKind::neg: return -x;
    case OpKind::square: return x * x;
    default: return std::nan("");
    }
}

PrimitiveSet::PrimitiveSet(std::vector<std::string> variables, std::vector<double> constants,
                           std::vector<Operator> binary_ops, std::vector<Operator> unary_ops)
    : variables_(std::move(variables)), constants_(std::move(constants)), binary_(std::move(binary_ops)),
      unary_(std::move(unary_ops))
{
    if (variables_.empty()) {
        throw ParameterError("primitive set needs at least one variable");
    }
    if (binary_.empty() && unary_.empty()) {
        throw ParameterError("primitive set needs at least one operator");
    }
    for (double c : constants_) {
        if (!std::isfinite(c)) {
            throw ParameterError("primitive set constants must be finite");
        }
    }
    for (const auto& op : binary_) {
        if (op.arity != 2) {
            throw ParameterError("operator '" + op.symbol + "' listed as binary has arity " +
                                 std::to_string(op.arity));
        }
    }
    for (const auto& op : unary_) {
        if (op.arity != 1) {
            throw ParameterError("operator '" + op.symbol + "' listed as unary has arity " +
                                 std::to_string(op.arity));
        }
    }
}

Arity PrimitiveSet::arity(Token id) const
{
    if (id < terminal_count()) {
        return Arity::terminal;
    }
    if (id < unary_begin()) {
        return Arity::binary;
    }
    if (id < size()) {
        return Arity::unary;
    }
    throw InvalidTokenError("token id " + std::to_string(id) + " outside primitive set of size " +
                            std::to_string(size()));
}

std::string PrimitiveSet::symbol(Token id) const
{
    switch (arity(id)) {
    case Arity::terminal:
        return is_variable(id) ? variables_[id] : format_real(constant(id));
    case Arity::binary:
        return binary_op(id).symbol;
    case Arity::unary:
        return unary_op(id).symbol;
    }
    return {};
}

std::string format_real(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

} // namespace stacksr
