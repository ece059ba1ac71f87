#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "stacksr/evaluator.hpp"

namespace stacksr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double x, int ulps = 1)
{
    for (int i = 0; i < ulps; ++i) {
        x = std::nextafter(x, -kInf);
    }
    return x;
}

double up(double x, int ulps = 1)
{
    for (int i = 0; i < ulps; ++i) {
        x = std::nextafter(x, kInf);
    }
    return x;
}

// Outward rounding by one ulp covers the correctly rounded arithmetic ops;
// libm functions get two.
constexpr int kLibmUlps = 2;

using MaybeInterval = std::optional<Interval>;

MaybeInterval bounded(double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        return std::nullopt;
    }
    return Interval{lo, hi};
}

MaybeInterval corners(double a, double b, double c, double d)
{
    const double lo = std::min({a, b, c, d});
    const double hi = std::max({a, b, c, d});
    return bounded(down(lo), up(hi));
}

MaybeInterval binary(OpKind kind, Interval x, Interval y)
{
    switch (kind) {
    case OpKind::add: return bounded(down(x.lo + y.lo), up(x.hi + y.hi));
    case OpKind::sub: return bounded(down(x.lo - y.hi), up(x.hi - y.lo));
    case OpKind::mul: return corners(x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi);
    case OpKind::div:
        if (y.lo <= 0.0 && y.hi >= 0.0) {
            return std::nullopt;
        }
        return corners(x.lo / y.lo, x.lo / y.hi, x.hi / y.lo, x.hi / y.hi);
    case OpKind::min: return bounded(std::min(x.lo, y.lo), std::min(x.hi, y.hi));
    case OpKind::max: return bounded(std::max(x.lo, y.lo), std::max(x.hi, y.hi));
    default: return std::nullopt;
    }
}

MaybeInterval unary(OpKind kind, Interval x)
{
    switch (kind) {
    case OpKind::sin:
    case OpKind::cos: return Interval{-1.0, 1.0};
    case OpKind::exp: return bounded(std::max(0.0, down(std::exp(x.lo), kLibmUlps)), up(std::exp(x.hi), kLibmUlps));
    case OpKind::plog:
        if (x.hi <= 0.0) {
            return Interval{0.0, 0.0};
        }
        if (x.lo <= 0.0) {
            // log is unbounded below as the argument approaches 0 from above.
            return std::nullopt;
        }
        return bounded(down(std::log(x.lo), kLibmUlps), up(std::log(x.hi), kLibmUlps));
    case OpKind::psqrt:
        return bounded(std::max(0.0, down(std::sqrt(std::max(0.0, x.lo)))), up(std::sqrt(std::max(0.0, x.hi))));
    case OpKind::abs:
        if (x.lo >= 0.0) {
            return x;
        }
        if (x.hi <= 0.0) {
            return Interval{-x.hi, -x.lo};
        }
        return Interval{0.0, std::max(-x.lo, x.hi)};
    case OpKind::neg: return Interval{-x.hi, -x.lo};
    case OpKind::square: {
        const auto a = *unary(OpKind::abs, x);
        return bounded(std::max(0.0, down(a.lo * a.lo)), up(a.hi * a.hi));
    }
    default: return std::nullopt;
    }
}

} // namespace

bool interval_feasible(const Genome& g, std::span<const Interval> box, const PrimitiveSet& pset)
{
    std::vector<Interval> stack;
    stack.reserve(g.valid_length);
    for (Token t : g.expressed()) {
        switch (pset.arity(t)) {
        case Arity::terminal:
            if (pset.is_variable(t)) {
                stack.push_back(box[t]);
            } else {
                stack.push_back(Interval{pset.constant(t), pset.constant(t)});
            }
            break;
        case Arity::unary: {
            if (stack.empty()) {
                return false;
            }
            auto r = unary(pset.unary_op(t).kind, stack.back());
            if (!r) {
                return false;
            }
            stack.back() = *r;
            break;
        }
        case Arity::binary: {
            if (stack.size() < 2) {
                return false;
            }
            const Interval y = stack.back();
            stack.pop_back();
            auto r = binary(pset.binary_op(t).kind, stack.back(), y);
            if (!r) {
                return false;
            }
            stack.back() = *r;
            break;
        }
        }
    }
    return stack.size() == 1;
}

} // namespace stacksr
