#include "stacksr/rng.hpp"

#include <sstream>

#include "stacksr/error.hpp"

namespace stacksr {

std::string Rng::state() const
{
    std::ostringstream out;
    out << engine_;
    return out.str();
}

void Rng::restore(const std::string& text)
{
    std::istringstream in(text);
    Engine engine;
    in >> engine;
    if (in.fail()) {
        throw CorruptFileError("rng state: unreadable engine state");
    }
    engine_ = engine;
}

} // namespace stacksr
