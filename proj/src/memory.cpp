#include "mpcv/memory.hpp"

#include <sstream>

#include "mpcv/error.hpp"

namespace mpcv {

void bind(Memory& m, const Var& x, MemValue v) {
    if (!m.emplace(x, v).second) fail(ErrorKind::Structural, "overwrite of " + to_string(x));
}

std::optional<Memory> merge(const Memory& a, const Memory& b) {
    Memory r = a;
    for (const auto& [x, v] : b) {
        auto [it, fresh] = r.emplace(x, v);
        if (!fresh && it->second != v) return std::nullopt;
    }
    return r;
}

Memory restrict_to(const Memory& m, const std::set<Var>& xs) {
    Memory r;
    for (const auto& [x, v] : m)
        if (xs.count(x)) r.emplace(x, v);
    return r;
}

std::string print_memory(const Memory& m) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [x, v] : m) {
        os << (first ? "" : ", ") << to_string(x) << " -> ";
        if (v)
            os << *v;
        else
            os << "_|_";
        first = false;
    }
    os << "}";
    return os.str();
}

}  // namespace mpcv
