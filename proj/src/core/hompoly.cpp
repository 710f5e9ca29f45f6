#include "hompoly.hpp"

namespace ratnet {

namespace {
std::atomic<double> g_cleanup{1e-13};

void enumerate(std::size_t var, std::uint32_t remaining, Exponents& cur, std::vector<Exponents>& out) {
    if (var + 1 == cur.size()) {
        cur[var] = remaining;
        out.push_back(cur);
        return;
    }
    for (std::uint32_t k = remaining + 1; k-- > 0;) {
        cur[var] = k;
        enumerate(var + 1, remaining - k, cur, out);
    }
    cur[var] = 0;
}
}  // namespace

double cleanup_threshold() { return g_cleanup.load(std::memory_order_relaxed); }

void set_cleanup_threshold(double rel) {
    if (!(rel >= 0.0)) throw std::invalid_argument("cleanup threshold must be non-negative");
    g_cleanup.store(rel, std::memory_order_relaxed);
}

std::vector<Exponents> monomials_of_degree(std::size_t nvars, std::uint32_t degree) {
    std::vector<Exponents> out;
    if (nvars == 0) {
        if (degree == 0) out.emplace_back();
        return out;
    }
    Exponents cur(nvars, 0);
    enumerate(0, degree, cur, out);
    return out;
}

std::uint64_t monomial_count(std::size_t nvars, std::uint32_t degree) {
    if (nvars == 0) return degree == 0 ? 1 : 0;
    // C(n+d-1, d) computed incrementally; exact at each step.
    std::uint64_t c = 1;
    for (std::uint32_t i = 1; i <= degree; ++i) c = c * (nvars - 1 + i) / i;
    return c;
}

}  // namespace ratnet
