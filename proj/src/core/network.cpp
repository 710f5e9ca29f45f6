#include "network.hpp"

#include <sstream>

namespace ratnet {

Architecture::Architecture(std::vector<std::size_t> d, bool diag) : dims(std::move(d)), diagnostic(diag) {
    if (dims.size() < 2) throw std::invalid_argument("architecture needs at least one layer");
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] == 0) throw std::invalid_argument("architecture widths must be positive");
        if (i + 1 < dims.size() && dims[i] < 2 && !diagnostic)
            throw std::invalid_argument("architecture " + to_string() +
                                        ": widths d_0..d_{L-1} must be at least 2");
    }
}

Architecture Architecture::parse(const std::string& text, bool diag) {
    std::vector<std::size_t> d;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse architecture '" + text + "'");
        }
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size() || v <= 0) throw std::invalid_argument("cannot parse architecture '" + text + "'");
        d.push_back(static_cast<std::size_t>(v));
    }
    return Architecture(std::move(d), diag);
}

bool Architecture::is_binary() const {
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        if (dims[i] != 2) return false;
    return true;
}

std::string Architecture::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(dims[i]);
    }
    return s;
}

std::uint64_t degree_p(const Architecture& a, std::size_t k) {
    if (k < 1 || k > a.L()) throw std::out_of_range("degree_p: layer index out of range");
    std::uint64_t d = 1;
    for (std::size_t j = 1; j < k; ++j) d *= a.dims[j] - 1;
    return d;
}

std::uint64_t degree_q(const Architecture& a, std::size_t k) {
    if (k > a.L()) throw std::out_of_range("degree_q: layer index out of range");
    if (k < 2) return 0;
    return a.dims[k - 1] * degree_p(a, k - 1);
}

DegreeProfile degrees(const Architecture& a) {
    const std::size_t L = a.L();
    DegreeProfile d;
    d.delta = parity(L);
    std::uint64_t n = degree_p(a, L);
    for (std::size_t k = L; k-- > 0;)
        if ((L - 1 - k) % 2 == 0) n += degree_q(a, k);
    std::uint64_t m = 0;
    for (std::size_t k = L + 1; k-- > 0;)
        if ((L - k) % 2 == 0) m += degree_q(a, k);
    d.n = static_cast<std::uint32_t>(n);
    d.m = static_cast<std::uint32_t>(m);
    return d;
}

std::uint64_t param_count(const Architecture& a) {
    std::uint64_t N = 0;
    for (std::size_t i = 0; i + 1 < a.dims.size(); ++i) N += a.dims[i] * a.dims[i + 1];
    return N;
}

std::uint64_t ambient_dim(const Architecture& a) {
    const DegreeProfile d = degrees(a);
    return a.output_dim() * monomial_count(a.input_dim(), d.n) + monomial_count(a.input_dim(), d.m);
}

std::uint64_t hidden_width_sum(const Architecture& a) {
    std::uint64_t s = 0;
    for (std::size_t i = 1; i + 1 < a.dims.size(); ++i) s += a.dims[i];
    return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 over a combination of both words
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {
template <class T, class Draw>
Weights<T> draw_weights(const Architecture& a, Draw&& draw) {
    Weights<T> w;
    w.arch = a;
    for (std::size_t k = 0; k < a.L(); ++k) {
        Matrix<T> m(a.dims[k + 1], a.dims[k]);
        for (auto& v : m.data()) v = draw();
        w.mats.push_back(std::move(m));
    }
    return w;
}
}  // namespace

Weights<double> random_real_weights(const Architecture& a, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return draw_weights<double>(a, [&] { return u(rng); });
}

Weights<cplx> random_complex_weights(const Architecture& a, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return draw_weights<cplx>(a, [&] {
        const double re = u(rng);
        return cplx(re, u(rng));
    });
}

Weights<Fp> random_gfp_weights(const Architecture& a, std::uint64_t seed, std::uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> u(1, p - 1);
    auto w = draw_weights<Fp>(a, [&] { return Fp(u(rng), p); });
    w.prime = p;
    return w;
}

}  // namespace ratnet
