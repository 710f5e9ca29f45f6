#include "geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "linalg.hpp"

namespace ratnet {

namespace {

using DFp = Dual<Fp>;
using DReal = Dual<double>;

void check_deadline(const Deadline& d) {
    if (d && std::chrono::steady_clock::now() > *d) throw Timeout("time limit exceeded");
}

template <class T, class Base>
Weights<T> seeded_dual(const Weights<Base>& w, std::size_t layer, std::size_t idx, const Base& zero, const Base& one) {
    Weights<T> d;
    d.arch = w.arch;
    d.prime = w.prime;
    for (std::size_t k = 0; k < w.mats.size(); ++k) {
        Matrix<T> m(w.mats[k].rows(), w.mats[k].cols());
        for (std::size_t e = 0; e < m.data().size(); ++e) {
            const bool hot = (k == layer && e == idx);
            m.data()[e] = T(w.mats[k].data()[e], hot ? one : zero);
        }
        d.mats.push_back(std::move(m));
    }
    return d;
}

void enumerate_dims(std::vector<std::size_t>& cur, std::size_t L, std::uint64_t N, std::uint64_t max_params,
                    std::size_t max_width, std::vector<Architecture>& out) {
    const std::size_t i = cur.size();
    if (i == L + 1) {
        out.emplace_back(cur);
        return;
    }
    const std::size_t lo = (i == L) ? 1 : 2;
    for (std::size_t d = lo; d <= max_width; ++d) {
        const std::uint64_t add = i == 0 ? 0 : cur.back() * d;
        if (N + add > max_params) break;
        cur.push_back(d);
        enumerate_dims(cur, L, N + add, max_params, max_width, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<std::vector<std::uint64_t>> jacobian_mod_p(const Weights<Fp>& w, const Deadline& deadline) {
    const std::uint64_t p = w.prime ? w.prime : kDefaultPrime;
    const Fp zero(0, p), one(1, p);
    std::vector<std::vector<std::uint64_t>> rows;
    for (std::size_t k = 0; k < w.mats.size(); ++k) {
        for (std::size_t e = 0; e < w.mats[k].data().size(); ++e) {
            check_deadline(deadline);
            const auto t = forward_recursive(seeded_dual<DFp>(w, k, e, zero, one));
            std::vector<std::uint64_t> row;
            for (const DFp& c : tuple_coefficients(t)) row.push_back(c.eps.value_in(p));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

DimensionReport jacobian_rank_mod_p(const Architecture& arch, std::uint64_t seed, std::uint64_t p,
                                    const Deadline& deadline) {
    if (!is_prime(p)) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
    const auto t0 = std::chrono::steady_clock::now();
    DimensionReport r;
    r.arch = arch;
    r.prime = p;
    r.seed = seed;
    r.ambient_dim = ambient_dim(arch);
    r.param_count = param_count(arch);
    r.conjectured_dim = expected_dim(arch);
    r.conjectured_dim_max = expected_dim_max(arch);

    auto sample = [&](std::uint64_t i) {
        const auto w = random_gfp_weights(arch, derive_seed(seed, i), p);
        auto J = jacobian_mod_p(w, deadline);
        check_deadline(deadline);
        return static_cast<std::uint64_t>(rank_mod_p(std::move(J), p));
    };
    const std::uint64_t a = sample(0), b = sample(1);
    r.samples = 2;
    r.jacobian_rank = std::max(a, b);
    if (a != b) {
        r.jacobian_rank = std::max(r.jacobian_rank, sample(2));
        r.samples = 3;
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::size_t jacobian_rank_float(const Architecture& arch, std::uint64_t seed, double rel_tol) {
    const auto w = random_real_weights(arch, seed);
    const std::size_t N = param_count(arch);
    const std::size_t M = ambient_dim(arch);
    Matrix<double> J(N, M);
    std::size_t row = 0;
    for (std::size_t k = 0; k < w.mats.size(); ++k)
        for (std::size_t e = 0; e < w.mats[k].data().size(); ++e, ++row) {
            const auto t = forward_recursive(seeded_dual<DReal>(w, k, e, 0.0, 1.0));
            const auto coeffs = tuple_coefficients(t);
            for (std::size_t c = 0; c < coeffs.size(); ++c) J(row, c) = coeffs[c].eps;
        }
    return numerical_rank(J, rel_tol);
}

std::uint64_t expected_dim(const Architecture& arch) {
    const std::uint64_t fiber_free = param_count(arch) - hidden_width_sum(arch) + 1;
    return std::min(fiber_free, ambient_dim(arch));
}

std::uint64_t expected_dim_max(const Architecture& arch) {
    const std::uint64_t fiber_free = param_count(arch) - hidden_width_sum(arch) + 1;
    return std::max(fiber_free, ambient_dim(arch));
}

ShallowFilling filling_shallow(std::size_t n, std::size_t m, std::size_t k) {
    if (n < 1 || m < 1 || k < 1) throw std::invalid_argument("filling_shallow: n, m, k must be positive");
    const std::uint64_t N = n * m + m * k;
    const std::uint64_t M = k * monomial_count(n, static_cast<std::uint32_t>(m - 1)) +
                            monomial_count(n, static_cast<std::uint32_t>(m));
    ShallowFilling f;
    f.params_feasible = N >= M;
    // n = 1 and m = 1 make the parameter map onto the ambient space (away from Q = 0);
    // n = 2 fills only after closure.
    f.variety_filling = n <= 2 || m == 1;
    f.manifold_filling = n == 1 || m == 1;
    return f;
}

BinaryFilling filling_binary(std::size_t L, std::size_t dL) {
    if (L < 2 || dL < 1) throw std::invalid_argument("filling_binary: needs L >= 2 and dL >= 1");
    std::vector<std::size_t> dims(L, 2);
    dims.push_back(dL);
    const Architecture a(dims);
    BinaryFilling f;
    f.params_feasible = param_count(a) >= ambient_dim(a);
    f.variety_filling = L == 2 || dL == 1;
    return f;
}

double multiplicity_factor(const Exponents& e) {
    double f = 1.0;
    for (std::uint32_t v : e) f *= std::tgamma(static_cast<double>(v) + 1.0);
    return f;
}

MomentMatrix build_moment_matrix(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q,
                                 const Architecture& arch) {
    if (arch.L() != 2) throw std::invalid_argument("build_moment_matrix: needs one hidden layer");
    const std::size_t n = arch.dims[0], d1 = arch.dims[1], k = arch.dims[2];
    if (Ps.size() != k) throw ShapeError("build_moment_matrix: expected " + std::to_string(k) + " numerators");
    if (Q.nvars() != n || Q.degree() != d1) throw ShapeError("build_moment_matrix: denominator degree mismatch");
    for (const auto& p : Ps)
        if (p.nvars() != n || p.degree() + 1 != d1) throw ShapeError("build_moment_matrix: numerator degree mismatch");

    MomentMatrix mm;
    mm.rows = monomials_of_degree(n, static_cast<std::uint32_t>(d1 - 1));
    for (std::size_t i = 0; i < k; ++i) mm.cols.push_back("P" + std::to_string(i + 1));
    for (std::size_t j = 0; j < n; ++j) mm.cols.push_back("e" + std::to_string(j + 1));
    mm.entries = Matrix<cplx>(mm.rows.size(), k + n);
    for (std::size_t r = 0; r < mm.rows.size(); ++r) {
        const Exponents& S = mm.rows[r];
        const double fs = multiplicity_factor(S);
        for (std::size_t i = 0; i < k; ++i) mm.entries(r, i) = fs * Ps[i].coeff(S);
        for (std::size_t j = 0; j < n; ++j) {
            Exponents T = S;
            T[j] += 1;
            mm.entries(r, k + j) = multiplicity_factor(T) * Q.coeff(T);
        }
    }
    return mm;
}

RankTest rank_test_membership(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q, const Architecture& arch,
                              double tol) {
    const MomentMatrix mm = build_moment_matrix(Ps, Q, arch);
    RankTest t;
    t.singular_values = singular_values(mm.entries);
    t.rank = numerical_rank(mm.entries, tol);
    t.in_model = t.rank <= arch.dims[1];
    t.necessary_only = arch.dims[1] >= 3;
    return t;
}

std::vector<Architecture> enumerate_architectures(std::uint64_t max_params, std::size_t max_layers,
                                                  std::size_t max_width) {
    std::vector<Architecture> out;
    for (std::size_t L = 2; L <= max_layers; ++L) {
        std::vector<std::size_t> cur;
        enumerate_dims(cur, L, 0, max_params, max_width, out);
    }
    return out;
}

std::vector<DimensionReport> census(const CensusOptions& opt,
                                    const std::function<void(const DimensionReport&)>& progress) {
    const auto archs = enumerate_architectures(opt.max_params, opt.max_layers, opt.max_width);
    std::vector<DimensionReport> out(archs.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < archs.size(); i = next++) {
            const auto start = std::chrono::steady_clock::now();
            const Deadline deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                  std::chrono::duration<double>(opt.timeout_s));
            DimensionReport r;
            try {
                r = jacobian_rank_mod_p(archs[i], derive_seed(opt.seed, i), opt.prime, deadline);
            } catch (const Timeout&) {
                r.arch = archs[i];
                r.ambient_dim = ambient_dim(archs[i]);
                r.param_count = param_count(archs[i]);
                r.conjectured_dim = expected_dim(archs[i]);
                r.conjectured_dim_max = expected_dim_max(archs[i]);
                r.prime = opt.prime;
                r.seed = derive_seed(opt.seed, i);
                r.status = "timeout";
            } catch (const std::exception& ex) {
                r.arch = archs[i];
                r.status = std::string("error: ") + ex.what();
            }
            r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            out[i] = r;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress(r);
            }
        }
    };
    const unsigned n = std::max(1u, opt.workers);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

std::string census_csv(const std::vector<DimensionReport>& rows, bool include_runtime) {
    std::ostringstream os;
    os << "arch,jacobian_rank,ambient_dim,param_count,conjectured_dim,match";
    if (include_runtime) os << ",runtime_s";
    os << ",status\n";
    for (const auto& r : rows) {
        const bool ok = r.status == "ok";
        os << '"' << r.arch.to_string() << "\",";
        if (ok) os << r.jacobian_rank;
        os << ',' << r.ambient_dim << ',' << r.param_count << ',' << r.conjectured_dim << ','
           << (ok && r.jacobian_rank == r.conjectured_dim ? "true" : "false");
        if (include_runtime) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.runtime_seconds);
            os << ',' << buf;
        }
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '"', '\'');
        os << ',' << status << '\n';
    }
    return os.str();
}

}  // namespace ratnet
