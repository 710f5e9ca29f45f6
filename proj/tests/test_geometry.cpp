#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "geometry.hpp"
#include "linalg.hpp"
#include "support.hpp"

using namespace ratnet;

namespace {

struct TableRow {
    std::vector<std::size_t> d;
    std::uint64_t rank, M, N;
};

const std::vector<TableRow> kTable{{{3, 3, 3, 3}, 22, 136, 27},
                                   {{2, 3, 4, 3}, 24, 39, 30},
                                   {{4, 3, 2, 2, 3}, 22, 372, 28},
                                   {{2, 2, 2, 3, 2, 1}, 14, 15, 22},
                                   {{2, 2, 4, 2, 2, 1}, 17, 23, 26}};

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("reference ranks, ambient dimensions, parameter counts") {
    for (const auto& r : kTable) {
        Architecture a(r.d);
        auto rep = jacobian_rank_mod_p(a, 7);
        INFO(a.to_string());
        CHECK(rep.jacobian_rank == r.rank);
        CHECK(rep.ambient_dim == r.M);
        CHECK(rep.param_count == r.N);
        CHECK(rep.conjectured_dim == r.rank);
        CHECK(expected_dim(a) == r.rank);
        CHECK(rep.status == "ok");
        CHECK(rep.runtime_seconds < 60.0);
    }
}

TEST_CASE("expected dimension: min form and the max variant") {
    CHECK(expected_dim(Architecture({2, 2, 2, 3, 2, 1})) == 14);
    CHECK(expected_dim(Architecture({3, 3, 3, 3})) == 22);
    CHECK(expected_dim(Architecture({2, 3, 4, 3})) == 24);
    // (2,2,1): N - sum + 1 = 5 = M, both forms agree
    CHECK(expected_dim(Architecture({2, 2, 1})) == 5);
    CHECK(expected_dim_max(Architecture({2, 2, 1})) == 5);
    // (2,3,4,3): 24 vs ambient 39
    CHECK(expected_dim_max(Architecture({2, 3, 4, 3})) == 39);
}

TEST_CASE("(2,2,1) is filling with rank 5") {
    CHECK(jacobian_rank_mod_p(Architecture({2, 2, 1}), 1).jacobian_rank == 5);
}

TEST_CASE("rank never exceeds the fiber bound; resampling is stable") {
    for (const auto& a : enumerate_architectures(16, 4)) {
        auto r1 = jacobian_rank_mod_p(a, 11), r2 = jacobian_rank_mod_p(a, 12);
        INFO(a.to_string());
        const std::uint64_t fiber_bound = param_count(a) - hidden_width_sum(a) + 1;
        CHECK(r1.jacobian_rank <= fiber_bound);
        CHECK(r1.jacobian_rank <= std::min(param_count(a), ambient_dim(a)));
        CHECK(r1.jacobian_rank == r2.jacobian_rank);
        CHECK(r1.samples >= 2);
    }
}

TEST_CASE("GF(p) rank agrees with the floating-point rank on small architectures") {
    for (const auto& d : std::vector<std::vector<std::size_t>>{{2, 2, 1}, {3, 2, 2}, {2, 3, 2}, {2, 2, 2, 1}, {3, 3, 1},
                                                                {2, 2, 2, 2}}) {
        Architecture a(d);
        INFO(a.to_string());
        CHECK(jacobian_rank_float(a, 3) == jacobian_rank_mod_p(a, 3).jacobian_rank);
    }
}

TEST_CASE("(n,2,m) has dimension 2(n+m)-1") {
    for (std::size_t n = 2; n <= 5; ++n)
        for (std::size_t m = 1; m <= 5; ++m) {
            Architecture a({n, 2, m});
            INFO(a.to_string());
            CHECK(jacobian_rank_mod_p(a, 5).jacobian_rank == 2 * (n + m) - 1);
        }
}

TEST_CASE("shallow filling predicates") {
    auto f = filling_shallow(2, 5, 1);
    CHECK(f.params_feasible);
    CHECK(f.variety_filling);
    CHECK_FALSE(f.manifold_filling);
    f = filling_shallow(3, 3, 1);
    CHECK_FALSE(f.params_feasible);
    CHECK_FALSE(f.variety_filling);
    CHECK_FALSE(f.manifold_filling);
    f = filling_shallow(1, 4, 2);
    CHECK(f.params_feasible);
    CHECK(f.variety_filling);
    CHECK(f.manifold_filling);
    // the parameter count inequality N >= M holds exactly for n <= 2 when m >= 2
    for (std::size_t n = 2; n <= 5; ++n)
        for (std::size_t m = 2; m <= 5; ++m)
            for (std::size_t k = 1; k <= 3; ++k) CHECK(filling_shallow(n, m, k).params_feasible == (n <= 2));
}

TEST_CASE("binary filling predicates") {
    auto b = filling_binary(4, 3);
    CHECK(b.params_feasible);
    CHECK_FALSE(b.variety_filling);
    b = filling_binary(5, 1);
    CHECK(b.params_feasible);
    CHECK(b.variety_filling);
    b = filling_binary(3, 3);
    CHECK_FALSE(b.params_feasible);
    CHECK_FALSE(b.variety_filling);
    b = filling_binary(2, 4);
    CHECK(b.variety_filling);
    // thresholds: d_L <= 3 for even L, d_L <= 2 for odd L (L > 2)
    for (std::size_t L = 3; L <= 8; ++L)
        for (std::size_t k = 1; k <= 5; ++k)
            CHECK(filling_binary(L, k).params_feasible == (L % 2 == 0 ? k <= 3 : k <= 2));
}

TEST_CASE("moment matrix layout for (3,2,1)") {
    // P = sum c_i x_i, Q = sum C_u x^u with distinct recognisable values
    std::vector<cplx> pc{1.0, 2.0, 3.0};
    auto P = HomPoly<cplx>::linear(pc);
    HomPoly<cplx>::TermMap qt;
    qt.emplace(Exponents{2, 0, 0}, 11.0);
    qt.emplace(Exponents{1, 1, 0}, 12.0);
    qt.emplace(Exponents{1, 0, 1}, 13.0);
    qt.emplace(Exponents{0, 2, 0}, 22.0);
    qt.emplace(Exponents{0, 1, 1}, 23.0);
    qt.emplace(Exponents{0, 0, 2}, 33.0);
    HomPoly<cplx> Q(3, 2, qt);
    auto M = build_moment_matrix({P}, Q, Architecture({3, 2, 1}));
    REQUIRE(M.entries.rows() == 3);
    REQUIRE(M.entries.cols() == 4);
    const double expect[3][4] = {{1, 22, 12, 13}, {2, 12, 44, 23}, {3, 13, 23, 66}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) CHECK(M.entries(r, c) == cplx(expect[r][c], 0.0));
    CHECK(M.rows.front() == Exponents{1, 0, 0});
}

TEST_CASE("moment matrix multipliers for (3,3,1)") {
    auto w = random_complex_weights(Architecture({3, 3, 1}), 61);
    auto t = forward_recursive(w);
    auto M = build_moment_matrix(t.numerators, t.denominator, w.arch);
    REQUIRE(M.entries.rows() == 6);
    REQUIRE(M.entries.cols() == 4);
    // row (e1,e1): 2 C_{2e1}(P), 6 C_{3e1}(Q), 2 C_{2e1+e2}(Q), 2 C_{2e1+e3}(Q)
    CHECK(std::abs(M.entries(0, 0) - 2.0 * t.numerators[0].coeff({2, 0, 0})) < 1e-14);
    CHECK(std::abs(M.entries(0, 1) - 6.0 * t.denominator.coeff({3, 0, 0})) < 1e-14);
    CHECK(std::abs(M.entries(0, 2) - 2.0 * t.denominator.coeff({2, 1, 0})) < 1e-14);
    // row (e1,e2): C_{e1+e2}(P), 2 C_{2e1+e2}(Q), 2 C_{e1+2e2}(Q), C_{e1+e2+e3}(Q)
    CHECK(std::abs(M.entries(1, 0) - t.numerators[0].coeff({1, 1, 0})) < 1e-14);
    CHECK(std::abs(M.entries(1, 3) - t.denominator.coeff({1, 1, 1})) < 1e-14);
    CHECK(numerical_rank(M.entries, 1e-8) <= 3);
    auto rt3 = rank_test_membership(t.numerators, t.denominator, w.arch);
    CHECK(rt3.in_model);
    CHECK(rt3.necessary_only);
}

TEST_CASE("moment matrix factors through the weights for (n,2,m)") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        Architecture a({4, 2, 3});
        auto w = random_complex_weights(a, 70 + s);
        auto t = forward_recursive(w);
        auto M = build_moment_matrix(t.numerators, t.denominator, a);
        const Matrix<cplx> P12{{0.0, 1.0}, {1.0, 0.0}};
        Matrix<cplx> right(2, 3 + 4);
        for (std::size_t r = 0; r < 2; ++r) {
            for (std::size_t k = 0; k < 3; ++k) right(r, k) = w.mats[1](k, r);
            for (std::size_t j = 0; j < 4; ++j) right(r, 3 + j) = w.mats[0](r, j);
        }
        auto product = w.mats[0].transpose() * P12 * right;
        double err = 0.0;
        for (std::size_t r = 0; r < product.rows(); ++r)
            for (std::size_t c = 0; c < product.cols(); ++c) err = std::max(err, std::abs(product(r, c) - M.entries(r, c)));
        CHECK(err <= 1e-13);
    }
}

TEST_CASE("rank test: on-model rank 2, off-model rank at least 3") {
    rt::rng(81);
    int on = 0, off = 0, total = 0;
    for (std::size_t n = 3; n <= 5; ++n)
        for (std::size_t m = 1; m <= 5; ++m) {
            Architecture a({n, 2, m});
            for (std::uint64_t s = 0; s < 5; ++s, ++total) {
                auto t = forward_recursive(random_complex_weights(a, 1000 * n + 10 * m + s));
                auto r = rank_test_membership(t.numerators, t.denominator, a);
                if (r.in_model && r.rank == 2 && !r.necessary_only) ++on;
                std::vector<HomPoly<cplx>> Ps;
                for (std::size_t k = 0; k < m; ++k) Ps.push_back(rt::random_poly<cplx>(n, 1));
                auto rr = rank_test_membership(Ps, rt::random_poly<cplx>(n, 2), a);
                if (!rr.in_model && rr.rank >= 3) ++off;
            }
        }
    CHECK(on == total);
    CHECK(off == total);

    auto t = forward_recursive(random_complex_weights(Architecture({5, 2, 2}), 90));
    CHECK(rank_test_membership(t.numerators, t.denominator, Architecture({5, 2, 2})).in_model);
    auto noisy = t.numerators;
    auto key = noisy[0].terms().begin()->first;
    HomPoly<cplx>::TermMap bump;
    bump.emplace(key, cplx(1e-2, 0.0));
    noisy[0] = noisy[0] + HomPoly<cplx>(5, 1, bump);
    CHECK_FALSE(rank_test_membership(noisy, t.denominator, Architecture({5, 2, 2})).in_model);
}

TEST_CASE("census enumeration") {
    CHECK(enumerate_architectures(30, 5).size() == 722);
    auto archs = enumerate_architectures(8, 2);
    bool has221 = false;
    for (const auto& a : archs) has221 = has221 || a.dims == std::vector<std::size_t>{2, 2, 1};
    CHECK(has221);
    for (std::size_t i = 1; i < archs.size(); ++i) {
        const auto& p = archs[i - 1].dims;
        const auto& q = archs[i].dims;
        CHECK((p.size() < q.size() || (p.size() == q.size() && p < q)));
    }
    auto all = enumerate_architectures(30, 5);
    for (const auto& r : kTable) {
        bool found = false;
        for (const auto& a : all) found = found || a.dims == r.d;
        CHECK(found);
    }
}

TEST_CASE("small census: content and worker independence") {
    CensusOptions o;
    o.max_params = 12;
    o.max_layers = 3;
    o.seed = 5;
    o.workers = 1;
    auto one = census(o);
    o.workers = 4;
    auto four = census(o);
    CHECK(census_csv(one, false) == census_csv(four, false));
    auto lines = split_lines(census_csv(one));
    REQUIRE(lines.size() == one.size() + 1);
    CHECK(lines[0] == "arch,jacobian_rank,ambient_dim,param_count,conjectured_dim,match,runtime_s,status");
    bool found = false;
    for (const auto& r : one)
        if (r.arch.dims == std::vector<std::size_t>{2, 2, 1}) {
            found = true;
            CHECK(r.jacobian_rank == 5);
        }
    CHECK(found);
}

TEST_CASE("census records timeouts without failing") {
    CensusOptions o;
    o.max_params = 30;
    o.max_layers = 5;
    o.timeout_s = 1e-9;
    o.workers = 2;
    std::size_t calls = 0;
    auto rows = census(o, [&](const DimensionReport&) { ++calls; });
    CHECK(rows.size() == 722);
    CHECK(calls == 722);
    std::size_t timeouts = 0;
    for (const auto& r : rows) timeouts += r.status == "timeout";
    CHECK(timeouts > 0);
}
