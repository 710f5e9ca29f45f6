#pragma once

// Dimension of the neurovariety by Jacobian rank over GF(p), filling
// predicates, moment matrices for one hidden layer and the architecture census.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "network.hpp"

namespace ratnet {

struct DimensionReport {
    Architecture arch;
    std::uint64_t jacobian_rank = 0;
    std::uint64_t ambient_dim = 0;
    std::uint64_t param_count = 0;
    std::uint64_t conjectured_dim = 0;      // min(N - sum d_i + 1, M)
    std::uint64_t conjectured_dim_max = 0;  // same expression with max
    std::uint64_t prime = kDefaultPrime;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
    int samples = 0;
    std::string status = "ok";  // ok | timeout | error: ...
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct Timeout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Jacobian of the coefficient map at one GF(p) point, one dual-number
/// forward pass per weight; rows are weights, columns the ambient coordinates.
std::vector<std::vector<std::uint64_t>> jacobian_mod_p(const Weights<Fp>& w, const Deadline& deadline = std::nullopt);

/// Rank of the Jacobian at seeded random points. Two samples; if they differ a
/// third is drawn and the largest rank is kept (rank can only drop at special points).
DimensionReport jacobian_rank_mod_p(const Architecture& arch, std::uint64_t seed, std::uint64_t p = kDefaultPrime,
                                    const Deadline& deadline = std::nullopt);

/// Jacobian rank over the reals at a random point (dual numbers over double).
std::size_t jacobian_rank_float(const Architecture& arch, std::uint64_t seed, double rel_tol = 1e-8);

std::uint64_t expected_dim(const Architecture& arch);
std::uint64_t expected_dim_max(const Architecture& arch);

struct ShallowFilling {
    bool params_feasible = false;
    bool variety_filling = false;
    bool manifold_filling = false;
};
ShallowFilling filling_shallow(std::size_t n, std::size_t m, std::size_t k);

struct BinaryFilling {
    bool params_feasible = false;
    bool variety_filling = false;
};
BinaryFilling filling_binary(std::size_t L, std::size_t dL);

/// Coefficient matrix for a one-hidden-layer tuple (d0, d1, d2). Rows are the
/// multisets S of size d1-1 (exponent vectors, leading first). Columns: one per
/// numerator with entries mult(S)! * C_S(P_k), then one per variable j with
/// entries mult(S+e_j)! * C_{S+e_j}(Q), where mult(.)! is the product of the
/// factorials of the multiplicities.
struct MomentMatrix {
    std::vector<Exponents> rows;
    std::vector<std::string> cols;
    Matrix<cplx> entries;
};

MomentMatrix build_moment_matrix(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q,
                                 const Architecture& arch);

/// Product of factorials of the entries.
double multiplicity_factor(const Exponents& e);

struct RankTest {
    bool in_model = false;
    bool necessary_only = false;
    std::size_t rank = 0;
    std::vector<double> singular_values;
};

/// Numerical rank of the moment matrix against d1.
RankTest rank_test_membership(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q, const Architecture& arch,
                              double tol = 1e-10);

/// Architectures with 2 <= L <= max_layers, d_0..d_{L-1} >= 2, d_L >= 1,
/// every width <= max_width and at most max_params weights, ordered by (L, d0, ..., dL).
std::vector<Architecture> enumerate_architectures(std::uint64_t max_params, std::size_t max_layers,
                                                  std::size_t max_width = 9);

struct CensusOptions {
    std::uint64_t max_params = 30;
    std::size_t max_layers = 5;
    std::size_t max_width = 9;
    std::uint64_t prime = kDefaultPrime;
    std::uint64_t seed = 0;
    double timeout_s = 10.0;
    unsigned workers = 1;
};

std::vector<DimensionReport> census(const CensusOptions& opt,
                                    const std::function<void(const DimensionReport&)>& progress = {});

std::string census_csv(const std::vector<DimensionReport>& rows, bool include_runtime = true);

}  // namespace ratnet
