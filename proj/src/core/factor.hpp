#pragma once

// Splitting homogeneous polynomials into products of linear forms.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hompoly.hpp"
#include "linalg.hpp"
#include "network.hpp"

namespace ratnet {

enum class FactorFailure { None, LeadingCoeffZeroUnfixable, RootFindFail, VerificationFail, SingularLinearSystem };

const char* to_string(FactorFailure f);

struct LinearFactorization {
    cplx constant{1.0, 0.0};
    std::vector<std::vector<cplx>> factors;  // coefficient vectors, first nonzero entry 1
    double residual = 0.0;                   // max |constant * prod - input| / max |input|
};

struct FactorReport {
    bool decomposable = false;
    std::optional<LinearFactorization> factorization;
    bool all_real = false;
    FactorFailure failure = FactorFailure::None;
    int changes_of_variables = 0;  // random rotations tried before success
};

struct FactorOptions {
    double root_tol = 1e-10;
    double reassembly_tol = 1e-8;
    double real_tol = 1e-7;
    double collision_tol = 1e-7;
    int max_retries = 5;
    std::uint64_t seed = 0;
};

/// Decides whether Q splits into linear forms and, if so, computes the split:
/// normalise a pure power x_s^m, read the second coordinates off the roots of
/// g(y) = sum_k (-1)^k C_{(m-k,k,0,...)} y^{m-k}, solve for the remaining
/// coordinates with elementary symmetric systems, verify by expansion.
/// Falls back to seeded random orthogonal changes of variables.
FactorReport factor_multilinear(const HomPoly<cplx>& Q, const FactorOptions& opt = {});

/// Binary form q(x, y) = c * y^e * prod (x - r_i y); always succeeds.
LinearFactorization factor_binary_form(const HomPoly<cplx>& q, double tol = 1e-10);

/// C11 x^2 + 2 C12 x y + C22 y^2 as a product of two linear forms.
std::pair<std::vector<cplx>, std::vector<cplx>> factor_quadratic_explicit(cplx C11, cplx C12, cplx C22);

/// constant * prod of factors as a polynomial in nvars variables.
HomPoly<cplx> expand_factorization(const LinearFactorization& f, std::size_t nvars);

/// Normalises v by its first entry above rel_tol * max |v|; returns the scale.
cplx normalize_leading(std::vector<cplx>& v, double rel_tol = 1e-10);

/// Checks divisibility of Q by a linear form.
bool divides(const std::vector<cplx>& l, const HomPoly<cplx>& Q, double tol = 1e-8);

/// H(x, z) = prod_j (sum_i b_ij z_i + l_j(x)) for a one-hidden-layer network,
/// in variables (x_1..x_n, z_1..z_k).
template <class T>
HomPoly<T> build_H(const Weights<T>& w) {
    w.validate();
    if (w.arch.L() != 2) throw ShapeError("build_H: needs a one-hidden-layer architecture");
    const std::size_t n = w.arch.dims[0], m = w.arch.dims[1], k = w.arch.dims[2];
    HomPoly<T> H = HomPoly<T>::constant(n + k, T(1));
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<T> c(n + k, T(0));
        for (std::size_t i = 0; i < n; ++i) c[i] = w.mats[0](j, i);
        for (std::size_t i = 0; i < k; ++i) c[n + i] = w.mats[1](i, j);
        H = H * HomPoly<T>::linear(c);
    }
    return H;
}

/// Part of H whose z-exponents equal z_exp, as a polynomial in the first n variables.
template <class T>
HomPoly<T> z_slice(const HomPoly<T>& H, std::size_t n, const Exponents& z_exp) {
    if (n + z_exp.size() != H.nvars()) throw ShapeError("z_slice: variable split does not match");
    const std::uint32_t zd = total_degree(z_exp);
    if (zd > H.degree()) return HomPoly<T>(n, 0);
    typename HomPoly<T>::TermMap t;
    for (const auto& [e, c] : H.terms()) {
        if (!std::equal(z_exp.begin(), z_exp.end(), e.begin() + static_cast<std::ptrdiff_t>(n))) continue;
        t.emplace(Exponents(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n)), c);
    }
    return HomPoly<T>(n, H.degree() - zd, std::move(t));
}

/// Resultant of two binary forms, each scaled to unit max-norm first.
cplx resultant_binary(const HomPoly<cplx>& f, const HomPoly<cplx>& g);

/// Numerical screen for a common factor of all polynomials in the tuple:
/// restrict to a random line and look for a shared root.
bool common_factor_suspected(const RationalTuple<cplx>& t, std::uint64_t seed, double tol = 1e-7);

}  // namespace ratnet
