#pragma once

// Architectures, weights and the closed-form parameter map of a rational
// network with activation 1/x.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hompoly.hpp"
#include "matrix.hpp"
#include "scalar.hpp"

namespace ratnet {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct Architecture {
    std::vector<std::size_t> dims;
    /// Permits widths of 1 (e.g. (1,m,k)); only for diagnostics.
    bool diagnostic = false;

    Architecture() = default;
    explicit Architecture(std::vector<std::size_t> d, bool diag = false);

    /// Parses "3,3,3,3".
    static Architecture parse(const std::string& text, bool diag = false);

    std::size_t L() const { return dims.size() - 1; }
    std::size_t input_dim() const { return dims.front(); }
    std::size_t output_dim() const { return dims.back(); }
    bool is_binary() const;
    bool is_shallow() const { return L() == 2; }
    std::string to_string() const;

    friend bool operator==(const Architecture& a, const Architecture& b) { return a.dims == b.dims; }
};

struct DegreeProfile {
    std::uint32_t n = 0;      // numerator degree
    std::uint32_t m = 0;      // denominator degree
    std::uint32_t delta = 0;  // parity of L
};

inline std::uint32_t parity(std::size_t L) { return static_cast<std::uint32_t>(L % 2); }

/// Degree of p^(k), k >= 1.
std::uint64_t degree_p(const Architecture& a, std::size_t k);
/// Degree of q^(k), k >= 0.
std::uint64_t degree_q(const Architecture& a, std::size_t k);

DegreeProfile degrees(const Architecture& a);
std::uint64_t param_count(const Architecture& a);
std::uint64_t ambient_dim(const Architecture& a);
/// Sum of the hidden widths d_1..d_{L-1}.
std::uint64_t hidden_width_sum(const Architecture& a);

/// 64-bit mixing of a base seed with a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

template <class T>
struct Weights {
    Architecture arch;
    std::vector<Matrix<T>> mats;  // mats[k] is d_{k+1} x d_k
    std::uint64_t prime = 0;      // only for GF(p)

    void validate() const {
        if (mats.size() != arch.L()) throw ShapeError("weights: expected " + std::to_string(arch.L()) + " matrices");
        for (std::size_t k = 0; k < mats.size(); ++k) {
            if (mats[k].rows() != arch.dims[k + 1] || mats[k].cols() != arch.dims[k])
                throw ShapeError("weights: layer " + std::to_string(k + 1) + " has shape " +
                                 std::to_string(mats[k].rows()) + "x" + std::to_string(mats[k].cols()) +
                                 ", expected " + std::to_string(arch.dims[k + 1]) + "x" +
                                 std::to_string(arch.dims[k]));
        }
    }
};

template <class T>
struct RationalTuple {
    std::vector<HomPoly<T>> numerators;
    HomPoly<T> denominator;

    std::size_t nvars() const { return denominator.nvars(); }
};

/// Uniform [-1,1] reals, complex with both parts in [-1,1], or GF(p) \ {0}.
Weights<double> random_real_weights(const Architecture& a, std::uint64_t seed);
Weights<cplx> random_complex_weights(const Architecture& a, std::uint64_t seed);
Weights<Fp> random_gfp_weights(const Architecture& a, std::uint64_t seed, std::uint64_t p = kDefaultPrime);

namespace detail {

template <class T>
T half_of(const T& v) {
    if constexpr (std::is_same_v<T, Fp>) {
        if (v.is_literal()) {
            if (v.literal() % 2 != 0) throw std::logic_error("half_of: odd literal without modulus");
            return Fp(static_cast<int>(v.literal() / 2));
        }
        const std::uint64_t p = v.modulus();
        return v * Fp((p + 1) / 2, p);
    } else if constexpr (is_dual<T>::value) {
        return T(half_of(v.re), half_of(v.eps));
    } else {
        return v * 0.5;
    }
}

/// Products over all entries but one, via prefix/suffix products.
template <class T>
std::vector<HomPoly<T>> leave_one_out(const std::vector<HomPoly<T>>& f, std::size_t nvars) {
    const std::size_t d = f.size();
    std::vector<HomPoly<T>> prefix(d + 1), suffix(d + 1);
    prefix[0] = HomPoly<T>::constant(nvars, T(1));
    for (std::size_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i] * f[i];
    suffix[d] = HomPoly<T>::constant(nvars, T(1));
    for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] * f[i];
    std::vector<HomPoly<T>> out;
    out.reserve(d);
    for (std::size_t j = 0; j < d; ++j) out.push_back(prefix[j] * suffix[j + 1]);
    return out;
}

/// Assemble P_i = p^(L)_i q^(L-1) q^(L-3) ... and Q = q^(L) q^(L-2) ...
template <class T>
RationalTuple<T> assemble(const std::vector<HomPoly<T>>& pL, const std::vector<HomPoly<T>>& q, std::size_t L,
                          std::size_t nvars) {
    HomPoly<T> num_factor = HomPoly<T>::constant(nvars, T(1));
    for (std::size_t k = L; k-- > 0;) {
        if ((L - 1 - k) % 2 == 0) num_factor = num_factor * q[k];
    }
    HomPoly<T> den = HomPoly<T>::constant(nvars, T(1));
    for (std::size_t k = L + 1; k-- > 0;) {
        if ((L - k) % 2 == 0) den = den * q[k];
    }
    RationalTuple<T> out;
    for (const auto& p : pL) out.numerators.push_back(p * num_factor);
    out.denominator = std::move(den);
    return out;
}

}  // namespace detail

/// Closed form via the layer recursion
///   p^(1) = W1 x, q^(0) = q^(1) = 1,
///   p^(k+1)_i = sum_j w_{k+1,i,j} prod_{s != j} p^(k)_s,  q^(k+1) = prod_j p^(k)_j.
/// No common factors are cancelled.
template <class T>
RationalTuple<T> forward_recursive(const Weights<T>& w) {
    w.validate();
    const Architecture& a = w.arch;
    const std::size_t n0 = a.input_dim(), L = a.L();
    std::vector<HomPoly<T>> q(L + 1);
    q[0] = HomPoly<T>::constant(n0, T(1));
    q[1] = HomPoly<T>::constant(n0, T(1));
    std::vector<HomPoly<T>> p;
    for (std::size_t i = 0; i < a.dims[1]; ++i) p.push_back(HomPoly<T>::linear(w.mats[0].row(i)));
    for (std::size_t k = 1; k < L; ++k) {
        std::vector<HomPoly<T>> loo = detail::leave_one_out(p, n0);
        q[k + 1] = loo[0] * p[0];
        const Matrix<T>& W = w.mats[k];
        std::vector<HomPoly<T>> next;
        for (std::size_t i = 0; i < W.rows(); ++i) {
            HomPoly<T> acc(n0, loo[0].degree());
            for (std::size_t j = 0; j < W.cols(); ++j) {
                if (ScalarTraits<T>::is_zero(W(i, j))) continue;
                acc = acc + loo[j].scaled(W(i, j));
            }
            next.push_back(std::move(acc));
        }
        p = std::move(next);
    }
    return detail::assemble(p, q, L, n0);
}

/// Closed form for binary architectures (2,2,...,2,dL): with M_1 = W_1 and
/// M_k = W_k P12 M_{k-1}, the quadratic forms are q_{k+1} = 1/2 x^T M_k^T P12 M_k x
/// and the output numerators are the rows of W_L P12 M_{L-1} x.
template <class T>
RationalTuple<T> forward_binary(const Weights<T>& w) {
    w.validate();
    const Architecture& a = w.arch;
    if (!a.is_binary()) throw ShapeError("forward_binary: architecture " + a.to_string() + " is not binary");
    const std::size_t L = a.L();
    const Matrix<T> P12{{T(0), T(1)}, {T(1), T(0)}};
    std::vector<HomPoly<T>> q(L + 1);
    q[0] = HomPoly<T>::constant(2, T(1));
    q[1] = HomPoly<T>::constant(2, T(1));
    Matrix<T> M = w.mats[0];
    for (std::size_t k = 1; k < L; ++k) {
        Matrix<T> S = M.transpose() * P12 * M;  // symmetric
        typename HomPoly<T>::TermMap terms;
        terms.emplace(Exponents{2, 0}, detail::half_of(S(0, 0)));
        terms.emplace(Exponents{1, 1}, S(0, 1));
        terms.emplace(Exponents{0, 2}, detail::half_of(S(1, 1)));
        q[k + 1] = HomPoly<T>(2, 2, std::move(terms));
        M = w.mats[k] * P12 * M;
    }
    std::vector<HomPoly<T>> pL;
    for (std::size_t i = 0; i < M.rows(); ++i) pL.push_back(HomPoly<T>::linear(M.row(i)));
    return detail::assemble(pL, q, L, 2);
}

/// Numeric composition W_L o sigma o ... o sigma o W_1 at x. Throws DomainError
/// when a pre-activation is within 1e-12 of zero.
template <class T>
std::vector<T> eval_network(const Weights<T>& w, std::span<const T> x, double pole_tol = 1e-12) {
    w.validate();
    if (x.size() != w.arch.input_dim()) throw ShapeError("eval_network: input has wrong length");
    std::vector<T> h(x.begin(), x.end());
    for (std::size_t k = 0; k < w.mats.size(); ++k) {
        h = w.mats[k].apply(h);
        if (k + 1 == w.mats.size()) break;
        for (T& v : h) {
            using std::abs;
            if (abs(v) < pole_tol) throw DomainError("eval_network: pole hit at layer " + std::to_string(k + 1));
            v = T(1) / v;
        }
    }
    return h;
}

/// Evaluates P_i(x)/Q(x).
template <class T>
std::vector<T> eval_tuple(const RationalTuple<T>& t, std::span<const T> x) {
    const T qv = t.denominator.evaluate(x);
    std::vector<T> out;
    for (const auto& p : t.numerators) out.push_back(p.evaluate(x) / qv);
    return out;
}

/// Fiber transformations: hidden layer i (1-based, i < L) gets a permutation
/// perms[i-1] and a diagonal diags[i-1]. With (P x)_r = x_{perm[r]}:
/// W_1 <- P_1 D_1 W_1, W_k <- P_k D_k W_k D_{k-1} P_{k-1}^T, W_L <- W_L D_{L-1} P_{L-1}^T.
template <class T>
Weights<T> apply_symmetry(const Weights<T>& w, const std::vector<std::vector<std::size_t>>& perms,
                          const std::vector<std::vector<T>>& diags) {
    w.validate();
    const std::size_t L = w.arch.L();
    if (perms.size() != L - 1 || diags.size() != L - 1)
        throw ShapeError("apply_symmetry: need one permutation and one diagonal per hidden layer");
    std::vector<Matrix<T>> PD(L - 1), DPt(L - 1);
    for (std::size_t i = 0; i + 1 < L; ++i) {
        const std::size_t d = w.arch.dims[i + 1];
        if (perms[i].size() != d || diags[i].size() != d) throw ShapeError("apply_symmetry: size mismatch");
        std::vector<bool> seen(d, false);
        for (std::size_t r : perms[i]) {
            if (r >= d || seen[r]) throw std::invalid_argument("apply_symmetry: not a permutation");
            seen[r] = true;
        }
        Matrix<T> P(d, d), D(d, d);
        for (std::size_t r = 0; r < d; ++r) {
            if (ScalarTraits<T>::is_zero(diags[i][r])) throw std::invalid_argument("apply_symmetry: zero diagonal entry");
            P(r, perms[i][r]) = T(1);
            D(r, r) = diags[i][r];
        }
        PD[i] = P * D;
        DPt[i] = D * P.transpose();
    }
    Weights<T> out = w;
    for (std::size_t k = 0; k < L; ++k) {
        Matrix<T> m = w.mats[k];
        if (k > 0) m = m * DPt[k - 1];
        if (k + 1 < L) m = PD[k] * m;
        out.mats[k] = std::move(m);
    }
    return out;
}

/// Coefficients of every polynomial in the tuple on the fixed monomial basis,
/// numerators first then the denominator.
template <class T>
std::vector<T> tuple_coefficients(const RationalTuple<T>& t) {
    std::vector<T> out;
    for (const auto& p : t.numerators) {
        auto v = p.coefficient_vector();
        out.insert(out.end(), v.begin(), v.end());
    }
    auto v = t.denominator.coefficient_vector();
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

}  // namespace ratnet
