#pragma once

// Sparse homogeneous multivariate polynomials over a generic scalar field.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "scalar.hpp"

namespace ratnet {

using Exponents = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0u);
}

/// Graded lexicographic order, largest first: higher total degree wins, then
/// the larger exponent of x1, then of x2, and so on. Iterating a map with this
/// comparator yields the leading term first.
struct GrlexDescending {
    bool operator()(const Exponents& a, const Exponents& b) const {
        const auto da = total_degree(a), db = total_degree(b);
        if (da != db) return da > db;
        return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    }
};

/// All exponent vectors of the given degree in `nvars` variables, leading first.
std::vector<Exponents> monomials_of_degree(std::size_t nvars, std::uint32_t degree);

/// Number of monomials of degree d in n variables, C(n+d-1, d).
std::uint64_t monomial_count(std::size_t nvars, std::uint32_t degree);

struct NotDivisible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Relative threshold below which floating-point coefficients are dropped.
double cleanup_threshold();
void set_cleanup_threshold(double rel);

template <class T>
class HomPoly {
public:
    using TermMap = std::map<Exponents, T, GrlexDescending>;

    HomPoly() = default;
    HomPoly(std::size_t nvars, std::uint32_t degree) : nvars_(nvars), degree_(degree) {}
    HomPoly(std::size_t nvars, std::uint32_t degree, TermMap terms)
        : nvars_(nvars), degree_(degree), terms_(std::move(terms)) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->first.size() != nvars_ || total_degree(it->first) != degree_)
                throw ShapeError("HomPoly: term does not match nvars/degree");
            if (ScalarTraits<T>::is_zero(it->second))
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    static HomPoly constant(std::size_t nvars, T c) {
        TermMap t;
        t.emplace(Exponents(nvars, 0), c);
        return HomPoly(nvars, 0, std::move(t));
    }
    static HomPoly variable(std::size_t nvars, std::size_t i) {
        Exponents e(nvars, 0);
        e.at(i) = 1;
        TermMap t;
        t.emplace(std::move(e), T(1));
        return HomPoly(nvars, 1, std::move(t));
    }
    static HomPoly linear(std::span<const T> coeffs) {
        TermMap t;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            Exponents e(coeffs.size(), 0);
            e[i] = 1;
            t.emplace(std::move(e), coeffs[i]);
        }
        return HomPoly(coeffs.size(), 1, std::move(t));
    }

    std::size_t nvars() const { return nvars_; }
    std::uint32_t degree() const { return degree_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    T coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? T(0) : it->second;
    }

    /// Coefficients on the full monomial basis of the degree, leading first.
    std::vector<T> coefficient_vector() const {
        std::vector<T> out;
        for (const auto& e : monomials_of_degree(nvars_, degree_)) out.push_back(coeff(e));
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, ScalarTraits<T>::magnitude(c));
        return m;
    }

    template <class U, class F>
    HomPoly<U> map_coeffs(F&& f) const {
        typename HomPoly<U>::TermMap t;
        for (const auto& [e, c] : terms_) t.emplace(e, f(c));
        return HomPoly<U>(nvars_, degree_, std::move(t));
    }

    HomPoly scaled(const T& s) const {
        TermMap t;
        for (const auto& [e, c] : terms_) t.emplace(e, c * s);
        return HomPoly(nvars_, degree_, std::move(t));
    }

    friend HomPoly operator+(const HomPoly& a, const HomPoly& b) { return a.combine(b, false); }
    friend HomPoly operator-(const HomPoly& a, const HomPoly& b) { return a.combine(b, true); }
    friend HomPoly operator*(const HomPoly& a, const HomPoly& b) { return mul(a, b); }
    friend HomPoly operator*(const T& s, const HomPoly& a) { return a.scaled(s); }
    friend bool operator==(const HomPoly& a, const HomPoly& b) {
        return a.nvars_ == b.nvars_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
    }

    static HomPoly mul(const HomPoly& a, const HomPoly& b) {
        if (a.nvars_ != b.nvars_) throw ShapeError("mul: nvars mismatch");
        TermMap t;
        Exponents e(a.nvars_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                auto [it, inserted] = t.try_emplace(e, ca * cb);
                if (!inserted) it->second += ca * cb;
            }
        }
        HomPoly r(a.nvars_, a.degree_ + b.degree_);
        r.terms_ = std::move(t);
        r.cleanup();
        return r;
    }

    T evaluate(std::span<const T> x) const {
        if (x.size() != nvars_) throw ShapeError("evaluate: point has wrong length");
        std::vector<std::vector<T>> powers(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) {
            powers[i].push_back(T(1));
            for (std::uint32_t k = 1; k <= degree_; ++k) powers[i].push_back(powers[i].back() * x[i]);
        }
        T sum(0);
        for (const auto& [e, c] : terms_) {
            T term = c;
            for (std::size_t i = 0; i < nvars_; ++i)
                if (e[i]) term *= powers[i][e[i]];
            sum += term;
        }
        return sum;
    }

    /// Drops explicit zeros and, for floating-point fields, coefficients below
    /// cleanup_threshold() times the largest magnitude.
    void cleanup() {
        double cut = 0.0;
        if constexpr (!ScalarTraits<T>::exact) cut = cleanup_threshold() * max_abs();
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (ScalarTraits<T>::is_zero(it->second) || ScalarTraits<T>::magnitude(it->second) < cut)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

private:
    HomPoly combine(const HomPoly& b, bool subtract) const {
        if (nvars_ != b.nvars_) throw ShapeError("add: nvars mismatch");
        if (degree_ != b.degree_) {
            if (b.is_zero()) return *this;
            if (is_zero()) return subtract ? b.scaled(T(-1)) : b;
            throw ShapeError("add: degree mismatch");
        }
        HomPoly r = *this;
        for (const auto& [e, c] : b.terms_) {
            auto [it, inserted] = r.terms_.try_emplace(e, subtract ? -c : c);
            if (!inserted) it->second = subtract ? it->second - c : it->second + c;
        }
        r.cleanup();
        return r;
    }

    std::size_t nvars_ = 0;
    std::uint32_t degree_ = 0;
    TermMap terms_;
};

/// Linear form as a coefficient vector.
template <class T>
struct LinearForm {
    std::vector<T> coeffs;

    std::size_t nvars() const { return coeffs.size(); }
    HomPoly<T> poly() const { return HomPoly<T>::linear(coeffs); }
    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](const T& c) { return ScalarTraits<T>::is_zero(c); });
    }
};

template <class T>
HomPoly<T> mul(const HomPoly<T>& p, const HomPoly<T>& q) {
    return HomPoly<T>::mul(p, q);
}

template <class T>
HomPoly<T> power(const HomPoly<T>& p, std::uint32_t k) {
    HomPoly<T> r = HomPoly<T>::constant(p.nvars(), T(1));
    for (std::uint32_t i = 0; i < k; ++i) r = r * p;
    return r;
}

template <class T>
HomPoly<T> product(std::span<const HomPoly<T>> factors, std::size_t nvars) {
    HomPoly<T> r = HomPoly<T>::constant(nvars, T(1));
    for (const auto& f : factors) r = r * f;
    return r;
}

/// p(A·y): substitutes x_i -> sum_j A(i,j) y_j. A has p.nvars() rows; the
/// result lives in A.cols() variables and keeps the degree of p.
template <class T>
HomPoly<T> compose_linear(const HomPoly<T>& p, const Matrix<T>& A) {
    if (A.rows() != p.nvars()) throw ShapeError("compose_linear: matrix rows must equal nvars");
    const std::size_t n_out = A.cols();
    std::vector<std::vector<HomPoly<T>>> powers(p.nvars());
    for (std::size_t i = 0; i < p.nvars(); ++i) {
        HomPoly<T> lin = HomPoly<T>::linear(A.row(i));
        powers[i].push_back(HomPoly<T>::constant(n_out, T(1)));
        for (std::uint32_t k = 1; k <= p.degree(); ++k) powers[i].push_back(powers[i].back() * lin);
    }
    HomPoly<T> out(n_out, p.degree());
    for (const auto& [e, c] : p.terms()) {
        HomPoly<T> term = HomPoly<T>::constant(n_out, c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) term = term * powers[i][e[i]];
        out = out + term;
    }
    return out;
}

/// Exact division by a linear form. Throws NotDivisible when the remainder
/// exceeds tol relative to the largest coefficient of p (exact fields demand a
/// zero remainder).
template <class T>
HomPoly<T> exact_divide(const HomPoly<T>& p, const LinearForm<T>& l, double tol = 1e-10) {
    if (l.nvars() != p.nvars()) throw ShapeError("exact_divide: nvars mismatch");
    if (p.degree() < 1) throw ShapeError("exact_divide: dividend must have degree >= 1");
    if (l.is_zero()) throw std::domain_error("exact_divide: zero divisor");

    // Pivot on the largest coefficient of the divisor; reduce in lex order with
    // that variable most significant so every step removes the leading term.
    std::size_t k = 0;
    for (std::size_t i = 1; i < l.nvars(); ++i)
        if (ScalarTraits<T>::magnitude(l.coeffs[i]) > ScalarTraits<T>::magnitude(l.coeffs[k])) k = i;
    if (ScalarTraits<T>::exact) {
        k = 0;
        while (ScalarTraits<T>::is_zero(l.coeffs[k])) ++k;
    }
    auto pivot_order = [k](const Exponents& a, const Exponents& b) {
        if (a[k] != b[k]) return a[k] > b[k];
        return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    };
    std::map<Exponents, T, decltype(pivot_order)> rem(pivot_order);
    for (const auto& [e, c] : p.terms()) rem.emplace(e, c);

    const T inv_lead = T(1) / l.coeffs[k];
    typename HomPoly<T>::TermMap quot;
    std::map<Exponents, T, decltype(pivot_order)> remainder(pivot_order);
    while (!rem.empty()) {
        auto it = rem.begin();
        Exponents e = it->first;
        T c = it->second;
        rem.erase(it);
        if (ScalarTraits<T>::is_zero(c)) continue;
        if (e[k] == 0) {
            remainder.emplace(e, c);
            continue;
        }
        T qc = c * inv_lead;
        Exponents qe = e;
        qe[k] -= 1;
        quot.emplace(qe, qc);
        for (std::size_t j = 0; j < l.nvars(); ++j) {
            if (j == k || ScalarTraits<T>::is_zero(l.coeffs[j])) continue;
            Exponents te = qe;
            te[j] += 1;
            auto [jt, inserted] = rem.try_emplace(te, -(qc * l.coeffs[j]));
            if (!inserted) jt->second -= qc * l.coeffs[j];
        }
    }
    double rmax = 0.0;
    for (const auto& [e, c] : remainder) rmax = std::max(rmax, ScalarTraits<T>::magnitude(c));
    const bool ok = ScalarTraits<T>::exact ? remainder.empty() : rmax <= tol * p.max_abs();
    if (!ok) throw NotDivisible("exact_divide: remainder " + std::to_string(rmax) + " exceeds tolerance");
    HomPoly<T> q(p.nvars(), p.degree() - 1, std::move(quot));
    q.cleanup();
    return q;
}

template <class T>
bool divides(const LinearForm<T>& l, const HomPoly<T>& p, double tol = 1e-10) {
    try {
        exact_divide(p, l, tol);
        return true;
    } catch (const NotDivisible&) {
        return false;
    }
}

/// Contraction Sym(e_{j1} ⊗ ... ⊗ e_{jr}) ∘ y^{⊗r}. Every permutation in the
/// symmetrisation contributes the same monomial in the y's, so the contraction
/// is the product of the selected forms.
template <class T>
HomPoly<T> sym_contract(std::span<const std::size_t> indices, std::span<const LinearForm<T>> y) {
    if (y.empty()) throw ShapeError("sym_contract: no linear forms");
    const std::size_t nvars = y.front().nvars();
    HomPoly<T> r = HomPoly<T>::constant(nvars, T(1));
    for (std::size_t j : indices) {
        if (j >= y.size()) throw std::out_of_range("sym_contract: index out of range");
        r = r * y[j].poly();
    }
    return r;
}

}  // namespace ratnet
