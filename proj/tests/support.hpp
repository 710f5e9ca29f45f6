#pragma once

// Shared helpers for the unit tests: seeded generators and comparisons.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "hompoly.hpp"
#include "network.hpp"

namespace rt {

using ratnet::cplx;
using ratnet::Exponents;
using ratnet::Fp;
using ratnet::HomPoly;
using ratnet::Matrix;

inline std::mt19937_64& rng(std::uint64_t reseed = 0) {
    static std::mt19937_64 g(12345);
    if (reseed) g.seed(reseed);
    return g;
}

inline double unif(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}
inline cplx cunif() { return {unif(), unif()}; }

template <class T> T draw();
template <> inline double draw<double>() { return unif(); }
template <> inline cplx draw<cplx>() { return cunif(); }
template <> inline Fp draw<Fp>() {
    return Fp(std::uniform_int_distribution<std::uint64_t>(1, ratnet::kDefaultPrime - 1)(rng()), ratnet::kDefaultPrime);
}

template <class T>
HomPoly<T> random_poly(std::size_t nvars, std::uint32_t degree) {
    typename HomPoly<T>::TermMap t;
    for (const auto& e : ratnet::monomials_of_degree(nvars, degree)) t.emplace(e, draw<T>());
    return HomPoly<T>(nvars, degree, std::move(t));
}

template <class T>
Matrix<T> random_matrix(std::size_t r, std::size_t c) {
    Matrix<T> m(r, c);
    for (auto& v : m.data()) v = draw<T>();
    return m;
}

template <class T>
std::vector<T> random_vector(std::size_t n) {
    std::vector<T> v(n);
    for (auto& x : v) x = draw<T>();
    return v;
}

template <class T>
double mag(const T& v) { return ratnet::ScalarTraits<T>::magnitude(v); }

/// max |a_u - b_u| / max(1, max |a_u|); exact fields give 0 or 1.
template <class T>
double poly_diff(const HomPoly<T>& a, const HomPoly<T>& b) {
    if (a.nvars() != b.nvars()) return INFINITY;
    if (a.degree() != b.degree() && !a.is_zero() && !b.is_zero()) return INFINITY;
    double d = 0.0;
    Exponents probe;
    for (const auto& [e, c] : a.terms()) d = std::max(d, mag(T(c - b.coeff(e))));
    for (const auto& [e, c] : b.terms()) d = std::max(d, mag(T(a.coeff(e) - c)));
    return d / std::max(1.0, a.max_abs());
}

template <class T>
HomPoly<T> lin(std::initializer_list<T> c) {
    std::vector<T> v(c);
    return HomPoly<T>::linear(v);
}

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace rt
