#pragma once

// Scalar fields used throughout the library: double, std::complex<double>,
// the prime field GF(p) and dual numbers over any of them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace ratnet {

using cplx = std::complex<double>;

inline constexpr std::uint64_t kDefaultPrime = 2147483647ULL;

struct FieldMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_prime(std::uint64_t n);

/// Element of GF(p). The modulus travels with the value so that prime-field
/// polynomials stay self-describing. A modulus of zero marks an integer
/// literal (e.g. `Fp(1)`) that has not met a field element yet; it is reduced
/// as soon as it is combined with one.
class Fp {
public:
    constexpr Fp() = default;
    constexpr Fp(int literal) : lit_(literal) {}
    Fp(std::uint64_t value, std::uint64_t p) : val_(p ? value % p : 0), p_(p) {
        if (p == 0) throw std::invalid_argument("Fp: modulus must be nonzero");
    }
    static Fp from_signed(std::int64_t v, std::uint64_t p) {
        std::int64_t r = v % static_cast<std::int64_t>(p);
        if (r < 0) r += static_cast<std::int64_t>(p);
        return Fp(static_cast<std::uint64_t>(r), p);
    }

    std::uint64_t modulus() const { return p_; }
    bool is_literal() const { return p_ == 0; }
    std::int64_t literal() const { return lit_; }

    /// Canonical representative in [0, p).
    std::uint64_t value() const {
        if (p_ == 0) throw std::logic_error("Fp: literal has no modulus");
        return val_;
    }
    bool is_zero() const { return p_ == 0 ? lit_ == 0 : val_ == 0; }
    /// Representative in [0, p), reducing a literal if necessary.
    std::uint64_t value_in(std::uint64_t p) const { return p_ ? val_ : reduced(p).val_; }

    Fp inverse() const;
    Fp pow(std::uint64_t e) const;

    friend Fp operator+(Fp a, Fp b);
    friend Fp operator-(Fp a, Fp b);
    friend Fp operator*(Fp a, Fp b);
    friend Fp operator/(Fp a, Fp b) { return a * b.inverse(); }
    friend Fp operator-(Fp a) { return Fp(0) - a; }
    Fp& operator+=(Fp b) { return *this = *this + b; }
    Fp& operator-=(Fp b) { return *this = *this - b; }
    Fp& operator*=(Fp b) { return *this = *this * b; }
    Fp& operator/=(Fp b) { return *this = *this / b; }
    friend bool operator==(Fp a, Fp b);
    friend bool operator!=(Fp a, Fp b) { return !(a == b); }

private:
    static std::uint64_t common_modulus(const Fp& a, const Fp& b);
    Fp reduced(std::uint64_t p) const { return p_ ? *this : from_signed(lit_, p); }

    std::uint64_t val_ = 0;
    std::int64_t lit_ = 0;
    std::uint64_t p_ = 0;
};

/// Forward-mode dual number a + b·ε with ε² = 0.
template <class T>
struct Dual {
    T re{};
    T eps{};

    constexpr Dual() = default;
    constexpr Dual(int literal) : re(literal), eps(0) {}
    constexpr Dual(T r) : re(r), eps(0) {}
    constexpr Dual(T r, T e) : re(r), eps(e) {}

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.re + b.re, a.eps + b.eps}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.re - b.re, a.eps - b.eps}; }
    friend Dual operator-(const Dual& a) { return {-a.re, -a.eps}; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.re * b.re, a.re * b.eps + a.eps * b.re};
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        T inv = T(1) / b.re;
        return {a.re * inv, (a.eps * b.re - a.re * b.eps) * inv * inv};
    }
    Dual& operator+=(const Dual& b) { return *this = *this + b; }
    Dual& operator-=(const Dual& b) { return *this = *this - b; }
    Dual& operator*=(const Dual& b) { return *this = *this * b; }
    Dual& operator/=(const Dual& b) { return *this = *this / b; }
    friend bool operator==(const Dual& a, const Dual& b) { return a.re == b.re && a.eps == b.eps; }
    friend bool operator!=(const Dual& a, const Dual& b) { return !(a == b); }
};

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

/// Per-field behaviour needed by the polynomial layer.
template <class T> struct ScalarTraits;

template <> struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "real";
    static bool is_zero(double v) { return v == 0.0; }
    static double magnitude(double v) { return std::abs(v); }
};

template <> struct ScalarTraits<cplx> {
    static constexpr bool exact = false;
    static constexpr const char* name = "complex";
    static bool is_zero(const cplx& v) { return v == cplx(0.0, 0.0); }
    static double magnitude(const cplx& v) { return std::abs(v); }
};

template <> struct ScalarTraits<Fp> {
    static constexpr bool exact = true;
    static constexpr const char* name = "gfp";
    static bool is_zero(const Fp& v) { return v.is_zero(); }
    static double magnitude(const Fp& v) { return v.is_zero() ? 0.0 : 1.0; }
};

// Dual numbers only drop exact zeros: a relative threshold on the value part
// would discard derivative information.
template <class T> struct ScalarTraits<Dual<T>> {
    static constexpr bool exact = true;
    static constexpr const char* name = "dual";
    static bool is_zero(const Dual<T>& v) {
        return ScalarTraits<T>::is_zero(v.re) && ScalarTraits<T>::is_zero(v.eps);
    }
    static double magnitude(const Dual<T>& v) {
        return std::max(ScalarTraits<T>::magnitude(v.re), ScalarTraits<T>::magnitude(v.eps));
    }
};

}  // namespace ratnet
