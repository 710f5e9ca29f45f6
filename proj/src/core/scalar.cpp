#include "scalar.hpp"

namespace ratnet {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<u128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::uint64_t Fp::common_modulus(const Fp& a, const Fp& b) {
    if (a.p_ && b.p_ && a.p_ != b.p_) {
        throw FieldMismatch("GF(p) operands with moduli " + std::to_string(a.p_) + " and " +
                            std::to_string(b.p_));
    }
    return a.p_ ? a.p_ : b.p_;
}

Fp operator+(Fp a, Fp b) {
    std::uint64_t p = Fp::common_modulus(a, b);
    if (p == 0) return Fp(static_cast<int>(a.lit_ + b.lit_));
    std::uint64_t x = a.reduced(p).val_, y = b.reduced(p).val_;
    std::uint64_t s = x + y;
    if (s >= p || s < x) s -= p;
    return Fp(s, p);
}

Fp operator-(Fp a, Fp b) {
    std::uint64_t p = Fp::common_modulus(a, b);
    if (p == 0) return Fp(static_cast<int>(a.lit_ - b.lit_));
    std::uint64_t x = a.reduced(p).val_, y = b.reduced(p).val_;
    return Fp(x >= y ? x - y : p - (y - x), p);
}

Fp operator*(Fp a, Fp b) {
    std::uint64_t p = Fp::common_modulus(a, b);
    if (p == 0) return Fp(static_cast<int>(a.lit_ * b.lit_));
    return Fp(mulmod(a.reduced(p).val_, b.reduced(p).val_, p), p);
}

bool operator==(Fp a, Fp b) {
    std::uint64_t p = Fp::common_modulus(a, b);
    if (p == 0) return a.lit_ == b.lit_;
    return a.reduced(p).val_ == b.reduced(p).val_;
}

Fp Fp::pow(std::uint64_t e) const {
    if (p_ == 0) throw std::logic_error("Fp::pow on an unreduced literal");
    return Fp(powmod(val_, e, p_), p_);
}

Fp Fp::inverse() const {
    if (p_ == 0) {
        if (lit_ == 1 || lit_ == -1) return *this;
        throw std::logic_error("Fp: cannot invert a literal without a modulus");
    }
    if (val_ == 0) throw std::domain_error("Fp: division by zero");
    return pow(p_ - 2);
}

}  // namespace ratnet
