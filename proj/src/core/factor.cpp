#include "factor.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ratnet {

const char* to_string(FactorFailure f) {
    switch (f) {
        case FactorFailure::None: return "None";
        case FactorFailure::LeadingCoeffZeroUnfixable: return "LeadingCoeffZeroUnfixable";
        case FactorFailure::RootFindFail: return "RootFindFail";
        case FactorFailure::VerificationFail: return "VerificationFail";
        case FactorFailure::SingularLinearSystem: return "SingularLinearSystem";
    }
    return "Unknown";
}

namespace {

/// Coefficients of prod_s (1 + r_s t), i.e. e_0..e_k of the r_s.
std::vector<cplx> elementary_symmetric(const std::vector<cplx>& r) {
    std::vector<cplx> e{1.0};
    for (const cplx& v : r) {
        e.push_back(0.0);
        for (std::size_t j = e.size() - 1; j > 0; --j) e[j] += v * e[j - 1];
    }
    return e;
}

Exponents unit_power(std::size_t n, std::size_t i, std::uint32_t k) {
    Exponents e(n, 0);
    e[i] = k;
    return e;
}

double relative_residual(const HomPoly<cplx>& Q, const HomPoly<cplx>& R) {
    const double scale = Q.max_abs();
    double worst = 0.0;
    for (const auto& [e, c] : Q.terms()) worst = std::max(worst, std::abs(c - R.coeff(e)));
    for (const auto& [e, c] : R.terms())
        if (Q.terms().find(e) == Q.terms().end()) worst = std::max(worst, std::abs(c));
    return scale > 0 ? worst / scale : worst;
}

/// Normalises factors, fits the constant by least squares and measures the
/// residual against Q.
LinearFactorization finish(const HomPoly<cplx>& Q, std::vector<std::vector<cplx>> factors) {
    LinearFactorization f;
    for (auto& v : factors) normalize_leading(v);
    f.factors = std::move(factors);
    f.constant = 1.0;
    const HomPoly<cplx> E = expand_factorization(f, Q.nvars());
    cplx num = 0.0;
    double den = 0.0;
    for (const auto& [e, c] : E.terms()) {
        num += std::conj(c) * Q.coeff(e);
        den += std::norm(c);
    }
    f.constant = den > 0 ? num / den : cplx(0.0);
    f.residual = relative_residual(Q, E.scaled(f.constant));
    return f;
}

struct Attempt {
    std::optional<LinearFactorization> result;
    FactorFailure failure = FactorFailure::None;
};

Attempt attempt_direct(const HomPoly<cplx>& Q, const FactorOptions& opt, double cluster_tol) {
    const std::size_t n = Q.nvars();
    const std::uint32_t m = Q.degree();
    const double qmax = Q.max_abs();
    Attempt out;

    std::size_t s = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(Q.coeff(unit_power(n, i, m))) > 1e-12 * qmax) {
            s = i;
            break;
        }
    }
    if (s == n) {
        out.failure = FactorFailure::LeadingCoeffZeroUnfixable;
        return out;
    }
    // Coefficient lookup with x_s moved to the first position.
    auto coef = [&](Exponents e) {
        std::swap(e[0], e[s]);
        return Q.coeff(e);
    };
    const cplx c = coef(unit_power(n, 0, m));

    std::vector<std::vector<cplx>> factors(m, std::vector<cplx>(n, 0.0));
    for (auto& f : factors) f[0] = 1.0;

    if (n >= 2) {
        std::vector<cplx> g(m + 1);
        for (std::uint32_t k = 0; k <= m; ++k) {
            Exponents e(n, 0);
            e[0] = m - k;
            e[1] = k;
            g[k] = (k % 2 ? -1.0 : 1.0) * coef(e) / c;
        }
        std::vector<cplx> r;
        try {
            r = roots_univariate(g, opt.root_tol);
        } catch (const NonConvergence&) {
            out.failure = FactorFailure::RootFindFail;
            return out;
        }

        // Group colliding roots and replace each group by its mean.
        std::vector<std::size_t> group(m);
        std::iota(group.begin(), group.end(), 0);
        std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
            return group[i] == i ? i : group[i] = find(group[i]);
        };
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (std::abs(r[i] - r[j]) <= cluster_tol * std::max(1.0, std::abs(r[i])))
                    group[find(j)] = find(i);
        std::vector<std::size_t> reps;
        std::vector<std::vector<std::size_t>> members;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t g0 = find(i);
            auto it = std::find(reps.begin(), reps.end(), g0);
            if (it == reps.end()) {
                reps.push_back(g0);
                members.push_back({i});
            } else {
                members[static_cast<std::size_t>(it - reps.begin())].push_back(i);
            }
        }
        for (const auto& mem : members) {
            cplx mean = 0.0;
            for (std::size_t i : mem) mean += r[i];
            mean /= static_cast<double>(mem.size());
            for (std::size_t i : mem) r[i] = mean;
        }
        for (std::size_t i = 0; i < m; ++i) factors[i][1] = r[i];

        // Column for group g: e_j of the roots with one member of g removed.
        Matrix<cplx> A(m, members.size());
        for (std::size_t g0 = 0; g0 < members.size(); ++g0) {
            std::vector<cplx> rest;
            for (std::size_t i = 0; i < m; ++i)
                if (i != members[g0].front()) rest.push_back(r[i]);
            const auto e = elementary_symmetric(rest);
            for (std::size_t j = 0; j < m; ++j) A(j, g0) = e[j];
        }
        for (std::size_t l = 2; l < n; ++l) {
            std::vector<cplx> rhs(m);
            for (std::size_t j = 0; j < m; ++j) {
                Exponents e(n, 0);
                e[0] = m - 1 - static_cast<std::uint32_t>(j);
                e[1] = static_cast<std::uint32_t>(j);
                e[l] += 1;
                rhs[j] = coef(e) / c;
            }
            const LeastSquares ls = least_squares(A, rhs);
            for (std::size_t g0 = 0; g0 < members.size(); ++g0)
                for (std::size_t i : members[g0])
                    factors[i][l] = ls.x[g0] / static_cast<double>(members[g0].size());
        }
        if (members.size() < m) out.failure = FactorFailure::SingularLinearSystem;
    }
    for (auto& f : factors) std::swap(f[0], f[s]);

    LinearFactorization lf = finish(Q, std::move(factors));
    if (lf.residual <= opt.reassembly_tol) {
        out.result = std::move(lf);
        out.failure = FactorFailure::None;
    } else if (out.failure == FactorFailure::None) {
        out.failure = FactorFailure::VerificationFail;
    }
    return out;
}

Attempt attempt_with_merging(const HomPoly<cplx>& Q, const FactorOptions& opt) {
    Attempt a = attempt_direct(Q, opt, opt.collision_tol);
    if (a.result || a.failure == FactorFailure::LeadingCoeffZeroUnfixable) return a;
    // Repeated factors make the roots of g cluster at the scale eps^(1/k);
    // merging such clusters recovers the exact multiplicity.
    Attempt b = attempt_direct(Q, opt, 1e-4);
    if (b.result) return b;
    return a;
}

bool factors_real(const LinearFactorization& f, double tol) {
    for (const auto& v : f.factors)
        for (const cplx& c : v)
            if (std::abs(c.imag()) > tol) return false;
    return true;
}

}  // namespace

cplx normalize_leading(std::vector<cplx>& v, double rel_tol) {
    double mx = 0.0;
    for (const cplx& c : v) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return 0.0;
    for (const cplx& c : v) {
        if (std::abs(c) > rel_tol * mx) {
            const cplx lead = c;
            for (cplx& x : v) x /= lead;
            return lead;
        }
    }
    return 1.0;
}

HomPoly<cplx> expand_factorization(const LinearFactorization& f, std::size_t nvars) {
    HomPoly<cplx> r = HomPoly<cplx>::constant(nvars, f.constant);
    for (const auto& v : f.factors) r = r * HomPoly<cplx>::linear(v);
    return r;
}

FactorReport factor_multilinear(const HomPoly<cplx>& Q, const FactorOptions& opt) {
    if (Q.degree() < 1) throw std::invalid_argument("factor_multilinear: degree must be at least 1");
    if (Q.is_zero()) throw std::invalid_argument("factor_multilinear: zero polynomial");
    FactorReport rep;
    const std::size_t n = Q.nvars();

    Attempt a = attempt_with_merging(Q, opt);
    FactorFailure last = a.failure;
    bool any_pure_power = a.failure != FactorFailure::LeadingCoeffZeroUnfixable;
    for (int t = 0; !a.result && t < opt.max_retries && n >= 2; ++t) {
        const Matrix<cplx> R = random_orthogonal(n, derive_seed(opt.seed, static_cast<std::uint64_t>(t)))
                                   .map<cplx>([](double v) { return cplx(v, 0.0); });
        const HomPoly<cplx> Qr = compose_linear(Q, R);
        Attempt b = attempt_with_merging(Qr, opt);
        ++rep.changes_of_variables;
        if (b.failure != FactorFailure::LeadingCoeffZeroUnfixable) any_pure_power = true;
        if (!b.result) {
            if (b.failure != FactorFailure::LeadingCoeffZeroUnfixable) last = b.failure;
            continue;
        }
        // Q(x) = Qr(R^T x), so a factor l' of Qr maps to R l'.
        std::vector<std::vector<cplx>> mapped;
        for (const auto& lp : b.result->factors) mapped.push_back(R.apply(lp));
        LinearFactorization lf = finish(Q, std::move(mapped));
        if (lf.residual <= opt.reassembly_tol) {
            a.result = std::move(lf);
        } else {
            last = FactorFailure::VerificationFail;
        }
    }
    if (!a.result) {
        rep.failure = any_pure_power ? last : FactorFailure::LeadingCoeffZeroUnfixable;
        if (rep.failure == FactorFailure::None) rep.failure = FactorFailure::VerificationFail;
        return rep;
    }
    rep.decomposable = true;
    rep.all_real = factors_real(*a.result, opt.real_tol);
    rep.factorization = std::move(a.result);
    return rep;
}

LinearFactorization factor_binary_form(const HomPoly<cplx>& q, double tol) {
    if (q.nvars() != 2) throw ShapeError("factor_binary_form: expects two variables");
    if (q.is_zero()) throw std::invalid_argument("factor_binary_form: zero polynomial");
    const std::uint32_t m = q.degree();
    std::vector<cplx> c(m + 1);
    for (std::uint32_t k = 0; k <= m; ++k) c[k] = q.coeff(Exponents{m - k, k});
    std::uint32_t e = 0;
    while (e <= m && c[e] == cplx(0.0)) ++e;

    std::vector<std::vector<cplx>> factors;
    std::vector<cplx> desc(c.begin() + e, c.end());
    for (const cplx& r : roots_univariate(desc, tol)) factors.push_back({1.0, -r});
    for (std::uint32_t i = 0; i < e; ++i) factors.push_back({0.0, 1.0});

    LinearFactorization f;
    f.constant = c[e];
    f.factors = std::move(factors);
    double scale = q.max_abs(), worst = 0.0;
    const HomPoly<cplx> E = expand_factorization(f, 2);
    for (std::uint32_t k = 0; k <= m; ++k) worst = std::max(worst, std::abs(E.coeff(Exponents{m - k, k}) - c[k]));
    f.residual = worst / scale;
    return f;
}

std::pair<std::vector<cplx>, std::vector<cplx>> factor_quadratic_explicit(cplx C11, cplx C12, cplx C22) {
    const cplx D = std::sqrt(C12 * C12 - C11 * C22);
    if (C11 == cplx(0.0) && C22 == cplx(0.0)) return {{1.0, 0.0}, {0.0, 2.0 * C12}};
    if (std::abs(C11) >= std::abs(C22)) return {{C11, C12 + D}, {1.0, (C12 - D) / C11}};
    // Same split with the roles of the two variables exchanged.
    return {{C12 + D, C22}, {(C12 - D) / C22, 1.0}};
}

bool divides(const std::vector<cplx>& l, const HomPoly<cplx>& Q, double tol) {
    return divides(LinearForm<cplx>{l}, Q, tol);
}

cplx resultant_binary(const HomPoly<cplx>& f, const HomPoly<cplx>& g) {
    if (f.nvars() != 2 || g.nvars() != 2) throw ShapeError("resultant_binary: expects binary forms");
    const std::size_t a = f.degree(), b = g.degree();
    auto coeffs = [](const HomPoly<cplx>& p) {
        const std::uint32_t d = p.degree();
        std::vector<cplx> c(d + 1);
        const double s = p.max_abs();
        for (std::uint32_t k = 0; k <= d; ++k) c[k] = p.coeff(Exponents{d - k, k}) / (s > 0 ? s : 1.0);
        return c;
    };
    const auto fc = coeffs(f), gc = coeffs(g);
    const std::size_t N = a + b;
    if (N == 0) return 1.0;
    Matrix<cplx> S(N, N);
    for (std::size_t r = 0; r < b; ++r)
        for (std::size_t k = 0; k <= a; ++k) S(r, r + k) = fc[k];
    for (std::size_t r = 0; r < a; ++r)
        for (std::size_t k = 0; k <= b; ++k) S(b + r, r + k) = gc[k];
    return determinant(S);
}

bool common_factor_suspected(const RationalTuple<cplx>& t, std::uint64_t seed, double tol) {
    const std::size_t n = t.nvars();
    if (t.denominator.degree() == 0) return false;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix<cplx> A(n, 2);
    for (auto& v : A.data()) v = cplx(g(rng), g(rng));
    const HomPoly<cplx> Qr = compose_linear(t.denominator, A);
    if (Qr.is_zero()) return true;
    std::vector<HomPoly<cplx>> Pr;
    for (const auto& p : t.numerators) {
        if (p.degree() == 0) return false;
        Pr.push_back(compose_linear(p, A));
    }
    const LinearFactorization f = factor_binary_form(Qr);
    for (const auto& l : f.factors) {
        // l = (c1, c2) vanishes at (c2, -c1).
        std::vector<cplx> pt{l[1], -l[0]};
        const double r = std::hypot(std::abs(pt[0]), std::abs(pt[1]));
        pt[0] /= r;
        pt[1] /= r;
        bool shared = true;
        for (const auto& p : Pr) {
            const double s = p.max_abs();
            if (s == 0.0) continue;
            if (std::abs(p.evaluate(pt)) > tol * s) {
                shared = false;
                break;
            }
        }
        if (shared) return true;
    }
    return false;
}

}  // namespace ratnet
