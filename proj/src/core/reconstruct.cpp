#include "reconstruct.hpp"

#include <algorithm>
#include <limits>

namespace ratnet {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::None: return "None";
        case Stage::FactorTest: return "FactorTest";
        case Stage::SpanTest: return "SpanTest";
        case Stage::DegreeTest: return "DegreeTest";
        case Stage::RepeatedFactors: return "RepeatedFactors";
        case Stage::VerificationFail: return "VerificationFail";
        case Stage::ResultantTest: return "ResultantTest";
    }
    return "Unknown";
}

namespace {

MembershipVerdict reject(Stage s, std::string detail, double residual = 0.0) {
    MembershipVerdict v;
    v.stage_failed = s;
    v.detail = std::move(detail);
    v.residual = residual;
    return v;
}

Exponents anchor_of(const HomPoly<cplx>& Q) {
    if (Q.is_zero()) throw std::invalid_argument("projective normalisation: zero denominator");
    const double mx = Q.max_abs();
    const auto& lead = *Q.terms().begin();
    if (std::abs(lead.second) > 1e-12 * mx && lead.first == monomials_of_degree(Q.nvars(), Q.degree()).front())
        return lead.first;
    Exponents best = lead.first;
    double bv = 0.0;
    for (const auto& [e, c] : Q.terms())
        if (std::abs(c) > bv) {
            bv = std::abs(c);
            best = e;
        }
    return best;
}

RationalTuple<cplx> scale_tuple(const RationalTuple<cplx>& t, cplx s) {
    RationalTuple<cplx> out;
    for (const auto& p : t.numerators) out.numerators.push_back(p.scaled(s));
    out.denominator = t.denominator.scaled(s);
    return out;
}

double max_abs_diff(const HomPoly<cplx>& a, const HomPoly<cplx>& b) {
    double worst = 0.0;
    for (const auto& [e, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coeff(e)));
    for (const auto& [e, c] : b.terms())
        if (a.terms().find(e) == a.terms().end()) worst = std::max(worst, std::abs(c));
    return worst;
}

bool degrees_ok(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q, std::size_t nvars, std::uint32_t n,
                std::uint32_t m, std::string& why) {
    if (Q.nvars() != nvars || Q.degree() != m) {
        why = "denominator must have " + std::to_string(nvars) + " variables and degree " + std::to_string(m);
        return false;
    }
    for (const auto& p : Ps)
        if (p.nvars() != nvars || p.degree() != n) {
            why = "numerators must have " + std::to_string(nvars) + " variables and degree " + std::to_string(n);
            return false;
        }
    if (Q.is_zero()) {
        why = "zero denominator";
        return false;
    }
    return true;
}

double sin2_angle(const std::vector<cplx>& u, const std::vector<cplx>& v) {
    cplx ip = 0.0;
    double nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        ip += std::conj(u[i]) * v[i];
        nu += std::norm(u[i]);
        nv += std::norm(v[i]);
    }
    return 1.0 - std::norm(ip) / (nu * nv);
}

std::optional<Weights<cplx>> binary_step(const HomPoly<cplx>& P, const HomPoly<cplx>& Q, std::size_t L,
                                         const ReconstructOptions& opt, Stage& stage, std::string& why) {
    const Matrix<cplx> P12{{0.0, 1.0}, {1.0, 0.0}};
    Weights<cplx> w;
    w.arch = Architecture(std::vector<std::size_t>(L, 2));
    w.arch.dims.push_back(1);

    if (L == 2) {
        const cplx C11 = Q.coeff({2, 0}), C12 = 0.5 * Q.coeff({1, 1}), C22 = Q.coeff({0, 2});
        auto [la, lb] = factor_quadratic_explicit(C11, C12, C22);
        if (opt.real_only && (std::abs(std::imag(la[1])) > opt.factor.real_tol ||
                              std::abs(std::imag(lb[1])) > opt.factor.real_tol)) {
            stage = Stage::FactorTest;
            why = "denominator has no real factorisation";
            return std::nullopt;
        }
        Matrix<cplx> W1{{la[0], la[1]}, {lb[0], lb[1]}};
        Matrix<cplx> W1inv;
        try {
            W1inv = inverse2(W1, 1e-14 * std::max(1.0, Q.max_abs()));
        } catch (const std::domain_error&) {
            stage = Stage::RepeatedFactors;
            why = "quadratic denominator is a square";
            return std::nullopt;
        }
        Matrix<cplx> CP{{P.coeff({1, 0}), P.coeff({0, 1})}};
        w.mats = {W1, CP * W1inv * P12};
        return w;
    }

    // q_2 divides Q for even L and P for odd L.
    const HomPoly<cplx>& target = (L % 2 == 0) ? Q : P;
    LinearFactorization f;
    try {
        f = factor_binary_form(target, opt.factor.root_tol);
    } catch (const std::exception& ex) {
        stage = Stage::FactorTest;
        why = ex.what();
        return std::nullopt;
    }
    if (opt.real_only) {
        for (const auto& l : f.factors)
            for (const cplx& c : l)
                if (std::abs(c.imag()) > opt.factor.real_tol) {
                    stage = Stage::FactorTest;
                    why = "factor with complex coefficients";
                    return std::nullopt;
                }
    }
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < f.factors.size(); ++i)
        for (std::size_t j = i + 1; j < f.factors.size(); ++j) {
            const double s = sin2_angle(f.factors[i], f.factors[j]);
            if (s > best) {
                best = s;
                bi = i;
                bj = j;
            }
        }
    // A root of multiplicity r is only resolved to about eps^(1/r), so
    // clustered roots count as repeated well above machine precision.
    if (best < 1e-6) {
        stage = Stage::RepeatedFactors;
        why = "no two non-proportional linear factors at depth " + std::to_string(L);
        return std::nullopt;
    }
    auto a = f.factors[bi], b = f.factors[bj];
    const double na = std::sqrt(std::norm(a[0]) + std::norm(a[1])), nb = std::sqrt(std::norm(b[0]) + std::norm(b[1]));
    Matrix<cplx> W1{{a[0] / na, a[1] / na}, {b[0] / nb, b[1] / nb}};
    const Matrix<cplx> W1inv = inverse2(W1);

    HomPoly<cplx> Pp = compose_linear(P, W1inv), Qp = compose_linear(Q, W1inv);
    HomPoly<cplx>& divided = (L % 2 == 0) ? Qp : Pp;
    try {
        divided = exact_divide(divided, LinearForm<cplx>{{1.0, 0.0}}, 1e-7);
        divided = exact_divide(divided, LinearForm<cplx>{{0.0, 1.0}}, 1e-7);
    } catch (const NotDivisible& ex) {
        stage = Stage::VerificationFail;
        why = ex.what();
        return std::nullopt;
    }
    auto sub = binary_step(Pp, Qp, L - 1, opt, stage, why);
    if (!sub) return std::nullopt;
    w.mats.push_back(W1);
    w.mats.push_back(sub->mats[0] * P12);
    for (std::size_t k = 1; k < sub->mats.size(); ++k) w.mats.push_back(sub->mats[k]);
    return w;
}

}  // namespace

RationalTuple<cplx> projective_normalize(const RationalTuple<cplx>& t, const RationalTuple<cplx>& reference) {
    const Exponents a = anchor_of(reference.denominator);
    const cplx c = t.denominator.coeff(a);
    if (c == cplx(0.0)) throw std::domain_error("projective normalisation: anchor coefficient vanishes");
    return scale_tuple(t, 1.0 / c);
}

double projective_mismatch(const RationalTuple<cplx>& t, const RationalTuple<cplx>& reference) {
    if (t.numerators.size() != reference.numerators.size()) return std::numeric_limits<double>::infinity();
    RationalTuple<cplx> a, b;
    try {
        a = projective_normalize(t, reference);
        b = projective_normalize(reference, reference);
    } catch (const std::domain_error&) {
        return std::numeric_limits<double>::infinity();
    }
    double scale = b.denominator.max_abs(), worst = max_abs_diff(a.denominator, b.denominator);
    for (std::size_t i = 0; i < a.numerators.size(); ++i) {
        scale = std::max(scale, b.numerators[i].max_abs());
        worst = std::max(worst, max_abs_diff(a.numerators[i], b.numerators[i]));
    }
    return worst / scale;
}

MembershipVerdict reconstruct_shallow(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q,
                                      const Architecture& arch, const ReconstructOptions& opt) {
    if (arch.L() != 2) throw std::invalid_argument("reconstruct_shallow: architecture must have one hidden layer");
    const std::size_t n = arch.dims[0], m = arch.dims[1], k = arch.dims[2];
    std::string why;
    if (Ps.size() != k) return reject(Stage::DegreeTest, "expected " + std::to_string(k) + " numerators");
    if (!degrees_ok(Ps, Q, n, static_cast<std::uint32_t>(m - 1), static_cast<std::uint32_t>(m), why))
        return reject(Stage::DegreeTest, why);

    FactorReport rep = factor_multilinear(Q, opt.factor);
    if (!rep.decomposable) return reject(Stage::FactorTest, std::string("denominator does not split: ") + to_string(rep.failure));
    if (opt.real_only && !rep.all_real) return reject(Stage::FactorTest, "denominator splits only over the complex numbers");

    auto forms = rep.factorization->factors;
    for (cplx& c : forms[0]) c *= rep.factorization->constant;

    // Products of all forms but one, on the monomial basis of degree m-1.
    std::vector<HomPoly<cplx>> lin;
    for (const auto& f : forms) lin.push_back(HomPoly<cplx>::linear(f));
    const auto hats = detail::leave_one_out(lin, n);
    const auto basis = monomials_of_degree(n, static_cast<std::uint32_t>(m - 1));
    Matrix<cplx> A(basis.size(), m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t r = 0; r < basis.size(); ++r) A(r, j) = hats[j].coeff(basis[r]);

    double scale = Q.max_abs();
    for (const auto& p : Ps) scale = std::max(scale, p.max_abs());
    Matrix<cplx> W1(m, n), W2(k, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) W1(j, i) = forms[j][i];
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<cplx> rhs;
        for (const auto& e : basis) rhs.push_back(Ps[i].coeff(e));
        const LeastSquares ls = least_squares(A, rhs);
        const double res = ls.residual / scale;
        worst = std::max(worst, res);
        if (res > opt.tol)
            return reject(Stage::SpanTest, "numerator " + std::to_string(i + 1) + " is outside the span of the deleted products", res);
        for (std::size_t j = 0; j < m; ++j) W2(i, j) = ls.x[j];
    }

    Weights<cplx> w;
    w.arch = arch;
    w.mats = {W1, W2};
    RationalTuple<cplx> input{Ps, Q};
    const double mismatch = projective_mismatch(forward_recursive(w), input);
    if (!(mismatch <= opt.tol)) return reject(Stage::VerificationFail, "forward map does not reproduce the input", mismatch);

    MembershipVerdict v;
    v.in_model = true;
    v.weights = std::move(w);
    v.residual = std::max(worst, mismatch);
    v.necessary_only = false;
    return v;
}

MembershipVerdict reconstruct_binary(const HomPoly<cplx>& P, const HomPoly<cplx>& Q, std::size_t L,
                                     const ReconstructOptions& opt) {
    if (L < 2) throw std::invalid_argument("reconstruct_binary: needs L >= 2");
    const std::uint32_t delta = parity(L);
    const auto n = static_cast<std::uint32_t>(L + delta - 1), m = static_cast<std::uint32_t>(L - delta);
    std::string why;
    if (!degrees_ok({P}, Q, 2, n, m, why)) return reject(Stage::DegreeTest, why);

    Stage stage = Stage::None;
    auto w = binary_step(P, Q, L, opt, stage, why);
    if (!w) return reject(stage, why);

    const double mismatch = projective_mismatch(forward_recursive(*w), RationalTuple<cplx>{{P}, Q});
    if (!(mismatch <= opt.tol)) return reject(Stage::VerificationFail, "forward map does not reproduce the input", mismatch);
    MembershipVerdict v;
    v.in_model = true;
    v.weights = std::move(w);
    v.residual = mismatch;
    return v;
}

MembershipVerdict membership_binary_multioutput(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q,
                                                std::size_t L, double tol) {
    if (L < 2) throw std::invalid_argument("membership_binary_multioutput: needs L >= 2");
    const std::uint32_t delta = parity(L);
    std::string why;
    if (!degrees_ok(Ps, Q, 2, static_cast<std::uint32_t>(L + delta - 1), static_cast<std::uint32_t>(L - delta), why))
        return reject(Stage::DegreeTest, why);
    MembershipVerdict v;
    v.necessary_only = true;
    double worst = 0.0;
    // With one hidden layer the numerators are unconstrained linear forms.
    if (L >= 3) {
        for (std::size_t i = 0; i < Ps.size(); ++i)
            for (std::size_t j = i + 1; j < Ps.size(); ++j) {
                if (Ps[i].is_zero() || Ps[j].is_zero()) continue;
                const double r = std::abs(resultant_binary(Ps[i], Ps[j]));
                worst = std::max(worst, r);
                if (r > tol) {
                    v.stage_failed = Stage::ResultantTest;
                    v.residual = r;
                    v.detail = "numerators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                               " have no common factor";
                    return v;
                }
            }
    }
    v.in_model = true;
    v.residual = worst;
    return v;
}

double round_trip_residual(const Weights<cplx>& w, const ReconstructOptions& opt) {
    const RationalTuple<cplx> t = forward_recursive(w);
    MembershipVerdict v;
    if (w.arch.is_binary() && w.arch.output_dim() == 1 && w.arch.L() >= 3)
        v = reconstruct_binary(t.numerators[0], t.denominator, w.arch.L(), opt);
    else if (w.arch.L() == 2)
        v = reconstruct_shallow(t.numerators, t.denominator, w.arch, opt);
    else
        throw std::invalid_argument("round_trip_residual: no reconstruction for architecture " + w.arch.to_string());
    if (!v.in_model)
        throw std::runtime_error(std::string("round_trip_residual: reconstruction failed at ") + to_string(v.stage_failed) +
                                 ": " + v.detail);
    return projective_mismatch(forward_recursive(*v.weights), t);
}

}  // namespace ratnet
