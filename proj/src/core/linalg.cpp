#include "linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

namespace ratnet {

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % p);
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    std::uint64_t r = 1, e = p - 2;
    while (e) {
        if (e & 1) r = mul_mod(r, a, p);
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    return r;
}

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> to_eigen(const Matrix<T>& a) {
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

template <class T>
std::vector<double> svals(const Matrix<T>& a) {
    if (a.rows() == 0 || a.cols() == 0) return {};
    Eigen::JacobiSVD<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>> svd(to_eigen(a));
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

std::size_t count_above(const std::vector<double>& s, double rel_tol) {
    if (s.empty() || s.front() == 0.0) return 0;
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](double v) { return v > rel_tol * s.front(); }));
}

}  // namespace

std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> rows, std::uint64_t p) {
    if (rows.empty()) return 0;
    const std::size_t ncols = rows.front().size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < ncols && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        const std::uint64_t inv = inv_mod(rows[rank][c], p);
        for (std::size_t j = c; j < ncols; ++j) rows[rank][j] = mul_mod(rows[rank][j], inv, p);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            const std::uint64_t f = rows[r][c];
            if (f == 0) continue;
            for (std::size_t j = c; j < ncols; ++j) {
                const std::uint64_t sub = mul_mod(f, rows[rank][j], p);
                rows[r][j] = rows[r][j] >= sub ? rows[r][j] - sub : rows[r][j] + (p - sub);
            }
        }
        ++rank;
    }
    return rank;
}

std::vector<double> singular_values(const Matrix<cplx>& a) { return svals(a); }
std::vector<double> singular_values(const Matrix<double>& a) { return svals(a); }

std::size_t numerical_rank(const Matrix<cplx>& a, double rel_tol) { return count_above(svals(a), rel_tol); }
std::size_t numerical_rank(const Matrix<double>& a, double rel_tol) { return count_above(svals(a), rel_tol); }

LeastSquares least_squares(const Matrix<cplx>& a, const std::vector<cplx>& b) {
    if (b.size() != a.rows()) throw ShapeError("least_squares: right-hand side has wrong length");
    const Eigen::MatrixXcd A = to_eigen(a);
    Eigen::VectorXcd rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i) = b[i];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
    const Eigen::VectorXcd x = cod.solve(rhs);
    LeastSquares out;
    out.x.assign(x.data(), x.data() + x.size());
    out.residual = b.empty() ? 0.0 : (A * x - rhs).cwiseAbs().maxCoeff();
    return out;
}

Matrix<cplx> inverse(const Matrix<cplx>& a) {
    if (a.rows() != a.cols()) throw ShapeError("inverse: matrix is not square");
    const Eigen::MatrixXcd A = to_eigen(a);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) throw std::domain_error("inverse: singular matrix");
    const Eigen::MatrixXcd inv = lu.inverse();
    Matrix<cplx> out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = inv(i, j);
    return out;
}

cplx horner(const std::vector<cplx>& coeffs, cplx y) {
    cplx acc = 0.0;
    for (const cplx& c : coeffs) acc = acc * y + c;
    return acc;
}

std::vector<cplx> roots_univariate(const std::vector<cplx>& coeffs, double tol) {
    if (coeffs.empty() || coeffs.front() == cplx(0.0)) throw std::invalid_argument("roots_univariate: leading coefficient is zero");
    const std::size_t m = coeffs.size() - 1;
    if (m == 0) return {};
    std::vector<cplx> c(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i] / coeffs.front();

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
    for (std::size_t j = 0; j < m; ++j) comp(0, j) = -c[j + 1];
    for (std::size_t i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw NonConvergence("roots_univariate: eigenvalue iteration failed");

    std::vector<cplx> deriv(m);
    for (std::size_t i = 0; i < m; ++i) deriv[i] = c[i] * static_cast<double>(m - i);

    double norm = 0.0;
    for (const cplx& v : c) norm = std::max(norm, std::abs(v));
    std::vector<cplx> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        cplx y = es.eigenvalues()(i);
        for (int it = 0; it < 8; ++it) {
            const cplx f = horner(c, y), df = horner(deriv, y);
            if (std::abs(df) < 1e-300) break;
            const cplx step = f / df;
            const cplx y2 = y - step;
            if (std::abs(horner(c, y2)) >= std::abs(f)) break;
            y = y2;
        }
        roots.push_back(y);
    }
    for (const cplx& y : roots) {
        double scale = 0.0, pw = 1.0;
        for (std::size_t i = 0; i <= m; ++i) {
            scale += std::abs(c[m - i]) * pw;
            pw *= std::max(1.0, std::abs(y));
        }
        if (std::abs(horner(c, y)) > tol * std::max(norm, scale))
            throw NonConvergence("roots_univariate: root residual above tolerance");
    }
    return roots;
}

Matrix<double> random_orthogonal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    Matrix<double> out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = q(i, j);
    return out;
}

cplx determinant(const Matrix<cplx>& a) {
    if (a.rows() != a.cols()) throw ShapeError("determinant: matrix is not square");
    if (a.rows() == 0) return 1.0;
    return to_eigen(a).partialPivLu().determinant();
}

}  // namespace ratnet
