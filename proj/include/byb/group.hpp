#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "byb/algebra.hpp"

namespace byb {

enum class GroupKind { Unitary, Complexified };

struct GroupElement {
    CMat matrix;
    GroupKind kind = GroupKind::Unitary;
};

/// Element of AN: upper triangular, strictly positive real diagonal, det 1.
struct ANElement {
    CMat matrix;

    double triangularity_defect() const {
        double d = 0.0;
        for (Eigen::Index i = 0; i < matrix.rows(); ++i)
            for (Eigen::Index j = 0; j < i; ++j)
                d = std::max(d, std::abs(matrix(i, j)));
        return d;
    }
    double diagonal_defect() const {
        double d = 0.0;
        for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
            d = std::max(d, std::abs(matrix(i, i).imag()));
            if (matrix(i, i).real() <= 0.0)
                d = std::max(d, 1.0);
        }
        return d;
    }
};

/// Matrix exponential (scaling-and-squaring Pade via Eigen).
inline CMat exp_map(const CMat& x) {
    return x.exp();
}

inline CMat exp_map(const RealElement& x) {
    return to_matrix(x).exp();
}

/// Matrix of Ad_g on basis coefficients: column i = coeffs(g b_i g^-1).
/// Real for unitary g (Ad preserves su(n)).
inline Mat adjoint_matrix(const Basis& basis, const CMat& g) {
    Mat ad(basis.dim, basis.dim);
    const CMat ginv = g.inverse();
    for (int i = 0; i < basis.dim; ++i)
        ad.col(i) = detail::real_coeffs_of(basis, CMat(g * basis.mats[size_t(i)] * ginv));
    return ad;
}

inline RealElement adjoint_action(const Basis& basis, const CMat& g, const RealElement& x) {
    detail::require_same_basis(x.basis, &basis);
    return {detail::real_coeffs_of(basis, CMat(g * to_matrix(x) * g.inverse())), &basis};
}

/// R_g = Ad_{g^-1} R Ad_g
inline LinearOp dressed_R(const LinearOp& r, const CMat& g) {
    const Mat ad = adjoint_matrix(*r.basis, g);
    // Ad_{g^-1} = Ad_g^-1; for unitary g this is the transpose in our
    // orthogonal coordinates, but solve keeps it exact for any g.
    const Mat ad_inv = ad.inverse();
    return LinearOp{Mat(ad_inv * r.mat * ad), r.basis};
}

/// Polar projection onto the unitary group (used only when the monitored
/// defect exceeds its threshold; callers log every use).
inline CMat polar_project(const CMat& g) {
    Eigen::JacobiSVD<CMat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

/// Iwasawa decomposition l = b u of l in SL(n,C): b upper triangular with
/// positive diagonal (AN), u special unitary. b is the upper-Cholesky
/// factor of l l^dagger, obtained by reversing a standard LLT.
inline std::pair<ANElement, GroupElement> iwasawa(const CMat& l, double condition_cap = 1e8) {
    const Eigen::Index n = l.rows();
    Eigen::JacobiSVD<CMat> svd(l);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0.0 || smax / smin > condition_cap)
        throw ConditioningError("iwasawa: input condition number above cap");

    const CMat m = l * l.adjoint();
    CMat rev = CMat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        rev(i, n - 1 - i) = 1.0;
    Eigen::LLT<CMat> llt(CMat(rev * m * rev));
    if (llt.info() != Eigen::Success)
        throw ConditioningError("iwasawa: Cholesky factorization failed");
    const CMat lower = llt.matrixL();
    CMat b = rev * lower * rev;  // upper triangular, positive real diagonal

    const CMat u = b.triangularView<Eigen::Upper>().solve(l);
    return {ANElement{b}, GroupElement{u, GroupKind::Unitary}};
}

/// --- the (R - i) homomorphism and the Lie(AN) split ----------------------

/// (R - i) K as a complex coefficient vector, for K in su(n).
inline CVec r_minus_i_apply(const Basis& basis, const Vec& k) {
    return (basis.r_mat * k).cast<Complex>() - kI * k.cast<Complex>();
}

/// Invert (R - i): for xi = x + i y in coefficient form the unique
/// preimage is K = -y, valid iff x + R y = 0 (membership in (R-i)G,
/// i.e. in Lie(AN)).
inline double r_minus_i_membership_residual(const Basis& basis, const CVec& xi) {
    return max_norm(Vec(xi.real() + basis.r_mat * xi.imag()));
}

inline Vec invert_R_minus_i(const Basis& basis, const CVec& xi, double tol = 1e-10) {
    if (r_minus_i_membership_residual(basis, xi) > tol)
        throw SubspaceMembershipError("element is not in the image of (R - i)");
    return -xi.imag();
}

/// Pointwise split of Z in sl(n,C) = Lie(AN) + su(n):
/// the anti-Hermitian part keeps the strict lower triangle.
inline CMat project_su(const CMat& z) {
    const Eigen::Index n = z.rows();
    CMat out = CMat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = kI * z(i, i).imag();
        for (Eigen::Index j = 0; j < i; ++j) {
            out(i, j) = z(i, j);
            out(j, i) = -std::conj(z(i, j));
        }
    }
    return out;
}

inline CMat project_an(const CMat& z) {
    return z - project_su(z);
}

}  // namespace byb
