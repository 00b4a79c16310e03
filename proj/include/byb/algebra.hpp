#pragma once

#include <cmath>
#include <memory>
#include <tuple>
#include <utility>
#include <vector>

#include "byb/common.hpp"

namespace byb {

/// Real basis of su(n) in the Cartan-Weyl-derived convention
///
///   T^mu = i H^mu,
///   B^a  = (i/sqrt2)(E^a + E^-a),
///   C^a  = (1/sqrt2)(E^a - E^-a),
///
/// with H^mu an orthonormal Hermitian Cartan set (Tr H^mu H^nu = delta)
/// and E^a the matrix units of the positive roots e_i - e_j, i < j.
/// Ordering: all T^mu first, then (B^a, C^a) pairs in lexicographic root
/// order. With the trace form Tr(XY) the Gram matrix is -Identity, so
/// coefficient extraction is coeff_j = -Tr(b_j X).
class Basis {
  public:
    int n = 0;         // degree of su(n)
    int dim = 0;       // n^2 - 1
    int n_cartan = 0;  // n - 1

    std::vector<CMat> mats;                      // real basis, ordered as above
    std::vector<std::pair<int, int>> roots;      // positive roots as index pairs (i, j)
    std::vector<CMat> step_plus;                 // E^a
    std::vector<CMat> step_minus;                // E^-a

    // structure constants as sparse triplets: [b_i, b_j] = sum_k c b_k
    struct StructureEntry {
        int i, j, k;
        double c;
    };
    std::vector<StructureEntry> structure;

    Mat r_mat;  // canonical Yang-Baxter operator in basis coordinates

    int b_index(int root) const { return n_cartan + 2 * root; }
    int c_index(int root) const { return n_cartan + 2 * root + 1; }
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Element of su(n) (real coefficients) or sl(n,C) (complex coefficients)
/// over a fixed Basis.
template <typename Scalar>
struct ElementT {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coeffs;
    const Basis* basis = nullptr;
};

using RealElement = ElementT<double>;
using ComplexElement = ElementT<Complex>;

/// R-linear operator on basis coefficients. Real matrices cover maps
/// G -> G (R, R_g, I +- aR_g +- bR); complex ones cover maps into the
/// complexification, e.g. R - i.
struct LinearOp {
    Mat mat;
    const Basis* basis = nullptr;

    Vec apply(const Vec& x) const { return mat * x; }
    CVec apply(const CVec& x) const {
        return (mat * x.real()).cast<Complex>() + kI * (mat * x.imag()).cast<Complex>();
    }
};

namespace detail {

inline void require_same_basis(const Basis* a, const Basis* b) {
    if (a == nullptr || b == nullptr || a != b)
        throw BasisMismatchError("operands refer to different bases");
}

/// coeff_j = -Tr(b_j X)  (trace form, Gram = -I)
inline CVec coeffs_of(const Basis& basis, const CMat& x) {
    CVec c(basis.dim);
    for (int j = 0; j < basis.dim; ++j)
        c[j] = -(basis.mats[size_t(j)] * x).trace();
    return c;
}

inline CMat matrix_of(const Basis& basis, const CVec& c) {
    CMat x = CMat::Zero(basis.n, basis.n);
    for (int j = 0; j < basis.dim; ++j)
        x += c[j] * basis.mats[size_t(j)];
    return x;
}

inline CMat matrix_of(const Basis& basis, const Vec& c) {
    return matrix_of(basis, CVec(c.cast<Complex>()));
}

/// Real coefficients of a (numerically) anti-Hermitian matrix; throws if
/// the imaginary defect signals the matrix does not lie in su(n).
inline Vec real_coeffs_of(const Basis& basis, const CMat& x, double tol = 1e-10) {
    CVec c = coeffs_of(basis, x);
    if (max_norm(CVec(c.imag().cast<Complex>())) > tol)
        throw ConsistencyError("coefficient extraction left the real span");
    return c.real();
}

/// Bracket on coefficient vectors via the structure-constant table.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bracket_vec(
    const Basis& basis,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(basis.dim);
    for (const auto& e : basis.structure)
        out[e.k] += e.c * x[e.i] * y[e.j];
    return out;
}

/// [X,Y]_R = [RX,Y] + [X,RY]
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r_bracket_vec(
    const Basis& basis, const Mat& r,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) {
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const V rx = r * x, ry = r * y;
    return V(bracket_vec<Scalar>(basis, rx, y) + bracket_vec<Scalar>(basis, x, ry));
}

/// mYBE residual [RX,RY] - R([RX,Y]+[X,RY]) - [X,Y]
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mybe_residual_vec(
    const Basis& basis, const Mat& r,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) {
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const V rx = r * x, ry = r * y;
    return V(bracket_vec<Scalar>(basis, rx, ry) -
             r * r_bracket_vec<Scalar>(basis, r, x, y) -
             bracket_vec<Scalar>(basis, x, y));
}

}  // namespace detail

/// Build the Cartan-Weyl-derived real basis of su(n).
inline BasisPtr build_cartan_weyl(int n) {
    if (n < 2)
        throw InvalidDimensionError("su(n) basis requires n >= 2");
    auto basis = std::make_shared<Basis>();
    basis->n = n;
    basis->dim = n * n - 1;
    basis->n_cartan = n - 1;

    // Orthonormal Hermitian Cartan set: H^mu = diag(1,..,1,-mu,0,..)/sqrt(mu(mu+1))
    for (int mu = 1; mu < n; ++mu) {
        CMat h = CMat::Zero(n, n);
        const double norm = 1.0 / std::sqrt(double(mu) * double(mu + 1));
        for (int i = 0; i < mu; ++i)
            h(i, i) = norm;
        h(mu, mu) = -double(mu) * norm;
        basis->mats.push_back(kI * h);  // T^mu = i H^mu
    }

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            CMat ep = CMat::Zero(n, n);
            CMat em = CMat::Zero(n, n);
            ep(i, j) = 1.0;
            em(j, i) = 1.0;
            basis->roots.emplace_back(i, j);
            basis->step_plus.push_back(ep);
            basis->step_minus.push_back(em);
            const double s = 1.0 / std::sqrt(2.0);
            basis->mats.push_back(kI * s * (ep + em));  // B^a
            basis->mats.push_back(s * (ep - em));       // C^a
        }
    }

    // structure-constant table from matrix commutators
    const double prune = 1e-14;
    for (int i = 0; i < basis->dim; ++i) {
        for (int j = 0; j < basis->dim; ++j) {
            const CMat comm = basis->mats[size_t(i)] * basis->mats[size_t(j)] -
                              basis->mats[size_t(j)] * basis->mats[size_t(i)];
            const Vec c = detail::real_coeffs_of(*basis, comm, 1e-12);
            for (int k = 0; k < basis->dim; ++k)
                if (std::abs(c[k]) > prune)
                    basis->structure.push_back({i, j, k, c[k]});
        }
    }

    // canonical R: T -> 0, B -> C, C -> -B
    basis->r_mat = Mat::Zero(basis->dim, basis->dim);
    for (int a = 0; a < int(basis->roots.size()); ++a) {
        basis->r_mat(basis->c_index(a), basis->b_index(a)) = 1.0;
        basis->r_mat(basis->b_index(a), basis->c_index(a)) = -1.0;
    }
    return basis;
}

inline LinearOp canonical_R(const Basis& basis) {
    return LinearOp{basis.r_mat, &basis};
}

/// Reconstruct the n x n matrix of an element.
inline CMat to_matrix(const RealElement& x) {
    return detail::matrix_of(*x.basis, x.coeffs);
}
inline CMat to_matrix(const ComplexElement& x) {
    return detail::matrix_of(*x.basis, x.coeffs);
}

inline RealElement from_matrix(const Basis& basis, const CMat& m) {
    return RealElement{detail::real_coeffs_of(basis, m), &basis};
}
inline ComplexElement from_matrix_complex(const Basis& basis, const CMat& m) {
    return ComplexElement{detail::coeffs_of(basis, m), &basis};
}

/// Ad-invariant form realized as the trace form Tr(XY); equals -x.y on
/// coefficients since the basis Gram matrix is -Identity.
template <typename S1, typename S2>
auto inner(const ElementT<S1>& x, const ElementT<S2>& y) {
    detail::require_same_basis(x.basis, y.basis);
    return -(x.coeffs.transpose() * y.coeffs).value();
}

template <typename Scalar>
ElementT<Scalar> bracket(const ElementT<Scalar>& x, const ElementT<Scalar>& y) {
    detail::require_same_basis(x.basis, y.basis);
    return {detail::bracket_vec<Scalar>(*x.basis, x.coeffs, y.coeffs), x.basis};
}

template <typename Scalar>
ElementT<Scalar> r_bracket(const LinearOp& r, const ElementT<Scalar>& x,
                           const ElementT<Scalar>& y) {
    detail::require_same_basis(x.basis, y.basis);
    detail::require_same_basis(x.basis, r.basis);
    return {detail::r_bracket_vec<Scalar>(*x.basis, r.mat, x.coeffs, y.coeffs), x.basis};
}

template <typename Scalar>
ElementT<Scalar> mybe_residual(const LinearOp& r, const ElementT<Scalar>& x,
                               const ElementT<Scalar>& y) {
    detail::require_same_basis(x.basis, y.basis);
    detail::require_same_basis(x.basis, r.basis);
    return {detail::mybe_residual_vec<Scalar>(*x.basis, r.mat, x.coeffs, y.coeffs), x.basis};
}

}  // namespace byb
