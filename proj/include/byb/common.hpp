#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace byb {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimensionError : Error {
    using Error::Error;
};
struct BasisMismatchError : Error {
    using Error::Error;
};
struct SingularOperatorError : Error {
    SingularOperatorError(const std::string& what, long site_index)
        : Error(what), site(site_index) {}
    long site;
};
struct SpectralPoleError : Error {
    using Error::Error;
};
struct ConditioningError : Error {
    using Error::Error;
};
struct SubspaceMembershipError : Error {
    using Error::Error;
};
struct InstabilityError : Error {
    using Error::Error;
};
struct AliasingError : Error {
    using Error::Error;
};
struct TransportError : Error {
    using Error::Error;
};
struct ConsistencyError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Max-norm of a coefficient vector or matrix, real or complex.
template <typename Derived>
double max_norm(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const CMat& g) {
    return max_norm((g.adjoint() * g - CMat::Identity(g.rows(), g.cols())).eval());
}

inline double det_defect(const CMat& g) {
    return std::abs(g.determinant() - 1.0);
}

}  // namespace byb
