#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "byb/fourier.hpp"
#include "byb/group.hpp"

namespace byb {

struct ModelParams {
    double alpha = 0.0;
    double beta = 0.0;

    static constexpr double kMaxCoupling = 5.0;

    void validate() const {
        if (alpha < 0.0 || beta < 0.0)
            throw ConfigError("model parameters must be non-negative");
        if (alpha > kMaxCoupling || beta > kMaxCoupling)
            throw ConfigError("model parameter exceeds configured cap");
    }
    ModelParams swapped() const { return {beta, alpha}; }
};

/// Periodic sigma-grid and light-cone convention. Globally fixed:
/// xi_pm = tau +- sigma, d_pm = (d_tau +- d_sigma)/2.
struct Worldsheet {
    int n_sigma = 128;
    double length = 2.0 * M_PI;
    double cfl = 0.25;

    void validate() const {
        if (n_sigma < 8 || (n_sigma & (n_sigma - 1)) != 0)
            throw ConfigError("n_sigma must be a power of two >= 8");
        if (length <= 0.0 || cfl <= 0.0 || cfl > 0.8)
            throw ConfigError("invalid worldsheet geometry");
    }
    double dsigma() const { return length / n_sigma; }
    double dt() const { return cfl * dsigma(); }
    double sigma(int j) const { return length * j / n_sigma; }
};

/// Lattice snapshot of (g, J_+, J_-) at fixed tau. Currents are stored as
/// coefficient columns (dim x n_sigma).
struct FieldState {
    double tau = 0.0;
    std::vector<CMat> g;
    Mat jp, jm;
};

struct ProjectionEvent {
    double tau;
    double defect;
};

struct History {
    BasisPtr basis;
    Worldsheet ws;
    ModelParams params;
    double dt = 0.0;
    std::vector<FieldState> slices;
    std::vector<ProjectionEvent> projections;

    size_t steps() const { return slices.empty() ? 0 : slices.size() - 1; }
};

namespace detail {

/// Per-site operators of the deformed current map.
struct SiteOps {
    Mat ad_g;        // Ad_g
    Mat r_g;         // Ad_{g^-1} R Ad_g
    Mat op_plus;     // I + a R_g + b R
    Mat op_minus;    // I - a R_g - b R
    Eigen::PartialPivLU<Mat> lu_plus, lu_minus;
};

inline SiteOps site_ops(const Basis& basis, const ModelParams& p, const CMat& g,
                        long site = -1) {
    SiteOps o;
    o.ad_g = adjoint_matrix(basis, g);
    // unitary g: Ad_g is orthogonal for the -Tr form, so transpose inverts
    o.r_g = o.ad_g.transpose() * basis.r_mat * o.ad_g;
    const Mat defo = p.alpha * o.r_g + p.beta * basis.r_mat;
    const Mat id = Mat::Identity(basis.dim, basis.dim);
    o.op_plus = id + defo;
    o.op_minus = id - defo;
    o.lu_plus.compute(o.op_plus);
    o.lu_minus.compute(o.op_minus);
    if (o.lu_plus.rcond() < 1e-8 || o.lu_minus.rcond() < 1e-8)
        throw SingularOperatorError("deformed current operator is near-singular", site);
    return o;
}

/// F_- := -b[J+, RJ-] - c/2 [J-, J+]  (equals d_- J_+ on solutions)
/// F_+ := -b[J-, RJ+] - c/2 [J-, J+]  (equals d_+ J_- on solutions)
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> f_minus(
    const Basis& basis, const ModelParams& p,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& jp,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& jm) {
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const double c = 1.0 + p.alpha * p.alpha - p.beta * p.beta;
    const V rjm = basis.r_mat * jm;
    return V(-p.beta * bracket_vec<Scalar>(basis, jp, rjm) -
             0.5 * c * bracket_vec<Scalar>(basis, jm, jp));
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> f_plus(
    const Basis& basis, const ModelParams& p,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& jp,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& jm) {
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const double c = 1.0 + p.alpha * p.alpha - p.beta * p.beta;
    const V rjp = basis.r_mat * jp;
    return V(-p.beta * bracket_vec<Scalar>(basis, jm, rjp) -
             0.5 * c * bracket_vec<Scalar>(basis, jm, jp));
}

}  // namespace detail

/// V_+ = d_+J_- + b[J-,RJ+] + c/2 [J-,J+]
/// V_- = -d_-J_+ - b[J+,RJ-] - c/2 [J-,J+]
/// so that V_+ + V_- is the field-equation residual and V_+ - V_- the
/// Bianchi residual.
inline Vec v_plus_point(const Basis& basis, const ModelParams& p, const Vec& jp,
                        const Vec& jm, const Vec& dp_jm) {
    return dp_jm - detail::f_plus<double>(basis, p, jp, jm);
}

inline Vec v_minus_point(const Basis& basis, const ModelParams& p, const Vec& jp,
                         const Vec& jm, const Vec& dm_jp) {
    return -(dm_jp - detail::f_minus<double>(basis, p, jp, jm));
}

/// Currents J_pm = -+ (I +- aR_g +- bR)^-1 g^-1 d_pm g from group-field
/// derivative data. a_tau/a_sigma are per-site left-invariant derivatives
/// g^-1 d g in coefficient form.
inline std::pair<Mat, Mat> currents_from_a(const Basis& basis, const ModelParams& p,
                                           const std::vector<CMat>& g, const Mat& a_tau,
                                           const Mat& a_sigma) {
    const int ns = int(g.size());
    Mat jp(basis.dim, ns), jm(basis.dim, ns);
    for (int s = 0; s < ns; ++s) {
        const auto ops = detail::site_ops(basis, p, g[size_t(s)], s);
        const Vec ap = 0.5 * (a_tau.col(s) + a_sigma.col(s));
        const Vec am = 0.5 * (a_tau.col(s) - a_sigma.col(s));
        jp.col(s) = -ops.lu_plus.solve(ap);
        jm.col(s) = ops.lu_minus.solve(am);
    }
    return {jp, jm};
}

/// Left-invariant derivatives recovered from stored currents:
/// A_pm = -+ (I +- aR_g +- bR) J_pm.
inline std::pair<Mat, Mat> a_from_currents(const Basis& basis, const ModelParams& p,
                                           const FieldState& state) {
    const int ns = int(state.g.size());
    Mat ap(basis.dim, ns), am(basis.dim, ns);
    for (int s = 0; s < ns; ++s) {
        const auto ops = detail::site_ops(basis, p, state.g[size_t(s)], s);
        ap.col(s) = -(ops.op_plus * state.jp.col(s));
        am.col(s) = ops.op_minus * state.jm.col(s);
    }
    return {ap, am};
}

/// Spectral sigma-derivative of the group field, as per-site matrices.
inline std::vector<CMat> group_sigma_derivative(const Worldsheet& ws,
                                                const std::vector<CMat>& g) {
    const int n = int(g[0].rows());
    const int ns = ws.n_sigma;
    CMat rows(n * n, ns);
    for (int s = 0; s < ns; ++s)
        rows.col(s) = Eigen::Map<const CVec>(g[size_t(s)].data(), n * n);
    const CMat drows = fft::derivative_rows(rows, ws.length);
    std::vector<CMat> out(size_t(ns));
    for (int s = 0; s < ns; ++s)
        out[size_t(s)] = Eigen::Map<const CMat>(drows.col(s).data(), n, n);
    return out;
}

/// Deviation of the stored currents from the current map applied to the
/// stored group field: max-norm of g^-1 d_sigma g - (A_+ - A_-), the part
/// of the defining relation the evolution does not enforce identically.
inline double constraint_residual(const Basis& basis, const Worldsheet& ws,
                                  const ModelParams& p, const FieldState& state) {
    const auto dg = group_sigma_derivative(ws, state.g);
    const auto [ap, am] = a_from_currents(basis, p, state);
    double worst = 0.0;
    for (int s = 0; s < ws.n_sigma; ++s) {
        const CMat lhs = state.g[size_t(s)].inverse() * dg[size_t(s)];
        const CVec sig = detail::coeffs_of(basis, lhs);
        const CVec rhs = (ap.col(s) - am.col(s)).cast<Complex>();
        worst = std::max(worst, max_norm(CVec(sig - rhs)));
    }
    return worst;
}

/// Integrand of the deformed action: (g^-1 d_+ g, (I - aR_g - bR)^-1 g^-1 d_- g).
inline Vec action_density(const Basis& basis, const ModelParams& p,
                          const std::vector<CMat>& g, const Mat& a_tau,
                          const Mat& a_sigma) {
    const int ns = int(g.size());
    Vec density(ns);
    for (int s = 0; s < ns; ++s) {
        const auto ops = detail::site_ops(basis, p, g[size_t(s)], s);
        const Vec ap = 0.5 * (a_tau.col(s) + a_sigma.col(s));
        const Vec am = 0.5 * (a_tau.col(s) - a_sigma.col(s));
        density[s] = -ap.dot(ops.lu_minus.solve(am));  // trace-form Gram is -I
    }
    return density;
}

namespace detail {

struct StateSlope {
    Mat djp, djm;
    std::vector<CMat> dg;
};

/// Method-of-lines right-hand side: characteristics at speed +-1 for J_pm
/// with bracket source terms, and d_tau g = g (A_+ + A_-).
inline StateSlope rhs(const Basis& basis, const Worldsheet& ws, const ModelParams& p,
                      const FieldState& s) {
    const int ns = ws.n_sigma;
    StateSlope out;
    out.djp = fft::derivative_rows(s.jp, ws.length);
    out.djm = Mat(-fft::derivative_rows(s.jm, ws.length));
    out.dg.resize(size_t(ns));
    for (int site = 0; site < ns; ++site) {
        const Vec jp = s.jp.col(site), jm = s.jm.col(site);
        out.djp.col(site) += 2.0 * f_minus<double>(basis, p, jp, jm);
        out.djm.col(site) += 2.0 * f_plus<double>(basis, p, jp, jm);
        const auto ops = site_ops(basis, p, s.g[size_t(site)], site);
        const Vec a_tau = -(ops.op_plus * jp) + ops.op_minus * jm;  // A_+ + A_-
        out.dg[size_t(site)] = s.g[size_t(site)] * matrix_of(basis, a_tau);
    }
    return out;
}

inline FieldState apply_slope(const FieldState& s, const StateSlope& k, double h) {
    FieldState out;
    out.tau = s.tau + h;
    out.jp = s.jp + h * k.djp;
    out.jm = s.jm + h * k.djm;
    out.g.resize(s.g.size());
    for (size_t i = 0; i < s.g.size(); ++i)
        out.g[i] = s.g[i] + h * k.dg[i];
    return out;
}

}  // namespace detail

/// One classical RK4 step of size dt.
inline FieldState step(const Basis& basis, const Worldsheet& ws, const ModelParams& p,
                       const FieldState& s, double dt) {
    if (dt > ws.cfl * ws.dsigma() * (1.0 + 1e-12))
        throw ConfigError("time step violates the CFL bound");
    using detail::apply_slope;
    using detail::rhs;
    const auto k1 = rhs(basis, ws, p, s);
    const auto k2 = rhs(basis, ws, p, apply_slope(s, k1, 0.5 * dt));
    const auto k3 = rhs(basis, ws, p, apply_slope(s, k2, 0.5 * dt));
    const auto k4 = rhs(basis, ws, p, apply_slope(s, k3, dt));

    FieldState out;
    out.tau = s.tau + dt;
    out.jp = s.jp + (dt / 6.0) * (k1.djp + 2.0 * k2.djp + 2.0 * k3.djp + k4.djp);
    out.jm = s.jm + (dt / 6.0) * (k1.djm + 2.0 * k2.djm + 2.0 * k3.djm + k4.djm);
    out.g.resize(s.g.size());
    for (size_t i = 0; i < s.g.size(); ++i)
        out.g[i] = s.g[i] + (dt / 6.0) * (k1.dg[i] + 2.0 * k2.dg[i] + 2.0 * k3.dg[i] +
                                          k4.dg[i]);

    if (!out.jp.allFinite() || !out.jm.allFinite())
        throw InstabilityError("evolution diverged at tau = " + std::to_string(out.tau));
    return out;
}

/// Fourier-mode seed for smooth periodic initial data.
struct InitialDataSpec {
    std::uint64_t seed = 1;
    double amplitude = 0.1;
    int modes = 2;
};

/// Smooth periodic state: g(sigma, 0) = exp(X(sigma)) with band-limited X,
/// a free band-limited A_tau profile, and currents derived from the
/// current map (so the constraint holds at construction).
inline FieldState make_initial_data(const Basis& basis, const Worldsheet& ws,
                                    const ModelParams& p, const InitialDataSpec& spec) {
    ws.validate();
    p.validate();
    if (spec.modes < 0 || spec.modes > ws.n_sigma / 4)
        throw AliasingError("initial data modes must stay below n_sigma/4");

    std::mt19937_64 engine(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int ns = ws.n_sigma;

    const auto profile = [&](double scale) {
        Mat field = Mat::Zero(basis.dim, ns);
        for (int m = 1; m <= spec.modes; ++m) {
            const double k = 2.0 * M_PI * m / ws.length;
            for (int i = 0; i < basis.dim; ++i) {
                const double a = scale * normal(engine) / m;
                const double b = scale * normal(engine) / m;
                for (int s = 0; s < ns; ++s)
                    field(i, s) += a * std::cos(k * ws.sigma(s)) +
                                   b * std::sin(k * ws.sigma(s));
            }
        }
        return field;
    };

    const Mat x = profile(spec.amplitude);
    const Mat a_tau = profile(spec.amplitude);

    FieldState state;
    state.tau = 0.0;
    state.g.resize(size_t(ns));
    for (int s = 0; s < ns; ++s)
        state.g[size_t(s)] = exp_map(detail::matrix_of(basis, Vec(x.col(s))));

    const auto dg = group_sigma_derivative(ws, state.g);
    Mat a_sigma(basis.dim, ns);
    for (int s = 0; s < ns; ++s) {
        const CMat a = state.g[size_t(s)].inverse() * dg[size_t(s)];
        a_sigma.col(s) = detail::coeffs_of(basis, a).real();
    }
    std::tie(state.jp, state.jm) = currents_from_a(basis, p, state.g, a_tau, a_sigma);
    return state;
}

/// Evolve to t_final, storing every slice. Unitarity is monitored and a
/// polar re-projection applied only when the defect exceeds the threshold;
/// each such event is logged in the returned history.
inline History evolve(const BasisPtr& basis, const Worldsheet& ws, const ModelParams& p,
                      const FieldState& initial, double t_final,
                      double projection_threshold = 1e-10) {
    History h;
    h.basis = basis;
    h.ws = ws;
    h.params = p;
    int steps = std::max(2, int(std::ceil(t_final / ws.dt())));
    steps += steps % 2;  // even count so transports can stride by 2 slices
    h.dt = t_final / steps;
    h.slices.reserve(size_t(steps) + 1);
    h.slices.push_back(initial);
    for (int k = 0; k < steps; ++k) {
        FieldState next = step(*basis, ws, p, h.slices.back(), h.dt);
        double defect = 0.0;
        for (const auto& g : next.g)
            defect = std::max(defect, unitarity_defect(g));
        if (defect > projection_threshold) {
            for (auto& g : next.g)
                g = polar_project(g);
            h.projections.push_back({next.tau, defect});
        }
        h.slices.push_back(std::move(next));
    }
    return h;
}

/// Field + derivative data of one interior history slice: second-order
/// central differences in tau (this fixes the measured convergence order
/// of all residual diagnostics at two), spectral derivatives in sigma.
struct SliceView {
    const FieldState* state = nullptr;
    Mat djp_dtau, djm_dtau, djp_dsig, djm_dsig;
    std::vector<CMat> dg_dtau, dg_dsig;

    Mat dp_jm() const { return 0.5 * (djm_dtau + djm_dsig); }
    Mat dm_jp() const { return 0.5 * (djp_dtau - djp_dsig); }
};

inline SliceView slice_view(const History& h, size_t k) {
    if (k == 0 || k + 1 >= h.slices.size())
        throw ConfigError("slice_view needs an interior slice");
    const FieldState& prev = h.slices[k - 1];
    const FieldState& next = h.slices[k + 1];
    SliceView v;
    v.state = &h.slices[k];
    const double inv2dt = 1.0 / (2.0 * h.dt);
    v.djp_dtau = (next.jp - prev.jp) * inv2dt;
    v.djm_dtau = (next.jm - prev.jm) * inv2dt;
    v.djp_dsig = fft::derivative_rows(v.state->jp, h.ws.length);
    v.djm_dsig = fft::derivative_rows(v.state->jm, h.ws.length);
    v.dg_dsig = group_sigma_derivative(h.ws, v.state->g);
    v.dg_dtau.resize(v.state->g.size());
    for (size_t s = 0; s < v.state->g.size(); ++s)
        v.dg_dtau[s] = (next.g[s] - prev.g[s]) * inv2dt;
    return v;
}

/// Field-equation residual d_+J_- - d_-J_+ + b[J-,J+]_R per site (= V_+ + V_-).
inline Mat eom_residual(const Basis& basis, const ModelParams& p, const SliceView& v) {
    const Mat dpjm = v.dp_jm(), dmjp = v.dm_jp();
    const int ns = int(v.state->jp.cols());
    Mat out(basis.dim, ns);
    for (int s = 0; s < ns; ++s)
        out.col(s) = v_plus_point(basis, p, v.state->jp.col(s), v.state->jm.col(s),
                                  dpjm.col(s)) +
                     v_minus_point(basis, p, v.state->jp.col(s), v.state->jm.col(s),
                                   dmjp.col(s));
    return out;
}

/// Bianchi residual d_+J_- + d_-J_+ + b[J-,RJ+] + b[J+,RJ-] + c[J-,J+]
/// per site (= V_+ - V_-).
inline Mat bianchi_residual(const Basis& basis, const ModelParams& p, const SliceView& v) {
    const Mat dpjm = v.dp_jm(), dmjp = v.dm_jp();
    const int ns = int(v.state->jp.cols());
    Mat out(basis.dim, ns);
    for (int s = 0; s < ns; ++s)
        out.col(s) = v_plus_point(basis, p, v.state->jp.col(s), v.state->jm.col(s),
                                  dpjm.col(s)) -
                     v_minus_point(basis, p, v.state->jp.col(s), v.state->jm.col(s),
                                   dmjp.col(s));
    return out;
}

inline std::pair<Mat, Mat> v_residuals(const Basis& basis, const ModelParams& p,
                                       const SliceView& v) {
    const Mat dpjm = v.dp_jm(), dmjp = v.dm_jp();
    const int ns = int(v.state->jp.cols());
    Mat vp(basis.dim, ns), vm(basis.dim, ns);
    for (int s = 0; s < ns; ++s) {
        vp.col(s) = v_plus_point(basis, p, v.state->jp.col(s), v.state->jm.col(s),
                                 dpjm.col(s));
        vm.col(s) = v_minus_point(basis, p, v.state->jp.col(s), v.state->jm.col(s),
                                  dmjp.col(s));
    }
    return {vp, vm};
}

/// Max eom residual over interior slices (diagnostic driver).
inline double max_eom_residual(const History& h) {
    double worst = 0.0;
    for (size_t k = 1; k + 1 < h.slices.size(); ++k)
        worst = std::max(worst, max_norm(eom_residual(*h.basis, h.params, slice_view(h, k))));
    return worst;
}

/// The g -> g^-1, alpha <-> beta map. On currents this is J_pm -> -Ad_g J_pm;
/// the returned state solves the swapped-parameter model whenever the input
/// solves the original one.
inline FieldState invert_solution(const Basis& basis, const FieldState& s) {
    FieldState out;
    out.tau = s.tau;
    const int ns = int(s.g.size());
    out.g.resize(size_t(ns));
    out.jp.resize(s.jp.rows(), ns);
    out.jm.resize(s.jm.rows(), ns);
    for (int site = 0; site < ns; ++site) {
        const Mat ad = adjoint_matrix(basis, s.g[size_t(site)]);
        out.g[size_t(site)] = s.g[size_t(site)].inverse();
        out.jp.col(site) = -(ad * s.jp.col(site));
        out.jm.col(site) = -(ad * s.jm.col(site));
    }
    return out;
}

inline History invert_solution(const History& h) {
    History out;
    out.basis = h.basis;
    out.ws = h.ws;
    out.params = h.params.swapped();
    out.dt = h.dt;
    out.slices.reserve(h.slices.size());
    for (const auto& s : h.slices)
        out.slices.push_back(invert_solution(*h.basis, s));
    return out;
}

}  // namespace byb
