#include <catch2/catch_amalgamated.hpp>

#include "byb/group.hpp"
#include "support/oracles.hpp"

using namespace byb;

namespace {
RealElement rand_elem(oracle::Rng& rng, const Basis& b, double scale = 1.0) {
    return {oracle::random_coeffs(rng, b.dim, scale), &b};
}
}  // namespace

TEST_CASE("matrix exponential") {
    oracle::Rng rng(21);
    auto su2 = build_cartan_weyl(2);

    CHECK(max_norm(CMat(exp_map(CMat(CMat::Zero(2, 2))) - CMat::Identity(2, 2))) == 0.0);

    // Pauli closed-form oracle: exp(i pi sigma3 / 2) squares to -I
    const CMat q = exp_map(CMat(kI * (M_PI / 2.0) * oracle::pauli(3)));
    CHECK(max_norm(CMat(q * q + CMat::Identity(2, 2))) < 1e-13);

    for (int t = 0; t < 25; ++t) {
        const double theta = rng.uniform(-3.0, 3.0);
        Vec ax(3);
        ax << rng.normal(), rng.normal(), rng.normal();
        ax /= ax.norm();
        const CMat x = kI * theta * (ax[0] * oracle::pauli(1) + ax[1] * oracle::pauli(2) +
                                     ax[2] * oracle::pauli(3));
        CHECK(max_norm(CMat(exp_map(x) - oracle::pauli_exp(theta, ax[0], ax[1], ax[2]))) <
              1e-13);
    }

    for (int n : {2, 3}) {
        auto basis = build_cartan_weyl(n);
        for (int t = 0; t < 20; ++t) {
            const RealElement x = rand_elem(rng, *basis);
            const CMat g = exp_map(x);
            CHECK(unitarity_defect(g) < 1e-12);
            CHECK(det_defect(g) < 1e-12);
            const CMat gm = exp_map(RealElement{Vec(-x.coeffs), basis.get()});
            CHECK(max_norm(CMat(g * gm - CMat::Identity(n, n))) < 1e-12);
        }
    }
}

TEST_CASE("adjoint action") {
    oracle::Rng rng(22);
    for (int n : {2, 3}) {
        auto basis = build_cartan_weyl(n);
        const CMat id = CMat::Identity(n, n);
        for (int t = 0; t < 20; ++t) {
            const RealElement x = rand_elem(rng, *basis);
            const RealElement y = rand_elem(rng, *basis);
            CHECK(max_norm(Vec(adjoint_action(*basis, id, x).coeffs - x.coeffs)) < 1e-14);

            const CMat g = exp_map(rand_elem(rng, *basis));
            const RealElement gx = adjoint_action(*basis, g, x);
            const RealElement gy = adjoint_action(*basis, g, y);
            CHECK(std::abs(inner(gx, gy) - inner(x, y)) < 1e-12);

            // matrix of Ad_g against the element-wise route
            const Mat ad = adjoint_matrix(*basis, g);
            CHECK(max_norm(Vec(ad * x.coeffs - gx.coeffs)) < 1e-12);
        }

        // torus elements fix the Cartan subalgebra
        Vec h = Vec::Zero(basis->dim);
        for (int mu = 0; mu < basis->n_cartan; ++mu)
            h[mu] = rng.normal();
        const CMat torus = exp_map(RealElement{h, basis.get()});
        for (int mu = 0; mu < basis->n_cartan; ++mu) {
            RealElement t{Vec::Unit(basis->dim, mu), basis.get()};
            CHECK(max_norm(Vec(adjoint_action(*basis, torus, t).coeffs - t.coeffs)) <
                  1e-12);
        }
    }
}

TEST_CASE("dressed operator") {
    oracle::Rng rng(23);
    for (int n : {2, 3}) {
        auto basis = build_cartan_weyl(n);
        const LinearOp r = canonical_R(*basis);

        const LinearOp r_id = dressed_R(r, CMat(CMat::Identity(n, n)));
        CHECK(max_norm(Mat(r_id.mat - r.mat)) < 1e-14);

        // skewness is preserved by dressing with unitary g
        for (int t = 0; t < 10; ++t) {
            const CMat g = exp_map(rand_elem(rng, *basis));
            const LinearOp rg = dressed_R(r, g);
            CHECK(max_norm(Mat(rg.mat + rg.mat.transpose())) < 1e-12);
        }

        // torus dressing still kills Cartan directions
        Vec h = Vec::Zero(basis->dim);
        for (int mu = 0; mu < basis->n_cartan; ++mu)
            h[mu] = rng.normal();
        const LinearOp rt = dressed_R(r, exp_map(RealElement{h, basis.get()}));
        for (int mu = 0; mu < basis->n_cartan; ++mu)
            CHECK(max_norm(Vec(rt.mat * Vec::Unit(basis->dim, mu))) < 1e-12);
    }
}

TEST_CASE("iwasawa decomposition") {
    oracle::Rng rng(24);

    // identity, AN and unitary inputs are fixed points of the two factors
    {
        const auto [b, u] = iwasawa(CMat(CMat::Identity(2, 2)));
        CHECK(max_norm(CMat(b.matrix - CMat::Identity(2, 2))) < 1e-14);
        CHECK(max_norm(CMat(u.matrix - CMat::Identity(2, 2))) < 1e-14);
    }
    {
        CMat an(2, 2);
        an << 2.0, Complex(0.3, 0.7), 0.0, 0.5;
        const auto [b, u] = iwasawa(an);
        CHECK(max_norm(CMat(b.matrix - an)) < 1e-13);
        CHECK(max_norm(CMat(u.matrix - CMat::Identity(2, 2))) < 1e-13);
    }
    {
        auto su2 = build_cartan_weyl(2);
        const CMat g = exp_map(rand_elem(rng, *su2));
        const auto [b, u] = iwasawa(g);
        CHECK(max_norm(CMat(b.matrix - CMat::Identity(2, 2))) < 1e-12);
        CHECK(max_norm(CMat(u.matrix - g)) < 1e-12);
    }

    // round trip + validity on random SL(n,C), n = 2 and 3
    for (int n : {2, 3}) {
        for (int t = 0; t < 1000; ++t) {
            const CMat l = oracle::random_sl(rng, n);
            CMat b, u;
            try {
                auto [bb, uu] = iwasawa(l);
                b = bb.matrix;
                u = uu.matrix;
                CHECK(bb.triangularity_defect() < 1e-13);
                CHECK(bb.diagonal_defect() < 1e-12);
                CHECK(std::abs(b.determinant() - 1.0) < 1e-10);
            } catch (const ConditioningError&) {
                continue;  // Ginibre samples can be arbitrarily ill-conditioned
            }
            CHECK(max_norm(CMat(b * u - l)) < 1e-12);
            CHECK(unitarity_defect(u) < 1e-12);

            // agreement with the Gram-Schmidt oracle
            const auto [bo, uo] = oracle::iwasawa_gram_schmidt(l);
            CHECK(max_norm(CMat(b - bo)) < 1e-10);
            CHECK(max_norm(CMat(u - uo)) < 1e-10);
        }
    }

    // conditioning guard
    CMat sick(2, 2);
    sick << 1e7, 0.0, 0.0, 1e-7;
    CHECK_THROWS_AS(iwasawa(sick), ConditioningError);
}

TEST_CASE("(R - i) homomorphism machinery") {
    oracle::Rng rng(25);
    for (int n : {2, 3}) {
        auto basis = build_cartan_weyl(n);
        const LinearOp r = canonical_R(*basis);

        // xi = H^mu (Hermitian Cartan) -> K = T^mu
        for (int mu = 0; mu < basis->n_cartan; ++mu) {
            const CMat h = -kI * basis->mats[mu];  // T = iH, so H = -i T
            const CVec xi = detail::coeffs_of(*basis, h);
            const Vec k = invert_R_minus_i(*basis, xi);
            CHECK(max_norm(Vec(k - Vec::Unit(basis->dim, mu))) < 1e-13);
        }
        // xi = sqrt2 E^a -> K = B^a
        for (int a = 0; a < int(basis->roots.size()); ++a) {
            const CVec xi =
                detail::coeffs_of(*basis, CMat(std::sqrt(2.0) * basis->step_plus[a]));
            const Vec k = invert_R_minus_i(*basis, xi);
            CHECK(max_norm(Vec(k - Vec::Unit(basis->dim, basis->b_index(a)))) < 1e-13);
        }
        // xi = 0 -> K = 0
        CHECK(max_norm(invert_R_minus_i(*basis, CVec(CVec::Zero(basis->dim)))) == 0.0);

        for (int t = 0; t < 100; ++t) {
            const Vec k = oracle::random_coeffs(rng, basis->dim);
            const CVec xi = r_minus_i_apply(*basis, k);
            // injectivity: inversion recovers k
            CHECK(max_norm(Vec(invert_R_minus_i(*basis, xi) - k)) < 1e-12);
            // image lands in Lie(AN): upper triangular with real diagonal
            const CMat m = detail::matrix_of(*basis, xi);
            CHECK(max_norm(CMat(m - project_an(m))) < 1e-12);

            // homomorphism: (R-i)[X,Y]_R = [(R-i)X, (R-i)Y]
            const Vec x = oracle::random_coeffs(rng, basis->dim);
            const Vec y = oracle::random_coeffs(rng, basis->dim);
            const CVec lhs = r_minus_i_apply(
                *basis, Vec(detail::r_bracket_vec<double>(*basis, r.mat, x, y)));
            const CVec rhs = detail::bracket_vec<Complex>(
                *basis, CVec(r_minus_i_apply(*basis, x)), CVec(r_minus_i_apply(*basis, y)));
            CHECK(max_norm(CVec(lhs - rhs)) < 1e-12);
        }

        // membership error for an element outside the image
        CVec bad = CVec::Zero(basis->dim);
        bad[basis->b_index(0)] = 1.0;  // B^a alone is not in (R-i)G
        CHECK_THROWS_AS(invert_R_minus_i(*basis, bad), SubspaceMembershipError);

        // image characterization: any traceless upper-triangular matrix with
        // real diagonal is in the image
        for (int t = 0; t < 20; ++t) {
            CMat z = CMat::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    z(i, j) = Complex(rng.normal(), rng.normal());
            Vec diag(n);
            double sum = 0.0;
            for (int i = 0; i < n - 1; ++i) {
                diag[i] = rng.normal();
                sum += diag[i];
            }
            diag[n - 1] = -sum;
            for (int i = 0; i < n; ++i)
                z(i, i) = diag[i];
            const CVec xi = detail::coeffs_of(*basis, z);
            CHECK(r_minus_i_membership_residual(*basis, xi) < 1e-12);
            const Vec k = invert_R_minus_i(*basis, xi);
            CHECK(max_norm(CVec(r_minus_i_apply(*basis, k) - xi)) < 1e-12);
        }
    }
}

TEST_CASE("sl(n,C) splits into Lie(AN) + su(n)") {
    oracle::Rng rng(26);
    for (int n : {2, 3}) {
        for (int t = 0; t < 50; ++t) {
            CMat z(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    z(i, j) = Complex(rng.normal(), rng.normal());
            const CMat su = project_su(z);
            const CMat an = project_an(z);
            CHECK(max_norm(CMat(su + an - z)) < 1e-14);
            CHECK(max_norm(CMat(su + su.adjoint())) < 1e-14);
            for (int i = 0; i < n; ++i) {
                CHECK(std::abs(an(i, i).imag()) < 1e-14);
                for (int j = 0; j < i; ++j)
                    CHECK(std::abs(an(i, j)) < 1e-14);
            }
        }
    }
}
