#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ddae/model.hpp"
#include "test_systems.hpp"

#include <random>

using namespace ddae;
using fixtures::mk;

namespace {

DdaeSystem plant_7_1_second() {
    // E = diag(1, 0) plant of the second static-feedback example
    DdaeSystem s;
    s.n = 2;
    s.delays = {};
    s.E = mk({{1, 0}, {0, 0}});
    s.A = {mk({{-0.1, -1}, {1, -1}})};
    s.B = mk({{0}, {1}});
    s.C = mk({{2, -1}});
    return s;
}

}  // namespace

TEST_CASE("validate: singular-E plant has nullity one and compressed block -1") {
    DdaeSystem s = plant_7_1_second();
    NullspaceBases b = validate(s);
    CHECK(b.nu == 1);
    // U and V span e2 (sign free)
    CHECK(std::abs(std::abs(b.U(1, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(b.U(0, 0)) < 1e-12);
    CHECK(std::abs(std::abs(b.V(1, 0)) - 1.0) < 1e-12);
    Mat a0vv = b.U.transpose() * s.A[0] * b.V;
    CHECK(std::abs(std::abs(a0vv(0, 0)) - 1.0) < 1e-12);

    CHECK((b.U.transpose() * s.E).norm() <= 1e-12 * s.E.norm());
    CHECK((s.E * b.V).norm() <= 1e-12 * s.E.norm());
    Mat Ufull(2, 2), Vfull(2, 2);
    Ufull << b.Uperp, b.U;
    Vfull << b.Vperp, b.V;
    CHECK((Ufull.transpose() * Ufull - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((Vfull.transpose() * Vfull - Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("validate: full-rank E is vacuously fine") {
    DdaeSystem s;
    s.n = 3;
    s.E = Mat::Identity(3, 3);
    s.A = {mk({{-1, 0, 0}, {0, -2, 0}, {0, 0, -3}})};
    s.B = Mat::Identity(3, 3);
    s.C = Mat::Identity(3, 3);
    NullspaceBases b = validate(s);
    CHECK(b.nu == 0);
    CHECK(b.U.cols() == 0);
}

TEST_CASE("validate: zero E with nilpotent A0 violates the index assumption") {
    DdaeSystem s;
    s.n = 2;
    s.E = Mat::Zero(2, 2);
    s.A = {mk({{0, 1}, {0, 0}})};
    s.B = mk({{1}, {0}});
    s.C = mk({{1, 0}});
    CHECK_THROWS_AS(validate(s), AssumptionOneViolated);
}

TEST_CASE("validate: input screening") {
    DdaeSystem s = fixtures::benchmark_loop();
    s.delays[0] = -1.0;
    CHECK_THROWS_AS(validate(s), NonpositiveDelay);
    s = fixtures::benchmark_loop();
    s.B = Mat::Zero(3, 1);
    CHECK_THROWS_AS(validate(s), DimensionMismatch);
}

TEST_CASE("partition: scalar blocks of the singular-E plant") {
    DdaeSystem s = plant_7_1_second();
    NullspaceBases b = validate(s);
    PartitionedSystem p = partition(s, b);
    CHECK(p.A22[0].rows() == 1);
    CHECK(p.A22[0](0, 0) == doctest::Approx(-1.0));
    CHECK(std::abs(p.B2(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(p.C2(0, 0)) == doctest::Approx(1.0));
    CHECK(p.E11.rows() == 1);
}

TEST_CASE("partition: full-rank system keeps E in the (1,1) block") {
    DdaeSystem s;
    s.n = 2;
    s.E = mk({{2, 0}, {0, 3}});
    s.A = {mk({{-1, 0}, {0, -1}})};
    s.B = mk({{1}, {1}});
    s.C = mk({{1, 1}});
    NullspaceBases b = validate(s);
    PartitionedSystem p = partition(s, b);
    CHECK(p.A22[0].size() == 0);
    // E11 equals E up to the orthogonal change of basis from the SVD
    CHECK(p.E11.rows() == 2);
    Eigen::JacobiSVD<Mat> s1(p.E11), s2(s.E);
    CHECK((s1.singularValues() - s2.singularValues()).norm() < 1e-12);
}

TEST_CASE("partition: reassembly identity on a random rank-3 system") {
    std::mt19937 rng(42);
    std::normal_distribution<double> g;
    Mat L(4, 3), R(3, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) { L(i, j) = g(rng); R(j, i) = g(rng); }
    DdaeSystem s;
    s.n = 4;
    s.delays = {0.7};
    s.E = L * R;  // rank 3
    Mat A0(4, 4), A1(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) { A0(i, j) = g(rng); A1(i, j) = g(rng); }
    s.A = {A0, A1};
    s.B = Mat::Identity(4, 4);
    s.C = Mat::Identity(4, 4);
    NullspaceBases b = validate(s);
    CHECK(b.nu == 1);
    PartitionedSystem p = partition(s, b);
    Mat Ufull(4, 4), Vfull(4, 4);
    Ufull << b.Uperp, b.U;
    Vfull << b.Vperp, b.V;
    for (std::size_t i = 0; i < s.A.size(); ++i) {
        Mat blocks = Ufull.transpose() * s.A[i] * Vfull;
        CHECK((blocks.topLeftCorner(3, 3) - p.A11[i]).norm() < 1e-12);
        CHECK((blocks.topRightCorner(3, 1) - p.A12[i]).norm() < 1e-12);
        CHECK((blocks.bottomLeftCorner(1, 3) - p.A21[i]).norm() < 1e-12);
        CHECK((blocks.bottomRightCorner(1, 1) - p.A22[i]).norm() < 1e-12);
    }
}

TEST_CASE("transfer: benchmark loop values") {
    DdaeSystem s = fixtures::benchmark_loop();
    CHECK(std::abs(transfer(s, Complex(0.0, 1.6555))(0, 0)) == doctest::Approx(2.5788).epsilon(5e-3 / 2.5788));
    CHECK(std::abs(transfer(s, Complex(0.0, 0.0))(0, 0)) == doctest::Approx(2.1 / 1.125).epsilon(1e-12));
    DdaeSystem z = s;
    z.B.setZero();
    CHECK(transfer(z, Complex(0.0, 1.0)).norm() == 0.0);
}

TEST_CASE("transfer: singular lambda is reported") {
    // x' = x - 2 x(t-1): lambda = 0 solves 0 = -A0 - A1 ... only if 1 - 2 = -lambda...
    DdaeSystem s;
    s.n = 1;
    s.delays = {};
    s.E = mk({{1}});
    s.A = {mk({{2}})};
    s.B = mk({{1}});
    s.C = mk({{1}});
    CHECK_THROWS_AS(transfer(s, Complex(2.0, 0.0)), SingularAtLambda);
}

TEST_CASE("transfer_partitioned agrees with transfer on random imaginary points") {
    DdaeSystem s = fixtures::benchmark_loop();
    NullspaceBases b = validate(s);
    PartitionedSystem p = partition(s, b);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int k = 0; k < 20; ++k) {
        Complex lam(0.0, u(rng));
        CMat t1 = transfer(s, lam);
        CMat t2 = transfer_partitioned(p, lam, s.delays);
        CHECK((t1 - t2).norm() <= 1e-10 * std::max(1.0, t1.norm()));
    }
}

TEST_CASE("transfer_partitioned: nu = 0 reduction") {
    DdaeSystem s;
    s.n = 2;
    s.delays = {1.0};
    s.E = Mat::Identity(2, 2);
    s.A = {mk({{-1, 1}, {0, -2}}), mk({{0, 0.3}, {0.1, 0}})};
    s.B = mk({{1}, {0}});
    s.C = mk({{0, 1}});
    NullspaceBases b = validate(s);
    PartitionedSystem p = partition(s, b);
    for (double w : {0.0, 0.5, 2.0}) {
        CMat t1 = transfer(s, Complex(0.0, w));
        CMat t2 = transfer_partitioned(p, Complex(0.0, w), s.delays);
        CHECK((t1 - t2).norm() < 1e-12);
    }
}

TEST_CASE("transfer matches the eliminated scalar form of the two-gain loop") {
    DdaeSystem s = fixtures::benchmark_loop();
    for (double w : {0.5, 1.0, 1.6555}) {
        const Complex lam(0.0, w);
        CHECK(std::abs(transfer(s, lam)(0, 0)) ==
              doctest::Approx(fixtures::benchmark_loop_abs(lam)).epsilon(1e-12));
    }
}

TEST_CASE("sigma_sweep: benchmark loop bounded by the strong norm") {
    DdaeSystem s = fixtures::benchmark_loop();
    std::vector<double> grid;
    for (int i = 0; i < 2000; ++i)
        grid.push_back(std::pow(10.0, -2.0 + 5.0 * i / 1999.0));
    SigmaCurve c = sigma_sweep(s, grid, 1);
    double mx = 0;
    for (const auto& sv : c.sigma)
        if (!sv.empty()) mx = std::max(mx, sv[0]);
    CHECK(mx <= 4.0 + 1e-9);
    CHECK(mx >= 2.57);
}

TEST_CASE("sigma_sweep: delay-free system matches a direct resolvent SVD") {
    DdaeSystem s;
    s.n = 2;
    s.E = Mat::Identity(2, 2);
    s.A = {mk({{-1, 2}, {0, -3}})};
    s.B = mk({{1, 0}, {1, 1}});
    s.C = mk({{1, 0}, {0, 1}});
    std::vector<double> grid{0.0, 0.3, 1.0, 10.0};
    SigmaCurve c = sigma_sweep(s, grid, 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CMat R = (Complex(0.0, grid[i]) * Mat::Identity(2, 2).cast<Complex>() - s.A[0].cast<Complex>());
        CMat T = s.C.cast<Complex>() * R.inverse() * s.B.cast<Complex>();
        Vec sv = T.jacobiSvd().singularValues();
        CHECK(c.sigma[i][0] == doctest::Approx(sv(0)).epsilon(1e-12));
        CHECK(c.sigma[i][1] == doctest::Approx(sv(1)).epsilon(1e-12));
    }
}

TEST_CASE("sigma_sweep: zero output gives zero sigmas") {
    DdaeSystem s = fixtures::benchmark_loop();
    s.C.setZero();
    SigmaCurve c = sigma_sweep(s, {0.1, 1.0}, 1);
    CHECK(c.sigma[0][0] == 0.0);
    CHECK(c.sigma[1][0] == 0.0);
}

TEST_CASE("conjugate symmetry of the frequency response") {
    DdaeSystem s = fixtures::benchmark_loop();
    for (double w : {0.4, 1.7, 9.0}) {
        CMat tp = transfer(s, Complex(0.0, w));
        CMat tm = transfer(s, Complex(0.0, -w));
        CHECK((tm - tp.conjugate()).norm() < 1e-13);
    }
}
