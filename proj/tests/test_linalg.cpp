#include <catch2/catch_amalgamated.hpp>

#include <qrouter/linalg.hpp>

using namespace qrouter;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix fixed_matrix(int n, unsigned seed) {
    // deterministic pseudo-random entries, no RNG state shared across tests
    CMatrix m(n, n);
    unsigned s = seed;
    auto next = [&s] {
        s = s * 1664525u + 1013904223u;
        return double(s % 10007u) / 10007.0 - 0.5;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(next(), next());
    return m;
}

CMatrix fixed_psd(int n, unsigned seed) {
    const CMatrix a = fixed_matrix(n, seed);
    return a * a.adjoint();
}

}  // namespace

TEST_CASE("kron dimensions and entries") {
    CMatrix a(2, 2), b(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    b << 0.0, Complex(0.0, 1.0), 5.0, 6.0;
    const CMatrix k = kron(a, b);
    REQUIRE(k.rows() == 4);
    REQUIRE(k.cols() == 4);
    CHECK(k(0, 1) == Complex(0.0, 1.0));   // a00 * b01
    CHECK(k(1, 0) == Complex(5.0, 0.0));   // a00 * b10
    CHECK(k(3, 2) == Complex(20.0, 0.0));  // a11 * b10
    CHECK(k(2, 3) == Complex(0.0, 4.0));   // a11 * b01
}

TEST_CASE("kron mixed-product identity") {
    const CMatrix a = fixed_matrix(2, 1), b = fixed_matrix(3, 2),
                  c = fixed_matrix(2, 3), d = fixed_matrix(3, 4);
    const CMatrix lhs = kron(a, b) * kron(c, d);
    const CMatrix rhs = kron(CMatrix(a * c), CMatrix(b * d));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("herm_eig on a known 2x2") {
    CMatrix h(2, 2);
    h << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 1.0;
    const EigenSystem es = herm_eig(h);
    CHECK_THAT(es.values[0], WithinAbs(2.0, 1e-12));  // descending
    CHECK_THAT(es.values[1], WithinAbs(0.0, 1e-12));
    const CMatrix rec = es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
    CHECK((rec - h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(herm_eig(m), NonHermitianInput);
}

TEST_CASE("max_asymmetry vanishes for Hermitian matrices") {
    const CMatrix h = fixed_psd(5, 7);
    CHECK(max_asymmetry(h) < 1e-14);
    CMatrix m = h;
    m(0, 1) += Complex(0.0, 1e-3);
    CHECK(max_asymmetry(m) > 1e-4);
}

TEST_CASE("psd_sqrt of a diagonal matrix") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const CMatrix s = psd_sqrt(d);
    CHECK_THAT(s(0, 0).real(), WithinAbs(2.0, 1e-12));
    CHECK_THAT(s(1, 1).real(), WithinAbs(3.0, 1e-12));
    CHECK(std::abs(s(0, 1)) < 1e-13);
}

TEST_CASE("psd_sqrt squares back to the input") {
    const CMatrix m = fixed_psd(6, 11);
    const CMatrix s = psd_sqrt(m);
    CHECK((s * s - m).cwiseAbs().maxCoeff() < 1e-10 * m.norm());
}

TEST_CASE("psd_sqrt clamps round-off negatives and rejects real ones") {
    CMatrix tiny = CMatrix::Zero(2, 2);
    tiny(0, 0) = -1e-9;  // round-off scale: clamped to zero
    tiny(1, 1) = 1.0;
    const CMatrix s = psd_sqrt(tiny);
    CHECK_THAT(s(1, 1).real(), WithinAbs(1.0, 1e-12));
    CHECK(std::abs(s(0, 0)) < 1e-4);

    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = -0.5;
    neg(1, 1) = 1.0;
    CHECK_THROWS_AS(psd_sqrt(neg), NegativeSpectrum);
}

TEST_CASE("vec uses column stacking") {
    CMatrix m(2, 2);
    m << 1.0, 3.0, 2.0, 4.0;  // columns (1,2) and (3,4)
    const CVector v = vec(m);
    CHECK(v[0] == Complex(1.0));
    CHECK(v[1] == Complex(2.0));
    CHECK(v[2] == Complex(3.0));
    CHECK(v[3] == Complex(4.0));
    const CMatrix back = unvec(v);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("superoperators implement left and right multiplication") {
    const CMatrix a = fixed_matrix(3, 21), b = fixed_matrix(3, 22),
                  x = fixed_matrix(3, 23);
    const CVector lhs = superop_left(a) * superop_right(b) * vec(x);
    const CMatrix rhs = a * x * b;
    CHECK((unvec(lhs, 3, 3) - rhs).cwiseAbs().maxCoeff() < 1e-12);
}
