#include <doctest.h>

#include <cmath>

#include "evf/linalg.hpp"

using namespace evf;

TEST_CASE("matvec basics") {
    Matrix m(2, 3);
    m(0, 0) = 1; m(0, 1) = 2; m(0, 2) = 3;
    m(1, 0) = 4; m(1, 1) = 5; m(1, 2) = 6;
    const Vector v{1, 0, -1};
    const Vector r = matvec(m, v);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-2.0));
    CHECK(r[1] == doctest::Approx(-2.0));

    const Vector u{1, -1};
    const Vector rt = matvec_t(m, u);
    REQUIRE(rt.size() == 3);
    CHECK(rt[0] == doctest::Approx(-3.0));
    CHECK(rt[1] == doctest::Approx(-3.0));
    CHECK(rt[2] == doctest::Approx(-3.0));
}

TEST_CASE("identity is a matvec fixed point") {
    const Matrix id = identity(4);
    const Vector v{2, -1, 0.5, 7};
    CHECK(matvec(id, v) == v);
    CHECK(matvec_t(id, v) == v);
}

TEST_CASE("accumulating variants add into the output") {
    Matrix m(2, 2);
    m(0, 0) = 1; m(1, 1) = 1;
    Vector out{10, 20};
    matvec_acc(m, Vector{1, 2}, out);
    CHECK(out == Vector{11, 22});
    matvec_t_acc(m, Vector{1, 2}, out);
    CHECK(out == Vector{12, 24});
}

TEST_CASE("add_outer is a rank-one update") {
    Matrix m(2, 3, 1.0);
    add_outer(m, Vector{1, 2}, Vector{3, 4, 5});
    CHECK(m(0, 0) == doctest::Approx(4.0));
    CHECK(m(0, 2) == doctest::Approx(6.0));
    CHECK(m(1, 0) == doctest::Approx(7.0));
    CHECK(m(1, 2) == doctest::Approx(11.0));
}

TEST_CASE("shape mismatches throw with both shapes named") {
    Matrix m(2, 3);
    CHECK_THROWS_AS(matvec(m, Vector{1, 2}), DimensionError);
    CHECK_THROWS_AS(matvec_t(m, Vector{1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(hadamard(Vector{1}, Vector{1, 2}), DimensionError);
}

TEST_CASE("sigmoid and tanh elementwise") {
    const Vector v{0.0, 1.0, -1.0};
    const Vector s = sigmoid(v);
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
    CHECK(s[1] + s[2] == doctest::Approx(1.0));  // sigmoid symmetry
    const Vector t = tanh_v(v);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == doctest::Approx(std::tanh(1.0)));
    CHECK(t[2] == doctest::Approx(-t[1]));
}

TEST_CASE("hadamard / dot / add_inplace") {
    CHECK(hadamard(Vector{1, 2, 3}, Vector{4, 5, 6}) == Vector{4, 10, 18});
    CHECK(dot(Vector{1, 2, 3}, Vector{4, 5, 6}) == doctest::Approx(32.0));
    Vector a{1, 1};
    add_inplace(a, Vector{2, 3});
    CHECK(a == Vector{3, 4});
}
