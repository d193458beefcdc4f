#pragma once

#include <array>

#include "hflat/types.hpp"

namespace hflat {

// 2x2 complex matrix, row major.
struct Mat2 {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2 identity() { return {}; }
    static Mat2 diag(cplx x, cplx y) { return {x, 0.0, 0.0, y}; }

    cplx det() const { return a * d - b * c; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                c * o.b + d * o.d};
    }
    Mat2 operator*(cplx s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator+(const Mat2& o) const {
        return {a + o.a, b + o.b, c + o.c, d + o.d};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a - o.a, b - o.b, c - o.c, d - o.d};
    }
    Mat2 inverse() const {
        cplx dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2 conj_transpose() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    double norm_inf() const;
};

// max entrywise distance, up to an overall sign (PSL comparison)
double psl_distance(const Mat2& x, const Mat2& y);
double entry_distance(const Mat2& x, const Mat2& y);

// the dual factor (0 i; i 0)
Mat2 dual_factor();
// e3 = diag(1,-1)
Mat2 e3();

// Point of H^3 in the 2x2 Hermitian matrix picture.
struct H3Point {
    Mat2 X;  // Hermitian, det 1, positive trace

    // Minkowski coordinates (x0, x1, x2, x3), signature (-,+,+,+)
    std::array<double, 4> minkowski() const;
    void validate(double tol = 1e-8) const;
};

// Unit normal in de Sitter space, same picture (Hermitian, det -1).
struct NormalVector {
    Mat2 N;
    std::array<double, 4> minkowski() const;
    void validate(double tol = 1e-8) const;
};

// Minkowski inner product of Hermitian matrices (signature (-,+,+,+)).
double lorentz_inner(const Mat2& X, const Mat2& Y);

// f = E E*, nu = E e3 E*.  Invariant under E -> -E.
H3Point project_point(const Mat2& E);
NormalVector project_normal(const Mat2& E);

// Hyperboloid -> Poincare ball, (x1,x2,x3)/(1+x0).
std::array<double, 3> ball_project(const H3Point& x);

// Mobius action a*G on boundary values, with infinity handled.
cplx mobius_apply(const Mat2& a, cplx g);

// Geodesic point (cosh t) f + (sinh t) nu, as a Hermitian matrix.
H3Point geodesic_point(const H3Point& f, const NormalVector& nu, double t);

}  // namespace hflat
