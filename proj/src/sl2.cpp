#include "hflat/sl2.hpp"

#include <algorithm>
#include <cmath>

namespace hflat {

double Mat2::norm_inf() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

double entry_distance(const Mat2& x, const Mat2& y) {
    return (x - y).norm_inf();
}

double psl_distance(const Mat2& x, const Mat2& y) {
    return std::min(entry_distance(x, y), entry_distance(x, y * cplx(-1.0)));
}

Mat2 dual_factor() { return {0.0, kI, kI, 0.0}; }
Mat2 e3() { return {1.0, 0.0, 0.0, -1.0}; }

std::array<double, 4> herm_minkowski(const Mat2& X) {
    // X = (x0+x3, x1+ix2; x1-ix2, x0-x3)
    double x0 = 0.5 * (X.a.real() + X.d.real());
    double x3 = 0.5 * (X.a.real() - X.d.real());
    double x1 = X.b.real();
    double x2 = X.b.imag();
    return {x0, x1, x2, x3};
}

std::array<double, 4> H3Point::minkowski() const { return herm_minkowski(X); }
std::array<double, 4> NormalVector::minkowski() const {
    return herm_minkowski(N);
}

void H3Point::validate(double tol) const {
    if (std::abs(X.b - std::conj(X.c)) > tol ||
        std::abs(X.a.imag()) > tol || std::abs(X.d.imag()) > tol)
        fail(ErrorCode::InvalidPoint, "H3 point is not Hermitian");
    if (std::abs(X.det() - 1.0) > tol)
        fail(ErrorCode::InvalidPoint, "H3 point determinant is not 1");
    if ((X.a + X.d).real() <= 0.0)
        fail(ErrorCode::InvalidPoint, "H3 point has non-positive trace");
}

void NormalVector::validate(double tol) const {
    if (std::abs(N.b - std::conj(N.c)) > tol ||
        std::abs(N.a.imag()) > tol || std::abs(N.d.imag()) > tol)
        fail(ErrorCode::InvalidPoint, "normal is not Hermitian");
    if (std::abs(N.det() + 1.0) > tol)
        fail(ErrorCode::InvalidPoint, "normal determinant is not -1");
}

double lorentz_inner(const Mat2& X, const Mat2& Y) {
    auto x = herm_minkowski(X);
    auto y = herm_minkowski(Y);
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}

H3Point project_point(const Mat2& E) {
    return H3Point{E * E.conj_transpose()};
}

NormalVector project_normal(const Mat2& E) {
    return NormalVector{E * e3() * E.conj_transpose()};
}

std::array<double, 3> ball_project(const H3Point& x) {
    x.validate(1e-6);
    auto m = x.minkowski();
    double s = 1.0 + m[0];
    std::array<double, 3> v{m[1] / s, m[2] / s, m[3] / s};
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n >= 1.0)
        fail(ErrorCode::InvalidPoint, "ball projection left the unit ball");
    return v;
}

cplx mobius_apply(const Mat2& a, cplx g) {
    bool at_inf = !std::isfinite(g.real()) || !std::isfinite(g.imag());
    cplx num = at_inf ? a.a : a.a * g + a.b;
    cplx den = at_inf ? a.c : a.c * g + a.d;
    if (std::abs(den) == 0.0)
        return cplx(INFINITY, INFINITY);
    return num / den;
}

H3Point geodesic_point(const H3Point& f, const NormalVector& nu, double t) {
    Mat2 X = f.X * cplx(std::cosh(t)) + nu.N * cplx(std::sinh(t));
    return H3Point{X};
}

}  // namespace hflat
