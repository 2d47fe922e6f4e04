// Reference computations that share no code path with the spectral models.
// The acceptance suite and the unit tests compare against these.
#ifndef FRACCAL_ORACLES_HPP
#define FRACCAL_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"

namespace fraccal::oracle
{

// Flat-torus heat kernel as a periodized Gaussian (image sum); terms are
// added until the Gaussian weight drops below 1e-20 of the leading one.
inline double torus_heat_image_sum(double L1, double L2, const Point& x, const Point& y, double t)
{
    const double reach = std::sqrt(4.0 * t * 46.0);
    const int n1       = static_cast<int>(std::ceil(reach / L1)) + 1;
    const int n2       = static_cast<int>(std::ceil(reach / L2)) + 1;
    const double dx    = x[0] - y[0];
    const double dy    = x[1] - y[1];
    double sum         = 0.0;
    for (int i = -n1; i <= n1; ++i)
    {
        for (int j = -n2; j <= n2; ++j)
        {
            const double a = dx + i * L1;
            const double b = dy + j * L2;
            sum += std::exp(-(a * a + b * b) / (4.0 * t));
        }
    }
    return sum / (4.0 * pi * t);
}

// Circle of radius r: periodized one-dimensional Gaussian in arc length.
inline double circle_heat_image_sum(double r, double theta, double phi, double t)
{
    const double L = 2.0 * pi * r;
    const int n    = static_cast<int>(std::ceil(std::sqrt(4.0 * t * 46.0) / L)) + 1;
    double sum     = 0.0;
    for (int i = -n; i <= n; ++i)
    {
        const double a = r * (theta - phi) + i * L;
        sum += std::exp(-a * a / (4.0 * t));
    }
    return sum / std::sqrt(4.0 * pi * t);
}

// A^{-alpha} f on the complement of the constants, from a full symmetric
// eigendecomposition of the dense matrix.
inline Eigen::VectorXd dense_fractional_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& f, double alpha)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::VectorXd c        = v.transpose() * f;
    for (Eigen::Index i = 0; i < c.size(); ++i)
    {
        const double lam = eig.eigenvalues()(i);
        c(i)             = lam > 1e-10 ? c(i) * std::pow(lam, -alpha) : 0.0;
    }
    return v * c;
}

// exp(-tA) f by a scaled-and-squared Taylor series.
inline Eigen::VectorXd dense_heat(const Eigen::MatrixXd& a, const Eigen::VectorXd& f, double t)
{
    const double norm = (t * a).cwiseAbs().rowwise().sum().maxCoeff();
    int squarings     = 0;
    while (norm / std::pow(2.0, squarings) > 0.5)
    {
        ++squarings;
    }
    const Eigen::MatrixXd m = -(t / std::pow(2.0, squarings)) * a;
    Eigen::MatrixXd e       = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd term    = e;
    for (int k = 1; k <= 30; ++k)
    {
        term = term * m / static_cast<double>(k);
        e += term;
    }
    for (int s = 0; s < squarings; ++s)
    {
        e = e * e;
    }
    return e * f;
}

// Leapfrog for u'' + A u = F(t), u(0) = u'(0) = 0, sampled every `stride`
// steps; returns one column per sample (the first at t = 0).
inline Eigen::MatrixXd leapfrog(const Eigen::MatrixXd& a, const std::function<Eigen::VectorXd(double)>& force,
                                double dt, int steps, int stride)
{
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd out(n, steps / stride + 1);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
    // Second-order start: u(dt) = dt^2/2 F(0) + dt^3/6 F'(0).
    const double h       = 1e-6;
    Eigen::VectorXd cur  = 0.5 * dt * dt * force(0.0) + dt * dt * dt / 6.0 * (force(h) - force(0.0)) / h;
    out.col(0)           = prev;
    for (int s = 1; s <= steps; ++s)
    {
        if (s % stride == 0)
        {
            out.col(s / stride) = cur;
        }
        const Eigen::VectorXd next = 2.0 * cur - prev + dt * dt * (force(s * dt) - a * cur);
        prev                       = cur;
        cur                        = next;
    }
    return out;
}

// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50)
{
    const std::function<double(double, double, double, double, double, double, double, int)> step =
        [&](double l, double r, double fl, double fm, double fr, double whole, double eps, int d) {
            const double m    = 0.5 * (l + r);
            const double lm   = 0.5 * (l + m);
            const double rm   = 0.5 * (m + r);
            const double flm  = f(lm);
            const double frm  = f(rm);
            const double left = (m - l) / 6.0 * (fl + 4.0 * flm + fm);
            const double rght = (r - m) / 6.0 * (fm + 4.0 * frm + fr);
            if (d <= 0 || std::abs(left + rght - whole) <= 15.0 * eps)
            {
                return left + rght + (left + rght - whole) / 15.0;
            }
            return step(l, m, fl, flm, fm, left, 0.5 * eps, d - 1) + step(m, r, fm, frm, fr, rght, 0.5 * eps, d - 1);
        };
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return step(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

} // namespace fraccal::oracle

#endif
