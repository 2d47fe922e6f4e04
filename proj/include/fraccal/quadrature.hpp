///
/// \file quadrature.hpp
///
/// Gauss rules built by the Golub-Welsch algorithm, plus the two composite
/// schemes the operator formulas need:
///
///  - QuadratureScheme: integrals of the form
///    \f$ \int_0^\infty g(t)\, t^{\alpha-1}\, dt \f$ where g decays at least
///    like \f$ e^{-\lambda_1 t} \f$.
///  - OscillatoryScheme: Gaussian-weighted integrals of oscillating
///    integrands on \f$ [0, \infty) \f$.
///
#ifndef FRACCAL_QUADRATURE_HPP
#define FRACCAL_QUADRATURE_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace fraccal
{

/// Nodes and weights of a quadrature rule.
struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const
    {
        return nodes.size();
    }

    template <typename F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            sum += weights[i] * f(nodes[i]);
        }
        return sum;
    }

    void append(const QuadratureRule& other)
    {
        nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }
};

///
/// Gauss-Jacobi rule on [-1, 1] for the weight \f$ (1-x)^a (1+x)^b \f$,
/// a, b > -1, from the eigen-decomposition of the Jacobi matrix.
///
inline QuadratureRule gauss_jacobi(int n, double a, double b)
{
    if (n < 1)
    {
        throw InvalidArgument("gauss_jacobi: node count must be positive");
    }
    if (!(a > -1.0) || !(b > -1.0))
    {
        throw InvalidArgument("gauss_jacobi: exponents must exceed -1");
    }
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 1));
    const double ab = a + b;
    for (int k = 0; k < n; ++k)
    {
        const double s = 2.0 * k + ab;
        if (k == 0)
        {
            diag(k) = (b - a) / (ab + 2.0);
        }
        else
        {
            diag(k) = (b * b - a * a) / (s * (s + 2.0));
        }
        if (k + 1 < n)
        {
            const double m = k + 1.0;
            const double sm = 2.0 * m + ab;
            sub(k) = std::sqrt(4.0 * m * (m + a) * (m + b) * (m + ab) /
                               (sm * sm * (sm + 1.0) * (sm - 1.0)));
        }
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                                std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1)
    {
        rule.nodes[0]   = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int k = 0; k < n; ++k)
    {
        rule.nodes[k]   = solver.eigenvalues()(k);
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

inline QuadratureRule gauss_legendre(int n)
{
    return gauss_jacobi(n, 0.0, 0.0);
}

/// Gauss-Legendre rule mapped to [lo, hi].
inline QuadratureRule gauss_legendre(int n, double lo, double hi)
{
    QuadratureRule rule = gauss_legendre(n);
    const double half   = 0.5 * (hi - lo);
    const double mid    = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.size(); ++i)
    {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

/// Composite Gauss-Legendre rule with equal panels on [lo, hi].
inline QuadratureRule composite_legendre(double lo, double hi, int panels, int order)
{
    if (panels < 1)
    {
        throw InvalidArgument("composite_legendre: panel count must be positive");
    }
    const QuadratureRule base = gauss_legendre(order);
    const double h            = (hi - lo) / panels;
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
    rule.weights.reserve(static_cast<std::size_t>(panels) * order);
    for (int p = 0; p < panels; ++p)
    {
        const double a = lo + p * h;
        for (std::size_t i = 0; i < base.size(); ++i)
        {
            rule.nodes.push_back(a + 0.5 * h * (base.nodes[i] + 1.0));
            rule.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return rule;
}

///
/// ### QuadratureScheme
///
/// Rule for \f$ \int_0^\infty g(t)\, t^{\alpha-1} dt \f$ with g smooth and
/// decaying like \f$ e^{-\lambda_1 t} \f$. The interval is split at `split`:
///
///  - on (0, split] a Gauss-Jacobi rule absorbs the endpoint weight
///    \f$ t^{\alpha-1} \f$ exactly;
///  - on [split, oo) the substitution \f$ t = e^s \f$ leaves a smooth
///    integrand, integrated by composite Gauss-Legendre up to
///    \f$ s_{max} = \ln(\mathrm{tail\_cutoff}/\lambda_1) \f$ where the
///    spectral gap has damped everything to \f$ e^{-\mathrm{tail\_cutoff}} \f$.
///
/// The weights returned by build() include the factor \f$ t^{\alpha-1} \f$.
///
struct QuadratureScheme
{
    std::string name    = "jacobi-log";
    double split        = 1.0;
    int jacobi_nodes    = 80;
    int tail_panels     = 4;
    int tail_order      = 30;
    double tail_cutoff  = 40.0;
    double tolerance    = 1e-8;

    int node_count() const
    {
        return jacobi_nodes + tail_panels * tail_order;
    }

    void validate() const
    {
        if (!(split > 0.0))
        {
            throw InvalidArgument("quadrature: split point must be positive");
        }
        if (jacobi_nodes < 1 || tail_panels < 1 || tail_order < 1)
        {
            throw InvalidArgument("quadrature: node counts must be positive");
        }
        if (!(tail_cutoff > 0.0))
        {
            throw InvalidArgument("quadrature: tail cutoff must be positive");
        }
    }

    QuadratureRule build(double alpha, double spectral_gap) const
    {
        validate();
        if (!(alpha > 0.0))
        {
            throw InvalidArgument("quadrature: alpha must be positive");
        }
        if (!(spectral_gap > 0.0))
        {
            throw InvalidArgument("quadrature: spectral gap must be positive");
        }
        QuadratureRule rule;
        // (0, split]: t = split (1 + x) / 2.
        const QuadratureRule jac = gauss_jacobi(jacobi_nodes, 0.0, alpha - 1.0);
        const double scale       = std::pow(0.5 * split, alpha);
        for (std::size_t i = 0; i < jac.size(); ++i)
        {
            rule.nodes.push_back(0.5 * split * (1.0 + jac.nodes[i]));
            rule.weights.push_back(scale * jac.weights[i]);
        }
        // [split, oo): t = e^s, dt t^(alpha-1) = e^(alpha s) ds.
        const double s_lo = std::log(split);
        const double s_hi = std::log(tail_cutoff / spectral_gap);
        if (s_hi > s_lo)
        {
            const QuadratureRule tail = composite_legendre(s_lo, s_hi, tail_panels, tail_order);
            for (std::size_t i = 0; i < tail.size(); ++i)
            {
                rule.nodes.push_back(std::exp(tail.nodes[i]));
                rule.weights.push_back(tail.weights[i] * std::exp(alpha * tail.nodes[i]));
            }
        }
        return rule;
    }
};

///
/// ### OscillatoryScheme
///
/// Composite Gauss-Legendre rule on \f$ [0, S] \f$ for integrands
/// \f$ e^{-s^2/(4t)} \times \f$ (oscillation of frequency up to `frequency`).
/// S is chosen so that the Gaussian factor has dropped below
/// \f$ e^{-\mathrm{gaussian\_cutoff}} \f$; one panel is used per half-wave.
///
struct OscillatoryScheme
{
    int order              = 20;
    int min_panels         = 8;
    double panels_per_wave = 2.0;
    double gaussian_cutoff = 45.0;
    double tolerance       = 1e-8;

    void validate() const
    {
        if (order < 2 || min_panels < 1 || !(panels_per_wave > 0.0) ||
            !(gaussian_cutoff > 0.0) || !(tolerance > 0.0))
        {
            throw InvalidArgument("oscillatory scheme: parameters must be positive");
        }
    }

    double support(double t) const
    {
        return std::sqrt(4.0 * t * gaussian_cutoff);
    }

    int panels(double t, double frequency) const
    {
        const double waves = support(t) * frequency / (2.0 * pi);
        return min_panels + static_cast<int>(std::ceil(panels_per_wave * waves));
    }

    /// Rule on [0, support(t)]; `refine` multiplies the panel count.
    QuadratureRule build(double t, double frequency, int refine = 1) const
    {
        validate();
        return composite_legendre(0.0, support(t), refine * panels(t, frequency), order);
    }
};

} // namespace fraccal

#endif
