///
/// \file spectral_model.hpp
///
/// Spectral presentation of a closed manifold (or a finite surrogate): the
/// distinct eigenvalues of the positive Laplacian, their multiplicities, an
/// orthonormal eigenbasis per eigenspace, the geodesic distance and a
/// quadrature grid on which that basis is discretely orthonormal.
///
#ifndef FRACCAL_SPECTRAL_MODEL_HPP
#define FRACCAL_SPECTRAL_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "core.hpp"

namespace fraccal
{

///
/// Finite point set with positive quadrature weights, standing in for an open
/// set (or for the whole manifold when it is a full quadrature grid).
///
class ObservationGrid
{
public:
    ObservationGrid() = default;

    ObservationGrid(std::vector<Point> points, std::vector<double> weights, std::string label = {})
        : points_(std::move(points)), weights_(std::move(weights)), label_(std::move(label))
    {
        if (points_.size() != weights_.size())
        {
            throw InvalidArgument("grid: point and weight counts differ");
        }
        if (points_.empty())
        {
            throw InvalidArgument("grid: no points");
        }
        for (double w : weights_)
        {
            if (!(w > 0.0) || !std::isfinite(w))
            {
                throw InvalidArgument("grid: weights must be positive and finite");
            }
        }
        std::vector<Point> sorted(points_);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        {
            throw InvalidArgument("grid: points must be pairwise distinct");
        }
    }

    /// Grid with unit weights.
    static ObservationGrid unit_weights(std::vector<Point> points, std::string label = {})
    {
        std::vector<double> w(points.size(), 1.0);
        return ObservationGrid(std::move(points), std::move(w), std::move(label));
    }

    std::size_t size() const
    {
        return points_.size();
    }
    const std::vector<Point>& points() const
    {
        return points_;
    }
    const std::vector<double>& weights() const
    {
        return weights_;
    }
    const Point& point(std::size_t i) const
    {
        return points_[i];
    }
    double weight(std::size_t i) const
    {
        return weights_[i];
    }
    const std::string& label() const
    {
        return label_;
    }

    double total_weight() const
    {
        return std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }

    Eigen::Map<const Eigen::VectorXd> weight_vector() const
    {
        return {weights_.data(), static_cast<Eigen::Index>(weights_.size())};
    }

    /// Points (with their weights) satisfying `keep`.
    template <typename Pred>
    ObservationGrid subset(Pred&& keep, std::string label = {}) const
    {
        std::vector<Point> p;
        std::vector<double> w;
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            if (keep(points_[i]))
            {
                p.push_back(points_[i]);
                w.push_back(weights_[i]);
            }
        }
        return ObservationGrid(std::move(p), std::move(w), std::move(label));
    }

    /// Index of the point equal to `x` within `tol` per coordinate.
    std::optional<std::size_t> find(const Point& x, double tol = 1e-12) const
    {
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            const Point& p = points_[i];
            if (std::abs(p[0] - x[0]) <= tol && std::abs(p[1] - x[1]) <= tol &&
                std::abs(p[2] - x[2]) <= tol)
            {
                return i;
            }
        }
        return std::nullopt;
    }

    ObservationGrid mapped(const PointMap& map) const
    {
        std::vector<Point> p;
        p.reserve(points_.size());
        for (const Point& x : points_)
        {
            p.push_back(map(x));
        }
        return ObservationGrid(std::move(p), weights_, label_);
    }

private:
    std::vector<Point> points_;
    std::vector<double> weights_;
    std::string label_;
};

using GridRef = std::shared_ptr<const ObservationGrid>;

inline GridRef share(ObservationGrid grid)
{
    return std::make_shared<const ObservationGrid>(std::move(grid));
}

/// One distinct eigenvalue with an orthonormal basis of its eigenspace.
struct EigenLevel
{
    double eigenvalue = 0.0;
    int multiplicity  = 1;
    /// (branch in [0, multiplicity), point) -> value of that basis function.
    std::function<double(int, const Point&)> evaluate;
};

/// Eigenvalue and multiplicity of a level beyond the truncation.
struct TailLevel
{
    double eigenvalue;
    int multiplicity;
};

using DistanceFunction = std::function<double(const Point&, const Point&)>;

/// Writes all basis values (level by level, branch by branch) at a point.
using BasisEvaluator = std::function<void(const Point&, std::span<double>)>;

/// Everything needed to assemble a SpectralModel.
struct ModelParts
{
    std::string kind;
    std::vector<std::pair<std::string, double>> parameters;
    int dimension = 1;
    std::vector<EigenLevel> levels;
    double volume = 1.0;
    DistanceFunction distance;
    /// Levels past the truncation, used only for tail bounds.
    std::vector<TailLevel> tail;
    /// True when `tail` lists every remaining level (finite models).
    bool tail_is_complete = false;
    /// sup over x and levels of sum_j phi_{k,j}(x)^2 / d_k.
    double density_bound = 1.0;
    /// Full-manifold grid on which the retained basis is orthonormal.
    GridRef quadrature_grid;
    /// Optional fast path for evaluating the whole basis at a point.
    BasisEvaluator basis;
};

///
/// ### SpectralModel
///
/// Immutable after construction; all member functions are const and safe to
/// call concurrently.
///
/// Invariants checked at construction: the first level is the eigenvalue 0
/// with multiplicity 1, eigenvalues strictly increase, multiplicities are
/// positive.
///
class SpectralModel
{
public:
    explicit SpectralModel(ModelParts parts) : parts_(std::move(parts))
    {
        const auto& lv = parts_.levels;
        if (lv.empty())
        {
            throw ModelError("model: no eigenvalue levels");
        }
        if (lv[0].eigenvalue != 0.0 || lv[0].multiplicity != 1)
        {
            throw ModelError("model: first level must be eigenvalue 0 with multiplicity 1");
        }
        if (parts_.dimension < 1)
        {
            throw ModelError("model: dimension must be at least 1");
        }
        if (!(parts_.volume > 0.0))
        {
            throw ModelError("model: volume must be positive");
        }
        offsets_.push_back(0);
        for (std::size_t k = 0; k < lv.size(); ++k)
        {
            if (lv[k].multiplicity < 1)
            {
                throw ModelError("model: multiplicities must be positive");
            }
            if (!lv[k].evaluate && !parts_.basis)
            {
                throw ModelError("model: level without an evaluator");
            }
            if (k > 0 && (lv[k].eigenvalue <= lv[k - 1].eigenvalue ||
                          same_level(lv[k].eigenvalue, lv[k - 1].eigenvalue)))
            {
                throw ModelError("model: eigenvalues must strictly increase");
            }
            offsets_.push_back(offsets_.back() + lv[k].multiplicity);
        }
        if (!parts_.distance)
        {
            throw ModelError("model: missing distance function");
        }
    }

    const std::string& kind() const
    {
        return parts_.kind;
    }
    const std::vector<std::pair<std::string, double>>& parameters() const
    {
        return parts_.parameters;
    }
    int dimension() const
    {
        return parts_.dimension;
    }
    double volume() const
    {
        return parts_.volume;
    }
    const std::vector<EigenLevel>& levels() const
    {
        return parts_.levels;
    }
    const EigenLevel& level(std::size_t k) const
    {
        return parts_.levels.at(k);
    }
    /// Number K of retained distinct eigenvalues.
    int truncation() const
    {
        return static_cast<int>(parts_.levels.size());
    }
    /// Total number of retained basis functions.
    int basis_size() const
    {
        return offsets_.back();
    }
    /// Column of the first basis function of level k.
    int level_offset(std::size_t k) const
    {
        return offsets_.at(k);
    }
    const std::vector<TailLevel>& tail() const
    {
        return parts_.tail;
    }
    double density_bound() const
    {
        return parts_.density_bound;
    }
    const GridRef& quadrature_grid() const
    {
        return parts_.quadrature_grid;
    }

    std::vector<double> eigenvalues() const
    {
        std::vector<double> out;
        for (const auto& l : parts_.levels)
        {
            out.push_back(l.eigenvalue);
        }
        return out;
    }

    /// Smallest positive eigenvalue; infinity for a one-level model.
    double spectral_gap() const
    {
        return parts_.levels.size() > 1 ? parts_.levels[1].eigenvalue
                                        : std::numeric_limits<double>::infinity();
    }

    double distance(const Point& a, const Point& b) const
    {
        return parts_.distance(a, b);
    }

    void evaluate_basis(const Point& x, std::span<double> out) const
    {
        if (parts_.basis)
        {
            parts_.basis(x, out);
            return;
        }
        for (std::size_t k = 0; k < parts_.levels.size(); ++k)
        {
            const auto& l = parts_.levels[k];
            for (int j = 0; j < l.multiplicity; ++j)
            {
                out[offsets_[k] + j] = l.evaluate(j, x);
            }
        }
    }

    double evaluate(std::size_t k, int branch, const Point& x) const
    {
        const auto& l = parts_.levels.at(k);
        if (branch < 0 || branch >= l.multiplicity)
        {
            throw InvalidArgument("model: branch index out of range");
        }
        if (l.evaluate)
        {
            return l.evaluate(branch, x);
        }
        std::vector<double> buf(basis_size());
        evaluate_basis(x, buf);
        return buf[offsets_[k] + branch];
    }

    /// Basis sampled at points: rows are points, columns basis functions.
    Eigen::MatrixXd sample(const std::vector<Point>& points) const
    {
        Eigen::MatrixXd phi(static_cast<Eigen::Index>(points.size()), basis_size());
        std::vector<double> buf(basis_size());
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            evaluate_basis(points[i], buf);
            for (int c = 0; c < basis_size(); ++c)
            {
                phi(static_cast<Eigen::Index>(i), c) = buf[c];
            }
        }
        return phi;
    }

    Eigen::MatrixXd sample(const ObservationGrid& grid) const
    {
        return sample(grid.points());
    }

    /// Discrete Gram matrix of the basis under the grid quadrature.
    Eigen::MatrixXd gram(const ObservationGrid& grid) const
    {
        const Eigen::MatrixXd phi = sample(grid);
        return phi.transpose() * grid.weight_vector().asDiagonal() * phi;
    }

    ///
    /// Pointwise bound on the heat-kernel truncation error at time t:
    /// density_bound * sum over tail levels of d_k exp(-lambda_k t), with the
    /// unlisted remainder extrapolated geometrically: the listed tail is cut
    /// into two halves and their ratio q is taken as the decay per half.
    ///
    double heat_tail_bound(double t) const
    {
        const auto& tl = parts_.tail;
        if (tl.empty())
        {
            return 0.0;
        }
        const std::size_t half = tl.size() / 2;
        double first = 0.0;
        double second = 0.0;
        for (std::size_t i = 0; i < tl.size(); ++i)
        {
            const double term = tl[i].multiplicity * std::exp(-tl[i].eigenvalue * t);
            (i < half ? first : second) += term;
        }
        double sum = first + second;
        if (!parts_.tail_is_complete && half > 0)
        {
            const double q = second / first;
            if (!(q < 1.0))
            {
                // Not yet decaying at this t: the listed tail cannot certify
                // anything.
                return std::numeric_limits<double>::infinity();
            }
            sum += second * q / (1.0 - q);
        }
        return parts_.density_bound * sum;
    }

private:
    ModelParts parts_;
    std::vector<int> offsets_;
};

using ModelRef = std::shared_ptr<const SpectralModel>;

/// Minimum distance between two point sets under the model metric.
inline double separation(const SpectralModel& model, const std::vector<Point>& a,
                         const std::vector<Point>& b)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : a)
    {
        for (const auto& y : b)
        {
            best = std::min(best, model.distance(x, y));
        }
    }
    return best;
}

} // namespace fraccal

#endif
