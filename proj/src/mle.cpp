#include "gridcast/mle.hpp"

#include "gridcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace gridcast {

namespace {

constexpr const char* kColumnNames[kDesignColumns] = {
    "intercept", "years_elapsed", "weeks_into_year_part", "days_into_week_part", "temperature_c",
};

}  // namespace

const char* design_column_name(int column) {
    if (column < 0 || column >= kDesignColumns) throw std::out_of_range("design column");
    return kColumnNames[column];
}

DesignMatrix build_design(std::span<const TrainingRow> rows) {
    if (rows.size() < static_cast<std::size_t>(kDesignColumns))
        throw std::invalid_argument("design needs at least 5 rows, got " + std::to_string(rows.size()));
    const auto p = static_cast<Eigen::Index>(rows.size());
    DesignMatrix design{Eigen::MatrixXd(p, kDesignColumns), Eigen::VectorXd(p)};
    for (Eigen::Index r = 0; r < p; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        design.x.row(r) << 1.0, row.years_elapsed, row.weeks_into_year_part, row.days_into_week_part,
            row.temperature_c;
        design.y(r) = row.y;
    }
    return design;
}

MleFit fit_mle(const DesignMatrix& design, std::string cell) {
    const auto& x = design.x;
    const auto& y = design.y;
    if (x.cols() != kDesignColumns) throw std::invalid_argument("design must have 5 columns");
    if (x.rows() != y.size()) throw std::invalid_argument("design X and Y row counts differ");
    if (x.rows() < kDesignColumns) throw std::invalid_argument("design needs at least 5 rows");

    // A constant regressor is collinear with the intercept.
    for (int c = 1; c < kDesignColumns; ++c) {
        if (x.col(c).maxCoeff() == x.col(c).minCoeff())
            throw SingularDesignError(static_cast<std::size_t>(c), kColumnNames[c],
                                      "column is constant and collinear with the intercept");
    }

    const Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::VectorXd moment = x.transpose() * y;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(gram);
    const double lo = eigen.eigenvalues().minCoeff();
    const double hi = eigen.eigenvalues().maxCoeff();
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition <= kMaxGramCondition)) {
        // The null direction loads most heavily on the offending column.
        Eigen::Index worst = 0;
        eigen.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
        throw SingularDesignError(static_cast<std::size_t>(worst), kColumnNames[worst],
                                  "Gram matrix condition number " + std::to_string(condition) +
                                      " exceeds 1e10");
    }

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd beta = ldlt.solve(moment);
    // One step of iterative refinement.
    beta += ldlt.solve(moment - gram * beta);

    MleFit fit;
    std::copy(beta.data(), beta.data() + kDesignColumns, fit.beta.begin());
    fit.p = static_cast<std::size_t>(x.rows());
    fit.sigma2 = (y - x * beta).squaredNorm() / static_cast<double>(fit.p);
    fit.cell = std::move(cell);
    return fit;
}

Prediction predict(const MleFit& fit, const FeatureVector& x) {
    double mean = fit.beta[0];
    for (std::size_t i = 0; i < x.size(); ++i) mean += fit.beta[i + 1] * x[i];
    return {mean, fit.sigma2};
}

Prediction forecast_horizon(std::span<const MleFit> fits, std::span<const FeatureVector> xs) {
    if (fits.size() != xs.size())
        throw std::invalid_argument("forecast_horizon: " + std::to_string(fits.size()) + " fits but " +
                                    std::to_string(xs.size()) + " feature vectors");
    Prediction total;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto cell = predict(fits[i], xs[i]);
        total.mean += cell.mean;
        total.variance += cell.variance;
    }
    return total;
}

Eigen::VectorXd residuals(const MleFit& fit, const DesignMatrix& design) {
    if (design.x.cols() != kDesignColumns || design.x.rows() != design.y.size())
        throw std::invalid_argument("residuals: design dimensions mismatch");
    const Eigen::Map<const Eigen::VectorXd> beta(fit.beta.data(), kDesignColumns);
    return design.y - design.x * beta;
}

LongTermFits fit_long_term(std::span<const Observation> dataset, const GridConfig& config, Quantity quantity) {
    std::map<CellFamily, std::vector<TrainingRow>> families;
    for (const auto& segment : partition_dataset(dataset, config))
        families[segment.key.family()].push_back(aggregate_segment(segment, quantity));

    LongTermFits out;
    for (const auto& [family, rows] : families) {
        const std::string id = family.id();
        if (rows.size() < static_cast<std::size_t>(kDesignColumns)) {
            out.skipped.push_back({id, rows.size(), "fewer than 5 rows"});
            continue;
        }
        try {
            out.fits.push_back(fit_mle(build_design(rows), id));
        } catch (const SingularDesignError& e) {
            out.skipped.push_back({id, rows.size(), e.what()});
        }
    }
    return out;
}

}  // namespace gridcast
