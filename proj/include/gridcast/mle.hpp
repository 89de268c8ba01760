#pragma once

#include "gridcast/timegrid.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace gridcast {

inline constexpr int kDesignColumns = 5;
inline constexpr double kMaxGramCondition = 1e10;

// Regressors of one prediction: years elapsed, weeks into year part,
// days into week part, temperature.
using FeatureVector = std::array<double, 4>;

struct DesignMatrix {
    Eigen::MatrixXd x;  // p x 5, column 0 is the intercept
    Eigen::VectorXd y;

    Eigen::Index rows() const { return x.rows(); }
};

struct MleFit {
    std::array<double, kDesignColumns> beta{};
    double sigma2 = 0.0;  // ML estimate, RSS / p
    std::size_t p = 0;
    std::string cell;
};

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

const char* design_column_name(int column);

DesignMatrix build_design(std::span<const TrainingRow> rows);

// Maximum-likelihood fit of y = X beta + N(0, sigma2). Throws
// SingularDesignError when the Gram matrix is rank deficient or its
// condition number exceeds kMaxGramCondition.
MleFit fit_mle(const DesignMatrix& design, std::string cell = {});

Prediction predict(const MleFit& fit, const FeatureVector& x);

// Sum of b consecutive cell predictions; cell errors are independent so the
// variances add.
Prediction forecast_horizon(std::span<const MleFit> fits, std::span<const FeatureVector> xs);

Eigen::VectorXd residuals(const MleFit& fit, const DesignMatrix& design);

struct SkippedCell {
    std::string cell;
    std::size_t p = 0;
    std::string reason;
};

struct LongTermFits {
    std::vector<MleFit> fits;
    std::vector<SkippedCell> skipped;
};

// Groups the dataset's segments by cell family and fits every family with
// enough rows. Families with p < 5 or a singular design are reported, not fitted.
LongTermFits fit_long_term(std::span<const Observation> dataset, const GridConfig& config, Quantity quantity);

}  // namespace gridcast
