#include "driveiv/projection.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "driveiv/errors.hpp"

namespace driveiv {

namespace {
constexpr double kRankTol = 1e-10;
}

const IVDataset& validate_dataset(const IVDataset& data) {
  const Eigen::Index n = data.y.size();
  if (data.x.rows() != n || data.z.rows() != n)
    throw DimensionMismatch("dataset row counts differ: y has " +
                            std::to_string(n) + ", x has " +
                            std::to_string(data.x.rows()) + ", z has " +
                            std::to_string(data.z.rows()));
  const Eigen::Index p = data.x.cols();
  const Eigen::Index d = data.z.cols();
  if (p < 1 || d < 1)
    throw DimensionMismatch("x and z must each have at least one column");
  if (d < p)
    throw UnderIdentified("fewer instruments (" + std::to_string(d) +
                          ") than endogenous regressors (" + std::to_string(p) +
                          ")");
  if (n < d)
    throw DimensionMismatch("fewer rows (" + std::to_string(n) +
                            ") than instruments (" + std::to_string(d) + ")");
  if (!data.y.allFinite()) throw NonFinite("y contains NaN or Inf");
  if (!data.x.allFinite()) throw NonFinite("x contains NaN or Inf");
  if (!data.z.allFinite()) throw NonFinite("z contains NaN or Inf");
  return data;
}

ProjectedDesign project_onto_instruments(const IVDataset& data) {
  validate_dataset(data);
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.n_instruments();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data.z);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++rank;
  if (rank < d)
    throw RankDeficientInstruments(
        "instrument matrix has numerical rank " + std::to_string(rank) +
        " < " + std::to_string(d));

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(data.z);
  const Eigen::MatrixXd q_thin =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, d);

  ProjectedDesign design;
  design.x_proj = q_thin * (q_thin.transpose() * data.x);
  design.y_proj = q_thin * (q_thin.transpose() * data.y);
  design.gamma_hat = qr.solve(data.x);
  design.sigma_z_hat =
      data.z.transpose() * data.z / static_cast<double>(n);
  design.qr_rank = rank;
  return design;
}

}  // namespace driveiv
