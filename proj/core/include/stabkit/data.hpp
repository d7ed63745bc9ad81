#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stabkit {

enum class Family { gaussian, binomial };

std::string_view to_string(Family family);

/// Accepts "gaussian" and "binomial"; throws ParameterError otherwise.
Family parse_family(std::string_view name);

/// Design matrix, response and loss family. Immutable after construction.
///
/// Invariants checked on construction (DataError on violation):
///   n >= 2, p >= 1, all entries finite, unique column names,
///   binomial responses in {0, 1}.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> col_names,
          Family family);

  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  const std::vector<std::string>& col_names() const noexcept { return col_names_; }
  Family family() const noexcept { return family_; }
  Eigen::Index n() const noexcept { return X_.rows(); }
  Eigen::Index p() const noexcept { return X_.cols(); }

  /// Row subset in the given order.
  Dataset rows(std::span<const int> index) const;

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  std::vector<std::string> col_names_;
  Family family_;
};

/// Reads a CSV with a mandatory header row. The response column is removed
/// from the design; the remaining columns keep their file order.
Dataset load_csv(const std::filesystem::path& path, std::string_view response,
                 Family family);

/// Same as load_csv but from in-memory text; `source` is used in messages.
Dataset parse_csv_dataset(std::string_view text, std::string_view response, Family family,
                          std::string_view source = "<memory>");

/// Writes the covariates followed by the response column.
void write_csv(std::ostream& out, const Dataset& data, std::string_view response_name);

double logistic(double eta);

/// Gaussian: (y - eta)^2 / 2. Binomial: negative Bernoulli log-likelihood of
/// y in {0,1} under success probability logistic(eta), evaluated without
/// overflow for large |eta|.
double loss(Family family, double y, double eta);

/// Gaussian: y - eta. Binomial: y - logistic(eta).
Eigen::VectorXd negative_gradient(Family family, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& eta);

/// Mean loss over observations.
double empirical_risk(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta);

}  // namespace stabkit
