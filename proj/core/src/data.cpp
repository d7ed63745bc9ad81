#include "stabkit/data.hpp"

#include "stabkit/csv.hpp"
#include "stabkit/error.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace stabkit {

std::string_view to_string(Family family) {
  return family == Family::gaussian ? "gaussian" : "binomial";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "binomial") return Family::binomial;
  throw ParameterError("unknown family '" + std::string(name) +
                       "' (expected gaussian or binomial)");
}

namespace {

void check_binary(const Eigen::VectorXd& y, std::string_view where) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      std::ostringstream msg;
      msg << where << ": response not in {0,1} at row " << i + 1 << " (value " << y[i] << ")";
      throw DataError(DataError::Kind::non_binary_response, msg.str());
    }
  }
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> col_names,
                 Family family)
    : X_(std::move(X)), y_(std::move(y)), col_names_(std::move(col_names)), family_(family) {
  using Kind = DataError::Kind;
  if (X_.rows() < 2 || X_.cols() < 1)
    throw DataError(Kind::invalid_shape, "dataset needs n >= 2 rows and p >= 1 columns");
  if (y_.size() != X_.rows())
    throw DataError(Kind::invalid_shape, "response length does not match design rows");
  if (static_cast<Eigen::Index>(col_names_.size()) != X_.cols())
    throw DataError(Kind::invalid_shape, "column name count does not match design columns");

  std::unordered_set<std::string> seen;
  for (const auto& name : col_names_) {
    if (!seen.insert(name).second)
      throw DataError(Kind::duplicate_column, "duplicate column '" + name + "'");
  }
  for (Eigen::Index j = 0; j < X_.cols(); ++j) {
    for (Eigen::Index i = 0; i < X_.rows(); ++i) {
      if (!std::isfinite(X_(i, j))) {
        std::ostringstream msg;
        msg << "non-finite value in column '" << col_names_[j] << "' at row " << i + 1;
        throw DataError(Kind::non_finite, msg.str());
      }
    }
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i])) {
      std::ostringstream msg;
      msg << "non-finite response at row " << i + 1;
      throw DataError(Kind::non_finite, msg.str());
    }
  }
  if (family_ == Family::binomial) check_binary(y_, "dataset");
}

Dataset Dataset::rows(std::span<const int> index) const {
  Eigen::MatrixXd Xs(static_cast<Eigen::Index>(index.size()), X_.cols());
  Eigen::VectorXd ys(static_cast<Eigen::Index>(index.size()));
  for (Eigen::Index j = 0; j < X_.cols(); ++j) {
    for (std::size_t r = 0; r < index.size(); ++r) Xs(r, j) = X_(index[r], j);
  }
  for (std::size_t r = 0; r < index.size(); ++r) ys[r] = y_[index[r]];
  return Dataset(std::move(Xs), std::move(ys), col_names_, family_);
}

Dataset parse_csv_dataset(std::string_view text, std::string_view response, Family family,
                          std::string_view source) {
  using Kind = DataError::Kind;
  const std::string src(source);
  const auto rows = csv::parse(text);
  if (rows.empty()) throw DataError(Kind::invalid_shape, src + ": missing header row");

  const auto& header = rows.front();
  std::unordered_set<std::string> seen;
  int response_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!seen.insert(header[j]).second)
      throw DataError(Kind::duplicate_column, src + ": duplicate column '" + header[j] + "'");
    if (header[j] == response) response_col = static_cast<int>(j);
  }
  if (response_col < 0)
    throw DataError(Kind::missing_column,
                    src + ": response column '" + std::string(response) + "' not found");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size()) - 1;
  const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 1;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<int>(j) != response_col) names.push_back(header[j]);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i) + 1];
    const auto line = i + 2;
    if (row.size() != header.size()) {
      std::ostringstream msg;
      msg << src << ": row " << line << " has " << row.size() << " fields, expected "
          << header.size();
      throw DataError(Kind::ragged_row, msg.str());
    }
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto& cell = row[j];
      double v = 0.0;
      if (cell.find_first_not_of(" \t") == std::string::npos) {
        std::ostringstream msg;
        msg << src << ": empty cell at row " << line << ", column " << j + 1 << " ('"
            << header[j] << "')";
        throw DataError(Kind::empty_cell, msg.str());
      }
      if (!csv::parse_double(cell, v)) {
        std::ostringstream msg;
        msg << src << ": non-numeric value '" << cell << "' at row " << line << ", column "
            << j + 1 << " ('" << header[j] << "')";
        throw DataError(Kind::non_numeric, msg.str());
      }
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << src << ": non-finite value at row " << line << ", column " << j + 1 << " ('"
            << header[j] << "')";
        throw DataError(Kind::non_finite, msg.str());
      }
      if (static_cast<int>(j) == response_col) {
        y[i] = v;
      } else {
        X(i, col++) = v;
      }
    }
  }
  if (family == Family::binomial) check_binary(y, src);
  return Dataset(std::move(X), std::move(y), std::move(names), family);
}

Dataset load_csv(const std::filesystem::path& path, std::string_view response, Family family) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError(DataError::Kind::missing_file, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_dataset(buf.str(), response, family, path.string());
}

void write_csv(std::ostream& out, const Dataset& data, std::string_view response_name) {
  csv::Row row = data.col_names();
  row.emplace_back(response_name);
  csv::write_row(out, row);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < data.p(); ++j) row.push_back(csv::format_double(data.X()(i, j)));
    row.push_back(csv::format_double(data.y()[i]));
    csv::write_row(out, row);
  }
}

double logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

double loss(Family family, double y, double eta) {
  if (family == Family::gaussian) {
    const double r = y - eta;
    return 0.5 * r * r;
  }
  // -log h(eta) = softplus(-eta), -log(1 - h(eta)) = softplus(eta)
  return y * softplus(-eta) + (1.0 - y) * softplus(eta);
}

Eigen::VectorXd negative_gradient(Family family, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& eta) {
  if (y.size() != eta.size())
    throw ParameterError("negative_gradient: y and eta differ in length");
  Eigen::VectorXd u(y.size());
  if (family == Family::gaussian) {
    u = y - eta;
  } else {
    for (Eigen::Index i = 0; i < y.size(); ++i) u[i] = y[i] - logistic(eta[i]);
  }
  return u;
}

double empirical_risk(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  if (y.size() != eta.size()) throw ParameterError("empirical_risk: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += loss(family, y[i], eta[i]);
  return total / static_cast<double>(y.size());
}

}  // namespace stabkit
