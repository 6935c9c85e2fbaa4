#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "reserving/errors.hpp"

namespace reserving {

/// One cell of a run-off triangle. Indices are 1-based; a cell is observed
/// iff origin + dev <= k + 1.
struct CellIndex {
  int origin = 0;
  int dev = 0;
  bool observed = false;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Immutable triangle of strictly positive incremental payments, observed on
/// the upper-left support {(i,j) : 1 <= i <= k, 1 <= j <= k - i + 1}.
class RunOffTriangle {
 public:
  /// rows[i-1] holds the k-i+1 observed payments of origin year i.
  RunOffTriangle(std::vector<std::vector<double>> rows,
                 std::vector<std::string> labels = {});

  int k() const { return static_cast<int>(rows_.size()); }
  /// Number of observed cells, k(k+1)/2.
  int n() const { return k() * (k() + 1) / 2; }

  bool observed(int origin, int dev) const {
    return origin >= 1 && dev >= 1 && origin + dev <= k() + 1;
  }

  /// Payment of an observed cell; throws DataError for unobserved indices.
  double cell(int origin, int dev) const;

  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> labels_;
};

/// Parses the triangle CSV format: an optional header row of development-year
/// labels (auto-detected by a non-numeric first row), then one row per origin
/// year. An optional leading non-numeric field in a data row names the origin
/// year. Trailing blank fields mark unobserved cells.
RunOffTriangle parse_triangle(std::string_view csv_text);

/// Canonical order of the observed cells: development-year-major, origin
/// ascending within each development year. Every vector over cells in this
/// library follows this order.
std::vector<CellIndex> cell_order(const RunOffTriangle& t);

/// The unobserved (future) cells, origin-major, origin then dev ascending.
std::vector<CellIndex> future_cells(const RunOffTriangle& t);

/// 0/1 design row of cell (i,j) against columns (tau, alpha_2..alpha_k,
/// gamma_2..gamma_k).
Eigen::RowVectorXd design_row(int k, int origin, int dev);

/// n x (2k-1) indicator matrix, rows in canonical cell order.
Eigen::MatrixXd build_design_matrix(const RunOffTriangle& t);

/// Human-readable coefficient names: "tau", "alpha_2", ..., "gamma_k".
std::vector<std::string> coefficient_labels(int k);

}  // namespace reserving
