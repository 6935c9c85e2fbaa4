#include "reserving/triangle.hpp"

#include <charconv>
#include <sstream>

namespace reserving {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_number(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

RunOffTriangle::RunOffTriangle(std::vector<std::vector<double>> rows,
                               std::vector<std::string> labels)
    : rows_(std::move(rows)), labels_(std::move(labels)) {
  if (rows_.empty()) throw EmptyInput();
  const int k = static_cast<int>(rows_.size());
  for (int i = 1; i <= k; ++i) {
    const auto& row = rows_[i - 1];
    const int expected = k - i + 1;
    if (static_cast<int>(row.size()) != expected) {
      std::ostringstream msg;
      msg << "origin year " << i << " has " << row.size()
          << " observed cells, expected " << expected;
      throw RaggedShape(msg.str());
    }
    for (int j = 1; j <= expected; ++j) {
      if (!(row[j - 1] > 0.0)) {
        std::ostringstream msg;
        msg << "payment at cell (" << i << "," << j << ") is " << row[j - 1]
            << "; payments must be strictly positive";
        throw NonPositivePayment(msg.str());
      }
    }
  }
  if (!labels_.empty() && static_cast<int>(labels_.size()) != k) {
    throw RaggedShape("label count does not match the number of origin years");
  }
}

double RunOffTriangle::cell(int origin, int dev) const {
  if (!observed(origin, dev)) {
    std::ostringstream msg;
    msg << "cell (" << origin << "," << dev << ") is not observed";
    throw DataError(msg.str());
  }
  return rows_[origin - 1][dev - 1];
}

RunOffTriangle parse_triangle(std::string_view csv_text) {
  std::vector<std::vector<std::string>> lines;
  {
    std::size_t start = 0;
    while (start <= csv_text.size()) {
      const auto nl = csv_text.find('\n', start);
      const auto raw = nl == std::string_view::npos
                           ? csv_text.substr(start)
                           : csv_text.substr(start, nl - start);
      auto fields = split_fields(raw);
      const bool blank = fields.size() == 1 && fields[0].empty();
      if (!blank) lines.push_back(std::move(fields));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }
  if (lines.empty()) throw EmptyInput();

  // Header row: any non-empty field that is not a number.
  std::size_t first_data = 0;
  {
    bool header = false;
    for (const auto& f : lines[0]) {
      double v;
      if (!f.empty() && !parse_number(f, v)) {
        header = true;
        break;
      }
    }
    if (header && lines.size() == 1) throw EmptyInput();
    if (header) first_data = 1;
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  bool any_label = false;
  for (std::size_t li = first_data; li < lines.size(); ++li) {
    auto fields = lines[li];
    std::string label;
    double v;
    if (!fields.empty() && !fields[0].empty() && !parse_number(fields[0], v)) {
      label = fields[0];
      any_label = true;
      fields.erase(fields.begin());
    }
    std::vector<double> row;
    bool past_observed = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& f = fields[c];
      if (f.empty()) {
        past_observed = true;
        continue;
      }
      if (past_observed) {
        std::ostringstream msg;
        msg << "row " << (li - first_data + 1)
            << ": observed cell after a blank field; the observed region "
               "must be the upper-left triangle";
        throw RaggedShape(msg.str());
      }
      if (!parse_number(f, v)) {
        std::ostringstream msg;
        msg << "row " << (li - first_data + 1) << ", column " << (c + 1)
            << ": cannot parse '" << f << "' as a number";
        throw NonNumericCell(msg.str());
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
    labels.push_back(std::move(label));
  }
  if (!any_label) labels.clear();
  return RunOffTriangle(std::move(rows), std::move(labels));
}

std::vector<CellIndex> cell_order(const RunOffTriangle& t) {
  std::vector<CellIndex> order;
  order.reserve(t.n());
  const int k = t.k();
  for (int j = 1; j <= k; ++j)
    for (int i = 1; i + j <= k + 1; ++i) order.push_back({i, j, true});
  return order;
}

std::vector<CellIndex> future_cells(const RunOffTriangle& t) {
  std::vector<CellIndex> cells;
  const int k = t.k();
  for (int i = 1; i <= k; ++i)
    for (int j = k - i + 2; j <= k; ++j) cells.push_back({i, j, false});
  return cells;
}

Eigen::RowVectorXd design_row(int k, int origin, int dev) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * k - 1);
  row(0) = 1.0;
  if (origin >= 2) row(origin - 1) = 1.0;
  if (dev >= 2) row(k - 1 + dev - 1) = 1.0;
  return row;
}

Eigen::MatrixXd build_design_matrix(const RunOffTriangle& t) {
  const int k = t.k();
  Eigen::MatrixXd x(t.n(), 2 * k - 1);
  int r = 0;
  for (const auto& c : cell_order(t)) x.row(r++) = design_row(k, c.origin, c.dev);
  return x;
}

std::vector<std::string> coefficient_labels(int k) {
  std::vector<std::string> labels;
  labels.emplace_back("tau");
  for (int i = 2; i <= k; ++i) labels.push_back("alpha_" + std::to_string(i));
  for (int j = 2; j <= k; ++j) labels.push_back("gamma_" + std::to_string(j));
  return labels;
}

}  // namespace reserving
